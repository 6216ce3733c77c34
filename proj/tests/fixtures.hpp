// Copyright 2026 The pdeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "pdeval/datasets.hpp"

namespace pdeval::testing {

// Manifest rows shaped like an official split, without any files behind them.
inline std::vector<PreparedSample> FixtureSamples(const DatasetSpec& spec, std::size_t count,
                                                  std::size_t width = 0, std::size_t height = 0) {
  GtKind kind = GtKind::kDepth16;
  switch (spec.task) {
    case Task::kDepth:
      kind = spec.dataset_id.rfind("diode", 0) == 0 ? GtKind::kDepthRawF32 : GtKind::kDepth16;
      break;
    case Task::kNormals: kind = GtKind::kNormalsPng; break;
    case Task::kSegmentation: kind = GtKind::kLabelsPng; break;
  }
  if (width == 0) width = spec.resolution ? spec.resolution->first : 2048;
  if (height == 0) height = spec.resolution ? spec.resolution->second : 1024;
  std::vector<PreparedSample> samples;
  for (std::size_t i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "%06zu", i);
    samples.push_back({id, spec.dataset_id, kind, width, height,
                       std::string("images/") + id + ".png", std::string("gt/") + id + ".png",
                       "", "fixture"});
  }
  return samples;
}

}  // namespace pdeval::testing

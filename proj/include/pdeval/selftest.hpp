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

#include <string>
#include <vector>

#include "pdeval/datasets.hpp"
#include "pdeval/runner.hpp"

namespace pdeval {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// End-to-end oracle: a synthetic dataset whose "generated" outputs are the
// ground truth rendered through each codec and stored as 8-bit PNG. A
// correct pipeline scores them as near-perfect predictions.
inline std::vector<SelftestCheck> run_selftest(const fs::path& dir, std::size_t jobs = 1,
                                               std::size_t count = 6) {
  SynthDatasetSpec spec;
  spec.count = count;
  spec.width = 64;
  spec.height = 48;
  spec.seed = 7;
  write_synthetic_dataset(dir, spec);

  auto run = [&](EvalTask task, const std::string& prepared) {
    EvalConfig config;
    config.task = task;
    config.model_id = "selftest";
    config.prepared_dir = dir / prepared;
    config.generated_dir = dir / "generated" / ToString(task);
    config.cache_dir = dir / "cache";
    config.options.jobs = jobs;
    config.force_calibration = true;
    return evaluate(config);
  };
  auto value = [](const Report& r, const std::string& name) {
    return r.Aggregate(name).value_or(std::numeric_limits<double>::quiet_NaN());
  };

  std::vector<SelftestCheck> checks;
  {
    const Report r = run(EvalTask::kDepth, "depth");
    bool per_sample = true;
    for (const auto& row : r.samples) {
      for (const auto& m : row.metrics) {
        if (m.name == "delta1" && m.value != 1.0) per_sample = false;
        if (m.name == "absrel" && !(m.value.value_or(1.0) < 0.01)) per_sample = false;
      }
      per_sample = per_sample && row.status == "ok";
    }
    const double d1 = value(r, "delta1");
    const double absrel = value(r, "absrel");
    checks.push_back({"depth round trip", per_sample && d1 == 1.0 && absrel < 0.01,
                      "delta1=" + FormatNumber(d1) + " absrel=" + FormatNumber(absrel)});
  }
  {
    const Report r = run(EvalTask::kNormals, "normals");
    const double mean = value(r, "mean_deg");
    checks.push_back({"normals round trip", mean < 1.0,
                      "mean_deg=" + FormatNumber(mean) + " a11=" + FormatNumber(value(r, "a11"))});
  }
  for (EvalTask task : {EvalTask::kSeg19, EvalTask::kSeg7}) {
    const Report r = run(task, "seg");
    const double miou = value(r, "miou");
    checks.push_back({ToString(task) + " round trip", miou == 1.0,
                      "miou=" + FormatNumber(miou) +
                          " pixel_acc=" + FormatNumber(value(r, "pixel_acc"))});
  }
  return checks;
}

}  // namespace pdeval

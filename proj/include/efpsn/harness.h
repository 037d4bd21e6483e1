// Copyright 2026 The EFPSN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end experiments: accuracy sweep (EFPSN vs non-zero-sum vs
// noise-free) and privacy sweep (DP budgets and gradient-inversion MSE).

#ifndef EFPSN_HARNESS_H_
#define EFPSN_HARNESS_H_

#include <string>
#include <vector>

#include "efpsn/config.h"
#include "json.hpp"

namespace efpsn {

inline constexpr int kReportSchemaVersion = 1;

struct ReportRow {
  std::string run_id;
  std::string algorithm;  // efpsn, nonzerosum or noisefree
  double gamma = 0.0;
  int step = 0;
  std::string metric;
  double value = 0.0;
};

struct RunReport {
  std::vector<ReportRow> rows;
  // schema_version, config, seed_manifest, final metrics, wall_clock_seconds.
  nlohmann::json summary;

  // Rows matching all given fields; the last such row's value, or NaN.
  double Find(const std::string& algorithm, double gamma,
              const std::string& metric) const;
};

// Runs keygen, Phase I, perturbation and decentralized optimization for each
// gamma and each algorithm. Stage failures surface as StageFailure
// (ConfigError keeps its type).
RunReport RunAccuracyExperiment(const ExperimentConfig& cfg);

// Per-gamma DP budgets plus the gradient-inversion attack under zero-sum and
// non-zero-sum perturbation. With an artifact directory, trial 0's
// reconstructions are written there as PGM snapshots plus CSV traces.
RunReport RunPrivacyExperiment(const ExperimentConfig& cfg,
                               const std::string& artifact_dir = "");

// Concatenates reports; summaries are nested under `sections`.
RunReport MergeReports(const std::vector<std::pair<std::string, RunReport>>& parts);

// Columns: run_id, algorithm, gamma, step, metric, value. Numbers use the
// shortest round-trip representation, so equal reports give equal bytes.
std::string ReportCsv(const RunReport& report);

// Writes <dir>/<stem>.csv and <dir>/<stem>.json, creating dir.
void WriteReport(const RunReport& report, const std::string& dir,
                 const std::string& stem);

}  // namespace efpsn

#endif  // EFPSN_HARNESS_H_

// kmv/pipeline.h

// Copyright 2026  The kmv authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef KMV_PIPELINE_H_
#define KMV_PIPELINE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kmv/dataset.h"
#include "kmv/evaluation.h"
#include "kmv/kernel_learning.h"
#include "kmv/kernels.h"

namespace kmv {

struct SyntheticConfig {
  int clients = 5;
  int impostors = 3;
  int per_identity = 6;
  Index dim = 8;
  double separation = 8.0;
  Warp warp = Warp::kNone;
};

// End-to-end run description.  Exactly one of `synthetic` or the
// samples/protocol file pair must be set; at least one mode is required.
// All randomness flows from `seed`.
struct RunConfig {
  std::optional<SyntheticConfig> synthetic;
  std::string samples_path;
  std::string protocol_path;
  Index heq_width = 0;   // optional histogram equalization, 0 = off
  Index heq_height = 0;
  KernelSpec kernel;
  LearnOptions learn;
  bool baseline = false;  // coefficients = sqrt(eigenvalues), no learning
  std::vector<ClassificationMode> modes;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string roc_path;
  std::string save_model_path;

  void Validate() const;
  static RunConfig FromJsonFile(const std::string &path);
  static RunConfig FromJson(const std::string &json_text);
};

struct RunResult {
  std::vector<VerificationReport> reports;
  ModelPack pack;
};

// load/generate -> Gram -> spectrum -> (learn | baseline) -> fit ->
// evaluate per mode.  Pure given the config.
RunResult RunPipeline(const RunConfig &config);

// RunPipeline plus report emission and a human-readable summary on `out`.
// Returns the process exit status: 0 success, 1 runtime/numerical error,
// 2 usage/validation error; on failure a machine-readable error object is
// printed to `err`.
int CmdRun(const RunConfig &config, std::ostream &out, std::ostream &err);

// Runs the pipeline once per kernel of the grid on one shared dataset and
// aggregates a table keyed by kernel parameters and mode.  A failing grid
// point is recorded in the table, not fatal.  When compare_baseline is set
// each grid point also runs with baseline coefficients.
int CmdSweep(const RunConfig &base, const std::vector<KernelSpec> &grid,
             bool compare_baseline, std::ostream &out, std::ostream &err);

// Generates a synthetic dataset and writes the samples CSV / protocol JSON.
int CmdGen(const SyntheticConfig &synthetic, std::uint64_t seed,
           const std::string &samples_path, const std::string &protocol_path,
           std::ostream &out, std::ostream &err);

// Re-renders a stored report array as the summary table.
int CmdReport(const std::string &report_path, std::ostream &out,
              std::ostream &err);

// The summary table shared by run/sweep/report.
void PrintReportTable(const std::vector<VerificationReport> &reports,
                      std::ostream &out);

}  // namespace kmv

#endif  // KMV_PIPELINE_H_

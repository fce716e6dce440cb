// src/pipeline.cc

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

#include "kmv/pipeline.h"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "kmv/cskda.h"
#include "kmv/spectral.h"

namespace kmv {

namespace {

void PrintErrorObject(const Error &error, std::ostream &err) {
  nlohmann::json j;
  j["error"] = ErrorCodeName(error.code());
  j["message"] = error.what();
  err << j.dump() << "\n";
}

int ExitCode(const Error &error) { return error.IsValidation() ? 2 : 1; }

VerificationDataset BuildDataset(const RunConfig &config) {
  VerificationDataset dataset;
  if (config.synthetic) {
    const SyntheticConfig &s = *config.synthetic;
    dataset = GenerateSyntheticProtocol(s.clients, s.impostors, s.per_identity,
                                        s.dim, s.separation, s.warp,
                                        config.seed);
  } else {
    dataset = LoadDataset(config.samples_path, config.protocol_path);
  }
  if (config.heq_width > 0) {
    for (Index i = 0; i < dataset.NumSamples(); ++i) {
      std::vector<double> row(dataset.samples.row(i).begin(),
                              dataset.samples.row(i).end());
      const std::vector<double> equalized =
          HistogramEqualize(row, config.heq_width, config.heq_height);
      for (Index d = 0; d < dataset.Dim(); ++d)
        dataset.samples(i, d) = equalized[d];
    }
  }
  return dataset;
}

RunResult RunOnDataset(const VerificationDataset &dataset,
                       const RunConfig &config) {
  const Matrix gram = GramMatrix(config.kernel, dataset);
  SpectralModel spectral = Decompose(gram);
  const std::vector<int> labels = dataset.TrainingClasses();
  const Index n = dataset.TrainCount();

  Vector mu;
  double alpha = 0, ratio_trace = 0;
  int iterations = 0;
  if (config.baseline) {
    mu = spectral.BaselineCoefficients();
    const ScatterSummaries summaries =
        ComputeScatterSummaries(spectral, labels, n);
    try {
      ratio_trace = TraceRatio(summaries, mu);
    } catch (const Error &) {
      ratio_trace = 0;  // zero within-class scatter; diagnostic only
    }
  } else {
    const LearnedCoefficients learned =
        LearnKernel(spectral, labels, n, config.learn);
    mu = learned.mu;
    alpha = learned.alpha;
    ratio_trace = learned.ratio_trace;
    iterations = learned.iterations;
  }
  spectral.coefficients = mu;

  RunResult result;
  result.pack.spectral = std::move(spectral);
  result.pack.mu = mu;
  result.pack.cskda = FitCskda(result.pack.spectral, mu, dataset);

  for (ClassificationMode mode : config.modes) {
    VerificationReport report = Evaluate(result.pack, dataset, mode);
    report.kernel = config.kernel;
    report.learn = config.learn;
    report.baseline = config.baseline;
    report.alpha = alpha;
    report.mu_summary.ratio_trace = ratio_trace;
    report.mu_summary.iterations = iterations;
    result.reports.push_back(std::move(report));
  }
  return result;
}

VerificationReport ReportFromJson(const nlohmann::json &j) {
  VerificationReport report;
  report.mode = ClassificationModeFromName(j.at("mode").get<std::string>());
  report.threshold = j.at("threshold").get<double>();
  report.eval_far = j.at("eval_far").get<double>();
  report.eval_frr = j.at("eval_frr").get<double>();
  report.test_far = j.at("test_far").get<double>();
  report.test_frr = j.at("test_frr").get<double>();
  report.test_ter = j.at("test_ter").get<double>();
  report.kernel = KernelSpec::FromJson(j.at("kernel").dump());
  report.learn = LearnOptions::FromJson(j.at("learn").dump());
  report.baseline = j.value("baseline", false);
  report.alpha = j.value("alpha", 0.0);
  const auto &summary = j.at("mu_summary");
  report.mu_summary.p = summary.value("p", Index{0});
  report.mu_summary.beta = summary.value("beta", 0.0);
  report.mu_summary.min = summary.value("min", 0.0);
  report.mu_summary.max = summary.value("max", 0.0);
  report.mu_summary.norm = summary.value("norm", 0.0);
  report.mu_summary.ratio_trace = summary.value("ratio_trace", 0.0);
  report.mu_summary.iterations = summary.value("iterations", 0);
  return report;
}

}  // namespace

void RunConfig::Validate() const {
  const bool has_files = !samples_path.empty() || !protocol_path.empty();
  if (synthetic && has_files)
    throw Error(ErrorCode::kInvalidArgument,
                "synthetic and file sources are mutually exclusive");
  if (!synthetic && (samples_path.empty() || protocol_path.empty()))
    throw Error(ErrorCode::kInvalidArgument,
                "either synthetic parameters or both samples and protocol "
                "paths are required");
  if (modes.empty())
    throw Error(ErrorCode::kInvalidArgument,
                "at least one classification mode is required");
  if ((heq_width > 0) != (heq_height > 0))
    throw Error(ErrorCode::kInvalidArgument,
                "histogram equalization needs both width and height");
  kernel.Validate();
}

RunConfig RunConfig::FromJsonFile(const std::string &path) {
  std::ifstream file(path);
  if (!file)
    throw Error(ErrorCode::kFileNotFound,
                "cannot open config file '" + path + "'");
  std::stringstream text;
  text << file.rdbuf();
  return FromJson(text.str());
}

RunConfig RunConfig::FromJson(const std::string &json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("run config is not valid JSON: ") + e.what());
  }
  RunConfig config;
  try {
    if (j.contains("synthetic")) {
      const auto &s = j["synthetic"];
      SyntheticConfig synthetic;
      synthetic.clients = s.value("clients", synthetic.clients);
      synthetic.impostors = s.value("impostors", synthetic.impostors);
      synthetic.per_identity = s.value("per", synthetic.per_identity);
      synthetic.dim = s.value("dim", synthetic.dim);
      synthetic.separation = s.value("sep", synthetic.separation);
      synthetic.warp = WarpFromName(s.value("warp", "none"));
      config.synthetic = synthetic;
    }
    config.samples_path = j.value("samples", "");
    config.protocol_path = j.value("protocol", "");
    if (j.contains("heq")) {
      config.heq_width = j["heq"].value("width", Index{0});
      config.heq_height = j["heq"].value("height", Index{0});
    }
    if (j.contains("kernel"))
      config.kernel = KernelSpec::FromJson(j["kernel"].dump());
    if (j.contains("learn"))
      config.learn = LearnOptions::FromJson(j["learn"].dump());
    config.baseline = j.value("baseline", false);
    if (j.contains("modes"))
      for (const auto &name : j["modes"])
        config.modes.push_back(
            ClassificationModeFromName(name.get<std::string>()));
    config.seed = j.value("seed", std::uint64_t{0});
    config.out_path = j.value("out", "");
    config.roc_path = j.value("roc", "");
    config.save_model_path = j.value("save_model", "");
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidArgument,
                "run config field error: " + std::string(e.what()));
  }
  return config;
}

RunResult RunPipeline(const RunConfig &config) {
  config.Validate();
  return RunOnDataset(BuildDataset(config), config);
}

void PrintReportTable(const std::vector<VerificationReport> &reports,
                      std::ostream &out) {
  out << std::left << std::setw(10) << "method" << std::setw(26) << "kernel"
      << std::setw(6) << "mode" << std::right << std::setw(10) << "eval_far"
      << std::setw(10) << "eval_frr" << std::setw(10) << "test_far"
      << std::setw(10) << "test_frr" << std::setw(10) << "test_ter" << "\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(2);
  for (const auto &report : reports) {
    out << std::left << std::setw(10)
        << (report.baseline ? "baseline" : "learned") << std::setw(26)
        << report.kernel.Describe() << std::setw(6)
        << ClassificationModeName(report.mode) << std::right << std::setw(10)
        << report.eval_far << std::setw(10) << report.eval_frr << std::setw(10)
        << report.test_far << std::setw(10) << report.test_frr << std::setw(10)
        << report.test_ter << "\n";
  }
  out.flags(flags);
  out.precision(precision);
}

int CmdRun(const RunConfig &config, std::ostream &out, std::ostream &err) {
  try {
    const RunResult result = RunPipeline(config);
    if (!config.out_path.empty())
      EmitReport(result.reports, config.out_path, config.roc_path);
    if (!config.save_model_path.empty()) {
      std::ofstream model_file(config.save_model_path);
      if (!model_file)
        throw Error(ErrorCode::kIoError, "cannot write model '" +
                                             config.save_model_path + "'");
      model_file << result.pack.ToJson() << "\n";
    }
    if (!result.reports.empty()) {
      const auto &first = result.reports.front();
      out << "alpha=" << first.alpha
          << " iterations=" << first.mu_summary.iterations
          << " ratio_trace=" << first.mu_summary.ratio_trace
          << " p=" << first.mu_summary.p << " m_b=" << result.pack.cskda.m_b
          << "\n";
    }
    for (const auto &warning : result.pack.cskda.warnings)
      out << "warning: " << warning << "\n";
    PrintReportTable(result.reports, out);
    return 0;
  } catch (const Error &error) {
    PrintErrorObject(error, err);
    return ExitCode(error);
  } catch (const std::exception &e) {
    err << nlohmann::json{{"error", "Internal"}, {"message", e.what()}}.dump()
        << "\n";
    return 1;
  }
}

int CmdSweep(const RunConfig &base, const std::vector<KernelSpec> &grid,
             bool compare_baseline, std::ostream &out, std::ostream &err) {
  try {
    if (grid.empty())
      throw Error(ErrorCode::kInvalidArgument, "sweep grid is empty");
    RunConfig shared = base;
    shared.kernel = grid.front();
    shared.Validate();

    // One dataset for the whole grid; the protocol does not depend on the
    // kernel, so reusing it isolates kernel effects.
    const VerificationDataset dataset = BuildDataset(shared);

    nlohmann::json table = nlohmann::json::array();
    std::vector<VerificationReport> all_reports;
    int successes = 0;
    for (const KernelSpec &kernel : grid) {
      std::vector<bool> baseline_choices;
      if (compare_baseline && !base.baseline) baseline_choices.push_back(true);
      baseline_choices.push_back(base.baseline);
      for (bool baseline : baseline_choices) {
        RunConfig point = base;
        point.kernel = kernel;
        point.baseline = baseline;
        nlohmann::json row;
        row["kernel"] = nlohmann::json::parse(kernel.ToJson());
        row["method"] = baseline ? "baseline" : "learned";
        try {
          const RunResult result = RunOnDataset(dataset, point);
          nlohmann::json mode_reports = nlohmann::json::array();
          for (const auto &report : result.reports) {
            mode_reports.push_back(nlohmann::json::parse(report.ToJson()));
            all_reports.push_back(report);
          }
          row["reports"] = mode_reports;
          ++successes;
        } catch (const Error &error) {
          row["error"] = {{"error", ErrorCodeName(error.code())},
                          {"message", error.what()}};
        }
        table.push_back(row);
      }
    }

    if (!base.out_path.empty()) {
      std::ofstream file(base.out_path);
      if (!file)
        throw Error(ErrorCode::kIoError,
                    "cannot write sweep table '" + base.out_path + "'");
      file << table.dump(2) << "\n";
    }
    PrintReportTable(all_reports, out);
    return successes > 0 ? 0 : 1;
  } catch (const Error &error) {
    PrintErrorObject(error, err);
    return ExitCode(error);
  } catch (const std::exception &e) {
    err << nlohmann::json{{"error", "Internal"}, {"message", e.what()}}.dump()
        << "\n";
    return 1;
  }
}

int CmdGen(const SyntheticConfig &synthetic, std::uint64_t seed,
           const std::string &samples_path, const std::string &protocol_path,
           std::ostream &out, std::ostream &err) {
  try {
    const VerificationDataset dataset = GenerateSyntheticProtocol(
        synthetic.clients, synthetic.impostors, synthetic.per_identity,
        synthetic.dim, synthetic.separation, synthetic.warp, seed);
    WriteDataset(dataset, samples_path, protocol_path);
    out << "wrote " << dataset.NumSamples() << " samples ("
        << dataset.TrainCount() << " train, " << dataset.EvaluationCount()
        << " evaluation, " << dataset.TestCount() << " test) to "
        << samples_path << " / " << protocol_path << "\n";
    return 0;
  } catch (const Error &error) {
    PrintErrorObject(error, err);
    return ExitCode(error);
  } catch (const std::exception &e) {
    err << nlohmann::json{{"error", "Internal"}, {"message", e.what()}}.dump()
        << "\n";
    return 1;
  }
}

int CmdReport(const std::string &report_path, std::ostream &out,
              std::ostream &err) {
  try {
    std::ifstream file(report_path);
    if (!file)
      throw Error(ErrorCode::kFileNotFound,
                  "cannot open report '" + report_path + "'");
    std::stringstream text;
    text << file.rdbuf();
    nlohmann::json array;
    try {
      array = nlohmann::json::parse(text.str());
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("report is not valid JSON: ") + e.what());
    }
    std::vector<VerificationReport> reports;
    for (const auto &item : array) reports.push_back(ReportFromJson(item));
    PrintReportTable(reports, out);
    return 0;
  } catch (const Error &error) {
    PrintErrorObject(error, err);
    return ExitCode(error);
  } catch (const std::exception &e) {
    err << nlohmann::json{{"error", "Internal"}, {"message", e.what()}}.dump()
        << "\n";
    return 1;
  }
}

}  // namespace kmv

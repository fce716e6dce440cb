// tools/kmv.cc

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

// Command line driver: generate or load a verification dataset, learn the
// kernel matrix, fit the client-specific discriminant model, calibrate the
// decision threshold at the equal-error point and report FAR/FRR/TER.

#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kmv/pipeline.h"

namespace {

using kmv::Error;
using kmv::ErrorCode;

std::map<std::string, std::string> ParseKeyValues(const std::string &text) {
  std::map<std::string, std::string> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::kInvalidArgument,
                  "expected key=value, got '" + item + "'");
    values[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return values;
}

double ToReal(const std::string &text, const std::string &key) {
  try {
    size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception &) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot parse number for '" + key + "': '" + text + "'");
  }
}

int ToInt(const std::string &text, const std::string &key) {
  try {
    size_t used = 0;
    const int value = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception &) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot parse integer for '" + key + "': '" + text + "'");
  }
}

kmv::SyntheticConfig ParseSynthetic(const std::string &text) {
  kmv::SyntheticConfig config;
  for (const auto &[key, value] : ParseKeyValues(text)) {
    if (key == "clients") config.clients = ToInt(value, key);
    else if (key == "impostors") config.impostors = ToInt(value, key);
    else if (key == "per") config.per_identity = ToInt(value, key);
    else if (key == "dim") config.dim = ToInt(value, key);
    else if (key == "sep") config.separation = ToReal(value, key);
    else if (key == "warp") config.warp = kmv::WarpFromName(value);
    else
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown synthetic parameter '" + key + "'");
  }
  return config;
}

kmv::KernelSpec ParseKernel(const std::string &text) {
  const size_t colon = text.find(':');
  const std::string family = text.substr(0, colon);
  const std::string params =
      colon == std::string::npos ? "" : text.substr(colon + 1);
  if (family == "linear") {
    if (!params.empty())
      throw Error(ErrorCode::kInvalidArgument,
                  "linear kernel takes no parameters");
    return kmv::KernelSpec::Linear();
  }
  const auto values = ParseKeyValues(params);
  if (family == "poly" || family == "polynomial") {
    if (!values.count("a") || !values.count("b") || !values.count("d"))
      throw Error(ErrorCode::kInvalidArgument,
                  "polynomial kernel needs a=, b=, d=");
    return kmv::KernelSpec::Polynomial(ToReal(values.at("a"), "a"),
                                       ToReal(values.at("b"), "b"),
                                       ToInt(values.at("d"), "d"));
  }
  if (family == "rbf") {
    if (!values.count("sigma"))
      throw Error(ErrorCode::kInvalidArgument, "rbf kernel needs sigma=");
    return kmv::KernelSpec::Rbf(ToReal(values.at("sigma"), "sigma"));
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown kernel family '" + family + "'");
}

kmv::LearnOptions ParseLearn(const std::string &text) {
  const size_t colon = text.find(':');
  const std::string mode = text.substr(0, colon);
  const std::string params =
      colon == std::string::npos ? "" : text.substr(colon + 1);
  kmv::LearnOptions options;
  if (mode == "dinkelbach") {
    options.mode = kmv::LearnMode::kDinkelbach;
    for (const auto &[key, value] : ParseKeyValues(params)) {
      if (key == "tol") options.tolerance = ToReal(value, key);
      else if (key == "max_iter") options.max_iterations = ToInt(value, key);
      else
        throw Error(ErrorCode::kInvalidArgument,
                    "unknown dinkelbach parameter '" + key + "'");
    }
    return options;
  }
  if (mode == "fixed" || mode == "fixed_alpha") {
    options.mode = kmv::LearnMode::kFixedAlpha;
    const auto values = ParseKeyValues(params);
    if (!values.count("alpha"))
      throw Error(ErrorCode::kInvalidArgument, "fixed mode needs alpha=");
    options.alpha = ToReal(values.at("alpha"), "alpha");
    if (!(options.alpha > 0))
      throw Error(ErrorCode::kInvalidArgument, "alpha must be positive");
    return options;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown learn mode '" + mode + "'");
}

std::vector<kmv::ClassificationMode> ParseModes(const std::string &text) {
  std::vector<kmv::ClassificationMode> modes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    modes.push_back(kmv::ClassificationModeFromName(item));
  return modes;
}

void ParseHeq(const std::string &text, kmv::RunConfig *config) {
  const size_t x = text.find('x');
  if (x == std::string::npos)
    throw Error(ErrorCode::kInvalidArgument, "--heq expects WIDTHxHEIGHT");
  config->heq_width = ToInt(text.substr(0, x), "heq width");
  config->heq_height = ToInt(text.substr(x + 1), "heq height");
}

struct RunArgs {
  std::string config_path;
  std::string synthetic;
  std::string samples;
  std::string protocol;
  std::string heq;
  std::string kernel = "linear";
  std::string learn = "dinkelbach";
  bool baseline = false;
  std::string modes = "OnC,OnI";
  std::uint64_t seed = 0;
  std::string out = "report.json";
  std::string roc;
  std::string save_model;
};

kmv::RunConfig BuildRunConfig(const RunArgs &args) {
  if (!args.config_path.empty()) return kmv::RunConfig::FromJsonFile(args.config_path);
  kmv::RunConfig config;
  if (!args.synthetic.empty()) config.synthetic = ParseSynthetic(args.synthetic);
  config.samples_path = args.samples;
  config.protocol_path = args.protocol;
  if (!args.heq.empty()) ParseHeq(args.heq, &config);
  config.kernel = ParseKernel(args.kernel);
  config.learn = ParseLearn(args.learn);
  config.baseline = args.baseline;
  config.modes = ParseModes(args.modes);
  config.seed = args.seed;
  config.out_path = args.out;
  config.roc_path = args.roc;
  config.save_model_path = args.save_model;
  return config;
}

void AddRunOptions(CLI::App *cmd, RunArgs *args, bool single_kernel) {
  cmd->add_option("--config", args->config_path,
                  "JSON run config (overrides all other options)");
  cmd->add_option("--synthetic", args->synthetic,
                  "synthetic dataset, e.g. clients=5,impostors=3,per=6,dim=8,"
                  "sep=8,warp=radial");
  cmd->add_option("--samples", args->samples, "samples CSV path");
  cmd->add_option("--protocol", args->protocol, "protocol JSON path");
  cmd->add_option("--heq", args->heq,
                  "histogram-equalize rows as WIDTHxHEIGHT images");
  if (single_kernel)
    cmd->add_option("--kernel", args->kernel,
                    "kernel spec: linear | poly:a=,b=,d= | rbf:sigma=");
  cmd->add_option("--learn", args->learn,
                  "dinkelbach[:tol=,max_iter=] | fixed:alpha=");
  cmd->add_flag("--baseline", args->baseline,
                "skip learning; coefficients = sqrt(eigenvalues)");
  cmd->add_option("--modes", args->modes, "OnC,OnI subset");
  cmd->add_option("--seed", args->seed, "RNG seed; all randomness flows here");
  cmd->add_option("--out", args->out, "report JSON path");
  cmd->add_option("--roc", args->roc, "ROC sweep CSV path");
  cmd->add_option("--save-model", args->save_model, "model bundle JSON path");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"kernel-matrix verification pipeline"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App *run = app.add_subcommand("run", "run the pipeline end to end");
  AddRunOptions(run, &run_args, true);

  RunArgs sweep_args;
  std::vector<std::string> sweep_kernels;
  bool compare_baseline = false;
  CLI::App *sweep =
      app.add_subcommand("sweep", "run a grid of kernel parameters");
  AddRunOptions(sweep, &sweep_args, false);
  sweep->add_option("--kernel", sweep_kernels,
                    "kernel spec, repeatable; one grid point each");
  sweep->add_flag("--compare-baseline", compare_baseline,
                  "also run every grid point with baseline coefficients");

  std::string gen_synthetic;
  std::uint64_t gen_seed = 0;
  std::string gen_samples = "samples.csv";
  std::string gen_protocol = "protocol.json";
  CLI::App *gen =
      app.add_subcommand("gen", "write a synthetic dataset to files");
  gen->add_option("--synthetic", gen_synthetic, "synthetic parameters")
      ->required();
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--samples-out", gen_samples, "samples CSV output path");
  gen->add_option("--protocol-out", gen_protocol, "protocol JSON output path");

  std::string report_in;
  CLI::App *report = app.add_subcommand("report", "re-render a stored report");
  report->add_option("--in", report_in, "report JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return kmv::CmdRun(BuildRunConfig(run_args), std::cout, std::cerr);
    if (*sweep) {
      std::vector<kmv::KernelSpec> grid;
      for (const auto &text : sweep_kernels) grid.push_back(ParseKernel(text));
      kmv::RunConfig base = BuildRunConfig(sweep_args);
      return kmv::CmdSweep(base, grid, compare_baseline, std::cout, std::cerr);
    }
    if (*gen)
      return kmv::CmdGen(ParseSynthetic(gen_synthetic), gen_seed, gen_samples,
                         gen_protocol, std::cout, std::cerr);
    if (*report) return kmv::CmdReport(report_in, std::cout, std::cerr);
  } catch (const Error &error) {
    std::cerr << "{\"error\":\"" << kmv::ErrorCodeName(error.code())
              << "\",\"message\":\"" << error.what() << "\"}\n";
    return error.IsValidation() ? 2 : 1;
  }
  return 2;
}

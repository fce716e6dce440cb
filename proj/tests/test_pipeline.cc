// tests/test_pipeline.cc

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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "kmv/pipeline.h"

using namespace kmv;

namespace {

std::filesystem::path TestDir() {
  const auto dir = std::filesystem::temp_directory_path() / "kmv_pipeline_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string Slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig SyntheticRun(const std::string &out_path) {
  RunConfig config;
  SyntheticConfig synthetic;
  synthetic.clients = 5;
  synthetic.impostors = 3;
  synthetic.per_identity = 6;
  synthetic.dim = 8;
  synthetic.separation = 8.0;
  synthetic.warp = Warp::kRadial;
  config.synthetic = synthetic;
  config.kernel = KernelSpec::Rbf(2.0);
  config.modes = {ClassificationMode::kClientModel,
                  ClassificationMode::kImpostorModel};
  config.seed = 1;
  config.out_path = out_path;
  return config;
}

}  // namespace

TEST_CASE("cmd_run writes identical reports for identical config and seed") {
  const auto dir = TestDir();
  std::ostringstream out, err;

  RunConfig first = SyntheticRun((dir / "a.json").string());
  first.roc_path = (dir / "a_roc.csv").string();
  CHECK(CmdRun(first, out, err) == 0);

  RunConfig second = SyntheticRun((dir / "b.json").string());
  second.roc_path = (dir / "b_roc.csv").string();
  CHECK(CmdRun(second, out, err) == 0);

  CHECK(Slurp(first.out_path) == Slurp(second.out_path));
  CHECK(Slurp((dir / "a_roc_OnC.csv").string()) ==
        Slurp((dir / "b_roc_OnC.csv").string()));
  CHECK(err.str().empty());

  const nlohmann::json parsed = nlohmann::json::parse(Slurp(first.out_path));
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0]["mode"] == "OnC");
  CHECK(parsed[1]["mode"] == "OnI");
}

TEST_CASE("baseline and learned pipelines run on the same data") {
  const auto dir = TestDir();
  std::ostringstream out, err;

  RunConfig baseline = SyntheticRun((dir / "base.json").string());
  baseline.baseline = true;
  CHECK(CmdRun(baseline, out, err) == 0);

  RunConfig learned = SyntheticRun((dir / "learn.json").string());
  CHECK(CmdRun(learned, out, err) == 0);

  const nlohmann::json base_parsed =
      nlohmann::json::parse(Slurp(baseline.out_path));
  const nlohmann::json learn_parsed =
      nlohmann::json::parse(Slurp(learned.out_path));
  CHECK(base_parsed[0]["baseline"] == true);
  CHECK(learn_parsed[0]["baseline"] == false);
  CHECK(learn_parsed[0]["mu_summary"]["iterations"].get<int>() >= 1);
  // The paired table exists for side-by-side reading; no ordering asserted.
  CHECK(out.str().find("baseline") != std::string::npos);
  CHECK(out.str().find("learned") != std::string::npos);
}

TEST_CASE("cmd_run reports missing files as validation errors") {
  std::ostringstream out, err;
  RunConfig config;
  config.samples_path = "/nonexistent/s.csv";
  config.protocol_path = "/nonexistent/p.json";
  config.modes = {ClassificationMode::kClientModel};
  CHECK(CmdRun(config, out, err) == 2);
  const nlohmann::json error = nlohmann::json::parse(err.str());
  CHECK(error["error"] == "FileNotFound");
}

TEST_CASE("cmd_run rejects ambiguous sources") {
  std::ostringstream out, err;
  RunConfig config = SyntheticRun("unused.json");
  config.samples_path = "also_files.csv";
  config.protocol_path = "also_files.json";
  CHECK(CmdRun(config, out, err) == 2);
  CHECK(nlohmann::json::parse(err.str())["error"] == "InvalidArgument");
}

TEST_CASE("cmd_sweep aggregates the grid and tolerates bad points") {
  const auto dir = TestDir();
  std::ostringstream out, err;
  RunConfig base = SyntheticRun((dir / "sweep.json").string());
  base.modes = {ClassificationMode::kImpostorModel};

  const std::vector<KernelSpec> grid = {
      KernelSpec::Rbf(5.0), KernelSpec::Rbf(10.0), KernelSpec::Rbf(15.0),
      KernelSpec::Rbf(20.0)};
  CHECK(CmdSweep(base, grid, /*compare_baseline=*/true, out, err) == 0);

  const nlohmann::json table = nlohmann::json::parse(Slurp(base.out_path));
  CHECK(table.size() == 8);  // 4 grid points x {baseline, learned}
  for (const auto &row : table) {
    CHECK(row.contains("kernel"));
    CHECK(row.contains("method"));
    CHECK((row.contains("reports") || row.contains("error")));
  }
}

TEST_CASE("cmd_sweep with an empty grid is a usage error") {
  std::ostringstream out, err;
  RunConfig base = SyntheticRun("unused.json");
  CHECK(CmdSweep(base, {}, false, out, err) == 2);
}

TEST_CASE("cmd_sweep over a polynomial parameter grid") {
  const auto dir = TestDir();
  std::ostringstream out, err;
  RunConfig base = SyntheticRun((dir / "poly_sweep.json").string());

  const std::vector<KernelSpec> grid = {
      KernelSpec::Polynomial(0.0001, 1.0, 2), KernelSpec::Polynomial(0.0001, 0.0, 2),
      KernelSpec::Polynomial(10.0, 1.0, 2), KernelSpec::Polynomial(5.0, 2.0, 4)};
  CHECK(CmdSweep(base, grid, /*compare_baseline=*/false, out, err) == 0);

  const nlohmann::json table = nlohmann::json::parse(Slurp(base.out_path));
  REQUIRE(table.size() == 4);
  for (const auto &row : table) {
    REQUIRE(row.contains("reports"));
    CHECK(row["reports"].size() == 2);  // OnC and OnI per grid point
  }
}

TEST_CASE("histogram equalization as a pipeline preprocessing step") {
  const auto dir = TestDir();
  // 2x2 pixel rows for two clients, integer intensities.
  std::ofstream csv((dir / "pix.csv").string());
  csv << "f0,f1,f2,f3,identity\n";
  for (int s = 0; s < 4; ++s)
    csv << 10 + s << "," << 30 + s << "," << 50 + s << "," << 70 + s << ",a\n";
  for (int s = 0; s < 4; ++s)
    csv << 200 - s << "," << 180 - s << "," << 160 - s << "," << 140 - s
        << ",b\n";
  csv << "100,110,120,130,i\n101,111,121,131,i\n";
  csv.close();
  std::ofstream protocol((dir / "pix.json").string());
  protocol << R"({"clients":["a","b"],"impostors":["i"],
    "roles":{"a":["train","train","evaluation","test"],
             "b":["train","train","evaluation","test"],
             "i":["evaluation","test"]}})";
  protocol.close();

  RunConfig config;
  config.samples_path = (dir / "pix.csv").string();
  config.protocol_path = (dir / "pix.json").string();
  config.heq_width = 2;
  config.heq_height = 2;
  config.kernel = KernelSpec::Linear();
  config.baseline = true;
  config.modes = {ClassificationMode::kClientModel};
  const RunResult result = RunPipeline(config);
  CHECK(result.reports.size() == 1);

  // Equalized rows span the full intensity range.
  config.heq_width = 3;  // wrong geometry must be rejected
  CHECK_THROWS_AS(RunPipeline(config), Error);
}

TEST_CASE("cmd_gen writes loadable files") {
  const auto dir = TestDir();
  std::ostringstream out, err;
  SyntheticConfig synthetic;
  synthetic.clients = 3;
  synthetic.impostors = 2;
  synthetic.per_identity = 5;
  synthetic.dim = 4;
  synthetic.separation = 9.0;
  const std::string samples = (dir / "gen.csv").string();
  const std::string protocol = (dir / "gen.json").string();
  CHECK(CmdGen(synthetic, 11, samples, protocol, out, err) == 0);

  RunConfig config;
  config.samples_path = samples;
  config.protocol_path = protocol;
  config.kernel = KernelSpec::Linear();
  config.baseline = true;
  config.modes = {ClassificationMode::kClientModel};
  config.out_path = (dir / "gen_report.json").string();
  CHECK(CmdRun(config, out, err) == 0);
}

TEST_CASE("cmd_report re-renders a stored report") {
  const auto dir = TestDir();
  std::ostringstream out, err;
  RunConfig config = SyntheticRun((dir / "rr.json").string());
  REQUIRE(CmdRun(config, out, err) == 0);

  std::ostringstream rendered;
  CHECK(CmdReport(config.out_path, rendered, err) == 0);
  CHECK(rendered.str().find("OnC") != std::string::npos);
  CHECK(rendered.str().find("OnI") != std::string::npos);

  CHECK(CmdReport((dir / "missing.json").string(), rendered, err) == 2);
}

TEST_CASE("warped data favors a matching nonlinear kernel") {
  // Antipodal sign flips make every class a two-lobe set; an even
  // polynomial kernel folds the lobes together, a linear one cannot.
  RunConfig config;
  SyntheticConfig synthetic;
  synthetic.clients = 4;
  synthetic.impostors = 3;
  synthetic.per_identity = 10;
  synthetic.dim = 6;
  synthetic.separation = 10.0;
  synthetic.warp = Warp::kQuadraticLift;
  config.synthetic = synthetic;
  config.baseline = true;
  config.modes = {ClassificationMode::kClientModel,
                  ClassificationMode::kImpostorModel};
  config.seed = 5;

  const auto mean_ter = [&](const KernelSpec &kernel) {
    RunConfig point = config;
    point.kernel = kernel;
    const RunResult result = RunPipeline(point);
    double sum = 0;
    for (const auto &report : result.reports) sum += report.test_ter;
    return sum / static_cast<double>(result.reports.size());
  };

  const double linear_ter = mean_ter(KernelSpec::Linear());
  const double even_poly_ter = mean_ter(KernelSpec::Polynomial(0.01, 0.0, 2));
  CHECK(even_poly_ter < 0.25 * linear_ter);
}

TEST_CASE("cmd_run saves a loadable model bundle") {
  const auto dir = TestDir();
  std::ostringstream out, err;
  RunConfig config = SyntheticRun((dir / "sm.json").string());
  config.save_model_path = (dir / "sm_model.json").string();
  REQUIRE(CmdRun(config, out, err) == 0);
  const ModelPack pack = ModelPack::FromJson(Slurp(config.save_model_path));
  CHECK(pack.spectral.Rank() > 0);
  CHECK(pack.mu.size() == pack.spectral.Rank());
  CHECK(pack.cskda.clients.size() == 5);
}

TEST_CASE("run config loads from a file") {
  const auto dir = TestDir();
  const std::string path = (dir / "config.json").string();
  std::ofstream file(path);
  file << R"({"synthetic":{"clients":3,"impostors":2,"per":4,"dim":4,"sep":9.0},
              "kernel":{"family":"rbf","sigma":3},
              "modes":["OnI"],"seed":5})";
  file.close();
  const RunConfig config = RunConfig::FromJsonFile(path);
  CHECK(config.synthetic->clients == 3);
  CHECK(config.kernel.family == KernelFamily::kRbf);
  CHECK_THROWS_AS(RunConfig::FromJsonFile((dir / "absent.json").string()),
                  Error);
}

TEST_CASE("run config json round trip") {
  const std::string text = R"({
    "synthetic": {"clients": 4, "impostors": 2, "per": 5, "dim": 6,
                   "sep": 12.0, "warp": "quadratic-lift"},
    "kernel": {"family": "polynomial", "a": 0.0001, "b": 1, "d": 2},
    "learn": {"mode": "fixed_alpha", "alpha": 2.0},
    "baseline": false,
    "modes": ["OnC", "OnI"],
    "seed": 42,
    "out": "r.json"
  })";
  const RunConfig config = RunConfig::FromJson(text);
  REQUIRE(config.synthetic.has_value());
  CHECK(config.synthetic->clients == 4);
  CHECK(config.synthetic->warp == Warp::kQuadraticLift);
  CHECK(config.kernel.family == KernelFamily::kPolynomial);
  CHECK(config.learn.mode == LearnMode::kFixedAlpha);
  CHECK(config.learn.alpha == 2.0);
  CHECK(config.modes.size() == 2);
  CHECK(config.seed == 42);
  config.Validate();

  CHECK_THROWS_AS(RunConfig::FromJson("nope"), Error);
  CHECK_THROWS_AS(RunConfig::FromJson(R"({"modes":["OnX"]})"), Error);
}

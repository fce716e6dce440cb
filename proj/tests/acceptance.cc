// tests/acceptance.cc

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

// Acceptance suite: one criterion per function, one PASS/FAIL line each,
// every tolerance pinned in code.  Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kmv/cskda.h"
#include "kmv/evaluation.h"
#include "kmv/kernel_learning.h"
#include "kmv/kernels.h"
#include "kmv/pipeline.h"
#include "kmv/spectral.h"
#include "oracle.h"

using namespace kmv;

namespace {

double Seconds(const std::chrono::steady_clock::time_point &start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

struct Check {
  bool ok = true;
  std::string detail;

  void Require(bool condition, const std::string &what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

ModelPack BaselinePack(const VerificationDataset &dataset,
                       const KernelSpec &kernel) {
  ModelPack pack;
  pack.spectral = Decompose(GramMatrix(kernel, dataset));
  pack.mu = pack.spectral.BaselineCoefficients();
  pack.cskda = FitCskda(pack.spectral, pack.mu, dataset);
  return pack;
}

// --- criterion 1 ---------------------------------------------------------
Check SpectralReconstruction() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  for (Index n : {5, 17, 40}) {
    const Matrix psd = oracle::RandomPsd(rng, n);
    const SpectralModel model = Decompose(psd);
    const Matrix rebuilt = AssembleKMu(model, model.BaselineCoefficients());
    const double error = (rebuilt - psd).norm() / psd.norm();
    check.Require(error <= 1e-8,
                  "relative reconstruction error " + std::to_string(error));
  }
  check.Require(Seconds(start) < 1.0, "exceeded 1 s");
  return check;
}

// --- criteria 2-4 --------------------------------------------------------
Check TraceOracle() {
  Check check;
  std::mt19937_64 rng(1002);
  for (int instance = 0; instance < 20; ++instance) {
    const VerificationDataset dataset = oracle::RandomSmallDataset(
        rng, 2 + static_cast<int>(rng() % 3), 1, 3 + static_cast<Index>(rng() % 4),
        4.0);
    const Index n = dataset.TrainCount();
    check.Require(n <= 20, "instance too large");
    const std::vector<int> labels = dataset.TrainingClasses();
    const SpectralModel model =
        Decompose(GramMatrix(KernelSpec::Linear(), dataset));
    const ScatterSummaries summaries =
        ComputeScatterSummaries(model, labels, n);
    const Vector mu = model.BaselineCoefficients();
    double between = 0.0, within = 0.0;
    for (Index r = 0; r < mu.size(); ++r) {
      between += mu[r] * mu[r] * summaries.between[r];
      within += mu[r] * mu[r] * summaries.within[r];
    }
    const Matrix train = dataset.samples.topRows(n);
    const double between_direct = oracle::TraceBetween(train, labels);
    const double within_direct = oracle::TraceWithin(train, labels);
    check.Require(
        std::abs(between - between_direct) <= 1e-8 * std::abs(between_direct),
        "between trace mismatch");
    check.Require(
        std::abs(within - within_direct) <= 1e-8 * std::abs(within_direct),
        "within trace mismatch");
  }
  return check;
}

Check TraceIdentity() {
  Check check;
  std::mt19937_64 rng(1003);
  for (int instance = 0; instance < 3; ++instance) {
    const VerificationDataset dataset =
        oracle::RandomSmallDataset(rng, 3, 1, 4, 3.0);
    const Index n = dataset.TrainCount();
    const SpectralModel model =
        Decompose(GramMatrix(KernelSpec::Rbf(4.0), dataset));
    const ScatterSummaries summaries =
        ComputeScatterSummaries(model, dataset.TrainingClasses(), n);
    for (int trial = 0; trial < 100; ++trial) {
      Vector mu(model.Rank());
      for (Index r = 0; r < mu.size(); ++r) mu[r] = oracle::GaussianReal(rng);
      double between = 0.0, within = 0.0;
      for (Index r = 0; r < mu.size(); ++r) {
        between += mu[r] * mu[r] * summaries.between[r];
        within += mu[r] * mu[r] * summaries.within[r];
      }
      const Matrix block = AssembleKMu(model, mu).topLeftCorner(n, n);
      const double total = block.trace() / static_cast<double>(n) -
                           block.sum() / static_cast<double>(n * n);
      const double scale =
          std::max({std::abs(total), std::abs(between) + std::abs(within),
                    1e-30});
      check.Require(std::abs(between + within - total) <= 1e-8 * scale,
                    "trace identity violated");
    }
  }
  return check;
}

Check BruteForceSummaries() {
  Check check;
  std::mt19937_64 rng(1004);
  for (int instance = 0; instance < 10; ++instance) {
    const VerificationDataset dataset = oracle::RandomSmallDataset(
        rng, 2 + static_cast<int>(rng() % 3), 1, 4, 3.0);
    const Index n = dataset.TrainCount();
    check.Require(n <= 20, "instance too large");
    const KernelSpec kernel = instance % 2 == 0
                                  ? KernelSpec::Linear()
                                  : KernelSpec::Rbf(3.0);
    const SpectralModel model = Decompose(GramMatrix(kernel, dataset));
    const ScatterSummaries summaries =
        ComputeScatterSummaries(model, dataset.TrainingClasses(), n);
    const auto [between, within] = oracle::BruteForceSummaries(
        model.eigenvectors, dataset.TrainingClasses(), n);
    check.Require(
        (summaries.between - between).cwiseAbs().maxCoeff() <= 1e-10,
        "between summaries differ from the double loop");
    check.Require((summaries.within - within).cwiseAbs().maxCoeff() <= 1e-10,
                  "within summaries differ from the double loop");
  }
  return check;
}

// --- criterion 5 ---------------------------------------------------------
Check StationaryPointProperties() {
  Check check;
  std::mt19937_64 rng(1005);

  for (int trial = 0; trial < 50; ++trial) {
    const Index p = 2 + static_cast<Index>(rng() % 8);
    ScatterSummaries summaries, negated;
    summaries.between.resize(p);
    summaries.within.resize(p);
    Vector eigenvalues(p);
    for (Index r = 0; r < p; ++r) {
      summaries.between[r] = oracle::GaussianReal(rng);
      summaries.within[r] = std::abs(oracle::GaussianReal(rng));
      eigenvalues[r] = 0.05 + oracle::UniformReal(rng);
    }
    negated.between = -summaries.between;
    negated.within = -summaries.within;
    const double alpha = 0.25 + oracle::UniformReal(rng);

    const Vector mu = SolveMu(summaries, eigenvalues, alpha);
    const double beta = eigenvalues.array().sqrt().sum();
    check.Require(std::abs(mu.sum() - beta) <= 1e-8 * std::abs(beta),
                  "constraint violated");

    const Vector flipped = SolveMu(negated, eigenvalues, alpha);
    check.Require((mu - flipped).cwiseAbs().maxCoeff() == 0.0,
                  "not exactly invariant under sign flip");
  }

  ScatterSummaries hand;
  hand.between = Vector(2);
  hand.between << 2.0, 1.0;
  hand.within = Vector(2);
  hand.within << 1.0, 1.0;
  Vector hand_eigenvalues(2);
  hand_eigenvalues << 4.0, 1.0;
  const Vector hand_mu = SolveMu(hand, hand_eigenvalues, 0.5);
  check.Require(std::abs(hand_mu[0] - 0.75) <= 1e-12 &&
                    std::abs(hand_mu[1] - 2.25) <= 1e-12,
                "hand-computed case mismatch");
  return check;
}

// --- criterion 6 ---------------------------------------------------------
Check DinkelbachSafeguard() {
  Check check;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int clients = 3 + static_cast<int>(seed % 3);
    const double separation = 2.0 + static_cast<double>(seed % 5);
    const VerificationDataset dataset = GenerateSyntheticProtocol(
        clients, 2, 5, 4, separation, Warp::kNone, seed);
    const KernelSpec kernel =
        seed % 2 == 0 ? KernelSpec::Linear() : KernelSpec::Rbf(separation);
    const SpectralModel model = Decompose(GramMatrix(kernel, dataset));
    const std::vector<int> labels = dataset.TrainingClasses();
    const Index n = dataset.TrainCount();
    const ScatterSummaries summaries =
        ComputeScatterSummaries(model, labels, n);
    const double baseline_ratio =
        TraceRatio(summaries, model.BaselineCoefficients());
    const LearnedCoefficients learned =
        LearnKernel(model, labels, n, LearnOptions());
    check.Require(learned.ratio_trace >= baseline_ratio,
                  "seed " + std::to_string(seed) + " fell below the baseline");
  }
  return check;
}

// --- criterion 7 ---------------------------------------------------------
Check ImpostorMeanIdentity() {
  Check check;
  std::mt19937_64 rng(1007);
  for (int instance = 0; instance < 10; ++instance) {
    const VerificationDataset dataset = oracle::RandomSmallDataset(
        rng, 2 + static_cast<int>(rng() % 3), 1, 4, 4.0);
    const KernelSpec kernel = instance % 2 == 0
                                  ? KernelSpec::Linear()
                                  : KernelSpec::Polynomial(0.1, 1.0, 2);
    const ModelPack pack = BaselinePack(dataset, kernel);
    const CskdaModel &model = pack.cskda;
    for (size_t i = 0; i < model.clients.size(); ++i) {
      const double ratio =
          static_cast<double>(model.class_sizes[i]) /
          static_cast<double>(model.n - model.class_sizes[i]);
      const Vector residual =
          model.impostor_means.col(i) + ratio * model.client_means.col(i);
      check.Require(residual.cwiseAbs().maxCoeff() == 0.0,
                    "identity not exact for client " + model.clients[i]);
    }
  }
  return check;
}

// --- criterion 8 ---------------------------------------------------------
Check LinearEndToEndOracle() {
  Check check;
  std::mt19937_64 rng(1008);
  for (int protocol = 0; protocol < 10; ++protocol) {
    const int clients = 2 + static_cast<int>(rng() % 3);  // c <= 4
    const VerificationDataset dataset =
        oracle::RandomSmallDataset(rng, clients, 2, 5, 5.0);
    const Index n = dataset.TrainCount();
    check.Require(n <= 20, "instance too large");

    const ModelPack pack = BaselinePack(dataset, KernelSpec::Linear());
    const oracle::InputSpaceCskda reference = oracle::InputSpaceCskda::Fit(
        dataset.samples.topRows(n), dataset.TrainingClasses(), clients);
    check.Require(pack.cskda.m_b == reference.m_b, "rank estimates differ");

    for (ClassificationMode mode : {ClassificationMode::kClientModel,
                                    ClassificationMode::kImpostorModel}) {
      // Scores for every evaluation/test claim, both paths.
      std::vector<double> kernel_scores, oracle_scores;
      for (Role role : {Role::kEvaluation, Role::kTest}) {
        for (const Claim &claim : ClaimSet(dataset, role)) {
          const int ci = dataset.ClientIndex(claim.claimed_client);
          const ClaimScore score =
              ScoreClaim(pack, claim.sample_index, claim.claimed_client);
          const auto [d_c, d_i] = reference.Score(
              dataset.samples.row(claim.sample_index).transpose(), ci);
          const bool client_mode = mode == ClassificationMode::kClientModel;
          kernel_scores.push_back(client_mode ? score.client_distance
                                              : score.impostor_distance);
          oracle_scores.push_back(client_mode ? d_c : d_i);
        }
      }

      // Decision agreement at every threshold that separates two adjacent
      // kernel-path scores.  Midpoints keep the comparison away from the
      // floating-point noise floor of either path.
      std::vector<double> sorted = kernel_scores;
      std::sort(sorted.begin(), sorted.end());
      std::vector<double> thresholds;
      for (size_t i = 0; i + 1 < sorted.size(); ++i) {
        const double gap = sorted[i + 1] - sorted[i];
        if (gap > 1e-6 * std::max(1.0, sorted[i + 1]))
          thresholds.push_back(0.5 * (sorted[i] + sorted[i + 1]));
      }
      check.Require(!thresholds.empty(), "no usable thresholds");
      for (double threshold : thresholds) {
        for (size_t i = 0; i < kernel_scores.size(); ++i) {
          const bool kernel_accept =
              mode == ClassificationMode::kClientModel
                  ? kernel_scores[i] <= threshold
                  : kernel_scores[i] > threshold;
          const bool oracle_accept =
              mode == ClassificationMode::kClientModel
                  ? oracle_scores[i] <= threshold
                  : oracle_scores[i] > threshold;
          check.Require(kernel_accept == oracle_accept,
                        "decision disagreement at protocol " +
                            std::to_string(protocol));
        }
      }
    }
  }
  return check;
}

// --- criterion 9 ---------------------------------------------------------
Check SeparableEndToEnd() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  const VerificationDataset dataset =
      GenerateSyntheticProtocol(5, 3, 6, 8, 50.0, Warp::kNone, 2);
  const ModelPack pack = BaselinePack(dataset, KernelSpec::Linear());
  for (ClassificationMode mode : {ClassificationMode::kClientModel,
                                  ClassificationMode::kImpostorModel}) {
    const VerificationReport report = Evaluate(pack, dataset, mode);
    check.Require(report.test_ter == 0.0,
                  std::string(ClassificationModeName(mode)) +
                      " TER = " + std::to_string(report.test_ter));
  }
  check.Require(Seconds(start) < 10.0, "exceeded 10 s");
  return check;
}

// --- criterion 10 --------------------------------------------------------
Check EerCalibration() {
  Check check;
  std::mt19937_64 rng(1010);
  for (int set = 0; set < 20; ++set) {
    const size_t genuine_count = 50 + rng() % 200;
    const size_t impostor_count = 50 + rng() % 200;
    std::vector<double> genuine(genuine_count), impostor(impostor_count);
    for (auto &v : genuine) v = oracle::UniformReal(rng);
    for (auto &v : impostor) v = 0.2 + oracle::UniformReal(rng);
    const ClassificationMode mode = set % 2 == 0
                                        ? ClassificationMode::kClientModel
                                        : ClassificationMode::kImpostorModel;
    const Calibration cal = CalibrateEer(genuine, impostor, mode);
    const double bound =
        100.0 / static_cast<double>(std::min(genuine_count, impostor_count));
    check.Require(std::abs(cal.far - cal.frr) <= bound + 1e-9,
                  "granularity bound violated on set " + std::to_string(set));

    for (size_t i = 1; i < cal.sweep.size(); ++i) {
      const bool far_ok = mode == ClassificationMode::kClientModel
                              ? cal.sweep[i].far >= cal.sweep[i - 1].far
                              : cal.sweep[i].far <= cal.sweep[i - 1].far;
      const bool frr_ok = mode == ClassificationMode::kClientModel
                              ? cal.sweep[i].frr <= cal.sweep[i - 1].frr
                              : cal.sweep[i].frr >= cal.sweep[i - 1].frr;
      check.Require(far_ok && frr_ok, "sweep not monotone");
    }
  }
  return check;
}

// --- criterion 11 --------------------------------------------------------
Check Determinism() {
  Check check;
  const auto dir =
      std::filesystem::temp_directory_path() / "kmv_acceptance";
  std::filesystem::create_directories(dir);
  std::ostringstream sink;

  const auto run_once = [&](const std::string &name) {
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
    config.out_path = (dir / name).string();
    std::ostringstream err;
    const int status = CmdRun(config, sink, err);
    if (status != 0) return std::string();
    std::ifstream in(config.out_path, std::ios::binary);
    std::stringstream content;
    content << in.rdbuf();
    return content.str();
  };

  const std::string first = run_once("det_a.json");
  const std::string second = run_once("det_b.json");
  check.Require(!first.empty(), "pipeline run failed");
  check.Require(first == second, "reports differ between runs");
  return check;
}

struct Criterion {
  const char *name;
  Check (*run)();
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"spectral reconstruction (rel err <= 1e-8, < 1 s)",
       SpectralReconstruction},
      {"trace oracle vs input space (20 instances, 1e-8)", TraceOracle},
      {"trace identity (100 random mu per instance, 1e-8)", TraceIdentity},
      {"grouped summaries vs double loop (1e-10)", BruteForceSummaries},
      {"stationary point: constraint, sign flip, hand case",
       StationaryPointProperties},
      {"dinkelbach best-iterate safeguard (50 seeds)", DinkelbachSafeguard},
      {"impostor-mean rescaling identity (exact)", ImpostorMeanIdentity},
      {"linear-kernel end-to-end decision oracle (10 protocols)",
       LinearEndToEndOracle},
      {"separable synthetic end-to-end TER = 0 (< 10 s)", SeparableEndToEnd},
      {"EER granularity bound and ROC monotonicity (20 sets)",
       EerCalibration},
      {"bitwise-identical reports for identical config and seed",
       Determinism},
  };

  int failures = 0;
  for (const Criterion &criterion : criteria) {
    Check check;
    try {
      check = criterion.run();
    } catch (const std::exception &e) {
      check.ok = false;
      check.detail = e.what();
    }
    if (check.ok) {
      std::cout << "PASS  " << criterion.name << "\n";
    } else {
      ++failures;
      std::cout << "FAIL  " << criterion.name << "  [" << check.detail
                << "]\n";
    }
  }
  if (failures > 0)
    std::cout << failures << " criterion(s) failed" << std::endl;
  return failures;
}

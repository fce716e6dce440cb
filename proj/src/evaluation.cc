// src/evaluation.cc

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

#include "kmv/evaluation.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace kmv {

namespace {

std::string FormatReal(double value) {
  std::array<char, 32> buffer;
  auto [ptr, ec] =
      std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), ptr);
}

// Counts with sorted lists so the candidate sweep stays O(k log k).
struct SortedScores {
  std::vector<double> genuine;
  std::vector<double> impostor;

  SortedScores(std::vector<double> g, std::vector<double> i)
      : genuine(std::move(g)), impostor(std::move(i)) {
    std::sort(genuine.begin(), genuine.end());
    std::sort(impostor.begin(), impostor.end());
  }

  static double CountAtMost(const std::vector<double> &sorted, double t) {
    return static_cast<double>(
        std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
  }

  ThresholdPoint Rates(ClassificationMode mode, double threshold) const {
    const double g = static_cast<double>(genuine.size());
    const double d = static_cast<double>(impostor.size());
    const double genuine_at_most = CountAtMost(genuine, threshold);
    const double impostor_at_most = CountAtMost(impostor, threshold);
    ThresholdPoint point;
    point.threshold = threshold;
    if (mode == ClassificationMode::kClientModel) {
      // accept iff distance <= threshold
      point.far = 100.0 * impostor_at_most / d;
      point.frr = 100.0 * (g - genuine_at_most) / g;
    } else {
      // accept iff distance > threshold
      point.far = 100.0 * (d - impostor_at_most) / d;
      point.frr = 100.0 * genuine_at_most / g;
    }
    return point;
  }
};

}  // namespace

std::vector<Claim> ClaimSet(const VerificationDataset &dataset, Role role) {
  std::vector<Claim> claims;
  bool any_row = false;
  bool any_impostor_claim = false;
  for (Index i = 0; i < dataset.NumSamples(); ++i) {
    if (dataset.roles[i] != role) continue;
    any_row = true;
    const std::string &identity = dataset.identities[i];
    if (dataset.IsClient(identity)) {
      claims.push_back({i, identity, true});
    } else {
      // The standard attack expansion: every impostor sample claims every
      // client identity.
      for (const auto &client : dataset.clients) {
        claims.push_back({i, client, false});
        any_impostor_claim = true;
      }
    }
  }
  if (!any_row)
    throw Error(ErrorCode::kEmptyRoleSet,
                std::string("no samples with role '") + RoleName(role) + "'");
  if (!any_impostor_claim)
    throw Error(ErrorCode::kNoImpostorClaims,
                std::string("no impostor claims in role '") + RoleName(role) +
                    "'; false acceptance rate is undefined");
  return claims;
}

ThresholdPoint RatesAtThreshold(const std::vector<double> &genuine_scores,
                                const std::vector<double> &impostor_scores,
                                ClassificationMode mode, double threshold) {
  if (genuine_scores.empty() || impostor_scores.empty())
    throw Error(ErrorCode::kEmptyScoreList,
                "both genuine and impostor score lists are required");
  return SortedScores(genuine_scores, impostor_scores).Rates(mode, threshold);
}

Calibration CalibrateEer(const std::vector<double> &genuine_scores,
                         const std::vector<double> &impostor_scores,
                         ClassificationMode mode) {
  if (genuine_scores.empty() || impostor_scores.empty())
    throw Error(ErrorCode::kEmptyScoreList,
                "both genuine and impostor score lists are required");
  const SortedScores scores(genuine_scores, impostor_scores);

  std::vector<double> distinct;
  distinct.reserve(scores.genuine.size() + scores.impostor.size());
  std::merge(scores.genuine.begin(), scores.genuine.end(),
             scores.impostor.begin(), scores.impostor.end(),
             std::back_inserter(distinct));
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());

  std::vector<double> candidates;
  candidates.reserve(2 * distinct.size());
  for (size_t i = 0; i < distinct.size(); ++i) {
    candidates.push_back(distinct[i]);
    if (i + 1 < distinct.size())
      candidates.push_back(0.5 * (distinct[i] + distinct[i + 1]));
  }

  Calibration calibration;
  calibration.sweep.reserve(candidates.size());
  bool have_best = false;
  for (double candidate : candidates) {
    const ThresholdPoint point = scores.Rates(mode, candidate);
    calibration.sweep.push_back(point);
    const double gap = std::abs(point.far - point.frr);
    const double total = point.far + point.frr;
    const double best_gap = std::abs(calibration.far - calibration.frr);
    const double best_total = calibration.far + calibration.frr;
    // Ties go to the larger threshold (candidates ascend, so <= overwrites).
    // On cleanly separated scores this lands mid-band rather than flush
    // against the evaluation scores, which is what lets the frozen
    // threshold carry over to the test set.
    if (!have_best || gap < best_gap ||
        (gap == best_gap && total <= best_total)) {
      have_best = true;
      calibration.threshold = point.threshold;
      calibration.far = point.far;
      calibration.frr = point.frr;
    }
  }
  return calibration;
}

VerificationReport Evaluate(const ModelPack &pack,
                            const VerificationDataset &dataset,
                            ClassificationMode mode) {
  const auto pick = [mode](const ClaimScore &score) {
    return mode == ClassificationMode::kClientModel ? score.client_distance
                                                    : score.impostor_distance;
  };
  const auto score_claims = [&](Role role, std::vector<double> *genuine,
                                std::vector<double> *impostor) {
    for (const Claim &claim : ClaimSet(dataset, role)) {
      const double distance =
          pick(ScoreClaim(pack, claim.sample_index, claim.claimed_client));
      (claim.genuine ? genuine : impostor)->push_back(distance);
    }
  };

  std::vector<double> eval_genuine, eval_impostor;
  score_claims(Role::kEvaluation, &eval_genuine, &eval_impostor);
  const Calibration calibration =
      CalibrateEer(eval_genuine, eval_impostor, mode);

  std::vector<double> test_genuine, test_impostor;
  score_claims(Role::kTest, &test_genuine, &test_impostor);
  const ThresholdPoint test_point = RatesAtThreshold(
      test_genuine, test_impostor, mode, calibration.threshold);

  VerificationReport report;
  report.mode = mode;
  report.threshold = calibration.threshold;
  report.eval_far = calibration.far;
  report.eval_frr = calibration.frr;
  report.test_far = test_point.far;
  report.test_frr = test_point.frr;
  report.test_ter = test_point.far + test_point.frr;
  report.roc = calibration.sweep;
  report.mu_summary.p = pack.spectral.Rank();
  report.mu_summary.beta = pack.spectral.eigenvalues.array().sqrt().sum();
  report.mu_summary.min = pack.mu.minCoeff();
  report.mu_summary.max = pack.mu.maxCoeff();
  report.mu_summary.norm = pack.mu.norm();
  return report;
}

std::string VerificationReport::ToJson() const {
  nlohmann::json j;
  j["mode"] = ClassificationModeName(mode);
  j["threshold"] = threshold;
  j["eval_far"] = eval_far;
  j["eval_frr"] = eval_frr;
  j["test_far"] = test_far;
  j["test_frr"] = test_frr;
  j["test_ter"] = test_ter;
  j["kernel"] = nlohmann::json::parse(kernel.ToJson());
  j["learn"] = nlohmann::json::parse(learn.ToJson());
  j["baseline"] = baseline;
  j["alpha"] = alpha;
  j["mu_summary"] = {
      {"p", mu_summary.p},           {"beta", mu_summary.beta},
      {"min", mu_summary.min},       {"max", mu_summary.max},
      {"norm", mu_summary.norm},     {"ratio_trace", mu_summary.ratio_trace},
      {"iterations", mu_summary.iterations},
  };
  return j.dump();
}

void EmitReport(const std::vector<VerificationReport> &reports,
                const std::string &out_path, const std::string &roc_path) {
  nlohmann::json array = nlohmann::json::array();
  for (const auto &report : reports)
    array.push_back(nlohmann::json::parse(report.ToJson()));

  std::ofstream out(out_path);
  if (!out)
    throw Error(ErrorCode::kIoError, "cannot write report '" + out_path + "'");
  out << array.dump(2) << "\n";
  if (!out.good())
    throw Error(ErrorCode::kIoError, "write failed for '" + out_path + "'");

  if (roc_path.empty()) return;
  for (const auto &report : reports) {
    std::string path = roc_path;
    if (reports.size() > 1) {
      const std::string suffix =
          std::string("_") + ClassificationModeName(report.mode);
      const size_t dot = path.find_last_of('.');
      if (dot == std::string::npos)
        path += suffix;
      else
        path.insert(dot, suffix);
    }
    std::ofstream roc(path);
    if (!roc)
      throw Error(ErrorCode::kIoError, "cannot write ROC '" + path + "'");
    roc << "threshold,far,frr\n";
    for (const ThresholdPoint &point : report.roc)
      roc << FormatReal(point.threshold) << "," << FormatReal(point.far) << ","
          << FormatReal(point.frr) << "\n";
    if (!roc.good())
      throw Error(ErrorCode::kIoError, "write failed for '" + path + "'");
  }
}

}  // namespace kmv

// src/kernel_learning.cc

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

#include "kmv/kernel_learning.h"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace kmv {

namespace {

std::vector<Index> ClassSizes(const std::vector<int> &labels) {
  int num_classes = 0;
  for (int label : labels) num_classes = std::max(num_classes, label + 1);
  std::vector<Index> sizes(num_classes, 0);
  for (int label : labels) {
    if (label < 0)
      throw Error(ErrorCode::kInvalidArgument, "negative class label");
    ++sizes[label];
  }
  for (int i = 0; i < num_classes; ++i)
    if (sizes[i] == 0)
      throw Error(ErrorCode::kInvalidArgument,
                  "class " + std::to_string(i) + " has no training rows");
  return sizes;
}

}  // namespace

std::string LearnOptions::ToJson() const {
  nlohmann::json j;
  if (mode == LearnMode::kFixedAlpha) {
    j["mode"] = "fixed_alpha";
    j["alpha"] = alpha;
  } else {
    j["mode"] = "dinkelbach";
    j["tol"] = tolerance;
    j["max_iter"] = max_iterations;
  }
  return j.dump();
}

LearnOptions LearnOptions::FromJson(const std::string &json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("learn options are not valid JSON: ") + e.what());
  }
  LearnOptions options;
  const std::string mode = j.value("mode", "dinkelbach");
  if (mode == "fixed_alpha") {
    options.mode = LearnMode::kFixedAlpha;
    if (!j.contains("alpha"))
      throw Error(ErrorCode::kInvalidArgument,
                  "fixed_alpha mode requires 'alpha'");
    options.alpha = j["alpha"].get<double>();
    if (!(options.alpha > 0))
      throw Error(ErrorCode::kInvalidArgument, "alpha must be positive");
  } else if (mode == "dinkelbach") {
    options.mode = LearnMode::kDinkelbach;
    options.tolerance = j.value("tol", 1e-8);
    options.max_iterations = j.value("max_iter", 100);
    if (!(options.tolerance > 0) || options.max_iterations < 1)
      throw Error(ErrorCode::kInvalidArgument,
                  "dinkelbach needs tol > 0 and max_iter >= 1");
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown learn mode '" + mode + "'");
  }
  return options;
}

std::string LearnOptions::Describe() const {
  if (mode == LearnMode::kFixedAlpha)
    return "fixed_alpha(alpha=" + std::to_string(alpha) + ")";
  return "dinkelbach";
}

double ClassPairWeight(const std::vector<int> &labels,
                       const std::vector<Index> &class_sizes, Index j, Index k,
                       int class_index) {
  const Index n = static_cast<Index>(labels.size());
  if (j < 0 || j >= n || k < 0 || k >= n)
    throw Error(ErrorCode::kIndexOutOfRange, "training row index out of range");
  if (labels[j] == class_index && labels[k] == class_index)
    return 1.0 / static_cast<double>(class_sizes[class_index]);
  return 0.0;
}

ScatterSummaries ComputeScatterSummaries(const SpectralModel &model,
                                         const std::vector<int> &labels,
                                         Index n) {
  if (n < 2 || n > model.NumSamples())
    throw Error(ErrorCode::kInvalidArgument,
                "training count must lie in [2, N]");
  if (static_cast<Index>(labels.size()) != n)
    throw Error(ErrorCode::kInvalidArgument,
                "label count differs from training count");
  const std::vector<Index> sizes = ClassSizes(labels);
  const int num_classes = static_cast<int>(sizes.size());
  if (num_classes < 2)
    throw Error(ErrorCode::kInvalidArgument,
                "scatter summaries need at least 2 classes");

  const Index p = model.Rank();
  ScatterSummaries summaries;
  summaries.between.resize(p);
  summaries.within.resize(p);

  // Per-component class partial sums replace the O(n^2) pair sums:
  //   sum_{j,k} a_jk^i v[j] v[k] = (class sum)^2 / n_i.
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Index r = 0; r < p; ++r) {
    double total = 0.0;        // sum of v_r over the training block
    double squares = 0.0;      // sum of v_r^2 over the training block
    std::vector<double> class_sums(num_classes, 0.0);
    for (Index j = 0; j < n; ++j) {
      const double value = model.eigenvectors(j, r);
      total += value;
      squares += value * value;
      class_sums[labels[j]] += value;
    }
    double weighted = 0.0;  // sum_i (class sum)^2 / n_i
    for (int i = 0; i < num_classes; ++i)
      weighted += class_sums[i] * class_sums[i] / static_cast<double>(sizes[i]);
    summaries.between[r] = inv_n * (weighted - total * total * inv_n);
    summaries.within[r] = inv_n * (squares - weighted);
  }
  return summaries;
}

double CriterionQ(const ScatterSummaries &summaries, const Vector &mu,
                  double alpha) {
  if (mu.size() != summaries.Rank())
    throw Error(ErrorCode::kLengthMismatch,
                "coefficient vector length differs from summary rank");
  double q = 0.0;
  for (Index r = 0; r < mu.size(); ++r)
    q += mu[r] * mu[r] * (summaries.between[r] - alpha * summaries.within[r]);
  return q;
}

double TraceRatio(const ScatterSummaries &summaries, const Vector &mu) {
  if (mu.size() != summaries.Rank())
    throw Error(ErrorCode::kLengthMismatch,
                "coefficient vector length differs from summary rank");
  double between = 0.0, within = 0.0;
  for (Index r = 0; r < mu.size(); ++r) {
    const double sq = mu[r] * mu[r];
    between += sq * summaries.between[r];
    within += sq * summaries.within[r];
  }
  if (!(within > 0))
    throw Error(ErrorCode::kDegenerateWithinScatter,
                "within-class trace is not positive at this iterate");
  return between / within;
}

Vector SolveMu(const ScatterSummaries &summaries, const Vector &eigenvalues,
               double alpha) {
  const Index p = summaries.Rank();
  if (eigenvalues.size() != p)
    throw Error(ErrorCode::kLengthMismatch,
                "eigenvalue count differs from summary rank");
  if (!(alpha > 0))
    throw Error(ErrorCode::kInvalidArgument, "alpha must be positive");

  Vector diagonal(p);
  double max_abs = 0.0;
  for (Index r = 0; r < p; ++r) {
    diagonal[r] = summaries.between[r] - alpha * summaries.within[r];
    max_abs = std::max(max_abs, std::abs(diagonal[r]));
  }
  if (max_abs == 0.0) {
    // The criterion is identically zero at this alpha (every component has
    // the same trace ratio, e.g. p = 1 at the ratio's root), so every
    // feasible point is stationary; the constraint alone picks the uniform
    // solution.
    double beta = 0.0;
    for (Index r = 0; r < p; ++r) beta += std::sqrt(eigenvalues[r]);
    return Vector::Constant(p, beta / static_cast<double>(p));
  }

  // Clamp near-zero diagonal entries (sign preserved) so the inverse stays
  // finite; the stationary point is invariant under a global sign flip of
  // the diagonal, so the clamp direction never changes the result.
  const double floor = 1e-12 * max_abs;
  Vector inverse(p);
  double sum = 0.0, sum_abs = 0.0;
  for (Index r = 0; r < p; ++r) {
    double entry = diagonal[r];
    if (std::abs(entry) < floor) entry = entry < 0 ? -floor : floor;
    inverse[r] = 1.0 / entry;
    sum += inverse[r];
    sum_abs += std::abs(inverse[r]);
  }
  if (std::abs(sum) <= 1e-12 * std::max(1.0, sum_abs))
    throw Error(ErrorCode::kDegenerateStationaryPoint,
                "constraint normal is orthogonal to the inverse diagonal");

  double beta = 0.0;
  for (Index r = 0; r < p; ++r) beta += std::sqrt(eigenvalues[r]);

  Vector mu(p);
  for (Index r = 0; r < p; ++r) mu[r] = beta * inverse[r] / sum;
  return mu;
}

LearnedCoefficients LearnKernel(const SpectralModel &model,
                                const std::vector<int> &labels, Index n,
                                const LearnOptions &options) {
  const ScatterSummaries summaries = ComputeScatterSummaries(model, labels, n);
  const Vector &eigenvalues = model.eigenvalues;

  LearnedCoefficients result;
  result.beta = eigenvalues.array().sqrt().sum();

  if (options.mode == LearnMode::kFixedAlpha) {
    result.mu = SolveMu(summaries, eigenvalues, options.alpha);
    result.alpha = options.alpha;
    result.iterations = 1;
    result.ratio_trace = TraceRatio(summaries, result.mu);
    return result;
  }

  // Dinkelbach-style iteration on the trace ratio.  The parametric solve is
  // only a stationary point of an indefinite quadratic, so the ratio is not
  // monotone on its own; keeping the best-ratio iterate (the baseline
  // coefficients included) makes the procedure monotone by construction.
  Vector mu = model.BaselineCoefficients();
  double best_ratio = TraceRatio(summaries, mu);
  if (!(best_ratio > 0))
    throw Error(ErrorCode::kDegenerateBetweenScatter,
                "between-class trace is not positive at the baseline "
                "coefficients");
  Vector best_mu = mu;
  double alpha = best_ratio;
  int iterations = 0;
  for (int t = 0; t < options.max_iterations; ++t) {
    ++iterations;
    mu = SolveMu(summaries, eigenvalues, alpha);
    const double ratio = TraceRatio(summaries, mu);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best_mu = mu;
    }
    const double previous = alpha;
    alpha = ratio;
    if (std::abs(alpha - previous) <= options.tolerance) break;
  }

  result.mu = best_mu;
  result.alpha = alpha;
  result.iterations = iterations;
  result.ratio_trace = best_ratio;
  return result;
}

}  // namespace kmv

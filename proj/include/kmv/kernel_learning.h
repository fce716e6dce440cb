// kmv/kernel_learning.h

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

#ifndef KMV_KERNEL_LEARNING_H_
#define KMV_KERNEL_LEARNING_H_

#include <string>
#include <vector>

#include "kmv/common.h"
#include "kmv/spectral.h"

namespace kmv {

// Per-base-kernel diagonal scatter summaries over the training block.
// `between[r]` and `within[r]` are the contributions of the r-th rank-one
// base kernel to the between-class and within-class scatter traces, so that
// for coefficients mu
//   trace(S_b) = sum_r mu_r^2 * between[r]
//   trace(S_w) = sum_r mu_r^2 * within[r].
struct ScatterSummaries {
  Vector between;  // f_1..f_p
  Vector within;   // g_1..g_p, non-negative up to round-off

  Index Rank() const { return between.size(); }
};

struct LearnedCoefficients {
  Vector mu;          // length p, satisfies ones^T mu = beta
  double alpha = 0;   // final ratio parameter used
  double beta = 0;    // sum of sqrt(eigenvalues), the constraint constant
  int iterations = 0;
  double ratio_trace = 0;  // trace(S_b)/trace(S_w) at the returned mu
};

enum class LearnMode { kFixedAlpha, kDinkelbach };

struct LearnOptions {
  LearnMode mode = LearnMode::kDinkelbach;
  double alpha = 1.0;       // fixed-alpha mode only
  double tolerance = 1e-8;  // dinkelbach stop on |alpha change| <= tolerance
  int max_iterations = 100;

  std::string ToJson() const;
  static LearnOptions FromJson(const std::string &json_text);
  std::string Describe() const;
};

// Pairwise class weight: 1/n_i when training rows j and k both belong to
// class i, else 0.  `class_sizes[i]` is n_i.
double ClassPairWeight(const std::vector<int> &labels,
                       const std::vector<Index> &class_sizes, Index j, Index k,
                       int class_index);

// Diagonal scatter summaries from the spectral model's eigenvectors and the
// training labels.  Training rows must occupy the leading n rows of the
// model.  Uses per-class partial sums of eigenvector entries rather than the
// O(n^2 p) double loop.  Throws on fewer than 2 classes or an empty class.
ScatterSummaries ComputeScatterSummaries(const SpectralModel &model,
                                         const std::vector<int> &labels,
                                         Index n);

// Q(mu) = mu^T (D_b - alpha D_w) mu = sum_r mu_r^2 (between[r] - alpha*within[r]).
double CriterionQ(const ScatterSummaries &summaries, const Vector &mu,
                  double alpha);

// trace(S_b)/trace(S_w) at mu.  Throws kDegenerateWithinScatter when the
// within trace is <= 0.
double TraceRatio(const ScatterSummaries &summaries, const Vector &mu);

// Stationary point of Q under the constraint ones^T mu = beta:
//   mu = beta * M^-1 ones / (ones^T M^-1 ones),  M = D_b - alpha D_w.
// M is diagonal; entries with |m_r| below 1e-12 * max|m| are clamped to that
// floor with their sign preserved.  The result is invariant under a global
// sign flip of M.  Throws kDegenerateStationaryPoint when ones^T M^-1 ones
// vanishes.
Vector SolveMu(const ScatterSummaries &summaries, const Vector &eigenvalues,
               double alpha);

// Learns coefficients maximizing the trace ratio.  Fixed-alpha mode is a
// single SolveMu call.  Dinkelbach mode initializes alpha to the ratio at
// mu_0 = sqrt(eigenvalues), then alternates SolveMu with a ratio update,
// keeping the best-ratio iterate seen (mu_0 included), so the returned
// ratio is never below the ratio of the baseline coefficients.
LearnedCoefficients LearnKernel(const SpectralModel &model,
                                const std::vector<int> &labels, Index n,
                                const LearnOptions &options);

}  // namespace kmv

#endif  // KMV_KERNEL_LEARNING_H_

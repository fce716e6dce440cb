// kmv/cskda.h

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

#ifndef KMV_CSKDA_H_
#define KMV_CSKDA_H_

#include <string>
#include <vector>

#include "kmv/common.h"
#include "kmv/dataset.h"
#include "kmv/spectral.h"

namespace kmv {

struct FitOptions {
  // Rank-estimation threshold for the between-class eigenbasis, relative to
  // the largest eigenvalue.
  double rel_tol = 1e-10;
};

// Client-specific kernel discriminant model.  Everything needed to project
// any sample of the transductive set into the between-class subspace and
// score a claim against one client's 1-D Fisher direction.  Immutable after
// FitCskda; scoring is pure and safe to run concurrently.
struct CskdaModel {
  Index n = 0;                        // training rows (leading block)
  std::vector<std::string> clients;   // canonical client order
  std::vector<int> labels;            // class index per training row
  std::vector<Index> class_sizes;     // n_i per client
  Vector class_scale;                 // sqrt(n_i), diagonal of B

  Index m_b = 0;      // retained between-class rank, <= min(n, c-1)
  Matrix reduction;   // c x m_b, E_m * U_b^{-1/2}
  Vector center;      // c, training mean of the pre-reduction coordinates

  Matrix client_means;       // m_b x c, per-client mean in reduced space
  Matrix impostor_means;     // m_b x c, exactly -n_i/(n-n_i) * client mean
  Matrix fisher_directions;  // m_b x c, unit columns a_i
  Vector client_targets;     // c, a_i . client_means[i]
  Vector impostor_targets;   // c, a_i . impostor_means[i]
  Matrix st_inverse;         // m_b x m_b, inverse of the population scatter

  std::vector<std::string> warnings;  // degenerate clients reported at fit

  int ClientIndex(const std::string &identity) const;
};

// The trio needed to score claims: the spectral base, its coefficients, and
// the fitted discriminant model.
struct ModelPack {
  SpectralModel spectral;
  Vector mu;
  CskdaModel cskda;

  // Serializes the whole bundle (spectrum, coefficients, projection data,
  // per-client means and directions) to one JSON artifact.
  std::string ToJson() const;
  static ModelPack FromJson(const std::string &json_text);
};

struct ClaimScore {
  std::string claimed_client;
  double projected = 0;          // the 1-D client-specific projection
  double client_distance = 0;    // |projected - client target|
  double impostor_distance = 0;  // |projected - impostor target|
};

// OnC scores a claim against the client mean, OnI against the impostor mean.
enum class ClassificationMode { kClientModel, kImpostorModel };

const char *ClassificationModeName(ClassificationMode mode);
ClassificationMode ClassificationModeFromName(const std::string &name);

// Between-class scatter in Gram form: the c x c matrix P_b^T P_b computed
// from the training block kt of the kernel matrix,
//   (1/n) B [A^T kt A - (1/n) A^T kt J - (1/n) J^T kt A + (1/n^2) J^T kt J] B
// with B = diag(sqrt(n_i)), A the per-class 1/n_i indicator columns and J
// the all-ones n x c matrix.  Shares its nonzero spectrum with the
// between-class scatter matrix itself.
Matrix BetweenScatterGram(const Matrix &kt, const std::vector<int> &labels,
                          int num_classes);

// Fits the client-specific model on the learned kernel: eigendecomposes
// P_b^T P_b, keeps the m_b dominant components, projects every training
// sample into that subspace (centering by the projected training mean),
// and derives per-client means, impostor means, the population scatter
// inverse and unit-normalized Fisher directions.  Throws
// kDegenerateBetweenScatter / kSingularPopulationScatter.
CskdaModel FitCskda(const SpectralModel &model, const Vector &mu,
                    const VerificationDataset &dataset,
                    const FitOptions &options = FitOptions());

// 1-D client-specific projection of any sample of the transductive set.
// The sample's kernel values against the training block are read from the
// learned kernel matrix; the same centering as at fit time is applied.
double Project(const ModelPack &pack, Index sample_index,
               const std::string &client);

ClaimScore ScoreClaim(const ModelPack &pack, Index sample_index,
                      const std::string &claimed);

// Client model: accept iff the client distance is <= threshold.  Impostor
// model: accept iff the impostor distance exceeds the threshold.
bool Decide(const ClaimScore &score, ClassificationMode mode,
            double threshold);

}  // namespace kmv

#endif  // KMV_CSKDA_H_

// tests/oracle.h

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

// Test-only reference implementations.  Everything here works directly on
// raw input-space vectors (or literal double loops) and never touches the
// Gram/spectral code paths it is used to check.

#ifndef KMV_TESTS_ORACLE_H_
#define KMV_TESTS_ORACLE_H_

#include <random>
#include <utility>
#include <vector>

#include "kmv/common.h"
#include "kmv/dataset.h"

namespace kmv {
namespace oracle {

double UniformReal(std::mt19937_64 &rng);    // [0, 1)
double GaussianReal(std::mt19937_64 &rng);   // Box-Muller

// Between-class scatter trace of training vectors around the global mean,
// computed from explicit class means.
double TraceBetween(const Matrix &train, const std::vector<int> &labels);

// Within-class scatter trace of training vectors around their class means.
double TraceWithin(const Matrix &train, const std::vector<int> &labels);

// Literal O(n^2 p) pair sums over the training rows of the eigenvector
// block: the (between, within) per-component contributions.
std::pair<Vector, Vector> BruteForceSummaries(const Matrix &eigenvectors,
                                              const std::vector<int> &labels,
                                              Index n);

// P_b^T P_b assembled from explicit input-space class-mean columns.
Matrix BetweenScatterDirect(const Matrix &train,
                            const std::vector<int> &labels, int num_classes);

// Independent client-specific LDA pipeline on raw vectors: reduce onto the
// dominant eigenvectors of the between-class scatter, then per-client
// Fisher directions against the population scatter.
struct InputSpaceCskda {
  Index m_b = 0;
  Matrix basis;         // M x m_b, unit eigenvectors of S_b
  Vector global_mean;   // M
  Matrix client_means;  // m_b x c
  Matrix impostor_means;
  Matrix directions;    // m_b x c, unit columns
  Vector client_targets;
  Vector impostor_targets;

  static InputSpaceCskda Fit(const Matrix &train,
                             const std::vector<int> &labels, int num_classes,
                             double rel_tol = 1e-10);
  double Project(const Vector &x, int client) const;
  // (client distance, impostor distance)
  std::pair<double, double> Score(const Vector &x, int client) const;
};

Matrix RandomPsd(std::mt19937_64 &rng, Index n);

// Small random verification dataset assembled by hand: every client gets
// 2-4 training rows plus evaluation/test rows, impostors evaluation/test
// only.  Cluster means are `separation` apart in scale with unit spread.
VerificationDataset RandomSmallDataset(std::mt19937_64 &rng, int num_clients,
                                       int num_impostors, Index dim,
                                       double separation);

}  // namespace oracle
}  // namespace kmv

#endif  // KMV_TESTS_ORACLE_H_

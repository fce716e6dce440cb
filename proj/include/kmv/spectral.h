// kmv/spectral.h

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

#ifndef KMV_SPECTRAL_H_
#define KMV_SPECTRAL_H_

#include <string>

#include "kmv/common.h"

namespace kmv {

// Rank-one factorization of a Gram matrix: the positive spectrum
// K = sum_r eigenvalues[r] * v_r v_r^T with v_r the columns of
// eigenvectors.  Coefficients over that base (one weight per rank-one
// term, entering squared) realize the parameterized kernel family; the
// coefficient vector is empty until learned or set.
struct SpectralModel {
  Vector eigenvalues;   // positive, sorted descending, length p
  Matrix eigenvectors;  // N x p, orthonormal columns
  Vector coefficients;  // length p once set, else empty

  Index NumSamples() const { return eigenvectors.rows(); }
  Index Rank() const { return eigenvalues.size(); }

  // Coefficient choice that reproduces the retained spectrum of the
  // original Gram matrix (sqrt of each eigenvalue).
  Vector BaselineCoefficients() const;

  std::string ToJson() const;
  static SpectralModel FromJson(const std::string &json_text);
};

// Eigendecomposition of a symmetric Gram matrix keeping the eigenpairs with
// eigenvalue > rel_tol * lambda_max.  Eigenvector signs are fixed so the
// largest-magnitude component of each vector is non-negative, making the
// result deterministic.  Throws kNotSymmetric / kNoPositiveEigenvalue /
// kInvalidArgument (rel_tol outside (0,1)).
SpectralModel Decompose(const Matrix &gram, double rel_tol = 1e-10);

// K_mu = sum_r mu_r^2 v_r v_r^T; symmetric PSD by construction.
Matrix AssembleKMu(const SpectralModel &model, const Vector &mu);

// Single entry of K_mu without materializing the matrix.
double KMuEntry(const SpectralModel &model, const Vector &mu, Index i,
                Index j);

// One column of K_mu restricted to the leading block_rows rows (the usual
// case is block_rows = n, giving the kernel values between sample `col` and
// every training sample).
Vector KMuColumnHead(const SpectralModel &model, const Vector &mu, Index col,
                     Index block_rows);

}  // namespace kmv

#endif  // KMV_SPECTRAL_H_

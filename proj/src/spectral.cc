// src/spectral.cc

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

#include "kmv/spectral.h"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace kmv {

Vector SpectralModel::BaselineCoefficients() const {
  return eigenvalues.array().sqrt().matrix();
}

std::string SpectralModel::ToJson() const {
  nlohmann::json j;
  j["n"] = NumSamples();
  j["p"] = Rank();
  j["eigenvalues"] = std::vector<double>(
      eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  // Row-major flattening of the N x p eigenvector block.
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(eigenvectors.size()));
  for (Index i = 0; i < eigenvectors.rows(); ++i)
    for (Index r = 0; r < eigenvectors.cols(); ++r)
      flat.push_back(eigenvectors(i, r));
  j["eigenvectors"] = flat;
  if (coefficients.size() > 0)
    j["mu"] = std::vector<double>(coefficients.data(),
                                  coefficients.data() + coefficients.size());
  return j.dump();
}

SpectralModel SpectralModel::FromJson(const std::string &json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("spectral model is not valid JSON: ") + e.what());
  }
  SpectralModel model;
  try {
    const Index n = j.at("n").get<Index>();
    const Index p = j.at("p").get<Index>();
    const auto values = j.at("eigenvalues").get<std::vector<double>>();
    const auto flat = j.at("eigenvectors").get<std::vector<double>>();
    if (static_cast<Index>(values.size()) != p ||
        static_cast<Index>(flat.size()) != n * p)
      throw Error(ErrorCode::kInvalidArgument,
                  "spectral model arrays inconsistent with n, p");
    model.eigenvalues = Eigen::Map<const Vector>(values.data(), p);
    model.eigenvectors.resize(n, p);
    for (Index i = 0; i < n; ++i)
      for (Index r = 0; r < p; ++r) model.eigenvectors(i, r) = flat[i * p + r];
    if (j.contains("mu")) {
      const auto mu = j.at("mu").get<std::vector<double>>();
      if (static_cast<Index>(mu.size()) != p)
        throw Error(ErrorCode::kInvalidArgument,
                    "coefficient vector length differs from p");
      model.coefficients = Eigen::Map<const Vector>(mu.data(), p);
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidArgument,
                "spectral model field error: " + std::string(e.what()));
  }
  return model;
}

SpectralModel Decompose(const Matrix &gram, double rel_tol) {
  if (gram.rows() != gram.cols() || gram.rows() == 0)
    throw Error(ErrorCode::kInvalidArgument, "Gram matrix must be square");
  if (!(rel_tol > 0.0) || !(rel_tol < 1.0))
    throw Error(ErrorCode::kInvalidArgument, "rel_tol must lie in (0, 1)");
  const double scale = gram.cwiseAbs().maxCoeff();
  const double asymmetry = (gram - gram.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > 1e-10 * std::max(1.0, scale))
    throw Error(ErrorCode::kNotSymmetric,
                "matrix is not symmetric (max asymmetry " +
                    std::to_string(asymmetry) + ")");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::kInvalidArgument, "eigendecomposition failed");

  const Vector &values = solver.eigenvalues();  // ascending
  const double lambda_max = values[values.size() - 1];
  if (!(lambda_max > 0))
    throw Error(ErrorCode::kNoPositiveEigenvalue,
                "matrix has no positive eigenvalue");

  const double threshold = rel_tol * lambda_max;
  Index rank = 0;
  for (Index i = 0; i < values.size(); ++i)
    if (values[i] > threshold) ++rank;

  SpectralModel model;
  model.eigenvalues.resize(rank);
  model.eigenvectors.resize(gram.rows(), rank);
  for (Index r = 0; r < rank; ++r) {
    const Index src = values.size() - 1 - r;  // descending order
    model.eigenvalues[r] = values[src];
    Vector v = solver.eigenvectors().col(src);
    // Deterministic sign: largest-magnitude component non-negative.
    Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v[pivot] < 0) v = -v;
    model.eigenvectors.col(r) = v;
  }
  return model;
}

Matrix AssembleKMu(const SpectralModel &model, const Vector &mu) {
  if (mu.size() != model.Rank())
    throw Error(ErrorCode::kLengthMismatch,
                "coefficient vector length " + std::to_string(mu.size()) +
                    " differs from rank " + std::to_string(model.Rank()));
  // (V diag(mu)) (V diag(mu))^T keeps the result symmetric PSD exactly.
  const Matrix scaled = model.eigenvectors * mu.asDiagonal();
  return scaled * scaled.transpose();
}

double KMuEntry(const SpectralModel &model, const Vector &mu, Index i,
                Index j) {
  if (mu.size() != model.Rank())
    throw Error(ErrorCode::kLengthMismatch,
                "coefficient vector length differs from rank");
  const Index num = model.NumSamples();
  if (i < 0 || i >= num || j < 0 || j >= num)
    throw Error(ErrorCode::kIndexOutOfRange,
                "sample index out of range [0, " + std::to_string(num) + ")");
  double entry = 0.0;
  for (Index r = 0; r < model.Rank(); ++r)
    entry += mu[r] * mu[r] * model.eigenvectors(i, r) * model.eigenvectors(j, r);
  return entry;
}

Vector KMuColumnHead(const SpectralModel &model, const Vector &mu, Index col,
                     Index block_rows) {
  if (mu.size() != model.Rank())
    throw Error(ErrorCode::kLengthMismatch,
                "coefficient vector length differs from rank");
  const Index num = model.NumSamples();
  if (col < 0 || col >= num)
    throw Error(ErrorCode::kIndexOutOfRange, "column index out of range");
  if (block_rows < 0 || block_rows > num)
    throw Error(ErrorCode::kIndexOutOfRange, "block size out of range");
  const Vector weights =
      (mu.array().square() *
       model.eigenvectors.row(col).transpose().array()).matrix();
  return model.eigenvectors.topRows(block_rows) * weights;
}

}  // namespace kmv

// src/cskda.cc

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

#include "kmv/cskda.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace kmv {

namespace {

std::vector<Index> ClassSizesFromLabels(const std::vector<int> &labels,
                                        int num_classes) {
  std::vector<Index> sizes(num_classes, 0);
  for (int label : labels) {
    if (label < 0 || label >= num_classes)
      throw Error(ErrorCode::kInvalidArgument, "class label out of range");
    ++sizes[label];
  }
  for (int i = 0; i < num_classes; ++i)
    if (sizes[i] == 0)
      throw Error(ErrorCode::kInvalidArgument,
                  "class " + std::to_string(i) + " has no training rows");
  return sizes;
}

// Per-class averaging matrix: column i holds 1/n_i at that class's rows.
Matrix ClassAveraging(const std::vector<int> &labels,
                      const std::vector<Index> &sizes) {
  const Index n = static_cast<Index>(labels.size());
  const Index c = static_cast<Index>(sizes.size());
  Matrix averaging = Matrix::Zero(n, c);
  for (Index j = 0; j < n; ++j)
    averaging(j, labels[j]) = 1.0 / static_cast<double>(sizes[labels[j]]);
  return averaging;
}

nlohmann::json MatrixToJson(const Matrix &m) {
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index k = 0; k < m.cols(); ++k) flat.push_back(m(i, k));
  j["data"] = flat;
  return j;
}

Matrix MatrixFromJson(const nlohmann::json &j) {
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  const auto flat = j.at("data").get<std::vector<double>>();
  if (static_cast<Index>(flat.size()) != rows * cols)
    throw Error(ErrorCode::kInvalidArgument, "matrix payload size mismatch");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index k = 0; k < cols; ++k) m(i, k) = flat[i * cols + k];
  return m;
}

std::vector<double> VectorToStd(const Vector &v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector VectorFromStd(const std::vector<double> &v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

// Inverse of a symmetric PSD scatter through its eigenbasis, with a ridge
// rescue when the condition number exceeds 1e12 and a pseudo-inverse as the
// final fallback.
Matrix InvertPopulationScatter(const Matrix &scatter) {
  const Index dim = scatter.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(scatter);
  Vector values = solver.eigenvalues();
  Matrix basis = solver.eigenvectors();
  double largest = values[dim - 1];
  if (!(largest > 0))
    throw Error(ErrorCode::kSingularPopulationScatter,
                "population scatter has no positive eigenvalue");
  if (values[0] <= largest / 1e12) {
    const double ridge = 1e-8 * scatter.trace() / static_cast<double>(dim);
    solver.compute(scatter + ridge * Matrix::Identity(dim, dim));
    values = solver.eigenvalues();
    basis = solver.eigenvectors();
    largest = values[dim - 1];
    if (!(largest > 0))
      throw Error(ErrorCode::kSingularPopulationScatter,
                  "population scatter singular even after ridge");
  }
  Vector inverse_values(dim);
  for (Index i = 0; i < dim; ++i)
    inverse_values[i] = values[i] > largest * 1e-15 ? 1.0 / values[i] : 0.0;
  return basis * inverse_values.asDiagonal() * basis.transpose();
}

}  // namespace

int CskdaModel::ClientIndex(const std::string &identity) const {
  for (size_t i = 0; i < clients.size(); ++i)
    if (clients[i] == identity) return static_cast<int>(i);
  return -1;
}

const char *ClassificationModeName(ClassificationMode mode) {
  return mode == ClassificationMode::kClientModel ? "OnC" : "OnI";
}

ClassificationMode ClassificationModeFromName(const std::string &name) {
  if (name == "OnC" || name == "client_model")
    return ClassificationMode::kClientModel;
  if (name == "OnI" || name == "impostor_model")
    return ClassificationMode::kImpostorModel;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown classification mode '" + name + "'");
}

Matrix BetweenScatterGram(const Matrix &kt, const std::vector<int> &labels,
                          int num_classes) {
  const Index n = kt.rows();
  if (kt.cols() != n)
    throw Error(ErrorCode::kInvalidArgument, "training block must be square");
  if (static_cast<Index>(labels.size()) != n)
    throw Error(ErrorCode::kInvalidArgument,
                "label count differs from training block size");
  const std::vector<Index> sizes = ClassSizesFromLabels(labels, num_classes);

  const double inv_n = 1.0 / static_cast<double>(n);
  const Matrix averaging = ClassAveraging(labels, sizes);     // n x c
  const Matrix class_block = averaging.transpose() * kt;      // c x n
  const Matrix class_means = class_block * averaging;         // c x c
  const Vector row_sums = class_block.rowwise().sum();        // c
  const double grand = kt.sum();

  Matrix result(num_classes, num_classes);
  for (int i = 0; i < num_classes; ++i) {
    const double scale_i = std::sqrt(static_cast<double>(sizes[i]));
    for (int l = 0; l < num_classes; ++l) {
      const double scale_l = std::sqrt(static_cast<double>(sizes[l]));
      const double centered = class_means(i, l) - inv_n * row_sums[i] -
                              inv_n * row_sums[l] + inv_n * inv_n * grand;
      result(i, l) = inv_n * scale_i * scale_l * centered;
    }
  }
  return 0.5 * (result + result.transpose()).eval();
}

/*
  Fitting works entirely in Gram coordinates.  Writing r(x) for the vector
  of kernel values between a sample x and the n training samples, the map

      pb(x)[i] = sqrt(n_i / n) * (class-i mean of r(x) - overall mean of r(x))

  is the inner product of the feature image of x with the i-th column of the
  between-class factor P_b.  The eigenvectors e of P_b^T P_b with eigenvalue
  u give orthonormal directions P_b e / sqrt(u) of the between-class scatter,
  so the reduced representation of x is

      y(x) = reduction^T (pb(x) - center),  reduction = E_m U_b^{-1/2},

  with `center` the training mean of pb, which makes the projected training
  population zero-mean.  That zero mean is what turns the impostor mean of
  client i into an exact rescaling of the client mean:
  sum over all training y is 0, so the non-i part is -n_i * mean_i, giving
  impostor mean = -n_i/(n-n_i) * mean_i.
*/
CskdaModel FitCskda(const SpectralModel &model, const Vector &mu,
                    const VerificationDataset &dataset,
                    const FitOptions &options) {
  if (!(options.rel_tol > 0.0) || !(options.rel_tol < 1.0))
    throw Error(ErrorCode::kInvalidArgument, "rel_tol must lie in (0, 1)");
  const Index n = dataset.TrainCount();
  const int c = static_cast<int>(dataset.clients.size());
  if (c < 2)
    throw Error(ErrorCode::kInvalidArgument, "need at least 2 clients");
  if (model.NumSamples() != dataset.NumSamples())
    throw Error(ErrorCode::kDimensionMismatch,
                "spectral model and dataset sample counts differ");

  CskdaModel fitted;
  fitted.n = n;
  fitted.clients = dataset.clients;
  fitted.labels = dataset.TrainingClasses();
  fitted.class_sizes = ClassSizesFromLabels(fitted.labels, c);
  fitted.class_scale.resize(c);
  for (int i = 0; i < c; ++i)
    fitted.class_scale[i] = std::sqrt(static_cast<double>(fitted.class_sizes[i]));

  // Training block of the learned kernel matrix.
  const Matrix scaled = model.eigenvectors.topRows(n) * mu.asDiagonal();
  const Matrix kt = scaled * scaled.transpose();

  const Matrix between = BetweenScatterGram(kt, fitted.labels, c);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(between);
  const Vector &values = solver.eigenvalues();  // ascending
  const double largest = values[c - 1];
  if (!(largest > 0))
    throw Error(ErrorCode::kDegenerateBetweenScatter,
                "between-class scatter has no positive eigenvalue");

  Index m_b = 0;
  for (Index i = 0; i < c; ++i)
    if (values[i] > options.rel_tol * largest) ++m_b;
  m_b = std::min<Index>(m_b, std::min<Index>(n, c - 1));
  if (m_b < 1) m_b = 1;
  fitted.m_b = m_b;

  fitted.reduction.resize(c, m_b);
  for (Index r = 0; r < m_b; ++r) {
    const Index src = c - 1 - r;  // descending
    fitted.reduction.col(r) =
        solver.eigenvectors().col(src) / std::sqrt(values[src]);
  }

  // Reduced representations of the training samples.
  const double inv_n = 1.0 / static_cast<double>(n);
  const Matrix averaging = ClassAveraging(fitted.labels, fitted.class_sizes);
  Matrix pb_train = averaging.transpose() * kt;  // c x n, class means of rows
  const Eigen::RowVectorXd column_means = kt.colwise().sum() * inv_n;
  for (int i = 0; i < c; ++i)
    pb_train.row(i) =
        (pb_train.row(i) - column_means) * (fitted.class_scale[i] *
                                            std::sqrt(inv_n));
  fitted.center = pb_train.rowwise().mean();
  const Matrix projected =
      fitted.reduction.transpose() * (pb_train.colwise() - fitted.center);

  fitted.client_means = projected * averaging;  // m_b x c
  fitted.impostor_means.resize(m_b, c);
  for (int i = 0; i < c; ++i) {
    const double ratio = static_cast<double>(fitted.class_sizes[i]) /
                         static_cast<double>(n - fitted.class_sizes[i]);
    fitted.impostor_means.col(i) = -(ratio * fitted.client_means.col(i));
  }

  const Matrix population_scatter = inv_n * (projected * projected.transpose());
  fitted.st_inverse = InvertPopulationScatter(population_scatter);

  fitted.fisher_directions.resize(m_b, c);
  fitted.client_targets.resize(c);
  fitted.impostor_targets.resize(c);
  for (int i = 0; i < c; ++i) {
    Vector direction = fitted.st_inverse * fitted.client_means.col(i);
    const double norm = direction.norm();
    if (norm > 0) {
      direction /= norm;
    } else {
      fitted.warnings.push_back("client '" + fitted.clients[i] +
                                "': zero Fisher direction");
    }
    fitted.fisher_directions.col(i) = direction;
    fitted.client_targets[i] = direction.dot(fitted.client_means.col(i));
    fitted.impostor_targets[i] = direction.dot(fitted.impostor_means.col(i));
    if (std::abs(fitted.client_targets[i] - fitted.impostor_targets[i]) <=
        1e-12 * std::max(1.0, std::abs(fitted.client_targets[i])))
      fitted.warnings.push_back("client '" + fitted.clients[i] +
                                "': client and impostor projections coincide");
  }
  return fitted;
}

double Project(const ModelPack &pack, Index sample_index,
               const std::string &client) {
  const CskdaModel &m = pack.cskda;
  const int ci = m.ClientIndex(client);
  if (ci < 0)
    throw Error(ErrorCode::kUnknownClient, "unknown client '" + client + "'");
  if (sample_index < 0 || sample_index >= pack.spectral.NumSamples())
    throw Error(ErrorCode::kIndexOutOfRange, "sample index out of range");

  const Vector r = KMuColumnHead(pack.spectral, pack.mu, sample_index, m.n);
  const int c = static_cast<int>(m.clients.size());
  Vector class_sums = Vector::Zero(c);
  for (Index j = 0; j < m.n; ++j) class_sums[m.labels[j]] += r[j];
  const double total = r.sum();
  const double inv_n = 1.0 / static_cast<double>(m.n);

  Vector pb(c);
  for (int i = 0; i < c; ++i)
    pb[i] = std::sqrt(inv_n) * m.class_scale[i] *
            (class_sums[i] / static_cast<double>(m.class_sizes[i]) -
             total * inv_n);
  const Vector reduced = m.reduction.transpose() * (pb - m.center);
  return m.fisher_directions.col(ci).dot(reduced);
}

ClaimScore ScoreClaim(const ModelPack &pack, Index sample_index,
                      const std::string &claimed) {
  const int ci = pack.cskda.ClientIndex(claimed);
  if (ci < 0)
    throw Error(ErrorCode::kUnknownClient, "unknown client '" + claimed + "'");
  ClaimScore score;
  score.claimed_client = claimed;
  score.projected = Project(pack, sample_index, claimed);
  score.client_distance =
      std::abs(score.projected - pack.cskda.client_targets[ci]);
  score.impostor_distance =
      std::abs(score.projected - pack.cskda.impostor_targets[ci]);
  return score;
}

bool Decide(const ClaimScore &score, ClassificationMode mode,
            double threshold) {
  if (!(threshold >= 0))
    throw Error(ErrorCode::kInvalidArgument, "threshold must be >= 0");
  if (mode == ClassificationMode::kClientModel)
    return score.client_distance <= threshold;
  return score.impostor_distance > threshold;
}

std::string ModelPack::ToJson() const {
  nlohmann::json j;
  j["spectral"] = nlohmann::json::parse(spectral.ToJson());
  j["mu"] = VectorToStd(mu);
  nlohmann::json k;
  k["n"] = cskda.n;
  k["clients"] = cskda.clients;
  k["labels"] = cskda.labels;
  k["class_sizes"] = cskda.class_sizes;
  k["class_scale"] = VectorToStd(cskda.class_scale);
  k["m_b"] = cskda.m_b;
  k["reduction"] = MatrixToJson(cskda.reduction);
  k["center"] = VectorToStd(cskda.center);
  k["client_means"] = MatrixToJson(cskda.client_means);
  k["impostor_means"] = MatrixToJson(cskda.impostor_means);
  k["fisher_directions"] = MatrixToJson(cskda.fisher_directions);
  k["client_targets"] = VectorToStd(cskda.client_targets);
  k["impostor_targets"] = VectorToStd(cskda.impostor_targets);
  k["st_inverse"] = MatrixToJson(cskda.st_inverse);
  k["warnings"] = cskda.warnings;
  j["cskda"] = k;
  return j.dump();
}

ModelPack ModelPack::FromJson(const std::string &json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("model bundle is not valid JSON: ") + e.what());
  }
  ModelPack pack;
  try {
    pack.spectral = SpectralModel::FromJson(j.at("spectral").dump());
    pack.mu = VectorFromStd(j.at("mu").get<std::vector<double>>());
    const nlohmann::json &k = j.at("cskda");
    pack.cskda.n = k.at("n").get<Index>();
    pack.cskda.clients = k.at("clients").get<std::vector<std::string>>();
    pack.cskda.labels = k.at("labels").get<std::vector<int>>();
    pack.cskda.class_sizes = k.at("class_sizes").get<std::vector<Index>>();
    pack.cskda.class_scale =
        VectorFromStd(k.at("class_scale").get<std::vector<double>>());
    pack.cskda.m_b = k.at("m_b").get<Index>();
    pack.cskda.reduction = MatrixFromJson(k.at("reduction"));
    pack.cskda.center = VectorFromStd(k.at("center").get<std::vector<double>>());
    pack.cskda.client_means = MatrixFromJson(k.at("client_means"));
    pack.cskda.impostor_means = MatrixFromJson(k.at("impostor_means"));
    pack.cskda.fisher_directions = MatrixFromJson(k.at("fisher_directions"));
    pack.cskda.client_targets =
        VectorFromStd(k.at("client_targets").get<std::vector<double>>());
    pack.cskda.impostor_targets =
        VectorFromStd(k.at("impostor_targets").get<std::vector<double>>());
    pack.cskda.st_inverse = MatrixFromJson(k.at("st_inverse"));
    pack.cskda.warnings = k.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidArgument,
                "model bundle field error: " + std::string(e.what()));
  }
  return pack;
}

}  // namespace kmv

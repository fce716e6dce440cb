// src/kernels.cc

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

#include "kmv/kernels.h"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace kmv {

namespace {

// Integer power by repeated multiplication; bit-reproducible everywhere,
// unlike std::pow with a converted exponent.
double IntPow(double base, int exponent) {
  double result = 1.0;
  for (int i = 0; i < exponent; ++i) result *= base;
  return result;
}

}  // namespace

KernelSpec KernelSpec::Linear() { return KernelSpec{}; }

KernelSpec KernelSpec::Polynomial(double a, double b, int d) {
  KernelSpec spec;
  spec.family = KernelFamily::kPolynomial;
  spec.poly_a = a;
  spec.poly_b = b;
  spec.poly_d = d;
  spec.Validate();
  return spec;
}

KernelSpec KernelSpec::Rbf(double sigma) {
  KernelSpec spec;
  spec.family = KernelFamily::kRbf;
  spec.rbf_sigma = sigma;
  spec.Validate();
  return spec;
}

void KernelSpec::Validate() const {
  if (family == KernelFamily::kPolynomial && poly_d < 1)
    throw Error(ErrorCode::kInvalidArgument,
                "polynomial kernel requires degree d >= 1");
  if (family == KernelFamily::kRbf && !(rbf_sigma > 0))
    throw Error(ErrorCode::kInvalidArgument,
                "rbf kernel requires sigma > 0");
}

std::string KernelSpec::ToJson() const {
  nlohmann::json j;
  switch (family) {
    case KernelFamily::kLinear:
      j["family"] = "linear";
      break;
    case KernelFamily::kPolynomial:
      j["family"] = "polynomial";
      j["a"] = poly_a;
      j["b"] = poly_b;
      j["d"] = poly_d;
      break;
    case KernelFamily::kRbf:
      j["family"] = "rbf";
      j["sigma"] = rbf_sigma;
      break;
  }
  return j.dump();
}

KernelSpec KernelSpec::FromJson(const std::string &json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("kernel spec is not valid JSON: ") + e.what());
  }
  if (!j.contains("family"))
    throw Error(ErrorCode::kInvalidArgument, "kernel spec missing 'family'");
  const std::string family = j["family"].get<std::string>();
  try {
    if (family == "linear") return Linear();
    if (family == "polynomial" || family == "poly")
      return Polynomial(j.at("a").get<double>(), j.at("b").get<double>(),
                        j.at("d").get<int>());
    if (family == "rbf") return Rbf(j.at("sigma").get<double>());
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidArgument,
                "kernel spec field error: " + std::string(e.what()));
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown kernel family '" + family + "'");
}

std::string KernelSpec::Describe() const {
  std::ostringstream os;
  switch (family) {
    case KernelFamily::kLinear:
      os << "linear";
      break;
    case KernelFamily::kPolynomial:
      os << "poly(a=" << poly_a << ",b=" << poly_b << ",d=" << poly_d << ")";
      break;
    case KernelFamily::kRbf:
      os << "rbf(sigma=" << rbf_sigma << ")";
      break;
  }
  return os.str();
}

double KernelEval(const KernelSpec &spec, const Vector &x, const Vector &y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::kDimensionMismatch,
                "kernel arguments differ in dimension: " +
                    std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()));
  switch (spec.family) {
    case KernelFamily::kLinear:
      return x.dot(y);
    case KernelFamily::kPolynomial:
      return IntPow(spec.poly_a * x.dot(y) + spec.poly_b, spec.poly_d);
    case KernelFamily::kRbf:
      return std::exp(-(x - y).squaredNorm() /
                      (spec.rbf_sigma * spec.rbf_sigma));
  }
  return 0.0;  // unreachable
}

Matrix GramMatrix(const KernelSpec &spec, const VerificationDataset &dataset) {
  spec.Validate();
  const Index num = dataset.NumSamples();
  if (num == 0)
    throw Error(ErrorCode::kInvalidArgument, "empty dataset for Gram matrix");
  Matrix gram(num, num);
  for (Index i = 0; i < num; ++i) {
    const Vector xi = dataset.samples.row(i);
    for (Index j = i; j < num; ++j) {
      const double value = KernelEval(spec, xi, dataset.samples.row(j));
      gram(i, j) = value;
      gram(j, i) = value;
    }
  }
  // Guard against floating-point asymmetry ahead of the eigendecomposition.
  gram = 0.5 * (gram + gram.transpose()).eval();
  return gram;
}

}  // namespace kmv

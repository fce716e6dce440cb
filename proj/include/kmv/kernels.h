// kmv/kernels.h

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

#ifndef KMV_KERNELS_H_
#define KMV_KERNELS_H_

#include <string>

#include "kmv/common.h"
#include "kmv/dataset.h"

namespace kmv {

enum class KernelFamily { kLinear, kPolynomial, kRbf };

// A kernel family with its parameters.  "linear" is shorthand for the
// polynomial kernel with a=1, b=0, d=1.
struct KernelSpec {
  KernelFamily family = KernelFamily::kLinear;
  double poly_a = 1.0;
  double poly_b = 0.0;
  int poly_d = 1;
  double rbf_sigma = 1.0;

  static KernelSpec Linear();
  static KernelSpec Polynomial(double a, double b, int d);
  static KernelSpec Rbf(double sigma);

  // Throws kInvalidArgument on out-of-range parameters (d < 1, sigma <= 0).
  void Validate() const;

  // {"family":"polynomial","a":0.0001,"b":1,"d":2} / {"family":"rbf","sigma":20}
  // / {"family":"linear"}.
  std::string ToJson() const;
  static KernelSpec FromJson(const std::string &json_text);

  // Compact display form, e.g. poly(a=0.0001,b=1,d=2).
  std::string Describe() const;
};

// Single kernel evaluation.  Polynomial: (a<x,y> + b)^d.  RBF:
// exp(-|x-y|^2 / sigma^2).  Throws kDimensionMismatch if x and y differ
// in length.
double KernelEval(const KernelSpec &spec, const Vector &x, const Vector &y);

// Gram matrix over the full sample set, training and evaluation and test
// rows together.  Symmetry is enforced by averaging the matrix with its
// transpose before returning.
Matrix GramMatrix(const KernelSpec &spec, const VerificationDataset &dataset);

}  // namespace kmv

#endif  // KMV_KERNELS_H_

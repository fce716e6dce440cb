// kmv/common.h

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

#ifndef KMV_COMMON_H_
#define KMV_COMMON_H_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kmv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ErrorCode {
  // validation / usage (CLI exit 2)
  kDimensionMismatch,
  kUnknownIdentity,
  kMissingRole,
  kInsufficientTrainingSamples,
  kInvalidProtocol,
  kPixelOutOfRange,
  kLengthMismatch,
  kInvalidArgument,
  kFileNotFound,
  kEmptyRoleSet,
  kNoImpostorClaims,
  kEmptyScoreList,
  kIndexOutOfRange,
  kUnknownClient,
  // runtime / numerical (CLI exit 1)
  kIoError,
  kNotSymmetric,
  kNoPositiveEigenvalue,
  kDegenerateStationaryPoint,
  kDegenerateWithinScatter,
  kDegenerateBetweenScatter,
  kSingularPopulationScatter,
};

const char *ErrorCodeName(ErrorCode code);

// Every failure in the library is reported as an Error carrying a stable
// code; the CLI maps validation codes to exit 2 and numerical ones to exit 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  bool IsValidation() const { return code_ < ErrorCode::kIoError; }

 private:
  ErrorCode code_;
};

}  // namespace kmv

#endif  // KMV_COMMON_H_

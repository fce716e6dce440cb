// src/common.cc

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

#include "kmv/common.h"

namespace kmv {

const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kUnknownIdentity: return "UnknownIdentity";
    case ErrorCode::kMissingRole: return "MissingRole";
    case ErrorCode::kInsufficientTrainingSamples:
      return "InsufficientTrainingSamples";
    case ErrorCode::kInvalidProtocol: return "InvalidProtocol";
    case ErrorCode::kPixelOutOfRange: return "PixelOutOfRange";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kEmptyRoleSet: return "EmptyRoleSet";
    case ErrorCode::kNoImpostorClaims: return "NoImpostorClaims";
    case ErrorCode::kEmptyScoreList: return "EmptyScoreList";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kUnknownClient: return "UnknownClient";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kNotSymmetric: return "NotSymmetric";
    case ErrorCode::kNoPositiveEigenvalue: return "NoPositiveEigenvalue";
    case ErrorCode::kDegenerateStationaryPoint:
      return "DegenerateStationaryPoint";
    case ErrorCode::kDegenerateWithinScatter: return "DegenerateWithinScatter";
    case ErrorCode::kDegenerateBetweenScatter:
      return "DegenerateBetweenScatter";
    case ErrorCode::kSingularPopulationScatter:
      return "SingularPopulationScatter";
  }
  return "Unknown";
}

}  // namespace kmv

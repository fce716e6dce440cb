// kmv/evaluation.h

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

#ifndef KMV_EVALUATION_H_
#define KMV_EVALUATION_H_

#include <string>
#include <vector>

#include "kmv/cskda.h"
#include "kmv/common.h"
#include "kmv/dataset.h"
#include "kmv/kernel_learning.h"
#include "kmv/kernels.h"

namespace kmv {

struct Claim {
  Index sample_index = 0;
  std::string claimed_client;
  bool genuine = false;
};

// Claims for one role: every client sample claims its own identity, and
// every impostor sample attacks every client.  Throws kEmptyRoleSet when no
// sample has the role and kNoImpostorClaims when impostors produce none.
std::vector<Claim> ClaimSet(const VerificationDataset &dataset, Role role);

struct ThresholdPoint {
  double threshold = 0;
  double far = 0;  // percent
  double frr = 0;  // percent
};

struct Calibration {
  double threshold = 0;
  double far = 0;
  double frr = 0;
  std::vector<ThresholdPoint> sweep;  // full candidate sweep, ascending
};

// Sweeps candidate thresholds at every distinct score plus the midpoints
// between consecutive distinct scores and returns the one minimizing
// |FAR - FRR|, ties broken by lower FAR + FRR, then by larger threshold
// (mid-band on separable scores instead of flush against them).
Calibration CalibrateEer(const std::vector<double> &genuine_scores,
                         const std::vector<double> &impostor_scores,
                         ClassificationMode mode);

// FAR/FRR (percent) of the given score lists at a fixed threshold.
ThresholdPoint RatesAtThreshold(const std::vector<double> &genuine_scores,
                                const std::vector<double> &impostor_scores,
                                ClassificationMode mode, double threshold);

struct MuSummary {
  Index p = 0;
  double beta = 0;
  double min = 0;
  double max = 0;
  double norm = 0;
  double ratio_trace = 0;
  int iterations = 0;
};

struct VerificationReport {
  ClassificationMode mode = ClassificationMode::kClientModel;
  double threshold = 0;  // calibrated on the evaluation set, then frozen
  double eval_far = 0;
  double eval_frr = 0;
  double test_far = 0;
  double test_frr = 0;
  double test_ter = 0;  // test_far + test_frr, exactly
  KernelSpec kernel;
  LearnOptions learn;
  bool baseline = false;
  double alpha = 0;
  MuSummary mu_summary;
  std::vector<ThresholdPoint> roc;  // evaluation-set sweep (CSV only)

  std::string ToJson() const;  // roc omitted; everything else full precision
};

// Scores all evaluation claims, calibrates the EER threshold, freezes it,
// then scores all test claims.  Rates are stored full precision; rounding
// is presentation-only.
VerificationReport Evaluate(const ModelPack &pack,
                            const VerificationDataset &dataset,
                            ClassificationMode mode);

// Writes the reports as a JSON array; optionally writes the evaluation-set
// ROC sweep as `threshold,far,frr` CSV rows sorted ascending.  With more
// than one report the mode name is appended to the ROC file stem.
void EmitReport(const std::vector<VerificationReport> &reports,
                const std::string &out_path, const std::string &roc_path = "");

}  // namespace kmv

#endif  // KMV_EVALUATION_H_

// kmv/dataset.h

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

#ifndef KMV_DATASET_H_
#define KMV_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "kmv/common.h"

namespace kmv {

enum class Role { kTrain = 0, kEvaluation = 1, kTest = 2 };

const char *RoleName(Role role);

// Vector samples with identity labels and verification-protocol roles.
// Rows are arranged with the training block first, then evaluation rows,
// then test rows; within each block the original file (or generation)
// order is preserved and recorded in source_rows.  The whole structure is
// immutable after construction and safe to share across threads.
struct VerificationDataset {
  Matrix samples;                        // N x M, training block leading
  std::vector<std::string> identities;   // per row
  std::vector<Role> roles;               // per row
  std::vector<std::string> clients;      // client ids, canonical order
  std::vector<std::string> impostors;    // impostor ids
  std::vector<Index> source_rows;        // original row index per row

  Index NumSamples() const { return samples.rows(); }
  Index Dim() const { return samples.cols(); }
  Index TrainCount() const;
  Index EvaluationCount() const;
  Index TestCount() const;

  bool IsClient(const std::string &identity) const;
  // Position of identity in clients, or -1.
  int ClientIndex(const std::string &identity) const;

  // Class index (into clients) per training row.  Training rows always
  // belong to clients.
  std::vector<int> TrainingClasses() const;

  // Checks every dataset invariant: roles complete, train rows client-only,
  // every client with at least 2 training rows, disjoint id sets, and the
  // training-block-first arrangement.  Throws on violation.
  void Validate() const;
};

// Declarative protocol: which identities are clients/impostors and the
// positional role list over each identity's rows in file order.
struct ProtocolConfig {
  std::vector<std::string> clients;
  std::vector<std::string> impostors;
  // identity -> roles of that identity's rows, positional in file order
  std::vector<std::pair<std::string, std::vector<Role>>> roles;

  std::string ToJson() const;
  static ProtocolConfig FromJson(const std::string &json_text);
};

// Loads a samples CSV (header f0,...,f{M-1},identity) plus a protocol JSON
// and returns a validated dataset with the training block first.
VerificationDataset LoadDataset(const std::string &samples_path,
                                const std::string &protocol_path);

// Writes the dataset back out in the same two-file format, in source-row
// order, so that LoadDataset(WriteDataset(d)) == d.
void WriteDataset(const VerificationDataset &dataset,
                  const std::string &samples_path,
                  const std::string &protocol_path);

// Standard cumulative-histogram intensity remap for a width x height image
// given as a flat vector of integer-valued intensities in [0, 255]:
//   out = round(255 * (cdf(v) - cdf_min) / (W*H - cdf_min))
// A constant image maps to all zeros (the denominator degenerates).
std::vector<double> HistogramEqualize(const std::vector<double> &image,
                                      Index width, Index height);

enum class Warp { kNone, kQuadraticLift, kRadial };

Warp WarpFromName(const std::string &name);
const char *WarpName(Warp warp);

// Desk-scale synthetic verification protocol.  Clients are unit-spread
// Gaussian clusters whose means are rejection-sampled to lie at pairwise
// distance >= separation; impostor identities are clustered near the client
// centroid (attacks resemble the population, not novel far-away identities)
// and receive only evaluation/test roles.  The optional warp passes every
// sample through a fixed nonlinearity:
//   quadratic-lift: each sample's sign is flipped with probability 1/2,
//     so classes become antipodal pairs that no linear discriminant can
//     separate while an even (b=0, d=2) polynomial kernel can;
//   radial: identities become concentric shells, separable through the
//     squared-norm feature of a quadratic kernel but not linearly.
// Generation is a pure function of the arguments; a fixed seed reproduces
// the dataset bit for bit.
VerificationDataset GenerateSyntheticProtocol(int num_clients,
                                              int num_impostors,
                                              int samples_per_identity,
                                              Index dim, double separation,
                                              Warp warp, std::uint64_t seed);

}  // namespace kmv

#endif  // KMV_DATASET_H_

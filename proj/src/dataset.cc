// src/dataset.cc

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

#include "kmv/dataset.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace kmv {

namespace {

constexpr double kTau = 6.283185307179586;

std::vector<std::string> SplitCsvLine(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double ParseReal(const std::string &token, Index line_number) {
  double value = 0;
  const char *begin = token.data();
  const char *end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw Error(ErrorCode::kInvalidArgument,
                "line " + std::to_string(line_number) +
                    ": cannot parse real value '" + token + "'");
  return value;
}

std::string FormatReal(double value) {
  std::array<char, 32> buffer;
  auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(),
                                 value);
  return std::string(buffer.data(), ptr);
}

Role RoleFromName(const std::string &name) {
  if (name == "train") return Role::kTrain;
  if (name == "evaluation" || name == "eval") return Role::kEvaluation;
  if (name == "test") return Role::kTest;
  throw Error(ErrorCode::kInvalidProtocol, "unknown role '" + name + "'");
}

// Deterministic Gaussian draws; std::normal_distribution is not pinned down
// by the standard, so generation would not reproduce bit-for-bit across
// library implementations.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double Uniform() {  // [0, 1)
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

  double Gaussian() {  // Box-Muller, one value per pair of uniforms
    const double u1 = 1.0 - Uniform();  // (0, 1]
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTau * u2);
  }

  Vector GaussianVector(Index dim) {
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v[i] = Gaussian();
    return v;
  }

  Vector UnitVector(Index dim) {
    while (true) {
      Vector v = GaussianVector(dim);
      const double norm = v.norm();
      if (norm > 1e-12) return v / norm;
    }
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

const char *RoleName(Role role) {
  switch (role) {
    case Role::kTrain: return "train";
    case Role::kEvaluation: return "evaluation";
    case Role::kTest: return "test";
  }
  return "?";
}

Index VerificationDataset::TrainCount() const {
  return std::count(roles.begin(), roles.end(), Role::kTrain);
}

Index VerificationDataset::EvaluationCount() const {
  return std::count(roles.begin(), roles.end(), Role::kEvaluation);
}

Index VerificationDataset::TestCount() const {
  return std::count(roles.begin(), roles.end(), Role::kTest);
}

bool VerificationDataset::IsClient(const std::string &identity) const {
  return ClientIndex(identity) >= 0;
}

int VerificationDataset::ClientIndex(const std::string &identity) const {
  for (size_t i = 0; i < clients.size(); ++i)
    if (clients[i] == identity) return static_cast<int>(i);
  return -1;
}

std::vector<int> VerificationDataset::TrainingClasses() const {
  const Index n = TrainCount();
  std::vector<int> classes(n);
  for (Index i = 0; i < n; ++i) {
    const int index = ClientIndex(identities[i]);
    if (index < 0)
      throw Error(ErrorCode::kInvalidProtocol,
                  "training row with non-client identity '" + identities[i] +
                      "'");
    classes[i] = index;
  }
  return classes;
}

void VerificationDataset::Validate() const {
  const Index num = NumSamples();
  if (num == 0)
    throw Error(ErrorCode::kInvalidArgument, "dataset has no samples");
  if (static_cast<Index>(identities.size()) != num ||
      static_cast<Index>(roles.size()) != num ||
      static_cast<Index>(source_rows.size()) != num)
    throw Error(ErrorCode::kInvalidArgument,
                "dataset per-row arrays inconsistent with sample count");
  if (clients.empty())
    throw Error(ErrorCode::kInvalidProtocol, "protocol declares no clients");

  std::unordered_set<std::string> client_set(clients.begin(), clients.end());
  std::unordered_set<std::string> impostor_set(impostors.begin(),
                                               impostors.end());
  for (const auto &id : impostors)
    if (client_set.count(id))
      throw Error(ErrorCode::kInvalidProtocol,
                  "identity '" + id + "' is both client and impostor");

  // Blocks must appear as train, evaluation, test.
  for (Index i = 1; i < num; ++i)
    if (static_cast<int>(roles[i]) < static_cast<int>(roles[i - 1]))
      throw Error(ErrorCode::kInvalidArgument,
                  "rows are not arranged train/evaluation/test");

  std::unordered_map<std::string, Index> train_rows;
  for (Index i = 0; i < num; ++i) {
    const std::string &id = identities[i];
    const bool is_client = client_set.count(id) > 0;
    if (!is_client && !impostor_set.count(id))
      throw Error(ErrorCode::kUnknownIdentity,
                  "identity '" + id + "' not declared in the protocol");
    if (roles[i] == Role::kTrain) {
      if (!is_client)
        throw Error(ErrorCode::kInvalidProtocol,
                    "impostor identity '" + id + "' has a train role");
      ++train_rows[id];
    }
  }
  for (const auto &id : clients) {
    auto it = train_rows.find(id);
    if (it == train_rows.end() || it->second < 2)
      throw Error(ErrorCode::kInsufficientTrainingSamples,
                  "client '" + id + "' has fewer than 2 training rows");
  }
}

std::string ProtocolConfig::ToJson() const {
  nlohmann::json j;
  j["clients"] = clients;
  j["impostors"] = impostors;
  nlohmann::json roles_json = nlohmann::json::object();
  for (const auto &[identity, role_list] : roles) {
    nlohmann::json list = nlohmann::json::array();
    for (Role role : role_list) list.push_back(RoleName(role));
    roles_json[identity] = list;
  }
  j["roles"] = roles_json;
  return j.dump(2);
}

ProtocolConfig ProtocolConfig::FromJson(const std::string &json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidProtocol,
                std::string("protocol is not valid JSON: ") + e.what());
  }
  ProtocolConfig config;
  try {
    config.clients = j.at("clients").get<std::vector<std::string>>();
    if (j.contains("impostors"))
      config.impostors = j.at("impostors").get<std::vector<std::string>>();
    for (const auto &[identity, list] : j.at("roles").items()) {
      std::vector<Role> role_list;
      for (const auto &name : list)
        role_list.push_back(RoleFromName(name.get<std::string>()));
      config.roles.emplace_back(identity, std::move(role_list));
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidProtocol,
                "protocol field error: " + std::string(e.what()));
  }
  return config;
}

namespace {

// Stable partition of file-order rows into the train/evaluation/test block
// arrangement the learning stages expect, keeping the original row index.
VerificationDataset ArrangeByRole(const Matrix &samples,
                                  const std::vector<std::string> &identities,
                                  const std::vector<Role> &roles,
                                  std::vector<std::string> clients,
                                  std::vector<std::string> impostors) {
  const Index num = samples.rows();
  std::vector<Index> order;
  order.reserve(num);
  for (Role block : {Role::kTrain, Role::kEvaluation, Role::kTest})
    for (Index i = 0; i < num; ++i)
      if (roles[i] == block) order.push_back(i);

  VerificationDataset dataset;
  dataset.samples.resize(num, samples.cols());
  dataset.identities.resize(num);
  dataset.roles.resize(num);
  dataset.source_rows.resize(num);
  for (Index i = 0; i < num; ++i) {
    const Index src = order[i];
    dataset.samples.row(i) = samples.row(src);
    dataset.identities[i] = identities[src];
    dataset.roles[i] = roles[src];
    dataset.source_rows[i] = src;
  }
  dataset.clients = std::move(clients);
  dataset.impostors = std::move(impostors);
  dataset.Validate();
  return dataset;
}

}  // namespace

VerificationDataset LoadDataset(const std::string &samples_path,
                                const std::string &protocol_path) {
  std::ifstream samples_file(samples_path);
  if (!samples_file)
    throw Error(ErrorCode::kFileNotFound,
                "cannot open samples file '" + samples_path + "'");
  std::ifstream protocol_file(protocol_path);
  if (!protocol_file)
    throw Error(ErrorCode::kFileNotFound,
                "cannot open protocol file '" + protocol_path + "'");

  std::string header;
  if (!std::getline(samples_file, header))
    throw Error(ErrorCode::kInvalidArgument, "samples CSV is empty");
  const auto header_fields = SplitCsvLine(header);
  if (header_fields.size() < 2 || header_fields.back() != "identity")
    throw Error(ErrorCode::kInvalidArgument,
                "samples CSV header must end with an 'identity' column");
  const Index dim = static_cast<Index>(header_fields.size()) - 1;

  std::vector<std::vector<double>> rows;
  std::vector<std::string> identities;
  std::string line;
  Index line_number = 1;
  while (std::getline(samples_file, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto fields = SplitCsvLine(line);
    if (static_cast<Index>(fields.size()) != dim + 1)
      throw Error(ErrorCode::kDimensionMismatch,
                  "line " + std::to_string(line_number) + ": expected " +
                      std::to_string(dim) + " features, got " +
                      std::to_string(fields.size() - 1));
    std::vector<double> row(dim);
    for (Index d = 0; d < dim; ++d) row[d] = ParseReal(fields[d], line_number);
    rows.push_back(std::move(row));
    identities.push_back(fields.back());
  }
  if (rows.empty())
    throw Error(ErrorCode::kInvalidArgument, "samples CSV has no data rows");

  std::stringstream protocol_text;
  protocol_text << protocol_file.rdbuf();
  const ProtocolConfig protocol = ProtocolConfig::FromJson(protocol_text.str());

  std::unordered_set<std::string> declared(protocol.clients.begin(),
                                           protocol.clients.end());
  declared.insert(protocol.impostors.begin(), protocol.impostors.end());

  std::unordered_set<std::string> present(identities.begin(), identities.end());
  for (const auto &id : declared)
    if (!present.count(id))
      throw Error(ErrorCode::kUnknownIdentity,
                  "protocol identity '" + id + "' absent from samples");
  for (const auto &[id, unused] : protocol.roles)
    if (!declared.count(id))
      throw Error(ErrorCode::kUnknownIdentity,
                  "roles given for undeclared identity '" + id + "'");

  std::unordered_map<std::string, const std::vector<Role> *> role_lists;
  for (const auto &[id, list] : protocol.roles) role_lists[id] = &list;

  const Index num = static_cast<Index>(rows.size());
  Matrix samples(num, dim);
  std::vector<Role> roles(num);
  std::unordered_map<std::string, size_t> cursor;
  for (Index i = 0; i < num; ++i) {
    for (Index d = 0; d < dim; ++d) samples(i, d) = rows[i][d];
    const std::string &id = identities[i];
    auto it = role_lists.find(id);
    if (it == role_lists.end())
      throw Error(ErrorCode::kMissingRole,
                  "identity '" + id + "' has no role list");
    const size_t pos = cursor[id]++;
    if (pos >= it->second->size())
      throw Error(ErrorCode::kMissingRole,
                  "identity '" + id + "' has more rows than assigned roles");
    roles[i] = (*it->second)[pos];
  }
  for (const auto &[id, list] : protocol.roles)
    if (cursor[id] != list.size())
      throw Error(ErrorCode::kInvalidProtocol,
                  "identity '" + id + "' has fewer rows than assigned roles");

  return ArrangeByRole(samples, identities, roles, protocol.clients,
                       protocol.impostors);
}

void WriteDataset(const VerificationDataset &dataset,
                  const std::string &samples_path,
                  const std::string &protocol_path) {
  const Index num = dataset.NumSamples();
  const Index dim = dataset.Dim();

  // Recover file order from the recorded permutation.
  std::vector<Index> row_at_source(num);
  for (Index i = 0; i < num; ++i) row_at_source[dataset.source_rows[i]] = i;

  std::ofstream samples_file(samples_path);
  if (!samples_file)
    throw Error(ErrorCode::kIoError,
                "cannot write samples file '" + samples_path + "'");
  for (Index d = 0; d < dim; ++d) samples_file << "f" << d << ",";
  samples_file << "identity\n";
  for (Index src = 0; src < num; ++src) {
    const Index row = row_at_source[src];
    for (Index d = 0; d < dim; ++d)
      samples_file << FormatReal(dataset.samples(row, d)) << ",";
    samples_file << dataset.identities[row] << "\n";
  }
  if (!samples_file.good())
    throw Error(ErrorCode::kIoError, "write failed for '" + samples_path + "'");

  ProtocolConfig protocol;
  protocol.clients = dataset.clients;
  protocol.impostors = dataset.impostors;
  std::map<std::string, std::vector<Role>> roles_by_identity;
  for (Index src = 0; src < num; ++src) {
    const Index row = row_at_source[src];
    roles_by_identity[dataset.identities[row]].push_back(dataset.roles[row]);
  }
  for (auto &[identity, list] : roles_by_identity)
    protocol.roles.emplace_back(identity, std::move(list));

  std::ofstream protocol_file(protocol_path);
  if (!protocol_file)
    throw Error(ErrorCode::kIoError,
                "cannot write protocol file '" + protocol_path + "'");
  protocol_file << protocol.ToJson() << "\n";
  if (!protocol_file.good())
    throw Error(ErrorCode::kIoError,
                "write failed for '" + protocol_path + "'");
}

std::vector<double> HistogramEqualize(const std::vector<double> &image,
                                      Index width, Index height) {
  if (width <= 0 || height <= 0)
    throw Error(ErrorCode::kInvalidArgument,
                "image dimensions must be positive");
  const Index total = width * height;
  if (static_cast<Index>(image.size()) != total)
    throw Error(ErrorCode::kLengthMismatch,
                "image has " + std::to_string(image.size()) +
                    " pixels, expected " + std::to_string(total));

  std::array<Index, 256> histogram{};
  for (double value : image) {
    const double rounded = std::round(value);
    if (!(value >= 0.0) || !(value <= 255.0) ||
        std::abs(value - rounded) > 1e-9)
      throw Error(ErrorCode::kPixelOutOfRange,
                  "pixel value " + std::to_string(value) +
                      " is not an integer in [0, 255]");
    ++histogram[static_cast<int>(rounded)];
  }

  std::array<Index, 256> cdf{};
  Index running = 0;
  Index cdf_min = 0;
  for (int level = 0; level < 256; ++level) {
    running += histogram[level];
    cdf[level] = running;
    if (cdf_min == 0 && histogram[level] > 0) cdf_min = cdf[level];
  }

  std::vector<double> out(image.size());
  if (cdf_min == total) {
    // Constant image: the remap denominator degenerates; map to zero.
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  const double denom = static_cast<double>(total - cdf_min);
  for (size_t i = 0; i < image.size(); ++i) {
    const int level = static_cast<int>(std::round(image[i]));
    out[i] = static_cast<double>(
        std::lround(255.0 * static_cast<double>(cdf[level] - cdf_min) / denom));
  }
  return out;
}

Warp WarpFromName(const std::string &name) {
  if (name == "none") return Warp::kNone;
  if (name == "quadratic-lift") return Warp::kQuadraticLift;
  if (name == "radial") return Warp::kRadial;
  throw Error(ErrorCode::kInvalidArgument, "unknown warp '" + name + "'");
}

const char *WarpName(Warp warp) {
  switch (warp) {
    case Warp::kNone: return "none";
    case Warp::kQuadraticLift: return "quadratic-lift";
    case Warp::kRadial: return "radial";
  }
  return "?";
}

VerificationDataset GenerateSyntheticProtocol(int num_clients,
                                              int num_impostors,
                                              int samples_per_identity,
                                              Index dim, double separation,
                                              Warp warp, std::uint64_t seed) {
  if (num_clients < 2)
    throw Error(ErrorCode::kInvalidArgument, "need at least 2 clients");
  if (num_impostors < 0)
    throw Error(ErrorCode::kInvalidArgument, "impostor count cannot be negative");
  if (samples_per_identity < 4)
    throw Error(ErrorCode::kInvalidArgument,
                "need at least 4 samples per identity (2 train, 1 eval, 1 test)");
  if (dim < 1)
    throw Error(ErrorCode::kInvalidArgument, "dimension must be positive");
  if (!(separation > 0))
    throw Error(ErrorCode::kInvalidArgument, "separation must be positive");

  GaussianSource source(seed);
  const int per = samples_per_identity;
  const int num_identities = num_clients + num_impostors;

  // Client means share one shell of radius 2 * separation, with directions
  // re-drawn until every pair of means is at least `separation` apart.  One
  // shell keeps the mean magnitudes comparable (a single global decision
  // threshold then treats every client alike) and random directions keep
  // the means in general position, so the between-class rank is estimated
  // cleanly.  Impostor identities cluster near the client centroid: attacks
  // should resemble the enrolled population, not arbitrarily distant
  // outliers.
  std::vector<Vector> means(num_identities);
  std::vector<double> radii(num_identities);  // radial warp only
  if (warp == Warp::kRadial) {
    for (int t = 0; t < num_clients; ++t)
      radii[t] = separation * static_cast<double>(t + 1);
    const double mean_radius = separation * 0.5 *
                               static_cast<double>(num_clients + 1);
    for (int t = num_clients; t < num_identities; ++t)
      radii[t] = mean_radius + source.Gaussian();
  } else {
    const double radius = 2.0 * separation;
    for (int t = 0; t < num_clients; ++t) {
      for (int attempt = 0; attempt < 10000; ++attempt) {
        Vector candidate = radius * source.UnitVector(dim);
        double min_distance = std::numeric_limits<double>::infinity();
        for (int k = 0; k < t; ++k)
          min_distance = std::min(min_distance, (candidate - means[k]).norm());
        if (min_distance >= separation || attempt == 9999) {
          means[t] = std::move(candidate);
          break;
        }
      }
    }

    Vector centroid = Vector::Zero(dim);
    for (int t = 0; t < num_clients; ++t) centroid += means[t];
    centroid /= static_cast<double>(num_clients);
    for (int t = num_clients; t < num_identities; ++t) {
      for (int attempt = 0; attempt < 1000; ++attempt) {
        Vector candidate = centroid + source.GaussianVector(dim);
        double min_distance = std::numeric_limits<double>::infinity();
        for (int k = 0; k < num_clients; ++k)
          min_distance = std::min(min_distance, (candidate - means[k]).norm());
        if (min_distance >= 0.25 * separation || attempt == 999) {
          means[t] = std::move(candidate);
          break;
        }
      }
    }
  }

  // Identity-major sample layout; roles assigned positionally per identity.
  const Index total_rows = static_cast<Index>(num_identities) * per;
  Matrix samples(total_rows, dim);
  std::vector<std::string> identities(total_rows);
  std::vector<Role> roles(total_rows);
  std::vector<std::string> clients, impostors;

  Index row = 0;
  for (int t = 0; t < num_identities; ++t) {
    const bool is_client = t < num_clients;
    const std::string id = is_client ? "c" + std::to_string(t)
                                     : "i" + std::to_string(t - num_clients);
    if (is_client)
      clients.push_back(id);
    else
      impostors.push_back(id);

    int train_count = 0, eval_count = 0;
    if (is_client) {
      train_count = std::max(2, per / 2);
      eval_count = (per - train_count + 1) / 2;
    } else {
      eval_count = (per + 1) / 2;
    }

    for (int s = 0; s < per; ++s, ++row) {
      Vector sample;
      if (warp == Warp::kRadial) {
        const Vector direction = source.UnitVector(dim);
        sample = (radii[t] + source.Gaussian()) * direction;
      } else {
        sample = means[t] + source.GaussianVector(dim);
        if (warp == Warp::kQuadraticLift && source.Uniform() < 0.5)
          sample = -sample;
      }
      samples.row(row) = sample;
      identities[row] = id;
      roles[row] = s < train_count ? Role::kTrain
                   : s < train_count + eval_count ? Role::kEvaluation
                                                  : Role::kTest;
    }
  }

  return ArrangeByRole(samples, identities, roles, std::move(clients),
                       std::move(impostors));
}

}  // namespace kmv

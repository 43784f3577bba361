// Copyright 2026 The rpdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rpdp/datagen.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <utility>

#include "rpdp/csv_util.h"
#include "rpdp/errors.h"

namespace rpdp {
namespace {

std::vector<std::vector<double>> Centroids(int classes, int features,
                                           double separation,
                                           RngStream& stream) {
  // Orthonormal directions (Gram-Schmidt) scaled by separation / sqrt(2)
  // put every pair of centroids exactly `separation` apart. With more
  // classes than features the directions are only unit-norm.
  const double scale = separation / std::sqrt(2.0);
  std::vector<std::vector<double>> dirs;
  for (int k = 0; k < classes; ++k) {
    std::vector<double> v(static_cast<std::size_t>(features));
    for (double& x : v) x = stream.NextGaussian();
    if (k < features) {
      for (const auto& u : dirs) {
        const double dot =
            std::inner_product(v.begin(), v.end(), u.begin(), 0.0);
        for (int f = 0; f < features; ++f) v[f] -= dot * u[f];
      }
    }
    const double norm =
        std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (double& x : v) x /= norm;
    dirs.push_back(v);
  }
  for (auto& v : dirs) {
    for (double& x : v) x *= scale;
  }
  return dirs;
}

int ParseLabel(std::string_view field, const std::string& where) {
  double value = 0.0;
  if (!ParseDouble(field, value) || value < 0.0 || value != std::floor(value) ||
      value > 1e6) {
    throw DataError(where + ": label '" + std::string(field) +
                    "' is not a non-negative integer");
  }
  return static_cast<int>(value);
}

}  // namespace

std::size_t FederatedDataset::TotalRecords() const {
  std::size_t n = 0;
  for (const ClientShard& c : clients) n += c.size();
  return n;
}

void FederatedDataset::Validate() const {
  if (num_features <= 0) throw DataError("dataset has no features");
  if (num_classes < 2) throw DataError("dataset needs at least 2 classes");
  for (std::size_t i = 0; i < clients.size(); ++i) {
    const ClientShard& c = clients[i];
    const std::string who = "client " + std::to_string(i);
    if (c.features.size() !=
        c.size() * static_cast<std::size_t>(num_features)) {
      throw DataError(who + ": feature matrix does not match its label count");
    }
    for (int y : c.labels) {
      if (y < 0 || y >= num_classes)
        throw DataError(who + ": label out of range");
    }
    if (!c.budgets.empty()) {
      if (c.budgets.size() != c.size()) {
        throw DataError(who + ": budget count does not match record count");
      }
      for (double e : c.budgets) {
        if (!(e > 0.0)) throw DataError(who + ": budgets must be > 0");
      }
    }
    std::vector<int> seen(c.size(), 0);
    for (std::size_t j : c.train) {
      if (j >= c.size()) throw DataError(who + ": train index out of range");
      ++seen[j];
    }
    for (std::size_t j : c.test) {
      if (j >= c.size()) throw DataError(who + ": test index out of range");
      ++seen[j];
    }
    if (std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; })) {
      throw DataError(who + ": train/test split must be disjoint and covering");
    }
  }
}

ClientShard MakeShard(std::vector<double> features, std::vector<int> labels,
                      std::vector<double> budgets, int num_features,
                      RngStream& stream, double train_fraction) {
  const std::size_t n = labels.size();
  const auto d = static_cast<std::size_t>(num_features);
  if (features.size() != n * d) {
    throw DataError("feature matrix does not match label count");
  }
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw DataError("train fraction must lie in (0, 1]");
  }
  ClientShard shard;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  stream.Shuffle(order);
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(n)));
  shard.train.assign(order.begin(), order.begin() + static_cast<long>(n_train));
  shard.test.assign(order.begin() + static_cast<long>(n_train), order.end());
  std::sort(shard.train.begin(), shard.train.end());
  std::sort(shard.test.begin(), shard.test.end());

  shard.feature_mean.assign(d, 0.0);
  shard.feature_scale.assign(d, 1.0);
  const double n_fit = static_cast<double>(shard.train.size());
  for (std::size_t f = 0; f < d && !shard.train.empty(); ++f) {
    double mean = 0.0;
    for (std::size_t j : shard.train) mean += features[j * d + f];
    mean /= n_fit;
    double correction = 0.0, var = 0.0;
    for (std::size_t j : shard.train) {
      const double z = features[j * d + f] - mean;
      correction += z;
      var += z * z;
    }
    mean += correction / n_fit;
    var = var / n_fit - (correction / n_fit) * (correction / n_fit);
    if (var > 0.0) {
      shard.feature_mean[f] = mean;
      shard.feature_scale[f] = std::sqrt(var);
    } else {
      shard.constant_features.push_back(f);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t f = 0; f < d; ++f) {
      features[j * d + f] = (features[j * d + f] - shard.feature_mean[f]) /
                            shard.feature_scale[f];
    }
  }
  shard.features = std::move(features);
  shard.labels = std::move(labels);
  shard.budgets = std::move(budgets);
  return shard;
}

DataPool GeneratePool(std::size_t records, int features, int classes,
                      double separation, RngStream& stream) {
  if (records == 0 || features <= 0 || classes < 2) {
    throw DataError(
        "synthetic data needs records > 0, features > 0, classes >= 2");
  }
  if (!(separation >= 0.0)) throw DataError("separation must be >= 0");
  RngStream centroid_stream = stream.Derive({"centroids"});
  const auto centroids =
      Centroids(classes, features, separation, centroid_stream);
  DataPool pool;
  pool.num_features = features;
  pool.num_classes = classes;
  pool.labels.resize(records);
  pool.features.resize(records * static_cast<std::size_t>(features));
  RngStream record_stream = stream.Derive({"records"});
  for (std::size_t j = 0; j < records; ++j) {
    const int y = static_cast<int>(
        record_stream.NextBelow(static_cast<std::uint64_t>(classes)));
    pool.labels[j] = y;
    for (int f = 0; f < features; ++f) {
      pool.features[j * features + f] =
          centroids[y][f] + record_stream.NextGaussian();
    }
  }
  return pool;
}

FederatedDataset GenerateSynthetic(const SyntheticSpec& spec,
                                   RngStream& stream) {
  if (spec.clients <= 0 || spec.records_per_client <= 0) {
    throw DataError("synthetic data needs clients > 0 and records > 0");
  }
  FederatedDataset data;
  data.num_features = spec.features;
  data.num_classes = spec.classes;
  // Centroids are shared by all clients; records are drawn per client.
  RngStream centroid_stream = stream.Derive({"centroids"});
  if (spec.features <= 0 || spec.classes < 2) {
    throw DataError("synthetic data needs features > 0 and classes >= 2");
  }
  if (!(spec.separation >= 0.0)) throw DataError("separation must be >= 0");
  const auto centroids =
      Centroids(spec.classes, spec.features, spec.separation, centroid_stream);
  const auto d = static_cast<std::size_t>(spec.features);
  for (int i = 0; i < spec.clients; ++i) {
    RngStream client_stream = stream.Derive({"client", std::int64_t{i}});
    const auto n = static_cast<std::size_t>(spec.records_per_client);
    std::vector<int> labels(n);
    std::vector<double> features(n * d);
    for (std::size_t j = 0; j < n; ++j) {
      const int y = static_cast<int>(
          client_stream.NextBelow(static_cast<std::uint64_t>(spec.classes)));
      labels[j] = y;
      for (std::size_t f = 0; f < d; ++f) {
        features[j * d + f] = centroids[y][f] + client_stream.NextGaussian();
      }
    }
    RngStream split_stream = stream.Derive({"split", std::int64_t{i}});
    data.clients.push_back(MakeShard(std::move(features), std::move(labels), {},
                                     spec.features, split_stream,
                                     spec.train_fraction));
  }
  return data;
}

FederatedDataset LoadCsv(std::span<const std::string> paths,
                         const std::string& label_column,
                         std::uint64_t split_seed, double train_fraction) {
  if (paths.empty()) throw DataError("no CSV files given");
  FederatedDataset data;
  std::vector<std::string> feature_names;
  int max_label = -1;
  struct Raw {
    std::vector<double> features;
    std::vector<int> labels;
    std::vector<double> budgets;
  };
  std::vector<Raw> raws;

  for (const std::string& path : paths) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
      ++line_no;
      if (!Trim(line).empty()) {
        header = SplitCsvLine(line);
        break;
      }
    }
    if (header.empty()) throw DataError(path + ": file is empty");

    int label_idx = -1, eps_idx = -1;
    std::vector<std::string> names;
    std::vector<int> feature_idx;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == label_column) {
        label_idx = static_cast<int>(c);
      } else if (header[c] == "epsilon") {
        eps_idx = static_cast<int>(c);
      } else {
        names.push_back(header[c]);
        feature_idx.push_back(static_cast<int>(c));
      }
    }
    if (label_idx < 0) {
      throw DataError(path + ": missing label column '" + label_column + "'");
    }
    if (names.empty()) throw DataError(path + ": no feature columns");
    if (feature_names.empty()) {
      feature_names = names;
    } else if (names != feature_names) {
      throw DataError(path + ": feature columns differ from " + paths[0]);
    }

    Raw raw;
    while (std::getline(in, line)) {
      ++line_no;
      if (Trim(line).empty()) continue;
      const std::string where = path + ":" + std::to_string(line_no);
      const std::vector<std::string> fields = SplitCsvLine(line);
      if (fields.size() != header.size()) {
        throw DataError(where + ": expected " + std::to_string(header.size()) +
                        " fields, got " + std::to_string(fields.size()));
      }
      const int y = ParseLabel(fields[label_idx], where);
      max_label = std::max(max_label, y);
      raw.labels.push_back(y);
      for (std::size_t k = 0; k < feature_idx.size(); ++k) {
        double v = 0.0;
        if (!ParseDouble(fields[feature_idx[k]], v) || !std::isfinite(v)) {
          throw DataError(where + ": non-numeric value '" +
                          fields[feature_idx[k]] + "' in column '" + names[k] +
                          "'");
        }
        raw.features.push_back(v);
      }
      if (eps_idx >= 0) {
        double e = 0.0;
        if (!ParseDouble(fields[eps_idx], e) || !(e > 0.0)) {
          throw DataError(where + ": epsilon must be a positive number");
        }
        raw.budgets.push_back(e);
      }
    }
    if (raw.labels.empty()) throw DataError(path + ": no data rows");
    raws.push_back(std::move(raw));
  }

  data.num_features = static_cast<int>(feature_names.size());
  data.num_classes = std::max(2, max_label + 1);
  for (std::size_t i = 0; i < raws.size(); ++i) {
    RngStream split =
        DeriveStream(split_seed, {"csv-split", static_cast<std::int64_t>(i)});
    ClientShard shard = MakeShard(
        std::move(raws[i].features), std::move(raws[i].labels),
        std::move(raws[i].budgets), data.num_features, split, train_fraction);
    for (std::size_t f : shard.constant_features) {
      std::cerr << "warning: " << paths[i] << ": feature '" << feature_names[f]
                << "' is constant on the train split; left unscaled\n";
    }
    data.clients.push_back(std::move(shard));
  }
  data.Validate();
  return data;
}

std::vector<std::vector<std::size_t>> PartitionIndices(
    std::span<const int> labels, int n_clients, PartitionMode mode,
    RngStream& stream) {
  if (n_clients < 1) throw DataError("need at least one client");
  const std::size_t n = labels.size();
  const auto m = static_cast<std::size_t>(n_clients);
  if (n < 2 * m) {
    throw DataError("pool of " + std::to_string(n) +
                    " records is too small for " + std::to_string(m) +
                    " clients");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  stream.Shuffle(order);

  std::vector<std::vector<std::size_t>> shards(m);
  if (mode == PartitionMode::kIid) {
    for (std::size_t i = 0, start = 0; i < m; ++i) {
      const std::size_t len = n / m + (i < n % m ? 1 : 0);
      shards[i].assign(order.begin() + static_cast<long>(start),
                       order.begin() + static_cast<long>(start + len));
      start += len;
    }
  } else {
    std::stable_sort(
        order.begin(), order.end(),
        [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
    const std::size_t pieces = 2 * m;
    std::vector<std::size_t> piece_ids(pieces);
    std::iota(piece_ids.begin(), piece_ids.end(), std::size_t{0});
    stream.Shuffle(piece_ids);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < 2; ++k) {
        const std::size_t p = piece_ids[2 * i + k];
        const std::size_t start = p * n / pieces;
        const std::size_t end = (p + 1) * n / pieces;
        shards[i].insert(shards[i].end(),
                         order.begin() + static_cast<long>(start),
                         order.begin() + static_cast<long>(end));
      }
    }
  }
  for (auto& s : shards) std::sort(s.begin(), s.end());
  return shards;
}

FederatedDataset Partition(const DataPool& pool, int n_clients,
                           PartitionMode mode, RngStream& stream,
                           double train_fraction) {
  RngStream index_stream = stream.Derive({"partition"});
  const auto shards =
      PartitionIndices(pool.labels, n_clients, mode, index_stream);
  const auto d = static_cast<std::size_t>(pool.num_features);
  FederatedDataset data;
  data.num_features = pool.num_features;
  data.num_classes = pool.num_classes;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    std::vector<double> features;
    std::vector<int> labels;
    std::vector<double> budgets;
    features.reserve(shards[i].size() * d);
    for (std::size_t j : shards[i]) {
      features.insert(features.end(),
                      pool.features.begin() + static_cast<long>(j * d),
                      pool.features.begin() + static_cast<long>((j + 1) * d));
      labels.push_back(pool.labels[j]);
      if (!pool.budgets.empty()) budgets.push_back(pool.budgets[j]);
    }
    RngStream split = stream.Derive({"split", static_cast<std::int64_t>(i)});
    data.clients.push_back(MakeShard(std::move(features), std::move(labels),
                                     std::move(budgets), pool.num_features,
                                     split, train_fraction));
  }
  return data;
}

}  // namespace rpdp

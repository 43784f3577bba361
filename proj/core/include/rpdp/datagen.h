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

// Federated datasets: synthetic Gaussian clusters, CSV ingestion and
// IID / non-IID partitioning of a pooled dataset.

#ifndef RPDP_DATAGEN_H_
#define RPDP_DATAGEN_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rpdp/sampling.h"

namespace rpdp {

inline constexpr double kDefaultTrainFraction = 0.66;

// One client's records. Features are row-major and already z-scored with
// statistics of the train split.
struct ClientShard {
  std::vector<double> features;
  std::vector<int> labels;
  // Per-record privacy budgets; empty until assigned.
  std::vector<double> budgets;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  // Standardization applied to raw features: (x - mean) / scale.
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;
  // Zero-variance columns, passed through unscaled.
  std::vector<std::size_t> constant_features;

  std::size_t size() const { return labels.size(); }
  std::span<const double> Row(std::size_t i, int num_features) const {
    return std::span<const double>(features).subspan(
        i * static_cast<std::size_t>(num_features),
        static_cast<std::size_t>(num_features));
  }
};

struct FederatedDataset {
  int num_features = 0;
  int num_classes = 0;
  std::vector<ClientShard> clients;

  std::size_t TotalRecords() const;
  // Throws DataError on inconsistent shapes, overlapping or incomplete
  // splits, or non-positive budgets.
  void Validate() const;
};

// Records not yet assigned to clients.
struct DataPool {
  int num_features = 0;
  int num_classes = 0;
  std::vector<double> features;  // row-major
  std::vector<int> labels;
  std::vector<double> budgets;  // optional, per record

  std::size_t size() const { return labels.size(); }
};

// Splits rows into train/test and standardizes with train statistics.
// `features` holds raw values and is consumed.
ClientShard MakeShard(std::vector<double> features, std::vector<int> labels,
                      std::vector<double> budgets, int num_features,
                      RngStream& stream,
                      double train_fraction = kDefaultTrainFraction);

struct SyntheticSpec {
  int clients = 10;
  int records_per_client = 1000;
  int features = 10;
  int classes = 2;
  // Distance between class centroids in units of the per-feature noise
  // standard deviation.
  double separation = 2.0;
  double train_fraction = kDefaultTrainFraction;
};

// Isotropic unit-variance Gaussian clusters around mutually equidistant
// centroids; labels drawn uniformly. Deterministic under `stream`.
DataPool GeneratePool(std::size_t records, int features, int classes,
                      double separation, RngStream& stream);
FederatedDataset GenerateSynthetic(const SyntheticSpec& spec,
                                   RngStream& stream);

// One client per file. Every file needs a header row and the same columns;
// `label_column` holds non-negative integer labels and an optional
// `epsilon` column supplies budgets. Throws DataError with file and line.
FederatedDataset LoadCsv(std::span<const std::string> paths,
                         const std::string& label_column,
                         std::uint64_t split_seed = 0,
                         double train_fraction = kDefaultTrainFraction);

enum class PartitionMode { kIid, kNonIid };

// IID: uniform random split into near-equal shards. NonIID: sort by label,
// cut into 2 * n_clients contiguous shards and deal two to each client.
FederatedDataset Partition(const DataPool& pool, int n_clients,
                           PartitionMode mode, RngStream& stream,
                           double train_fraction = kDefaultTrainFraction);

// Raw index sets (into the pool) used by Partition, exposed for testing.
std::vector<std::vector<std::size_t>> PartitionIndices(
    std::span<const int> labels, int n_clients, PartitionMode mode,
    RngStream& stream);

}  // namespace rpdp

#endif  // RPDP_DATAGEN_H_

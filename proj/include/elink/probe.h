// Copyright 2026 The elink Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ELINK_PROBE_H_
#define ELINK_PROBE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "elink/base.h"
#include "elink/checkpoint.h"
#include "elink/embedding_table.h"
#include "elink/type_map.h"

namespace elink {

// Linear multi-label type classifier over frozen entity embeddings:
// p_j(e) = sigmoid(w_j . e + b), with b shared unless per_type_bias.
struct ProbeModel {
  std::vector<std::string> types;  // label order, sorted
  uint32_t dim = 0;
  bool per_type_bias = false;
  Vector w;  // |types| x dim, row-major
  Vector b;  // 1 or |types|

  // W = 0, b = 0.
  static ProbeModel Zeros(std::vector<std::string> types, uint32_t dim,
                          bool per_type_bias);

  double Logit(std::span<const float> x, size_t j) const;
  TypeSet Predict(std::span<const float> x, double threshold = 0.5) const;

  bool operator==(const ProbeModel &) const = default;
};

struct ProbeConfig {
  int epochs = 200;
  int patience = 6;  // stop after this many epochs without a better dev loss
  double lr = 1e-3;
  size_t batch = 32;
  uint64_t seed = 1;
  bool per_type_bias = false;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct ProbeSplit {
  std::vector<EntityId> train;
  std::vector<EntityId> dev;
  std::vector<EntityId> test;
};

// Seeded 80/10/10 split of the entities present in both the table and the
// label map.
ProbeSplit SplitEntities(const EmbeddingTable &table, const TypeMap &labels,
                         uint64_t seed);

// Sorted union of all label types.
std::vector<std::string> TypeVocabulary(const TypeMap &labels);

// Mean over entities of the summed per-type binary cross entropy.
double ProbeLoss(const ProbeModel &model, const EmbeddingTable &table,
                 const TypeMap &labels, const std::vector<EntityId> &ids);

struct ProbeTrainResult {
  ProbeModel model;          // parameters of the best dev epoch
  std::vector<double> dev_loss;
  int best_epoch = -1;       // -1 when no epoch ran
  double best_dev_loss = 0.0;
};

ProbeTrainResult ProbeTrain(const EmbeddingTable &table, const TypeMap &labels,
                            const ProbeSplit &split, const ProbeConfig &config);

struct ProbeMetrics {
  size_t entities = 0;
  double strict_accuracy = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  size_t tp = 0, fp = 0, fn = 0;
};

// Strict accuracy: exact set match. Micro F1: pooled over all (entity, type)
// decisions. Macro F1: harmonic mean of the per-entity precision (averaged
// over entities with a non-empty prediction) and recall (averaged over
// entities with non-empty labels).
ProbeMetrics ProbeEval(const ProbeModel &model, const EmbeddingTable &table,
                       const TypeMap &labels, const std::vector<EntityId> &ids,
                       double threshold = 0.5, int threads = 1);

// Metrics from explicit predicted and gold sets, aligned by index.
ProbeMetrics SetMetrics(const std::vector<TypeSet> &predicted,
                        const std::vector<TypeSet> &gold);

Checkpoint ProbeToCheckpoint(const ProbeModel &model);
ProbeModel ProbeFromCheckpoint(const Checkpoint &checkpoint);

}  // namespace elink

#endif  // ELINK_PROBE_H_

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

#ifndef ELINK_EMBEDDING_STORE_H_
#define ELINK_EMBEDDING_STORE_H_

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elink/base.h"
#include "elink/context_vectors.h"
#include "elink/embedding_table.h"

namespace elink {

// Default cap on anchor contexts pooled per entity.
inline constexpr size_t kDefaultMaxContexts = 100;

// Element-wise mean of equally sized vectors. The summation order is fixed by
// sorting the inputs lexicographically, so the result is bit-identical under
// any permutation of the inputs.
std::vector<float> AggregateVectors(
    const std::vector<std::span<const float>> &vectors);

// Mean of the context vectors of a single entity.
std::vector<float> AggregateEntity(const std::vector<ContextVector> &vectors);

// Cosine similarity computed in double precision. A zero-norm argument gives
// 0; `degenerate` (if given) is set in that case. Throws on size mismatch.
double Cosine(std::span<const float> a, std::span<const float> b,
              bool *degenerate = nullptr);

// Ordinals (positions within the entity's own context stream) of the contexts
// kept for `entity` when it has `count` contexts and at most `cap` are kept.
// The choice is a shuffle keyed by (seed, entity); the result is sorted in
// shuffle order.
std::vector<size_t> SampledOrdinals(uint64_t seed, std::string_view entity,
                                    size_t count, size_t cap);

// Streams context vectors and pools at most `cap` per entity. Memory is
// bounded by cap vectors per entity.
class EntityTableBuilder {
 public:
  EntityTableBuilder(size_t cap, uint64_t seed) : cap_(cap), seed_(seed) {}

  // Contexts for which the predicate returns true are dropped before
  // sampling (e.g. anchors from articles held out for evaluation).
  void set_exclude(std::function<bool(const ContextVector &)> exclude) {
    exclude_ = std::move(exclude);
  }

  void Add(ContextVector context);

  size_t contexts_seen() const { return seen_; }
  size_t contexts_excluded() const { return excluded_; }

  // One row per entity, ordered by entity id.
  EmbeddingTable Build() const;

 private:
  struct Slot {
    uint64_t key;
    size_t ordinal;
    std::vector<float> vec;
  };
  struct Entity {
    size_t count = 0;
    std::vector<Slot> heap;  // max-heap on (key, ordinal), size <= cap
  };

  size_t cap_;
  uint64_t seed_;
  uint32_t dim_ = 0;
  size_t seen_ = 0;
  size_t excluded_ = 0;
  std::function<bool(const ContextVector &)> exclude_;
  std::map<EntityId, Entity> entities_;
};

EmbeddingTable BuildEntityTable(const std::vector<ContextVector> &contexts,
                                size_t cap, uint64_t seed);

struct Neighbor {
  std::string id;
  double score = 0.0;
};

// Top-k entities by cosine to `query`, excluding the query row itself.
// Ordered by score descending, then id ascending.
std::vector<Neighbor> NearestEntities(const EmbeddingTable &table,
                                      std::string_view query, size_t k);

// Top-k stored contexts by cosine to `query`, keyed by source id.
std::vector<Neighbor> NearestContexts(std::span<const float> query,
                                      const std::vector<ContextVector> &store,
                                      size_t k);

}  // namespace elink

#endif  // ELINK_EMBEDDING_STORE_H_

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

#include "elink/embedding_store.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace elink {
namespace {

uint64_t SampleKey(uint64_t entity_seed, size_t ordinal) {
  return SplitMix64(entity_seed + 0x9e3779b97f4a7c15ULL * (ordinal + 1));
}

uint64_t EntitySeed(uint64_t seed, std::string_view entity) {
  return SplitMix64(seed ^ Fnv1a64(entity));
}

bool SlotLess(uint64_t ka, size_t oa, uint64_t kb, size_t ob) {
  return ka != kb ? ka < kb : oa < ob;
}

std::vector<Neighbor> TopK(std::vector<Neighbor> all, size_t k) {
  auto better = [](const Neighbor &a, const Neighbor &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  };
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + k, all.end(), better);
  all.resize(k);
  return all;
}

}  // namespace

std::vector<float> AggregateVectors(
    const std::vector<std::span<const float>> &vectors) {
  if (vectors.empty()) throw Error("cannot aggregate an empty context list");
  const size_t dim = vectors[0].size();
  for (const auto &v : vectors) {
    if (v.size() != dim) {
      throw Error("dimension mismatch: " + std::to_string(v.size()) + " vs " +
                  std::to_string(dim));
    }
  }
  std::vector<size_t> order(vectors.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::lexicographical_compare(vectors[a].begin(), vectors[a].end(),
                                        vectors[b].begin(), vectors[b].end());
  });
  std::vector<double> sum(dim, 0.0);
  for (size_t i : order) {
    for (size_t k = 0; k < dim; ++k) sum[k] += vectors[i][k];
  }
  std::vector<float> mean(dim);
  const double n = static_cast<double>(vectors.size());
  for (size_t k = 0; k < dim; ++k) mean[k] = static_cast<float>(sum[k] / n);
  return mean;
}

std::vector<float> AggregateEntity(const std::vector<ContextVector> &vectors) {
  std::vector<std::span<const float>> spans;
  spans.reserve(vectors.size());
  for (const ContextVector &cv : vectors) {
    if (!vectors.empty() && cv.entity != vectors[0].entity) {
      throw Error("AggregateEntity: mixed entities '" + vectors[0].entity +
                  "' and '" + cv.entity + "'");
    }
    spans.emplace_back(cv.vec);
  }
  return AggregateVectors(spans);
}

double Cosine(std::span<const float> a, std::span<const float> b,
              bool *degenerate) {
  if (a.size() != b.size()) {
    throw Error("cosine: dimension mismatch " + std::to_string(a.size()) +
                " vs " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (degenerate) *degenerate = (na == 0.0 || nb == 0.0);
  if (na == 0.0 || nb == 0.0) return 0.0;
  // sqrt of the product keeps cosine(v, v) exactly 1.
  double c = dot / std::sqrt(na * nb);
  return std::clamp(c, -1.0, 1.0);
}

std::vector<size_t> SampledOrdinals(uint64_t seed, std::string_view entity,
                                    size_t count, size_t cap) {
  const uint64_t es = EntitySeed(seed, entity);
  std::vector<std::pair<uint64_t, size_t>> keyed(count);
  for (size_t i = 0; i < count; ++i) keyed[i] = {SampleKey(es, i), i};
  std::sort(keyed.begin(), keyed.end());
  keyed.resize(std::min(count, cap));
  std::vector<size_t> out;
  for (const auto &[key, ordinal] : keyed) out.push_back(ordinal);
  return out;
}

void EntityTableBuilder::Add(ContextVector context) {
  ++seen_;
  if (exclude_ && exclude_(context)) {
    ++excluded_;
    return;
  }
  if (context.vec.empty()) throw Error("empty context vector");
  if (dim_ == 0) dim_ = static_cast<uint32_t>(context.vec.size());
  if (context.vec.size() != dim_) {
    throw Error("context for '" + context.entity + "' has dim " +
                std::to_string(context.vec.size()) + ", expected " +
                std::to_string(dim_));
  }
  if (cap_ == 0) throw Error("context cap must be positive");

  Entity &e = entities_[context.entity];
  const size_t ordinal = e.count++;
  const uint64_t key = SampleKey(EntitySeed(seed_, context.entity), ordinal);
  auto heap_less = [](const Slot &a, const Slot &b) {
    return SlotLess(a.key, a.ordinal, b.key, b.ordinal);
  };
  if (e.heap.size() < cap_) {
    e.heap.push_back({key, ordinal, std::move(context.vec)});
    std::push_heap(e.heap.begin(), e.heap.end(), heap_less);
  } else if (SlotLess(key, ordinal, e.heap.front().key,
                      e.heap.front().ordinal)) {
    std::pop_heap(e.heap.begin(), e.heap.end(), heap_less);
    e.heap.back() = {key, ordinal, std::move(context.vec)};
    std::push_heap(e.heap.begin(), e.heap.end(), heap_less);
  }
}

EmbeddingTable EntityTableBuilder::Build() const {
  if (entities_.empty()) throw Error("no context vectors to pool");
  std::vector<std::string> ids;
  std::vector<float> matrix;
  ids.reserve(entities_.size());
  matrix.reserve(entities_.size() * dim_);
  for (const auto &[id, e] : entities_) {
    std::vector<std::span<const float>> spans;
    for (const Slot &s : e.heap) spans.emplace_back(s.vec);
    std::vector<float> mean = AggregateVectors(spans);
    ids.push_back(id);
    matrix.insert(matrix.end(), mean.begin(), mean.end());
  }
  return EmbeddingTable(dim_, std::move(ids), std::move(matrix));
}

EmbeddingTable BuildEntityTable(const std::vector<ContextVector> &contexts,
                                size_t cap, uint64_t seed) {
  EntityTableBuilder builder(cap, seed);
  for (const ContextVector &cv : contexts) builder.Add(cv);
  return builder.Build();
}

std::vector<Neighbor> NearestEntities(const EmbeddingTable &table,
                                      std::string_view query, size_t k) {
  auto qi = table.Find(query);
  if (!qi) throw Error("unknown query entity '" + std::string(query) + "'");
  std::span<const float> q = table.row(*qi);
  std::vector<Neighbor> all;
  all.reserve(table.size());
  for (size_t i = 0; i < table.size(); ++i) {
    if (i == *qi) continue;
    all.push_back({table.ids()[i], Cosine(q, table.row(i))});
  }
  return TopK(std::move(all), k);
}

std::vector<Neighbor> NearestContexts(std::span<const float> query,
                                      const std::vector<ContextVector> &store,
                                      size_t k) {
  std::vector<Neighbor> all;
  all.reserve(store.size());
  for (const ContextVector &cv : store) {
    all.push_back({cv.source_id, Cosine(query, cv.vec)});
  }
  return TopK(std::move(all), k);
}

}  // namespace elink

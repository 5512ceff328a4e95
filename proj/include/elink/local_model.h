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

#ifndef ELINK_LOCAL_MODEL_H_
#define ELINK_LOCAL_MODEL_H_

#include <optional>
#include <span>
#include <vector>

#include "elink/base.h"
#include "elink/combiner.h"
#include "elink/context_vectors.h"
#include "elink/dataset.h"
#include "elink/embedding_table.h"
#include "elink/params.h"
#include "elink/type_map.h"

namespace elink {

// Hard attention over the long-range context words. Each word w is scored by
// u(w) = max_e x_e' A x_w over the candidates, the best `top_r` words are
// kept (ties resolved by position), and h(c) is their softmax(u)-weighted
// sum of word vectors.
struct AttentionResult {
  Vector h;                         // context representation
  std::vector<int> kept;            // indices into the word list
  std::vector<int> best_candidate;  // argmax candidate per kept word
  Vector scores;                    // u(w) per kept word
  Vector beta;                      // attention weight per kept word
  bool empty = true;                // no usable context word; h is zero
};

AttentionResult AttendContext(const std::vector<Vector> &words,
                              const std::vector<Vector> &entities,
                              std::span<const double> attention, int top_r);

// Adds dL/dA to `grad_attention` given dL/dh.
void AttendContextBackward(const AttentionResult &result,
                           const std::vector<Vector> &words,
                           const std::vector<Vector> &entities,
                           std::span<const double> dh,
                           std::span<double> grad_attention);

// Resolves the mention's words and candidates against the tables. Words
// missing from the word table are dropped; unknown candidates throw.
AttentionResult AttentionContextRepr(const Mention &mention,
                                     const EmbeddingTable &words,
                                     const EmbeddingTable &entities,
                                     std::span<const double> attention,
                                     int top_r);

// x_e' B h with B diagonal.
double PsiLong(std::span<const double> entity, std::span<const double> h,
               std::span<const double> bilinear);

// Cosine between each candidate's pooled embedding and the mention's
// masked-context vector. Candidates without a row score `floor`, counted in
// `floor_hits`. A mention without a context vector is an error.
Vector PsiSim(const Mention &mention, const EmbeddingTable &sim_table,
              const MentionVectors &mention_vectors, double floor,
              size_t *floor_hits = nullptr);

double CombineLocal(std::span<const double> features, const Combiner &f);

struct CandidateScore {
  EntityId entity;
  double psi_long = 0.0;
  std::optional<double> psi_sim;
  std::optional<double> jaccard;
  double log_prior = 0.0;
  double combined = 0.0;
};

// One row per candidate, in candidate order.
struct MentionScores {
  std::vector<CandidateScore> candidates;

  // First candidate with the maximal combined score.
  int Best() const;
};

// Tables a scorer reads. Only the ones the variant needs must be set.
struct Resources {
  const EmbeddingTable *words = nullptr;
  const EmbeddingTable *entities = nullptr;
  const EmbeddingTable *sim = nullptr;
  const MentionVectors *mention_vectors = nullptr;
  const TypeMap *types = nullptr;
};

// Local score of every candidate: f(psi_long, log p) for the baseline variant
// and f(psi_long, psi_sim, log p) for the similarity variant.
MentionScores ScoreMentionLocal(const Mention &mention,
                                const Resources &resources,
                                const ModelParams &params);

}  // namespace elink

#endif  // ELINK_LOCAL_MODEL_H_

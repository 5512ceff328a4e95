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

#include "elink/local_model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "elink/embedding_store.h"
#include "elink/features.h"
#include "elink/model.h"

namespace elink {
namespace {

double Bilinear(const Vector &x, std::span<const double> diag,
                const Vector &y) {
  double s = 0.0;
  for (size_t k = 0; k < x.size(); ++k) s += x[k] * diag[k] * y[k];
  return s;
}

Vector ToVector(std::span<const float> row) {
  return Vector(row.begin(), row.end());
}

}  // namespace

AttentionResult AttendContext(const std::vector<Vector> &words,
                              const std::vector<Vector> &entities,
                              std::span<const double> attention, int top_r) {
  if (entities.empty()) throw Error("attention needs at least one candidate");
  const size_t dim = attention.size();
  AttentionResult r;
  r.h.assign(dim, 0.0);
  if (words.empty()) return r;

  Vector u(words.size());
  std::vector<int> best(words.size());
  for (size_t w = 0; w < words.size(); ++w) {
    if (words[w].size() != dim) throw Error("word vector dimension mismatch");
    u[w] = -std::numeric_limits<double>::infinity();
    for (size_t e = 0; e < entities.size(); ++e) {
      if (entities[e].size() != dim) {
        throw Error("entity vector dimension mismatch");
      }
      const double s = Bilinear(entities[e], attention, words[w]);
      if (s > u[w]) {
        u[w] = s;
        best[w] = static_cast<int>(e);
      }
    }
  }
  std::vector<int> order(words.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return u[a] > u[b]; });
  order.resize(std::min<size_t>(order.size(), std::max(top_r, 1)));

  const double top = u[order[0]];
  double z = 0.0;
  for (int w : order) {
    r.kept.push_back(w);
    r.best_candidate.push_back(best[w]);
    r.scores.push_back(u[w]);
    r.beta.push_back(std::exp(u[w] - top));
    z += r.beta.back();
  }
  for (size_t j = 0; j < r.kept.size(); ++j) {
    r.beta[j] /= z;
    const Vector &x = words[r.kept[j]];
    for (size_t k = 0; k < dim; ++k) r.h[k] += r.beta[j] * x[k];
  }
  r.empty = false;
  return r;
}

void AttendContextBackward(const AttentionResult &result,
                           const std::vector<Vector> &words,
                           const std::vector<Vector> &entities,
                           std::span<const double> dh,
                           std::span<double> grad_attention) {
  if (result.empty) return;
  const size_t dim = grad_attention.size();
  double dh_h = 0.0;
  for (size_t k = 0; k < dim; ++k) dh_h += dh[k] * result.h[k];
  for (size_t j = 0; j < result.kept.size(); ++j) {
    const Vector &x = words[result.kept[j]];
    double dh_x = 0.0;
    for (size_t k = 0; k < dim; ++k) dh_x += dh[k] * x[k];
    // Softmax Jacobian: dh/du_j = beta_j (x_j - h).
    const double du = result.beta[j] * (dh_x - dh_h);
    const Vector &e = entities[result.best_candidate[j]];
    for (size_t k = 0; k < dim; ++k) grad_attention[k] += du * e[k] * x[k];
  }
}

AttentionResult AttentionContextRepr(const Mention &mention,
                                     const EmbeddingTable &words,
                                     const EmbeddingTable &entities,
                                     std::span<const double> attention,
                                     int top_r) {
  std::vector<Vector> word_vecs;
  for (const std::string &w : mention.long_ctx) {
    if (auto i = words.Find(w)) word_vecs.push_back(ToVector(words.row(*i)));
  }
  std::vector<Vector> entity_vecs;
  for (const Candidate &c : mention.candidates) {
    entity_vecs.push_back(ToVector(entities.Lookup(c.entity)));
  }
  return AttendContext(word_vecs, entity_vecs, attention, top_r);
}

double PsiLong(std::span<const double> entity, std::span<const double> h,
               std::span<const double> bilinear) {
  if (entity.size() != h.size() || h.size() != bilinear.size()) {
    throw Error("psi_long: dimension mismatch");
  }
  double s = 0.0;
  for (size_t k = 0; k < h.size(); ++k) s += entity[k] * bilinear[k] * h[k];
  return s;
}

Vector PsiSim(const Mention &mention, const EmbeddingTable &sim_table,
              const MentionVectors &mention_vectors, double floor,
              size_t *floor_hits) {
  auto ctx = mention_vectors.find(mention.id);
  if (ctx == mention_vectors.end()) {
    throw Error("no context vector for mention '" + mention.id + "'");
  }
  if (ctx->second.size() != sim_table.dim()) {
    throw Error("context vector of mention '" + mention.id + "' has dim " +
                std::to_string(ctx->second.size()) + ", table has " +
                std::to_string(sim_table.dim()));
  }
  Vector out;
  out.reserve(mention.candidates.size());
  for (const Candidate &c : mention.candidates) {
    auto row = sim_table.Find(c.entity);
    if (!row) {
      out.push_back(floor);
      if (floor_hits) ++*floor_hits;
      continue;
    }
    out.push_back(Cosine(sim_table.row(*row), ctx->second));
  }
  return out;
}

double CombineLocal(std::span<const double> features, const Combiner &f) {
  return f.Forward(features);
}

int MentionScores::Best() const {
  int best = -1;
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (best < 0 || candidates[i].combined > candidates[best].combined) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

MentionScores ScoreMentionLocal(const Mention &mention,
                                const Resources &resources,
                                const ModelParams &params) {
  ModelConfig cfg = params.config;
  if (cfg.variant == Variant::kTyped) {
    throw Error("ScoreMentionLocal handles the baseline and similarity "
                "variants; use ScoreMentionTyped");
  }
  DocumentFeatures doc;
  doc.mentions.push_back(BuildMentionFeatures(mention, resources, cfg));
  ModelParams local = params;
  local.config.inference = Inference::kLocal;
  DocumentPass pass(local, doc);
  const MentionFeatures &m = doc.mentions[0];
  const MentionPass &p = pass.mentions()[0];
  MentionScores out;
  for (size_t e = 0; e < m.candidates.size(); ++e) {
    CandidateScore s;
    s.entity = m.candidates[e];
    s.psi_long = p.psi_long[e];
    if (!m.extra.empty()) s.psi_sim = m.extra[e];
    s.log_prior = m.log_prior[e];
    s.combined = p.local[e];
    out.candidates.push_back(std::move(s));
  }
  return out;
}

}  // namespace elink

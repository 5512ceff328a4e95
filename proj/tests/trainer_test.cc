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

#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "elink/features.h"
#include "elink/model.h"
#include "elink/trainer.h"
#include "support/synthetic.h"

namespace elink {
namespace {

using testing::RandomDocument;
using testing::RandomParams;
using testing::RandomVector;

uint64_t TableChecksum(const EmbeddingTable &t) {
  uint64_t h = Fnv1a64("");
  for (size_t i = 0; i < t.size(); ++i) {
    auto row = t.row(i);
    h = Fnv1a64(std::string_view(reinterpret_cast<const char *>(row.data()),
                                 row.size() * sizeof(float)), h);
    h = Fnv1a64(t.ids()[i], h);
  }
  return h;
}

TEST_CASE("margin loss: examples") {
  CHECK(MarginLoss(Vector{1.0, 0.5}, 0, 0.01) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(MarginLoss(Vector{0.5, 0.5}, 0, 0.01) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(MarginLoss(Vector{3.0}, 0, 0.01) == 0.01);
  Vector g(3);
  // Hinge active for the second candidate only.
  MarginLoss(Vector{1.0, 0.995, 0.2}, 0, 0.01, g);
  CHECK(g == Vector{-1, 1, 0});
  CHECK_THROWS_AS(MarginLoss(Vector{1.0}, 1, 0.01), Error);
  CHECK_THROWS_AS(MarginLoss(Vector{1.0}, -1, 0.01), Error);
}

TEST_CASE("margin loss: lower bound, equality and shift invariance (property)") {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 1000; ++t) {
    const size_t l = 1 + rng() % 8;
    Vector s = RandomVector(rng, l, 1.0);
    const int gold = static_cast<int>(rng() % l);
    const double gamma = 0.01 + 0.2 * (rng() % 5);
    const double loss = MarginLoss(s, gold, gamma);
    CHECK(loss >= gamma);
    bool separated = true;
    for (size_t e = 0; e < l; ++e) {
      if (static_cast<int>(e) != gold && s[gold] - s[e] < gamma) separated = false;
    }
    if (separated) {
      CHECK(loss == doctest::Approx(gamma).epsilon(1e-12));
    } else {
      CHECK(loss > gamma);
    }
    const double c = RandomVector(rng, 1, 10.0)[0];
    Vector shifted = s;
    for (double &v : shifted) v += c;
    CHECK(MarginLoss(shifted, gold, gamma) == doctest::Approx(loss).epsilon(1e-12));
  }
}

TEST_CASE("l2 penalty: examples, homogeneity, active blocks only") {
  CHECK(L2Penalty(Vector{0, 0, 0}, 0.5) == 0.0);
  CHECK(L2Penalty(Vector{1, 2}, 0.5) == 2.5);
  std::mt19937_64 rng(52);
  for (int t = 0; t < 100; ++t) {
    Vector a = RandomVector(rng, 10, 1.0), a2 = a;
    for (double &v : a2) v *= 2;
    CHECK(L2Penalty(a2, 0.3) == doctest::Approx(4 * L2Penalty(a, 0.3)).epsilon(1e-14));
  }

  for (Inference inf : {Inference::kLocal, Inference::kGlobal}) {
    ModelConfig cfg;
    cfg.dim = 3;
    cfg.inference = inf;
    ModelParams p = RandomParams(cfg, rng);
    double want = 0;
    auto sum = [&](const Combiner &c) {
      for (const Vector *v : {&c.w1, &c.b1, &c.w2, &c.b2}) {
        for (double x : *v) want += 0.1 * x * x;
      }
    };
    if (inf == Inference::kLocal) {
      sum(p.local);
    } else {
      sum(p.context);
      sum(p.final);
    }
    ModelParams grad = ModelParams::Zeros(cfg);
    CHECK(L2Penalty(p, 0.1, &grad) == doctest::Approx(want).epsilon(1e-12));
    // No gradient on the diagonals.
    for (double g : grad.attention) CHECK(g == 0.0);
    for (double g : grad.bilinear) CHECK(g == 0.0);
    for (double g : grad.pairwise) CHECK(g == 0.0);
    const Combiner &c = inf == Inference::kLocal ? p.local : p.context;
    const Combiner &gc = inf == Inference::kLocal ? grad.local : grad.context;
    for (size_t k = 0; k < c.w1.size(); ++k) CHECK(gc.w1[k] == 0.2 * c.w1[k]);
  }
}

// Gold dominates on psi_sim and prior; everything else is noise.
std::vector<DocumentFeatures> SeparableFixture(const ModelConfig &cfg,
                                               uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<DocumentFeatures> docs;
  for (int d = 0; d < 20; ++d) {
    DocumentFeatures doc = RandomDocument(rng, cfg, {4, 4, 6, false}, "d" + std::to_string(d));
    for (MentionFeatures &m : doc.mentions) {
      for (size_t e = 0; e < m.candidates.size(); ++e) {
        const bool gold = static_cast<int>(e) == m.gold;
        m.extra[e] = gold ? 1.0 : -0.5;
        m.prior[e] = gold ? 0.7 : 0.1;
        m.log_prior[e] = std::log(m.prior[e]);
      }
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

TEST_CASE("train: separable fixture converges to the gold-term floor") {
  ModelConfig cfg;
  cfg.dim = 6;
  auto docs = SeparableFixture(cfg, 53);
  TrainConfig tc;
  tc.epochs = 30;
  tc.lr = 1e-2;
  tc.gamma = 0.01;
  auto r = Train(docs, ModelParams::Initialize(cfg, 1), tc);
  const double floor = tc.gamma * static_cast<double>(r.trainable_mentions);
  CHECK(r.trainable_mentions == 80);
  CHECK(r.epoch_loss.back() == doctest::Approx(floor).epsilon(1e-6));
  for (size_t e = 2; e < r.epoch_loss.size(); ++e) {
    // Summation order changes with the shuffle.
    CHECK(r.epoch_loss[e] <= r.epoch_loss[e - 1] * (1 + 1e-12));
  }
  CHECK(Accuracy(r.params, docs) == 1.0);
}

TEST_CASE("train: same seed gives identical parameters") {
  for (Inference inf : {Inference::kLocal, Inference::kGlobal}) {
    ModelConfig cfg;
    cfg.dim = 5;
    cfg.inference = inf;
    std::mt19937_64 rng(54);
    std::vector<DocumentFeatures> docs;
    for (int d = 0; d < 10; ++d) docs.push_back(RandomDocument(rng, cfg, {}, "d" + std::to_string(d)));
    TrainConfig tc;
    tc.epochs = 3;
    tc.seed = 7;
    auto a = Train(docs, ModelParams::Initialize(cfg, 3), tc);
    auto b = Train(docs, ModelParams::Initialize(cfg, 3), tc);
    CHECK(a.params == b.params);
    CHECK(a.epoch_loss == b.epoch_loss);
    tc.seed = 8;
    auto c = Train(docs, ModelParams::Initialize(cfg, 3), tc);
    CHECK_FALSE(a.params == c.params);
  }
}

TEST_CASE("train: zero learning rate leaves parameters unchanged") {
  ModelConfig cfg;
  cfg.dim = 4;
  cfg.inference = Inference::kGlobal;
  std::mt19937_64 rng(55);
  std::vector<DocumentFeatures> docs;
  for (int d = 0; d < 5; ++d) docs.push_back(RandomDocument(rng, cfg, {}, "d" + std::to_string(d)));
  ModelParams init = RandomParams(cfg, rng);
  TrainConfig tc;
  tc.lr = 0.0;
  tc.epochs = 4;
  CHECK(Train(docs, init, tc).params == init);
  tc.epochs = 0;
  CHECK(Train(docs, init, tc).params == init);
}

TEST_CASE("train: errors") {
  ModelConfig cfg;
  cfg.dim = 4;
  std::mt19937_64 rng(56);
  DocumentFeatures doc = RandomDocument(rng, cfg, {}, "d");
  for (auto &m : doc.mentions) m.gold = -1;
  CHECK_THROWS_WITH_AS(Train({doc}, ModelParams::Initialize(cfg, 1), TrainConfig{}),
                       doctest::Contains("trainable"), Error);
  TrainConfig bad;
  bad.gamma = 0.0;
  CHECK_THROWS_AS(bad.Validate(), Error);
  bad = TrainConfig{};
  bad.lambda = -1;
  CHECK_THROWS_AS(bad.Validate(), Error);

  DocumentFeatures huge = RandomDocument(rng, cfg, {2, 3, 4, false}, "h");
  huge.mentions[0].extra[0] = 1e308;
  ModelParams p = ModelParams::Initialize(cfg, 1);
  p.local.w1[1] = 1e10;
  p.local.w2[0] = 1e10;
  huge.mentions[0].gold = 1;
  CHECK_THROWS_WITH_AS(Train({huge}, p, TrainConfig{}), doctest::Contains("non-finite"), Error);
}

TEST_CASE("train: embedding tables are never written") {
  auto corpus = testing::MakeLinkingCorpus(testing::FixtureContexts(), 5,
                                           {10, 2, 4, 3, 8, 100, 8});
  const uint64_t w = TableChecksum(corpus.words);
  const uint64_t e = TableChecksum(corpus.entities);
  const uint64_t s = TableChecksum(corpus.sim);
  ModelConfig cfg;
  cfg.dim = 8;
  auto feats = BuildFeatures(corpus.train, corpus.resources(), cfg);
  TrainConfig tc;
  tc.epochs = 2;
  Train(feats, ModelParams::Initialize(cfg, 1), tc);
  CHECK(TableChecksum(corpus.words) == w);
  CHECK(TableChecksum(corpus.entities) == e);
  CHECK(TableChecksum(corpus.sim) == s);
}

TEST_CASE("train: dev set keeps the best epoch") {
  ModelConfig cfg;
  cfg.dim = 6;
  auto docs = SeparableFixture(cfg, 57);
  auto dev = SeparableFixture(cfg, 58);
  TrainConfig tc;
  tc.epochs = 5;
  tc.lr = 1e-2;
  auto r = Train(docs, ModelParams::Initialize(cfg, 1), tc, &dev);
  REQUIRE(r.dev_accuracy.size() == 5);
  const double best = *std::max_element(r.dev_accuracy.begin(), r.dev_accuracy.end());
  CHECK(r.dev_accuracy[r.best_epoch] == best);
  CHECK(Accuracy(r.params, dev) == best);
}

TEST_CASE("adam: first step moves each coordinate by lr against the gradient") {
  ModelConfig cfg;
  cfg.dim = 3;
  ModelParams p = ModelParams::Initialize(cfg, 1);
  ModelParams g = ModelParams::Zeros(cfg);
  std::mt19937_64 rng(59);
  for (auto &b : g.Blocks()) {
    for (double &v : b.values) v = RandomVector(rng, 1, 1.0)[0];
  }
  TrainConfig tc;
  tc.lr = 0.1;
  AdamOptimizer opt(p, tc);
  ModelParams q = p;
  opt.Step(&q, g);
  auto pb = p.Blocks();
  auto qb = q.Blocks();
  auto gb = g.Blocks();
  for (size_t b = 0; b < pb.size(); ++b) {
    for (size_t k = 0; k < pb[b].values.size(); ++k) {
      if (!pb[b].active) {
        CHECK(qb[b].values[k] == pb[b].values[k]);
        continue;
      }
      // Bias-corrected: m_hat = g, v_hat = g^2.
      const double gv = gb[b].values[k];
      const double want = pb[b].values[k] - 0.1 * gv / (std::abs(gv) + 1e-8);
      CHECK(qb[b].values[k] == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("grad check: zero-parameter point") {
  for (Inference inf : {Inference::kLocal, Inference::kGlobal}) {
    ModelConfig cfg;
    cfg.dim = 4;
    cfg.inference = inf;
    std::mt19937_64 rng(60);
    std::vector<DocumentFeatures> docs{RandomDocument(rng, cfg, {3, 3, 5, false}, "d")};
    auto report = GradCheck(ModelParams::Zeros(cfg), docs, 0.01, 1e-7);
    CHECK(report.max_rel_error == 0.0);
  }
}

TEST_CASE("grad check: random fixtures in every mode") {
  struct Mode {
    Variant variant;
    Inference inference;
    GradientFlow flow;
  };
  const Mode modes[] = {
      {Variant::kBaseline, Inference::kLocal, GradientFlow::kStopGradient},
      {Variant::kWithSim, Inference::kLocal, GradientFlow::kStopGradient},
      {Variant::kTyped, Inference::kLocal, GradientFlow::kStopGradient},
      {Variant::kWithSim, Inference::kGlobal, GradientFlow::kStopGradient},
      {Variant::kBaseline, Inference::kGlobal, GradientFlow::kStopGradient},
      {Variant::kWithSim, Inference::kGlobal, GradientFlow::kUnrolled},
  };
  std::mt19937_64 rng(61);
  for (const Mode &mode : modes) {
    ModelConfig cfg;
    cfg.dim = 6;
    cfg.variant = mode.variant;
    cfg.inference = mode.inference;
    cfg.flow = mode.flow;
    int done = 0;
    while (done < 5) {
      ModelParams p = RandomParams(cfg, rng);
      std::vector<DocumentFeatures> docs{RandomDocument(rng, cfg, {3, 3, 6, true}, "d")};
      if (testing::KinkMargin(p, docs, 0.01) < 1e-3) continue;
      ++done;
      auto report = GradCheck(p, docs, 0.01, 1e-7);
      for (const auto &b : report.blocks) {
        INFO(b.name << " rel " << b.max_rel_error << " abs " << b.max_abs_error);
        CHECK(b.max_rel_error < 1e-4);
      }
      // Under stop-gradient C reaches the loss only through frozen
      // messages, so both gradients vanish.
      if (mode.inference == Inference::kGlobal && mode.flow == GradientFlow::kStopGradient) {
        for (const auto &b : report.blocks) {
          if (b.name == "pairwise") CHECK(b.max_abs_error == 0.0);
        }
      }
    }
  }
}

}  // namespace
}  // namespace elink

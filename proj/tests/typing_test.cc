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
#include <random>

#include "doctest.h"
#include "elink/features.h"
#include "elink/probe.h"
#include "elink/typing.h"
#include "support/synthetic.h"

namespace elink {
namespace {

TEST_CASE("jaccard: examples") {
  CHECK(JaccardSim({"a", "b"}, {"a", "b"}) == 1.0);
  CHECK(JaccardSim({"a"}, {"b"}) == 0.0);
  CHECK(JaccardSim({"a", "b"}, {"b", "c"}) == 1.0 / 3.0);
  CHECK(JaccardSim({}, {}) == 0.0);
  CHECK(JaccardSim({"a"}, {}) == 0.0);
}

TEST_CASE("jaccard: symmetric, bounded, one iff equal (property)") {
  std::mt19937_64 rng(71);
  const char *pool[] = {"PER", "LOC", "ORG", "MISC", "EVENT", "WORK"};
  auto draw = [&] {
    TypeSet s;
    for (const char *t : pool) {
      if (rng() % 3 == 0) s.insert(t);
    }
    return s;
  };
  for (int t = 0; t < 2000; ++t) {
    TypeSet a = draw(), b = draw();
    const double j = JaccardSim(a, b);
    CHECK(j == JaccardSim(b, a));
    CHECK(j >= 0.0);
    CHECK(j <= 1.0);
    CHECK((j == 1.0) == (a == b && !a.empty()));
    // Counting oracle.
    size_t inter = 0;
    for (const auto &x : a) inter += b.count(x);
    const size_t uni = a.size() + b.size() - inter;
    CHECK(j == (uni == 0 ? 0.0 : static_cast<double>(inter) / uni));
  }
}

struct TypedFixture {
  EmbeddingTable words{2, {"w"}, {1.0f, 0.5f}};
  EmbeddingTable ents{2, {"A", "B", "C"}, {1, 0, 0, 1, 1, 1}};
  TypeMap types{{"A", {"PER", "POLITICIAN"}}, {"B", {"PER"}}, {"C", {"LOC"}}};
  Mention mention;

  TypedFixture() {
    mention.id = "m";
    mention.long_ctx = {"w"};
    mention.candidates = {{"A", 0.2}, {"B", 0.5}, {"C", 0.3}};
    mention.gold = "A";
    mention.mention_types = std::vector<std::string>{"PER", "ATHLETE"};
  }
  Resources res() const {
    Resources r;
    r.words = &words;
    r.entities = &ents;
    r.types = &types;
    return r;
  }
};

TEST_CASE("mention types: oracle and predicted sources") {
  TypedFixture fx;
  CHECK(MentionTypes(fx.mention, fx.types, TypeSource::kOracle) == TypeSet{"PER", "POLITICIAN"});
  CHECK(MentionTypes(fx.mention, fx.types, TypeSource::kPredict) == TypeSet{"ATHLETE", "PER"});
  Mention bare = fx.mention;
  bare.gold.reset();
  bare.mention_types.reset();
  CHECK_THROWS_AS(MentionTypes(bare, fx.types, TypeSource::kOracle), Error);
  CHECK_THROWS_AS(MentionTypes(bare, fx.types, TypeSource::kPredict), Error);
}

TEST_CASE("type feature: hand-computed values and missing counter") {
  TypedFixture fx;
  CHECK(TypeFeature(fx.mention, fx.types, TypeSource::kOracle) == Vector{1.0, 0.5, 0.0});
  CHECK(TypeFeature(fx.mention, fx.types, TypeSource::kPredict) == Vector{1.0 / 3.0, 0.5, 0.0});
  fx.mention.candidates.push_back({"Z", 0.0});
  size_t missing = 0;
  auto f = TypeFeature(fx.mention, fx.types, TypeSource::kOracle, &missing);
  CHECK(f[3] == 0.0);
  CHECK(missing == 1);

  // All candidates share one type set: the feature is constant.
  TypeMap same{{"A", {"PER"}}, {"B", {"PER"}}, {"C", {"PER"}}};
  Mention m = fx.mention;
  m.candidates.pop_back();
  auto c = TypeFeature(m, same, TypeSource::kOracle);
  CHECK(c == Vector{1.0, 1.0, 1.0});
}

TEST_CASE("score mention typed: combiner over psi_long and Jaccard") {
  TypedFixture fx;
  ModelConfig cfg;
  cfg.dim = 2;
  cfg.variant = Variant::kTyped;
  cfg.inference = Inference::kGlobal;
  ModelParams p = ModelParams::Zeros(cfg);
  p.attention = {1, 1};
  p.bilinear = {1, 1};
  p.context.w1[1] = 1.0;  // unit 0 reads Jaccard
  p.context.w2[0] = 1.0;
  auto s = ScoreMentionTyped(fx.mention, fx.res(), p);
  REQUIRE(s.candidates.size() == 3);
  CHECK(s.candidates[0].combined == 1.0);
  CHECK(s.candidates[1].combined == 0.5);
  CHECK(s.candidates[2].combined == 0.0);
  CHECK(*s.candidates[1].jaccard == 0.5);
  // One word, so h = x_w = (1, 0.5); psi_long(C) = 1 + 0.5.
  CHECK(s.candidates[2].psi_long == 1.5);
  CHECK(s.Best() == 0);

  cfg.type_source = TypeSource::kPredict;
  p.config = cfg;
  auto pr = ScoreMentionTyped(fx.mention, fx.res(), p);
  CHECK(pr.candidates[0].combined == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(pr.Best() == 1);

  // With constant Jaccard the ranking falls to psi_long.
  TypeMap same{{"A", {"PER"}}, {"B", {"PER"}}, {"C", {"PER"}}};
  Resources r = fx.res();
  r.types = &same;
  ModelParams q = ModelParams::Zeros(cfg);
  q.config.type_source = TypeSource::kOracle;
  q.attention = {1, 1};
  q.bilinear = {1, 1};
  q.context.w1[0] = 1.0;
  q.context.w2[0] = 1.0;
  q.context.b1[0] = 10.0;
  CHECK(ScoreMentionTyped(fx.mention, r, q).Best() == 2);

  ModelConfig other = cfg;
  other.variant = Variant::kWithSim;
  CHECK_THROWS_AS(ScoreMentionTyped(fx.mention, fx.res(), ModelParams::Zeros(other)), Error);
}

// Two labels from the signs of the first two coordinates, rows kept away
// from the boundary.
struct SeparableProbe {
  EmbeddingTable table;
  TypeMap labels;
};

SeparableProbe MakeSeparable(uint64_t seed, size_t n, uint32_t dim) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::string> ids;
  std::vector<float> m;
  TypeMap labels;
  for (size_t i = 0; i < n; ++i) {
    std::string id = "E" + std::to_string(i);
    TypeSet t;
    for (uint32_t k = 0; k < dim; ++k) {
      double v = normal(rng);
      if (k < 2) {
        v = (v < 0 ? -1 : 1) * (0.5 + std::abs(v));
        if (v > 0) t.insert(k == 0 ? "pos0" : "pos1");
      }
      m.push_back(static_cast<float>(v));
    }
    ids.push_back(id);
    labels[id] = t;
  }
  return {EmbeddingTable(dim, ids, m), labels};
}

TEST_CASE("probe: zero initialization loss is |T| log 2 per entity") {
  auto sp = MakeSeparable(72, 50, 8);
  ProbeModel zero = ProbeModel::Zeros(TypeVocabulary(sp.labels), 8, false);
  std::vector<EntityId> ids(sp.table.ids().begin(), sp.table.ids().end());
  CHECK(ProbeLoss(zero, sp.table, sp.labels, ids) ==
        doctest::Approx(2 * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("probe: zero epochs return the initialization") {
  auto sp = MakeSeparable(73, 100, 8);
  ProbeConfig cfg;
  cfg.epochs = 0;
  auto r = ProbeTrain(sp.table, sp.labels, SplitEntities(sp.table, sp.labels, 1), cfg);
  CHECK(r.model == ProbeModel::Zeros(TypeVocabulary(sp.labels), 8, false));
  CHECK(r.best_epoch == -1);
}

TEST_CASE("probe: separable labels are learned") {
  auto sp = MakeSeparable(74, 1000, 8);
  auto split = SplitEntities(sp.table, sp.labels, 3);
  auto r = ProbeTrain(sp.table, sp.labels, split, ProbeConfig{});
  auto dev = ProbeEval(r.model, sp.table, sp.labels, split.dev);
  CHECK(dev.micro_f1 >= 0.99);
  // The kept model is the one with the lowest recorded dev loss.
  const double best = *std::min_element(r.dev_loss.begin(), r.dev_loss.end());
  CHECK(r.best_dev_loss == best);
  CHECK(r.dev_loss[r.best_epoch] == best);
  CHECK(ProbeLoss(r.model, sp.table, sp.labels, split.dev) == best);
  // Early stopping after `patience` epochs without improvement.
  CHECK(static_cast<int>(r.dev_loss.size()) <= std::max(r.best_epoch + 1 + 6, 0));
  double running = r.dev_loss[0];
  for (double l : r.dev_loss) {
    CHECK(std::min(running, l) <= running);
    running = std::min(running, l);
  }
}

TEST_CASE("probe: split sizes, disjointness and determinism") {
  auto sp = MakeSeparable(75, 200, 4);
  sp.labels.erase("E0");
  sp.labels["not_in_table"] = {"pos0"};
  auto s = SplitEntities(sp.table, sp.labels, 9);
  CHECK(s.train.size() + s.dev.size() + s.test.size() == 199);
  CHECK(s.dev.size() == 19);
  CHECK(s.train.size() == 159);
  CHECK(s.test.size() == 21);
  std::set<std::string> all(s.train.begin(), s.train.end());
  all.insert(s.dev.begin(), s.dev.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 199);
  CHECK(all.count("E0") == 0);
  CHECK(all.count("not_in_table") == 0);
  auto again = SplitEntities(sp.table, sp.labels, 9);
  CHECK(again.train == s.train);
  CHECK(again.dev == s.dev);
  CHECK(SplitEntities(sp.table, sp.labels, 10).train != s.train);
}

TEST_CASE("probe metrics: perfect, empty and a 20-entity count oracle") {
  std::vector<TypeSet> gold{{"a"}, {"a", "b"}, {"c"}};
  auto perfect = SetMetrics(gold, gold);
  CHECK(perfect.strict_accuracy == 1.0);
  CHECK(perfect.micro_f1 == 1.0);
  CHECK(perfect.macro_f1 == 1.0);
  auto empty = SetMetrics({{}, {}, {}}, gold);
  CHECK(empty.strict_accuracy == 0.0);
  CHECK(empty.micro_f1 == 0.0);
  CHECK(empty.macro_f1 == 0.0);

  std::mt19937_64 rng(76);
  const char *pool[] = {"a", "b", "c", "d"};
  std::vector<TypeSet> pred, truth;
  for (int i = 0; i < 20; ++i) {
    TypeSet p, g;
    for (const char *t : pool) {
      if (rng() % 2) p.insert(t);
      if (rng() % 2) g.insert(t);
    }
    pred.push_back(p);
    truth.push_back(g);
  }
  size_t tp = 0, fp = 0, fn = 0, exact = 0, np = 0, ng = 0;
  double psum = 0, rsum = 0;
  for (int i = 0; i < 20; ++i) {
    size_t hit = 0;
    for (const auto &t : pred[i]) hit += truth[i].count(t);
    tp += hit;
    fp += pred[i].size() - hit;
    fn += truth[i].size() - hit;
    exact += pred[i] == truth[i];
    if (!pred[i].empty()) {
      ++np;
      psum += static_cast<double>(hit) / pred[i].size();
    }
    if (!truth[i].empty()) {
      ++ng;
      rsum += static_cast<double>(hit) / truth[i].size();
    }
  }
  auto m = SetMetrics(pred, truth);
  CHECK(m.tp == tp);
  CHECK(m.fp == fp);
  CHECK(m.fn == fn);
  CHECK(m.strict_accuracy == doctest::Approx(exact / 20.0));
  CHECK(m.micro_f1 == doctest::Approx(2.0 * tp / (2.0 * tp + fp + fn)));
  const double P = psum / np, R = rsum / ng;
  CHECK(m.macro_f1 == doctest::Approx(2 * P * R / (P + R)));
}

TEST_CASE("probe eval: threads agree, checkpoint round trip") {
  auto sp = MakeSeparable(77, 300, 6);
  auto split = SplitEntities(sp.table, sp.labels, 2);
  ProbeConfig cfg;
  cfg.epochs = 5;
  cfg.per_type_bias = true;
  auto r = ProbeTrain(sp.table, sp.labels, split, cfg);
  CHECK(r.model.b.size() == 2);
  auto one = ProbeEval(r.model, sp.table, sp.labels, split.test, 0.5, 1);
  auto four = ProbeEval(r.model, sp.table, sp.labels, split.test, 0.5, 4);
  CHECK(one.tp == four.tp);
  CHECK(one.fp == four.fp);
  CHECK(one.macro_f1 == four.macro_f1);
  CHECK(ProbeFromCheckpoint(ProbeToCheckpoint(r.model)) == r.model);
}

TEST_CASE("probe: errors") {
  auto sp = MakeSeparable(78, 20, 4);
  ProbeSplit split;
  split.train = {"E1"};
  CHECK_THROWS_AS(ProbeTrain(sp.table, sp.labels, split, ProbeConfig{}), Error);
}

}  // namespace
}  // namespace elink

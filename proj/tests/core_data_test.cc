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

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "elink/base.h"
#include "elink/checkpoint.h"
#include "elink/context_vectors.h"
#include "elink/dataset.h"
#include "elink/embedding_table.h"
#include "elink/type_map.h"
#include "support/synthetic.h"

namespace elink {
namespace {

using testing::TempDir;

void WriteText(const std::string &path, const std::string &text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string Bytes(const std::string &path) { return ReadFile(path); }

const char *kTwoMentions = R"({"documents":[{"id":"d1","mentions":[
  {"id":"m1","surface":["Paris"],"left_ctx":["in"],"right_ctx":["today"],
   "long_ctx":["france","city"],"candidates":[{"entity":"Paris","prior":0.9},
   {"entity":"Paris_Hilton","prior":0.1}],"gold":"Paris"},
  {"id":"m2","surface":["Hilton"],"left_ctx":[],"right_ctx":[],
   "long_ctx":[],"candidates":[{"entity":"Paris_Hilton","prior":1}],
   "gold":null}]}]})";

std::string Replace(std::string s, const std::string &from,
                    const std::string &to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

// Random document list built directly as structs.
std::vector<Document> RandomDocs(std::mt19937_64 &rng, size_t n_docs) {
  std::vector<Document> docs;
  size_t next = 0;
  auto word = [&] { return "w" + std::to_string(rng() % 50); };
  for (size_t d = 0; d < n_docs; ++d) {
    Document doc;
    doc.id = "doc" + std::to_string(d);
    const size_t n = 1 + rng() % 4;
    for (size_t i = 0; i < n; ++i) {
      Mention m;
      m.id = "m" + std::to_string(next++);
      m.surface = {word()};
      for (size_t k = rng() % 3; k > 0; --k) m.left_ctx.push_back(word());
      for (size_t k = rng() % 3; k > 0; --k) m.right_ctx.push_back(word());
      for (size_t k = rng() % 8; k > 0; --k) m.long_ctx.push_back(word());
      const size_t l = 1 + rng() % 4;
      for (size_t c = 0; c < l; ++c) {
        // Priors with a short exact binary expansion survive JSON exactly
        // either way; use arbitrary doubles to exercise round-tripping.
        m.candidates.push_back({"E" + std::to_string(rng() % 30),
                                std::uniform_real_distribution<double>(0, 1)(rng)});
      }
      if (rng() % 3) m.gold = m.candidates[rng() % l].entity;
      if (rng() % 2) m.mention_types = std::vector<std::string>{"person"};
      doc.mentions.push_back(std::move(m));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

TEST_CASE("hash and rng helpers match reference values") {
  CHECK(Fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(Fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(Fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(SplitMix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(ArgMax({1.0, 3.0, 3.0, 2.0}) == 1);
  CHECK(ArgMax({}) == -1);
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> a(20), b;
  for (int i = 0; i < 20; ++i) a[i] = i;
  b = a;
  std::mt19937_64 r1(5), r2(5);
  Shuffle(a, r1);
  Shuffle(b, r2);
  CHECK(a == b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 20; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("dataset: two mentions parse with candidates and priors") {
  auto docs = ParseDataset(kTwoMentions);
  REQUIRE(docs.size() == 1);
  REQUIRE(docs[0].mentions.size() == 2);
  const Mention &m = docs[0].mentions[0];
  CHECK(m.id == "m1");
  CHECK(m.surface == std::vector<std::string>{"Paris"});
  CHECK(m.candidates.size() == 2);
  CHECK(m.candidates[1].entity == "Paris_Hilton");
  CHECK(m.candidates[1].prior == 0.1);
  CHECK(m.gold == std::optional<std::string>("Paris"));
  CHECK(m.GoldIndex() == 0);
  CHECK_FALSE(docs[0].mentions[1].gold.has_value());
  CHECK(docs[0].mentions[1].GoldIndex() == -1);
}

TEST_CASE("dataset: prior 1.5 is rejected with its position") {
  std::string bad = Replace(kTwoMentions, "\"prior\":0.1", "\"prior\":1.5");
  try {
    ParseDataset(bad);
    FAIL("expected an error");
  } catch (const Error &e) {
    const std::string what = e.what();
    CHECK(what.find("prior out of range") != std::string::npos);
    CHECK(what.find("$.documents[0].mentions[0].candidates[1].prior") !=
          std::string::npos);
  }
}

TEST_CASE("dataset: malformed inputs fail") {
  CHECK_THROWS_WITH_AS(ParseDataset("{\"documents\": ["), doctest::Contains("malformed JSON"), Error);
  CHECK_THROWS_WITH_AS(
      ParseDataset(Replace(kTwoMentions, "[{\"entity\":\"Paris_Hilton\",\"prior\":1}]", "[]")),
      doctest::Contains("empty candidate list"), Error);
  CHECK_THROWS_WITH_AS(ParseDataset(Replace(kTwoMentions, "\"m2\"", "\"m1\"")),
                       doctest::Contains("duplicate mention id"), Error);
  CHECK_THROWS_WITH_AS(ParseDataset(Replace(kTwoMentions, "\"prior\":0.9", "\"prior\":-0.1")),
                       doctest::Contains("prior out of range"), Error);
  CHECK_THROWS_AS(ParseDataset(R"({"documents":[{"id":"x","mentions":[]}]})"), Error);
}

TEST_CASE("dataset: long context is capped at K") {
  DatasetOptions opt;
  opt.max_long_context = 1;
  auto docs = ParseDataset(kTwoMentions, opt);
  CHECK(docs[0].mentions[0].long_ctx == std::vector<std::string>{"france"});
}

TEST_CASE("dataset: 3-document fixture keeps ids and fields in order") {
  std::mt19937_64 rng(3);
  auto docs = RandomDocs(rng, 3);
  const std::string dir = TempDir("core3");
  SaveDataset(docs, dir + "/d.json");
  auto back = LoadDataset(dir + "/d.json");
  REQUIRE(back.size() == 3);
  for (size_t d = 0; d < 3; ++d) {
    CHECK(back[d].id == docs[d].id);
    REQUIRE(back[d].mentions.size() == docs[d].mentions.size());
    for (size_t i = 0; i < docs[d].mentions.size(); ++i) {
      const Mention &a = docs[d].mentions[i], &b = back[d].mentions[i];
      CHECK(a.id == b.id);
      CHECK(a.surface == b.surface);
      CHECK(a.left_ctx == b.left_ctx);
      CHECK(a.right_ctx == b.right_ctx);
      CHECK(a.long_ctx == b.long_ctx);
      CHECK(a.candidates == b.candidates);
      CHECK(a.gold == b.gold);
      CHECK(a.mention_types == b.mention_types);
    }
  }
}

TEST_CASE("dataset: save/load round trip is the identity (property)") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    auto docs = RandomDocs(rng, 1 + rng() % 5);
    CHECK(ParseDataset(DatasetToJson(docs)) == docs);
  }
}

TEST_CASE("dataset: batches preserve order and count (property)") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    Document doc;
    doc.id = "big";
    const size_t n = 1 + rng() % 200;
    for (size_t i = 0; i < n; ++i) {
      Mention m;
      m.id = "m" + std::to_string(i);
      m.candidates = {{"E", 1.0}};
      doc.mentions.push_back(m);
    }
    auto batches = SplitIntoBatches(doc);
    CHECK(batches.size() == (n + kMaxBatchMentions - 1) / kMaxBatchMentions);
    size_t k = 0;
    for (const Document &b : batches) {
      CHECK(b.id == "big");
      CHECK(b.mentions.size() <= kMaxBatchMentions);
      for (const Mention &m : b.mentions) CHECK(m.id == "m" + std::to_string(k++));
    }
    CHECK(k == n);
  }
}

TEST_CASE("log prior floors zero") {
  CHECK(LogPrior(0.0) == std::log(1e-12));
  CHECK(LogPrior(1.0) == 0.0);
  CHECK(LogPrior(0.5) == std::log(0.5));
}

TEST_CASE("embeddings: two-row table round trips") {
  const std::string dir = TempDir("emb2");
  EmbeddingTable t(2, {"a", "b"}, {1, 0, 0, 1});
  SaveEmbeddings(t, dir + "/t.emb");
  auto back = LoadEmbeddings(dir + "/t.emb");
  auto a = back.Lookup("a");
  CHECK(a[0] == 1.0f);
  CHECK(a[1] == 0.0f);
  CHECK(back.Lookup("b")[1] == 1.0f);
  CHECK_THROWS_WITH_AS(back.Lookup("zzz"), doctest::Contains("unknown id"), Error);
}

TEST_CASE("embeddings: header layout matches the documented bytes") {
  const std::string dir = TempDir("embhdr");
  WriteEmb1(dir + "/x.emb", 2, 3, std::vector<float>{1, 2, 3, 4, 5, 6});
  const std::string b = Bytes(dir + "/x.emb");
  REQUIRE(b.size() == 12 + 24);
  CHECK(b.substr(0, 4) == "EMB1");
  CHECK(static_cast<uint8_t>(b[4]) == 2);
  CHECK(static_cast<uint8_t>(b[8]) == 3);
  float f;
  std::memcpy(&f, b.data() + 12 + 4 * 5, 4);
  CHECK(f == 6.0f);
}

TEST_CASE("embeddings: id count mismatch, bad magic, NaN and truncation fail") {
  const std::string dir = TempDir("embbad");
  WriteEmb1(dir + "/t.emb", 2, 2, std::vector<float>{1, 0, 0, 1});
  WriteText(dir + "/t.ids", "a\nb\nc\n");
  CHECK_THROWS_AS(LoadEmbeddings(dir + "/t.emb"), Error);

  WriteText(dir + "/m.emb", "EMB2" + std::string(8, '\0'));
  CHECK_THROWS_WITH_AS(ReadEmb1(dir + "/m.emb"), doctest::Contains("magic"), Error);

  WriteEmb1(dir + "/n.emb", 1, 2, std::vector<float>{1, NAN});
  WriteText(dir + "/n.ids", "a\n");
  CHECK_THROWS_WITH_AS(LoadEmbeddings(dir + "/n.emb"), doctest::Contains("non-finite"), Error);

  std::string full = Bytes(dir + "/t.emb");
  WriteText(dir + "/s.emb", full.substr(0, full.size() - 1));
  CHECK_THROWS_WITH_AS(ReadEmb1(dir + "/s.emb"), doctest::Contains("truncated"), Error);
  WriteText(dir + "/l.emb", full + "x");
  CHECK_THROWS_WITH_AS(ReadEmb1(dir + "/l.emb"), doctest::Contains("trailing"), Error);

  CHECK_THROWS_AS(EmbeddingTable(2, {"a", "a"}, {1, 2, 3, 4}), Error);
  CHECK_THROWS_AS(EmbeddingTable(2, {"a"}, {1, 2, 3}), Error);
}

TEST_CASE("embeddings: 10k random rows round trip bit-exactly") {
  std::mt19937_64 rng(99);
  const uint32_t dim = 8;
  const size_t rows = 10000;
  std::vector<std::string> ids;
  std::vector<float> m(rows * dim);
  for (size_t i = 0; i < rows; ++i) ids.push_back("id" + std::to_string(i));
  // Arbitrary finite bit patterns, including subnormals and negative zero.
  for (float &f : m) {
    uint32_t bits;
    do {
      bits = static_cast<uint32_t>(rng());
      f = std::bit_cast<float>(bits);
    } while (!std::isfinite(f));
  }
  const std::string dir = TempDir("emb10k");
  EmbeddingTable t(dim, ids, m);
  SaveEmbeddings(t, dir + "/big.emb");
  // Byte oracle: payload equals the little-endian encoding of the input.
  const std::string bytes = Bytes(dir + "/big.emb");
  REQUIRE(bytes.size() == 12 + rows * dim * 4);
  bool same = true;
  for (size_t k = 0; k < m.size(); ++k) {
    const uint32_t bits = std::bit_cast<uint32_t>(m[k]);
    for (int q = 0; q < 4; ++q) {
      same &= static_cast<uint8_t>(bytes[12 + 4 * k + q]) ==
              static_cast<uint8_t>(bits >> (8 * q));
    }
  }
  CHECK(same);
  auto back = LoadEmbeddings(dir + "/big.emb");
  REQUIRE(back.size() == rows);
  bool rows_same = true;
  for (size_t i = 0; i < rows; ++i) {
    auto r = back.Lookup(ids[i]);
    rows_same &= std::memcmp(r.data(), m.data() + i * dim, dim * 4) == 0;
  }
  CHECK(rows_same);
  CHECK(IdsPathFor(dir + "/big.emb") == dir + "/big.ids");
}

TEST_CASE("type map: parse, duplicates and round trip") {
  auto t = ParseTypeMap("{\"entity\":\"E1\",\"types\":[\"person\"]}\n");
  CHECK(t.size() == 1);
  CHECK(t.at("E1") == TypeSet{"person"});
  CHECK_THROWS_WITH_AS(ParseTypeMap("{\"entity\":\"E1\",\"types\":[]}\n"
                                    "{\"entity\":\"E1\",\"types\":[\"x\"]}\n"),
                       doctest::Contains("line 2: duplicate entity"), Error);
  CHECK(ParseTypeMap("{\"entity\":\"E\",\"types\":[]}").at("E").empty());

  std::mt19937_64 rng(4);
  TypeMap big;
  for (int e = 0; e < 100; ++e) {
    TypeSet s;
    for (int k = rng() % 4; k > 0; --k) s.insert("/t" + std::to_string(rng() % 10));
    big["E" + std::to_string(e)] = s;
  }
  const std::string dir = TempDir("types");
  SaveTypeMap(big, dir + "/t.ndjson");
  CHECK(LoadTypeMap(dir + "/t.ndjson") == big);
}

TEST_CASE("context vectors: NDJSON and binary forms") {
  const std::string dir = TempDir("ctx");
  std::vector<ContextVector> cv = {{"A", "s1", {1.5f, -2.0f}},
                                   {"B", "s2", {0.25f, 3.0f}}};
  SaveContextVectors(cv, dir + "/c.ndjson");
  auto back = LoadContextVectors(dir + "/c.ndjson", 2);
  REQUIRE(back.size() == 2);
  CHECK(back[1].entity == "B");
  CHECK(back[1].source_id == "s2");
  CHECK(back[1].vec == cv[1].vec);
  CHECK_THROWS_WITH_AS(LoadContextVectors(dir + "/c.ndjson", 3),
                       doctest::Contains("dim"), Error);
  WriteText(dir + "/bad.ndjson", "{\"entity\":\"A\",\"source\":\"s\",\"vec\":[1e999]}\n");
  CHECK_THROWS_AS(LoadContextVectors(dir + "/bad.ndjson"), Error);

  WriteEmb1(dir + "/c.emb", 2, 2, std::vector<float>{1.5f, -2.0f, 0.25f, 3.0f});
  WriteText(dir + "/c.entities", "A\nB\n");
  WriteText(dir + "/c.sources", "s1\ns2\n");
  auto bin = LoadContextVectorsBinary(dir + "/c.emb", dir + "/c.entities",
                                      dir + "/c.sources");
  REQUIRE(bin.size() == 2);
  CHECK(bin[0].entity == "A");
  CHECK(bin[1].source_id == "s2");
  CHECK(bin[1].vec == cv[1].vec);
}

TEST_CASE("mention vectors: sidecar round trip and duplicates") {
  const std::string dir = TempDir("mv");
  MentionVectors mv{{"m2", {1, 2}}, {"m1", {3, 4}}};
  SaveMentionVectors(mv, dir + "/mv.ndjson");
  const std::string text = ReadFile(dir + "/mv.ndjson");
  CHECK(text.find("m1") < text.find("m2"));
  CHECK(LoadMentionVectors(dir + "/mv.ndjson", 2) == mv);
  WriteText(dir + "/dup.ndjson",
            "{\"mention\":\"a\",\"vec\":[1]}\n{\"mention\":\"a\",\"vec\":[2]}\n");
  CHECK_THROWS_AS(LoadMentionVectors(dir + "/dup.ndjson"), Error);
}

TEST_CASE("checkpoint: parameters and config round trip bit-exactly") {
  std::mt19937_64 rng(8);
  for (Variant v : {Variant::kBaseline, Variant::kWithSim, Variant::kTyped}) {
    for (Inference inf : {Inference::kLocal, Inference::kGlobal}) {
      ModelConfig cfg;
      cfg.variant = v;
      cfg.inference = inf;
      cfg.dim = 7;
      cfg.lbp.damping = 0.3;
      cfg.flow = GradientFlow::kUnrolled;
      cfg.final_log_prior = false;
      ModelParams p = testing::RandomParams(cfg, rng);
      const std::string dir = TempDir("ck");
      SaveModel(p, dir + "/p.ck");
      ModelParams back = LoadModel(dir + "/p.ck");
      CHECK(back == p);
      CHECK(back.config == p.config);
      // Inactive blocks are stored too.
      CHECK(back.local.w1 == p.local.w1);
      CHECK(back.final.b2 == p.final.b2);
      SaveModel(back, dir + "/q.ck");
      CHECK(Bytes(dir + "/p.ck") == Bytes(dir + "/q.ck"));
    }
  }
}

TEST_CASE("checkpoint: corrupt files fail") {
  const std::string dir = TempDir("ckbad");
  ModelConfig cfg;
  cfg.dim = 3;
  SaveModel(ModelParams::Initialize(cfg, 1), dir + "/p.ck");
  const std::string b = Bytes(dir + "/p.ck");
  WriteText(dir + "/t.ck", b.substr(0, b.size() - 3));
  CHECK_THROWS_WITH_AS(LoadModel(dir + "/t.ck"), doctest::Contains("truncated"), Error);
  WriteText(dir + "/m.ck", "XXXX" + b.substr(4));
  CHECK_THROWS_WITH_AS(LoadModel(dir + "/m.ck"), doctest::Contains("magic"), Error);
  WriteText(dir + "/x.ck", b + "z");
  CHECK_THROWS_AS(LoadModel(dir + "/x.ck"), Error);
}

}  // namespace
}  // namespace elink

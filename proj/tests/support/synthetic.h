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

#ifndef ELINK_TESTS_SUPPORT_SYNTHETIC_H_
#define ELINK_TESTS_SUPPORT_SYNTHETIC_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "elink/context_vectors.h"
#include "elink/dataset.h"
#include "elink/embedding_table.h"
#include "elink/features.h"
#include "elink/local_model.h"
#include "elink/params.h"
#include "elink/type_map.h"

namespace elink::testing {

// Directory holding the checked-in fixtures.
std::string FixtureDir();

// Scratch directory unique to the running test binary.
std::string TempDir(const std::string &name);

// Runs the elink binary with `args` (shell quoted by the caller).
struct CommandResult {
  int status = -1;
  std::string out;
  std::string err;
};
CommandResult RunElink(const std::string &args);

// FNV-1a of a whole file.
uint64_t FileChecksum(const std::string &path);

Vector RandomVector(std::mt19937_64 &rng, size_t dim, double stddev);
std::vector<float> RandomFloats(std::mt19937_64 &rng, size_t dim,
                                double stddev);

struct FixtureShape {
  size_t mentions = 3;
  size_t candidates = 3;
  size_t words = 6;
  bool vary = true;  // draw candidate/word counts in [1, max]
};

// Random parameter-independent features for gradient checks.
DocumentFeatures RandomDocument(std::mt19937_64 &rng, const ModelConfig &config,
                                const FixtureShape &shape,
                                const std::string &id);

// Parameters away from their initialization: diagonals around 1, combiner
// weights with `weight_std`, hidden biases ~ N(0, 1), small output biases.
ModelParams RandomParams(const ModelConfig &config, std::mt19937_64 &rng,
                         double weight_std = 0.3);

// Distance of the forward pass to the nearest non-differentiable point:
// ReLU pre-activations, hinge arguments, attention max over candidates, the
// top-R cut and the max of g_hat. LBP internals are not covered.
double KinkMargin(const ModelParams &params,
                  const std::vector<DocumentFeatures> &docs, double gamma);

// Checked-in 768-dim masked-context fixture.
std::vector<ContextVector> FixtureContexts();

struct CorpusShape {
  size_t train_docs = 150;
  size_t test_docs = 50;
  size_t mentions = 5;
  size_t candidates = 4;
  size_t words = 10;
  size_t vocab = 400;
  uint32_t dim = 32;
};

// Linking corpus over the entities of `contexts`. Each mention's context
// vector is its gold entity's pooled embedding; context words and priors are
// drawn independently of the gold.
struct LinkingCorpus {
  std::vector<Document> train;
  std::vector<Document> test;
  EmbeddingTable words;
  EmbeddingTable entities;
  EmbeddingTable sim;
  MentionVectors mention_vectors;
  double max_distractor_sim = -1.0;

  Resources resources() const;
};

LinkingCorpus MakeLinkingCorpus(const std::vector<ContextVector> &contexts,
                                uint64_t seed, const CorpusShape &shape = {});

// Corpus where every mention has a gold entity, a confounder of another type
// that the context words favour, and a same-type distractor the context does
// not favour.
struct TypedCorpus {
  std::vector<Document> train;
  std::vector<Document> test;
  EmbeddingTable words;
  EmbeddingTable entities;
  TypeMap types;

  Resources resources() const;
};

TypedCorpus MakeTypedCorpus(uint64_t seed, const CorpusShape &shape = {});

// Entities with one of two types and one of several topics. `type_separated`
// contexts point along a type direction; otherwise along a topic direction
// with only a faint type component.
struct ProbeCorpus {
  std::vector<ContextVector> contexts;
  TypeMap labels;
};

ProbeCorpus MakeProbeCorpus(uint64_t seed, bool type_separated,
                            size_t entities = 400, uint32_t dim = 64);

}  // namespace elink::testing

#endif  // ELINK_TESTS_SUPPORT_SYNTHETIC_H_

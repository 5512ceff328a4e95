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

#ifndef ELINK_PARAMS_H_
#define ELINK_PARAMS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "elink/base.h"
#include "elink/combiner.h"

namespace elink {

// Which extra feature the local scorer receives next to the attention score.
enum class Variant {
  kBaseline,  // (psi_long, log prior)
  kWithSim,   // (psi_long, masked-context cosine, log prior)
  kTyped,     // (psi_long, type Jaccard, log prior)
};

enum class Inference { kLocal, kGlobal };

// How gradients pass through loopy belief propagation. With kStopGradient
// the final messages are constants of the current parameters, so the
// pairwise diagonal receives no gradient. kUnrolled differentiates through
// every message round.
enum class GradientFlow { kStopGradient, kUnrolled };

// Source of mention types for the typed variant.
enum class TypeSource {
  kOracle,   // the gold entity's types
  kPredict,  // Mention::mention_types from an external typing system
};

struct LbpConfig {
  double damping = 0.5;  // in (0, 1]; 1 means no damping
  int loops = 10;

  bool operator==(const LbpConfig &) const = default;
};

struct ModelConfig {
  Variant variant = Variant::kWithSim;
  Inference inference = Inference::kLocal;
  uint32_t dim = 300;    // word / entity embedding dimension
  int hidden = kCombinerHidden;
  int top_words = 25;    // attention keeps the R best context words
  LbpConfig lbp;
  GradientFlow flow = GradientFlow::kStopGradient;
  bool final_log_prior = true;  // feed log p(e|m) rather than p(e|m) to f'
  double sim_floor = -1.0;      // similarity for candidates without a row
  TypeSource type_source = TypeSource::kOracle;

  void Validate() const;
  bool operator==(const ModelConfig &) const = default;
};

// Width of the local combiner input for a variant.
int LocalInputs(Variant variant);
// Width of the unary (context-only) combiner input used by the global model.
int ContextInputs(Variant variant);

const char *VariantName(Variant v);
Variant ParseVariant(const std::string &name);

struct ModelParams {
  ModelConfig config;
  Vector attention;  // A, diagonal
  Vector bilinear;   // B, diagonal
  Vector pairwise;   // C, diagonal
  Combiner local;    // f: local score
  Combiner context;  // f_ctx: unary score of the global model
  Combiner final;    // f': combines max-marginal and prior

  // All blocks zero; also serves as a gradient accumulator.
  static ModelParams Zeros(const ModelConfig &config);

  // Diagonals set to 1, combiner weights ~ N(0, 0.02), zero biases.
  static ModelParams Initialize(const ModelConfig &config, uint64_t seed);

  template <typename T>
  struct BlockRef {
    std::string name;
    std::span<T> values;
    bool combiner;  // part of the L2-regularized combiner parameters
    bool active;    // used by the configured inference mode
  };
  std::vector<BlockRef<double>> Blocks();
  std::vector<BlockRef<const double>> Blocks() const;

  void SetZero();
  bool operator==(const ModelParams &other) const;
};

}  // namespace elink

#endif  // ELINK_PARAMS_H_

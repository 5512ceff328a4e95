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

#ifndef ELINK_GLOBAL_INFERENCE_H_
#define ELINK_GLOBAL_INFERENCE_H_

#include <span>
#include <vector>

#include "elink/base.h"
#include "elink/combiner.h"
#include "elink/params.h"

namespace elink {

// (2 / (n - 1)) x' C y with C diagonal. Requires n >= 2.
double PairwisePhi(std::span<const double> x, std::span<const double> y,
                   std::span<const double> pairwise, size_t n);

// Pairwise scores of a fully connected document graph. Block (i, j) is an
// l_i x l_j row-major matrix with entry (a, b) = Phi(e_ia, e_jb).
class PairwiseScores {
 public:
  PairwiseScores() = default;

  // entity_vecs[i][a] is the embedding of candidate a of mention i.
  PairwiseScores(const std::vector<std::vector<Vector>> &entity_vecs,
                 std::span<const double> pairwise);

  // Builds from explicit blocks; block(j, i) must be the transpose of
  // block(i, j). Used by tests with hand-made potentials.
  PairwiseScores(std::vector<size_t> sizes, std::vector<Vector> blocks);

  // Same shape, all zeros.
  PairwiseScores ZerosLike() const;

  size_t mentions() const { return sizes_.size(); }
  size_t candidates(size_t i) const { return sizes_[i]; }
  double at(size_t i, size_t j, size_t a, size_t b) const {
    return blocks_[i * sizes_.size() + j][a * sizes_[j] + b];
  }
  Vector &block(size_t i, size_t j) { return blocks_[i * sizes_.size() + j]; }
  const Vector &block(size_t i, size_t j) const {
    return blocks_[i * sizes_.size() + j];
  }

  // Adds to grad_pairwise the gradient of sum_{i!=j,a,b} G_ij(a,b) Phi_ij(a,b)
  // with respect to C, given the same entity vectors.
  static void Backward(const std::vector<std::vector<Vector>> &entity_vecs,
                       const PairwiseScores &grad_blocks,
                       std::span<double> grad_pairwise);

 private:
  std::vector<size_t> sizes_;
  std::vector<Vector> blocks_;
};

// messages[k][i] is the (log-domain) message from mention k to mention i, one
// entry per candidate of i. Self entries are empty.
using Messages = std::vector<std::vector<Vector>>;

// Intermediate values of every message round, needed to differentiate
// through the unrolled schedule.
struct LbpTape {
  struct Round {
    Messages before;                             // messages entering the round
    Messages log_normalized;                     // log softmax of raw maxima
    Messages after;                              // damped messages
    std::vector<std::vector<std::vector<int>>> argmax;  // [i][j][e]
  };
  std::vector<Round> rounds;
};

struct LbpResult {
  std::vector<Vector> g_hat;  // approximate max-marginals per mention
  Messages messages;          // final damped messages
};

// Damped max-product loopy belief propagation with a synchronous schedule.
// Each round computes, for every ordered pair i -> j,
//   m(e) = max_e' [u_i(e') + Phi(e', e) + sum_{k != i, j} mbar_{k->i}(e')],
// normalizes it with a log-softmax over e, and damps it in probability space:
//   mbar_{i->j}(e) = log(d * softmax(m)(e) + (1 - d) * exp(mbar_{i->j}(e))).
// Messages start at zero. After the last round
//   g_hat_i(e) = u_i(e) + sum_{k != i} mbar_{k->i}(e).
// A single-mention document returns the unary scores unchanged.
LbpResult RunLbp(const std::vector<Vector> &unary,
                 const PairwiseScores &pairwise, const LbpConfig &config,
                 LbpTape *tape = nullptr);

// Convenience form building Phi from candidate embeddings and diagonal C.
LbpResult RunLbp(const std::vector<Vector> &unary,
                 const std::vector<std::vector<Vector>> &entity_vecs,
                 std::span<const double> pairwise, const LbpConfig &config);

// g_hat_i(e) = u_i(e) + sum_{k != i} messages[k][i](e).
std::vector<Vector> MaxMarginalsFromMessages(const std::vector<Vector> &unary,
                                             const Messages &messages);

// Reverse pass over a recorded run. Given dL/dg_hat, accumulates dL/du into
// `grad_unary` and dL/dPhi into `grad_pairwise` (same shapes as the inputs).
void LbpBackward(const LbpTape &tape, const LbpConfig &config,
                 const std::vector<Vector> &grad_g_hat,
                 std::vector<Vector> *grad_unary,
                 PairwiseScores *grad_pairwise);

// Upper bound on the joint assignment count BruteForceMaxMarginals accepts.
inline constexpr size_t kMaxEnumeration = 1000000;

// Exact max-marginals of g(e_1..e_n) = sum_i u_i(e_i) + sum_{i<j} Phi(e_i, e_j)
// by enumerating every joint assignment.
std::vector<Vector> BruteForceMaxMarginals(const std::vector<Vector> &unary,
                                           const PairwiseScores &pairwise);

// rho(e) = f'(g_hat(e), log p(e|m)) per candidate, or f'(g_hat(e), p(e|m))
// when `log_prior` is false. Priors are floored before the log.
Vector FinalScores(const Vector &g_hat, const Vector &priors,
                   const Combiner &final, bool log_prior = true);

}  // namespace elink

#endif  // ELINK_GLOBAL_INFERENCE_H_

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

#include "elink/global_inference.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "elink/dataset.h"

namespace elink {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogSumExp(const Vector &v) {
  double mx = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

double LogAddExp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double mx = std::max(a, b);
  return mx + std::log(std::exp(a - mx) + std::exp(b - mx));
}

Messages ZeroMessages(const std::vector<Vector> &unary) {
  const size_t n = unary.size();
  Messages m(n, std::vector<Vector>(n));
  for (size_t k = 0; k < n; ++k) {
    for (size_t i = 0; i < n; ++i) {
      if (k != i) m[k][i].assign(unary[i].size(), 0.0);
    }
  }
  return m;
}

void CheckUnary(const std::vector<Vector> &unary,
                const PairwiseScores &pairwise) {
  if (pairwise.mentions() != unary.size() && unary.size() > 1) {
    throw Error("pairwise scores cover " +
                std::to_string(pairwise.mentions()) + " mentions, unary " +
                std::to_string(unary.size()));
  }
  for (size_t i = 0; i < unary.size(); ++i) {
    if (unary[i].empty()) throw Error("mention without candidates");
    if (unary.size() > 1 && pairwise.candidates(i) != unary[i].size()) {
      throw Error("pairwise/unary candidate count mismatch");
    }
    for (double u : unary[i]) {
      if (!std::isfinite(u)) throw Error("non-finite unary score");
    }
  }
}

}  // namespace

double PairwisePhi(std::span<const double> x, std::span<const double> y,
                   std::span<const double> pairwise, size_t n) {
  if (n < 2) throw Error("pairwise score undefined for fewer than 2 mentions");
  if (x.size() != y.size() || x.size() != pairwise.size()) {
    throw Error("pairwise score: dimension mismatch");
  }
  double s = 0.0;
  for (size_t k = 0; k < x.size(); ++k) s += pairwise[k] * (x[k] * y[k]);
  return 2.0 / static_cast<double>(n - 1) * s;
}

PairwiseScores::PairwiseScores(
    const std::vector<std::vector<Vector>> &entity_vecs,
    std::span<const double> pairwise) {
  const size_t n = entity_vecs.size();
  sizes_.resize(n);
  for (size_t i = 0; i < n; ++i) sizes_[i] = entity_vecs[i].size();
  blocks_.resize(n * n);
  if (n < 2) return;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      Vector &ij = block(i, j);
      Vector &ji = block(j, i);
      ij.resize(sizes_[i] * sizes_[j]);
      ji.resize(sizes_[i] * sizes_[j]);
      for (size_t a = 0; a < sizes_[i]; ++a) {
        for (size_t b = 0; b < sizes_[j]; ++b) {
          double phi =
              PairwisePhi(entity_vecs[i][a], entity_vecs[j][b], pairwise, n);
          ij[a * sizes_[j] + b] = phi;
          ji[b * sizes_[i] + a] = phi;
        }
      }
    }
  }
}

PairwiseScores::PairwiseScores(std::vector<size_t> sizes,
                               std::vector<Vector> blocks)
    : sizes_(std::move(sizes)), blocks_(std::move(blocks)) {
  const size_t n = sizes_.size();
  if (blocks_.size() != n * n) throw Error("pairwise: expected n*n blocks");
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (block(i, j).size() != sizes_[i] * sizes_[j]) {
        throw Error("pairwise: block shape mismatch");
      }
    }
  }
}

PairwiseScores PairwiseScores::ZerosLike() const {
  PairwiseScores z;
  z.sizes_ = sizes_;
  z.blocks_.resize(blocks_.size());
  for (size_t b = 0; b < blocks_.size(); ++b) {
    z.blocks_[b].assign(blocks_[b].size(), 0.0);
  }
  return z;
}

void PairwiseScores::Backward(
    const std::vector<std::vector<Vector>> &entity_vecs,
    const PairwiseScores &grad_blocks, std::span<double> grad_pairwise) {
  const size_t n = entity_vecs.size();
  if (n < 2) return;
  const double scale = 2.0 / static_cast<double>(n - 1);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const Vector &g = grad_blocks.block(i, j);
      if (g.empty()) continue;
      const size_t lj = entity_vecs[j].size();
      for (size_t a = 0; a < entity_vecs[i].size(); ++a) {
        for (size_t b = 0; b < lj; ++b) {
          const double d = g[a * lj + b] * scale;
          if (d == 0.0) continue;
          const Vector &x = entity_vecs[i][a];
          const Vector &y = entity_vecs[j][b];
          for (size_t k = 0; k < grad_pairwise.size(); ++k) {
            grad_pairwise[k] += d * x[k] * y[k];
          }
        }
      }
    }
  }
}

std::vector<Vector> MaxMarginalsFromMessages(const std::vector<Vector> &unary,
                                             const Messages &messages) {
  const size_t n = unary.size();
  std::vector<Vector> g = unary;
  for (size_t i = 0; i < n; ++i) {
    for (size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      for (size_t e = 0; e < g[i].size(); ++e) g[i][e] += messages[k][i][e];
    }
  }
  return g;
}

LbpResult RunLbp(const std::vector<Vector> &unary,
                 const PairwiseScores &pairwise, const LbpConfig &config,
                 LbpTape *tape) {
  CheckUnary(unary, pairwise);
  if (!(config.damping > 0.0 && config.damping <= 1.0)) {
    throw Error("LBP damping must lie in (0, 1]");
  }
  const size_t n = unary.size();
  LbpResult result;
  result.messages = ZeroMessages(unary);
  if (tape) tape->rounds.clear();
  if (n == 1) {
    result.g_hat = unary;
    return result;
  }
  const double log_d = std::log(config.damping);
  const double log_keep =
      config.damping < 1.0 ? std::log1p(-config.damping) : kNegInf;

  Messages &mbar = result.messages;
  for (int round = 0; round < config.loops; ++round) {
    std::vector<Vector> belief = MaxMarginalsFromMessages(unary, mbar);
    Messages next = ZeroMessages(unary);
    LbpTape::Round *rec = nullptr;
    if (tape) {
      tape->rounds.emplace_back();
      rec = &tape->rounds.back();
      rec->before = mbar;
      rec->log_normalized = ZeroMessages(unary);
      rec->argmax.assign(n, std::vector<std::vector<int>>(n));
    }
    for (size_t i = 0; i < n; ++i) {
      const size_t li = unary[i].size();
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const size_t lj = unary[j].size();
        Vector m(lj, kNegInf);
        std::vector<int> arg(lj, 0);
        const Vector &phi = pairwise.block(i, j);
        for (size_t a = 0; a < li; ++a) {
          const double pre = belief[i][a] - mbar[j][i][a];
          for (size_t b = 0; b < lj; ++b) {
            const double v = pre + phi[a * lj + b];
            if (v > m[b]) {
              m[b] = v;
              arg[b] = static_cast<int>(a);
            }
          }
        }
        const double lse = LogSumExp(m);
        Vector &out = next[i][j];
        for (size_t b = 0; b < lj; ++b) {
          const double logp = m[b] - lse;
          out[b] = LogAddExp(log_d + logp, log_keep + mbar[i][j][b]);
          if (rec) rec->log_normalized[i][j][b] = logp;
        }
        if (rec) rec->argmax[i][j] = std::move(arg);
      }
    }
    mbar = std::move(next);
    if (rec) rec->after = mbar;
  }
  result.g_hat = MaxMarginalsFromMessages(unary, mbar);
  return result;
}

LbpResult RunLbp(const std::vector<Vector> &unary,
                 const std::vector<std::vector<Vector>> &entity_vecs,
                 std::span<const double> pairwise, const LbpConfig &config) {
  return RunLbp(unary, PairwiseScores(entity_vecs, pairwise), config);
}

void LbpBackward(const LbpTape &tape, const LbpConfig &config,
                 const std::vector<Vector> &grad_g_hat,
                 std::vector<Vector> *grad_unary,
                 PairwiseScores *grad_pairwise) {
  const size_t n = grad_g_hat.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t e = 0; e < grad_g_hat[i].size(); ++e) {
      (*grad_unary)[i][e] += grad_g_hat[i][e];
    }
  }
  if (n < 2) return;

  // dL/d(messages leaving the current round).
  Messages grad(n, std::vector<Vector>(n));
  for (size_t k = 0; k < n; ++k) {
    for (size_t i = 0; i < n; ++i) {
      if (k != i) grad[k][i] = grad_g_hat[i];
    }
  }
  const double log_d = std::log(config.damping);
  for (auto it = tape.rounds.rbegin(); it != tape.rounds.rend(); ++it) {
    const LbpTape::Round &r = *it;
    Messages grad_before(n, std::vector<Vector>(n));
    for (size_t k = 0; k < n; ++k) {
      for (size_t i = 0; i < n; ++i) {
        if (k != i) grad_before[k][i].assign(grad_g_hat[i].size(), 0.0);
      }
    }
    for (size_t i = 0; i < n; ++i) {
      const size_t li = grad_g_hat[i].size();
      Vector dpre(li);
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const size_t lj = grad_g_hat[j].size();
        const Vector &g = grad[i][j];
        const Vector &logp = r.log_normalized[i][j];
        const Vector &after = r.after[i][j];
        // Damping: after = logaddexp(log d + logp, log(1-d) + before).
        Vector dlogp(lj);
        double total = 0.0;
        for (size_t b = 0; b < lj; ++b) {
          const double w =
              config.damping < 1.0 ? std::exp(log_d + logp[b] - after[b]) : 1.0;
          dlogp[b] = g[b] * w;
          grad_before[i][j][b] += g[b] * (1.0 - w);
          total += dlogp[b];
        }
        // Log-softmax, then the max over the sender's candidates.
        std::fill(dpre.begin(), dpre.end(), 0.0);
        Vector &gphi = grad_pairwise->block(i, j);
        const std::vector<int> &arg = r.argmax[i][j];
        for (size_t b = 0; b < lj; ++b) {
          const double dm = dlogp[b] - std::exp(logp[b]) * total;
          dpre[arg[b]] += dm;
          gphi[arg[b] * lj + b] += dm;
        }
        // pre(a) = u_i(a) + sum_{k != i, j} before[k][i](a).
        for (size_t a = 0; a < li; ++a) (*grad_unary)[i][a] += dpre[a];
        for (size_t k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          for (size_t a = 0; a < li; ++a) grad_before[k][i][a] += dpre[a];
        }
      }
    }
    grad = std::move(grad_before);
  }
}

std::vector<Vector> BruteForceMaxMarginals(const std::vector<Vector> &unary,
                                           const PairwiseScores &pairwise) {
  CheckUnary(unary, pairwise);
  const size_t n = unary.size();
  size_t total = 1;
  for (const Vector &u : unary) {
    if (total > kMaxEnumeration / u.size()) {
      throw Error("state space too large for exhaustive max-marginals");
    }
    total *= u.size();
  }
  std::vector<Vector> best(n);
  for (size_t i = 0; i < n; ++i) best[i].assign(unary[i].size(), kNegInf);
  std::vector<size_t> assign(n, 0);
  for (size_t step = 0; step < total; ++step) {
    double g = 0.0;
    for (size_t i = 0; i < n; ++i) {
      g += unary[i][assign[i]];
      for (size_t j = i + 1; j < n; ++j) {
        g += pairwise.at(i, j, assign[i], assign[j]);
      }
    }
    for (size_t i = 0; i < n; ++i) {
      best[i][assign[i]] = std::max(best[i][assign[i]], g);
    }
    for (size_t i = 0; i < n; ++i) {  // mixed-radix increment
      if (++assign[i] < unary[i].size()) break;
      assign[i] = 0;
    }
  }
  return best;
}

Vector FinalScores(const Vector &g_hat, const Vector &priors,
                   const Combiner &final, bool log_prior) {
  if (g_hat.size() != priors.size()) {
    throw Error("final scores: g_hat and prior lengths differ");
  }
  Vector rho(g_hat.size());
  for (size_t e = 0; e < g_hat.size(); ++e) {
    const double p = log_prior ? LogPrior(priors[e]) : priors[e];
    const double x[2] = {g_hat[e], p};
    rho[e] = final.Forward(x);
  }
  return rho;
}

}  // namespace elink

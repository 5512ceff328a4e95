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

#include "elink/model.h"

#include <algorithm>

namespace elink {

Vector LocalInput(const MentionFeatures &m, double psi_long, size_t e) {
  Vector x{psi_long};
  if (!m.extra.empty()) x.push_back(m.extra[e]);
  x.push_back(m.log_prior[e]);
  return x;
}

Vector ContextInput(const MentionFeatures &m, double psi_long, size_t e) {
  Vector x{psi_long};
  if (!m.extra.empty()) x.push_back(m.extra[e]);
  return x;
}

DocumentPass::DocumentPass(const ModelParams &params,
                           const DocumentFeatures &doc, PassOptions options)
    : params_(params),
      doc_(doc),
      global_(params.config.inference == Inference::kGlobal),
      frozen_(options.frozen_messages != nullptr) {
  const ModelConfig &cfg = params.config;
  const size_t n = doc.mentions.size();
  mentions_.resize(n);
  const Combiner &scorer = global_ ? params.context : params.local;

  for (size_t i = 0; i < n; ++i) {
    const MentionFeatures &m = doc.mentions[i];
    MentionPass &p = mentions_[i];
    p.attention = AttendContext(m.words, m.entity_vecs, params.attention,
                                cfg.top_words);
    const size_t l = m.candidates.size();
    p.psi_long.resize(l);
    p.local_inputs.resize(l);
    p.local_caches.resize(l);
    p.local.resize(l);
    for (size_t e = 0; e < l; ++e) {
      p.psi_long[e] = PsiLong(m.entity_vecs[e], p.attention.h, params.bilinear);
      p.local_inputs[e] = global_ ? ContextInput(m, p.psi_long[e], e)
                                  : LocalInput(m, p.psi_long[e], e);
      p.local[e] = scorer.Forward(p.local_inputs[e], &p.local_caches[e]);
    }
    if (!global_) p.score = p.local;
  }
  if (!global_) return;

  std::vector<Vector> unary(n);
  for (size_t i = 0; i < n; ++i) unary[i] = mentions_[i].local;
  std::vector<Vector> g_hat;
  if (n == 1) {
    g_hat = unary;
  } else if (frozen_) {
    g_hat = MaxMarginalsFromMessages(unary, *options.frozen_messages);
  } else {
    std::vector<std::vector<Vector>> vecs(n);
    for (size_t i = 0; i < n; ++i) vecs[i] = doc.mentions[i].entity_vecs;
    pairwise_ = PairwiseScores(vecs, params.pairwise);
    if (cfg.flow == GradientFlow::kUnrolled) tape_ = std::make_unique<LbpTape>();
    lbp_ = RunLbp(unary, pairwise_, cfg.lbp, tape_.get());
    g_hat = lbp_.g_hat;
  }

  for (size_t i = 0; i < n; ++i) {
    const MentionFeatures &m = doc.mentions[i];
    MentionPass &p = mentions_[i];
    p.g_hat = std::move(g_hat[i]);
    p.g_argmax = ArgMax(p.g_hat);
    const double top = p.g_hat[p.g_argmax];
    const size_t l = m.candidates.size();
    p.g_input.resize(l);
    p.final_inputs.resize(l);
    p.final_caches.resize(l);
    p.rho.resize(l);
    for (size_t e = 0; e < l; ++e) {
      p.g_input[e] = p.g_hat[e] - top;
      p.final_inputs[e] = {p.g_input[e],
                           cfg.final_log_prior ? m.log_prior[e] : m.prior[e]};
      p.rho[e] = params.final.Forward(p.final_inputs[e], &p.final_caches[e]);
    }
    p.score = p.rho;
  }
}

void DocumentPass::Backward(const std::vector<Vector> &dscore,
                            ModelParams *grad) const {
  const size_t n = mentions_.size();
  std::vector<Vector> dlocal(n);
  for (size_t i = 0; i < n; ++i) dlocal[i].assign(mentions_[i].local.size(), 0.0);

  if (!global_) {
    dlocal = dscore;
  } else {
    std::vector<Vector> dg(n);
    for (size_t i = 0; i < n; ++i) {
      const MentionPass &p = mentions_[i];
      const size_t l = p.rho.size();
      Vector dg_input(l, 0.0);
      double dx[2];
      for (size_t e = 0; e < l; ++e) {
        if (dscore[i][e] == 0.0) continue;
        params_.final.Backward(p.final_inputs[e], p.final_caches[e],
                               dscore[i][e], &grad->final, dx);
        dg_input[e] = dx[0];
      }
      // g_input = g_hat - max(g_hat).
      dg[i] = dg_input;
      double total = 0.0;
      for (double v : dg_input) total += v;
      dg[i][p.g_argmax] -= total;
    }
    if (n == 1 || frozen_ || params_.config.flow == GradientFlow::kStopGradient) {
      dlocal = dg;
    } else {
      PairwiseScores dphi = pairwise_.ZerosLike();
      LbpBackward(*tape_, params_.config.lbp, dg, &dlocal, &dphi);
      std::vector<std::vector<Vector>> vecs(n);
      for (size_t i = 0; i < n; ++i) vecs[i] = doc_.mentions[i].entity_vecs;
      PairwiseScores::Backward(vecs, dphi, grad->pairwise);
    }
  }

  const Combiner &scorer = global_ ? params_.context : params_.local;
  Combiner *scorer_grad = global_ ? &grad->context : &grad->local;
  const size_t dim = params_.config.dim;
  for (size_t i = 0; i < n; ++i) {
    const MentionFeatures &m = doc_.mentions[i];
    const MentionPass &p = mentions_[i];
    Vector dh(dim, 0.0);
    Vector dx(scorer.inputs);
    bool any = false;
    for (size_t e = 0; e < p.local.size(); ++e) {
      if (dlocal[i][e] == 0.0) continue;
      scorer.Backward(p.local_inputs[e], p.local_caches[e], dlocal[i][e],
                      scorer_grad, dx);
      const double dpsi = dx[0];
      if (dpsi == 0.0) continue;
      any = true;
      const Vector &x = m.entity_vecs[e];
      for (size_t k = 0; k < dim; ++k) {
        grad->bilinear[k] += dpsi * x[k] * p.attention.h[k];
        dh[k] += dpsi * x[k] * params_.bilinear[k];
      }
    }
    if (any && !p.attention.empty) {
      AttendContextBackward(p.attention, m.words, m.entity_vecs, dh,
                            grad->attention);
    }
  }
}

}  // namespace elink

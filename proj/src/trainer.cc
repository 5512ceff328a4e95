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

#include "elink/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "elink/model.h"

namespace elink {
namespace {

// Names the first block holding a non-finite value, or returns empty.
std::string NonFiniteBlock(const ModelParams &p) {
  for (const auto &b : p.Blocks()) {
    for (double v : b.values) {
      if (!std::isfinite(v)) return b.name;
    }
  }
  return {};
}

double TotalLoss(const ModelParams &params,
                 const std::vector<DocumentFeatures> &docs, double gamma,
                 double lambda, const std::vector<Messages> *frozen,
                 ModelParams *grad) {
  double loss = L2Penalty(params, lambda, grad);
  for (size_t d = 0; d < docs.size(); ++d) {
    const Messages *fm = frozen ? &(*frozen)[d] : nullptr;
    loss += DocumentLoss(params, docs[d], gamma, grad, fm);
  }
  return loss;
}

}  // namespace

void TrainConfig::Validate() const {
  if (!(gamma > 0.0)) throw Error("margin gamma must be positive");
  if (!(lambda >= 0.0)) throw Error("L2 lambda must be non-negative");
  if (!(lr >= 0.0)) throw Error("learning rate must be non-negative");
  if (epochs < 0) throw Error("epoch count must be non-negative");
}

double MarginLoss(std::span<const double> scores, int gold, double gamma,
                  std::span<double> grad) {
  if (gold < 0 || static_cast<size_t>(gold) >= scores.size()) {
    throw Error("gold index " + std::to_string(gold) + " out of range for " +
                std::to_string(scores.size()) + " candidates");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  // The gold term is gamma exactly.
  double loss = gamma;
  for (size_t e = 0; e < scores.size(); ++e) {
    if (static_cast<int>(e) == gold) continue;
    const double h = gamma - (scores[gold] - scores[e]);
    if (h <= 0.0) continue;
    loss += h;
    if (!grad.empty()) {
      grad[e] += 1.0;
      grad[gold] -= 1.0;
    }
  }
  return loss;
}

double L2Penalty(std::span<const double> alpha, double lambda) {
  double s = 0.0;
  for (double a : alpha) s += a * a;
  return lambda * s;
}

double L2Penalty(const ModelParams &params, double lambda, ModelParams *grad) {
  double total = 0.0;
  auto blocks = params.Blocks();
  std::vector<ModelParams::BlockRef<double>> grads;
  if (grad) grads = grad->Blocks();
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (!blocks[b].combiner || !blocks[b].active) continue;
    total += L2Penalty(blocks[b].values, lambda);
    if (grad) {
      for (size_t k = 0; k < blocks[b].values.size(); ++k) {
        grads[b].values[k] += 2.0 * lambda * blocks[b].values[k];
      }
    }
  }
  return total;
}

double DocumentLoss(const ModelParams &params, const DocumentFeatures &doc,
                    double gamma, ModelParams *grad, const Messages *frozen,
                    size_t *trainable) {
  PassOptions options;
  options.frozen_messages = frozen;
  DocumentPass pass(params, doc, options);
  const auto &mentions = pass.mentions();
  std::vector<Vector> dscore(mentions.size());
  double loss = 0.0;
  size_t count = 0;
  for (size_t i = 0; i < mentions.size(); ++i) {
    dscore[i].assign(mentions[i].score.size(), 0.0);
    const int gold = doc.mentions[i].gold;
    if (gold < 0) continue;
    loss += MarginLoss(mentions[i].score, gold, gamma, dscore[i]);
    ++count;
  }
  if (trainable) *trainable = count;
  if (grad && count > 0) pass.Backward(dscore, grad);
  return loss;
}

AdamOptimizer::AdamOptimizer(const ModelParams &shape,
                             const TrainConfig &config)
    : config_(config) {
  for (const auto &b : shape.Blocks()) {
    m_.emplace_back(b.values.size(), 0.0);
    v_.emplace_back(b.values.size(), 0.0);
  }
}

void AdamOptimizer::Step(ModelParams *params, const ModelParams &grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  auto blocks = params->Blocks();
  auto grads = grad.Blocks();
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (!blocks[b].active) continue;
    Vector &m = m_[b];
    Vector &v = v_[b];
    for (size_t k = 0; k < blocks[b].values.size(); ++k) {
      const double g = grads[b].values[k];
      m[k] = config_.beta1 * m[k] + (1.0 - config_.beta1) * g;
      v[k] = config_.beta2 * v[k] + (1.0 - config_.beta2) * g * g;
      blocks[b].values[k] -=
          config_.lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + config_.epsilon);
    }
  }
}

double Accuracy(const ModelParams &params,
                const std::vector<DocumentFeatures> &docs) {
  size_t total = 0, correct = 0;
  for (const DocumentFeatures &doc : docs) {
    DocumentPass pass(params, doc);
    for (size_t i = 0; i < doc.mentions.size(); ++i) {
      if (!doc.mentions[i].in_kb) continue;
      ++total;
      if (doc.mentions[i].gold >= 0 &&
          pass.mentions()[i].Best() == doc.mentions[i].gold) {
        ++correct;
      }
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / total;
}

TrainResult Train(const std::vector<DocumentFeatures> &train,
                  const ModelParams &init, const TrainConfig &config,
                  const std::vector<DocumentFeatures> *dev) {
  config.Validate();
  if (train.empty()) throw Error("empty training set");
  TrainResult result;
  for (const DocumentFeatures &doc : train) {
    for (const MentionFeatures &m : doc.mentions) {
      if (m.gold >= 0) {
        ++result.trainable_mentions;
      } else if (m.in_kb) {
        ++result.skipped_mentions;
      }
    }
  }
  if (result.trainable_mentions == 0) {
    throw Error("no trainable mention (gold among candidates) in training set");
  }

  ModelParams params = init;
  ModelParams grad = ModelParams::Zeros(init.config);
  AdamOptimizer adam(params, config);
  std::mt19937_64 rng(config.seed);
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  double best_dev = -1.0;
  result.params = params;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) Shuffle(order, rng);
    double epoch_loss = 0.0;
    for (size_t d : order) {
      grad.SetZero();
      size_t count = 0;
      const double loss =
          DocumentLoss(params, train[d], config.gamma, &grad, nullptr, &count);
      if (!std::isfinite(loss)) {
        std::string block = NonFiniteBlock(params);
        if (block.empty()) block = NonFiniteBlock(grad);
        throw Error("non-finite loss on document '" + train[d].id +
                    "' (parameter block: " +
                    (block.empty() ? std::string("none") : block) + ")");
      }
      if (count == 0) continue;
      epoch_loss += loss;
      L2Penalty(params, config.lambda, &grad);
      adam.Step(&params, grad);
      const std::string bad = NonFiniteBlock(params);
      if (!bad.empty()) {
        throw Error("parameter block '" + bad +
                    "' became non-finite after document '" + train[d].id + "'");
      }
    }
    result.epoch_loss.push_back(epoch_loss);
    if (dev) {
      const double acc = Accuracy(params, *dev);
      result.dev_accuracy.push_back(acc);
      if (acc > best_dev) {
        best_dev = acc;
        result.best_epoch = epoch;
        result.params = params;
      }
    }
  }
  if (!dev) result.params = params;
  return result;
}

GradCheckReport GradCheck(const ModelParams &params,
                          const std::vector<DocumentFeatures> &fixture,
                          double gamma, double lambda,
                          const GradCheckOptions &options) {
  const bool freeze = params.config.inference == Inference::kGlobal &&
                      params.config.flow == GradientFlow::kStopGradient;
  std::vector<Messages> frozen;
  if (freeze) {
    for (const DocumentFeatures &doc : fixture) {
      frozen.push_back(DocumentPass(params, doc).messages());
    }
  }
  const std::vector<Messages> *fm = freeze ? &frozen : nullptr;

  ModelParams analytic = ModelParams::Zeros(params.config);
  TotalLoss(params, fixture, gamma, lambda, fm, &analytic);

  GradCheckReport report;
  ModelParams probe = params;
  auto probe_blocks = probe.Blocks();
  auto grad_blocks = analytic.Blocks();
  for (size_t b = 0; b < probe_blocks.size(); ++b) {
    if (!probe_blocks[b].active) continue;
    GradCheckReport::Block br;
    br.name = probe_blocks[b].name;
    for (size_t k = 0; k < probe_blocks[b].values.size(); ++k) {
      double &theta = probe_blocks[b].values[k];
      const double saved = theta;
      theta = saved + options.step;
      const double up = TotalLoss(probe, fixture, gamma, lambda, fm, nullptr);
      theta = saved - options.step;
      const double down = TotalLoss(probe, fixture, gamma, lambda, fm, nullptr);
      theta = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double a = grad_blocks[b].values[k];
      const double abs_err = std::abs(a - numeric);
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options.floor});
      br.max_abs_error = std::max(br.max_abs_error, abs_err);
      br.max_rel_error = std::max(br.max_rel_error, abs_err / denom);
      ++br.count;
    }
    report.max_rel_error = std::max(report.max_rel_error, br.max_rel_error);
    report.blocks.push_back(std::move(br));
  }
  return report;
}

}  // namespace elink

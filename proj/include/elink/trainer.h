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

#ifndef ELINK_TRAINER_H_
#define ELINK_TRAINER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "elink/base.h"
#include "elink/features.h"
#include "elink/global_inference.h"
#include "elink/params.h"

namespace elink {

struct TrainConfig {
  double gamma = 0.01;    // ranking margin
  double lambda = 1e-7;   // L2 weight on combiner parameters
  double lr = 1e-3;
  int epochs = 2;         // 2 for the local model, 10 with the global model
  uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool shuffle = true;    // reshuffle document order every epoch

  void Validate() const;
};

// sum_e max(0, gamma - s(gold) + s(e)) over all candidates, the gold one
// included (it contributes exactly gamma). When `grad` is non-empty it
// receives dL/ds.
double MarginLoss(std::span<const double> scores, int gold, double gamma,
                  std::span<double> grad = {});

double L2Penalty(std::span<const double> alpha, double lambda);

// lambda * ||alpha||^2 over the combiner blocks used by the configured
// inference mode. Adds 2 lambda alpha to `grad` when given.
double L2Penalty(const ModelParams &params, double lambda,
                 ModelParams *grad = nullptr);

// Sum of margin losses over the document's trainable mentions (gold among
// the candidates). Accumulates gradients into `grad` when given. `frozen`
// replaces the LBP run by fixed messages.
double DocumentLoss(const ModelParams &params, const DocumentFeatures &doc,
                    double gamma, ModelParams *grad = nullptr,
                    const Messages *frozen = nullptr,
                    size_t *trainable = nullptr);

// Adam with bias correction.
class AdamOptimizer {
 public:
  AdamOptimizer(const ModelParams &shape, const TrainConfig &config);
  void Step(ModelParams *params, const ModelParams &grad);

 private:
  TrainConfig config_;
  std::vector<Vector> m_;
  std::vector<Vector> v_;
  int64_t t_ = 0;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_loss;  // summed margin loss seen in each epoch
  size_t trainable_mentions = 0;   // per epoch
  size_t skipped_mentions = 0;     // gold missing from the candidates
  std::vector<double> dev_accuracy;
  int best_epoch = -1;             // epoch of the kept parameters (dev only)
};

// Trains from `init`, one optimizer step per document batch. With a dev set
// the parameters of the best dev epoch are returned.
TrainResult Train(const std::vector<DocumentFeatures> &train,
                  const ModelParams &init, const TrainConfig &config,
                  const std::vector<DocumentFeatures> *dev = nullptr);

// Fraction of in-KB mentions whose top-scored candidate is the gold one.
double Accuracy(const ModelParams &params,
                const std::vector<DocumentFeatures> &docs);

struct GradCheckOptions {
  double step = 1e-4;
  // Relative errors use max(|analytic|, |numeric|, floor) as denominator, so
  // near-zero gradients are compared in absolute terms.
  double floor = 1e-6;
};

struct GradCheckReport {
  struct Block {
    std::string name;
    size_t count = 0;
    double max_rel_error = 0.0;
    double max_abs_error = 0.0;
  };
  std::vector<Block> blocks;
  double max_rel_error = 0.0;
};

// Compares the analytic gradient of the total loss (margin losses plus the
// L2 term) with central differences for every active parameter. With the
// stop-gradient flow, LBP messages are computed once at `params` and held
// fixed in every perturbed evaluation.
GradCheckReport GradCheck(const ModelParams &params,
                          const std::vector<DocumentFeatures> &fixture,
                          double gamma, double lambda,
                          const GradCheckOptions &options = {});

}  // namespace elink

#endif  // ELINK_TRAINER_H_

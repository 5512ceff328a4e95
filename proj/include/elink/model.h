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

#ifndef ELINK_MODEL_H_
#define ELINK_MODEL_H_

#include <memory>
#include <vector>

#include "elink/base.h"
#include "elink/combiner.h"
#include "elink/features.h"
#include "elink/global_inference.h"
#include "elink/local_model.h"
#include "elink/params.h"

namespace elink {

// Forward values of one mention inside a document pass.
struct MentionPass {
  AttentionResult attention;
  Vector psi_long;
  std::vector<Vector> local_inputs;
  std::vector<Combiner::Cache> local_caches;
  Vector local;  // f (local inference) or f_ctx (global inference)

  // Global inference only.
  Vector g_hat;
  Vector g_input;  // g_hat shifted so that its maximum is 0
  int g_argmax = -1;
  std::vector<Vector> final_inputs;
  std::vector<Combiner::Cache> final_caches;
  Vector rho;

  Vector score;  // s(e): local or rho
  int Best() const { return ArgMax(score); }
};

struct PassOptions {
  // When set, LBP is skipped and g_hat is assembled from these messages.
  const Messages *frozen_messages = nullptr;
};

// Forward pass of the full model over one document batch, keeping what the
// backward pass needs.
class DocumentPass {
 public:
  DocumentPass(const ModelParams &params, const DocumentFeatures &doc,
               PassOptions options = {});

  const std::vector<MentionPass> &mentions() const { return mentions_; }

  // Messages of the LBP run (empty for local inference or single mentions).
  const Messages &messages() const { return lbp_.messages; }

  // dscore[i][e] = dL/ds_i(e). Accumulates into `grad`.
  void Backward(const std::vector<Vector> &dscore, ModelParams *grad) const;

 private:
  const ModelParams &params_;
  const DocumentFeatures &doc_;
  bool global_;
  bool frozen_;
  std::vector<MentionPass> mentions_;
  PairwiseScores pairwise_;
  LbpResult lbp_;
  std::unique_ptr<LbpTape> tape_;
};

// Feature vector fed to the local combiner for candidate e.
Vector LocalInput(const MentionFeatures &m, double psi_long, size_t e);
// Feature vector fed to the context combiner (no prior).
Vector ContextInput(const MentionFeatures &m, double psi_long, size_t e);

}  // namespace elink

#endif  // ELINK_MODEL_H_

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

#ifndef ELINK_FEATURES_H_
#define ELINK_FEATURES_H_

#include <string>
#include <vector>

#include "elink/base.h"
#include "elink/dataset.h"
#include "elink/local_model.h"
#include "elink/params.h"

namespace elink {

// Parameter-independent inputs of one mention, resolved against the tables
// once so training epochs only redo the parameterized part.
struct MentionFeatures {
  std::string id;
  std::vector<EntityId> candidates;
  std::vector<Vector> entity_vecs;  // x_e per candidate
  std::vector<Vector> words;        // in-vocabulary long-context words
  Vector extra;      // psi_sim or Jaccard per candidate; empty for baseline
  Vector prior;
  Vector log_prior;  // floored
  int gold = -1;     // gold index in candidates, -1 when absent
  bool in_kb = false;
};

struct DocumentFeatures {
  std::string id;
  std::vector<MentionFeatures> mentions;
};

struct FeatureStats {
  size_t mentions = 0;
  size_t sim_floor_hits = 0;   // candidates missing from the similarity table
  size_t missing_types = 0;    // candidates missing from the type map
  size_t empty_contexts = 0;   // mentions without an in-vocabulary word
  size_t gold_missing = 0;     // in-KB mentions whose gold is not a candidate
};

MentionFeatures BuildMentionFeatures(const Mention &mention,
                                     const Resources &resources,
                                     const ModelConfig &config,
                                     FeatureStats *stats = nullptr);

// Splits documents into batches of at most kMaxBatchMentions mentions.
std::vector<DocumentFeatures> BuildFeatures(
    const std::vector<Document> &documents, const Resources &resources,
    const ModelConfig &config, FeatureStats *stats = nullptr);

}  // namespace elink

#endif  // ELINK_FEATURES_H_

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

#ifndef ELINK_TYPING_H_
#define ELINK_TYPING_H_

#include "elink/base.h"
#include "elink/dataset.h"
#include "elink/local_model.h"
#include "elink/params.h"
#include "elink/type_map.h"

namespace elink {

// |a n b| / |a u b|. Two empty sets score 0.
double JaccardSim(const TypeSet &a, const TypeSet &b);

// Types attributed to the mention: the gold entity's types in the oracle
// setting, the externally predicted types otherwise. Throws when the source
// is unavailable (no typed gold, or no predicted types).
TypeSet MentionTypes(const Mention &mention, const TypeMap &types,
                     TypeSource source);

// Jaccard similarity of each candidate's types with the mention's types.
// Candidates missing from the map score 0 and are counted in `missing`.
Vector TypeFeature(const Mention &mention, const TypeMap &types,
                   TypeSource source, size_t *missing = nullptr);

// Context score with explicit types: f_ctx(psi_long, Jaccard) per candidate.
MentionScores ScoreMentionTyped(const Mention &mention,
                                const Resources &resources,
                                const ModelParams &params);

}  // namespace elink

#endif  // ELINK_TYPING_H_

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

#include "elink/typing.h"

#include <algorithm>
#include <iterator>

#include "elink/features.h"
#include "elink/model.h"

namespace elink {

double JaccardSim(const TypeSet &a, const TypeSet &b) {
  if (a.empty() && b.empty()) return 0.0;
  size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const size_t unite = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(unite);
}

TypeSet MentionTypes(const Mention &mention, const TypeMap &types,
                     TypeSource source) {
  if (source == TypeSource::kPredict) {
    if (!mention.mention_types) {
      throw Error("mention '" + mention.id + "' has no predicted types");
    }
    return TypeSet(mention.mention_types->begin(),
                   mention.mention_types->end());
  }
  if (!mention.gold) {
    throw Error("oracle types need a gold entity for mention '" + mention.id +
                "'");
  }
  auto it = types.find(*mention.gold);
  if (it == types.end()) {
    throw Error("gold entity '" + *mention.gold + "' of mention '" +
                mention.id + "' is not in the type map");
  }
  return it->second;
}

Vector TypeFeature(const Mention &mention, const TypeMap &types,
                   TypeSource source, size_t *missing) {
  const TypeSet tm = MentionTypes(mention, types, source);
  Vector out;
  out.reserve(mention.candidates.size());
  for (const Candidate &c : mention.candidates) {
    auto it = types.find(c.entity);
    if (it == types.end()) {
      out.push_back(0.0);
      if (missing) ++*missing;
      continue;
    }
    out.push_back(JaccardSim(tm, it->second));
  }
  return out;
}

MentionScores ScoreMentionTyped(const Mention &mention,
                                const Resources &resources,
                                const ModelParams &params) {
  if (params.config.variant != Variant::kTyped) {
    throw Error("ScoreMentionTyped needs parameters of the typed variant");
  }
  DocumentFeatures doc;
  doc.mentions.push_back(BuildMentionFeatures(mention, resources, params.config));
  const MentionFeatures &m = doc.mentions[0];
  AttentionResult att = AttendContext(m.words, m.entity_vecs, params.attention,
                                      params.config.top_words);
  MentionScores out;
  for (size_t e = 0; e < m.candidates.size(); ++e) {
    CandidateScore s;
    s.entity = m.candidates[e];
    s.psi_long = PsiLong(m.entity_vecs[e], att.h, params.bilinear);
    s.jaccard = m.extra[e];
    s.log_prior = m.log_prior[e];
    s.combined = params.context.Forward(ContextInput(m, s.psi_long, e));
    out.candidates.push_back(std::move(s));
  }
  return out;
}

}  // namespace elink

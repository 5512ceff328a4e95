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

#include "elink/features.h"

#include "elink/typing.h"

namespace elink {
namespace {

Vector RowVector(const EmbeddingTable &table, size_t row) {
  auto r = table.row(row);
  return Vector(r.begin(), r.end());
}

}  // namespace

MentionFeatures BuildMentionFeatures(const Mention &mention,
                                     const Resources &resources,
                                     const ModelConfig &config,
                                     FeatureStats *stats) {
  if (!resources.words || !resources.entities) {
    throw Error("word and entity tables are required");
  }
  if (resources.words->dim() != config.dim ||
      resources.entities->dim() != config.dim) {
    throw Error("word/entity table dim does not match model dim " +
                std::to_string(config.dim));
  }
  if (mention.candidates.empty()) {
    throw Error("mention '" + mention.id + "' has no candidates");
  }
  MentionFeatures f;
  f.id = mention.id;
  for (const Candidate &c : mention.candidates) {
    f.candidates.push_back(c.entity);
    auto row = resources.entities->Find(c.entity);
    if (!row) {
      throw Error("mention '" + mention.id + "': candidate '" + c.entity +
                  "' has no entity embedding");
    }
    f.entity_vecs.push_back(RowVector(*resources.entities, *row));
    f.prior.push_back(c.prior);
    f.log_prior.push_back(LogPrior(c.prior));
  }
  for (const std::string &w : mention.long_ctx) {
    if (auto row = resources.words->Find(w)) {
      f.words.push_back(RowVector(*resources.words, *row));
    }
  }
  f.gold = mention.GoldIndex();
  f.in_kb = mention.gold.has_value();

  FeatureStats local;
  switch (config.variant) {
    case Variant::kBaseline:
      break;
    case Variant::kWithSim:
      if (!resources.sim || !resources.mention_vectors) {
        throw Error("the similarity variant needs a pooled entity table and "
                    "mention context vectors");
      }
      f.extra = PsiSim(mention, *resources.sim, *resources.mention_vectors,
                       config.sim_floor, &local.sim_floor_hits);
      break;
    case Variant::kTyped:
      if (!resources.types) throw Error("the typed variant needs a type map");
      f.extra = TypeFeature(mention, *resources.types, config.type_source,
                            &local.missing_types);
      break;
  }
  if (stats) {
    ++stats->mentions;
    stats->sim_floor_hits += local.sim_floor_hits;
    stats->missing_types += local.missing_types;
    if (f.words.empty()) ++stats->empty_contexts;
    if (f.in_kb && f.gold < 0) ++stats->gold_missing;
  }
  return f;
}

std::vector<DocumentFeatures> BuildFeatures(
    const std::vector<Document> &documents, const Resources &resources,
    const ModelConfig &config, FeatureStats *stats) {
  std::vector<DocumentFeatures> out;
  for (const Document &doc : documents) {
    for (const Document &batch : SplitIntoBatches(doc)) {
      DocumentFeatures df;
      df.id = batch.id;
      for (const Mention &m : batch.mentions) {
        df.mentions.push_back(BuildMentionFeatures(m, resources, config, stats));
      }
      out.push_back(std::move(df));
    }
  }
  return out;
}

}  // namespace elink

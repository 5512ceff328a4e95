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

#include "elink/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <unordered_set>

#include "json.hpp"

namespace elink {
namespace {

using json = nlohmann::json;

[[noreturn]] void Fail(const std::string &where, const std::string &what) {
  throw Error(where + ": " + what);
}

const json &Field(const json &obj, const char *name, const std::string &where) {
  auto it = obj.find(name);
  if (it == obj.end()) Fail(where, std::string("missing field '") + name + "'");
  return *it;
}

std::string GetString(const json &obj, const char *name,
                      const std::string &where) {
  const json &v = Field(obj, name, where);
  if (!v.is_string()) Fail(where + "." + name, "expected string");
  return v.get<std::string>();
}

std::vector<std::string> GetTokens(const json &obj, const char *name,
                                   const std::string &where) {
  const json &v = Field(obj, name, where);
  const std::string path = where + "." + name;
  if (!v.is_array()) Fail(path, "expected array of strings");
  std::vector<std::string> tokens;
  tokens.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) {
      Fail(path + "[" + std::to_string(i) + "]", "expected string");
    }
    tokens.push_back(v[i].get<std::string>());
  }
  return tokens;
}

Mention ParseMention(const json &j, const std::string &where,
                     const DatasetOptions &options) {
  if (!j.is_object()) Fail(where, "expected object");
  Mention m;
  m.id = GetString(j, "id", where);
  if (m.id.empty()) Fail(where + ".id", "empty mention id");
  m.surface = GetTokens(j, "surface", where);
  m.left_ctx = GetTokens(j, "left_ctx", where);
  m.right_ctx = GetTokens(j, "right_ctx", where);
  m.long_ctx = GetTokens(j, "long_ctx", where);
  if (m.long_ctx.size() > options.max_long_context) {
    m.long_ctx.resize(options.max_long_context);
  }

  const json &cands = Field(j, "candidates", where);
  const std::string cpath = where + ".candidates";
  if (!cands.is_array()) Fail(cpath, "expected array");
  if (cands.empty()) Fail(cpath, "empty candidate list");
  for (size_t i = 0; i < cands.size(); ++i) {
    const std::string cw = cpath + "[" + std::to_string(i) + "]";
    Candidate c;
    c.entity = GetString(cands[i], "entity", cw);
    if (c.entity.empty()) Fail(cw + ".entity", "empty entity id");
    const json &p = Field(cands[i], "prior", cw);
    if (!p.is_number()) Fail(cw + ".prior", "expected number");
    c.prior = p.get<double>();
    if (!(c.prior >= 0.0 && c.prior <= 1.0)) {
      Fail(cw + ".prior", "prior out of range (" + p.dump() + ")");
    }
    m.candidates.push_back(std::move(c));
  }

  auto gold = j.find("gold");
  if (gold != j.end() && !gold->is_null()) {
    if (!gold->is_string()) Fail(where + ".gold", "expected string or null");
    m.gold = gold->get<std::string>();
  }
  auto types = j.find("mention_types");
  if (types != j.end() && !types->is_null()) {
    m.mention_types = GetTokens(j, "mention_types", where);
  }
  return m;
}

json MentionToJson(const Mention &m) {
  json cands = json::array();
  for (const Candidate &c : m.candidates) {
    cands.push_back({{"entity", c.entity}, {"prior", c.prior}});
  }
  json j = {{"id", m.id},
            {"surface", m.surface},
            {"left_ctx", m.left_ctx},
            {"right_ctx", m.right_ctx},
            {"long_ctx", m.long_ctx},
            {"candidates", std::move(cands)},
            {"gold", m.gold ? json(*m.gold) : json(nullptr)}};
  if (m.mention_types) j["mention_types"] = *m.mention_types;
  return j;
}

}  // namespace

int Mention::GoldIndex() const {
  if (!gold) return -1;
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].entity == *gold) return static_cast<int>(i);
  }
  return -1;
}

std::vector<Document> ParseDataset(std::string_view text,
                                   const DatasetOptions &options) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception &e) {
    throw Error(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) Fail("$", "expected object");
  const json &docs = Field(root, "documents", "$");
  if (!docs.is_array()) Fail("$.documents", "expected array");

  std::vector<Document> documents;
  documents.reserve(docs.size());
  std::unordered_set<std::string> mention_ids;
  for (size_t d = 0; d < docs.size(); ++d) {
    const std::string where = "$.documents[" + std::to_string(d) + "]";
    if (!docs[d].is_object()) Fail(where, "expected object");
    Document doc;
    doc.id = GetString(docs[d], "id", where);
    const json &mentions = Field(docs[d], "mentions", where);
    if (!mentions.is_array()) Fail(where + ".mentions", "expected array");
    if (mentions.empty()) Fail(where + ".mentions", "document has no mentions");
    for (size_t i = 0; i < mentions.size(); ++i) {
      const std::string mw = where + ".mentions[" + std::to_string(i) + "]";
      Mention m = ParseMention(mentions[i], mw, options);
      if (!mention_ids.insert(m.id).second) {
        Fail(mw + ".id", "duplicate mention id '" + m.id + "'");
      }
      doc.mentions.push_back(std::move(m));
    }
    documents.push_back(std::move(doc));
  }
  return documents;
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

std::vector<Document> LoadDataset(const std::string &path,
                                  const DatasetOptions &options) {
  try {
    return ParseDataset(ReadFile(path), options);
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

std::string DatasetToJson(const std::vector<Document> &documents) {
  json docs = json::array();
  for (const Document &doc : documents) {
    json mentions = json::array();
    for (const Mention &m : doc.mentions) mentions.push_back(MentionToJson(m));
    docs.push_back({{"id", doc.id}, {"mentions", std::move(mentions)}});
  }
  json root = {{"documents", std::move(docs)}};
  return root.dump();
}

void SaveDataset(const std::vector<Document> &documents,
                 const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << DatasetToJson(documents) << '\n';
  if (!out) throw Error("write failed for " + path);
}

std::vector<Document> SplitIntoBatches(const Document &document,
                                       size_t limit) {
  if (limit == 0) throw Error("batch limit must be positive");
  std::vector<Document> batches;
  for (size_t start = 0; start < document.mentions.size(); start += limit) {
    size_t end = std::min(document.mentions.size(), start + limit);
    Document batch;
    batch.id = document.id;
    batch.mentions.assign(document.mentions.begin() + start,
                          document.mentions.begin() + end);
    batches.push_back(std::move(batch));
  }
  return batches;
}

double LogPrior(double prior) { return std::log(std::max(prior, kPriorFloor)); }

}  // namespace elink

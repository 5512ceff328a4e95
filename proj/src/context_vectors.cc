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

#include "elink/context_vectors.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "elink/embedding_table.h"
#include "json.hpp"

namespace elink {
namespace {

using json = nlohmann::json;

std::vector<float> ParseVec(const json &v, uint32_t *dim,
                            const std::string &where) {
  if (!v.is_array()) throw Error(where + ": 'vec' must be an array");
  if (v.empty()) throw Error(where + ": empty vector");
  if (*dim == 0) *dim = static_cast<uint32_t>(v.size());
  if (v.size() != *dim) {
    throw Error(where + ": vector has dim " + std::to_string(v.size()) +
                ", expected " + std::to_string(*dim));
  }
  std::vector<float> out;
  out.reserve(v.size());
  for (const json &x : v) {
    if (!x.is_number()) throw Error(where + ": non-numeric vector entry");
    float f = x.get<float>();
    if (!std::isfinite(f)) throw Error(where + ": non-finite vector entry");
    out.push_back(f);
  }
  return out;
}

template <typename Fn>
void ForEachLine(const std::string &path, Fn fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception &e) {
      throw Error(where + ": malformed JSON: " + e.what());
    }
    if (!j.is_object()) throw Error(where + ": expected object");
    fn(j, where);
  }
}

std::string StringField(const json &j, const char *name,
                        const std::string &where) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string()) {
    throw Error(where + ": missing string field '" + name + "'");
  }
  return it->get<std::string>();
}

}  // namespace

void ForEachContextVector(const std::string &path, uint32_t dim,
                          const std::function<void(ContextVector &&)> &fn) {
  ForEachLine(path, [&](const json &j, const std::string &where) {
    ContextVector cv;
    cv.entity = StringField(j, "entity", where);
    if (cv.entity.empty()) throw Error(where + ": empty entity id");
    cv.source_id = StringField(j, "source", where);
    auto vec = j.find("vec");
    if (vec == j.end()) throw Error(where + ": missing field 'vec'");
    cv.vec = ParseVec(*vec, &dim, where);
    fn(std::move(cv));
  });
}

std::vector<ContextVector> LoadContextVectors(const std::string &path,
                                              uint32_t dim) {
  std::vector<ContextVector> out;
  ForEachContextVector(path, dim,
                       [&](ContextVector &&cv) { out.push_back(std::move(cv)); });
  return out;
}

void SaveContextVectors(const std::vector<ContextVector> &vectors,
                        const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  for (const ContextVector &cv : vectors) {
    json j = {{"entity", cv.entity}, {"source", cv.source_id}, {"vec", cv.vec}};
    out << j.dump() << '\n';
  }
  if (!out) throw Error("write failed for " + path);
}

std::vector<ContextVector> LoadContextVectorsBinary(
    const std::string &matrix_path, const std::string &entity_ids_path,
    const std::string &source_ids_path) {
  RawMatrix m = ReadEmb1(matrix_path);
  std::vector<std::string> entities = ReadLines(entity_ids_path);
  std::vector<std::string> sources = ReadLines(source_ids_path);
  if (entities.size() != m.rows || sources.size() != m.rows) {
    throw Error(matrix_path + ": id files do not match the " +
                std::to_string(m.rows) + " rows of the matrix");
  }
  std::vector<ContextVector> out(m.rows);
  for (size_t i = 0; i < m.rows; ++i) {
    out[i].entity = std::move(entities[i]);
    out[i].source_id = std::move(sources[i]);
    auto first = m.values.begin() + i * m.dim;
    out[i].vec.assign(first, first + m.dim);
    for (float v : out[i].vec) {
      if (!std::isfinite(v)) {
        throw Error(matrix_path + ": non-finite value in row " +
                    std::to_string(i));
      }
    }
  }
  return out;
}

MentionVectors LoadMentionVectors(const std::string &path, uint32_t dim) {
  MentionVectors out;
  ForEachLine(path, [&](const json &j, const std::string &where) {
    std::string id = StringField(j, "mention", where);
    auto vec = j.find("vec");
    if (vec == j.end()) throw Error(where + ": missing field 'vec'");
    if (!out.emplace(id, ParseVec(*vec, &dim, where)).second) {
      throw Error(where + ": duplicate mention '" + id + "'");
    }
  });
  return out;
}

void SaveMentionVectors(const MentionVectors &vectors,
                        const std::string &path) {
  std::vector<const MentionVectors::value_type *> rows;
  for (const auto &entry : vectors) rows.push_back(&entry);
  std::sort(rows.begin(), rows.end(),
            [](auto *a, auto *b) { return a->first < b->first; });
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  for (const auto *row : rows) {
    json j = {{"mention", row->first}, {"vec", row->second}};
    out << j.dump() << '\n';
  }
  if (!out) throw Error("write failed for " + path);
}

}  // namespace elink

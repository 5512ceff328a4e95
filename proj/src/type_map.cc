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

#include "elink/type_map.h"

#include <fstream>
#include <sstream>

#include "elink/dataset.h"
#include "json.hpp"

namespace elink {

using json = nlohmann::json;

TypeMap ParseTypeMap(const std::string &ndjson) {
  TypeMap types;
  std::istringstream in(ndjson);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception &e) {
      throw Error(where + ": malformed JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("entity") || !j["entity"].is_string() ||
        !j.contains("types") || !j["types"].is_array()) {
      throw Error(where + ": expected {\"entity\": str, \"types\": [str]}");
    }
    std::string entity = j["entity"].get<std::string>();
    if (entity.empty()) throw Error(where + ": empty entity id");
    TypeSet set;
    for (const json &t : j["types"]) {
      if (!t.is_string()) throw Error(where + ": type ids must be strings");
      set.insert(t.get<std::string>());
    }
    if (!types.emplace(entity, std::move(set)).second) {
      throw Error(where + ": duplicate entity '" + entity + "'");
    }
  }
  return types;
}

TypeMap LoadTypeMap(const std::string &path) {
  try {
    return ParseTypeMap(ReadFile(path));
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

void SaveTypeMap(const TypeMap &types, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  for (const auto &[entity, set] : types) {
    json j = {{"entity", entity}, {"types", json(set)}};
    out << j.dump() << '\n';
  }
  if (!out) throw Error("write failed for " + path);
}

}  // namespace elink

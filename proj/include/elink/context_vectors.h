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

#ifndef ELINK_CONTEXT_VECTORS_H_
#define ELINK_CONTEXT_VECTORS_H_

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "elink/base.h"

namespace elink {

// Masked-context vector for one anchor context of an entity.
struct ContextVector {
  EntityId entity;
  std::string source_id;
  std::vector<float> vec;
};

// Streams {"entity": str, "source": str, "vec": [float]} lines. `dim` of 0
// accepts the dimension of the first record; every record must then match.
void ForEachContextVector(const std::string &path, uint32_t dim,
                          const std::function<void(ContextVector &&)> &fn);
std::vector<ContextVector> LoadContextVectors(const std::string &path,
                                              uint32_t dim = 0);
void SaveContextVectors(const std::vector<ContextVector> &vectors,
                        const std::string &path);

// Binary variant: an EMB1 matrix, an id file naming the entity of each row
// and a second line file naming the source of each row.
std::vector<ContextVector> LoadContextVectorsBinary(
    const std::string &matrix_path, const std::string &entity_ids_path,
    const std::string &source_ids_path);

// Mention-context vectors keyed by mention id, from NDJSON lines of the form
// {"mention": str, "vec": [float]}.
using MentionVectors = std::unordered_map<std::string, std::vector<float>>;
MentionVectors LoadMentionVectors(const std::string &path, uint32_t dim = 0);
void SaveMentionVectors(const MentionVectors &vectors, const std::string &path);

}  // namespace elink

#endif  // ELINK_CONTEXT_VECTORS_H_

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

#ifndef ELINK_TYPE_MAP_H_
#define ELINK_TYPE_MAP_H_

#include <map>
#include <set>
#include <string>

#include "elink/base.h"

namespace elink {

using TypeSet = std::set<std::string>;
using TypeMap = std::map<EntityId, TypeSet>;

// Reads NDJSON lines of the form {"entity": str, "types": [str]}. Blank lines
// are skipped; a second line for the same entity is an error.
TypeMap LoadTypeMap(const std::string &path);
TypeMap ParseTypeMap(const std::string &ndjson);

void SaveTypeMap(const TypeMap &types, const std::string &path);

}  // namespace elink

#endif  // ELINK_TYPE_MAP_H_

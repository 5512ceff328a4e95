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

#ifndef ELINK_CHECKPOINT_H_
#define ELINK_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "elink/base.h"
#include "elink/params.h"

namespace elink {

// Named tensor with float64 payload.
struct Tensor {
  std::string name;
  std::vector<uint32_t> shape;
  Vector values;
};

// Binary container: "ELCK", version, a JSON metadata string, then tensors.
// All integers little-endian.
struct Checkpoint {
  std::string meta;
  std::vector<Tensor> tensors;

  const Tensor &Get(const std::string &name) const;
  bool Has(const std::string &name) const;
};

void WriteCheckpoint(const Checkpoint &checkpoint, const std::string &path);
Checkpoint ReadCheckpoint(const std::string &path);

std::string ConfigToJson(const ModelConfig &config);
ModelConfig ConfigFromJson(const std::string &json);

Checkpoint ToCheckpoint(const ModelParams &params);
ModelParams FromCheckpoint(const Checkpoint &checkpoint);

void SaveModel(const ModelParams &params, const std::string &path);
ModelParams LoadModel(const std::string &path);

}  // namespace elink

#endif  // ELINK_CHECKPOINT_H_

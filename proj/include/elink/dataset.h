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

#ifndef ELINK_DATASET_H_
#define ELINK_DATASET_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elink/base.h"

namespace elink {

// Priors are floored to this value before taking their log.
inline constexpr double kPriorFloor = 1e-12;

// Long-range context window cap (K).
inline constexpr size_t kDefaultLongContext = 100;

// Maximum number of mentions scored jointly as one document batch.
inline constexpr size_t kMaxBatchMentions = 64;

struct Candidate {
  EntityId entity;
  double prior = 0.0;  // p(e|m) in [0, 1]

  bool operator==(const Candidate &) const = default;
};

struct Mention {
  std::string id;
  std::vector<std::string> surface;
  std::vector<std::string> left_ctx;
  std::vector<std::string> right_ctx;
  std::vector<std::string> long_ctx;
  std::vector<Candidate> candidates;
  std::optional<EntityId> gold;
  // Types predicted for the mention by an external typing system.
  std::optional<std::vector<std::string>> mention_types;

  // Index of the gold entity in the candidate list, or -1.
  int GoldIndex() const;

  bool operator==(const Mention &) const = default;
};

struct Document {
  std::string id;
  std::vector<Mention> mentions;

  bool operator==(const Document &) const = default;
};

struct DatasetOptions {
  // long_ctx lists longer than this are truncated to their first K words.
  size_t max_long_context = kDefaultLongContext;
};

// Parses the dataset JSON. Errors carry the JSON path of the offending field,
// or the line/column for syntax errors.
std::vector<Document> ParseDataset(std::string_view json,
                                   const DatasetOptions &options = {});
std::vector<Document> LoadDataset(const std::string &path,
                                  const DatasetOptions &options = {});

std::string DatasetToJson(const std::vector<Document> &documents);
void SaveDataset(const std::vector<Document> &documents,
                 const std::string &path);

// Splits a document into consecutive batches of at most `limit` mentions,
// preserving mention order. Batches keep the document id.
std::vector<Document> SplitIntoBatches(const Document &document,
                                       size_t limit = kMaxBatchMentions);

double LogPrior(double prior);

// Reads a whole file into memory.
std::string ReadFile(const std::string &path);

}  // namespace elink

#endif  // ELINK_DATASET_H_

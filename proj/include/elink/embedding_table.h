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

#ifndef ELINK_EMBEDDING_TABLE_H_
#define ELINK_EMBEDDING_TABLE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "elink/base.h"

namespace elink {

// Immutable id -> float vector matrix. Rows are stored row-major in a single
// contiguous buffer.
//
// On-disk layout ("EMB1"): 4 magic bytes, u32 row count, u32 dim (both little
// endian), then count * dim little-endian IEEE-754 floats. A companion UTF-8
// file lists one id per line, line i naming row i.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  // Validates the matrix shape, finiteness and id uniqueness.
  EmbeddingTable(uint32_t dim, std::vector<std::string> ids,
                 std::vector<float> matrix);

  size_t size() const { return ids_.size(); }
  uint32_t dim() const { return dim_; }
  bool empty() const { return ids_.empty(); }

  const std::vector<std::string> &ids() const { return ids_; }
  const std::vector<float> &matrix() const { return matrix_; }

  std::span<const float> row(size_t index) const {
    return {matrix_.data() + index * dim_, dim_};
  }

  std::optional<size_t> Find(std::string_view id) const;
  bool Contains(std::string_view id) const { return Find(id).has_value(); }

  // Throws Error for ids that are not in the table.
  std::span<const float> Lookup(std::string_view id) const;

 private:
  uint32_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> matrix_;
  std::unordered_map<std::string, size_t> index_;
};

// An empty ids_path means IdsPathFor(matrix_path).
EmbeddingTable LoadEmbeddings(const std::string &matrix_path,
                              const std::string &ids_path = "");

void SaveEmbeddings(const EmbeddingTable &table,
                    const std::string &matrix_path,
                    const std::string &ids_path = "");

// Raw EMB1 matrix I/O, shared with the context-vector binary format.
struct RawMatrix {
  uint32_t rows = 0;
  uint32_t dim = 0;
  std::vector<float> values;
};
RawMatrix ReadEmb1(const std::string &path);
void WriteEmb1(const std::string &path, uint32_t rows, uint32_t dim,
               std::span<const float> values);

// Reads a newline separated id file. A trailing newline is optional.
std::vector<std::string> ReadLines(const std::string &path);

// Derives the companion id path for an embedding matrix: "x.emb" -> "x.ids".
std::string IdsPathFor(const std::string &matrix_path);

}  // namespace elink

#endif  // ELINK_EMBEDDING_TABLE_H_

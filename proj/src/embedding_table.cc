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

#include "elink/embedding_table.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace elink {
namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

uint32_t DecodeU32(const unsigned char *p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

void EncodeU32(uint32_t v, unsigned char *p) {
  p[0] = v & 0xff;
  p[1] = (v >> 8) & 0xff;
  p[2] = (v >> 16) & 0xff;
  p[3] = (v >> 24) & 0xff;
}

}  // namespace

EmbeddingTable::EmbeddingTable(uint32_t dim, std::vector<std::string> ids,
                               std::vector<float> matrix)
    : dim_(dim), ids_(std::move(ids)), matrix_(std::move(matrix)) {
  if (dim_ == 0) throw Error("embedding dim must be positive");
  if (matrix_.size() != ids_.size() * static_cast<size_t>(dim_)) {
    throw Error("embedding matrix has " + std::to_string(matrix_.size()) +
                " values, expected " + std::to_string(ids_.size()) + " x " +
                std::to_string(dim_));
  }
  index_.reserve(ids_.size());
  for (size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i].empty()) {
      throw Error("empty id at row " + std::to_string(i));
    }
    if (!index_.emplace(ids_[i], i).second) {
      throw Error("duplicate id '" + ids_[i] + "' at row " +
                  std::to_string(i));
    }
    for (float v : row(i)) {
      if (!std::isfinite(v)) {
        throw Error("non-finite value in row " + std::to_string(i) + " ('" +
                    ids_[i] + "')");
      }
    }
  }
}

std::optional<size_t> EmbeddingTable::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const float> EmbeddingTable::Lookup(std::string_view id) const {
  auto index = Find(id);
  if (!index) throw Error("unknown id '" + std::string(id) + "'");
  return row(*index);
}

RawMatrix ReadEmb1(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  unsigned char header[12];
  if (!in.read(reinterpret_cast<char *>(header), sizeof(header))) {
    throw Error(path + ": truncated header");
  }
  if (std::memcmp(header, kMagic, 4) != 0) {
    throw Error(path + ": magic mismatch (expected EMB1)");
  }
  RawMatrix m;
  m.rows = DecodeU32(header + 4);
  m.dim = DecodeU32(header + 8);
  const size_t count = static_cast<size_t>(m.rows) * m.dim;
  std::vector<unsigned char> bytes(count * 4);
  if (!in.read(reinterpret_cast<char *>(bytes.data()), bytes.size())) {
    throw Error(path + ": truncated payload, expected " +
                std::to_string(count) + " floats");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(path + ": trailing bytes after payload");
  }
  m.values.resize(count);
  for (size_t i = 0; i < count; ++i) {
    m.values[i] = std::bit_cast<float>(DecodeU32(&bytes[i * 4]));
  }
  return m;
}

void WriteEmb1(const std::string &path, uint32_t rows, uint32_t dim,
               std::span<const float> values) {
  if (values.size() != static_cast<size_t>(rows) * dim) {
    throw Error("WriteEmb1: value count does not match rows x dim");
  }
  std::vector<unsigned char> bytes(12 + values.size() * 4);
  std::memcpy(bytes.data(), kMagic, 4);
  EncodeU32(rows, &bytes[4]);
  EncodeU32(dim, &bytes[8]);
  for (size_t i = 0; i < values.size(); ++i) {
    EncodeU32(std::bit_cast<uint32_t>(values[i]), &bytes[12 + i * 4]);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char *>(bytes.data()), bytes.size());
  if (!out) throw Error("write failed for " + path);
}

std::vector<std::string> ReadLines(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  std::vector<std::string> lines;
  size_t start = 0;
  while (start < content.size()) {
    size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::string IdsPathFor(const std::string &matrix_path) {
  std::filesystem::path p(matrix_path);
  p.replace_extension(".ids");
  return p.string();
}

EmbeddingTable LoadEmbeddings(const std::string &matrix_path,
                              const std::string &ids_path) {
  RawMatrix m = ReadEmb1(matrix_path);
  const std::string ip = ids_path.empty() ? IdsPathFor(matrix_path) : ids_path;
  std::vector<std::string> ids = ReadLines(ip);
  if (ids.size() != m.rows) {
    throw Error(ip + ": " + std::to_string(ids.size()) +
                " ids but header of " + matrix_path + " declares " +
                std::to_string(m.rows) + " rows");
  }
  return EmbeddingTable(m.dim, std::move(ids), std::move(m.values));
}

void SaveEmbeddings(const EmbeddingTable &table,
                    const std::string &matrix_path,
                    const std::string &ids_path) {
  WriteEmb1(matrix_path, static_cast<uint32_t>(table.size()), table.dim(),
            table.matrix());
  const std::string ip = ids_path.empty() ? IdsPathFor(matrix_path) : ids_path;
  std::ofstream out(ip, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + ip);
  for (const std::string &id : table.ids()) out << id << '\n';
  if (!out) throw Error("write failed for " + ip);
}

}  // namespace elink

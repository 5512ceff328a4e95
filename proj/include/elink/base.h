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

#ifndef ELINK_BASE_H_
#define ELINK_BASE_H_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace elink {

// All recoverable failures in the library are reported with this exception.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

using Vector = std::vector<double>;

// Entities are keyed by their canonical string id (e.g. a page title).
using EntityId = std::string;

// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
inline uint64_t Fnv1a64(std::string_view data,
                        uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Fisher-Yates with a fixed draw rule so shuffles replay bit-identically
// for a given engine state (std::shuffle leaves the algorithm unspecified).
template <typename T>
void Shuffle(std::vector<T> &items, std::mt19937_64 &rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = rng() % i;
    std::swap(items[i - 1], items[j]);
  }
}

// Returns the index of the first maximal element; -1 for an empty range.
inline int ArgMax(const Vector &values) {
  int best = -1;
  for (size_t i = 0; i < values.size(); ++i) {
    if (best < 0 || values[i] > values[best]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace elink

#endif  // ELINK_BASE_H_

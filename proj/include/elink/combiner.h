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

#ifndef ELINK_COMBINER_H_
#define ELINK_COMBINER_H_

#include <random>
#include <span>
#include <vector>

#include "elink/base.h"

namespace elink {

inline constexpr int kCombinerHidden = 100;

// Two-layer feed-forward scorer: y = w2 . relu(W1 x + b1) + b2.
struct Combiner {
  int inputs = 0;
  int hidden = 0;
  Vector w1;  // hidden x inputs, row-major
  Vector b1;  // hidden
  Vector w2;  // hidden
  Vector b2;  // 1

  Combiner() = default;
  Combiner(int inputs, int hidden = kCombinerHidden);

  // Gaussian weights, zero biases.
  void Initialize(std::mt19937_64 &rng, double stddev);

  // Hidden pre-activations for the backward pass.
  struct Cache {
    Vector pre;
  };

  double Forward(std::span<const double> x, Cache *cache = nullptr) const;

  // Accumulates dy * dy/dtheta into `grad` (same shape as *this) and, if
  // `dx` is non-empty, writes dy * dy/dx into it.
  void Backward(std::span<const double> x, const Cache &cache, double dy,
                Combiner *grad, std::span<double> dx) const;
};

}  // namespace elink

#endif  // ELINK_COMBINER_H_

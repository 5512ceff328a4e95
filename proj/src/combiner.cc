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

#include "elink/combiner.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace elink {

Combiner::Combiner(int inputs, int hidden)
    : inputs(inputs),
      hidden(hidden),
      w1(static_cast<size_t>(inputs) * hidden, 0.0),
      b1(hidden, 0.0),
      w2(hidden, 0.0),
      b2(1, 0.0) {}

void Combiner::Initialize(std::mt19937_64 &rng, double stddev) {
  std::normal_distribution<double> normal(0.0, stddev);
  for (double &w : w1) w = normal(rng);
  for (double &w : w2) w = normal(rng);
  std::fill(b1.begin(), b1.end(), 0.0);
  std::fill(b2.begin(), b2.end(), 0.0);
}

double Combiner::Forward(std::span<const double> x, Cache *cache) const {
  if (static_cast<int>(x.size()) != inputs) {
    throw Error("combiner expects " + std::to_string(inputs) +
                " inputs, got " + std::to_string(x.size()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw Error("non-finite combiner input");
  }
  if (cache) cache->pre.resize(hidden);
  double y = b2[0];
  for (int h = 0; h < hidden; ++h) {
    double a = b1[h];
    const double *row = &w1[static_cast<size_t>(h) * inputs];
    for (int i = 0; i < inputs; ++i) a += row[i] * x[i];
    if (cache) cache->pre[h] = a;
    if (a > 0.0) y += w2[h] * a;
  }
  return y;
}

void Combiner::Backward(std::span<const double> x, const Cache &cache,
                        double dy, Combiner *grad,
                        std::span<double> dx) const {
  std::fill(dx.begin(), dx.end(), 0.0);
  grad->b2[0] += dy;
  for (int h = 0; h < hidden; ++h) {
    const double a = cache.pre[h];
    if (a <= 0.0) continue;
    grad->w2[h] += dy * a;
    const double da = dy * w2[h];
    grad->b1[h] += da;
    const size_t off = static_cast<size_t>(h) * inputs;
    for (int i = 0; i < inputs; ++i) {
      grad->w1[off + i] += da * x[i];
      if (!dx.empty()) dx[i] += da * w1[off + i];
    }
  }
}

}  // namespace elink

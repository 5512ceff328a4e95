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

#include "elink/params.h"

#include <algorithm>

namespace elink {

void ModelConfig::Validate() const {
  if (dim == 0) throw Error("embedding dim must be positive");
  if (hidden <= 0) throw Error("combiner hidden width must be positive");
  if (top_words < 1) throw Error("attention top-R must be at least 1");
  if (!(lbp.damping > 0.0 && lbp.damping <= 1.0)) {
    throw Error("LBP damping must lie in (0, 1]");
  }
  if (lbp.loops < 1) throw Error("LBP loop count must be positive");
}

int LocalInputs(Variant variant) {
  return variant == Variant::kBaseline ? 2 : 3;
}

int ContextInputs(Variant variant) {
  return variant == Variant::kBaseline ? 1 : 2;
}

const char *VariantName(Variant v) {
  switch (v) {
    case Variant::kBaseline: return "baseline";
    case Variant::kWithSim: return "with_sim";
    case Variant::kTyped: return "typed";
  }
  return "?";
}

Variant ParseVariant(const std::string &name) {
  if (name == "baseline") return Variant::kBaseline;
  if (name == "with_sim") return Variant::kWithSim;
  if (name == "typed") return Variant::kTyped;
  throw Error("unknown model variant '" + name + "'");
}

ModelParams ModelParams::Zeros(const ModelConfig &config) {
  config.Validate();
  ModelParams p;
  p.config = config;
  p.attention.assign(config.dim, 0.0);
  p.bilinear.assign(config.dim, 0.0);
  p.pairwise.assign(config.dim, 0.0);
  p.local = Combiner(LocalInputs(config.variant), config.hidden);
  p.context = Combiner(ContextInputs(config.variant), config.hidden);
  p.final = Combiner(2, config.hidden);
  return p;
}

ModelParams ModelParams::Initialize(const ModelConfig &config,
                                    uint64_t seed) {
  ModelParams p = Zeros(config);
  std::fill(p.attention.begin(), p.attention.end(), 1.0);
  std::fill(p.bilinear.begin(), p.bilinear.end(), 1.0);
  std::fill(p.pairwise.begin(), p.pairwise.end(), 1.0);
  std::mt19937_64 rng(seed);
  p.local.Initialize(rng, 0.02);
  p.context.Initialize(rng, 0.02);
  p.final.Initialize(rng, 0.02);
  return p;
}

namespace {

template <typename T, typename P>
std::vector<ModelParams::BlockRef<T>> CollectBlocks(P &p) {
  const bool global = p.config.inference == Inference::kGlobal;
  std::vector<ModelParams::BlockRef<T>> out;
  auto add = [&](const char *name, auto &v, bool combiner, bool active) {
    out.push_back({name, std::span<T>(v), combiner, active});
  };
  add("attention", p.attention, false, true);
  add("bilinear", p.bilinear, false, true);
  add("pairwise", p.pairwise, false, global);
  add("local.w1", p.local.w1, true, !global);
  add("local.b1", p.local.b1, true, !global);
  add("local.w2", p.local.w2, true, !global);
  add("local.b2", p.local.b2, true, !global);
  add("context.w1", p.context.w1, true, global);
  add("context.b1", p.context.b1, true, global);
  add("context.w2", p.context.w2, true, global);
  add("context.b2", p.context.b2, true, global);
  add("final.w1", p.final.w1, true, global);
  add("final.b1", p.final.b1, true, global);
  add("final.w2", p.final.w2, true, global);
  add("final.b2", p.final.b2, true, global);
  return out;
}

}  // namespace

std::vector<ModelParams::BlockRef<double>> ModelParams::Blocks() {
  return CollectBlocks<double>(*this);
}

std::vector<ModelParams::BlockRef<const double>> ModelParams::Blocks() const {
  return CollectBlocks<const double>(*this);
}

void ModelParams::SetZero() {
  for (auto &b : Blocks()) std::fill(b.values.begin(), b.values.end(), 0.0);
}

bool ModelParams::operator==(const ModelParams &other) const {
  auto a = Blocks();
  auto b = other.Blocks();
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!std::equal(a[i].values.begin(), a[i].values.end(),
                    b[i].values.begin(), b[i].values.end())) {
      return false;
    }
  }
  return true;
}

}  // namespace elink

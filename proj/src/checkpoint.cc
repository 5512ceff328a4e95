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

#include "elink/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace elink {
namespace {

constexpr char kMagic[4] = {'E', 'L', 'C', 'K'};
constexpr uint32_t kVersion = 1;

void PutU32(std::string *out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>(v >> (8 * i)));
}

void PutU64(std::string *out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<char>(v >> (8 * i)));
}

class Reader {
 public:
  Reader(const std::string &data, const std::string &path)
      : data_(data), path_(path) {}

  void Need(size_t n) {
    if (data_.size() - pos_ < n) {
      throw Error(path_ + ": truncated checkpoint at byte " +
                  std::to_string(pos_));
    }
  }
  uint32_t U32() {
    Need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<uint32_t>(static_cast<uint8_t>(data_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  uint64_t U64() {
    Need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<uint64_t>(static_cast<uint8_t>(data_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  std::string Bytes(size_t n) {
    Need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool AtEnd() const { return pos_ == data_.size(); }

 private:
  const std::string &data_;
  const std::string &path_;
  size_t pos_ = 0;
};

const char *InferenceName(Inference i) {
  return i == Inference::kGlobal ? "global" : "local";
}

const char *FlowName(GradientFlow f) {
  return f == GradientFlow::kUnrolled ? "unrolled" : "stop_gradient";
}

const char *TypeSourceName(TypeSource t) {
  return t == TypeSource::kPredict ? "predict" : "oracle";
}

std::vector<uint32_t> CombinerShape(const std::string &leaf,
                                    const Combiner &c) {
  if (leaf == "w1") {
    return {static_cast<uint32_t>(c.hidden), static_cast<uint32_t>(c.inputs)};
  }
  if (leaf == "b2") return {1};
  return {static_cast<uint32_t>(c.hidden)};
}

}  // namespace

const Tensor &Checkpoint::Get(const std::string &name) const {
  for (const Tensor &t : tensors) {
    if (t.name == name) return t;
  }
  throw Error("checkpoint has no tensor '" + name + "'");
}

bool Checkpoint::Has(const std::string &name) const {
  for (const Tensor &t : tensors) {
    if (t.name == name) return true;
  }
  return false;
}

void WriteCheckpoint(const Checkpoint &checkpoint, const std::string &path) {
  std::string out(kMagic, 4);
  PutU32(&out, kVersion);
  PutU32(&out, static_cast<uint32_t>(checkpoint.meta.size()));
  out += checkpoint.meta;
  PutU32(&out, static_cast<uint32_t>(checkpoint.tensors.size()));
  for (const Tensor &t : checkpoint.tensors) {
    size_t count = 1;
    for (uint32_t d : t.shape) count *= d;
    if (count != t.values.size()) {
      throw Error("tensor '" + t.name + "' shape does not match its size");
    }
    PutU32(&out, static_cast<uint32_t>(t.name.size()));
    out += t.name;
    PutU32(&out, static_cast<uint32_t>(t.shape.size()));
    for (uint32_t d : t.shape) PutU32(&out, d);
    for (double v : t.values) PutU64(&out, std::bit_cast<uint64_t>(v));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error("write failed: " + path);
}

Checkpoint ReadCheckpoint(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  Reader r(data, path);
  if (r.Bytes(4) != std::string(kMagic, 4)) {
    throw Error(path + ": not a checkpoint (bad magic)");
  }
  const uint32_t version = r.U32();
  if (version != kVersion) {
    throw Error(path + ": unsupported checkpoint version " +
                std::to_string(version));
  }
  Checkpoint ck;
  ck.meta = r.Bytes(r.U32());
  const uint32_t n = r.U32();
  for (uint32_t i = 0; i < n; ++i) {
    Tensor t;
    t.name = r.Bytes(r.U32());
    const uint32_t rank = r.U32();
    size_t count = 1;
    for (uint32_t k = 0; k < rank; ++k) {
      t.shape.push_back(r.U32());
      count *= t.shape.back();
    }
    r.Need(count * 8);
    t.values.resize(count);
    for (double &v : t.values) v = std::bit_cast<double>(r.U64());
    ck.tensors.push_back(std::move(t));
  }
  if (!r.AtEnd()) throw Error(path + ": trailing bytes after checkpoint");
  return ck;
}

std::string ConfigToJson(const ModelConfig &c) {
  nlohmann::json j = {
      {"variant", VariantName(c.variant)},
      {"inference", InferenceName(c.inference)},
      {"dim", c.dim},
      {"hidden", c.hidden},
      {"top_words", c.top_words},
      {"lbp_damping", c.lbp.damping},
      {"lbp_loops", c.lbp.loops},
      {"gradient_flow", FlowName(c.flow)},
      {"final_log_prior", c.final_log_prior},
      {"sim_floor", c.sim_floor},
      {"type_source", TypeSourceName(c.type_source)},
  };
  return j.dump();
}

ModelConfig ConfigFromJson(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("bad model config: ") + e.what());
  }
  ModelConfig c;
  try {
    c.variant = ParseVariant(j.at("variant").get<std::string>());
    const std::string inf = j.at("inference").get<std::string>();
    if (inf != "local" && inf != "global") {
      throw Error("unknown inference '" + inf + "'");
    }
    c.inference = inf == "global" ? Inference::kGlobal : Inference::kLocal;
    c.dim = j.at("dim").get<uint32_t>();
    c.hidden = j.at("hidden").get<int>();
    c.top_words = j.at("top_words").get<int>();
    c.lbp.damping = j.at("lbp_damping").get<double>();
    c.lbp.loops = j.at("lbp_loops").get<int>();
    c.flow = j.at("gradient_flow").get<std::string>() == "unrolled"
                 ? GradientFlow::kUnrolled
                 : GradientFlow::kStopGradient;
    c.final_log_prior = j.at("final_log_prior").get<bool>();
    c.sim_floor = j.at("sim_floor").get<double>();
    c.type_source = j.at("type_source").get<std::string>() == "predict"
                        ? TypeSource::kPredict
                        : TypeSource::kOracle;
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("bad model config: ") + e.what());
  }
  c.Validate();
  return c;
}

Checkpoint ToCheckpoint(const ModelParams &params) {
  Checkpoint ck;
  ck.meta = ConfigToJson(params.config);
  const Combiner *combiners[] = {&params.local, &params.context, &params.final};
  for (const auto &b : params.Blocks()) {
    Tensor t;
    t.name = b.name;
    t.values.assign(b.values.begin(), b.values.end());
    const size_t dot = b.name.find('.');
    if (dot == std::string::npos) {
      t.shape = {static_cast<uint32_t>(b.values.size())};
    } else {
      const std::string head = b.name.substr(0, dot);
      const Combiner *c = head == "local"     ? combiners[0]
                          : head == "context" ? combiners[1]
                                              : combiners[2];
      t.shape = CombinerShape(b.name.substr(dot + 1), *c);
    }
    ck.tensors.push_back(std::move(t));
  }
  return ck;
}

ModelParams FromCheckpoint(const Checkpoint &ck) {
  ModelParams p = ModelParams::Zeros(ConfigFromJson(ck.meta));
  for (auto &b : p.Blocks()) {
    const Tensor &t = ck.Get(b.name);
    if (t.values.size() != b.values.size()) {
      throw Error("checkpoint tensor '" + b.name + "' has " +
                  std::to_string(t.values.size()) + " values, expected " +
                  std::to_string(b.values.size()));
    }
    std::copy(t.values.begin(), t.values.end(), b.values.begin());
  }
  return p;
}

void SaveModel(const ModelParams &params, const std::string &path) {
  WriteCheckpoint(ToCheckpoint(params), path);
}

ModelParams LoadModel(const std::string &path) {
  return FromCheckpoint(ReadCheckpoint(path));
}

}  // namespace elink

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

#include "elink/probe.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "json.hpp"

namespace elink {
namespace {

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

const TypeSet &LabelsOf(const TypeMap &labels, const EntityId &id) {
  auto it = labels.find(id);
  if (it == labels.end()) throw Error("no type labels for entity '" + id + "'");
  return it->second;
}

// BCE with logits of one entity; adds dL/dlogit to `dlogit` when non-empty.
double EntityLoss(const ProbeModel &m, std::span<const float> x,
                  const TypeSet &gold, std::span<double> dlogit) {
  double loss = 0.0;
  for (size_t j = 0; j < m.types.size(); ++j) {
    const double z = m.Logit(x, j);
    const double t = gold.count(m.types[j]) ? 1.0 : 0.0;
    loss += Softplus(z) - t * z;
    if (!dlogit.empty()) dlogit[j] = Sigmoid(z) - t;
  }
  return loss;
}

double F1(double p, double r) { return p + r == 0 ? 0.0 : 2 * p * r / (p + r); }

}  // namespace

ProbeModel ProbeModel::Zeros(std::vector<std::string> types, uint32_t dim,
                             bool per_type_bias) {
  if (types.empty()) throw Error("probe needs at least one type");
  ProbeModel m;
  m.dim = dim;
  m.per_type_bias = per_type_bias;
  m.w.assign(types.size() * dim, 0.0);
  m.b.assign(per_type_bias ? types.size() : 1, 0.0);
  m.types = std::move(types);
  return m;
}

double ProbeModel::Logit(std::span<const float> x, size_t j) const {
  const double *wj = w.data() + j * dim;
  double z = per_type_bias ? b[j] : b[0];
  for (uint32_t k = 0; k < dim; ++k) z += wj[k] * x[k];
  return z;
}

TypeSet ProbeModel::Predict(std::span<const float> x, double threshold) const {
  TypeSet out;
  for (size_t j = 0; j < types.size(); ++j) {
    if (Sigmoid(Logit(x, j)) >= threshold) out.insert(types[j]);
  }
  return out;
}

std::vector<std::string> TypeVocabulary(const TypeMap &labels) {
  std::set<std::string> all;
  for (const auto &[e, ts] : labels) all.insert(ts.begin(), ts.end());
  return {all.begin(), all.end()};
}

ProbeSplit SplitEntities(const EmbeddingTable &table, const TypeMap &labels,
                         uint64_t seed) {
  std::vector<EntityId> ids;
  for (const auto &[e, ts] : labels) {
    if (table.Contains(e)) ids.push_back(e);
  }
  std::mt19937_64 rng(seed);
  Shuffle(ids, rng);
  const size_t n = ids.size();
  const size_t n_train = n * 8 / 10;
  const size_t n_dev = n / 10;
  ProbeSplit s;
  s.train.assign(ids.begin(), ids.begin() + n_train);
  s.dev.assign(ids.begin() + n_train, ids.begin() + n_train + n_dev);
  s.test.assign(ids.begin() + n_train + n_dev, ids.end());
  return s;
}

double ProbeLoss(const ProbeModel &model, const EmbeddingTable &table,
                 const TypeMap &labels, const std::vector<EntityId> &ids) {
  if (ids.empty()) return 0.0;
  double total = 0.0;
  for (const EntityId &id : ids) {
    total += EntityLoss(model, table.Lookup(id),
                        LabelsOf(labels, id), {});
  }
  return total / ids.size();
}

ProbeTrainResult ProbeTrain(const EmbeddingTable &table, const TypeMap &labels,
                            const ProbeSplit &split,
                            const ProbeConfig &config) {
  if (split.train.empty()) throw Error("probe training split is empty");
  if (split.dev.empty()) throw Error("probe dev split is empty");
  if (config.batch == 0) throw Error("probe batch size must be positive");
  ProbeModel model =
      ProbeModel::Zeros(TypeVocabulary(labels), table.dim(), config.per_type_bias);
  ProbeTrainResult result;
  result.model = model;
  result.best_dev_loss = ProbeLoss(model, table, labels, split.dev);

  const size_t T = model.types.size();
  const uint32_t d = model.dim;
  Vector gw(model.w.size()), gb(model.b.size());
  Vector mw(gw.size(), 0.0), vw(gw.size(), 0.0);
  Vector mb(gb.size(), 0.0), vb(gb.size(), 0.0);
  Vector dlogit(T);
  int64_t t = 0;
  std::mt19937_64 rng(config.seed);
  std::vector<EntityId> order = split.train;
  int stale = 0;

  auto adam = [&](Vector &p, const Vector &g, Vector &m, Vector &v) {
    const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
    for (size_t k = 0; k < p.size(); ++k) {
      m[k] = config.beta1 * m[k] + (1 - config.beta1) * g[k];
      v[k] = config.beta2 * v[k] + (1 - config.beta2) * g[k] * g[k];
      p[k] -= config.lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + config.epsilon);
    }
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Shuffle(order, rng);
    for (size_t start = 0; start < order.size(); start += config.batch) {
      const size_t end = std::min(order.size(), start + config.batch);
      std::fill(gw.begin(), gw.end(), 0.0);
      std::fill(gb.begin(), gb.end(), 0.0);
      const double scale = 1.0 / static_cast<double>(end - start);
      for (size_t i = start; i < end; ++i) {
        auto x = table.Lookup(order[i]);
        EntityLoss(model, x, LabelsOf(labels, order[i]), dlogit);
        for (size_t j = 0; j < T; ++j) {
          const double g = dlogit[j] * scale;
          double *row = gw.data() + j * d;
          for (uint32_t k = 0; k < d; ++k) row[k] += g * x[k];
          gb[config.per_type_bias ? j : 0] += g;
        }
      }
      ++t;
      adam(model.w, gw, mw, vw);
      adam(model.b, gb, mb, vb);
    }
    const double dev = ProbeLoss(model, table, labels, split.dev);
    if (!std::isfinite(dev)) throw Error("probe dev loss became non-finite");
    result.dev_loss.push_back(dev);
    if (result.best_epoch < 0 || dev < result.best_dev_loss) {
      result.best_dev_loss = dev;
      result.best_epoch = epoch;
      result.model = model;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  return result;
}

ProbeMetrics SetMetrics(const std::vector<TypeSet> &predicted,
                        const std::vector<TypeSet> &gold) {
  if (predicted.size() != gold.size()) {
    throw Error("predicted and gold type lists differ in length");
  }
  ProbeMetrics m;
  m.entities = gold.size();
  size_t exact = 0, n_pred = 0, n_gold = 0;
  double p_sum = 0.0, r_sum = 0.0;
  for (size_t i = 0; i < gold.size(); ++i) {
    size_t hit = 0;
    for (const std::string &t : predicted[i]) hit += gold[i].count(t);
    m.tp += hit;
    m.fp += predicted[i].size() - hit;
    m.fn += gold[i].size() - hit;
    exact += predicted[i] == gold[i];
    if (!predicted[i].empty()) {
      ++n_pred;
      p_sum += static_cast<double>(hit) / predicted[i].size();
    }
    if (!gold[i].empty()) {
      ++n_gold;
      r_sum += static_cast<double>(hit) / gold[i].size();
    }
  }
  if (m.entities > 0) m.strict_accuracy = static_cast<double>(exact) / m.entities;
  const double mp = m.tp + m.fp == 0 ? 0.0 : static_cast<double>(m.tp) / (m.tp + m.fp);
  const double mr = m.tp + m.fn == 0 ? 0.0 : static_cast<double>(m.tp) / (m.tp + m.fn);
  m.micro_f1 = F1(mp, mr);
  m.macro_f1 = F1(n_pred ? p_sum / n_pred : 0.0, n_gold ? r_sum / n_gold : 0.0);
  return m;
}

ProbeMetrics ProbeEval(const ProbeModel &model, const EmbeddingTable &table,
                       const TypeMap &labels, const std::vector<EntityId> &ids,
                       double threshold, int threads) {
  if (table.dim() != model.dim) {
    throw Error("probe dim " + std::to_string(model.dim) +
                " does not match embedding dim " + std::to_string(table.dim()));
  }
  std::vector<TypeSet> predicted(ids.size()), gold(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) gold[i] = LabelsOf(labels, ids[i]);
  std::vector<std::span<const float>> rows(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) rows[i] = table.Lookup(ids[i]);
  const size_t workers = std::max(1, threads);
  auto work = [&](size_t w) {
    for (size_t i = w; i < ids.size(); i += workers) {
      predicted[i] = model.Predict(rows[i], threshold);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto &th : pool) th.join();
  }
  return SetMetrics(predicted, gold);
}

Checkpoint ProbeToCheckpoint(const ProbeModel &model) {
  Checkpoint ck;
  nlohmann::json meta = {{"kind", "probe"},
                         {"types", model.types},
                         {"dim", model.dim},
                         {"per_type_bias", model.per_type_bias}};
  ck.meta = meta.dump();
  ck.tensors.push_back(
      {"probe.w",
       {static_cast<uint32_t>(model.types.size()), model.dim},
       model.w});
  ck.tensors.push_back(
      {"probe.b", {static_cast<uint32_t>(model.b.size())}, model.b});
  return ck;
}

ProbeModel ProbeFromCheckpoint(const Checkpoint &ck) {
  ProbeModel m;
  try {
    const auto meta = nlohmann::json::parse(ck.meta);
    if (meta.value("kind", "") != "probe") throw Error("not a probe checkpoint");
    m = ProbeModel::Zeros(meta.at("types").get<std::vector<std::string>>(),
                          meta.at("dim").get<uint32_t>(),
                          meta.at("per_type_bias").get<bool>());
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("bad probe checkpoint metadata: ") + e.what());
  }
  const Tensor &w = ck.Get("probe.w");
  const Tensor &b = ck.Get("probe.b");
  if (w.values.size() != m.w.size() || b.values.size() != m.b.size()) {
    throw Error("probe checkpoint tensor sizes do not match its metadata");
  }
  m.w = w.values;
  m.b = b.values;
  return m;
}

}  // namespace elink

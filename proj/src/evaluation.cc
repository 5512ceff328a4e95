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

#include "elink/evaluation.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "elink/embedding_table.h"
#include "elink/model.h"
#include "json.hpp"

namespace elink {
namespace {

using json = nlohmann::json;

void Put(json &j, const char *key, const std::optional<double> &v) {
  if (v) j[key] = *v;
}

std::optional<double> Get(const json &j, const char *key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

std::vector<Prediction> PredictDocument(const ModelParams &params,
                                        const DocumentFeatures &doc) {
  const bool global = params.config.inference == Inference::kGlobal;
  const Variant variant = params.config.variant;
  DocumentPass pass(params, doc);
  std::vector<Prediction> out;
  for (size_t i = 0; i < doc.mentions.size(); ++i) {
    const MentionFeatures &m = doc.mentions[i];
    const MentionPass &mp = pass.mentions()[i];
    Prediction p;
    p.doc = doc.id;
    p.mention = m.id;
    p.predicted = m.candidates[mp.Best()];
    for (size_t e = 0; e < m.candidates.size(); ++e) {
      CandidateBreakdown c;
      c.entity = m.candidates[e];
      c.prior = m.prior[e];
      c.log_prior = m.log_prior[e];
      c.psi_long = mp.psi_long[e];
      if (variant == Variant::kWithSim) c.psi_sim = m.extra[e];
      if (variant == Variant::kTyped) c.jaccard = m.extra[e];
      c.local = mp.local[e];
      if (global) {
        c.g_hat = mp.g_hat[e];
        c.rho = mp.rho[e];
      }
      p.candidates.push_back(std::move(c));
    }
    out.push_back(std::move(p));
  }
  return out;
}

// In-KB mentions of the dataset with their candidate lists, keyed by id.
struct GoldIndex {
  struct Entry {
    const Document *doc;
    const Mention *mention;
  };
  std::unordered_map<std::string, Entry> by_id;
  std::vector<std::string> order;  // every mention, dataset order

  explicit GoldIndex(const std::vector<Document> &dataset) {
    for (const Document &d : dataset) {
      for (const Mention &m : d.mentions) {
        by_id[m.id] = {&d, &m};
        order.push_back(m.id);
      }
    }
  }
};

std::unordered_map<std::string, const Prediction *> IndexRun(
    const std::vector<Prediction> &run, const GoldIndex &gold) {
  std::unordered_map<std::string, const Prediction *> out;
  for (const Prediction &p : run) {
    auto it = gold.by_id.find(p.mention);
    if (it == gold.by_id.end()) {
      throw Error("prediction for unknown mention '" + p.mention + "'");
    }
    if (!out.emplace(p.mention, &p).second) {
      throw Error("two predictions for mention '" + p.mention + "'");
    }
    bool listed = false;
    for (const Candidate &c : it->second.mention->candidates) {
      listed |= c.entity == p.predicted;
    }
    if (!listed) {
      throw Error("mention '" + p.mention + "': predicted entity '" +
                  p.predicted + "' is not a candidate");
    }
  }
  return out;
}

const Prediction &Require(
    const std::unordered_map<std::string, const Prediction *> &run,
    const std::string &id) {
  auto it = run.find(id);
  if (it == run.end()) throw Error("no prediction for mention '" + id + "'");
  return *it->second;
}

const CandidateBreakdown *FindCandidate(const Prediction &p,
                                        const EntityId &e) {
  for (const CandidateBreakdown &c : p.candidates) {
    if (c.entity == e) return &c;
  }
  return nullptr;
}

const TypeSet &TypesOf(const TypeMap &types, const EntityId &e) {
  static const TypeSet kEmpty;
  auto it = types.find(e);
  return it == types.end() ? kEmpty : it->second;
}

std::string Percent(size_t n, size_t total) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f",
                total == 0 ? 0.0 : 100.0 * static_cast<double>(n) / total);
  return buf;
}

}  // namespace

std::vector<Prediction> Predict(const ModelParams &params,
                                const std::vector<DocumentFeatures> &docs,
                                int threads) {
  std::vector<std::vector<Prediction>> parts(docs.size());
  const size_t workers =
      std::clamp<size_t>(threads < 1 ? 1 : threads, 1, std::max<size_t>(1, docs.size()));
  if (workers == 1) {
    for (size_t d = 0; d < docs.size(); ++d) {
      parts[d] = PredictDocument(params, docs[d]);
    }
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (size_t d = next++; d < docs.size(); d = next++) {
            parts[d] = PredictDocument(params, docs[d]);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto &t : pool) t.join();
    for (auto &e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<Prediction> out;
  for (auto &part : parts) {
    for (auto &p : part) out.push_back(std::move(p));
  }
  return out;
}

std::string PredictionToJson(const Prediction &p) {
  json j;
  j["doc"] = p.doc;
  j["mention"] = p.mention;
  j["predicted"] = p.predicted;
  json cands = json::array();
  for (const CandidateBreakdown &c : p.candidates) {
    json cj;
    cj["entity"] = c.entity;
    cj["prior"] = c.prior;
    cj["log_prior"] = c.log_prior;
    Put(cj, "psi_long", c.psi_long);
    Put(cj, "psi_sim", c.psi_sim);
    Put(cj, "jaccard", c.jaccard);
    Put(cj, "local", c.local);
    Put(cj, "g_hat", c.g_hat);
    Put(cj, "rho", c.rho);
    cands.push_back(std::move(cj));
  }
  j["candidates"] = std::move(cands);
  return j.dump();
}

Prediction PredictionFromJson(const std::string &line) {
  Prediction p;
  try {
    const json j = json::parse(line);
    p.doc = j.value("doc", std::string());
    p.mention = j.at("mention").get<std::string>();
    p.predicted = j.at("predicted").get<std::string>();
    if (j.contains("candidates")) {
      for (const json &cj : j.at("candidates")) {
        CandidateBreakdown c;
        c.entity = cj.at("entity").get<std::string>();
        c.prior = cj.value("prior", 0.0);
        c.log_prior = cj.value("log_prior", LogPrior(c.prior));
        c.psi_long = Get(cj, "psi_long");
        c.psi_sim = Get(cj, "psi_sim");
        c.jaccard = Get(cj, "jaccard");
        c.local = Get(cj, "local");
        c.g_hat = Get(cj, "g_hat");
        c.rho = Get(cj, "rho");
        p.candidates.push_back(std::move(c));
      }
    }
  } catch (const json::exception &e) {
    throw Error(std::string("bad prediction row: ") + e.what());
  }
  return p;
}

void SaveRun(const std::vector<Prediction> &run, const std::string &path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("cannot write " + path);
  for (const Prediction &p : run) f << PredictionToJson(p) << '\n';
  if (!f) throw Error("write failed: " + path);
}

std::vector<Prediction> LoadRun(const std::string &path) {
  std::vector<Prediction> run;
  size_t n = 0;
  for (const std::string &line : ReadLines(path)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      run.push_back(PredictionFromJson(line));
    } catch (const Error &e) {
      throw Error(path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return run;
}

double MicroF1(const std::vector<Prediction> &run,
               const std::vector<Document> &dataset) {
  GoldIndex gold(dataset);
  auto index = IndexRun(run, gold);
  size_t total = 0, correct = 0;
  for (const std::string &id : gold.order) {
    const Mention &m = *gold.by_id.at(id).mention;
    if (!m.gold) continue;
    ++total;
    if (Require(index, id).predicted == *m.gold) ++correct;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / total;
}

const char *CategoryName(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kCandidateMiss: return "candidate_miss";
    case ErrorCategory::kOther: return "other";
    case ErrorCategory::kDueToPrior: return "due_to_prior";
    case ErrorCategory::kDueToGlobal: return "due_to_global";
    case ErrorCategory::kDueToLocalContext: return "due_to_local_context";
  }
  return "?";
}

size_t ErrorReport::Count(ErrorCategory c) const {
  switch (c) {
    case ErrorCategory::kCandidateMiss: return candidate_miss;
    case ErrorCategory::kOther: return other;
    case ErrorCategory::kDueToPrior: return due_to_prior;
    case ErrorCategory::kDueToGlobal: return due_to_global;
    case ErrorCategory::kDueToLocalContext: return due_to_local_context;
  }
  return 0;
}

ErrorReport CategorizeErrors(const std::vector<Prediction> *baseline,
                             const std::vector<Prediction> &model,
                             const std::vector<Document> &dataset,
                             const ErrorThresholds &thresholds,
                             const TypeMap *types) {
  GoldIndex gold(dataset);
  auto index = IndexRun(model, gold);
  std::unordered_map<std::string, const Prediction *> base_index;
  if (baseline) base_index = IndexRun(*baseline, gold);

  ErrorReport report;
  for (const std::string &id : gold.order) {
    const auto &entry = gold.by_id.at(id);
    const Mention &m = *entry.mention;
    if (!m.gold) continue;
    const Prediction &p = Require(index, id);
    if (p.predicted == *m.gold) continue;

    ErrorRow row;
    row.doc = entry.doc->id;
    row.mention = id;
    row.gold = *m.gold;
    row.predicted = p.predicted;
    if (baseline) row.in_baseline = Require(base_index, id).predicted != *m.gold;
    if (types) {
      row.type_error =
          TypesOf(*types, row.gold) != TypesOf(*types, row.predicted);
    }

    const CandidateBreakdown *pc = FindCandidate(p, p.predicted);
    if (!pc) {
      throw Error("mention '" + id + "': breakdown lacks the predicted entity");
    }
    row.predicted_prior = pc->prior;
    row.predicted_local = pc->local;
    row.predicted_rho = pc->rho;
    const CandidateBreakdown *gc = FindCandidate(p, row.gold);

    if (m.GoldIndex() < 0) {
      row.category = ErrorCategory::kCandidateMiss;
    } else if (!gc) {
      throw Error("mention '" + id + "': breakdown lacks the gold entity");
    } else {
      row.gold_prior = gc->prior;
      row.gold_local = gc->local;
      row.gold_rho = gc->rho;
      for (const CandidateBreakdown &c : p.candidates) {
        if (!c.local) {
          throw Error("mention '" + id +
                      "': breakdown field 'local' missing for '" + c.entity +
                      "'");
        }
      }
      bool gold_wins_local = true;
      for (const CandidateBreakdown &c : p.candidates) {
        if (c.entity != row.gold && *c.local > *gc->local) {
          gold_wins_local = false;
        }
      }
      if (row.type_error && !*row.type_error) {
        row.category = ErrorCategory::kOther;
      } else if (gc->prior < thresholds.prior && pc->prior > gc->prior) {
        row.category = ErrorCategory::kDueToPrior;
      } else if (gold_wins_local && gc->prior >= pc->prior && gc->rho &&
                 pc->rho) {
        row.category = ErrorCategory::kDueToGlobal;
      } else {
        row.category = ErrorCategory::kDueToLocalContext;
      }
    }

    switch (row.category) {
      case ErrorCategory::kCandidateMiss: ++report.candidate_miss; break;
      case ErrorCategory::kOther: ++report.other; break;
      case ErrorCategory::kDueToPrior: ++report.due_to_prior; break;
      case ErrorCategory::kDueToGlobal: ++report.due_to_global; break;
      case ErrorCategory::kDueToLocalContext:
        ++report.due_to_local_context;
        break;
    }
    ++report.total_errors;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string ErrorReportToJson(const ErrorReport &report) {
  json j;
  j["total_errors"] = report.total_errors;
  json counts;
  for (ErrorCategory c :
       {ErrorCategory::kDueToPrior, ErrorCategory::kDueToGlobal,
        ErrorCategory::kDueToLocalContext, ErrorCategory::kCandidateMiss,
        ErrorCategory::kOther}) {
    counts[CategoryName(c)] = report.Count(c);
  }
  j["counts"] = counts;
  json rows = json::array();
  for (const ErrorRow &r : report.rows) {
    json rj;
    rj["doc"] = r.doc;
    rj["mention"] = r.mention;
    rj["gold"] = r.gold;
    rj["predicted"] = r.predicted;
    rj["category"] = CategoryName(r.category);
    rj["gold_prior"] = r.gold_prior;
    rj["predicted_prior"] = r.predicted_prior;
    Put(rj, "gold_local", r.gold_local);
    Put(rj, "predicted_local", r.predicted_local);
    Put(rj, "gold_rho", r.gold_rho);
    Put(rj, "predicted_rho", r.predicted_rho);
    if (r.type_error) rj["type_error"] = *r.type_error;
    if (r.in_baseline) rj["in_baseline"] = *r.in_baseline;
    rows.push_back(std::move(rj));
  }
  j["rows"] = std::move(rows);
  return j.dump(2);
}

std::string ErrorReportTable(const ErrorReport &report) {
  const size_t total = report.due_to_prior + report.due_to_global +
                       report.due_to_local_context;
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-24s %8s %16s\n", "Error Type",
                "# Cases", "Percentage (%)");
  out << line << std::string(50, '-') << '\n';
  const std::pair<const char *, size_t> rows[] = {
      {"Due to prior", report.due_to_prior},
      {"Due to global", report.due_to_global},
      {"Due to local context", report.due_to_local_context},
  };
  for (const auto &[name, n] : rows) {
    std::snprintf(line, sizeof(line), "%-24s %8zu %16s\n", name, n,
                  Percent(n, total).c_str());
    out << line;
  }
  out << std::string(50, '-') << '\n';
  std::snprintf(line, sizeof(line),
                "excluded: %zu candidate miss, %zu other; %zu errors total\n",
                report.candidate_miss, report.other, report.total_errors);
  out << line;
  return out.str();
}

CorrectionReport CompareRuns(const std::vector<Prediction> &a,
                             const std::vector<Prediction> &b,
                             const std::vector<Document> &dataset) {
  GoldIndex gold(dataset);
  auto ia = IndexRun(a, gold);
  auto ib = IndexRun(b, gold);
  if (ia.size() != ib.size()) throw Error("runs cover different mentions");
  for (const auto &[id, p] : ia) {
    if (!ib.count(id)) {
      throw Error("runs cover different mentions ('" + id + "' only in a)");
    }
  }
  CorrectionReport report;
  for (const std::string &id : gold.order) {
    const Mention &m = *gold.by_id.at(id).mention;
    if (!m.gold) continue;
    const bool ok_a = Require(ia, id).predicted == *m.gold;
    const bool ok_b = Require(ib, id).predicted == *m.gold;
    if (!ok_a && ok_b) report.fixed.push_back(id);
    if (ok_a && !ok_b) report.introduced.push_back(id);
  }
  report.f1_a = MicroF1(a, dataset);
  report.f1_b = MicroF1(b, dataset);
  report.delta = report.f1_b - report.f1_a;
  return report;
}

std::string CorrectionReportToJson(const CorrectionReport &report) {
  json j;
  j["fixed"] = report.fixed;
  j["introduced"] = report.introduced;
  j["f1_a"] = report.f1_a;
  j["f1_b"] = report.f1_b;
  j["delta"] = report.delta;
  return j.dump(2);
}

}  // namespace elink

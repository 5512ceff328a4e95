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

// Command-line driver: embedding tables, training, evaluation, error
// analysis, nearest neighbours and the type probe.

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "elink/checkpoint.h"
#include "elink/context_vectors.h"
#include "elink/dataset.h"
#include "elink/embedding_store.h"
#include "elink/embedding_table.h"
#include "elink/evaluation.h"
#include "elink/features.h"
#include "elink/probe.h"
#include "elink/trainer.h"
#include "elink/type_map.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace elink {
namespace {

struct Options {
  // Inputs.
  std::string dataset;
  std::string dev;
  std::string word_emb;
  std::string entity_emb;
  std::string sim_emb;
  std::string ctx_vecs;
  std::string mention_vecs;
  std::string type_map;
  std::string checkpoint;
  std::string run;
  std::string baseline_run;
  std::string query;

  // Model and training.
  std::string mode = "local";
  std::string flow = "stop-gradient";
  double gamma = 0.01;
  double lambda = 1e-7;
  double lr = 1e-3;
  int epochs = -1;  // 2 local, 10 global
  int lbp_loops = 10;
  double damping = 0.5;
  int top_words = 25;
  uint64_t seed = 1;
  int threads = 0;  // 0: all cores for eval, 1 for training

  // build-embeddings / nearest / probe / analyze.
  size_t cap = 100;
  size_t k = 10;
  double prior_threshold = 0.01;
  bool per_type_bias = false;
  int probe_epochs = 200;
  double threshold = 0.5;

  std::string out;
};

// Files are written into a scratch directory next to the output directory
// and moved into place only once every output has been produced.
class Outputs {
 public:
  explicit Outputs(const std::string &dir) : dir_(dir) {
    stage_ = dir_ + ".partial-" + std::to_string(::getpid());
    fs::remove_all(stage_);
    fs::create_directories(stage_);
  }
  ~Outputs() {
    std::error_code ec;
    fs::remove_all(stage_, ec);
  }

  std::string Path(const std::string &name) {
    names_.push_back(name);
    return stage_ + "/" + name;
  }

  void WriteText(const std::string &name, const std::string &text) {
    std::ofstream out(Path(name), std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error("cannot write " + name);
  }

  void Commit() {
    fs::create_directories(dir_);
    for (const std::string &name : names_) {
      fs::rename(stage_ + "/" + name, dir_ + "/" + name);
    }
  }

  const std::vector<std::string> &names() const { return names_; }

 private:
  std::string dir_;
  std::string stage_;
  std::vector<std::string> names_;
};

std::string Hex(uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

class Manifest {
 public:
  explicit Manifest(std::string subcommand) { j_["subcommand"] = subcommand; }

  void Input(const std::string &role, const std::string &path) {
    if (path.empty()) return;
    j_["inputs"][role] = {{"path", path}, {"fnv1a64", Hex(Fnv1a64(ReadFile(path)))}};
  }
  json &config() { return j_["config"]; }
  void Set(const std::string &key, json value) { j_[key] = std::move(value); }

  void Write(Outputs *out) {
    json names = out->names();
    names.push_back("manifest.json");
    j_["outputs"] = names;
    out->WriteText("manifest.json", j_.dump(2) + "\n");
  }

 private:
  json j_;
};

void RequireFile(const std::string &flag, const std::string &path) {
  if (path.empty()) throw Error(flag + " is required");
  if (!fs::is_regular_file(path)) {
    throw Error(flag + ": no such file '" + path + "'");
  }
}

void RequireOut(const Options &o) {
  if (o.out.empty()) throw Error("--out is required");
}

// Maps --mode onto a model configuration.
ModelConfig ConfigForMode(const Options &o) {
  ModelConfig cfg;
  if (o.mode == "local") {
    cfg.variant = Variant::kWithSim;
  } else if (o.mode == "local-global") {
    cfg.variant = Variant::kWithSim;
    cfg.inference = Inference::kGlobal;
  } else if (o.mode == "baseline") {
    cfg.variant = Variant::kBaseline;
  } else if (o.mode == "typed-oracle" || o.mode == "typed-predict") {
    cfg.variant = Variant::kTyped;
    cfg.inference = Inference::kGlobal;
    cfg.type_source = o.mode == "typed-oracle" ? TypeSource::kOracle
                                                : TypeSource::kPredict;
  } else {
    throw Error("unknown --mode '" + o.mode + "'");
  }
  cfg.lbp.loops = o.lbp_loops;
  cfg.lbp.damping = o.damping;
  cfg.top_words = o.top_words;
  if (o.flow == "unrolled") {
    cfg.flow = GradientFlow::kUnrolled;
  } else if (o.flow != "stop-gradient") {
    throw Error("unknown --flow '" + o.flow + "'");
  }
  return cfg;
}

// Tables and side inputs a model variant needs.
struct Inputs {
  std::vector<Document> dataset;
  std::vector<Document> dev;
  EmbeddingTable words;
  EmbeddingTable entities;
  EmbeddingTable sim;
  MentionVectors mention_vectors;
  TypeMap types;
  bool has_sim = false;
  bool has_types = false;

  Resources resources() const {
    Resources r;
    r.words = &words;
    r.entities = &entities;
    if (has_sim) {
      r.sim = &sim;
      r.mention_vectors = &mention_vectors;
    }
    if (has_types) r.types = &types;
    return r;
  }
};

void CheckModelInputs(const Options &o, Variant variant) {
  RequireFile("--dataset", o.dataset);
  if (!o.dev.empty()) RequireFile("--dev", o.dev);
  RequireFile("--word-emb", o.word_emb);
  RequireFile("--word-emb ids", IdsPathFor(o.word_emb));
  RequireFile("--entity-emb", o.entity_emb);
  RequireFile("--entity-emb ids", IdsPathFor(o.entity_emb));
  if (variant == Variant::kWithSim) {
    RequireFile("--sim-emb", o.sim_emb);
    RequireFile("--sim-emb ids", IdsPathFor(o.sim_emb));
    RequireFile("--mention-vecs", o.mention_vecs);
  }
  if (variant == Variant::kTyped) RequireFile("--type-map", o.type_map);
}

Inputs LoadModelInputs(const Options &o, Variant variant, Manifest *manifest) {
  Inputs in;
  in.dataset = LoadDataset(o.dataset);
  manifest->Input("dataset", o.dataset);
  if (!o.dev.empty()) {
    in.dev = LoadDataset(o.dev);
    manifest->Input("dev", o.dev);
  }
  in.words = LoadEmbeddings(o.word_emb);
  in.entities = LoadEmbeddings(o.entity_emb);
  manifest->Input("word_emb", o.word_emb);
  manifest->Input("word_ids", IdsPathFor(o.word_emb));
  manifest->Input("entity_emb", o.entity_emb);
  manifest->Input("entity_ids", IdsPathFor(o.entity_emb));
  if (in.words.dim() != in.entities.dim()) {
    throw Error("word and entity embeddings differ in dimension (" +
                std::to_string(in.words.dim()) + " vs " +
                std::to_string(in.entities.dim()) + ")");
  }
  if (variant == Variant::kWithSim) {
    in.sim = LoadEmbeddings(o.sim_emb);
    in.mention_vectors = LoadMentionVectors(o.mention_vecs, in.sim.dim());
    in.has_sim = true;
    manifest->Input("sim_emb", o.sim_emb);
    manifest->Input("sim_ids", IdsPathFor(o.sim_emb));
    manifest->Input("mention_vecs", o.mention_vecs);
  }
  if (variant == Variant::kTyped) {
    in.types = LoadTypeMap(o.type_map);
    in.has_types = true;
    manifest->Input("type_map", o.type_map);
  }
  return in;
}

void ReportStats(const FeatureStats &s) {
  std::cerr << "mentions: " << s.mentions;
  if (s.gold_missing) std::cerr << ", gold not in candidates: " << s.gold_missing;
  if (s.empty_contexts) std::cerr << ", empty contexts: " << s.empty_contexts;
  if (s.sim_floor_hits) std::cerr << ", candidates without pooled row: " << s.sim_floor_hits;
  if (s.missing_types) std::cerr << ", candidates without types: " << s.missing_types;
  std::cerr << "\n";
}

int Threads(const Options &o) {
  if (o.threads > 0) return o.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string F1Line(double f1) {
  std::ostringstream s;
  s << "F1 = " << std::fixed << std::setprecision(4) << f1;
  return s.str();
}

void BuildEmbeddingsCmd(const Options &o) {
  RequireFile("--ctx-vecs", o.ctx_vecs);
  RequireOut(o);
  if (o.cap == 0) throw Error("--cap must be positive");
  Manifest manifest("build-embeddings");
  manifest.Input("ctx_vecs", o.ctx_vecs);
  manifest.config() = {{"cap", o.cap}, {"seed", o.seed}};
  manifest.Set("seed", o.seed);

  EntityTableBuilder builder(o.cap, o.seed);
  ForEachContextVector(o.ctx_vecs, 0,
                       [&](ContextVector &&cv) { builder.Add(std::move(cv)); });
  EmbeddingTable table = builder.Build();

  Outputs out(o.out);
  SaveEmbeddings(table, out.Path("entities.emb"), out.Path("entities.ids"));
  manifest.Set("entities", table.size());
  manifest.Set("contexts", builder.contexts_seen());
  manifest.Write(&out);
  out.Commit();
  std::cout << "pooled " << builder.contexts_seen() << " contexts into "
            << table.size() << " entities (dim " << table.dim() << ")\n";
}

void TrainCmd(const Options &o) {
  ModelConfig cfg = ConfigForMode(o);
  CheckModelInputs(o, cfg.variant);
  RequireOut(o);
  TrainConfig tc;
  tc.gamma = o.gamma;
  tc.lambda = o.lambda;
  tc.lr = o.lr;
  tc.seed = o.seed;
  tc.epochs = o.epochs >= 0 ? o.epochs
                            : (cfg.inference == Inference::kGlobal ? 10 : 2);
  tc.Validate();

  Manifest manifest("train");
  Inputs in = LoadModelInputs(o, cfg.variant, &manifest);
  cfg.dim = in.words.dim();
  cfg.Validate();

  FeatureStats stats;
  auto train = BuildFeatures(in.dataset, in.resources(), cfg, &stats);
  ReportStats(stats);
  std::vector<DocumentFeatures> dev;
  if (!in.dev.empty()) dev = BuildFeatures(in.dev, in.resources(), cfg);

  ModelParams init = ModelParams::Initialize(cfg, o.seed);
  TrainResult r = Train(train, init, tc, dev.empty() ? nullptr : &dev);

  manifest.Set("seed", o.seed);
  manifest.config() = json::parse(ConfigToJson(cfg));
  manifest.config()["mode"] = o.mode;
  manifest.config()["gamma"] = tc.gamma;
  manifest.config()["lambda"] = tc.lambda;
  manifest.config()["lr"] = tc.lr;
  manifest.config()["epochs"] = tc.epochs;

  json log;
  log["epoch_loss"] = r.epoch_loss;
  log["trainable_mentions"] = r.trainable_mentions;
  log["skipped_mentions"] = r.skipped_mentions;
  if (!dev.empty()) {
    log["dev_accuracy"] = r.dev_accuracy;
    log["best_epoch"] = r.best_epoch;
  }

  Outputs out(o.out);
  SaveModel(r.params, out.Path("model.ckpt"));
  out.WriteText("train_log.json", log.dump(2) + "\n");
  manifest.Write(&out);
  out.Commit();
  for (size_t e = 0; e < r.epoch_loss.size(); ++e) {
    std::cout << "epoch " << e + 1 << " loss " << r.epoch_loss[e] << "\n";
  }
}

void EvalCmd(const Options &o) {
  Manifest manifest("eval");
  if (!o.run.empty()) {
    // Scores an existing run file.
    RequireFile("--run", o.run);
    RequireFile("--dataset", o.dataset);
    auto dataset = LoadDataset(o.dataset);
    auto run = LoadRun(o.run);
    const double f1 = MicroF1(run, dataset);
    if (!o.out.empty()) {
      manifest.Input("dataset", o.dataset);
      manifest.Input("run", o.run);
      manifest.Set("f1", f1);
      Outputs out(o.out);
      manifest.Write(&out);
      out.Commit();
    }
    std::cout << F1Line(f1) << "\n";
    return;
  }
  RequireFile("--checkpoint", o.checkpoint);
  RequireOut(o);
  ModelParams params = LoadModel(o.checkpoint);
  CheckModelInputs(o, params.config.variant);
  manifest.Input("checkpoint", o.checkpoint);
  Inputs in = LoadModelInputs(o, params.config.variant, &manifest);
  FeatureStats stats;
  auto docs = BuildFeatures(in.dataset, in.resources(), params.config, &stats);
  ReportStats(stats);
  auto run = Predict(params, docs, Threads(o));
  const double f1 = MicroF1(run, in.dataset);

  manifest.config() = json::parse(ConfigToJson(params.config));
  manifest.Set("f1", f1);
  Outputs out(o.out);
  SaveRun(run, out.Path("run.ndjson"));
  manifest.Write(&out);
  out.Commit();
  std::cout << F1Line(f1) << "\n";
}

void AnalyzeCmd(const Options &o) {
  RequireFile("--dataset", o.dataset);
  RequireFile("--run", o.run);
  if (!o.baseline_run.empty()) RequireFile("--baseline-run", o.baseline_run);
  if (!o.type_map.empty()) RequireFile("--type-map", o.type_map);
  RequireOut(o);
  Manifest manifest("analyze");
  auto dataset = LoadDataset(o.dataset);
  auto run = LoadRun(o.run);
  manifest.Input("dataset", o.dataset);
  manifest.Input("run", o.run);
  std::optional<std::vector<Prediction>> baseline;
  if (!o.baseline_run.empty()) {
    baseline = LoadRun(o.baseline_run);
    manifest.Input("baseline_run", o.baseline_run);
  }
  std::optional<TypeMap> types;
  if (!o.type_map.empty()) {
    types = LoadTypeMap(o.type_map);
    manifest.Input("type_map", o.type_map);
  }
  ErrorThresholds th;
  th.prior = o.prior_threshold;
  manifest.config() = {{"prior_threshold", th.prior}};

  ErrorReport report = CategorizeErrors(baseline ? &*baseline : nullptr, run,
                                        dataset, th, types ? &*types : nullptr);
  const std::string table = ErrorReportTable(report);
  Outputs out(o.out);
  out.WriteText("errors.json", ErrorReportToJson(report) + "\n");
  out.WriteText("errors.txt", table);
  std::string corrections;
  if (baseline) {
    CorrectionReport c = CompareRuns(*baseline, run, dataset);
    corrections = CorrectionReportToJson(c);
    out.WriteText("corrections.json", corrections + "\n");
    std::cout << "baseline " << F1Line(c.f1_a) << ", model " << F1Line(c.f1_b)
              << ", fixed " << c.fixed.size() << ", introduced "
              << c.introduced.size() << "\n";
  }
  manifest.Write(&out);
  out.Commit();
  std::cout << table;
}

void NearestCmd(const Options &o) {
  const std::string &table_path = o.entity_emb.empty() ? o.sim_emb : o.entity_emb;
  RequireFile("--entity-emb", table_path);
  RequireFile("--entity-emb ids", IdsPathFor(table_path));
  if (!o.ctx_vecs.empty()) RequireFile("--ctx-vecs", o.ctx_vecs);
  if (o.query.empty()) throw Error("--query is required");
  Manifest manifest("nearest");
  EmbeddingTable table = LoadEmbeddings(table_path);
  manifest.Input("table", table_path);
  manifest.Input("ids", IdsPathFor(table_path));
  manifest.config() = {{"query", o.query}, {"k", o.k}};

  json result;
  result["query"] = o.query;
  std::cout << "nearest entities to " << o.query << ":\n";
  for (const Neighbor &n : NearestEntities(table, o.query, o.k)) {
    result["entities"].push_back({{"id", n.id}, {"cosine", n.score}});
    std::cout << "  " << n.id << "\t" << n.score << "\n";
  }
  if (!o.ctx_vecs.empty()) {
    auto store = LoadContextVectors(o.ctx_vecs, table.dim());
    manifest.Input("ctx_vecs", o.ctx_vecs);
    std::cout << "nearest contexts:\n";
    for (const Neighbor &n : NearestContexts(table.Lookup(o.query), store, o.k)) {
      result["contexts"].push_back({{"source", n.id}, {"cosine", n.score}});
      std::cout << "  " << n.id << "\t" << n.score << "\n";
    }
  }
  if (!o.out.empty()) {
    Outputs out(o.out);
    out.WriteText("nearest.json", result.dump(2) + "\n");
    manifest.Write(&out);
    out.Commit();
  }
}

json MetricsJson(const ProbeMetrics &m) {
  return {{"entities", m.entities},   {"strict_accuracy", m.strict_accuracy},
          {"micro_f1", m.micro_f1},   {"macro_f1", m.macro_f1},
          {"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}};
}

void ProbeCmd(const Options &o) {
  RequireFile("--type-map", o.type_map);
  const bool pooled = o.entity_emb.empty();
  if (pooled) {
    RequireFile("--ctx-vecs", o.ctx_vecs);
  } else {
    RequireFile("--entity-emb", o.entity_emb);
    RequireFile("--entity-emb ids", IdsPathFor(o.entity_emb));
  }
  RequireOut(o);
  Manifest manifest("probe");
  EmbeddingTable table;
  if (pooled) {
    EntityTableBuilder builder(o.cap, o.seed);
    ForEachContextVector(o.ctx_vecs, 0,
                         [&](ContextVector &&cv) { builder.Add(std::move(cv)); });
    table = builder.Build();
    manifest.Input("ctx_vecs", o.ctx_vecs);
  } else {
    table = LoadEmbeddings(o.entity_emb);
    manifest.Input("entity_emb", o.entity_emb);
    manifest.Input("entity_ids", IdsPathFor(o.entity_emb));
  }
  TypeMap labels = LoadTypeMap(o.type_map);
  manifest.Input("type_map", o.type_map);

  ProbeConfig pc;
  pc.epochs = o.probe_epochs;
  pc.lr = o.lr;
  pc.seed = o.seed;
  pc.per_type_bias = o.per_type_bias;
  manifest.Set("seed", o.seed);
  manifest.config() = {{"epochs", pc.epochs},         {"lr", pc.lr},
                       {"patience", pc.patience},     {"batch", pc.batch},
                       {"per_type_bias", pc.per_type_bias},
                       {"threshold", o.threshold},    {"cap", o.cap}};

  ProbeSplit split = SplitEntities(table, labels, o.seed);
  ProbeTrainResult r = ProbeTrain(table, labels, split, pc);
  ProbeMetrics dev = ProbeEval(r.model, table, labels, split.dev, o.threshold, Threads(o));
  ProbeMetrics test = ProbeEval(r.model, table, labels, split.test, o.threshold, Threads(o));
  json metrics = {{"dev", MetricsJson(dev)},
                  {"test", MetricsJson(test)},
                  {"best_epoch", r.best_epoch},
                  {"dev_loss", r.dev_loss}};

  Outputs out(o.out);
  WriteCheckpoint(ProbeToCheckpoint(r.model), out.Path("probe.ckpt"));
  out.WriteText("probe_metrics.json", metrics.dump(2) + "\n");
  manifest.Write(&out);
  out.Commit();
  std::cout << "test strict accuracy " << test.strict_accuracy << ", micro F1 "
            << test.micro_f1 << ", macro F1 " << test.macro_f1 << "\n";
}

void AddModelFlags(CLI::App *cmd, Options &o) {
  cmd->add_option("--dataset", o.dataset, "Dataset JSON");
  cmd->add_option("--word-emb", o.word_emb, "Word embeddings (EMB1, ids beside)");
  cmd->add_option("--entity-emb", o.entity_emb, "Entity embeddings (EMB1)");
  cmd->add_option("--sim-emb", o.sim_emb, "Pooled context entity table (EMB1)");
  cmd->add_option("--mention-vecs", o.mention_vecs, "Mention context vectors (NDJSON)");
  cmd->add_option("--type-map", o.type_map, "Entity types (NDJSON)");
  cmd->add_option("--threads", o.threads, "Worker threads");
  cmd->add_option("--out", o.out, "Output directory");
}

}  // namespace
}  // namespace elink

int main(int argc, char **argv) {
  using namespace elink;
  Options o;
  CLI::App app{"Entity linking with pooled context embeddings"};
  app.require_subcommand(1);

  auto *build = app.add_subcommand("build-embeddings", "Pool context vectors into an entity table");
  build->add_option("--ctx-vecs", o.ctx_vecs, "Context vectors (NDJSON)");
  build->add_option("--cap", o.cap, "Contexts sampled per entity")->capture_default_str();
  build->add_option("--seed", o.seed, "Sampling seed")->capture_default_str();
  build->add_option("--out", o.out, "Output directory");

  auto *train = app.add_subcommand("train", "Train a linking model");
  AddModelFlags(train, o);
  train->add_option("--dev", o.dev, "Development dataset for best-epoch selection");
  train->add_option("--mode", o.mode, "local, local-global, baseline, typed-oracle, typed-predict")
      ->capture_default_str();
  train->add_option("--flow", o.flow, "stop-gradient or unrolled")->capture_default_str();
  train->add_option("--gamma", o.gamma, "Ranking margin")->capture_default_str();
  train->add_option("--lambda", o.lambda, "L2 weight on combiners")->capture_default_str();
  train->add_option("--lr", o.lr, "Adam step size")->capture_default_str();
  train->add_option("--epochs", o.epochs, "Epochs (default 2 local, 10 global)");
  train->add_option("--lbp-loops", o.lbp_loops, "LBP rounds")->capture_default_str();
  train->add_option("--damping", o.damping, "LBP damping")->capture_default_str();
  train->add_option("--top-words", o.top_words, "Attention keeps this many words")
      ->capture_default_str();
  train->add_option("--seed", o.seed, "Seed")->capture_default_str();

  auto *eval = app.add_subcommand("eval", "Score a dataset with a checkpoint, or score a run file");
  AddModelFlags(eval, o);
  eval->add_option("--checkpoint", o.checkpoint, "Model checkpoint");
  eval->add_option("--run", o.run, "Existing run file to score");

  auto *analyze = app.add_subcommand("analyze", "Categorize errors and compare runs");
  analyze->add_option("--dataset", o.dataset, "Dataset JSON");
  analyze->add_option("--run", o.run, "Run file of the model");
  analyze->add_option("--baseline-run", o.baseline_run, "Run file of the baseline");
  analyze->add_option("--type-map", o.type_map, "Entity types (NDJSON)");
  analyze->add_option("--prior-threshold", o.prior_threshold, "Low-prior threshold")
      ->capture_default_str();
  analyze->add_option("--out", o.out, "Output directory");

  auto *nearest = app.add_subcommand("nearest", "Nearest entities and contexts by cosine");
  nearest->add_option("--entity-emb", o.entity_emb, "Entity table (EMB1)");
  nearest->add_option("--sim-emb", o.sim_emb, "Alias for --entity-emb");
  nearest->add_option("--ctx-vecs", o.ctx_vecs, "Context vectors to search (NDJSON)");
  nearest->add_option("--query", o.query, "Query entity id");
  nearest->add_option("-k", o.k, "Neighbours to report")->capture_default_str();
  nearest->add_option("--out", o.out, "Output directory");

  auto *probe = app.add_subcommand("probe", "Train and evaluate the linear type probe");
  probe->add_option("--entity-emb", o.entity_emb, "Entity table (EMB1)");
  probe->add_option("--ctx-vecs", o.ctx_vecs, "Context vectors, pooled on the fly");
  probe->add_option("--cap", o.cap, "Contexts sampled per entity")->capture_default_str();
  probe->add_option("--type-map", o.type_map, "Type labels (NDJSON)");
  probe->add_option("--epochs", o.probe_epochs, "Maximum epochs")->capture_default_str();
  probe->add_option("--lr", o.lr, "Adam step size")->capture_default_str();
  probe->add_option("--per-type-bias", o.per_type_bias, "One bias per type");
  probe->add_option("--threshold", o.threshold, "Decision threshold")->capture_default_str();
  probe->add_option("--seed", o.seed, "Seed")->capture_default_str();
  probe->add_option("--threads", o.threads, "Worker threads");
  probe->add_option("--out", o.out, "Output directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*build) BuildEmbeddingsCmd(o);
    if (*train) TrainCmd(o);
    if (*eval) EvalCmd(o);
    if (*analyze) AnalyzeCmd(o);
    if (*nearest) NearestCmd(o);
    if (*probe) ProbeCmd(o);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

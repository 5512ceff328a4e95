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

#ifndef ELINK_EVALUATION_H_
#define ELINK_EVALUATION_H_

#include <optional>
#include <string>
#include <vector>

#include "elink/base.h"
#include "elink/dataset.h"
#include "elink/features.h"
#include "elink/params.h"
#include "elink/type_map.h"

namespace elink {

struct CandidateBreakdown {
  EntityId entity;
  double prior = 0.0;
  double log_prior = 0.0;
  std::optional<double> psi_long;
  std::optional<double> psi_sim;
  std::optional<double> jaccard;
  std::optional<double> local;  // f for local runs, f_ctx for global runs
  std::optional<double> g_hat;
  std::optional<double> rho;

  bool operator==(const CandidateBreakdown &) const = default;
};

struct Prediction {
  std::string doc;
  std::string mention;
  EntityId predicted;
  std::vector<CandidateBreakdown> candidates;

  bool operator==(const Prediction &) const = default;
};

// Scores every mention. Documents are spread over `threads` workers; the
// output order follows the input regardless of the thread count.
std::vector<Prediction> Predict(const ModelParams &params,
                                const std::vector<DocumentFeatures> &docs,
                                int threads = 1);

std::string PredictionToJson(const Prediction &p);
Prediction PredictionFromJson(const std::string &line);
void SaveRun(const std::vector<Prediction> &run, const std::string &path);
std::vector<Prediction> LoadRun(const std::string &path);

// Correct predictions over in-KB mentions (those with a gold entity). A gold
// missing from the candidates can never be predicted and counts as wrong.
double MicroF1(const std::vector<Prediction> &run,
               const std::vector<Document> &dataset);

enum class ErrorCategory {
  kCandidateMiss,
  kOther,  // predicted and gold share their type set (not a type error)
  kDueToPrior,
  kDueToGlobal,
  kDueToLocalContext,
};

const char *CategoryName(ErrorCategory c);

struct ErrorThresholds {
  double prior = 0.01;
};

struct ErrorRow {
  std::string doc;
  std::string mention;
  EntityId gold;
  EntityId predicted;
  ErrorCategory category = ErrorCategory::kOther;
  double gold_prior = 0.0;
  double predicted_prior = 0.0;
  std::optional<double> gold_local;
  std::optional<double> predicted_local;
  std::optional<double> gold_rho;
  std::optional<double> predicted_rho;
  std::optional<bool> type_error;   // needs a type map
  std::optional<bool> in_baseline;  // the baseline run got it wrong too
};

struct ErrorReport {
  size_t candidate_miss = 0;
  size_t other = 0;
  size_t due_to_prior = 0;
  size_t due_to_global = 0;
  size_t due_to_local_context = 0;
  size_t total_errors = 0;
  std::vector<ErrorRow> rows;

  size_t Count(ErrorCategory c) const;
};

// Assigns each wrong in-KB prediction of `model` to one category, checking in
// order:
//   candidate_miss        gold not among the candidates
//   other                 with a type map: gold and predicted types agree
//   due_to_prior          gold prior < threshold and predicted prior higher
//   due_to_global         gold has the best local score and a prior at least
//                         as high as the predicted one, but loses on rho
//   due_to_local_context  everything else
// `baseline` is optional and only marks rows the baseline also got wrong.
ErrorReport CategorizeErrors(const std::vector<Prediction> *baseline,
                             const std::vector<Prediction> &model,
                             const std::vector<Document> &dataset,
                             const ErrorThresholds &thresholds = {},
                             const TypeMap *types = nullptr);

std::string ErrorReportToJson(const ErrorReport &report);
// Category / count / percentage table over the prior, global and local
// context categories.
std::string ErrorReportTable(const ErrorReport &report);

struct CorrectionReport {
  std::vector<std::string> fixed;       // wrong in a, right in b
  std::vector<std::string> introduced;  // right in a, wrong in b
  double f1_a = 0.0;
  double f1_b = 0.0;
  double delta = 0.0;  // f1_b - f1_a
};

CorrectionReport CompareRuns(const std::vector<Prediction> &a,
                             const std::vector<Prediction> &b,
                             const std::vector<Document> &dataset);

std::string CorrectionReportToJson(const CorrectionReport &report);

}  // namespace elink

#endif  // ELINK_EVALUATION_H_

/*
 * Copyright 2026 The qcmine Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef QCMINE_TRAIN_EVAL_H_
#define QCMINE_TRAIN_EVAL_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "json.hpp"
#include "qcmine/baselines.h"
#include "qcmine/models.h"
#include "qcmine/nn/layers.h"
#include "qcmine/post_parser.h"

namespace qcmine {

// Binary classification metrics; label 1 is the positive class. A ratio
// whose denominator is zero is reported as 0 and flagged.
struct Metrics {
  int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0, accuracy = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;

  int64_t total() const { return tp + fp + tn + fn; }
  nlohmann::json ToJson() const;
};

// Throws kLengthMismatch.
Metrics Evaluate(std::span<const int> preds, std::span<const int> golds);
Metrics MetricsFromCounts(int64_t tp, int64_t fp, int64_t tn, int64_t fn);

// Heuristic labelers: first code block only / every code block.
std::vector<int> SelectFirst(const BlockSequence& seq);
std::vector<int> SelectAll(const BlockSequence& seq);

enum class EnsembleLabel { kLabel0, kLabel1, kAbstain };

struct EnsembleDecision {
  EnsembleLabel decision = EnsembleLabel::kAbstain;
  std::array<int, 3> votes{};  // bi-view, text-only, code-only
  double biview_score = 0.0;   // P(label 1) from the bi-view voter
};

// Unanimous votes give that label; anything else abstains.
EnsembleDecision CombineVotes(const std::array<int, 3>& votes);
EnsembleDecision Ensemble(const Model& biview, const Model& text,
                          const Model& code, const CodeContextInstance& inst);

// Mean of 1/rank. Throws kEmptyInput, kConfigInvalid for a rank < 1.
double Mrr(std::span<const int> ranks);

// Binary labels. (p_o - p_e) / (1 - p_e); 1 when p_e == 1.
// Throws kLengthMismatch (also for empty input).
double CohensKappa(std::span<const int> a, std::span<const int> b);

std::vector<int> GoldLabels(const std::vector<CodeContextInstance>& data);
std::vector<int> PredictLabels(const Model& model,
                               const std::vector<CodeContextInstance>& data);
Metrics EvaluateModel(const Model& model,
                      const std::vector<CodeContextInstance>& data);

struct TrainConfig {
  double lr = 0.001;
  int batch_size = 100;
  int max_epochs = 100;
  int patience = 10;
  uint64_t seed = 1;

  nlohmann::json ToJson() const;
  static TrainConfig FromJson(const nlohmann::json& j);
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  Metrics valid;
};

// Mini-batch Adam over one model; gradients of a batch are accumulated
// instance by instance and averaged.
class Trainer {
 public:
  Trainer(Model& model, const TrainConfig& config);

  // One shuffled pass; returns the mean loss before each update.
  double RunEpoch(const std::vector<CodeContextInstance>& data);
  int epochs_run() const { return epochs_; }

 private:
  Model& model_;
  TrainConfig config_;
  nn::Rng rng_;
  nn::AdamState adam_;
  ModelParameters grads_;
  int epochs_ = 0;
};

struct TrainResult {
  Model best;
  int best_epoch = 0;  // 0 = initial parameters
  Metrics best_valid;
  std::vector<EpochLog> history;
};

// Keeps the parameters with the best validation F1 and stops after
// `patience` epochs without improvement. Labels are required on every
// instance. Throws kEmptySplit. When `log` is set one line per epoch is
// written: "epoch=N loss=L valid_f1=F ...".
TrainResult TrainModel(Model model,
                       const std::vector<CodeContextInstance>& train,
                       const std::vector<CodeContextInstance>& valid,
                       const TrainConfig& config, std::ostream* log = nullptr);

struct LinearSelection {
  LinearModel model;
  double l2 = 0.0;
  Metrics valid;
};

// Trains one linear model per l2 value and keeps the best validation F1.
LinearSelection TrainLinearSelected(const std::vector<LinearExample>& train,
                                    const std::vector<LinearExample>& valid,
                                    LinearTrainOptions options,
                                    const std::vector<double>& l2_grid,
                                    int dim = -1);

// Interns features over `train` (then freezes the registry), trains one model
// per l2 value and keeps the best validation F1. Ties go to the earlier value.
struct LinearBaselineFit {
  LinearBaseline baseline;
  double l2 = 0.0;
  double valid_f1 = 0.0;
};
LinearBaselineFit FitLinearBaseline(
    const std::vector<CodeContextInstance>& train,
    const std::vector<CodeContextInstance>& valid, LinearBaseline untrained,
    LinearTrainOptions options, const std::vector<double>& l2_grid);

// Joins a dump with annotated labels. Only labeled code blocks are kept;
// unparseable lines are counted in `*parse_errors` if given. Output follows
// dump order, then code position.
std::vector<CodeContextInstance> LoadLabeledInstances(
    const std::filesystem::path& dump, const AnnotatedLabels& labels,
    Language language, const PythonNormalizer* python = nullptr,
    int64_t* parse_errors = nullptr);

// Builds word and code vocabularies from `train` and initializes a model.
Model InitModelForData(const VariantConfig& config,
                       const std::vector<CodeContextInstance>& train,
                       int min_count = 1,
                       const std::optional<std::filesystem::path>& word_vectors =
                           std::nullopt,
                       const std::optional<std::filesystem::path>& code_vectors =
                           std::nullopt);

}  // namespace qcmine

#endif  // QCMINE_TRAIN_EVAL_H_

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

#include "qcmine/train_eval.h"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "qcmine/error.h"

namespace qcmine {
namespace {

double Ratio(int64_t num, int64_t den, bool& undefined) {
  if (den == 0) {
    undefined = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

nlohmann::json Metrics::ToJson() const {
  return {{"tp", tp},
          {"fp", fp},
          {"tn", tn},
          {"fn", fn},
          {"precision", precision},
          {"recall", recall},
          {"f1", f1},
          {"accuracy", accuracy},
          {"precision_undefined", precision_undefined},
          {"recall_undefined", recall_undefined},
          {"f1_undefined", f1_undefined}};
}

Metrics MetricsFromCounts(int64_t tp, int64_t fp, int64_t tn, int64_t fn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.tn = tn;
  m.fn = fn;
  m.precision = Ratio(tp, tp + fp, m.precision_undefined);
  m.recall = Ratio(tp, tp + fn, m.recall_undefined);
  if (m.precision + m.recall == 0.0) {
    m.f1_undefined = true;
    m.f1 = 0.0;
  } else {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  bool unused = false;
  m.accuracy = Ratio(tp + tn, m.total(), unused);
  return m;
}

Metrics Evaluate(std::span<const int> preds, std::span<const int> golds) {
  if (preds.size() != golds.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(preds.size()) + " predictions vs " +
                    std::to_string(golds.size()) + " gold labels");
  }
  int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] == 1;
    const bool g = golds[i] == 1;
    if (p && g) {
      ++tp;
    } else if (p) {
      ++fp;
    } else if (g) {
      ++fn;
    } else {
      ++tn;
    }
  }
  return MetricsFromCounts(tp, fp, tn, fn);
}

std::vector<int> SelectFirst(const BlockSequence& seq) {
  std::vector<int> labels(seq.CodeCount(), 0);
  if (!labels.empty()) labels[0] = 1;
  return labels;
}

std::vector<int> SelectAll(const BlockSequence& seq) {
  return std::vector<int>(seq.CodeCount(), 1);
}

EnsembleDecision CombineVotes(const std::array<int, 3>& votes) {
  EnsembleDecision d;
  d.votes = votes;
  if (votes[0] == votes[1] && votes[1] == votes[2]) {
    d.decision = votes[0] == 1 ? EnsembleLabel::kLabel1 : EnsembleLabel::kLabel0;
  } else {
    d.decision = EnsembleLabel::kAbstain;
  }
  return d;
}

EnsembleDecision Ensemble(const Model& biview, const Model& text,
                          const Model& code, const CodeContextInstance& inst) {
  const Prediction b = biview.Predict(inst);
  const Prediction t = text.Predict(inst);
  const Prediction c = code.Predict(inst);
  EnsembleDecision d = CombineVotes({b.label, t.label, c.label});
  d.biview_score = b.score;
  return d;
}

double Mrr(std::span<const int> ranks) {
  if (ranks.empty()) throw Error(ErrorCode::kEmptyInput, "no ranks");
  double sum = 0.0;
  for (int r : ranks) {
    if (r < 1) throw Error(ErrorCode::kConfigInvalid, "rank must be >= 1");
    sum += 1.0 / static_cast<double>(r);
  }
  return sum / static_cast<double>(ranks.size());
}

double CohensKappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::kLengthMismatch, "kappa needs equal, nonempty inputs");
  }
  const double n = static_cast<double>(a.size());
  double agree = 0, a1 = 0, b1 = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) ++agree;
    if (a[i] == 1) ++a1;
    if (b[i] == 1) ++b1;
  }
  const double p_o = agree / n;
  const double pa = a1 / n;
  const double pb = b1 / n;
  const double p_e = pa * pb + (1.0 - pa) * (1.0 - pb);
  if (p_e == 1.0) return 1.0;
  return (p_o - p_e) / (1.0 - p_e);
}

std::vector<int> GoldLabels(const std::vector<CodeContextInstance>& data) {
  std::vector<int> golds;
  golds.reserve(data.size());
  for (const auto& inst : data) {
    if (!inst.label) {
      throw Error(ErrorCode::kEmptySplit,
                  "instance " + std::to_string(inst.question_id) + "#" +
                      std::to_string(inst.position) + " has no label");
    }
    golds.push_back(*inst.label);
  }
  return golds;
}

std::vector<int> PredictLabels(const Model& model,
                               const std::vector<CodeContextInstance>& data) {
  std::vector<int> preds;
  preds.reserve(data.size());
  for (const auto& inst : data) preds.push_back(model.Predict(inst).label);
  return preds;
}

Metrics EvaluateModel(const Model& model,
                      const std::vector<CodeContextInstance>& data) {
  return Evaluate(PredictLabels(model, data), GoldLabels(data));
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"lr", lr},
          {"batch_size", batch_size},
          {"max_epochs", max_epochs},
          {"patience", patience},
          {"seed", seed}};
}

TrainConfig TrainConfig::FromJson(const nlohmann::json& j) {
  TrainConfig c;
  c.lr = j.value("lr", c.lr);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.patience = j.value("patience", c.patience);
  c.seed = j.value("seed", c.seed);
  if (c.lr <= 0 || c.batch_size < 1 || c.max_epochs < 0 || c.patience < 1) {
    throw Error(ErrorCode::kConfigInvalid, "bad train config");
  }
  return c;
}

Trainer::Trainer(Model& model, const TrainConfig& config)
    : model_(model),
      config_(config),
      rng_(config.seed),
      grads_(model.params().ZerosLike()) {
  adam_.lr = config.lr;
}

double Trainer::RunEpoch(const std::vector<CodeContextInstance>& data) {
  if (data.empty()) throw Error(ErrorCode::kEmptySplit, "no training data");
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  rng_.Shuffle(order);

  const bool frozen = model_.config().freeze_embeddings;
  std::vector<nn::Tensor*> params;
  std::vector<const nn::Tensor*> grads;
  model_.mutable_params().ForEach([&](const std::string& name, nn::Tensor& t) {
    if (frozen && (name == "word_embeddings" || name == "code_embeddings")) {
      return;
    }
    params.push_back(&t);
  });
  grads_.ForEach([&](const std::string& name, const nn::Tensor& t) {
    if (frozen && (name == "word_embeddings" || name == "code_embeddings")) {
      return;
    }
    grads.push_back(&t);
  });

  double total_loss = 0.0;
  const size_t batch = static_cast<size_t>(config_.batch_size);
  for (size_t start = 0; start < order.size(); start += batch) {
    const size_t end = std::min(order.size(), start + batch);
    const double scale = 1.0 / static_cast<double>(end - start);
    grads_.SetZero();
    for (size_t k = start; k < end; ++k) {
      const CodeContextInstance& inst = data[order[k]];
      if (!inst.label) {
        throw Error(ErrorCode::kEmptySplit, "unlabeled training instance");
      }
      total_loss += model_.ForwardBackward(inst, *inst.label, grads_, scale);
    }
    nn::AdamUpdate(params, grads, adam_);
  }
  ++epochs_;
  if (!model_.params().AllFinite()) {
    throw Error(ErrorCode::kNonFiniteInput, "parameters diverged");
  }
  return total_loss / static_cast<double>(data.size());
}

TrainResult TrainModel(Model model,
                       const std::vector<CodeContextInstance>& train,
                       const std::vector<CodeContextInstance>& valid,
                       const TrainConfig& config, std::ostream* log) {
  if (train.empty() || valid.empty()) {
    throw Error(ErrorCode::kEmptySplit, "train and valid splits must be nonempty");
  }
  GoldLabels(train);  // every instance must be labeled
  TrainResult result{model, 0, EvaluateModel(model, valid), {}};
  Trainer trainer(model, config);
  int since_best = 0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = trainer.RunEpoch(train);
    entry.valid = EvaluateModel(model, valid);
    if (log != nullptr) {
      char line[256];
      std::snprintf(line, sizeof(line),
                    "epoch=%d loss=%.6f valid_p=%.4f valid_r=%.4f "
                    "valid_f1=%.4f valid_acc=%.4f\n",
                    epoch, entry.train_loss, entry.valid.precision,
                    entry.valid.recall, entry.valid.f1, entry.valid.accuracy);
      *log << line << std::flush;
    }
    result.history.push_back(entry);
    if (entry.valid.f1 > result.best_valid.f1) {
      result.best = model;
      result.best_epoch = epoch;
      result.best_valid = entry.valid;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  return result;
}

LinearSelection TrainLinearSelected(const std::vector<LinearExample>& train,
                                    const std::vector<LinearExample>& valid,
                                    LinearTrainOptions options,
                                    const std::vector<double>& l2_grid,
                                    int dim) {
  if (train.empty() || valid.empty()) {
    throw Error(ErrorCode::kEmptySplit, "train and valid splits must be nonempty");
  }
  std::vector<int> golds;
  for (const auto& ex : valid) golds.push_back(ex.label);
  LinearSelection best;
  bool first = true;
  for (double l2 : l2_grid) {
    options.l2 = l2;
    LinearModel model = TrainLinear(train, options, dim);
    std::vector<int> preds;
    for (const auto& ex : valid) preds.push_back(PredictLinear(model, ex.x).label);
    Metrics m = Evaluate(preds, golds);
    if (first || m.f1 > best.valid.f1) {
      best = {std::move(model), l2, m};
      first = false;
    }
  }
  return best;
}

LinearBaselineFit FitLinearBaseline(
    const std::vector<CodeContextInstance>& train,
    const std::vector<CodeContextInstance>& valid, LinearBaseline untrained,
    LinearTrainOptions options, const std::vector<double>& l2_grid) {
  if (train.empty() || valid.empty()) {
    throw Error(ErrorCode::kEmptySplit, "train and valid splits must be nonempty");
  }
  LinearBaseline b = std::move(untrained);
  b.registry = FeatureRegistry();
  const FeatureExtractor extractor = b.Extractor();
  std::vector<LinearExample> train_x;
  for (const auto& inst : train) {
    if (!inst.label) throw Error(ErrorCode::kEmptySplit, "unlabeled instance");
    train_x.push_back({extractor.Extract(inst, b.registry), *inst.label});
  }
  b.registry.Freeze();
  std::vector<LinearExample> valid_x;
  for (const auto& inst : valid) {
    if (!inst.label) throw Error(ErrorCode::kEmptySplit, "unlabeled instance");
    valid_x.push_back({extractor.Extract(inst, b.registry), *inst.label});
  }
  LinearSelection sel =
      TrainLinearSelected(train_x, valid_x, options, l2_grid, b.registry.size());
  b.model = std::move(sel.model);
  return {std::move(b), sel.l2, sel.valid.f1};
}

std::vector<CodeContextInstance> LoadLabeledInstances(
    const std::filesystem::path& dump, const AnnotatedLabels& labels,
    Language language, const PythonNormalizer* python,
    int64_t* parse_errors) {
  std::vector<CodeContextInstance> out;
  ForEachDumpRecord(
      dump,
      [&](DumpRecord record) {
        auto it = labels.find(record.question_id);
        if (it == labels.end()) return;
        BlockSequence seq = ParsePostLenient(record.accepted_answer_html);
        seq.question_id = record.question_id;
        auto instances =
            ExtractInstances(record.title, std::move(seq), it->second,
                             language, python);
        for (auto& inst : instances) {
          if (inst.label) out.push_back(std::move(inst));
        }
      },
      [&](size_t, const std::string&) {
        if (parse_errors != nullptr) ++*parse_errors;
      });
  return out;
}

Model InitModelForData(const VariantConfig& config,
                       const std::vector<CodeContextInstance>& train,
                       int min_count,
                       const std::optional<std::filesystem::path>& word_vectors,
                       const std::optional<std::filesystem::path>& code_vectors) {
  if (train.empty()) throw Error(ErrorCode::kEmptySplit, "empty training split");
  VocabularyBuilder words;
  VocabularyBuilder code;
  for (const auto& inst : train) {
    words.Add(inst.question_tokens);
    words.Add(inst.pre_tokens);
    words.Add(inst.post_tokens);
    code.Add(inst.code_tokens);
  }
  return Model::Init(config, words.Build(min_count), code.Build(min_count),
                     word_vectors, code_vectors);
}

}  // namespace qcmine

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

#ifndef QCMINE_BASELINES_H_
#define QCMINE_BASELINES_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "qcmine/post_parser.h"
#include "qcmine/tokenize.h"

namespace qcmine {

// String feature keys ("tok:use", "bigram:try_this", "first:try",
// "conn:alternatively", "code:select", "codeclass") to dense ids. Once
// frozen, unknown keys are dropped instead of being assigned new ids.
class FeatureRegistry {
 public:
  // New id for an unseen key unless frozen; nullopt for unknown keys of a
  // frozen registry.
  std::optional<int> Intern(std::string_view key);
  std::optional<int> Find(std::string_view key) const;
  const std::string& Key(int id) const { return keys_.at(id); }
  int size() const { return static_cast<int>(keys_.size()); }
  void Freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  nlohmann::json ToJson() const;  // id-ordered key list
  static FeatureRegistry FromJson(const nlohmann::json& j);

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> keys_;
  bool frozen_ = false;
};

// Feature id -> value, ordered by id.
struct SparseFeatureVector {
  std::map<int, double> values;

  void Add(int id, double value) { values[id] += value; }
  void Set(int id, double value) { values[id] = value; }
  bool Has(int id) const { return values.count(id) > 0; }
};

enum class LinearKind { kLogistic, kHingeSvm };

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  LinearKind kind = LinearKind::kLogistic;
  double l2 = 0.0;
  bool trained = false;

  double Score(const SparseFeatureVector& x) const;  // w.x + b
  nlohmann::json ToJson() const;
  static LinearModel FromJson(const nlohmann::json& j);
};

struct LinearPrediction {
  int label = 0;
  double score = 0.0;  // sigmoid(w.x+b) for logistic, w.x+b for hinge
};

// Logistic: label 1 iff score >= 0.5. Hinge: label 1 iff score >= 0.
// Throws kUntrainedModel.
LinearPrediction PredictLinear(const LinearModel& model,
                               const SparseFeatureVector& x);

struct LinearExample {
  SparseFeatureVector x;
  int label = 0;
};

struct LinearTrainOptions {
  LinearKind kind = LinearKind::kLogistic;
  double l2 = 1e-4;
  int epochs = 30;
  double lr = 0.05;
  uint64_t seed = 1;
};

// SGD on log-loss (logistic) or hinge loss (SVM) with an L2 penalty on the
// weights, applied as a proximal shrink after every step so that any l2 >= 0
// is stable. Throws kSingleClassData unless both labels occur.
LinearModel TrainLinear(const std::vector<LinearExample>& data,
                        const LinearTrainOptions& options, int dim = -1);

const std::vector<std::string>& DefaultConnectives();

// Working-code cues over a normalized Python token stream, in this order.
enum CodeClassFeature {
  kNumberFraction,
  kParenFraction,
  kPromptLineFraction,
  kAssignFraction,
  kHasDef,
  kHasImport,
  kHasClass,
  kHasPrint,
  kLineCount,
  kMeanLineLength,
  kCodeClassFeatureCount,
};
using CodeClassVector = std::array<double, kCodeClassFeatureCount>;

// Streams without line information count as a single line; an empty
// stream maps to all zeros.
CodeClassVector CodeClassFeatures(const TokenStream& code);
// Input vector for the CodeClass logistic model (counts are log1p-scaled).
SparseFeatureVector CodeClassInput(const TokenStream& code);
// P(working code) from a trained CodeClass model.
double CodeClassProbability(const LinearModel& model, const TokenStream& code);

struct FeatureExtractor {
  std::vector<std::string> connectives = DefaultConnectives();
  Language language = Language::kPython;
  // Python only; the "codeclass" feature is omitted when null or for SQL.
  const LinearModel* codeclass = nullptr;

  // Token (unigram/bigram counts over both contexts), FirstToken, Conn,
  // CodeToken and CodeClass features.
  SparseFeatureVector Extract(const CodeContextInstance& inst,
                              FeatureRegistry& registry) const;
};

// CodeClass training corpus mined from a dump: snippets that follow a text
// block ending with an output cue ("output:", "output is:") are
// input/output demos (label 0); snippets of answers with exactly one code
// block are working code (label 1). At most `limit` of each, chosen with
// `seed`.
struct CodeClassCorpus {
  std::vector<TokenStream> snippets;
  std::vector<int> labels;
};
CodeClassCorpus BuildCodeClassCorpus(const std::filesystem::path& dump,
                                     const std::vector<std::string>& cues,
                                     size_t limit, uint64_t seed);
const std::vector<std::string>& DefaultOutputCues();

LinearModel TrainCodeClass(const CodeClassCorpus& corpus,
                           const LinearTrainOptions& options);

// A trained LR/SVM code-block classifier with its frozen feature space.
struct LinearBaseline {
  std::vector<std::string> connectives = DefaultConnectives();
  Language language = Language::kPython;
  FeatureRegistry registry;
  LinearModel model;
  std::optional<LinearModel> codeclass;

  FeatureExtractor Extractor() const;
  // Registry must be frozen.
  LinearPrediction Predict(const CodeContextInstance& inst) const;

  nlohmann::json ToJson() const;
  static LinearBaseline FromJson(const nlohmann::json& j);
  void Save(const std::filesystem::path& path) const;
  static LinearBaseline Load(const std::filesystem::path& path);
};

}  // namespace qcmine

#endif  // QCMINE_BASELINES_H_

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

#include "qcmine/baselines.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "qcmine/error.h"
#include "qcmine/io.h"
#include "qcmine/nn/random.h"
#include "qcmine/nn/tensor.h"

namespace qcmine {

std::optional<int> FeatureRegistry::Intern(std::string_view key) {
  auto it = ids_.find(std::string(key));
  if (it != ids_.end()) return it->second;
  if (frozen_) return std::nullopt;
  const int id = static_cast<int>(keys_.size());
  keys_.emplace_back(key);
  ids_.emplace(keys_.back(), id);
  return id;
}

std::optional<int> FeatureRegistry::Find(std::string_view key) const {
  auto it = ids_.find(std::string(key));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

nlohmann::json FeatureRegistry::ToJson() const {
  return {{"keys", keys_}, {"frozen", frozen_}};
}

FeatureRegistry FeatureRegistry::FromJson(const nlohmann::json& j) {
  FeatureRegistry r;
  for (const auto& key : j.at("keys").get<std::vector<std::string>>()) {
    r.Intern(key);
  }
  r.frozen_ = j.value("frozen", true);
  return r;
}

double LinearModel::Score(const SparseFeatureVector& x) const {
  double s = bias;
  for (const auto& [id, value] : x.values) {
    if (id >= 0 && static_cast<size_t>(id) < weights.size()) {
      s += weights[id] * value;
    }
  }
  return s;
}

nlohmann::json LinearModel::ToJson() const {
  return {{"kind", kind == LinearKind::kLogistic ? "logistic" : "hinge"},
          {"weights", weights},
          {"bias", bias},
          {"l2", l2},
          {"trained", trained}};
}

LinearModel LinearModel::FromJson(const nlohmann::json& j) {
  LinearModel m;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "logistic") {
    m.kind = LinearKind::kLogistic;
  } else if (kind == "hinge") {
    m.kind = LinearKind::kHingeSvm;
  } else {
    throw Error(ErrorCode::kConfigInvalid, "unknown linear kind " + kind);
  }
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.l2 = j.value("l2", 0.0);
  m.trained = j.value("trained", true);
  return m;
}

LinearPrediction PredictLinear(const LinearModel& model,
                               const SparseFeatureVector& x) {
  if (!model.trained) {
    throw Error(ErrorCode::kUntrainedModel, "linear model is not trained");
  }
  const double s = model.Score(x);
  if (model.kind == LinearKind::kLogistic) {
    const double p = nn::Sigmoid(s);
    return {p >= 0.5 ? 1 : 0, p};
  }
  return {s >= 0.0 ? 1 : 0, s};
}

LinearModel TrainLinear(const std::vector<LinearExample>& data,
                        const LinearTrainOptions& options, int dim) {
  bool has0 = false;
  bool has1 = false;
  int max_id = -1;
  for (const auto& ex : data) {
    (ex.label == 1 ? has1 : has0) = true;
    if (!ex.x.values.empty()) max_id = std::max(max_id, ex.x.values.rbegin()->first);
  }
  if (!has0 || !has1) {
    throw Error(ErrorCode::kSingleClassData, "training data needs both labels");
  }
  if (options.l2 < 0 || options.lr <= 0 || options.epochs < 0) {
    throw Error(ErrorCode::kConfigInvalid, "bad linear training options");
  }
  const size_t n_weights =
      static_cast<size_t>(std::max(dim, max_id + 1));

  // Weights are stored as scale * v so the L2 shrink is O(1) per step.
  std::vector<double> v(n_weights, 0.0);
  double scale = 1.0;
  double bias = 0.0;
  const double shrink = 1.0 / (1.0 + options.lr * options.l2);

  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  nn::Rng rng(options.seed);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.Shuffle(order);
    for (size_t idx : order) {
      const LinearExample& ex = data[idx];
      double s = bias;
      for (const auto& [id, value] : ex.x.values) s += scale * v[id] * value;
      double g = 0.0;  // d loss / d score
      if (options.kind == LinearKind::kLogistic) {
        g = nn::Sigmoid(s) - static_cast<double>(ex.label);
      } else {
        const double y = ex.label == 1 ? 1.0 : -1.0;
        if (y * s < 1.0) g = -y;
      }
      if (g != 0.0) {
        for (const auto& [id, value] : ex.x.values) {
          v[id] -= options.lr * g * value / scale;
        }
        bias -= options.lr * g;
      }
      scale *= shrink;
      if (scale < 1e-100) {
        for (double& w : v) w *= scale;
        scale = 1.0;
      }
    }
  }
  LinearModel model;
  model.kind = options.kind;
  model.l2 = options.l2;
  model.bias = bias;
  model.weights.resize(n_weights);
  for (size_t i = 0; i < n_weights; ++i) model.weights[i] = scale * v[i];
  model.trained = true;
  return model;
}

const std::vector<std::string>& DefaultConnectives() {
  static const std::vector<std::string> kConnectives = {
      "or", "alternatively", "however", "instead", "also", "then", "but",
      "and", "so", "because", "if", "otherwise", "finally", "first",
      "second", "next", "additionally", "moreover", "furthermore", "besides",
      "for example", "for instance", "in addition", "in fact", "as well",
      "on the other hand", "in other words", "by contrast", "similarly",
      "likewise", "therefore", "thus", "hence", "although", "though",
      "unless", "while", "whereas", "until", "once", "since", "afterwards",
      "meanwhile", "still", "yet", "indeed", "specifically", "in particular",
      "as a result", "in that case", "for that matter", "rather"};
  return kConnectives;
}

const std::vector<std::string>& DefaultOutputCues() {
  static const std::vector<std::string> kCues = {"output:", "output is:"};
  return kCues;
}

CodeClassVector CodeClassFeatures(const TokenStream& code) {
  CodeClassVector f{};
  const auto& tokens = code.tokens;
  if (tokens.empty()) return f;
  const double n = static_cast<double>(tokens.size());
  double numbers = 0, parens = 0, assigns = 0;
  for (const auto& t : tokens) {
    if (t == "NUMBER") ++numbers;
    if (t == "(" || t == ")") ++parens;
    if (t == "=") ++assigns;
    if (t == "def") f[kHasDef] = 1.0;
    if (t == "import") f[kHasImport] = 1.0;
    if (t == "class") f[kHasClass] = 1.0;
    if (t == "print") f[kHasPrint] = 1.0;
  }
  std::vector<size_t> starts = code.line_starts;
  if (starts.empty()) starts.push_back(0);
  double prompt_lines = 0;
  for (size_t s : starts) {
    if (s < tokens.size() && tokens[s] == ">>>") ++prompt_lines;
  }
  const double lines = static_cast<double>(starts.size());
  f[kNumberFraction] = numbers / n;
  f[kParenFraction] = parens / n;
  f[kPromptLineFraction] = prompt_lines / lines;
  f[kAssignFraction] = assigns / n;
  f[kLineCount] = lines;
  f[kMeanLineLength] = n / lines;
  return f;
}

SparseFeatureVector CodeClassInput(const TokenStream& code) {
  const CodeClassVector f = CodeClassFeatures(code);
  SparseFeatureVector x;
  for (int i = 0; i < kCodeClassFeatureCount; ++i) {
    double value = f[i];
    if (i == kLineCount || i == kMeanLineLength) value = std::log1p(value);
    if (value != 0.0) x.Set(i, value);
  }
  return x;
}

double CodeClassProbability(const LinearModel& model, const TokenStream& code) {
  return nn::Sigmoid(model.Score(CodeClassInput(code)));
}

namespace {

void AddContext(const std::vector<std::string>& tokens,
                FeatureRegistry& registry, SparseFeatureVector& x) {
  if (tokens.empty()) return;
  if (auto id = registry.Intern("first:" + tokens.front())) x.Set(*id, 1.0);
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (auto id = registry.Intern("tok:" + tokens[i])) x.Add(*id, 1.0);
    if (i + 1 < tokens.size()) {
      if (auto id = registry.Intern("bigram:" + tokens[i] + "_" + tokens[i + 1])) {
        x.Add(*id, 1.0);
      }
    }
  }
}

bool ContainsPhrase(const std::vector<std::string>& tokens,
                    const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > tokens.size()) return false;
  for (size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    if (std::equal(phrase.begin(), phrase.end(), tokens.begin() + i)) {
      return true;
    }
  }
  return false;
}

}  // namespace

SparseFeatureVector FeatureExtractor::Extract(const CodeContextInstance& inst,
                                              FeatureRegistry& registry) const {
  SparseFeatureVector x;
  AddContext(inst.pre_tokens, registry, x);
  AddContext(inst.post_tokens, registry, x);
  for (const auto& connective : connectives) {
    const std::vector<std::string> phrase = TokenizeText(connective).tokens;
    if (ContainsPhrase(inst.pre_tokens, phrase) ||
        ContainsPhrase(inst.post_tokens, phrase)) {
      if (auto id = registry.Intern("conn:" + connective)) x.Set(*id, 1.0);
    }
  }
  for (const auto& token : inst.code_tokens) {
    if (auto id = registry.Intern("code:" + token)) x.Add(*id, 1.0);
  }
  if (language == Language::kPython && codeclass != nullptr) {
    TokenStream code{inst.code_tokens, Language::kPython, inst.code_line_starts};
    if (auto id = registry.Intern("codeclass")) {
      x.Set(*id, CodeClassProbability(*codeclass, code));
    }
  }
  return x;
}

CodeClassCorpus BuildCodeClassCorpus(const std::filesystem::path& dump,
                                     const std::vector<std::string>& cues,
                                     size_t limit, uint64_t seed) {
  std::vector<TokenStream> demos;
  std::vector<TokenStream> working;
  std::vector<std::string> lower_cues;
  for (const auto& cue : cues) lower_cues.push_back(ToLowerAscii(Trim(cue)));
  auto ends_with_cue = [&](const std::string& text) {
    const std::string lower = ToLowerAscii(Trim(text));
    for (const auto& cue : lower_cues) {
      if (lower.size() >= cue.size() &&
          lower.compare(lower.size() - cue.size(), cue.size(), cue) == 0) {
        return true;
      }
    }
    return false;
  };
  ForEachDumpRecord(
      dump,
      [&](DumpRecord record) {
        bool python = false;
        for (const auto& tag : record.tags) {
          if (tag.find("python") != std::string::npos) python = true;
        }
        if (!python) return;
        BlockSequence seq = ParsePostLenient(record.accepted_answer_html);
        const size_t n = seq.CodeCount();
        if (n == 1) {
          working.push_back(NormalizePython(seq.Code(1).raw));
        }
        for (size_t p = 1; p <= n; ++p) {
          if (ends_with_cue(seq.blocks[2 * p - 2].raw)) {
            demos.push_back(NormalizePython(seq.Code(p).raw));
          }
        }
      },
      [](size_t, const std::string&) {});
  nn::Rng rng(seed);
  rng.Shuffle(demos);
  rng.Shuffle(working);
  if (demos.size() > limit) demos.resize(limit);
  if (working.size() > limit) working.resize(limit);
  CodeClassCorpus corpus;
  for (auto& s : demos) {
    corpus.snippets.push_back(std::move(s));
    corpus.labels.push_back(0);
  }
  for (auto& s : working) {
    corpus.snippets.push_back(std::move(s));
    corpus.labels.push_back(1);
  }
  return corpus;
}

LinearModel TrainCodeClass(const CodeClassCorpus& corpus,
                           const LinearTrainOptions& options) {
  std::vector<LinearExample> data;
  for (size_t i = 0; i < corpus.snippets.size(); ++i) {
    data.push_back({CodeClassInput(corpus.snippets[i]), corpus.labels[i]});
  }
  return TrainLinear(data, options, kCodeClassFeatureCount);
}

FeatureExtractor LinearBaseline::Extractor() const {
  FeatureExtractor e;
  e.connectives = connectives;
  e.language = language;
  e.codeclass = codeclass ? &*codeclass : nullptr;
  return e;
}

LinearPrediction LinearBaseline::Predict(const CodeContextInstance& inst) const {
  if (!registry.frozen()) {
    throw Error(ErrorCode::kUntrainedModel, "feature registry is not frozen");
  }
  // Interning into a frozen copy only looks keys up.
  FeatureRegistry lookup = registry;
  return PredictLinear(model, Extractor().Extract(inst, lookup));
}

nlohmann::json LinearBaseline::ToJson() const {
  nlohmann::json j = {{"format", "qcmine-linear-v1"},
                      {"language", std::string(LanguageName(language))},
                      {"connectives", connectives},
                      {"features", registry.ToJson()},
                      {"model", model.ToJson()}};
  j["codeclass"] = codeclass ? codeclass->ToJson() : nlohmann::json(nullptr);
  return j;
}

LinearBaseline LinearBaseline::FromJson(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "qcmine-linear-v1") {
      throw Error(ErrorCode::kCheckpointMismatch, "not a linear checkpoint");
    }
    LinearBaseline b;
    b.language = ParseLanguage(j.at("language").get<std::string>());
    b.connectives = j.at("connectives").get<std::vector<std::string>>();
    b.registry = FeatureRegistry::FromJson(j.at("features"));
    b.registry.Freeze();
    b.model = LinearModel::FromJson(j.at("model"));
    if (j.contains("codeclass") && !j.at("codeclass").is_null()) {
      b.codeclass = LinearModel::FromJson(j.at("codeclass"));
    }
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCheckpointMismatch, e.what());
  }
}

void LinearBaseline::Save(const std::filesystem::path& path) const {
  WriteFile(path, ToJson().dump() + "\n");
}

LinearBaseline LinearBaseline::Load(const std::filesystem::path& path) {
  try {
    return FromJson(nlohmann::json::parse(ReadFile(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCheckpointMismatch, e.what());
  }
}

}  // namespace qcmine

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

#include "qcmine/config.h"

#include <set>

#include "qcmine/error.h"
#include "qcmine/io.h"

namespace qcmine {

namespace {

const nlohmann::json& Section(const nlohmann::json& j, const char* name) {
  static const nlohmann::json kEmpty = nlohmann::json::object();
  if (!j.contains(name)) return kEmpty;
  const auto& s = j.at(name);
  if (!s.is_object()) {
    throw Error(ErrorCode::kConfigInvalid,
                std::string("section '") + name + "' must be an object");
  }
  return s;
}

}  // namespace

PipelineConfig PipelineConfig::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kConfigInvalid, "config must be a JSON object");
  }
  static const std::set<std::string> kSections = {"tokenize", "vocab", "model",
                                                  "train", "mine"};
  for (const auto& [key, value] : j.items()) {
    if (!kSections.count(key)) {
      throw Error(ErrorCode::kConfigInvalid, "unknown section '" + key + "'");
    }
  }
  PipelineConfig c;
  try {
    const auto& tok = Section(j, "tokenize");
    if (tok.contains("language")) {
      c.language = ParseLanguage(tok.at("language").get<std::string>());
    }
    if (tok.contains("python_keep_list")) {
      c.python_keep_list = tok.at("python_keep_list").get<std::string>();
    }

    const auto& vocab = Section(j, "vocab");
    c.min_count = vocab.value("min_count", c.min_count);
    if (vocab.contains("word_vectors")) {
      c.word_vectors = vocab.at("word_vectors").get<std::string>();
    }
    if (vocab.contains("code_vectors")) {
      c.code_vectors = vocab.at("code_vectors").get<std::string>();
    }

    nlohmann::json model = Section(j, "model");
    model["language"] = std::string(LanguageName(c.language));
    c.model = VariantConfig::FromJson(model);

    const auto& train = Section(j, "train");
    c.train = TrainConfig::FromJson(train);
    if (train.contains("l2_grid")) {
      c.l2_grid = train.at("l2_grid").get<std::vector<double>>();
    }
    c.linear_epochs = train.value("linear_epochs", c.linear_epochs);
    c.linear_lr = train.value("linear_lr", c.linear_lr);

    const auto& mine = Section(j, "mine");
    c.abstentions_suffix =
        mine.value("abstentions_suffix", c.abstentions_suffix);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, e.what());
  }
  if (c.min_count < 1 || c.l2_grid.empty() || c.linear_epochs < 1 ||
      c.linear_lr <= 0) {
    throw Error(ErrorCode::kConfigInvalid, "bad vocab or linear settings");
  }
  c.model.Validate();
  return c;
}

PipelineConfig PipelineConfig::Load(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, path.string() + ": " + e.what());
  }
  return FromJson(j);
}

nlohmann::json PipelineConfig::ToJson() const {
  nlohmann::json tok = {{"language", std::string(LanguageName(language))}};
  if (python_keep_list) tok["python_keep_list"] = python_keep_list->string();
  nlohmann::json vocab = {{"min_count", min_count}};
  if (word_vectors) vocab["word_vectors"] = word_vectors->string();
  if (code_vectors) vocab["code_vectors"] = code_vectors->string();
  nlohmann::json model = this->model.ToJson();
  model.erase("language");
  nlohmann::json train = this->train.ToJson();
  train["l2_grid"] = l2_grid;
  train["linear_epochs"] = linear_epochs;
  train["linear_lr"] = linear_lr;
  return {{"tokenize", tok},
          {"vocab", vocab},
          {"model", model},
          {"train", train},
          {"mine", {{"abstentions_suffix", abstentions_suffix}}}};
}

std::unique_ptr<PythonNormalizer> PipelineConfig::MakePythonNormalizer() const {
  if (!python_keep_list) return nullptr;
  return std::make_unique<PythonNormalizer>(
      PythonNormalizer::FromFile(*python_keep_list));
}

}  // namespace qcmine

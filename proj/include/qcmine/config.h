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

#ifndef QCMINE_CONFIG_H_
#define QCMINE_CONFIG_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcmine/baselines.h"
#include "qcmine/models.h"
#include "qcmine/tokenize.h"
#include "qcmine/train_eval.h"

namespace qcmine {

// Pipeline configuration file with sections
// {tokenize, vocab, model, train, mine}. Every key is optional.
//
//   "tokenize": {"language": "python", "python_keep_list": "keep.txt"}
//   "vocab":    {"min_count": 1, "word_vectors": "w.txt",
//                "code_vectors": "c.txt"}
//   "model":    VariantConfig keys (language comes from tokenize)
//   "train":    TrainConfig keys plus "l2_grid", "linear_epochs",
//               "linear_lr" for the linear baselines
//   "mine":     {"abstentions_suffix": ".abstentions.jsonl"}
struct PipelineConfig {
  Language language = Language::kPython;
  std::optional<std::filesystem::path> python_keep_list;
  int min_count = 1;
  std::optional<std::filesystem::path> word_vectors;
  std::optional<std::filesystem::path> code_vectors;
  VariantConfig model;
  TrainConfig train;
  std::vector<double> l2_grid = {1e-5, 1e-4, 1e-3, 1e-2};
  int linear_epochs = 30;
  double linear_lr = 0.05;
  std::string abstentions_suffix = ".abstentions.jsonl";

  // Throws kConfigInvalid on unknown sections or malformed values.
  static PipelineConfig FromJson(const nlohmann::json& j);
  static PipelineConfig Load(const std::filesystem::path& path);
  nlohmann::json ToJson() const;

  // Null when no keep list is configured.
  std::unique_ptr<PythonNormalizer> MakePythonNormalizer() const;
};

}  // namespace qcmine

#endif  // QCMINE_CONFIG_H_

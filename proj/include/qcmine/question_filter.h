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

#ifndef QCMINE_QUESTION_FILTER_H_
#define QCMINE_QUESTION_FILTER_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcmine/baselines.h"
#include "qcmine/post_parser.h"
#include "qcmine/tokenize.h"

namespace qcmine {

const std::vector<std::string>& DefaultQuestionKeywords();

struct QuestionFeatures {
  std::map<std::string, bool> keyword_flags;  // matched on the title
  int n_code_blocks_question = 0;
  int n_code_blocks_answer = 0;
  int max_code_block_len = 0;  // tokens, over question and answer code
  int title_len = 0;           // tokens
};

// Keyword phrases match case-insensitively on token boundaries of the title.
QuestionFeatures FeaturizeQuestion(std::string_view title,
                                   const BlockSequence& question_seq,
                                   const BlockSequence& answer_seq,
                                   const std::vector<std::string>& keywords,
                                   Language language);

// Fixed layout: one boolean per keyword in lexicon order, then log1p of the
// four counts.
SparseFeatureVector QuestionFeatureVector(
    const QuestionFeatures& features, const std::vector<std::string>& keywords);

enum class QuestionType { kHowTo, kNonHowTo };

struct QuestionClassification {
  QuestionType label = QuestionType::kHowTo;
  double probability = 0.5;  // P(how-to)
};

// HowTo iff probability >= 0.5. Throws kUntrainedModel.
QuestionClassification ClassifyQuestion(
    const QuestionFeatures& features, const LinearModel& model,
    const std::vector<std::string>& keywords);

// Keyword lexicon + logistic model, persisted together.
struct QuestionFilter {
  std::vector<std::string> keywords = DefaultQuestionKeywords();
  LinearModel model;
  Language language = Language::kPython;

  QuestionClassification Classify(const DumpRecord& record) const;
  QuestionFeatures Featurize(const DumpRecord& record) const;

  nlohmann::json ToJson() const;
  static QuestionFilter FromJson(const nlohmann::json& j);
  void Save(const std::filesystem::path& path) const;
  static QuestionFilter Load(const std::filesystem::path& path);
};

}  // namespace qcmine

#endif  // QCMINE_QUESTION_FILTER_H_

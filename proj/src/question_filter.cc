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

#include "qcmine/question_filter.h"

#include <algorithm>
#include <cmath>

#include "qcmine/error.h"
#include "qcmine/io.h"
#include "qcmine/nn/tensor.h"

namespace qcmine {

const std::vector<std::string>& DefaultQuestionKeywords() {
  static const std::vector<std::string> kKeywords = {
      "how to", "how do i", "how can i", "how would i", "how should i",
      "is there a way", "best way", "way to", "is it possible", "what is",
      "what are", "why", "error", "exception", "difference", "not working",
      "doesn't work", "wrong", "problem", "when", "vs", "better"};
  return kKeywords;
}

QuestionFeatures FeaturizeQuestion(std::string_view title,
                                   const BlockSequence& question_seq,
                                   const BlockSequence& answer_seq,
                                   const std::vector<std::string>& keywords,
                                   Language language) {
  QuestionFeatures f;
  const std::vector<std::string> title_tokens = TokenizeText(title).tokens;
  std::string padded = " ";
  for (const auto& t : title_tokens) padded += t + " ";
  for (const auto& keyword : keywords) {
    std::string needle = " ";
    for (const auto& t : TokenizeText(keyword).tokens) needle += t + " ";
    f.keyword_flags[keyword] =
        needle.size() > 1 && padded.find(needle) != std::string::npos;
  }
  f.title_len = static_cast<int>(title_tokens.size());
  f.n_code_blocks_question = static_cast<int>(question_seq.CodeCount());
  f.n_code_blocks_answer = static_cast<int>(answer_seq.CodeCount());
  for (const BlockSequence* seq : {&question_seq, &answer_seq}) {
    for (size_t p = 1; p <= seq->CodeCount(); ++p) {
      const Block& block = seq->Code(p);
      const size_t len = block.tokenized
                             ? block.tokens.size()
                             : NormalizeCode(block.raw, language).tokens.size();
      f.max_code_block_len = std::max(f.max_code_block_len, static_cast<int>(len));
    }
  }
  return f;
}

SparseFeatureVector QuestionFeatureVector(
    const QuestionFeatures& features, const std::vector<std::string>& keywords) {
  SparseFeatureVector x;
  int id = 0;
  for (const auto& keyword : keywords) {
    auto it = features.keyword_flags.find(keyword);
    if (it != features.keyword_flags.end() && it->second) x.Set(id, 1.0);
    ++id;
  }
  for (int count : {features.n_code_blocks_question,
                    features.n_code_blocks_answer, features.max_code_block_len,
                    features.title_len}) {
    if (count > 0) x.Set(id, std::log1p(static_cast<double>(count)));
    ++id;
  }
  return x;
}

QuestionClassification ClassifyQuestion(
    const QuestionFeatures& features, const LinearModel& model,
    const std::vector<std::string>& keywords) {
  if (!model.trained) {
    throw Error(ErrorCode::kUntrainedModel, "question filter is not trained");
  }
  const double p =
      nn::Sigmoid(model.Score(QuestionFeatureVector(features, keywords)));
  return {p >= 0.5 ? QuestionType::kHowTo : QuestionType::kNonHowTo, p};
}

QuestionFeatures QuestionFilter::Featurize(const DumpRecord& record) const {
  return FeaturizeQuestion(record.title,
                           ParsePostLenient(record.question_body_html),
                           ParsePostLenient(record.accepted_answer_html),
                           keywords, language);
}

QuestionClassification QuestionFilter::Classify(const DumpRecord& record) const {
  return ClassifyQuestion(Featurize(record), model, keywords);
}

nlohmann::json QuestionFilter::ToJson() const {
  return {{"format", "qcmine-question-filter-v1"},
          {"language", std::string(LanguageName(language))},
          {"keywords", keywords},
          {"model", model.ToJson()}};
}

QuestionFilter QuestionFilter::FromJson(const nlohmann::json& j) {
  try {
    QuestionFilter f;
    f.language = ParseLanguage(j.at("language").get<std::string>());
    f.keywords = j.at("keywords").get<std::vector<std::string>>();
    f.model = LinearModel::FromJson(j.at("model"));
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCheckpointMismatch, e.what());
  }
}

void QuestionFilter::Save(const std::filesystem::path& path) const {
  WriteFile(path, ToJson().dump() + "\n");
}

QuestionFilter QuestionFilter::Load(const std::filesystem::path& path) {
  try {
    return FromJson(nlohmann::json::parse(ReadFile(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCheckpointMismatch, e.what());
  }
}

}  // namespace qcmine

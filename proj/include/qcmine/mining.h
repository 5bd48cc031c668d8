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

#ifndef QCMINE_MINING_H_
#define QCMINE_MINING_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcmine/models.h"
#include "qcmine/question_filter.h"
#include "qcmine/tokenize.h"

namespace qcmine {

enum class Provenance { kSingleCode, kEnsembleMined, kAnnotated };
std::string_view ProvenanceName(Provenance provenance);
Provenance ParseProvenance(std::string_view name);

// One line of the output dataset.
struct MinedPair {
  int64_t question_id = 0;
  std::string title;
  std::string code;  // raw snippet, not normalized
  int position = 0;
  Provenance provenance = Provenance::kSingleCode;
  std::optional<double> score;  // bi-view P(solution) for ensemble pairs

  // Keys in declaration order.
  nlohmann::ordered_json ToJson() const;
  static MinedPair FromJson(const nlohmann::json& j);
};

// Python: any tag containing "python". SQL: a tag equal to "sql",
// "database" or "oracle".
bool InDomain(const std::vector<std::string>& tags, Language language);

struct MineConfig {
  Language language = Language::kPython;
  // Must match the normalizer used at training time; null means defaults.
  const PythonNormalizer* python = nullptr;
};

struct MiningReport {
  int64_t records = 0;
  int64_t parse_errors = 0;
  int64_t out_of_domain = 0;
  int64_t filtered_non_howto = 0;
  int64_t no_code = 0;
  int64_t single_code_pairs = 0;
  int64_t multi_code_posts = 0;
  int64_t ensemble_blocks = 0;
  int64_t ensemble_mined_pairs = 0;
  int64_t ensemble_rejected = 0;
  int64_t abstained = 0;

  nlohmann::json ToJson() const;
};

struct MiningModels {
  const Model* biview = nullptr;  // BivHnn
  const Model* text = nullptr;    // TextHnn
  const Model* code = nullptr;    // CodeHnn
  const QuestionFilter* filter = nullptr;
};

// Throws kCheckpointMismatch unless the three models have the expected
// variants and all components share `language`.
void CheckMiningModels(const MiningModels& models, Language language);

// Streams the dump: out-of-domain and non-how-to questions are dropped,
// single-code answers yield a SingleCode pair, multi-code answers go through
// the agreement ensemble block by block. Unanimous 1 -> EnsembleMined pair,
// unanimous 0 -> dropped, disagreement -> one JSON line in `abstentions`.
// Malformed records are counted and skipped.
MiningReport Mine(const std::filesystem::path& dump, const MiningModels& models,
                  const std::filesystem::path& out,
                  const std::filesystem::path& abstentions,
                  const MineConfig& config);

std::vector<MinedPair> ReadDataset(const std::filesystem::path& path);
void WriteDataset(const std::filesystem::path& path,
                  const std::vector<MinedPair>& pairs);

struct MergeReport {
  int64_t mined = 0;
  int64_t annotated_added = 0;
  int64_t replaced = 0;
  int64_t total = 0;
  nlohmann::json ToJson() const;
};

// Adds every label-1 annotated (question_id, position) as an Annotated pair,
// taking title and code from the dump. An annotated pair replaces a mined
// pair with the same key. Throws kPositionMismatch when an annotated key
// does not exist in the dump.
MergeReport MergeAnnotated(const std::filesystem::path& mined,
                           const std::filesystem::path& annotated_csv,
                           const std::filesystem::path& dump,
                           const std::filesystem::path& out);

struct DatasetStats {
  int64_t pairs = 0;
  int64_t single_code = 0;
  int64_t ensemble_mined = 0;
  int64_t annotated = 0;
  int64_t questions = 0;  // distinct question ids
  double avg_question_tokens = 0.0;
  double avg_code_tokens = 0.0;
  int64_t distinct_question_tokens = 0;
  int64_t distinct_code_tokens = 0;

  // pairs == single_code + ensemble_mined + annotated
  bool Consistent() const;
  nlohmann::json ToJson() const;
};

DatasetStats ComputeDatasetStats(const std::vector<MinedPair>& pairs,
                                 Language language);
DatasetStats ComputeDatasetStats(const std::filesystem::path& dataset,
                                 Language language);

}  // namespace qcmine

#endif  // QCMINE_MINING_H_

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

#include "qcmine/mining.h"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "qcmine/error.h"
#include "qcmine/io.h"
#include "qcmine/train_eval.h"

namespace qcmine {

std::string_view ProvenanceName(Provenance provenance) {
  switch (provenance) {
    case Provenance::kSingleCode: return "single-code";
    case Provenance::kEnsembleMined: return "ensemble-mined";
    case Provenance::kAnnotated: return "annotated";
  }
  return "single-code";
}

Provenance ParseProvenance(std::string_view name) {
  if (name == "single-code") return Provenance::kSingleCode;
  if (name == "ensemble-mined") return Provenance::kEnsembleMined;
  if (name == "annotated") return Provenance::kAnnotated;
  throw Error(ErrorCode::kDumpParseError,
              "unknown provenance '" + std::string(name) + "'");
}

nlohmann::ordered_json MinedPair::ToJson() const {
  nlohmann::ordered_json j;
  j["question_id"] = question_id;
  j["title"] = title;
  j["code"] = code;
  j["position"] = position;
  j["provenance"] = std::string(ProvenanceName(provenance));
  if (score) {
    j["score"] = *score;
  } else {
    j["score"] = nullptr;
  }
  return j;
}

MinedPair MinedPair::FromJson(const nlohmann::json& j) {
  try {
    MinedPair p;
    p.question_id = j.at("question_id").get<int64_t>();
    p.title = j.at("title").get<std::string>();
    p.code = j.at("code").get<std::string>();
    p.position = j.at("position").get<int>();
    p.provenance = ParseProvenance(j.at("provenance").get<std::string>());
    if (j.contains("score") && !j.at("score").is_null()) {
      p.score = j.at("score").get<double>();
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDumpParseError, e.what());
  }
}

bool InDomain(const std::vector<std::string>& tags, Language language) {
  for (const auto& raw : tags) {
    const std::string tag = ToLowerAscii(raw);
    if (language == Language::kPython) {
      if (tag.find("python") != std::string::npos) return true;
    } else if (language == Language::kSql) {
      if (tag == "sql" || tag == "database" || tag == "oracle") return true;
    }
  }
  return false;
}

nlohmann::json MiningReport::ToJson() const {
  return {{"records", records},
          {"parse_errors", parse_errors},
          {"out_of_domain", out_of_domain},
          {"filtered_non_howto", filtered_non_howto},
          {"no_code", no_code},
          {"single_code_pairs", single_code_pairs},
          {"multi_code_posts", multi_code_posts},
          {"ensemble_blocks", ensemble_blocks},
          {"ensemble_mined_pairs", ensemble_mined_pairs},
          {"ensemble_rejected", ensemble_rejected},
          {"abstained", abstained}};
}

void CheckMiningModels(const MiningModels& models, Language language) {
  auto check = [&](const Model* m, Variant want, const char* role) {
    if (m == nullptr) {
      throw Error(ErrorCode::kCheckpointMismatch,
                  std::string(role) + " model missing");
    }
    if (m->config().variant != want) {
      throw Error(ErrorCode::kCheckpointMismatch,
                  std::string(role) + " model must be " +
                      std::string(VariantName(want)) + ", got " +
                      std::string(VariantName(m->config().variant)));
    }
    if (m->config().language != language) {
      throw Error(ErrorCode::kCheckpointMismatch,
                  std::string(role) + " model was trained for " +
                      std::string(LanguageName(m->config().language)));
    }
  };
  check(models.biview, Variant::kBivHnn, "bi-view");
  check(models.text, Variant::kTextHnn, "text-only");
  check(models.code, Variant::kCodeHnn, "code-only");
  if (models.filter == nullptr) {
    throw Error(ErrorCode::kCheckpointMismatch, "question filter missing");
  }
  if (models.filter->language != language) {
    throw Error(ErrorCode::kCheckpointMismatch,
                "question filter was trained for another language");
  }
}

MiningReport Mine(const std::filesystem::path& dump, const MiningModels& models,
                  const std::filesystem::path& out,
                  const std::filesystem::path& abstentions,
                  const MineConfig& config) {
  CheckMiningModels(models, config.language);
  std::ofstream pairs_out(out, std::ios::binary | std::ios::trunc);
  std::ofstream abstain_out(abstentions, std::ios::binary | std::ios::trunc);
  if (!pairs_out || !abstain_out) {
    throw Error(ErrorCode::kIoError, "cannot open mining outputs");
  }
  MiningReport report;
  ForEachDumpRecord(
      dump,
      [&](DumpRecord record) {
        ++report.records;
        if (!InDomain(record.tags, config.language)) {
          ++report.out_of_domain;
          return;
        }
        if (models.filter->Classify(record).label != QuestionType::kHowTo) {
          ++report.filtered_non_howto;
          return;
        }
        BlockSequence seq = ParsePostLenient(record.accepted_answer_html);
        seq.question_id = record.question_id;
        const size_t n = seq.CodeCount();
        if (n == 0) {
          ++report.no_code;
          return;
        }
        if (n == 1) {
          MinedPair pair{record.question_id, record.title, seq.Code(1).raw, 1,
                         Provenance::kSingleCode, std::nullopt};
          pairs_out << pair.ToJson().dump() << '\n';
          ++report.single_code_pairs;
          return;
        }
        ++report.multi_code_posts;
        const auto instances =
            ExtractInstances(record.title, seq, std::nullopt, config.language,
                             config.python);
        for (const auto& inst : instances) {
          ++report.ensemble_blocks;
          const EnsembleDecision d =
              Ensemble(*models.biview, *models.text, *models.code, inst);
          if (d.decision == EnsembleLabel::kLabel1) {
            MinedPair pair{record.question_id, record.title,
                           seq.Code(inst.position).raw, inst.position,
                           Provenance::kEnsembleMined, d.biview_score};
            pairs_out << pair.ToJson().dump() << '\n';
            ++report.ensemble_mined_pairs;
          } else if (d.decision == EnsembleLabel::kLabel0) {
            ++report.ensemble_rejected;
          } else {
            nlohmann::ordered_json line;
            line["question_id"] = record.question_id;
            line["position"] = inst.position;
            line["votes"] = d.votes;
            line["biview_score"] = d.biview_score;
            abstain_out << line.dump() << '\n';
            ++report.abstained;
          }
        }
      },
      [&](size_t, const std::string&) { ++report.parse_errors; });
  return report;
}

std::vector<MinedPair> ReadDataset(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  std::vector<MinedPair> pairs;
  std::string line;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    try {
      pairs.push_back(MinedPair::FromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kDumpParseError, e.what());
    }
  }
  return pairs;
}

void WriteDataset(const std::filesystem::path& path,
                  const std::vector<MinedPair>& pairs) {
  std::string text;
  for (const auto& pair : pairs) text += pair.ToJson().dump() + "\n";
  WriteFile(path, text);
}

nlohmann::json MergeReport::ToJson() const {
  return {{"mined", mined},
          {"annotated_added", annotated_added},
          {"replaced", replaced},
          {"total", total}};
}

MergeReport MergeAnnotated(const std::filesystem::path& mined,
                           const std::filesystem::path& annotated_csv,
                           const std::filesystem::path& dump,
                           const std::filesystem::path& out) {
  const AnnotatedLabels labels = ReadAnnotatedLabels(annotated_csv);
  std::map<std::pair<int64_t, int>, MinedPair> annotated;
  std::set<int64_t> found;
  ForEachDumpRecord(
      dump,
      [&](DumpRecord record) {
        auto it = labels.find(record.question_id);
        if (it == labels.end()) return;
        found.insert(record.question_id);
        const BlockSequence seq = ParsePostLenient(record.accepted_answer_html);
        for (const auto& [position, label] : it->second) {
          if (position < 1 || static_cast<size_t>(position) > seq.CodeCount()) {
            throw Error(ErrorCode::kPositionMismatch,
                        "question " + std::to_string(record.question_id) +
                            " has no code block " + std::to_string(position));
          }
          if (label != 1) continue;
          annotated[{record.question_id, position}] =
              MinedPair{record.question_id, record.title,
                        seq.Code(static_cast<size_t>(position)).raw, position,
                        Provenance::kAnnotated, std::nullopt};
        }
      },
      [](size_t, const std::string&) {});
  for (const auto& [qid, positions] : labels) {
    if (!found.count(qid)) {
      throw Error(ErrorCode::kPositionMismatch,
                  "annotated question " + std::to_string(qid) +
                      " not found in dump");
    }
  }

  MergeReport report;
  std::vector<MinedPair> pairs = ReadDataset(mined);
  report.mined = static_cast<int64_t>(pairs.size());
  std::set<std::pair<int64_t, int>> used;
  for (MinedPair& pair : pairs) {
    auto it = annotated.find({pair.question_id, pair.position});
    if (it != annotated.end()) {
      pair = it->second;
      used.insert(it->first);
      ++report.replaced;
    }
  }
  for (const auto& [key, pair] : annotated) {
    if (used.count(key)) continue;
    pairs.push_back(pair);
    ++report.annotated_added;
  }
  report.total = static_cast<int64_t>(pairs.size());
  WriteDataset(out, pairs);
  return report;
}

bool DatasetStats::Consistent() const {
  return pairs == single_code + ensemble_mined + annotated;
}

nlohmann::json DatasetStats::ToJson() const {
  return {{"pairs", pairs},
          {"single_code", single_code},
          {"ensemble_mined", ensemble_mined},
          {"annotated", annotated},
          {"questions", questions},
          {"avg_question_tokens", avg_question_tokens},
          {"avg_code_tokens", avg_code_tokens},
          {"distinct_question_tokens", distinct_question_tokens},
          {"distinct_code_tokens", distinct_code_tokens},
          {"consistent", Consistent()}};
}

DatasetStats ComputeDatasetStats(const std::vector<MinedPair>& pairs,
                                 Language language) {
  DatasetStats stats;
  std::unordered_set<std::string> question_vocab;
  std::unordered_set<std::string> code_vocab;
  std::unordered_set<int64_t> questions;
  double question_tokens = 0;
  double code_tokens = 0;
  for (const MinedPair& pair : pairs) {
    ++stats.pairs;
    switch (pair.provenance) {
      case Provenance::kSingleCode: ++stats.single_code; break;
      case Provenance::kEnsembleMined: ++stats.ensemble_mined; break;
      case Provenance::kAnnotated: ++stats.annotated; break;
    }
    questions.insert(pair.question_id);
    const auto q = TokenizeText(pair.title).tokens;
    const auto c = NormalizeCode(pair.code, language).tokens;
    question_tokens += static_cast<double>(q.size());
    code_tokens += static_cast<double>(c.size());
    question_vocab.insert(q.begin(), q.end());
    code_vocab.insert(c.begin(), c.end());
  }
  stats.questions = static_cast<int64_t>(questions.size());
  if (stats.pairs > 0) {
    stats.avg_question_tokens = question_tokens / static_cast<double>(stats.pairs);
    stats.avg_code_tokens = code_tokens / static_cast<double>(stats.pairs);
  }
  stats.distinct_question_tokens = static_cast<int64_t>(question_vocab.size());
  stats.distinct_code_tokens = static_cast<int64_t>(code_vocab.size());
  return stats;
}

DatasetStats ComputeDatasetStats(const std::filesystem::path& dataset,
                                 Language language) {
  return ComputeDatasetStats(ReadDataset(dataset), language);
}

}  // namespace qcmine

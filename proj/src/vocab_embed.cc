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

#include "qcmine/vocab_embed.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qcmine/error.h"
#include "qcmine/nn/random.h"

namespace qcmine {

Vocabulary::Vocabulary() {
  Append(std::string(kPadToken));
  Append(std::string(kUnkToken));
  Append(std::string(kCodeBlockToken));
}

void Vocabulary::Append(std::string token) {
  token_to_id_.emplace(token, static_cast<int>(id_to_token_.size()));
  id_to_token_.push_back(std::move(token));
}

int Vocabulary::Lookup(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnk : it->second;
}

bool Vocabulary::Contains(std::string_view token) const {
  return token_to_id_.count(std::string(token)) > 0;
}

std::vector<int> Vocabulary::Lookup(
    const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& token : tokens) ids.push_back(Lookup(token));
  return ids;
}

nlohmann::json Vocabulary::ToJson() const {
  nlohmann::json j = nlohmann::json::object();
  for (size_t id = 0; id < id_to_token_.size(); ++id) {
    j[id_to_token_[id]] = static_cast<int>(id);
  }
  return j;
}

Vocabulary Vocabulary::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kConfigInvalid, "vocabulary must be a JSON object");
  }
  std::vector<std::string> by_id(j.size());
  std::vector<bool> seen(j.size(), false);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const int id = it.value().get<int>();
    if (id < 0 || static_cast<size_t>(id) >= by_id.size() || seen[id]) {
      throw Error(ErrorCode::kConfigInvalid, "vocabulary ids not contiguous");
    }
    by_id[id] = it.key();
    seen[id] = true;
  }
  if (by_id.size() < 3 || by_id[kPad] != kPadToken ||
      by_id[kUnk] != kUnkToken || by_id[kCodeBlock] != kCodeBlockToken) {
    throw Error(ErrorCode::kConfigInvalid, "vocabulary specials missing");
  }
  Vocabulary vocab;
  for (size_t id = 3; id < by_id.size(); ++id) vocab.Append(by_id[id]);
  return vocab;
}

void VocabularyBuilder::Add(const std::vector<std::string>& tokens) {
  for (const auto& token : tokens) {
    ++counts_[token];
    ++total_;
  }
}

Vocabulary VocabularyBuilder::Build(int min_count) const {
  if (min_count < 1) {
    throw Error(ErrorCode::kConfigInvalid, "min_count must be >= 1");
  }
  if (total_ == 0) throw Error(ErrorCode::kEmptyCorpus, "no tokens");
  std::vector<std::pair<std::string, int64_t>> entries;
  for (const auto& [token, count] : counts_) {
    if (count < min_count) continue;
    if (token == Vocabulary::kPadToken || token == Vocabulary::kUnkToken ||
        token == Vocabulary::kCodeBlockToken) {
      continue;
    }
    entries.emplace_back(token, count);
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  for (auto& [token, count] : entries) vocab.Append(token);
  return vocab;
}

Vocabulary BuildVocab(const std::vector<std::vector<std::string>>& streams,
                      int min_count) {
  VocabularyBuilder builder;
  for (const auto& stream : streams) builder.Add(stream);
  return builder.Build(min_count);
}

EmbeddingMatrix RandomEmbeddings(const Vocabulary& vocab, int d,
                                 uint64_t seed) {
  if (d < 1) throw Error(ErrorCode::kConfigInvalid, "embedding dim < 1");
  EmbeddingMatrix m{nn::Tensor::Zeros(vocab.size(), d)};
  nn::Rng rng(seed);
  for (int r = 0; r < vocab.size(); ++r) {
    for (int c = 0; c < d; ++c) m.table.at(r, c) = rng.Uniform(-0.05, 0.05);
  }
  for (double& v : m.table.row(Vocabulary::kPad)) v = 0.0;
  return m;
}

EmbeddingMatrix LoadEmbeddings(const std::filesystem::path& path,
                               const Vocabulary& vocab, int d, uint64_t seed) {
  EmbeddingMatrix m = RandomEmbeddings(vocab, d, seed);
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<double> values;
    std::string value;
    while (fields >> value) {
      try {
        values.push_back(std::stod(value));
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "non-numeric value on line " + std::to_string(line_number));
      }
    }
    if (static_cast<int>(values.size()) != d) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "line " + std::to_string(line_number) + " has " +
                      std::to_string(values.size()) + " values, expected " +
                      std::to_string(d));
    }
    if (!vocab.Contains(token)) continue;
    const int id = vocab.Lookup(token);
    if (id == Vocabulary::kPad) continue;
    std::copy(values.begin(), values.end(), m.table.row(id).begin());
  }
  return m;
}

}  // namespace qcmine

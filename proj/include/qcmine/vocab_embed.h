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

#ifndef QCMINE_VOCAB_EMBED_H_
#define QCMINE_VOCAB_EMBED_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "qcmine/nn/tensor.h"

namespace qcmine {

// Token <-> id mapping with fixed special ids. Ids are contiguous.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCodeBlock = 2;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";
  static constexpr std::string_view kCodeBlockToken = "<codeblock>";

  Vocabulary();  // specials only

  int size() const { return static_cast<int>(id_to_token_.size()); }
  // Out-of-vocabulary tokens map to kUnk.
  int Lookup(std::string_view token) const;
  bool Contains(std::string_view token) const;
  const std::string& Token(int id) const { return id_to_token_.at(id); }
  std::vector<int> Lookup(const std::vector<std::string>& tokens) const;

  nlohmann::json ToJson() const;  // {token: id}
  static Vocabulary FromJson(const nlohmann::json& j);

  bool operator==(const Vocabulary& other) const {
    return id_to_token_ == other.id_to_token_;
  }

 private:
  friend class VocabularyBuilder;
  void Append(std::string token);

  std::unordered_map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
};

// Counts token frequencies over any number of streams. Build() keeps tokens
// with count >= min_count ordered by (-count, token).
class VocabularyBuilder {
 public:
  void Add(const std::vector<std::string>& tokens);
  // Throws kEmptyCorpus when nothing was added, kConfigInvalid for
  // min_count < 1.
  Vocabulary Build(int min_count = 1) const;

 private:
  std::unordered_map<std::string, int64_t> counts_;
  int64_t total_ = 0;
};

Vocabulary BuildVocab(const std::vector<std::vector<std::string>>& streams,
                      int min_count = 1);

// Rows of an embedding table; row kPad is zero.
struct EmbeddingMatrix {
  nn::Tensor table;  // vocab size x dim
  int dim() const { return table.cols(); }
};

// Reads "token v1 ... vd" rows. Tokens of `vocab` present in the file take
// the file vector, the rest are drawn from uniform(-0.05, 0.05) with `seed`.
// Throws kDimensionMismatch when a row does not have exactly d values.
EmbeddingMatrix LoadEmbeddings(const std::filesystem::path& path,
                               const Vocabulary& vocab, int d, uint64_t seed);
// Same, without a file.
EmbeddingMatrix RandomEmbeddings(const Vocabulary& vocab, int d, uint64_t seed);

}  // namespace qcmine

#endif  // QCMINE_VOCAB_EMBED_H_

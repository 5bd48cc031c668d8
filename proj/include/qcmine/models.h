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

#ifndef QCMINE_MODELS_H_
#define QCMINE_MODELS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qcmine/nn/graph.h"
#include "qcmine/nn/layers.h"
#include "qcmine/post_parser.h"
#include "qcmine/tokenize.h"
#include "qcmine/vocab_embed.h"

namespace qcmine {

enum class Variant {
  kBivHnn,
  kBivHnnNq,
  kTextHnn,
  kCodeHnn,
  kTextRnn,
  kBivRnn,
  kBivHff,
};

std::string_view VariantName(Variant variant);
// "biv-hnn", "biv-hnn-nq", "text-hnn", "code-hnn", "text-rnn", "biv-rnn",
// "biv-hff" (underscores and case are ignored).
Variant ParseVariant(std::string_view name);
const std::vector<Variant>& AllVariants();

struct VariantConfig {
  Variant variant = Variant::kBivHnn;
  int d_embed = 150;
  int d_token_gru = 64;   // grid {64, 128}
  int d_block = 128;      // grid {128, 256}
  uint64_t seed = 1;
  bool share_text_question_encoder = true;
  bool freeze_embeddings = false;
  Language language = Language::kPython;

  // kConfigInvalid for non-positive dimensions or Language::kText.
  void Validate() const;
  nlohmann::json ToJson() const;
  static VariantConfig FromJson(const nlohmann::json& j);
  // FNV-1a of the canonical JSON, hex.
  std::string Hash() const;
};

struct BiGruParams {
  nn::GruParams fwd;
  nn::GruParams bwd;
};

// Only the tensors the variant's topology needs are present.
struct ModelParameters {
  std::optional<nn::Tensor> word_embeddings;
  std::optional<nn::Tensor> code_embeddings;
  std::optional<BiGruParams> text_token_gru;
  std::optional<BiGruParams> question_token_gru;  // when not shared
  std::optional<BiGruParams> code_token_gru;
  std::optional<nn::DenseParams> fusion;
  std::optional<BiGruParams> block_gru;
  std::optional<BiGruParams> flat_gru;
  std::optional<nn::DenseParams> block_ff;
  std::optional<nn::DenseParams> output;
  std::optional<nn::Tensor> empty_block_vector;

  // Visits (name, tensor) in a fixed order.
  template <typename Fn>
  void ForEach(Fn&& fn);
  template <typename Fn>
  void ForEach(Fn&& fn) const;

  ModelParameters ZerosLike() const;
  void SetZero();
  std::vector<std::string> Names() const;
  bool AllFinite() const;
};

struct ModelOutput {
  std::array<double, 2> probs{};  // [P(label 0), P(label 1)]
  nn::Vector z;                   // code block representation
};

struct Prediction {
  int label = 0;       // 1 iff probs[1] >= 0.5
  double score = 0.0;  // probs[1]
};

class Model {
 public:
  // Glorot-initialized matrices, zero biases, embeddings from the optional
  // text-format vector files or uniform(-0.05, 0.05). Deterministic per seed.
  static Model Init(const VariantConfig& config, Vocabulary word_vocab,
                    Vocabulary code_vocab,
                    const std::optional<std::filesystem::path>& word_vectors =
                        std::nullopt,
                    const std::optional<std::filesystem::path>& code_vectors =
                        std::nullopt);

  const VariantConfig& config() const { return config_; }
  const Vocabulary& word_vocab() const { return word_vocab_; }
  const Vocabulary& code_vocab() const { return code_vocab_; }
  const ModelParameters& params() const { return params_; }
  ModelParameters& mutable_params() { return params_; }

  // Throws kEmptyCode when the instance has no code tokens.
  ModelOutput Forward(const CodeContextInstance& inst) const;
  Prediction Predict(const CodeContextInstance& inst) const;

  // Cross-entropy of `gold` for one instance; gradients scaled by `scale`
  // are added into `grads` (a ZerosLike() of params()).
  double ForwardBackward(const CodeContextInstance& inst, int gold,
                         ModelParameters& grads, double scale = 1.0) const;
  double Loss(const CodeContextInstance& inst, int gold) const;

  nlohmann::json ToJson() const;
  static Model FromJson(const nlohmann::json& j);
  std::string Serialize() const;  // canonical checkpoint text
  void Save(const std::filesystem::path& path) const;
  static Model Load(const std::filesystem::path& path);

 private:
  struct Built {
    nn::Graph::Node logits;
    nn::Graph::Node z;
  };
  Built Build(nn::Graph& g, const CodeContextInstance& inst,
              ModelParameters* grads) const;

  VariantConfig config_;
  Vocabulary word_vocab_;
  Vocabulary code_vocab_;
  ModelParameters params_;
};

// Label 1 iff score >= 0.5.
Prediction LabelFromProbs(const std::array<double, 2>& probs);

}  // namespace qcmine

#include "qcmine/models_inl.h"

#endif  // QCMINE_MODELS_H_

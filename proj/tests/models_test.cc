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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "qcmine/error.h"
#include "qcmine/models.h"
#include "qcmine/train_eval.h"
#include "support/fixtures.h"

namespace qcmine {
namespace {

using testing::CueDataset;
using testing::MakeInstance;
using testing::TinyModel;

bool HasName(const Model& m, const std::string& prefix) {
  for (const auto& n : m.params().Names()) {
    if (n.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

void ZeroAll(Model& m) {
  m.mutable_params().ForEach([](const std::string&, nn::Tensor& t) { t.Fill(0.0); });
}

TEST_SUITE("models") {

TEST_CASE("variant names round trip") {
  for (Variant v : AllVariants()) CHECK(ParseVariant(VariantName(v)) == v);
  CHECK(ParseVariant("BiV_HNN") == Variant::kBivHnn);
  CHECK(ParseVariant("bivhnnnq") == Variant::kBivHnnNq);
  CHECK_THROWS_AS(ParseVariant("cnn"), Error);
  CHECK(AllVariants().size() == 7);
}

TEST_CASE("config defaults, validation and json") {
  VariantConfig c;
  CHECK(c.d_embed == 150);
  CHECK(c.d_token_gru == 64);
  CHECK(c.d_block == 128);
  CHECK(c.share_text_question_encoder);
  CHECK(VariantConfig::FromJson(c.ToJson()).Hash() == c.Hash());
  VariantConfig bad = c;
  bad.d_block = 0;
  CHECK_THROWS_AS(bad.Validate(), Error);
  VariantConfig other = c;
  other.seed = 2;
  CHECK(other.Hash() != c.Hash());
}

TEST_CASE("same config and seed give identical checkpoints") {
  auto data = CueDataset(6, 1);
  for (Variant v : AllVariants()) {
    CHECK(TinyModel(v, data, 6, 4, 5, 9).Serialize() ==
          TinyModel(v, data, 6, 4, 5, 9).Serialize());
  }
  CHECK(TinyModel(Variant::kBivHnn, data, 6, 4, 5, 9).Serialize() !=
        TinyModel(Variant::kBivHnn, data, 6, 4, 5, 10).Serialize());
}

TEST_CASE("topology per variant") {
  auto data = CueDataset(4, 1);
  auto m = [&](Variant v) { return TinyModel(v, data, 6, 4, 5, 1); };
  CHECK_FALSE(HasName(m(Variant::kTextHnn), "code_token_gru"));
  CHECK_FALSE(HasName(m(Variant::kTextHnn), "code_embeddings"));
  CHECK_FALSE(HasName(m(Variant::kTextRnn), "code_embeddings"));
  CHECK(HasName(m(Variant::kBivHnn), "fusion"));
  CHECK_FALSE(HasName(m(Variant::kBivHnnNq), "fusion"));
  CHECK_FALSE(HasName(m(Variant::kCodeHnn), "block_gru"));
  CHECK(HasName(m(Variant::kBivRnn), "flat_gru"));
  CHECK(HasName(m(Variant::kBivHff), "block_ff"));
  CHECK_FALSE(HasName(m(Variant::kBivHff), "block_gru"));

  const int z_dims[] = {10, 10, 10, 8, 8, 8, 10};  // 2*d_block or 2*d_token
  for (size_t i = 0; i < AllVariants().size(); ++i) {
    Model model = m(AllVariants()[i]);
    CAPTURE(VariantName(AllVariants()[i]));
    CHECK(static_cast<int>(model.Forward(data[0]).z.size()) == z_dims[i]);
  }
}

TEST_CASE("shared question encoder means exactly one text encoder") {
  auto data = CueDataset(4, 1);
  Model shared = TinyModel(Variant::kBivHnn, data, 6, 4, 5, 1);
  int text_encoders = 0;
  for (const auto& n : shared.params().Names()) {
    if (n == "text_token_gru.fwd.w") ++text_encoders;
    CHECK(n.rfind("question_token_gru", 0) != 0);
  }
  CHECK(text_encoders == 1);

  VariantConfig c = shared.config();
  c.share_text_question_encoder = false;
  Model split = Model::Init(c, shared.word_vocab(), shared.code_vocab());
  CHECK(HasName(split, "question_token_gru"));
  CHECK(split.params().Names().size() > shared.params().Names().size());
}

TEST_CASE("all-zero parameters predict the tie for every variant") {
  auto data = CueDataset(10, 3);
  for (Variant v : AllVariants()) {
    Model m = TinyModel(v, data, 6, 4, 5, 1);
    ZeroAll(m);
    for (const auto& inst : data) {
      const ModelOutput out = m.Forward(inst);
      CHECK(out.probs[0] == 0.5);
      CHECK(out.probs[1] == 0.5);
      const Prediction p = m.Predict(inst);
      CHECK(p.label == 1);
      CHECK(p.score == 0.5);
    }
  }
}

TEST_CASE("probabilities sum to one on random instances") {
  auto data = CueDataset(30, 4);
  for (Variant v : AllVariants()) {
    Model m = TinyModel(v, data, 6, 4, 5, 2);
    for (const auto& inst : data) {
      const ModelOutput out = m.Forward(inst);
      CHECK(std::abs(out.probs[0] + out.probs[1] - 1.0) <= 1e-12);
      CHECK(out.probs[1] > 0.0);
      CHECK(out.probs[1] < 1.0);
    }
  }
}

TEST_CASE("label rule") {
  CHECK(LabelFromProbs({0.3, 0.7}).label == 1);
  CHECK(LabelFromProbs({0.3, 0.7}).score == 0.7);
  CHECK(LabelFromProbs({0.5, 0.5}).label == 1);
  CHECK(LabelFromProbs({0.5000001, 0.4999999}).label == 0);
}

TEST_CASE("empty contexts and unknown tokens are handled") {
  auto data = CueDataset(4, 1);
  for (Variant v : AllVariants()) {
    Model m = TinyModel(v, data, 6, 4, 5, 1);
    auto inst = MakeInstance({}, {}, {"VAR"}, {});
    CHECK_NOTHROW(m.Forward(inst));
    auto unk = MakeInstance({"zzz"}, {"qqq"}, {"never_seen"}, {"www"});
    CHECK_NOTHROW(m.Forward(unk));
  }
}

TEST_CASE("empty code is rejected") {
  auto data = CueDataset(4, 1);
  Model m = TinyModel(Variant::kBivHnn, data, 6, 4, 5, 1);
  try {
    m.Forward(MakeInstance({"q"}, {"a"}, {}, {"b"}));
    FAIL("expected EmptyCode");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyCode);
  }
}

TEST_CASE("missing embedding table is reported") {
  auto data = CueDataset(4, 1);
  Model m = TinyModel(Variant::kBivHnn, data, 6, 4, 5, 1);
  m.mutable_params().code_embeddings.reset();
  try {
    m.Forward(data[0]);
    FAIL("expected VocabMissing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kVocabMissing);
  }
}

TEST_CASE("property: variant invariances") {
  auto data = CueDataset(6, 5);
  nn::Rng rng(31);
  Model text = TinyModel(Variant::kTextHnn, data, 6, 4, 5, 3);
  Model text_rnn = TinyModel(Variant::kTextRnn, data, 6, 4, 5, 3);
  Model code = TinyModel(Variant::kCodeHnn, data, 6, 4, 5, 3);
  Model nq = TinyModel(Variant::kBivHnnNq, data, 6, 4, 5, 3);
  Model biv = TinyModel(Variant::kBivHnn, data, 6, 4, 5, 3);
  int biv_changed = 0;
  for (int trial = 0; trial < 50; ++trial) {
    auto base = data[rng.Below(data.size())];
    auto swapped_code = base;
    swapped_code.code_tokens = testing::RandomTokens(rng, testing::CodePool(), 1, 6);
    CHECK(text.Forward(base).probs == text.Forward(swapped_code).probs);
    CHECK(text_rnn.Forward(base).probs == text_rnn.Forward(swapped_code).probs);

    auto swapped_context = base;
    swapped_context.pre_tokens = testing::RandomTokens(rng, testing::FillerWords(), 0, 5);
    swapped_context.post_tokens = testing::RandomTokens(rng, testing::FillerWords(), 0, 5);
    CHECK(code.Forward(base).probs == code.Forward(swapped_context).probs);

    auto swapped_question = base;
    swapped_question.question_tokens =
        testing::RandomTokens(rng, testing::FillerWords(), 1, 5);
    CHECK(nq.Forward(base).probs == nq.Forward(swapped_question).probs);
    if (biv.Forward(base).probs != biv.Forward(swapped_question).probs) ++biv_changed;
  }
  // Sanity: the full model does read the question.
  CHECK(biv_changed > 0);
}

TEST_CASE("checkpoint round trip is lossless") {
  auto data = CueDataset(10, 2);
  for (Variant v : AllVariants()) {
    Model m = TinyModel(v, data, 6, 4, 5, 8);
    // Perturb away from initialization so every tensor carries odd values.
    Trainer(m, TrainConfig{0.05, 5, 1, 1, 1}).RunEpoch(data);
    const auto path = std::filesystem::temp_directory_path() /
                      ("qcmine_ckpt_" + std::string(VariantName(v)) + ".json");
    m.Save(path);
    Model back = Model::Load(path);
    CHECK(back.Serialize() == m.Serialize());
    for (const auto& inst : data) {
      CHECK(back.Forward(inst).probs == m.Forward(inst).probs);
    }
    std::vector<nn::Tensor> a, b;
    m.params().ForEach([&](const std::string&, const nn::Tensor& t) { a.push_back(t); });
    back.params().ForEach([&](const std::string&, const nn::Tensor& t) { b.push_back(t); });
    CHECK(a == b);
  }
}

TEST_CASE("tampered checkpoints are rejected") {
  auto data = CueDataset(4, 2);
  Model m = TinyModel(Variant::kBivHnn, data, 6, 4, 5, 8);
  auto expect_mismatch = [](const nlohmann::json& j) {
    try {
      Model::FromJson(j);
      FAIL("expected CheckpointMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kCheckpointMismatch);
    }
  };
  nlohmann::json j = m.ToJson();
  j["config_hash"] = "0000";
  expect_mismatch(j);
  j = m.ToJson();
  j["params"].erase("fusion.w");
  expect_mismatch(j);
  j = m.ToJson();
  j["params"]["fusion.b"]["shape"] = {3};
  expect_mismatch(j);
  j = m.ToJson();
  j["format"] = "something-else";
  expect_mismatch(j);
}

TEST_CASE("PAD row stays zero and frozen embeddings stay fixed") {
  auto data = CueDataset(10, 6);
  for (auto& inst : data) inst.pre_tokens.push_back(std::string(Vocabulary::kPadToken));
  Model m = TinyModel(Variant::kBivHnn, data, 6, 4, 5, 1);
  Trainer trainer(m, TrainConfig{0.05, 5, 10, 1, 1});
  for (int e = 0; e < 5; ++e) trainer.RunEpoch(data);
  for (double x : m.params().word_embeddings->row(Vocabulary::kPad)) CHECK(x == 0.0);
  for (double x : m.params().code_embeddings->row(Vocabulary::kPad)) CHECK(x == 0.0);

  VariantConfig c = m.config();
  c.freeze_embeddings = true;
  Model frozen = Model::Init(c, m.word_vocab(), m.code_vocab());
  const nn::Tensor words = *frozen.params().word_embeddings;
  const nn::Tensor out_w = frozen.params().output->w;
  Trainer t2(frozen, TrainConfig{0.05, 5, 10, 1, 1});
  t2.RunEpoch(data);
  CHECK(*frozen.params().word_embeddings == words);
  CHECK_FALSE(frozen.params().output->w == out_w);
}

TEST_CASE("gradient check for every variant at tiny dimensions") {
  auto data = CueDataset(4, 12);
  for (Variant v : AllVariants()) {
    for (uint64_t seed : {1, 2}) {
      Model m = TinyModel(v, data, 5, 3, 4, seed);
      const auto& inst = data[seed % data.size()];
      const auto summary = testing::CheckModelGradients(m, inst, *inst.label, 0, seed);
      INFO(VariantName(v) << " seed " << seed << " worst " << summary.worst);
      CHECK(summary.max_relative_error < 1e-4);
    }
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace qcmine

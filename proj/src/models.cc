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

#include "qcmine/models.h"

#include <cstdio>

#include "qcmine/error.h"
#include "qcmine/io.h"
#include "qcmine/nn/random.h"

namespace qcmine {
namespace {

constexpr const char* kCheckpointFormat = "qcmine-checkpoint-v1";

using nn::Graph;

bool UsesCode(Variant v) {
  return v != Variant::kTextHnn && v != Variant::kTextRnn;
}
bool UsesTokenTextEncoder(Variant v) {
  return v != Variant::kTextRnn && v != Variant::kBivRnn;
}
bool UsesQuestion(Variant v) {
  return v == Variant::kBivHnn || v == Variant::kCodeHnn ||
         v == Variant::kBivHff;
}
bool UsesBlockGru(Variant v) {
  return v == Variant::kBivHnn || v == Variant::kBivHnnNq ||
         v == Variant::kTextHnn;
}
bool IsFlat(Variant v) {
  return v == Variant::kTextRnn || v == Variant::kBivRnn;
}

BiGruParams InitBiGru(int in, int hidden, nn::Rng& rng) {
  BiGruParams p{nn::GruParams::Zeros(in, hidden),
                nn::GruParams::Zeros(in, hidden)};
  for (nn::GruParams* g : {&p.fwd, &p.bwd}) {
    g->w_r = nn::GlorotInit(hidden, in + hidden, rng);
    g->w_u = nn::GlorotInit(hidden, in + hidden, rng);
    g->w = nn::GlorotInit(hidden, in + hidden, rng);
  }
  return p;
}

nn::DenseParams InitDense(int in, int out, nn::Activation act, nn::Rng& rng) {
  nn::DenseParams p = nn::DenseParams::Zeros(in, out, act);
  p.w = nn::GlorotInit(out, in, rng);
  return p;
}

std::string Fnv1aHex(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json TensorToJson(const nn::Tensor& t) {
  return {{"shape", t.shape()}, {"data", t.data()}};
}

nn::Tensor TensorFromJson(const nlohmann::json& j) {
  try {
    return nn::Tensor(j.at("shape").get<std::vector<int>>(),
                      j.at("data").get<std::vector<double>>());
  } catch (const Error& e) {
    throw Error(ErrorCode::kCheckpointMismatch, e.what());
  }
}

}  // namespace

std::string_view VariantName(Variant variant) {
  switch (variant) {
    case Variant::kBivHnn: return "biv-hnn";
    case Variant::kBivHnnNq: return "biv-hnn-nq";
    case Variant::kTextHnn: return "text-hnn";
    case Variant::kCodeHnn: return "code-hnn";
    case Variant::kTextRnn: return "text-rnn";
    case Variant::kBivRnn: return "biv-rnn";
    case Variant::kBivHff: return "biv-hff";
  }
  return "biv-hnn";
}

Variant ParseVariant(std::string_view name) {
  std::string key;
  for (char c : ToLowerAscii(name)) {
    if (c != '-' && c != '_') key.push_back(c);
  }
  for (Variant v : AllVariants()) {
    std::string candidate;
    for (char c : VariantName(v)) {
      if (c != '-') candidate.push_back(c);
    }
    if (candidate == key) return v;
  }
  throw Error(ErrorCode::kConfigInvalid,
              "unknown variant '" + std::string(name) + "'");
}

const std::vector<Variant>& AllVariants() {
  static const std::vector<Variant> kAll = {
      Variant::kBivHnn,  Variant::kBivHnnNq, Variant::kTextHnn,
      Variant::kCodeHnn, Variant::kTextRnn,  Variant::kBivRnn,
      Variant::kBivHff};
  return kAll;
}

void VariantConfig::Validate() const {
  if (d_embed < 1 || d_token_gru < 1 || d_block < 1) {
    throw Error(ErrorCode::kConfigInvalid, "dimensions must be positive");
  }
  if (language == Language::kText) {
    throw Error(ErrorCode::kConfigInvalid, "code language must be python/sql");
  }
}

nlohmann::json VariantConfig::ToJson() const {
  return {{"variant", std::string(VariantName(variant))},
          {"d_embed", d_embed},
          {"d_token_gru", d_token_gru},
          {"d_block", d_block},
          {"seed", seed},
          {"share_text_question_encoder", share_text_question_encoder},
          {"freeze_embeddings", freeze_embeddings},
          {"language", std::string(LanguageName(language))}};
}

VariantConfig VariantConfig::FromJson(const nlohmann::json& j) {
  VariantConfig c;
  if (j.contains("variant")) {
    c.variant = ParseVariant(j.at("variant").get<std::string>());
  }
  c.d_embed = j.value("d_embed", c.d_embed);
  c.d_token_gru = j.value("d_token_gru", c.d_token_gru);
  c.d_block = j.value("d_block", c.d_block);
  c.seed = j.value("seed", c.seed);
  c.share_text_question_encoder =
      j.value("share_text_question_encoder", c.share_text_question_encoder);
  c.freeze_embeddings = j.value("freeze_embeddings", c.freeze_embeddings);
  if (j.contains("language")) {
    c.language = ParseLanguage(j.at("language").get<std::string>());
  }
  c.Validate();
  return c;
}

std::string VariantConfig::Hash() const { return Fnv1aHex(ToJson().dump()); }

ModelParameters ModelParameters::ZerosLike() const {
  ModelParameters z = *this;
  z.SetZero();
  return z;
}

void ModelParameters::SetZero() {
  ForEach([](const std::string&, nn::Tensor& t) { t.Fill(0.0); });
}

std::vector<std::string> ModelParameters::Names() const {
  std::vector<std::string> names;
  ForEach([&](const std::string& name, const nn::Tensor&) {
    names.push_back(name);
  });
  return names;
}

bool ModelParameters::AllFinite() const {
  bool finite = true;
  ForEach([&](const std::string&, const nn::Tensor& t) {
    finite = finite && t.AllFinite();
  });
  return finite;
}

Prediction LabelFromProbs(const std::array<double, 2>& probs) {
  return {probs[1] >= 0.5 ? 1 : 0, probs[1]};
}

Model Model::Init(const VariantConfig& config, Vocabulary word_vocab,
                  Vocabulary code_vocab,
                  const std::optional<std::filesystem::path>& word_vectors,
                  const std::optional<std::filesystem::path>& code_vectors) {
  config.Validate();
  Model m;
  m.config_ = config;
  m.word_vocab_ = std::move(word_vocab);
  m.code_vocab_ = std::move(code_vocab);
  const Variant v = config.variant;
  const int de = config.d_embed;
  const int dt = config.d_token_gru;
  const int db = config.d_block;
  ModelParameters& p = m.params_;

  p.word_embeddings =
      (word_vectors ? LoadEmbeddings(*word_vectors, m.word_vocab_, de,
                                     config.seed + 1)
                    : RandomEmbeddings(m.word_vocab_, de, config.seed + 1))
          .table;
  if (UsesCode(v)) {
    p.code_embeddings =
        (code_vectors ? LoadEmbeddings(*code_vectors, m.code_vocab_, de,
                                       config.seed + 2)
                      : RandomEmbeddings(m.code_vocab_, de, config.seed + 2))
            .table;
  }

  nn::Rng rng(config.seed);
  if (UsesTokenTextEncoder(v)) {
    p.text_token_gru = InitBiGru(de, dt, rng);
    if (UsesQuestion(v) && !config.share_text_question_encoder) {
      p.question_token_gru = InitBiGru(de, dt, rng);
    }
    p.empty_block_vector = nn::Tensor::Zeros(2 * dt);
    for (double& x : p.empty_block_vector->data()) x = rng.Uniform(-0.05, 0.05);
  }
  if (UsesCode(v) && !IsFlat(v)) p.code_token_gru = InitBiGru(de, dt, rng);
  if (UsesQuestion(v)) {
    p.fusion = InitDense(4 * dt, 2 * dt, nn::Activation::kTanh, rng);
  }
  int z_dim = 0;
  if (UsesBlockGru(v)) {
    p.block_gru = InitBiGru(2 * dt, db, rng);
    z_dim = 2 * db;
  } else if (IsFlat(v)) {
    p.flat_gru = InitBiGru(de, dt, rng);
    z_dim = 2 * dt;
  } else if (v == Variant::kBivHff) {
    p.block_ff = InitDense(6 * dt, 2 * db, nn::Activation::kTanh, rng);
    z_dim = 2 * db;
  } else {  // kCodeHnn
    z_dim = 2 * dt;
  }
  p.output = InitDense(z_dim, 2, nn::Activation::kNone, rng);
  return m;
}

Model::Built Model::Build(Graph& g, const CodeContextInstance& inst,
                          ModelParameters* grads) const {
  const Variant v = config_.variant;
  const ModelParameters& p = params_;
  if (inst.code_tokens.empty()) {
    throw Error(ErrorCode::kEmptyCode,
                "instance " + std::to_string(inst.question_id) + "#" +
                    std::to_string(inst.position) + " has no code tokens");
  }
  if (!p.word_embeddings || (UsesCode(v) && !p.code_embeddings)) {
    throw Error(ErrorCode::kVocabMissing, "embedding table missing");
  }
  const bool frozen = config_.freeze_embeddings;
  nn::Tensor* word_grad =
      grads && !frozen ? &*grads->word_embeddings : nullptr;
  nn::Tensor* code_grad =
      grads && !frozen && grads->code_embeddings ? &*grads->code_embeddings
                                                 : nullptr;

  auto embed = [&](const std::vector<int>& ids, const nn::Tensor& table,
                   nn::Tensor* grad, std::vector<Graph::Node>& out) {
    for (int id : ids) {
      out.push_back(g.EmbeddingRow(table, grad, id, id == Vocabulary::kPad));
    }
  };
  auto words = [&](const std::vector<std::string>& tokens) {
    std::vector<Graph::Node> xs;
    embed(word_vocab_.Lookup(tokens), *p.word_embeddings, word_grad, xs);
    return xs;
  };
  auto codes = [&]() {
    std::vector<Graph::Node> xs;
    embed(code_vocab_.Lookup(inst.code_tokens), *p.code_embeddings, code_grad,
          xs);
    return xs;
  };
  auto sub = [&](auto member) {
    return grads ? &*(grads->*member) : nullptr;
  };
  // [last forward state, first backward state] of a token-level Bi-GRU.
  auto encode = [&](const std::vector<Graph::Node>& xs, const BiGruParams& enc,
                    BiGruParams* enc_grads) -> Graph::Node {
    if (xs.empty()) {
      return g.Parameter(*p.empty_block_vector,
                         grads ? &*grads->empty_block_vector : nullptr);
    }
    nn::BiGruNodes bi =
        nn::BiGru(g, xs, enc.fwd, enc_grads ? &enc_grads->fwd : nullptr,
                  enc.bwd, enc_grads ? &enc_grads->bwd : nullptr);
    return g.Concat({bi.forward.back(), bi.backward.front()});
  };
  auto encode_text = [&](const std::vector<std::string>& tokens) {
    return encode(words(tokens), *p.text_token_gru,
                  sub(&ModelParameters::text_token_gru));
  };
  auto encode_question = [&]() {
    if (p.question_token_gru) {
      return encode(words(inst.question_tokens), *p.question_token_gru,
                    sub(&ModelParameters::question_token_gru));
    }
    return encode_text(inst.question_tokens);
  };
  auto encode_code = [&]() {
    return encode(codes(), *p.code_token_gru,
                  sub(&ModelParameters::code_token_gru));
  };
  auto fused_code = [&]() {
    Graph::Node vq = encode_question();
    Graph::Node vc = encode_code();
    return g.Dense(g.Concat({vq, vc}), *p.fusion, sub(&ModelParameters::fusion));
  };
  auto block_level = [&](Graph::Node s_pre, Graph::Node c,
                         Graph::Node s_post) {
    const std::array<Graph::Node, 3> seq = {s_pre, c, s_post};
    BiGruParams* bg = sub(&ModelParameters::block_gru);
    nn::BiGruNodes bi =
        nn::BiGru(g, seq, p.block_gru->fwd, bg ? &bg->fwd : nullptr,
                  p.block_gru->bwd, bg ? &bg->bwd : nullptr);
    return g.Concat({bi.forward[1], bi.backward[1]});
  };

  Graph::Node z = -1;
  switch (v) {
    case Variant::kBivHnn: {
      Graph::Node s_pre = encode_text(inst.pre_tokens);
      Graph::Node c = fused_code();
      Graph::Node s_post = encode_text(inst.post_tokens);
      z = block_level(s_pre, c, s_post);
      break;
    }
    case Variant::kBivHnnNq: {
      Graph::Node s_pre = encode_text(inst.pre_tokens);
      Graph::Node c = encode_code();
      Graph::Node s_post = encode_text(inst.post_tokens);
      z = block_level(s_pre, c, s_post);
      break;
    }
    case Variant::kTextHnn: {
      Graph::Node s_pre = encode_text(inst.pre_tokens);
      Graph::Node c = encode_text({std::string(Vocabulary::kCodeBlockToken)});
      Graph::Node s_post = encode_text(inst.post_tokens);
      z = block_level(s_pre, c, s_post);
      break;
    }
    case Variant::kCodeHnn:
      z = fused_code();
      break;
    case Variant::kTextRnn:
    case Variant::kBivRnn: {
      std::vector<Graph::Node> xs = words(inst.pre_tokens);
      const size_t marker = xs.size();
      if (v == Variant::kTextRnn) {
        xs.push_back(g.EmbeddingRow(*p.word_embeddings, word_grad,
                                    Vocabulary::kCodeBlock));
      } else {
        std::vector<Graph::Node> code = codes();
        xs.insert(xs.end(), code.begin(), code.end());
      }
      std::vector<Graph::Node> post = words(inst.post_tokens);
      xs.insert(xs.end(), post.begin(), post.end());
      BiGruParams* fg = sub(&ModelParameters::flat_gru);
      nn::BiGruNodes bi =
          nn::BiGru(g, xs, p.flat_gru->fwd, fg ? &fg->fwd : nullptr,
                    p.flat_gru->bwd, fg ? &fg->bwd : nullptr);
      z = v == Variant::kTextRnn
              ? g.Concat({bi.forward[marker], bi.backward[marker]})
              : g.Concat({bi.forward.back(), bi.backward.front()});
      break;
    }
    case Variant::kBivHff: {
      Graph::Node s_pre = encode_text(inst.pre_tokens);
      Graph::Node c = fused_code();
      Graph::Node s_post = encode_text(inst.post_tokens);
      z = g.Dense(g.Concat({s_pre, c, s_post}), *p.block_ff,
                  sub(&ModelParameters::block_ff));
      break;
    }
  }
  Graph::Node logits = g.Dense(z, *p.output, sub(&ModelParameters::output));
  return {logits, z};
}

ModelOutput Model::Forward(const CodeContextInstance& inst) const {
  Graph g(/*record=*/false);
  Built built = Build(g, inst, nullptr);
  nn::SoftmaxXentResult sm = nn::SoftmaxXent(g.Value(built.logits), 0);
  ModelOutput out;
  out.probs = {sm.probs[0], sm.probs[1]};
  out.z = g.Value(built.z);
  return out;
}

Prediction Model::Predict(const CodeContextInstance& inst) const {
  return LabelFromProbs(Forward(inst).probs);
}

double Model::ForwardBackward(const CodeContextInstance& inst, int gold,
                              ModelParameters& grads, double scale) const {
  Graph g(/*record=*/true);
  Built built = Build(g, inst, &grads);
  Graph::Node loss = g.SoftmaxXent(built.logits, gold);
  const double value = g.Value(loss)[0];
  g.Backward(loss, scale);
  return value;
}

double Model::Loss(const CodeContextInstance& inst, int gold) const {
  Graph g(/*record=*/false);
  Built built = Build(g, inst, nullptr);
  return nn::SoftmaxXent(g.Value(built.logits), gold).loss;
}

nlohmann::json Model::ToJson() const {
  nlohmann::json params = nlohmann::json::object();
  params_.ForEach([&](const std::string& name, const nn::Tensor& t) {
    params[name] = TensorToJson(t);
  });
  return {{"format", kCheckpointFormat},
          {"config", config_.ToJson()},
          {"config_hash", config_.Hash()},
          {"word_vocab", word_vocab_.ToJson()},
          {"code_vocab", code_vocab_.ToJson()},
          {"params", params}};
}

Model Model::FromJson(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string()) != kCheckpointFormat) {
      throw Error(ErrorCode::kCheckpointMismatch, "unknown checkpoint format");
    }
    VariantConfig config = VariantConfig::FromJson(j.at("config"));
    if (j.value("config_hash", std::string()) != config.Hash()) {
      throw Error(ErrorCode::kCheckpointMismatch, "config hash mismatch");
    }
    // Re-create the topology, then overwrite every tensor.
    Model m = Init(config, Vocabulary::FromJson(j.at("word_vocab")),
                   Vocabulary::FromJson(j.at("code_vocab")));
    const nlohmann::json& params = j.at("params");
    size_t matched = 0;
    m.params_.ForEach([&](const std::string& name, nn::Tensor& t) {
      if (!params.contains(name)) {
        throw Error(ErrorCode::kCheckpointMismatch, "missing tensor " + name);
      }
      nn::Tensor loaded = TensorFromJson(params.at(name));
      if (!loaded.SameShape(t)) {
        throw Error(ErrorCode::kCheckpointMismatch,
                    "tensor " + name + " has shape " + loaded.ShapeString() +
                        ", expected " + t.ShapeString());
      }
      t = std::move(loaded);
      ++matched;
    });
    if (matched != params.size()) {
      throw Error(ErrorCode::kCheckpointMismatch,
                  "checkpoint has tensors the variant does not use");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCheckpointMismatch, e.what());
  }
}

std::string Model::Serialize() const { return ToJson().dump(); }

void Model::Save(const std::filesystem::path& path) const {
  WriteFile(path, Serialize() + "\n");
}

Model Model::Load(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCheckpointMismatch, e.what());
  }
  return FromJson(j);
}

}  // namespace qcmine

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

#ifndef QCMINE_MODELS_INL_H_
#define QCMINE_MODELS_INL_H_

#include <string>

namespace qcmine {
namespace internal {

template <typename Gru, typename Fn>
void VisitGru(const std::string& prefix, Gru& gru, Fn& fn) {
  fn(prefix + ".w_r", gru.w_r);
  fn(prefix + ".w_u", gru.w_u);
  fn(prefix + ".w", gru.w);
  fn(prefix + ".b_r", gru.b_r);
  fn(prefix + ".b_u", gru.b_u);
  fn(prefix + ".b", gru.b);
}

template <typename Params, typename Fn>
void VisitParams(Params& p, Fn& fn) {
  if (p.word_embeddings) fn(std::string("word_embeddings"), *p.word_embeddings);
  if (p.code_embeddings) fn(std::string("code_embeddings"), *p.code_embeddings);
  auto bigru = [&fn](const char* name, auto& opt) {
    if (!opt) return;
    VisitGru(std::string(name) + ".fwd", opt->fwd, fn);
    VisitGru(std::string(name) + ".bwd", opt->bwd, fn);
  };
  auto dense = [&fn](const char* name, auto& opt) {
    if (!opt) return;
    fn(std::string(name) + ".w", opt->w);
    fn(std::string(name) + ".b", opt->b);
  };
  bigru("text_token_gru", p.text_token_gru);
  bigru("question_token_gru", p.question_token_gru);
  bigru("code_token_gru", p.code_token_gru);
  dense("fusion", p.fusion);
  bigru("block_gru", p.block_gru);
  bigru("flat_gru", p.flat_gru);
  dense("block_ff", p.block_ff);
  dense("output", p.output);
  if (p.empty_block_vector) {
    fn(std::string("empty_block_vector"), *p.empty_block_vector);
  }
}

}  // namespace internal

template <typename Fn>
void ModelParameters::ForEach(Fn&& fn) {
  internal::VisitParams(*this, fn);
}

template <typename Fn>
void ModelParameters::ForEach(Fn&& fn) const {
  internal::VisitParams(*this, fn);
}

}  // namespace qcmine

#endif  // QCMINE_MODELS_INL_H_

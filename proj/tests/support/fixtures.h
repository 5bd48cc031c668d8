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

#ifndef QCMINE_TESTS_SUPPORT_FIXTURES_H_
#define QCMINE_TESTS_SUPPORT_FIXTURES_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcmine/error.h"
#include "qcmine/models.h"
#include "qcmine/nn/gradcheck.h"
#include "qcmine/nn/random.h"
#include "qcmine/post_parser.h"

namespace qcmine::testing {

CodeContextInstance MakeInstance(std::vector<std::string> question,
                                 std::vector<std::string> pre,
                                 std::vector<std::string> code,
                                 std::vector<std::string> post, int label = 0);

// Word and code pools used by the random generators below.
const std::vector<std::string>& FillerWords();
const std::vector<std::string>& CodePool();

std::vector<std::string> RandomTokens(nn::Rng& rng,
                                      const std::vector<std::string>& pool,
                                      int min_len, int max_len);

// Separable set where label 1 blocks are introduced with "try" and hold a
// function definition, label 0 blocks follow "output" and hold a console
// demo. Both views carry the signal; filler tokens vary per instance.
// Labels alternate so both classes are always present.
std::vector<CodeContextInstance> CueDataset(int n, uint64_t seed);

// A model whose vocabularies cover `data` (plus the random pools).
Model TinyModel(Variant variant, const std::vector<CodeContextInstance>& data,
                int d_embed, int d_token, int d_block, uint64_t seed);

// Random but well-formed answer-post HTML with `code_blocks` display code
// blocks, mixing paragraphs, lists, headings, inline code, entities and
// blockquoted <pre> (which stays text).
struct FuzzPost {
  std::string html;
  int code_blocks = 0;
  bool starts_with_code = false;
  bool ends_with_code = false;
  int adjacent_code_pairs = 0;
};
FuzzPost RandomPost(nn::Rng& rng);

// Random bytes, including NUL, high bytes and quote characters.
std::string RandomBytes(nn::Rng& rng, int max_len);

// One differentiable tensor and the buffer its gradient is accumulated in.
struct ParamRef {
  std::string name;
  nn::Tensor* value;
  nn::Tensor* grad;
};

struct GradCheckSummary {
  double max_relative_error = 0.0;
  std::string worst;  // "name[index] analytic=.. numeric=.."
  size_t checked = 0;
};

// `run(record)` evaluates the loss; with record=true it must also zero the
// gradient buffers and backpropagate into them. Each tensor is checked in
// full unless it has more than `max_entries` entries.
GradCheckSummary CheckGradients(const std::vector<ParamRef>& params,
                                const std::function<double(bool)>& run,
                                size_t max_entries, uint64_t seed);

// Gradient check of a whole model on one instance.
GradCheckSummary CheckModelGradients(Model& model,
                                     const CodeContextInstance& inst, int gold,
                                     size_t max_entries, uint64_t seed);

// The library error code raised by `fn`, or nullopt if it returns.
std::optional<ErrorCode> ErrorCodeOf(const std::function<void()>& fn);

}  // namespace qcmine::testing

#endif  // QCMINE_TESTS_SUPPORT_FIXTURES_H_

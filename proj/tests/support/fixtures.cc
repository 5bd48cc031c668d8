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

#include "support/fixtures.h"

#include <sstream>
#include <utility>

#include "qcmine/train_eval.h"
#include "qcmine/vocab_embed.h"

namespace qcmine::testing {

CodeContextInstance MakeInstance(std::vector<std::string> question,
                                 std::vector<std::string> pre,
                                 std::vector<std::string> code,
                                 std::vector<std::string> post, int label) {
  CodeContextInstance inst;
  inst.question_id = 1;
  inst.question_tokens = std::move(question);
  inst.pre_tokens = std::move(pre);
  inst.code_tokens = std::move(code);
  inst.post_tokens = std::move(post);
  inst.code_line_starts = {0};
  inst.label = label;
  inst.position = 1;
  return inst;
}

const std::vector<std::string>& FillerWords() {
  static const std::vector<std::string> kWords = {
      "the", "a", "you", "can", "this", "list", "value", "use", "here", "it",
      "is", "with", "function", "loop", "result", "string", "python", "then",
      "also", "example", ":", ".", ","};
  return kWords;
}

const std::vector<std::string>& CodePool() {
  static const std::vector<std::string> kCode = {
      "VAR", "=", "(", ")", ":", "NUMBER", "STRING", "for", "in", "if",
      "return", "print", "[", "]", ",", "."};
  return kCode;
}

std::vector<std::string> RandomTokens(nn::Rng& rng,
                                      const std::vector<std::string>& pool,
                                      int min_len, int max_len) {
  const int n =
      min_len + static_cast<int>(rng.Below(static_cast<uint64_t>(max_len - min_len + 1)));
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(pool[rng.Below(pool.size())]);
  return out;
}

std::vector<CodeContextInstance> CueDataset(int n, uint64_t seed) {
  nn::Rng rng(seed);
  std::vector<CodeContextInstance> data;
  for (int i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : 0;
    auto pre = RandomTokens(rng, FillerWords(), 0, 3);
    pre.insert(pre.begin() + static_cast<long>(rng.Below(pre.size() + 1)),
               label == 1 ? "try" : "output");
    std::vector<std::string> code;
    if (label == 1) {
      code = {"def", "VAR", "(", "VAR", ")", ":", "return", "VAR"};
    } else {
      code = {">>>", "VAR", "(", "NUMBER", ")", "NUMBER"};
    }
    auto noise = RandomTokens(rng, CodePool(), 0, 2);
    code.insert(code.end(), noise.begin(), noise.end());
    auto inst = MakeInstance(RandomTokens(rng, FillerWords(), 1, 4), pre, code,
                             RandomTokens(rng, FillerWords(), 0, 3), label);
    inst.question_id = 100 + i;
    data.push_back(std::move(inst));
  }
  return data;
}

Model TinyModel(Variant variant, const std::vector<CodeContextInstance>& data,
                int d_embed, int d_token, int d_block, uint64_t seed) {
  VocabularyBuilder words;
  VocabularyBuilder code;
  words.Add(FillerWords());
  words.Add({"try", "output", "how", "to"});
  code.Add(CodePool());
  code.Add({"def", ">>>"});
  for (const auto& inst : data) {
    words.Add(inst.question_tokens);
    words.Add(inst.pre_tokens);
    words.Add(inst.post_tokens);
    code.Add(inst.code_tokens);
  }
  VariantConfig config;
  config.variant = variant;
  config.d_embed = d_embed;
  config.d_token_gru = d_token;
  config.d_block = d_block;
  config.seed = seed;
  return Model::Init(config, words.Build(), code.Build());
}

namespace {

std::string RandomProse(nn::Rng& rng) {
  static const std::vector<std::string> kWords = {
      "try", "this", "or", "use", "the", "output", "is", "&amp;", "&lt;b&gt;",
      "x", "value", "list", "caf\xc3\xa9", "&#233;", "then"};
  std::string s;
  const int n = 1 + static_cast<int>(rng.Below(6));
  for (int i = 0; i < n; ++i) {
    if (i > 0) s += ' ';
    s += kWords[rng.Below(kWords.size())];
  }
  return s;
}

std::string RandomTextElement(nn::Rng& rng) {
  switch (rng.Below(6)) {
    case 0: return "<p>" + RandomProse(rng) + "</p>";
    case 1:
      return "<ul><li>" + RandomProse(rng) + "</li><li>" + RandomProse(rng) +
             "</li></ul>";
    case 2: return "<h2>" + RandomProse(rng) + "</h2>";
    case 3:
      return "<p>Use <code>" + RandomProse(rng) + "</code> here.</p>";
    case 4:
      return "<blockquote><pre><code>" + RandomProse(rng) +
             "</code></pre></blockquote>";
    default: return "<p><strong>" + RandomProse(rng) + "</strong></p>";
  }
}

std::string RandomCode(nn::Rng& rng) {
  static const std::vector<std::string> kLines = {
      "x = 1", "print(x)", "&gt;&gt;&gt; f(2)", "for i in range(3):",
      "    total += i", "SELECT a FROM t", "return &quot;s&quot;"};
  std::string s;
  const int n = 1 + static_cast<int>(rng.Below(3));
  for (int i = 0; i < n; ++i) {
    if (i > 0) s += '\n';
    s += kLines[rng.Below(kLines.size())];
  }
  return "<pre><code>" + s + "\n</code></pre>";
}

}  // namespace

FuzzPost RandomPost(nn::Rng& rng) {
  FuzzPost post;
  const int elements = 1 + static_cast<int>(rng.Below(9));
  bool previous_code = false;
  for (int i = 0; i < elements; ++i) {
    const bool code = rng.Below(2) == 0;
    if (code) {
      post.html += RandomCode(rng);
      ++post.code_blocks;
      if (i == 0) post.starts_with_code = true;
      if (previous_code) ++post.adjacent_code_pairs;
    } else {
      post.html += RandomTextElement(rng);
    }
    if (rng.Below(3) == 0) post.html += "\n";
    previous_code = code;
  }
  post.ends_with_code = previous_code;
  return post;
}

std::string RandomBytes(nn::Rng& rng, int max_len) {
  static const std::string kSpecial = "'\"`#$?!\\\n\t >=<()[]{}.,:;@-+*/";
  const int n = static_cast<int>(rng.Below(static_cast<uint64_t>(max_len) + 1));
  std::string s;
  for (int i = 0; i < n; ++i) {
    switch (rng.Below(4)) {
      case 0: s += static_cast<char>(rng.Below(256)); break;
      case 1: s += kSpecial[rng.Below(kSpecial.size())]; break;
      default: s += static_cast<char>('a' + rng.Below(26)); break;
    }
  }
  return s;
}

GradCheckSummary CheckGradients(const std::vector<ParamRef>& params,
                                const std::function<double(bool)>& run,
                                size_t max_entries, uint64_t seed) {
  run(true);
  // Snapshot: the finite-difference probes below must not disturb it.
  std::vector<nn::Tensor> analytic;
  for (const auto& p : params) analytic.push_back(*p.grad);
  nn::Rng rng(seed);
  GradCheckSummary summary;
  for (size_t i = 0; i < params.size(); ++i) {
    const nn::GradCheckReport r = nn::CheckGradient(
        *params[i].value, analytic[i], [&] { return run(false); }, 1e-5,
        max_entries, &rng);
    summary.checked += r.checked;
    if (r.checked > 0 && (summary.worst.empty() ||
                          r.max_relative_error > summary.max_relative_error)) {
      summary.max_relative_error = r.max_relative_error;
      std::ostringstream os;
      os << params[i].name << "[" << r.worst_index
         << "] analytic=" << r.worst_analytic << " numeric=" << r.worst_numeric;
      summary.worst = os.str();
    }
  }
  return summary;
}

GradCheckSummary CheckModelGradients(Model& model,
                                     const CodeContextInstance& inst, int gold,
                                     size_t max_entries, uint64_t seed) {
  ModelParameters grads = model.params().ZerosLike();
  std::vector<ParamRef> refs;
  std::vector<nn::Tensor*> grad_ptrs;
  grads.ForEach([&](const std::string&, nn::Tensor& t) { grad_ptrs.push_back(&t); });
  size_t k = 0;
  model.mutable_params().ForEach([&](const std::string& name, nn::Tensor& t) {
    refs.push_back({name, &t, grad_ptrs[k++]});
  });
  auto run = [&](bool record) {
    if (record) {
      grads.SetZero();
      return model.ForwardBackward(inst, gold, grads);
    }
    return model.Loss(inst, gold);
  };
  return CheckGradients(refs, run, max_entries, seed);
}

std::optional<ErrorCode> ErrorCodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace qcmine::testing

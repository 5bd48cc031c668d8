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

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "qcmine/error.h"
#include "qcmine/nn/random.h"
#include "qcmine/question_filter.h"
#include "support/fixtures.h"

namespace qcmine {
namespace {

QuestionFeatures Featurize(const std::string& title, const std::string& question,
                           const std::string& answer) {
  return FeaturizeQuestion(title, ParsePostLenient(question),
                           ParsePostLenient(answer), DefaultQuestionKeywords(),
                           Language::kPython);
}

LinearModel ZeroModel() {
  LinearModel m;
  m.weights.assign(DefaultQuestionKeywords().size() + 4, 0.0);
  m.trained = true;
  return m;
}

TEST_SUITE("question_filter") {

TEST_CASE("keyword matching is case-insensitive on token boundaries") {
  auto f = Featurize("How to limit a number to be within a specified range?", "", "");
  CHECK(f.keyword_flags.at("how to"));
  CHECK_FALSE(f.keyword_flags.at("why"));
  CHECK(f.title_len == 12);
  auto g = Featurize("Showtime: whyever", "", "");
  CHECK_FALSE(g.keyword_flags.at("how to"));
  CHECK_FALSE(g.keyword_flags.at("why"));
  CHECK(Featurize("WHY does this fail", "", "").keyword_flags.at("why"));
}

TEST_CASE("code block counts and lengths") {
  std::string answer;
  for (int i = 0; i < 4; ++i) answer += "<pre><code>x = 1</code></pre>";
  auto f = Featurize("t", "<p>q</p><pre><code>a = b + c</code></pre>", answer);
  CHECK(f.n_code_blocks_answer == 4);
  CHECK(f.n_code_blocks_question == 1);
  CHECK(f.max_code_block_len == 5);

  auto e = Featurize("t", "<p>q</p>", "<p>no code</p>");
  CHECK(e.max_code_block_len == 0);
  CHECK(e.n_code_blocks_answer == 0);
}

TEST_CASE("zero-weight model gives the how-to tie") {
  auto c = ClassifyQuestion(Featurize("anything", "", ""), ZeroModel(),
                            DefaultQuestionKeywords());
  CHECK(c.probability == 0.5);
  CHECK(c.label == QuestionType::kHowTo);
}

TEST_CASE("untrained model is rejected") {
  try {
    ClassifyQuestion(Featurize("t", "", ""), LinearModel{}, DefaultQuestionKeywords());
    FAIL("expected UntrainedModel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUntrainedModel);
  }
}

TEST_CASE("property: probability is a sigmoid, monotone in each weight") {
  nn::Rng rng(23);
  const auto& kw = DefaultQuestionKeywords();
  const std::vector<std::string> titles = {"How to sort a list", "Why is this slow",
                                           "Error in loop", "How do I do that"};
  for (int trial = 0; trial < 300; ++trial) {
    auto f = Featurize(titles[rng.Below(titles.size())], "",
                       rng.Below(2) ? "<pre><code>x</code></pre>" : "<p>t</p>");
    LinearModel m = ZeroModel();
    for (double& w : m.weights) w = rng.Uniform(-2, 2);
    m.bias = rng.Uniform(-1, 1);
    const auto base = ClassifyQuestion(f, m, kw);
    CHECK(base.probability > 0.0);
    CHECK(base.probability < 1.0);
    CHECK((base.label == QuestionType::kHowTo) == (base.probability >= 0.5));
    // Raising the weight of an active feature cannot lower the probability.
    const SparseFeatureVector x = QuestionFeatureVector(f, kw);
    for (const auto& [id, value] : x.values) {
      LinearModel up = m;
      up.weights[id] += 0.5;
      const double p = ClassifyQuestion(f, up, kw).probability;
      if (value > 0) CHECK(p >= base.probability);
    }
  }
}

TEST_CASE("filter save and load") {
  QuestionFilter f;
  f.model = ZeroModel();
  f.model.weights[0] = 1.5;
  f.language = Language::kSql;
  const auto path = std::filesystem::temp_directory_path() / "qcmine_filter.json";
  f.Save(path);
  QuestionFilter back = QuestionFilter::Load(path);
  CHECK(back.language == Language::kSql);
  CHECK(back.keywords == f.keywords);
  CHECK(back.model.weights == f.model.weights);
  DumpRecord r;
  r.title = "How to join tables";
  CHECK(back.Classify(r).probability == f.Classify(r).probability);
}

}  // TEST_SUITE

}  // namespace
}  // namespace qcmine

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

#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "qcmine/error.h"
#include "qcmine/io.h"
#include "qcmine/vocab_embed.h"

namespace qcmine {
namespace {

std::filesystem::path TempFile(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  WriteFile(path, text);
  return path;
}

TEST_SUITE("vocab_embed") {

TEST_CASE("min_count cutoff keeps frequent tokens") {
  Vocabulary v = BuildVocab({{"a", "a", "b"}}, 2);
  CHECK(v.size() == 4);
  CHECK(v.Lookup("a") == 3);
  CHECK(v.Lookup("b") == Vocabulary::kUnk);
}

TEST_CASE("specials plus every token at min_count 1") {
  Vocabulary v = BuildVocab({{"a", "b"}}, 1);
  CHECK(v.size() == 5);
  CHECK(v.Token(Vocabulary::kPad) == Vocabulary::kPadToken);
  CHECK(v.Token(Vocabulary::kUnk) == Vocabulary::kUnkToken);
  CHECK(v.Token(Vocabulary::kCodeBlock) == Vocabulary::kCodeBlockToken);
  CHECK(v.Lookup(std::string(Vocabulary::kCodeBlockToken)) == Vocabulary::kCodeBlock);
}

TEST_CASE("ordering is by descending count then token, and deterministic") {
  const std::vector<std::vector<std::string>> corpus = {
      {"z", "y", "y", "x", "x", "w"}};
  Vocabulary a = BuildVocab(corpus);
  Vocabulary b = BuildVocab(corpus);
  CHECK(a == b);
  CHECK(a.Token(3) == "x");
  CHECK(a.Token(4) == "y");
  CHECK(a.Token(5) == "w");
  CHECK(a.Token(6) == "z");
}

TEST_CASE("ids are contiguous and unknowns map to UNK") {
  Vocabulary v = BuildVocab({{"p", "q", "r"}, {"q"}});
  for (int id = 0; id < v.size(); ++id) CHECK(v.Lookup(v.Token(id)) == id);
  CHECK(v.Lookup("never-seen") == Vocabulary::kUnk);
  CHECK(v.Lookup(std::vector<std::string>{"q", "nope"}) ==
        std::vector<int>{3, Vocabulary::kUnk});
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(BuildVocab({}), Error);
  CHECK_THROWS_AS(BuildVocab({{"a"}}, 0), Error);
}

TEST_CASE("json round trip") {
  Vocabulary v = BuildVocab({{"b", "a", "a"}});
  CHECK(Vocabulary::FromJson(v.ToJson()) == v);
  CHECK(v.ToJson().at("a").get<int>() == 3);
}

TEST_CASE("file covering all tokens reproduces the file rows") {
  Vocabulary v = BuildVocab({{"a", "b"}});
  auto path = TempFile("qcmine_vec_full.txt",
                       "a 0.1 0.2\nb -1 2.5\n<unk> 3 4\n<codeblock> 5 6\n");
  EmbeddingMatrix m = LoadEmbeddings(path, v, 2, 7);
  CHECK(m.dim() == 2);
  CHECK(m.table.at(v.Lookup("a"), 0) == 0.1);
  CHECK(m.table.at(v.Lookup("a"), 1) == 0.2);
  CHECK(m.table.at(v.Lookup("b"), 0) == -1.0);
  CHECK(m.table.at(v.Lookup("b"), 1) == 2.5);
  CHECK(m.table.at(Vocabulary::kUnk, 1) == 4.0);
  CHECK(m.table.at(Vocabulary::kPad, 0) == 0.0);
}

TEST_CASE("empty file falls back to seeded random rows with a zero PAD") {
  Vocabulary v = BuildVocab({{"a", "b", "c"}});
  auto path = TempFile("qcmine_vec_empty.txt", "");
  EmbeddingMatrix m = LoadEmbeddings(path, v, 4, 3);
  EmbeddingMatrix r = RandomEmbeddings(v, 4, 3);
  CHECK(m.table == r.table);
  for (double x : m.table.row(Vocabulary::kPad)) CHECK(x == 0.0);
  for (int id = 1; id < v.size(); ++id) {
    for (double x : m.table.row(id)) {
      CHECK(x >= -0.05);
      CHECK(x < 0.05);
    }
  }
  CHECK_FALSE(RandomEmbeddings(v, 4, 4).table == r.table);
}

TEST_CASE("rows with the wrong width are rejected") {
  Vocabulary v = BuildVocab({{"a"}});
  auto path = TempFile("qcmine_vec_bad.txt", "a 1 2 3\n");
  try {
    LoadEmbeddings(path, v, 2, 1);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace qcmine

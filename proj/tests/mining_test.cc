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
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "qcmine/error.h"
#include "qcmine/mining.h"
#include "qcmine/train_eval.h"
#include "support/fixtures.h"

namespace qcmine {
namespace {

namespace fs = std::filesystem;
using testing::CueDataset;
using testing::ErrorCodeOf;
using testing::TinyModel;

fs::path TempPath(const std::string& name) {
  return fs::temp_directory_path() / ("qcmine_mining_" + name);
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const fs::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

DumpRecord Record(int64_t id, std::string title, std::string answer,
                  std::vector<std::string> tags = {"python"}) {
  DumpRecord r;
  r.question_id = id;
  r.title = std::move(title);
  r.tags = std::move(tags);
  r.question_body_html = "<p>question body</p>";
  r.accepted_answer_html = std::move(answer);
  return r;
}

void WriteDump(const fs::path& p, const std::vector<DumpRecord>& records) {
  std::ofstream out(p, std::ios::binary);
  for (const auto& r : records) out << DumpRecordToJson(r) << '\n';
}

// A model that outputs the same label for every input.
Model ConstantVoter(Variant variant, int label) {
  Model m = TinyModel(variant, CueDataset(4, 1), 4, 3, 3, 1);
  m.mutable_params().SetZero();
  m.mutable_params().output->b[label] = 3.0;
  return m;
}

QuestionFilter PassAll() {
  QuestionFilter f;
  f.model.weights.assign(f.keywords.size() + 4, 0.0);
  f.model.trained = true;
  f.model.bias = 2.0;
  return f;
}

QuestionFilter RejectAll() {
  QuestionFilter f = PassAll();
  f.model.bias = -2.0;
  return f;
}

const char* kTwoCode =
    "<p>Use this:</p><pre><code>def f(x):\n    return x + 1</code></pre>"
    "<p>Output:</p><pre><code>&gt;&gt;&gt; f(1)\n2</code></pre>";

std::vector<std::string> Lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST_SUITE("mining") {

TEST_CASE("tag routing") {
  CHECK(InDomain({"python-3.x"}, Language::kPython));
  CHECK(InDomain({"java", "Python"}, Language::kPython));
  CHECK_FALSE(InDomain({"java"}, Language::kPython));
  CHECK(InDomain({"oracle"}, Language::kSql));
  CHECK(InDomain({"database"}, Language::kSql));
  CHECK_FALSE(InDomain({"mysql"}, Language::kSql));
  CHECK_FALSE(InDomain({}, Language::kSql));
}

TEST_CASE("pair json keeps field order and round trips") {
  MinedPair p{7, "How to x", "print(1)", 2, Provenance::kEnsembleMined, 0.75};
  const std::string s = p.ToJson().dump();
  CHECK(s ==
        R"j({"question_id":7,"title":"How to x","code":"print(1)","position":2,)j"
        R"j("provenance":"ensemble-mined","score":0.75})j");
  MinedPair back = MinedPair::FromJson(nlohmann::json::parse(s));
  CHECK(back.ToJson().dump() == s);
  MinedPair q{8, "t", "c", 1, Provenance::kSingleCode, std::nullopt};
  CHECK(q.ToJson()["score"].is_null());
  CHECK(ErrorCodeOf([] { ParseProvenance("guessed"); }) ==
        ErrorCode::kDumpParseError);
}

TEST_CASE("a single-code how-to question gives one pair") {
  const Model b = ConstantVoter(Variant::kBivHnn, 0);
  const Model t = ConstantVoter(Variant::kTextHnn, 0);
  const Model c = ConstantVoter(Variant::kCodeHnn, 0);
  const QuestionFilter f = PassAll();
  WriteDump(TempPath("single.jsonl"),
            {Record(1, "How to add one", "<p>Like so</p><pre><code>x += 1</code></pre>")});
  MiningReport r = Mine(TempPath("single.jsonl"), {&b, &t, &c, &f},
                        TempPath("single.out"), TempPath("single.abs"), {});
  CHECK(r.single_code_pairs == 1);
  auto pairs = ReadDataset(TempPath("single.out"));
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].code == "x += 1");
  CHECK(pairs[0].position == 1);
  CHECK(pairs[0].provenance == Provenance::kSingleCode);
  CHECK(Slurp(TempPath("single.abs")).empty());
}

TEST_CASE("disagreeing voters give no pairs and log every block") {
  const Model b = ConstantVoter(Variant::kBivHnn, 1);
  const Model t = ConstantVoter(Variant::kTextHnn, 0);
  const Model c = ConstantVoter(Variant::kCodeHnn, 1);
  const QuestionFilter f = PassAll();
  WriteDump(TempPath("split.jsonl"), {Record(2, "How to add one", kTwoCode)});
  MiningReport r = Mine(TempPath("split.jsonl"), {&b, &t, &c, &f},
                        TempPath("split.out"), TempPath("split.abs"), {});
  CHECK(r.ensemble_blocks == 2);
  CHECK(r.abstained == 2);
  CHECK(Slurp(TempPath("split.out")).empty());
  const auto lines = Lines(Slurp(TempPath("split.abs")));
  REQUIRE(lines.size() == 2);
  auto first = nlohmann::json::parse(lines[0]);
  CHECK(first["question_id"] == 2);
  CHECK(first["position"] == 1);
  CHECK(first["votes"] == nlohmann::json::array({1, 0, 1}));
}

TEST_CASE("unanimous votes mine or reject every block") {
  const QuestionFilter f = PassAll();
  WriteDump(TempPath("agree.jsonl"), {Record(3, "How to add one", kTwoCode)});
  for (int label : {1, 0}) {
    const Model b = ConstantVoter(Variant::kBivHnn, label);
    const Model t = ConstantVoter(Variant::kTextHnn, label);
    const Model c = ConstantVoter(Variant::kCodeHnn, label);
    MiningReport r = Mine(TempPath("agree.jsonl"), {&b, &t, &c, &f},
                          TempPath("agree.out"), TempPath("agree.abs"), {});
    CHECK(r.ensemble_mined_pairs == (label == 1 ? 2 : 0));
    CHECK(r.ensemble_rejected == (label == 1 ? 0 : 2));
    CHECK(r.abstained == 0);
  }
  auto pairs = ReadDataset(TempPath("agree.out"));
  CHECK(pairs.empty());
}

TEST_CASE("rejected, out-of-domain and broken records produce nothing") {
  const Model b = ConstantVoter(Variant::kBivHnn, 1);
  const Model t = ConstantVoter(Variant::kTextHnn, 1);
  const Model c = ConstantVoter(Variant::kCodeHnn, 1);
  const QuestionFilter reject = RejectAll();
  const QuestionFilter pass = PassAll();
  WriteDump(TempPath("mixed.jsonl"),
            {Record(4, "How to a", kTwoCode), Record(5, "Why b", kTwoCode, {"java"}),
             Record(6, "c", "<p>no code here</p>")});
  {
    std::ofstream(TempPath("mixed.jsonl"), std::ios::app) << "{not json\n";
  }
  MiningReport r = Mine(TempPath("mixed.jsonl"), {&b, &t, &c, &reject},
                        TempPath("mixed.out"), TempPath("mixed.abs"), {});
  CHECK(r.records == 3);
  CHECK(r.parse_errors == 1);
  CHECK(r.out_of_domain == 1);
  CHECK(r.filtered_non_howto == 2);
  CHECK(Slurp(TempPath("mixed.out")).empty());

  r = Mine(TempPath("mixed.jsonl"), {&b, &t, &c, &pass}, TempPath("mixed.out"),
           TempPath("mixed.abs"), {});
  CHECK(r.no_code == 1);
  CHECK(r.ensemble_mined_pairs == 2);
  for (const auto& p : ReadDataset(TempPath("mixed.out"))) CHECK(p.question_id == 4);
}

TEST_CASE("mining checks variants and the filter language") {
  const Model b = ConstantVoter(Variant::kBivHnn, 1);
  const Model t = ConstantVoter(Variant::kTextHnn, 1);
  const Model c = ConstantVoter(Variant::kCodeHnn, 1);
  QuestionFilter f = PassAll();
  CHECK(ErrorCodeOf([&] { CheckMiningModels({&t, &b, &c, &f}, Language::kPython); }) ==
        ErrorCode::kCheckpointMismatch);
  CHECK(ErrorCodeOf([&] { CheckMiningModels({&b, &t, &c, &f}, Language::kSql); }) ==
        ErrorCode::kCheckpointMismatch);
  f.language = Language::kSql;
  CHECK(ErrorCodeOf([&] { CheckMiningModels({&b, &t, &c, &f}, Language::kPython); }) ==
        ErrorCode::kCheckpointMismatch);
}

TEST_CASE("property: mining is idempotent and mined pairs replay") {
  nn::Rng rng(31);
  std::vector<DumpRecord> records;
  for (int i = 0; i < 40; ++i) {
    const auto post = testing::RandomPost(rng);
    records.push_back(Record(1000 + i, "How to do thing " + std::to_string(i),
                             post.html));
  }
  WriteDump(TempPath("fuzz.jsonl"), records);
  auto data = CueDataset(10, 2);
  const Model b = TinyModel(Variant::kBivHnn, data, 6, 4, 4, 11);
  const Model t = TinyModel(Variant::kTextHnn, data, 6, 4, 4, 12);
  const Model c = TinyModel(Variant::kCodeHnn, data, 6, 4, 4, 13);
  const QuestionFilter f = PassAll();
  Mine(TempPath("fuzz.jsonl"), {&b, &t, &c, &f}, TempPath("fuzz1.out"),
       TempPath("fuzz1.abs"), {});
  Mine(TempPath("fuzz.jsonl"), {&b, &t, &c, &f}, TempPath("fuzz2.out"),
       TempPath("fuzz2.abs"), {});
  CHECK(Slurp(TempPath("fuzz1.out")) == Slurp(TempPath("fuzz2.out")));
  CHECK(Slurp(TempPath("fuzz1.abs")) == Slurp(TempPath("fuzz2.abs")));

  for (const MinedPair& p : ReadDataset(TempPath("fuzz1.out"))) {
    if (p.provenance != Provenance::kEnsembleMined) continue;
    const DumpRecord& r = records[p.question_id - 1000];
    const auto insts = ExtractInstances(r.title, ParsePostLenient(r.accepted_answer_html));
    const auto d = Ensemble(b, t, c, insts.at(p.position - 1));
    CHECK(d.decision == EnsembleLabel::kLabel1);
    CHECK(*p.score == d.biview_score);
  }
}

TEST_CASE("merge with annotations") {
  WriteDump(TempPath("merge.jsonl"),
            {Record(10, "How to a", kTwoCode), Record(11, "How to b", kTwoCode)});
  WriteDataset(TempPath("merge_mined.jsonl"),
               {{10, "How to a", "def f(x):\n    return x + 1", 1,
                 Provenance::kEnsembleMined, 0.9}});

  SUBCASE("disjoint sets add up") {
    WriteText(TempPath("merge.csv"), "question_id,code_position,label\n11,1,1\n11,2,0\n");
    MergeReport r = MergeAnnotated(TempPath("merge_mined.jsonl"), TempPath("merge.csv"),
                                   TempPath("merge.jsonl"), TempPath("merged.jsonl"));
    CHECK(r.total == 2);
    CHECK(r.annotated_added == 1);
    auto pairs = ReadDataset(TempPath("merged.jsonl"));
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[1].question_id == 11);
    CHECK(pairs[1].provenance == Provenance::kAnnotated);
  }
  SUBCASE("annotation wins on overlap") {
    WriteText(TempPath("merge.csv"), "question_id,code_position,label\n10,1,1\n");
    MergeReport r = MergeAnnotated(TempPath("merge_mined.jsonl"), TempPath("merge.csv"),
                                   TempPath("merge.jsonl"), TempPath("merged.jsonl"));
    CHECK(r.total == 1);
    CHECK(r.replaced == 1);
    auto pairs = ReadDataset(TempPath("merged.jsonl"));
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].provenance == Provenance::kAnnotated);
    CHECK_FALSE(pairs[0].score.has_value());
  }
  SUBCASE("bad positions and missing questions") {
    WriteText(TempPath("merge.csv"), "question_id,code_position,label\n10,3,1\n");
    CHECK(ErrorCodeOf([] {
            MergeAnnotated(TempPath("merge_mined.jsonl"), TempPath("merge.csv"),
                           TempPath("merge.jsonl"), TempPath("merged.jsonl"));
          }) == ErrorCode::kPositionMismatch);
    WriteText(TempPath("merge.csv"), "question_id,code_position,label\n99,1,1\n");
    CHECK(ErrorCodeOf([] {
            MergeAnnotated(TempPath("merge_mined.jsonl"), TempPath("merge.csv"),
                           TempPath("merge.jsonl"), TempPath("merged.jsonl"));
          }) == ErrorCode::kPositionMismatch);
  }
}

TEST_CASE("dataset statistics") {
  DatasetStats empty = ComputeDatasetStats(std::vector<MinedPair>{}, Language::kPython);
  CHECK(empty.pairs == 0);
  CHECK(empty.questions == 0);
  CHECK(empty.avg_question_tokens == 0.0);
  CHECK(empty.Consistent());

  MinedPair p{1, "How to add one", "x = y + 1", 1, Provenance::kSingleCode, std::nullopt};
  DatasetStats one = ComputeDatasetStats(std::vector<MinedPair>{p}, Language::kPython);
  CHECK(one.pairs == 1);
  CHECK(one.single_code == 1);
  CHECK(one.avg_question_tokens == 4.0);
  CHECK(one.avg_code_tokens == static_cast<double>(NormalizeCode(p.code, Language::kPython).tokens.size()));
  CHECK(one.distinct_question_tokens == 4);
  CHECK(one.Consistent());

  std::vector<MinedPair> mix = {p, p, p};
  mix[1].provenance = Provenance::kEnsembleMined;
  mix[2].provenance = Provenance::kAnnotated;
  mix[2].question_id = 2;
  DatasetStats s = ComputeDatasetStats(mix, Language::kPython);
  CHECK(s.pairs == 3);
  CHECK(s.questions == 2);
  CHECK(s.single_code + s.ensemble_mined + s.annotated == 3);
}

}  // TEST_SUITE

}  // namespace
}  // namespace qcmine

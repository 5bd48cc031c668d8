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

// Python bindings for the qcmine core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcmine/config.h"
#include "qcmine/error.h"
#include "qcmine/mining.h"
#include "qcmine/models.h"
#include "qcmine/post_parser.h"
#include "qcmine/question_filter.h"
#include "qcmine/tokenize.h"
#include "qcmine/train_eval.h"

namespace py = pybind11;

namespace qcmine {
namespace {

py::dict BlockToDict(const Block& b) {
  py::dict d;
  d["kind"] = b.kind == BlockKind::kCode ? "code" : "text";
  d["raw"] = b.raw;
  d["tokens"] = b.tokens;
  return d;
}

py::dict InstanceToDict(const CodeContextInstance& inst) {
  py::dict d;
  d["question_id"] = inst.question_id;
  d["position"] = inst.position;
  d["question_tokens"] = inst.question_tokens;
  d["pre_tokens"] = inst.pre_tokens;
  d["code_tokens"] = inst.code_tokens;
  d["post_tokens"] = inst.post_tokens;
  d["label"] = inst.label ? py::cast(*inst.label) : py::none();
  return d;
}

template <typename T>
std::vector<T> Get(const py::dict& d, const char* key) {
  if (!d.contains(key)) return {};
  return d[key].cast<std::vector<T>>();
}

CodeContextInstance InstanceFromDict(const py::dict& d) {
  CodeContextInstance inst;
  if (d.contains("question_id")) inst.question_id = d["question_id"].cast<int64_t>();
  if (d.contains("position")) inst.position = d["position"].cast<int>();
  inst.question_tokens = Get<std::string>(d, "question_tokens");
  inst.pre_tokens = Get<std::string>(d, "pre_tokens");
  inst.code_tokens = Get<std::string>(d, "code_tokens");
  inst.post_tokens = Get<std::string>(d, "post_tokens");
  inst.code_line_starts = {0};
  if (d.contains("label") && !d["label"].is_none()) inst.label = d["label"].cast<int>();
  return inst;
}

py::object JsonToPy(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

std::vector<CodeContextInstance> Extract(const std::string& title,
                                         const std::string& html,
                                         std::optional<std::map<int, int>> labels,
                                         const std::string& language) {
  return ExtractInstances(title, ParseAnswerPost(html), labels,
                          ParseLanguage(language));
}

// Mirrors the command-line `train` for the neural variants.
py::object Train(const std::filesystem::path& config_path, const std::string& variant,
                 const std::filesystem::path& dump,
                 const std::filesystem::path& train_csv,
                 const std::filesystem::path& valid_csv,
                 const std::filesystem::path& out) {
  PipelineConfig config = PipelineConfig::Load(config_path);
  config.model.variant = ParseVariant(variant);
  const auto python = config.MakePythonNormalizer();
  const auto train = LoadLabeledInstances(dump, ReadAnnotatedLabels(train_csv),
                                          config.language, python.get());
  const auto valid = LoadLabeledInstances(dump, ReadAnnotatedLabels(valid_csv),
                                          config.language, python.get());
  Model init = InitModelForData(config.model, train, config.min_count,
                                config.word_vectors, config.code_vectors);
  TrainResult r = TrainModel(std::move(init), train, valid, config.train);
  r.best.Save(out);
  nlohmann::json report = {{"best_epoch", r.best_epoch},
                           {"valid", r.best_valid.ToJson()},
                           {"epochs", r.history.size()}};
  return JsonToPy(report);
}

py::object MineFiles(const std::filesystem::path& dump,
                     const std::filesystem::path& biview,
                     const std::filesystem::path& text,
                     const std::filesystem::path& code,
                     const std::filesystem::path& filter,
                     const std::filesystem::path& out,
                     std::optional<std::filesystem::path> abstentions,
                     const std::string& language) {
  const Model b = Model::Load(biview);
  const Model t = Model::Load(text);
  const Model c = Model::Load(code);
  const QuestionFilter f = QuestionFilter::Load(filter);
  const std::filesystem::path abst =
      abstentions ? *abstentions : std::filesystem::path(out.string() + ".abstentions.jsonl");
  MineConfig cfg;
  cfg.language = ParseLanguage(language);
  return JsonToPy(Mine(dump, {&b, &t, &c, &f}, out, abst, cfg).ToJson());
}

}  // namespace
}  // namespace qcmine

PYBIND11_MODULE(_core, m) {
  using namespace qcmine;
  m.doc() = "qcmine core: post parsing, code-block classifiers and mining";
  py::register_exception<Error>(m, "QcmineError", PyExc_RuntimeError);

  m.def("tokenize_text", [](const std::string& s) { return TokenizeText(s).tokens; },
        py::arg("text"));
  m.def("normalize_code",
        [](const std::string& code, const std::string& language) {
          return NormalizeCode(code, ParseLanguage(language)).tokens;
        },
        py::arg("code"), py::arg("language") = "python");

  m.def("parse_answer_post",
        [](const std::string& html, bool lenient) {
          const BlockSequence seq = lenient ? ParsePostLenient(html) : ParseAnswerPost(html);
          py::list out;
          for (const auto& b : seq.blocks) out.append(BlockToDict(b));
          return out;
        },
        py::arg("html"), py::arg("lenient") = false);
  m.def("extract_instances",
        [](const std::string& title, const std::string& html,
           std::optional<std::map<int, int>> labels, const std::string& language) {
          py::list out;
          for (const auto& inst : Extract(title, html, labels, language)) {
            out.append(InstanceToDict(inst));
          }
          return out;
        },
        py::arg("title"), py::arg("html"), py::arg("labels") = py::none(),
        py::arg("language") = "python");
  m.def("select_first",
        [](const std::string& html) { return SelectFirst(ParseAnswerPost(html)); },
        py::arg("html"));
  m.def("select_all",
        [](const std::string& html) { return SelectAll(ParseAnswerPost(html)); },
        py::arg("html"));

  m.def("evaluate",
        [](const std::vector<int>& preds, const std::vector<int>& golds) {
          return JsonToPy(Evaluate(preds, golds).ToJson());
        },
        py::arg("preds"), py::arg("golds"));
  m.def("mrr", [](const std::vector<int>& ranks) { return Mrr(ranks); },
        py::arg("ranks"));
  m.def("cohens_kappa",
        [](const std::vector<int>& a, const std::vector<int>& b) {
          return CohensKappa(a, b);
        },
        py::arg("a"), py::arg("b"));
  m.def("combine_votes",
        [](int biview, int text, int code) -> py::object {
          const EnsembleDecision d = CombineVotes({biview, text, code});
          if (d.decision == EnsembleLabel::kAbstain) return py::none();
          return py::cast(d.decision == EnsembleLabel::kLabel1 ? 1 : 0);
        },
        py::arg("biview"), py::arg("text"), py::arg("code"));

  py::class_<Model>(m, "Model")
      .def_static("load", &Model::Load, py::arg("path"))
      .def_property_readonly("variant",
                             [](const Model& self) {
                               return std::string(VariantName(self.config().variant));
                             })
      .def("predict",
           [](const Model& self, const py::dict& inst) {
             const Prediction p = self.Predict(InstanceFromDict(inst));
             return py::make_tuple(p.label, p.score);
           },
           py::arg("instance"))
      .def("probabilities",
           [](const Model& self, const py::dict& inst) {
             return self.Forward(InstanceFromDict(inst)).probs;
           },
           py::arg("instance"))
      .def("save", &Model::Save, py::arg("path"));

  py::class_<QuestionFilter>(m, "QuestionFilter")
      .def_static("load", &QuestionFilter::Load, py::arg("path"))
      .def("classify",
           [](const QuestionFilter& self, const std::string& title,
              const std::string& question_html, const std::string& answer_html) {
             DumpRecord r;
             r.title = title;
             r.question_body_html = question_html;
             r.accepted_answer_html = answer_html;
             const QuestionClassification c = self.Classify(r);
             return py::make_tuple(
                 c.label == QuestionType::kHowTo ? "howto" : "other", c.probability);
           },
           py::arg("title"), py::arg("question_html") = "",
           py::arg("answer_html") = "");

  m.def("train", &Train, py::arg("config"), py::arg("variant"), py::arg("dump"),
        py::arg("train_labels"), py::arg("valid_labels"), py::arg("out"));
  m.def("mine", &MineFiles, py::arg("dump"), py::arg("biview"), py::arg("text"),
        py::arg("code"), py::arg("filter"), py::arg("out"),
        py::arg("abstentions") = py::none(), py::arg("language") = "python");
  m.def("dataset_stats",
        [](const std::filesystem::path& path, const std::string& language) {
          return JsonToPy(ComputeDatasetStats(path, ParseLanguage(language)).ToJson());
        },
        py::arg("path"), py::arg("language") = "python");
}

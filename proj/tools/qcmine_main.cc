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

// qcmine command-line driver.
//
//   qcmine parse          dump -> block-sequence cache (JSONL)
//   qcmine filter-train   train the how-to question filter
//   qcmine filter         apply the question filter
//   qcmine codeclass-train  train the working-code sub-classifier
//   qcmine train          train a code-block classifier (--variant)
//   qcmine eval           score a classifier or heuristic on labeled data
//   qcmine ensemble-eval  coverage and quality of the agreement ensemble
//   qcmine mine           run the mining pipeline over a dump
//   qcmine merge          add annotated pairs to a mined dataset
//   qcmine stats          dataset statistics

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcmine/baselines.h"
#include "qcmine/config.h"
#include "qcmine/error.h"
#include "qcmine/io.h"
#include "qcmine/mining.h"
#include "qcmine/models.h"
#include "qcmine/post_parser.h"
#include "qcmine/question_filter.h"
#include "qcmine/train_eval.h"

namespace qcmine {
namespace {

using nlohmann::json;

void PrintJson(const json& j) { std::cout << j.dump(2) << std::endl; }

PipelineConfig LoadConfig(const std::string& path) {
  return path.empty() ? PipelineConfig() : PipelineConfig::Load(path);
}

// question_id,label with label in {howto, other} (or 1/0).
std::map<int64_t, int> ReadQuestionLabels(const std::string& path) {
  std::map<int64_t, int> labels;
  for (const auto& row : ReadCsv(path)) {
    if (row.size() < 2) {
      throw Error(ErrorCode::kIoError, path + ": expected 2 columns");
    }
    const std::string label = ToLowerAscii(Trim(row[1]));
    int value;
    if (label == "howto" || label == "1") {
      value = 1;
    } else if (label == "other" || label == "0") {
      value = 0;
    } else {
      throw Error(ErrorCode::kIoError, path + ": bad label '" + row[1] + "'");
    }
    labels[std::stoll(row[0])] = value;
  }
  return labels;
}

std::map<int64_t, DumpRecord> ReadRecords(const std::string& dump,
                                          const std::set<int64_t>* wanted) {
  std::map<int64_t, DumpRecord> out;
  ForEachDumpRecord(
      dump,
      [&](DumpRecord r) {
        if (wanted == nullptr || wanted->count(r.question_id)) {
          out[r.question_id] = std::move(r);
        }
      },
      [](size_t line, const std::string& what) {
        std::cerr << "skipping line " << line << ": " << what << "\n";
      });
  return out;
}

std::vector<LinearExample> QuestionExamples(
    const QuestionFilter& filter, const std::map<int64_t, int>& labels,
    const std::map<int64_t, DumpRecord>& records) {
  std::vector<LinearExample> out;
  for (const auto& [qid, label] : labels) {
    auto it = records.find(qid);
    if (it == records.end()) {
      throw Error(ErrorCode::kEmptySplit,
                  "question " + std::to_string(qid) + " not in dump");
    }
    out.push_back({QuestionFeatureVector(filter.Featurize(it->second),
                                         filter.keywords),
                   label});
  }
  return out;
}

std::vector<CodeContextInstance> LoadSplit(const std::string& dump,
                                           const std::string& labels_csv,
                                           const PipelineConfig& config,
                                           const PythonNormalizer* python) {
  int64_t errors = 0;
  auto data = LoadLabeledInstances(dump, ReadAnnotatedLabels(labels_csv),
                                   config.language, python, &errors);
  if (errors > 0) std::cerr << errors << " dump lines skipped\n";
  if (data.empty()) {
    throw Error(ErrorCode::kEmptySplit, labels_csv + " matched no code blocks");
  }
  return data;
}

bool IsLinearCheckpoint(const std::string& path) {
  const json j = json::parse(ReadFile(path));
  return j.value("format", "") == "qcmine-linear-v1";
}

int RunParse(const std::string& config_path, const std::string& dump,
             const std::string& out) {
  const PipelineConfig config = LoadConfig(config_path);
  const auto python = config.MakePythonNormalizer();
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIoError, "cannot open " + out);
  int64_t records = 0, errors = 0, code_blocks = 0;
  ForEachDumpRecord(
      dump,
      [&](DumpRecord r) {
        BlockSequence seq = ParsePostLenient(r.accepted_answer_html);
        seq.question_id = r.question_id;
        TokenizeBlocks(seq, config.language, python.get());
        nlohmann::ordered_json line;
        line["question_id"] = r.question_id;
        line["title"] = r.title;
        line["title_tokens"] = TokenizeText(r.title).tokens;
        json blocks = json::array();
        for (const Block& b : seq.blocks) {
          blocks.push_back({{"kind", b.kind == BlockKind::kCode ? "code" : "text"},
                            {"raw", b.raw},
                            {"tokens", b.tokens}});
        }
        line["blocks"] = blocks;
        os << line.dump() << '\n';
        ++records;
        code_blocks += static_cast<int64_t>(seq.CodeCount());
      },
      [&](size_t, const std::string&) { ++errors; });
  PrintJson({{"records", records},
             {"parse_errors", errors},
             {"code_blocks", code_blocks}});
  return 0;
}

int RunFilterTrain(const std::string& config_path, const std::string& dump,
                   const std::string& train_csv, const std::string& valid_csv,
                   const std::string& test_csv, const std::string& keywords,
                   const std::string& out) {
  const PipelineConfig config = LoadConfig(config_path);
  QuestionFilter filter;
  filter.language = config.language;
  if (!keywords.empty()) filter.keywords = ReadWordList(keywords);
  const auto train_labels = ReadQuestionLabels(train_csv);
  const auto valid_labels = ReadQuestionLabels(valid_csv);
  std::map<int64_t, int> test_labels;
  if (!test_csv.empty()) test_labels = ReadQuestionLabels(test_csv);
  std::set<int64_t> wanted;
  for (const std::map<int64_t, int>* m :
       {&train_labels, &valid_labels, &std::as_const(test_labels)}) {
    for (const auto& [qid, _] : *m) wanted.insert(qid);
  }
  const auto records = ReadRecords(dump, &wanted);
  LinearTrainOptions options;
  options.kind = LinearKind::kLogistic;
  options.epochs = config.linear_epochs;
  options.lr = config.linear_lr;
  options.seed = config.train.seed;
  const int dim =
      static_cast<int>(filter.keywords.size()) + 4;  // flags + counts
  LinearSelection sel = TrainLinearSelected(
      QuestionExamples(filter, train_labels, records),
      QuestionExamples(filter, valid_labels, records), options,
      config.l2_grid, dim);
  filter.model = sel.model;
  filter.Save(out);
  json report = {{"l2", sel.l2}, {"valid", sel.valid.ToJson()}};
  if (!test_labels.empty()) {
    std::vector<int> preds, golds;
    for (const auto& ex : QuestionExamples(filter, test_labels, records)) {
      preds.push_back(PredictLinear(filter.model, ex.x).label);
      golds.push_back(ex.label);
    }
    report["test"] = Evaluate(preds, golds).ToJson();
  }
  PrintJson(report);
  return 0;
}

int RunFilter(const std::string& model, const std::string& dump,
              const std::string& out) {
  const QuestionFilter filter = QuestionFilter::Load(model);
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIoError, "cannot open " + out);
  int64_t howto = 0, other = 0, errors = 0;
  ForEachDumpRecord(
      dump,
      [&](DumpRecord r) {
        const QuestionClassification c = filter.Classify(r);
        const bool is_howto = c.label == QuestionType::kHowTo;
        (is_howto ? howto : other)++;
        nlohmann::ordered_json line;
        line["question_id"] = r.question_id;
        line["label"] = is_howto ? "howto" : "other";
        line["probability"] = c.probability;
        os << line.dump() << '\n';
      },
      [&](size_t, const std::string&) { ++errors; });
  PrintJson({{"howto", howto}, {"other", other}, {"parse_errors", errors}});
  return 0;
}

int RunCodeClassTrain(const std::string& config_path, const std::string& dump,
                      const std::string& cues_path, size_t limit,
                      const std::string& out) {
  const PipelineConfig config = LoadConfig(config_path);
  const std::vector<std::string> cues =
      cues_path.empty() ? DefaultOutputCues() : ReadWordList(cues_path);
  const CodeClassCorpus corpus =
      BuildCodeClassCorpus(dump, cues, limit, config.train.seed);
  LinearTrainOptions options;
  options.epochs = config.linear_epochs;
  options.lr = config.linear_lr;
  options.seed = config.train.seed;
  options.l2 = config.l2_grid.front();
  const LinearModel model = TrainCodeClass(corpus, options);
  WriteFile(out, model.ToJson().dump() + "\n");
  int64_t demos = 0;
  for (int y : corpus.labels) demos += y == 0;
  PrintJson({{"snippets", corpus.snippets.size()}, {"demo", demos}});
  return 0;
}

int RunTrain(const std::string& config_path, const std::string& variant,
             const std::string& dump, const std::string& train_csv,
             const std::string& valid_csv, const std::string& codeclass,
             const std::string& out, const std::string& log_path) {
  PipelineConfig config = LoadConfig(config_path);
  const std::string kind = ToLowerAscii(variant);
  const bool linear = kind == "lr" || kind == "svm";
  // Reject a bad variant before reading the dump.
  if (!linear && !variant.empty()) config.model.variant = ParseVariant(variant);
  const auto python = config.MakePythonNormalizer();
  const auto train = LoadSplit(dump, train_csv, config, python.get());
  const auto valid = LoadSplit(dump, valid_csv, config, python.get());

  if (linear) {
    LinearBaseline untrained;
    untrained.language = config.language;
    if (!codeclass.empty()) {
      untrained.codeclass = LinearModel::FromJson(json::parse(ReadFile(codeclass)));
    }
    LinearTrainOptions options;
    options.kind = kind == "lr" ? LinearKind::kLogistic : LinearKind::kHingeSvm;
    options.epochs = config.linear_epochs;
    options.lr = config.linear_lr;
    options.seed = config.train.seed;
    const LinearBaselineFit fit = FitLinearBaseline(
        train, valid, std::move(untrained), options, config.l2_grid);
    fit.baseline.Save(out);
    PrintJson({{"variant", kind},
               {"l2", fit.l2},
               {"features", fit.baseline.registry.size()},
               {"valid_f1", fit.valid_f1}});
    return 0;
  }

  Model model = InitModelForData(config.model, train, config.min_count,
                                 config.word_vectors, config.code_vectors);
  std::ofstream log_file;
  std::ostream* log = &std::cerr;
  if (!log_path.empty()) {
    log_file.open(log_path, std::ios::trunc);
    if (!log_file) throw Error(ErrorCode::kIoError, "cannot open " + log_path);
    log = &log_file;
  }
  TrainResult result =
      TrainModel(std::move(model), train, valid, config.train, log);
  result.best.Save(out);
  PrintJson({{"variant", std::string(VariantName(config.model.variant))},
             {"best_epoch", result.best_epoch},
             {"epochs_run", result.history.size()},
             {"valid", result.best_valid.ToJson()}});
  return 0;
}

int RunEval(const std::string& config_path, const std::string& model_path,
            const std::string& heuristic, const std::string& dump,
            const std::string& labels_csv) {
  PipelineConfig config = LoadConfig(config_path);
  const auto python = config.MakePythonNormalizer();
  std::vector<int> preds;
  std::vector<CodeContextInstance> data;
  std::string name;
  if (!heuristic.empty()) {
    data = LoadSplit(dump, labels_csv, config, python.get());
    if (heuristic == "select-first") {
      for (const auto& inst : data) preds.push_back(inst.position == 1 ? 1 : 0);
    } else if (heuristic == "select-all") {
      preds.assign(data.size(), 1);
    } else {
      throw Error(ErrorCode::kConfigInvalid, "unknown heuristic " + heuristic);
    }
    name = heuristic;
  } else if (IsLinearCheckpoint(model_path)) {
    const LinearBaseline b = LinearBaseline::Load(model_path);
    config.language = b.language;
    data = LoadSplit(dump, labels_csv, config, python.get());
    for (const auto& inst : data) preds.push_back(b.Predict(inst).label);
    name = b.model.kind == LinearKind::kLogistic ? "lr" : "svm";
  } else {
    const Model m = Model::Load(model_path);
    config.language = m.config().language;
    data = LoadSplit(dump, labels_csv, config, python.get());
    preds = PredictLabels(m, data);
    name = std::string(VariantName(m.config().variant));
  }
  json report = Evaluate(preds, GoldLabels(data)).ToJson();
  report["model"] = name;
  PrintJson(report);
  return 0;
}

int RunEnsembleEval(const std::string& config_path, const std::string& biview,
                    const std::string& text, const std::string& code,
                    const std::string& dump, const std::string& labels_csv) {
  PipelineConfig config = LoadConfig(config_path);
  const auto python = config.MakePythonNormalizer();
  const Model b = Model::Load(biview);
  const Model t = Model::Load(text);
  const Model c = Model::Load(code);
  QuestionFilter any_filter;
  any_filter.language = b.config().language;
  CheckMiningModels({&b, &t, &c, &any_filter}, b.config().language);
  config.language = b.config().language;
  const auto data = LoadSplit(dump, labels_csv, config, python.get());
  std::vector<int> preds, golds;
  int64_t abstained = 0;
  for (const auto& inst : data) {
    const EnsembleDecision d = Ensemble(b, t, c, inst);
    if (d.decision == EnsembleLabel::kAbstain) {
      ++abstained;
      continue;
    }
    preds.push_back(d.decision == EnsembleLabel::kLabel1 ? 1 : 0);
    golds.push_back(*inst.label);
  }
  json report = {{"blocks", data.size()},
                 {"labeled", preds.size()},
                 {"abstained", abstained},
                 {"coverage", static_cast<double>(preds.size()) /
                                  static_cast<double>(data.size())}};
  report["labeled_metrics"] =
      preds.empty() ? json(nullptr) : Evaluate(preds, golds).ToJson();
  PrintJson(report);
  return 0;
}

int RunMine(const std::string& config_path, const std::string& dump,
            const std::string& biview, const std::string& text,
            const std::string& code, const std::string& filter_path,
            const std::string& out, std::string abstentions) {
  const PipelineConfig config = LoadConfig(config_path);
  const auto python = config.MakePythonNormalizer();
  const Model b = Model::Load(biview);
  const Model t = Model::Load(text);
  const Model c = Model::Load(code);
  const QuestionFilter f = QuestionFilter::Load(filter_path);
  if (abstentions.empty()) abstentions = out + config.abstentions_suffix;
  MineConfig mine;
  mine.language = config.language;
  mine.python = python.get();
  const MiningReport report = Mine(dump, {&b, &t, &c, &f}, out, abstentions, mine);
  PrintJson(report.ToJson());
  return 0;
}

int RunMerge(const std::string& mined, const std::string& annotated,
             const std::string& dump, const std::string& out) {
  PrintJson(MergeAnnotated(mined, annotated, dump, out).ToJson());
  return 0;
}

int RunStats(const std::string& config_path, const std::string& dataset) {
  const PipelineConfig config = LoadConfig(config_path);
  const DatasetStats stats = ComputeDatasetStats(dataset, config.language);
  PrintJson(stats.ToJson());
  return stats.Consistent() ? 0 : 2;
}

}  // namespace
}  // namespace qcmine

int main(int argc, char** argv) {
  CLI::App app{"Mine question-code pairs from Q&A dumps"};
  app.require_subcommand(1);
  std::string config, dump, out, model, labels;

  auto* parse = app.add_subcommand("parse", "Parse answer posts into blocks");
  parse->add_option("--config", config, "Pipeline config JSON");
  parse->add_option("--dump", dump, "Dump JSONL")->required();
  parse->add_option("--out", out, "Output JSONL")->required();

  std::string train_csv, valid_csv, test_csv, keywords;
  auto* filter_train =
      app.add_subcommand("filter-train", "Train the how-to question filter");
  filter_train->add_option("--config", config, "Pipeline config JSON");
  filter_train->add_option("--dump", dump, "Dump JSONL")->required();
  filter_train->add_option("--train", train_csv, "question_id,label CSV")
      ->required();
  filter_train->add_option("--valid", valid_csv, "question_id,label CSV")
      ->required();
  filter_train->add_option("--test", test_csv, "question_id,label CSV");
  filter_train->add_option("--keywords", keywords, "Keyword lexicon file");
  filter_train->add_option("--out", out, "Filter model JSON")->required();

  auto* filter = app.add_subcommand("filter", "Classify questions");
  filter->add_option("--model", model, "Filter model JSON")->required();
  filter->add_option("--dump", dump, "Dump JSONL")->required();
  filter->add_option("--out", out, "Output JSONL")->required();

  std::string cues;
  size_t limit = 10000;
  auto* codeclass_train = app.add_subcommand(
      "codeclass-train", "Train the working-code sub-classifier");
  codeclass_train->add_option("--config", config, "Pipeline config JSON");
  codeclass_train->add_option("--dump", dump, "Dump JSONL")->required();
  codeclass_train->add_option("--cues", cues, "Output cue phrases file");
  codeclass_train->add_option("--limit", limit, "Snippets per class");
  codeclass_train->add_option("--out", out, "Model JSON")->required();

  std::string variant, codeclass, log;
  auto* train = app.add_subcommand("train", "Train a code-block classifier");
  train->add_option("--config", config, "Pipeline config JSON");
  train->add_option("--variant", variant,
                    "biv-hnn, biv-hnn-nq, text-hnn, code-hnn, text-rnn, "
                    "biv-rnn, biv-hff, lr or svm");
  train->add_option("--dump", dump, "Dump JSONL")->required();
  train->add_option("--train", train_csv, "Annotated labels CSV")->required();
  train->add_option("--valid", valid_csv, "Annotated labels CSV")->required();
  train->add_option("--codeclass", codeclass, "CodeClass model (lr/svm)");
  train->add_option("--log", log, "Epoch log file (default stderr)");
  train->add_option("--out", out, "Checkpoint path")->required();

  std::string heuristic;
  auto* eval = app.add_subcommand("eval", "Evaluate on labeled code blocks");
  eval->add_option("--config", config, "Pipeline config JSON");
  auto* model_opt = eval->add_option("--model", model, "Checkpoint");
  eval->add_option("--heuristic", heuristic, "select-first or select-all")
      ->excludes(model_opt);
  eval->add_option("--dump", dump, "Dump JSONL")->required();
  eval->add_option("--labels", labels, "Annotated labels CSV")->required();

  std::string biview, text, code, filter_model, abstentions;
  auto* ensemble_eval =
      app.add_subcommand("ensemble-eval", "Evaluate the agreement ensemble");
  ensemble_eval->add_option("--config", config, "Pipeline config JSON");
  ensemble_eval->add_option("--biview", biview, "biv-hnn checkpoint")->required();
  ensemble_eval->add_option("--text", text, "text-hnn checkpoint")->required();
  ensemble_eval->add_option("--code", code, "code-hnn checkpoint")->required();
  ensemble_eval->add_option("--dump", dump, "Dump JSONL")->required();
  ensemble_eval->add_option("--labels", labels, "Annotated labels CSV")
      ->required();

  auto* mine = app.add_subcommand("mine", "Mine question-code pairs");
  mine->add_option("--config", config, "Pipeline config JSON");
  mine->add_option("--dump", dump, "Dump JSONL")->required();
  mine->add_option("--biview", biview, "biv-hnn checkpoint")->required();
  mine->add_option("--text", text, "text-hnn checkpoint")->required();
  mine->add_option("--code", code, "code-hnn checkpoint")->required();
  mine->add_option("--filter", filter_model, "Question filter")->required();
  mine->add_option("--out", out, "Dataset JSONL")->required();
  mine->add_option("--abstentions", abstentions, "Abstentions JSONL");

  std::string mined, annotated;
  auto* merge = app.add_subcommand("merge", "Add annotated pairs to a dataset");
  merge->add_option("--mined", mined, "Mined dataset JSONL")->required();
  merge->add_option("--annotated", annotated, "Annotated labels CSV")
      ->required();
  merge->add_option("--dump", dump, "Dump JSONL")->required();
  merge->add_option("--out", out, "Output dataset JSONL")->required();

  std::string dataset;
  auto* stats = app.add_subcommand("stats", "Dataset statistics");
  stats->add_option("--config", config, "Pipeline config JSON");
  stats->add_option("--dataset", dataset, "Dataset JSONL")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*parse) return qcmine::RunParse(config, dump, out);
    if (*filter_train) {
      return qcmine::RunFilterTrain(config, dump, train_csv, valid_csv,
                                    test_csv, keywords, out);
    }
    if (*filter) return qcmine::RunFilter(model, dump, out);
    if (*codeclass_train) {
      return qcmine::RunCodeClassTrain(config, dump, cues, limit, out);
    }
    if (*train) {
      return qcmine::RunTrain(config, variant, dump, train_csv, valid_csv,
                              codeclass, out, log);
    }
    if (*eval) {
      if (model.empty() && heuristic.empty()) {
        std::cerr << "eval needs --model or --heuristic\n";
        return 1;
      }
      return qcmine::RunEval(config, model, heuristic, dump, labels);
    }
    if (*ensemble_eval) {
      return qcmine::RunEnsembleEval(config, biview, text, code, dump, labels);
    }
    if (*mine) {
      return qcmine::RunMine(config, dump, biview, text, code, filter_model, out,
                             abstentions);
    }
    if (*merge) return qcmine::RunMerge(mined, annotated, dump, out);
    if (*stats) return qcmine::RunStats(config, dataset);
  } catch (const qcmine::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

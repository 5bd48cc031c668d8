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

#ifndef QCMINE_POST_PARSER_H_
#define QCMINE_POST_PARSER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcmine/tokenize.h"

namespace qcmine {

enum class BlockKind { kText, kCode };

struct Block {
  BlockKind kind = BlockKind::kText;
  std::string raw;                  // "" for a dummy text block
  std::vector<std::string> tokens;  // filled by TokenizeBlocks
  std::vector<size_t> line_starts;  // code only, see TokenStream
  bool tokenized = false;
};

// Alternates Text, Code, Text, ..., Text. With n code blocks there are
// exactly n + 1 text blocks; missing contexts are empty dummy text blocks.
struct BlockSequence {
  int64_t question_id = 0;
  std::vector<Block> blocks;

  size_t CodeCount() const { return blocks.size() / 2; }
  // 1-based code position -> block.
  const Block& Code(size_t position) const { return blocks[2 * position - 1]; }
};

// One prediction unit: code block `position` (1-based) with the text blocks
// immediately around it and the question title. label: 1 = standalone
// solution, 0 = not a solution.
struct CodeContextInstance {
  int64_t question_id = 0;
  std::vector<std::string> question_tokens;
  std::vector<std::string> pre_tokens;
  std::vector<std::string> code_tokens;
  std::vector<std::string> post_tokens;
  std::vector<size_t> code_line_starts;
  std::optional<int> label;
  int position = 0;
};

// Splits an HTML post body into alternating text/code blocks. Only <pre>
// elements outside blockquotes become code blocks; inline <code> spans stay
// in the text. Markup is stripped, entities decoded, consecutive paragraphs
// between code blocks are merged with '\n'. Throws kEmptyPost when the body
// has neither text nor code.
BlockSequence ParseAnswerPost(std::string_view html);

// Same as ParseAnswerPost but returns a single dummy text block for an empty
// body instead of throwing.
BlockSequence ParsePostLenient(std::string_view html);

std::string DecodeHtmlEntities(std::string_view s);

// All visible text of `html` (tags removed, entities decoded).
std::string VisibleText(std::string_view html);

// Fills Block::tokens: text via TokenizeText, code via NormalizeCode. A code
// block that normalizes to nothing (e.g. only comments) falls back to the raw
// wordpunct split so that code tokens are never empty.
void TokenizeBlocks(BlockSequence& seq, Language code_language,
                    const PythonNormalizer* python = nullptr);

using PositionLabels = std::map<int, int>;

// One instance per code block. Untokenized blocks are tokenized first.
// Throws kPositionMismatch if a label position is outside 1..CodeCount().
std::vector<CodeContextInstance> ExtractInstances(
    std::string_view question_title, BlockSequence seq,
    const std::optional<PositionLabels>& labels = std::nullopt,
    Language code_language = Language::kPython,
    const PythonNormalizer* python = nullptr);

// One JSON Lines record of the post dump.
struct DumpRecord {
  int64_t question_id = 0;
  std::string title;
  std::vector<std::string> tags;
  std::string question_body_html;
  std::string accepted_answer_html;
};

// Throws kDumpParseError on malformed JSON or missing fields.
DumpRecord ParseDumpLine(std::string_view line);
std::string DumpRecordToJson(const DumpRecord& record);

// Streams a JSONL dump; `on_error` receives (line number, message) for
// records that fail to parse and processing continues.
template <typename OnRecord, typename OnError>
void ForEachDumpRecord(const std::filesystem::path& path, OnRecord on_record,
                       OnError on_error);

// (question_id, code_position, label) rows.
using AnnotatedLabels = std::map<int64_t, PositionLabels>;
AnnotatedLabels ReadAnnotatedLabels(const std::filesystem::path& csv);

}  // namespace qcmine

#include "qcmine/post_parser_inl.h"

#endif  // QCMINE_POST_PARSER_H_

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

#include "qcmine/post_parser.h"

#include <cctype>
#include <cstdlib>
#include <string>

#include "json.hpp"
#include "qcmine/error.h"
#include "qcmine/io.h"

namespace qcmine {
namespace {

void AppendUtf8(std::string& out, uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x110000) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool IsBlockTag(std::string_view name) {
  static const char* const kBlockTags[] = {
      "p",  "div", "li", "ul", "ol", "br", "hr", "h1",    "h2",    "h3",
      "h4", "h5",  "h6", "tr", "table", "blockquote", "dl", "dt", "dd",
      "pre"};
  for (const char* tag : kBlockTags) {
    if (name == tag) return true;
  }
  return false;
}

struct Tag {
  std::string name;  // lowercase
  bool closing = false;
  bool self_closing = false;
  size_t end = 0;  // index just past '>'
};

// Parses the tag starting at html[pos] == '<'. Returns nullopt when the '<'
// does not start a tag (stray less-than sign).
std::optional<Tag> ParseTag(std::string_view html, size_t pos) {
  size_t i = pos + 1;
  Tag tag;
  if (i < html.size() && html[i] == '/') {
    tag.closing = true;
    ++i;
  }
  const size_t name_start = i;
  while (i < html.size() &&
         (std::isalnum(static_cast<unsigned char>(html[i])) || html[i] == '!' ||
          html[i] == '-')) {
    ++i;
  }
  if (i == name_start) return std::nullopt;
  tag.name = ToLowerAscii(html.substr(name_start, i - name_start));
  char quote = 0;
  for (; i < html.size(); ++i) {
    const char c = html[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      tag.self_closing = i > pos && html[i - 1] == '/';
      tag.end = i + 1;
      return tag;
    }
  }
  return std::nullopt;
}

// Collapses whitespace runs within each line, trims lines, drops blank ones.
std::string NormalizeText(std::string_view text) {
  std::string out;
  std::string line;
  auto flush = [&]() {
    std::string trimmed = Trim(line);
    if (!trimmed.empty()) {
      if (!out.empty()) out.push_back('\n');
      out += trimmed;
    }
    line.clear();
  };
  bool in_space = false;
  for (char c : text) {
    if (c == '\n') {
      flush();
      in_space = false;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      if (!in_space) line.push_back(' ');
      in_space = true;
    } else {
      line.push_back(c);
      in_space = false;
    }
  }
  flush();
  return out;
}

std::string TrimCode(std::string_view code) {
  size_t end = code.size();
  while (end > 0 && std::isspace(static_cast<unsigned char>(code[end - 1]))) {
    --end;
  }
  size_t begin = 0;
  // Drop leading blank lines but keep the first line's indentation.
  size_t scan = 0;
  while (scan < end) {
    const char c = code[scan];
    if (c == '\n') {
      begin = scan + 1;
    } else if (c != ' ' && c != '\t' && c != '\r') {
      break;
    }
    ++scan;
  }
  return std::string(code.substr(begin, end - begin));
}

struct Segment {
  BlockKind kind;
  std::string raw;
};

std::vector<Segment> Segment_(std::string_view html) {
  std::vector<Segment> segments;
  std::string text;  // raw text awaiting normalization
  std::string code;
  int pre_depth = 0;
  int blockquote_depth = 0;
  bool capturing_code = false;

  auto emit_text = [&]() {
    std::string normalized = NormalizeText(DecodeHtmlEntities(text));
    if (!segments.empty() && segments.back().kind == BlockKind::kText) {
      if (!normalized.empty()) {
        if (!segments.back().raw.empty()) segments.back().raw.push_back('\n');
        segments.back().raw += normalized;
      }
    } else {
      segments.push_back({BlockKind::kText, std::move(normalized)});
    }
    text.clear();
  };

  size_t i = 0;
  while (i < html.size()) {
    const char c = html[i];
    if (c == '<') {
      if (html.substr(i, 4) == "<!--") {
        size_t end = html.find("-->", i + 4);
        i = end == std::string_view::npos ? html.size() : end + 3;
        continue;
      }
      auto tag = ParseTag(html, i);
      if (tag) {
        i = tag->end;
        if (tag->name == "pre") {
          if (!tag->closing && !tag->self_closing) {
            if (pre_depth++ == 0 && blockquote_depth == 0) {
              emit_text();
              capturing_code = true;
              code.clear();
            } else if (!capturing_code) {
              text.push_back('\n');
            }
          } else if (tag->closing && pre_depth > 0) {
            if (--pre_depth == 0) {
              if (capturing_code) {
                capturing_code = false;
                std::string raw = TrimCode(DecodeHtmlEntities(code));
                if (!raw.empty()) {
                  segments.push_back({BlockKind::kCode, std::move(raw)});
                }
              } else {
                text.push_back('\n');
              }
            }
          }
          continue;
        }
        if (tag->name == "blockquote" && !capturing_code) {
          if (tag->closing) {
            if (blockquote_depth > 0) --blockquote_depth;
          } else if (!tag->self_closing) {
            ++blockquote_depth;
          }
        }
        if (capturing_code) {
          if (tag->name == "br") code.push_back('\n');
        } else if (pre_depth > 0) {
          if (tag->name == "br") text.push_back('\n');
        } else if (IsBlockTag(tag->name)) {
          text.push_back('\n');
        }
        continue;
      }
    }
    if (capturing_code) {
      code.push_back(c);
    } else if (pre_depth > 0) {
      text.push_back(c);  // preformatted text inside a blockquote
    } else {
      text.push_back(c == '\n' ? ' ' : c);
    }
    ++i;
  }
  if (capturing_code) {
    // Unterminated <pre>: keep what was captured.
    std::string raw = TrimCode(DecodeHtmlEntities(code));
    if (!raw.empty()) segments.push_back({BlockKind::kCode, std::move(raw)});
  }
  emit_text();
  return segments;
}

}  // namespace

std::string DecodeHtmlEntities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    const size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back(s[i++]);
      continue;
    }
    const std::string_view name = s.substr(i + 1, semi - i - 1);
    bool decoded = true;
    if (name == "lt") {
      out.push_back('<');
    } else if (name == "gt") {
      out.push_back('>');
    } else if (name == "amp") {
      out.push_back('&');
    } else if (name == "quot") {
      out.push_back('"');
    } else if (name == "apos") {
      out.push_back('\'');
    } else if (name == "nbsp") {
      out.push_back(' ');
    } else if (name.size() > 1 && name[0] == '#') {
      const bool hex = name[1] == 'x' || name[1] == 'X';
      const std::string digits(name.substr(hex ? 2 : 1));
      char* end = nullptr;
      const unsigned long cp = std::strtoul(digits.c_str(), &end, hex ? 16 : 10);
      if (digits.empty() || *end != '\0' || cp == 0) {
        decoded = false;
      } else {
        AppendUtf8(out, static_cast<uint32_t>(cp));
      }
    } else {
      decoded = false;
    }
    if (decoded) {
      i = semi + 1;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

std::string VisibleText(std::string_view html) {
  std::string text;
  size_t i = 0;
  while (i < html.size()) {
    if (html[i] == '<') {
      if (html.substr(i, 4) == "<!--") {
        size_t end = html.find("-->", i + 4);
        i = end == std::string_view::npos ? html.size() : end + 3;
        continue;
      }
      if (auto tag = ParseTag(html, i)) {
        text.push_back(' ');
        i = tag->end;
        continue;
      }
    }
    text.push_back(html[i++]);
  }
  return DecodeHtmlEntities(text);
}

BlockSequence ParseAnswerPost(std::string_view html) {
  std::vector<Segment> segments = Segment_(html);
  BlockSequence seq;
  bool any_content = false;
  for (const Segment& segment : segments) {
    if (!segment.raw.empty()) any_content = true;
    if (segment.kind == BlockKind::kCode) {
      if (seq.blocks.empty() || seq.blocks.back().kind == BlockKind::kCode) {
        seq.blocks.push_back(Block{BlockKind::kText, "", {}, {}, false});
      }
      seq.blocks.push_back(Block{BlockKind::kCode, segment.raw, {}, {}, false});
    } else {
      if (!seq.blocks.empty() && seq.blocks.back().kind == BlockKind::kText) {
        Block& last = seq.blocks.back();
        if (!segment.raw.empty()) {
          if (!last.raw.empty()) last.raw.push_back('\n');
          last.raw += segment.raw;
        }
      } else {
        seq.blocks.push_back(Block{BlockKind::kText, segment.raw, {}, {}, false});
      }
    }
  }
  if (!any_content) throw Error(ErrorCode::kEmptyPost, "post has no content");
  if (seq.blocks.empty() || seq.blocks.back().kind == BlockKind::kCode) {
    seq.blocks.push_back(Block{BlockKind::kText, "", {}, {}, false});
  }
  return seq;
}

BlockSequence ParsePostLenient(std::string_view html) {
  try {
    return ParseAnswerPost(html);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptyPost) throw;
    BlockSequence seq;
    seq.blocks.push_back(Block{BlockKind::kText, "", {}, {}, false});
    return seq;
  }
}

void TokenizeBlocks(BlockSequence& seq, Language code_language,
                    const PythonNormalizer* python) {
  for (Block& block : seq.blocks) {
    if (block.tokenized) continue;
    if (block.kind == BlockKind::kText) {
      block.tokens = TokenizeText(block.raw).tokens;
    } else {
      TokenStream stream =
          code_language == Language::kPython && python != nullptr
              ? python->Normalize(block.raw)
              : NormalizeCode(block.raw, code_language);
      if (stream.tokens.empty()) {
        stream.tokens = WordPunctSplit(block.raw);
        stream.line_starts = {0};
      }
      block.tokens = std::move(stream.tokens);
      block.line_starts = std::move(stream.line_starts);
    }
    block.tokenized = true;
  }
}

std::vector<CodeContextInstance> ExtractInstances(
    std::string_view question_title, BlockSequence seq,
    const std::optional<PositionLabels>& labels, Language code_language,
    const PythonNormalizer* python) {
  const size_t n_code = seq.CodeCount();
  if (labels) {
    for (const auto& [position, label] : *labels) {
      if (position < 1 || static_cast<size_t>(position) > n_code) {
        throw Error(ErrorCode::kPositionMismatch,
                    "label position " + std::to_string(position) +
                        " outside 1.." + std::to_string(n_code) +
                        " for question " + std::to_string(seq.question_id));
      }
    }
  }
  TokenizeBlocks(seq, code_language, python);
  const std::vector<std::string> question = TokenizeText(question_title).tokens;
  std::vector<CodeContextInstance> instances;
  instances.reserve(n_code);
  for (size_t p = 1; p <= n_code; ++p) {
    CodeContextInstance inst;
    inst.question_id = seq.question_id;
    inst.question_tokens = question;
    inst.pre_tokens = seq.blocks[2 * p - 2].tokens;
    inst.code_tokens = seq.blocks[2 * p - 1].tokens;
    inst.code_line_starts = seq.blocks[2 * p - 1].line_starts;
    inst.post_tokens = seq.blocks[2 * p].tokens;
    inst.position = static_cast<int>(p);
    if (labels) {
      auto it = labels->find(static_cast<int>(p));
      if (it != labels->end()) inst.label = it->second;
    }
    instances.push_back(std::move(inst));
  }
  return instances;
}

DumpRecord ParseDumpLine(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDumpParseError, e.what());
  }
  try {
    DumpRecord record;
    record.question_id = j.at("question_id").get<int64_t>();
    record.title = j.at("title").get<std::string>();
    if (j.contains("tags")) {
      record.tags = j.at("tags").get<std::vector<std::string>>();
    }
    record.question_body_html = j.value("question_body_html", std::string());
    record.accepted_answer_html = j.at("accepted_answer_html").get<std::string>();
    return record;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDumpParseError, e.what());
  }
}

std::string DumpRecordToJson(const DumpRecord& record) {
  nlohmann::json j = {{"question_id", record.question_id},
                      {"title", record.title},
                      {"tags", record.tags},
                      {"question_body_html", record.question_body_html},
                      {"accepted_answer_html", record.accepted_answer_html}};
  return j.dump();
}

AnnotatedLabels ReadAnnotatedLabels(const std::filesystem::path& csv) {
  AnnotatedLabels labels;
  for (const auto& row : ReadCsv(csv)) {
    if (row.size() < 3) {
      throw Error(ErrorCode::kDumpParseError,
                  "label row needs question_id,code_position,label");
    }
    try {
      const int64_t qid = std::stoll(row[0]);
      const int position = std::stoi(row[1]);
      const int label = std::stoi(row[2]);
      if (label != 0 && label != 1) {
        throw Error(ErrorCode::kDumpParseError, "label must be 0 or 1");
      }
      labels[qid][position] = label;
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kDumpParseError, "bad label row: " + row[0]);
    }
  }
  return labels;
}

}  // namespace qcmine

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

#include "qcmine/tokenize.h"

#include <algorithm>
#include <array>
#include <optional>
#include <unordered_map>

#include "qcmine/error.h"
#include "qcmine/io.h"

namespace qcmine {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsWordChar(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_';
}

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

bool IsIdentStart(char c) { return IsWordChar(c) && !IsDigit(c); }

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

// Consumes a numeric literal starting at `pos`; returns its length.
size_t ScanNumber(std::string_view s, size_t pos) {
  size_t i = pos;
  if (i + 1 < s.size() && s[i] == '0' &&
      std::string_view("xXoObB").find(s[i + 1]) != std::string_view::npos) {
    i += 2;
    while (i < s.size() && (IsWordChar(s[i]))) ++i;
    return i - pos;
  }
  while (i < s.size() && (IsDigit(s[i]) || s[i] == '_')) ++i;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && (IsDigit(s[i]) || s[i] == '_')) ++i;
  }
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    size_t j = i + 1;
    if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
    if (j < s.size() && IsDigit(s[j])) {
      i = j;
      while (i < s.size() && IsDigit(s[i])) ++i;
    }
  }
  if (i < s.size() && std::string_view("jJlL").find(s[i]) != std::string_view::npos) {
    ++i;
  }
  return i - pos;
}

constexpr std::array<std::string_view, 30> kPythonOperators = {
    ">>>", "...", "**=", "//=", ">>=", "<<=", "->", ":=", "**", "//",
    "<<",  ">>",  "<=",  ">=",  "==",  "!=",  "+=", "-=", "*=", "/=",
    "%=",  "&=",  "|=",  "^=",  "@=",  "<>",  "+",  "-",  "*",  "/"};
constexpr std::string_view kPythonSingleOps = "%@&|^~<>()[]{},:;.=";

bool IsStringPrefix(std::string_view word) {
  static const std::unordered_set<std::string> kPrefixes = {
      "r", "u", "b", "f", "br", "rb", "fr", "rf"};
  return word.size() <= 2 && kPrefixes.count(ToLowerAscii(word)) > 0;
}

struct PythonLexResult {
  bool ok = false;
  std::vector<std::string> tokens;
  size_t next_line = 0;
};

// Lexes starting at the beginning of `lines[line]`. Only a triple-quoted
// string may pull in following lines.
PythonLexResult LexPythonLine(const std::vector<std::string_view>& lines,
                              size_t line,
                              const std::unordered_set<std::string>& keep) {
  PythonLexResult result;
  result.next_line = line + 1;
  std::string_view s = lines[line];
  size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (IsSpace(c)) {
      ++i;
      continue;
    }
    if (c == '#') break;
    if (c == '\\' && i + 1 == s.size()) break;  // explicit continuation
    size_t quote_at = std::string_view::npos;
    if (IsIdentStart(c)) {
      size_t j = i;
      while (j < s.size() && IsWordChar(s[j])) ++j;
      std::string_view word = s.substr(i, j - i);
      if (j < s.size() && (s[j] == '\'' || s[j] == '"') &&
          IsStringPrefix(word)) {
        quote_at = j;
      } else {
        result.tokens.push_back(keep.count(std::string(word))
                                    ? std::string(word)
                                    : std::string("VAR"));
        i = j;
        continue;
      }
    } else if (c == '\'' || c == '"') {
      quote_at = i;
    }
    if (quote_at != std::string_view::npos) {
      const char q = s[quote_at];
      const bool triple = quote_at + 2 < s.size() && s[quote_at + 1] == q &&
                          s[quote_at + 2] == q;
      if (!triple) {
        size_t j = quote_at + 1;
        bool closed = false;
        while (j < s.size()) {
          if (s[j] == '\\') {
            j += 2;
            continue;
          }
          if (s[j] == q) {
            closed = true;
            break;
          }
          ++j;
        }
        if (!closed) return result;
        result.tokens.emplace_back("STRING");
        i = j + 1;
        continue;
      }
      const std::string closing(3, q);
      size_t cur_line = line;
      size_t from = quote_at + 3;
      while (true) {
        std::string_view text = lines[cur_line];
        size_t at = text.find(closing, from);
        if (at != std::string_view::npos) {
          result.tokens.emplace_back("STRING");
          if (cur_line != line) {
            // The remainder of the closing line continues lexing; splice it
            // in by recursing over a view that starts after the string.
            std::vector<std::string_view> rest = {text.substr(at + 3)};
            PythonLexResult tail = LexPythonLine(rest, 0, keep);
            if (!tail.ok) return result;
            result.tokens.insert(result.tokens.end(), tail.tokens.begin(),
                                 tail.tokens.end());
            result.ok = true;
            result.next_line = cur_line + 1;
            return result;
          }
          i = at + 3;
          break;
        }
        if (++cur_line >= lines.size()) return result;
        from = 0;
      }
      continue;
    }
    if (IsDigit(c) || (c == '.' && i + 1 < s.size() && IsDigit(s[i + 1]))) {
      i += ScanNumber(s, i);
      result.tokens.emplace_back("NUMBER");
      continue;
    }
    bool matched = false;
    for (std::string_view op : kPythonOperators) {
      if (s.substr(i, op.size()) == op) {
        result.tokens.emplace_back(op);
        i += op.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (kPythonSingleOps.find(c) != std::string_view::npos) {
      result.tokens.emplace_back(1, c);
      ++i;
      continue;
    }
    return result;  // not Python: '$', '?', '`', '!' ...
  }
  result.ok = true;
  return result;
}

const std::unordered_set<std::string>& SqlKeywords() {
  static const std::unordered_set<std::string> kKeywords = {
      "select", "from", "where", "and", "or", "not", "in", "is", "null",
      "like", "between", "as", "on", "join", "inner", "left", "right",
      "outer", "full", "cross", "natural", "using", "group", "by", "order",
      "having", "limit", "offset", "top", "distinct", "all", "any", "some",
      "exists", "union", "intersect", "except", "minus", "insert", "into",
      "values", "update", "set", "delete", "create", "table", "view",
      "index", "drop", "alter", "add", "column", "primary", "key", "foreign",
      "references", "unique", "default", "check", "constraint", "case",
      "when", "then", "else", "end", "asc", "desc", "with", "recursive",
      "over", "partition", "rows", "range", "unbounded", "preceding",
      "following", "current", "row", "if", "begin", "commit", "rollback",
      "transaction", "declare", "procedure", "function", "returns", "return",
      "trigger", "for", "each", "before", "after", "instead", "of", "cast",
      "convert", "true", "false", "int", "integer", "varchar", "char",
      "text", "decimal", "numeric", "float", "real", "double", "bigint",
      "smallint", "boolean", "bool", "datetime", "timestamp", "clob",
      "blob", "varchar2", "number", "count", "sum", "avg", "min", "max",
      "coalesce", "nullif", "isnull", "ifnull", "nvl", "concat", "substr",
      "substring", "length", "len", "upper", "lower", "trim", "ltrim",
      "rtrim", "replace", "round", "floor", "ceil", "ceiling", "abs", "now",
      "getdate", "sysdate", "dateadd", "datediff", "date_format", "to_char",
      "to_date", "extract", "row_number", "rank", "dense_rank", "lag", "lead",
      "first_value", "last_value", "group_concat", "string_agg", "listagg",
      "pivot", "unpivot", "merge", "matched", "exec", "execute", "go",
      "truncate", "rownum", "dual", "collate", "escape", "returning",
      "temporary", "temp", "auto_increment", "identity", "grant", "revoke",
      "while", "loop", "fetch", "next", "only", "first", "last", "nulls",
      "interval", "within", "ignore", "replace", "duplicate", "lock",
      "share", "mode", "nowait", "cascade", "restrict", "schema", "database",
      "use", "show", "describe", "explain", "analyze", "vacuum"};
  return kKeywords;
}

bool IsTableIntroducer(std::string_view kw) {
  return kw == "from" || kw == "join" || kw == "into" || kw == "update" ||
         kw == "table";
}

// Keywords that neither start a table list nor end one.
bool KeepsSqlMode(std::string_view kw) {
  return kw == "as" || kw == "inner" || kw == "left" || kw == "right" ||
         kw == "outer" || kw == "full" || kw == "cross" || kw == "natural" ||
         kw == "only" || kw == "if" || kw == "exists" || kw == "temporary" ||
         kw == "temp";
}

constexpr std::array<std::string_view, 8> kSqlMultiOps = {
    "<>", "!=", "<=", ">=", "||", "::", ":=", "=>"};

}  // namespace

std::string_view LanguageName(Language language) {
  switch (language) {
    case Language::kText: return "text";
    case Language::kPython: return "python";
    case Language::kSql: return "sql";
  }
  return "text";
}

Language ParseLanguage(std::string_view name) {
  const std::string lower = ToLowerAscii(name);
  if (lower == "text") return Language::kText;
  if (lower == "python") return Language::kPython;
  if (lower == "sql") return Language::kSql;
  throw Error(ErrorCode::kConfigInvalid,
              "unknown language '" + std::string(name) + "'");
}

std::vector<std::string> WordPunctSplit(std::string_view s) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < s.size()) {
    if (IsSpace(s[i])) {
      ++i;
      continue;
    }
    const bool word = IsWordChar(s[i]);
    size_t j = i + 1;
    while (j < s.size() && !IsSpace(s[j]) && IsWordChar(s[j]) == word) ++j;
    tokens.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return tokens;
}

TokenStream TokenizeText(std::string_view s) {
  TokenStream stream;
  stream.language = Language::kText;
  stream.tokens = WordPunctSplit(s);
  for (auto& token : stream.tokens) token = ToLowerAscii(token);
  return stream;
}

const std::vector<std::string>& DefaultPythonKeepList() {
  static const std::vector<std::string> kKeep = {
      // keywords
      "False", "None", "True", "and", "as", "assert", "async", "await",
      "break", "class", "continue", "def", "del", "elif", "else", "except",
      "finally", "for", "from", "global", "if", "import", "in", "is",
      "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try",
      "while", "with", "yield", "print", "exec",
      // builtins
      "abs", "all", "any", "bool", "bytes", "callable", "chr", "dict", "dir",
      "divmod", "enumerate", "eval", "filter", "float", "format",
      "frozenset", "getattr", "globals", "hasattr", "hash", "help", "hex",
      "id", "input", "int", "isinstance", "issubclass", "iter", "len",
      "list", "locals", "map", "max", "min", "next", "object", "oct", "open",
      "ord", "pow", "property", "range", "repr", "reversed", "round", "set",
      "setattr", "slice", "sorted", "staticmethod", "classmethod", "str",
      "sum", "super", "tuple", "type", "vars", "zip", "xrange", "unicode",
      "raw_input", "self", "cls", "__init__", "__name__", "__main__",
      "Exception", "ValueError", "TypeError", "KeyError", "IndexError",
      "AttributeError", "StopIteration", "IOError", "OSError",
      "RuntimeError", "ImportError", "NameError", "ZeroDivisionError"};
  return kKeep;
}

PythonNormalizer::PythonNormalizer()
    : keep_(DefaultPythonKeepList().begin(), DefaultPythonKeepList().end()) {}

PythonNormalizer::PythonNormalizer(std::unordered_set<std::string> keep)
    : keep_(std::move(keep)) {}

PythonNormalizer PythonNormalizer::FromFile(
    const std::filesystem::path& keep_list) {
  auto words = ReadWordList(keep_list);
  return PythonNormalizer(
      std::unordered_set<std::string>(words.begin(), words.end()));
}

TokenStream PythonNormalizer::Normalize(std::string_view code) const {
  TokenStream stream;
  stream.language = Language::kPython;
  const auto lines = SplitLines(code);
  size_t line = 0;
  while (line < lines.size()) {
    PythonLexResult lexed = LexPythonLine(lines, line, keep_);
    std::vector<std::string> tokens;
    if (lexed.ok) {
      tokens = std::move(lexed.tokens);
      line = lexed.next_line;
    } else {
      tokens = WordPunctSplit(lines[line]);
      ++line;
    }
    if (tokens.empty()) continue;
    stream.line_starts.push_back(stream.tokens.size());
    for (auto& token : tokens) stream.tokens.push_back(std::move(token));
  }
  return stream;
}

TokenStream NormalizePython(std::string_view code) {
  static const PythonNormalizer kDefault;
  return kDefault.Normalize(code);
}

TokenStream NormalizeSql(std::string_view code) {
  TokenStream stream;
  stream.language = Language::kSql;

  struct RawToken {
    enum Kind { kIdent, kKeyword, kOther } kind;
    std::string text;
    size_t line;
  };
  std::vector<RawToken> raw;
  size_t line = 0;
  size_t i = 0;
  const std::string_view s = code;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (IsSpace(c)) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      size_t end = s.find("*/", i + 2);
      end = end == std::string_view::npos ? s.size() : end + 2;
      line += std::count(s.begin() + i, s.begin() + end, '\n');
      i = end;
      continue;
    }
    if (c == '\'' || c == '"') {
      size_t j = i + 1;
      while (j < s.size()) {
        if (s[j] == '\\') {
          j += 2;
          continue;
        }
        if (s[j] == c) {
          if (j + 1 < s.size() && s[j + 1] == c) {
            j += 2;
            continue;
          }
          break;
        }
        ++j;
      }
      const size_t end = std::min(j + 1, s.size());
      raw.push_back({RawToken::kOther, "STRING", line});
      line += std::count(s.begin() + i, s.begin() + end, '\n');
      i = end;
      continue;
    }
    if (c == '`' || c == '[') {
      const char close = c == '`' ? '`' : ']';
      size_t j = s.find(close, i + 1);
      if (j != std::string_view::npos && j > i + 1 &&
          s.substr(i + 1, j - i - 1).find('\n') == std::string_view::npos) {
        raw.push_back(
            {RawToken::kIdent, std::string(s.substr(i + 1, j - i - 1)), line});
        i = j + 1;
        continue;
      }
    }
    if (IsDigit(c) || (c == '.' && i + 1 < s.size() && IsDigit(s[i + 1]))) {
      i += ScanNumber(s, i);
      raw.push_back({RawToken::kOther, "NUMBER", line});
      continue;
    }
    if ((c == '@' || c == ':' || c == '$') && i + 1 < s.size() &&
        IsWordChar(s[i + 1]) && !(c == ':' && i > 0 && s[i - 1] == ':')) {
      size_t j = i + 1;
      while (j < s.size() && IsWordChar(s[j])) ++j;
      raw.push_back({RawToken::kOther, std::string(s.substr(i, j - i)), line});
      i = j;
      continue;
    }
    if (IsIdentStart(c)) {
      size_t j = i;
      while (j < s.size() && (IsWordChar(s[j]) || s[j] == '$' || s[j] == '#')) {
        ++j;
      }
      std::string word(s.substr(i, j - i));
      std::string lower = ToLowerAscii(word);
      if (SqlKeywords().count(lower)) {
        raw.push_back({RawToken::kKeyword, std::move(lower), line});
      } else {
        raw.push_back({RawToken::kIdent, std::move(word), line});
      }
      i = j;
      continue;
    }
    bool matched = false;
    for (std::string_view op : kSqlMultiOps) {
      if (s.substr(i, op.size()) == op) {
        raw.push_back({RawToken::kOther, std::string(op), line});
        i += op.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    raw.push_back({RawToken::kOther, std::string(1, c), line});
    ++i;
  }

  std::unordered_map<std::string, std::string> placeholders;
  int tables = 0;
  int columns = 0;
  bool table_mode = false;
  size_t last_line = static_cast<size_t>(-1);
  for (size_t k = 0; k < raw.size(); ++k) {
    const RawToken& tok = raw[k];
    std::string out;
    if (tok.kind == RawToken::kKeyword) {
      if (IsTableIntroducer(tok.text)) {
        table_mode = true;
      } else if (!KeepsSqlMode(tok.text)) {
        table_mode = false;
      }
      out = tok.text;
    } else if (tok.kind == RawToken::kIdent) {
      const std::string key = ToLowerAscii(tok.text);
      auto it = placeholders.find(key);
      if (it != placeholders.end()) {
        out = it->second;
      } else {
        const bool qualifier = k + 1 < raw.size() && raw[k + 1].text == ".";
        const bool qualified = k > 0 && raw[k - 1].text == ".";
        const bool is_table = qualifier || (table_mode && !qualified);
        out = is_table ? "tab" + std::to_string(tables++)
                       : "col" + std::to_string(columns++);
        placeholders.emplace(key, out);
      }
    } else {
      if (tok.text == "(" && table_mode) table_mode = false;
      out = tok.text;
    }
    if (tok.line != last_line) {
      stream.line_starts.push_back(stream.tokens.size());
      last_line = tok.line;
    }
    stream.tokens.push_back(std::move(out));
  }
  return stream;
}

TokenStream NormalizeCode(std::string_view code, Language language) {
  switch (language) {
    case Language::kPython: return NormalizePython(code);
    case Language::kSql: return NormalizeSql(code);
    case Language::kText: return TokenizeText(code);
  }
  return TokenizeText(code);
}

}  // namespace qcmine

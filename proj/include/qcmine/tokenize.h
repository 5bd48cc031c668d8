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

#ifndef QCMINE_TOKENIZE_H_
#define QCMINE_TOKENIZE_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace qcmine {

enum class Language { kText, kPython, kSql };

std::string_view LanguageName(Language language);
// Accepts "text", "python", "sql" (case-insensitive).
Language ParseLanguage(std::string_view name);

// A token sequence. No token is empty or contains whitespace; text tokens are
// lowercase. `line_starts` holds the index of the first token of every
// non-empty source line (code only; empty for text or hand-built streams).
struct TokenStream {
  std::vector<std::string> tokens;
  Language language = Language::kText;
  std::vector<size_t> line_starts;
};

// wordpunct-style split: maximal runs of word characters (ASCII letters,
// digits, '_' and any non-ASCII byte) or of other non-space symbols. Case is
// preserved.
std::vector<std::string> WordPunctSplit(std::string_view s);

// Lowercased wordpunct tokens.
TokenStream TokenizeText(std::string_view s);

// Lexes Python-like code line by line. Identifiers outside the keep-list
// become VAR, numeric literals NUMBER, string literals STRING. A line that
// does not lex (stray characters, unterminated strings) is split with
// WordPunctSplit instead and left unnormalized.
class PythonNormalizer {
 public:
  PythonNormalizer();  // built-in keywords + common builtins
  explicit PythonNormalizer(std::unordered_set<std::string> keep);
  static PythonNormalizer FromFile(const std::filesystem::path& keep_list);

  TokenStream Normalize(std::string_view code) const;
  const std::unordered_set<std::string>& keep() const { return keep_; }

 private:
  std::unordered_set<std::string> keep_;
};

TokenStream NormalizePython(std::string_view code);

// SQL keywords are lowercased. Identifiers in table position become tab0,
// tab1, ... and all other identifiers col0, col1, ..., numbered by first
// occurrence so that repeated names share a placeholder.
TokenStream NormalizeSql(std::string_view code);

// Dispatches on language; kText tokenizes as prose.
TokenStream NormalizeCode(std::string_view code, Language language);

const std::vector<std::string>& DefaultPythonKeepList();

}  // namespace qcmine

#endif  // QCMINE_TOKENIZE_H_

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

#ifndef QCMINE_IO_H_
#define QCMINE_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qcmine {

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

// One entry per non-blank line, trimmed. Lines starting with '#' are comments.
std::vector<std::string> ReadWordList(const std::filesystem::path& path);

// Minimal RFC-4180 style splitting of one CSV line (quoted fields allowed).
std::vector<std::string> SplitCsvLine(std::string_view line);

// Rows of a CSV file; a first row whose first field is not numeric is
// treated as a header and skipped.
std::vector<std::vector<std::string>> ReadCsv(
    const std::filesystem::path& path);

std::string Trim(std::string_view s);
std::string ToLowerAscii(std::string_view s);

}  // namespace qcmine

#endif  // QCMINE_IO_H_

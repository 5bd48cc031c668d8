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

#ifndef QCMINE_POST_PARSER_INL_H_
#define QCMINE_POST_PARSER_INL_H_

#include <fstream>
#include <string>

#include "qcmine/error.h"

namespace qcmine {

template <typename OnRecord, typename OnError>
void ForEachDumpRecord(const std::filesystem::path& path, OnRecord on_record,
                       OnError on_error) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    DumpRecord record;
    try {
      record = ParseDumpLine(line);
    } catch (const Error& e) {
      on_error(line_number, std::string(e.what()));
      continue;
    }
    on_record(std::move(record));
  }
}

}  // namespace qcmine

#endif  // QCMINE_POST_PARSER_INL_H_

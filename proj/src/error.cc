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

#include "qcmine/error.h"

namespace qcmine {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyPost: return "EmptyPost";
    case ErrorCode::kPositionMismatch: return "PositionMismatch";
    case ErrorCode::kUntrainedModel: return "UntrainedModel";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kVocabMissing: return "VocabMissing";
    case ErrorCode::kEmptyCode: return "EmptyCode";
    case ErrorCode::kSingleClassData: return "SingleClassData";
    case ErrorCode::kEmptySplit: return "EmptySplit";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kCheckpointMismatch: return "CheckpointMismatch";
    case ErrorCode::kDumpParseError: return "DumpParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace qcmine

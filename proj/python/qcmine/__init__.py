# Copyright 2026 The qcmine Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Stack Overflow question-code pair mining: parsing, classifiers, mining."""

from qcmine._core import (
    Model,
    QcmineError,
    QuestionFilter,
    cohens_kappa,
    combine_votes,
    dataset_stats,
    evaluate,
    extract_instances,
    mine,
    mrr,
    normalize_code,
    parse_answer_post,
    select_all,
    select_first,
    tokenize_text,
    train,
)

__all__ = [
    "Model",
    "QcmineError",
    "QuestionFilter",
    "cohens_kappa",
    "combine_votes",
    "dataset_stats",
    "evaluate",
    "extract_instances",
    "mine",
    "mrr",
    "normalize_code",
    "parse_answer_post",
    "select_all",
    "select_first",
    "tokenize_text",
    "train",
]

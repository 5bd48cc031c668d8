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
"""Smoke tests for the qcmine Python bindings."""

import json
import pathlib

import pytest

import qcmine

SAMPLE = pathlib.Path(__file__).resolve().parents[2] / "data" / "sample"

TWO_CODE = (
    "<p>Use this:</p><pre><code>def f(x):\n    return x + 1</code></pre>"
    "<pre><code>&gt;&gt;&gt; f(1)\n2</code></pre>"
)


def write_pass_filter(path):
    """A filter with zero weights passes every question as how-to."""
    keywords = [line for line in
                (SAMPLE.parent / "question_keywords.txt").read_text().splitlines()
                if line and not line.startswith("#")]
    path.write_text(json.dumps({
        "format": "qcmine-question-filter-v1",
        "language": "python",
        "keywords": keywords,
        "model": {"weights": [0.0] * (len(keywords) + 4), "bias": 0.0,
                  "kind": "logistic", "l2": 0.0, "trained": True},
    }))
    return path


def test_parse_inserts_dummy_blocks():
    blocks = qcmine.parse_answer_post(TWO_CODE)
    assert [b["kind"] for b in blocks] == ["text", "code", "text", "code", "text"]
    assert blocks[2]["raw"] == ""
    assert blocks[4]["raw"] == ""


def test_empty_post_raises():
    with pytest.raises(qcmine.QcmineError, match="EmptyPost"):
        qcmine.parse_answer_post("")
    assert len(qcmine.parse_answer_post("", lenient=True)) == 1


def test_instances_and_tokens():
    insts = qcmine.extract_instances("How to add one?", TWO_CODE, {1: 1, 2: 0})
    assert [i["position"] for i in insts] == [1, 2]
    assert [i["label"] for i in insts] == [1, 0]
    assert insts[0]["question_tokens"] == ["how", "to", "add", "one", "?"]
    assert "VAR" in qcmine.normalize_code("total = count + 1")
    assert qcmine.select_first(TWO_CODE) == [1, 0]
    assert qcmine.select_all(TWO_CODE) == [1, 1]


def test_metrics():
    m = qcmine.evaluate([1, 1, 1, 0], [1, 1, 0, 1])
    assert m["precision"] == pytest.approx(2 / 3)
    assert m["accuracy"] == 0.5
    assert qcmine.mrr([2, 4]) == 0.375
    assert qcmine.cohens_kappa([1, 0, 1], [1, 0, 1]) == 1.0
    assert qcmine.combine_votes(1, 1, 1) == 1
    assert qcmine.combine_votes(0, 0, 0) == 0
    assert qcmine.combine_votes(1, 0, 1) is None


def test_train_predict_and_mine(tmp_path):
    config = SAMPLE / "config.json"
    dump = SAMPLE / "dump.jsonl"
    paths = {}
    for variant in ("biv-hnn", "text-hnn", "code-hnn"):
        out = tmp_path / f"{variant}.json"
        report = qcmine.train(config, variant, dump, SAMPLE / "train.csv",
                              SAMPLE / "valid.csv", out)
        assert report["epochs"] >= 1
        paths[variant] = out

    model = qcmine.Model.load(paths["biv-hnn"])
    assert model.variant == "biv-hnn"
    inst = qcmine.extract_instances("How to add one?", TWO_CODE)[0]
    label, score = model.predict(inst)
    assert label in (0, 1)
    assert 0.0 < score < 1.0
    assert sum(model.probabilities(inst)) == pytest.approx(1.0)

    filt = write_pass_filter(tmp_path / "filter.json")
    assert qcmine.QuestionFilter.load(filt).classify("How to x")[0] == "howto"

    out = tmp_path / "mined.jsonl"
    report = qcmine.mine(dump, paths["biv-hnn"], paths["text-hnn"],
                         paths["code-hnn"], filt, out)
    assert report["single_code_pairs"] > 0
    assert (tmp_path / "mined.jsonl.abstentions.jsonl").exists()
    stats = qcmine.dataset_stats(out)
    assert stats["consistent"]
    assert stats["pairs"] == report["single_code_pairs"] + report["ensemble_mined_pairs"]


def test_wrong_voter_is_refused(tmp_path):
    config = SAMPLE / "config.json"
    dump = SAMPLE / "dump.jsonl"
    text = tmp_path / "text.json"
    qcmine.train(config, "text-hnn", dump, SAMPLE / "train.csv", SAMPLE / "valid.csv", text)
    with pytest.raises(qcmine.QcmineError, match="CheckpointMismatch"):
        qcmine.mine(dump, text, text, text, write_pass_filter(tmp_path / "f.json"),
                    tmp_path / "out.jsonl")

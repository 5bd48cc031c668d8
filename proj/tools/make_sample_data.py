#!/usr/bin/env python3
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
"""Writes the small synthetic corpus under data/sample/.

The output is a pure function of the seed, so the checked-in files can be
regenerated byte for byte.
"""

import argparse
import html
import json
import pathlib
import random

TASKS = [
    ("reverse a list", "items[::-1]", "reversed_items"),
    ("merge two dicts", "{**a, **b}", "merged"),
    ("read a file line by line", "open(path).readlines()", "lines"),
    ("sort a dict by value", "sorted(d.items(), key=lambda kv: kv[1])", "pairs"),
    ("flatten a nested list", "[x for sub in nested for x in sub]", "flat"),
    ("count words in a string", "collections.Counter(text.split())", "counts"),
    ("remove duplicates from a list", "list(dict.fromkeys(items))", "unique"),
    ("check if a key exists", "key in mapping", "found"),
    ("convert a string to int", "int(value)", "number"),
    ("limit a number to a range", "max(lo, min(x, hi))", "clamped"),
]
HOWTO_PREFIX = ["How to", "How do I", "How can I", "Best way to"]
OTHER_TITLES = [
    "Why does my loop raise an error",
    "Difference between list and tuple",
    "TypeError when calling a method",
    "Why is this comprehension slow",
]


def solution_block(rng, expr, name):
    fn = rng.choice(["solve", "helper", "run", "compute"])
    return (f"def {fn}(items, a, b, d, path, nested, text, mapping, key,"
            f" value, lo, hi, x):\n    {name} = {expr}\n    return {name}\n")


def demo_block(rng):
    n = rng.randint(1, 9)
    return f">>> solve({n})\n{n * n}\n>>> solve({n + 1})\n{(n + 1) ** 2}\n"


def pre(code):
    return "<pre><code>" + html.escape(code, quote=False) + "</code></pre>"


def answer(rng, blocks):
    parts = []
    for is_solution, misleading, code in blocks:
        if is_solution != misleading:
            lead = rng.choice(["You can try this:", "Try the following.",
                               "One option is to try:"])
        else:
            lead = rng.choice(["The output:", "Output is:", "It prints output:"])
        parts.append(f"<p>{lead}</p>")
        parts.append(pre(code))
    parts.append("<p>" + rng.choice(["Hope this helps.", "Good luck.", ""]) +
                 "</p>")
    return "\n".join(parts)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/sample")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    records, block_labels, question_labels = [], [], []
    qid = 1000
    for i in range(60):
        qid += 1
        task, expr, name = TASKS[i % len(TASKS)]
        title = f"{rng.choice(HOWTO_PREFIX)} {task} in python"
        n_blocks = 1 if i % 6 == 0 else rng.randint(2, 4)
        blocks = []
        for pos in range(n_blocks):
            is_solution = n_blocks == 1 or pos == 0 or rng.random() < 0.3
            code = solution_block(rng, expr, name) if is_solution else demo_block(rng)
            # Demo blocks introduced like a solution split the two views.
            misleading = not is_solution and rng.random() < 0.25
            blocks.append((is_solution, misleading, code))
        records.append({
            "question_id": qid,
            "title": title,
            "tags": ["python", rng.choice(["list", "dict", "string"])],
            "question_body_html": f"<p>I want to {task}.</p>",
            "accepted_answer_html": answer(rng, blocks),
        })
        question_labels.append((qid, "howto"))
        if n_blocks > 1:
            for pos, (is_solution, _, _) in enumerate(blocks, start=1):
                block_labels.append((qid, pos, int(is_solution)))
    for i in range(12):
        qid += 1
        title = OTHER_TITLES[i % len(OTHER_TITLES)]
        records.append({
            "question_id": qid,
            "title": title,
            "tags": ["python"],
            "question_body_html": "<p>It fails.</p>" + pre("x = broken()\n"),
            "accepted_answer_html": "<p>Because the value is None.</p>" +
                                    pre("print(x)\n"),
        })
        question_labels.append((qid, "other"))
    for i in range(4):
        qid += 1
        records.append({
            "question_id": qid,
            "title": "How to select the latest row per group",
            "tags": ["sql"],
            "question_body_html": "<p>Table t has many rows.</p>",
            "accepted_answer_html": pre("SELECT * FROM t WHERE id = 1;\n"),
        })

    lines = [json.dumps(r, sort_keys=True) for r in records]
    lines.insert(17, '{"question_id": "broken"')  # exercises the skip path
    (out / "dump.jsonl").write_text("\n".join(lines) + "\n")

    labeled_questions = sorted({q for q, _, _ in block_labels})
    rng.shuffle(labeled_questions)
    n = len(labeled_questions)
    splits = {
        "train": set(labeled_questions[: n * 3 // 5]),
        "valid": set(labeled_questions[n * 3 // 5: n * 4 // 5]),
        "test": set(labeled_questions[n * 4 // 5:]),
    }
    for split, qids in splits.items():
        rows = [f"{q},{p},{y}" for q, p, y in block_labels if q in qids]
        (out / f"{split}.csv").write_text(
            "question_id,code_position,label\n" + "\n".join(rows) + "\n")

    rng.shuffle(question_labels)
    k = len(question_labels) * 2 // 3
    for split, rows in (("questions_train", question_labels[:k]),
                        ("questions_valid", question_labels[k:])):
        (out / f"{split}.csv").write_text(
            "question_id,label\n" + "\n".join(f"{q},{y}" for q, y in rows) + "\n")


if __name__ == "__main__":
    main()

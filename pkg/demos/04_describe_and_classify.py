"""Score simple predictors on the description and classification tasks.

A remote model can be plugged in with ``make_model("remote:http://host/generate")``;
here only local predictors are used so the script runs offline.

    python demos/04_describe_and_classify.py
"""

from __future__ import annotations

import json
from pathlib import Path

from htmltasks.baselines import closest_description_predictor
from htmltasks.codec import CategoryVocabulary, ClassificationExample, build_fewshot_prompt, decode_category
from htmltasks.distill import DescriptionExample
from htmltasks.evaluation import evaluate

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def main() -> None:
    rows = [json.loads(line) for line in (FIXTURES / "closest200.jsonl").read_text("utf-8").splitlines()]
    data = [DescriptionExample(r["snippet_html"], "t", r["description"], "", "") for r in rows]
    report = evaluate(data, closest_description_predictor, "describe")
    print(f"closest-description baseline on {report.n} synthetic snippets:")
    print(f"  exact match {report.exact_match_pct:.1f}%  BLEU {report.bleu:.2f}  ROUGE-1 F {report.rouge1_f:.3f}")

    vocab = CategoryVocabulary.load()
    shots = [
        ClassificationExample('<label>E-mail</label><input type="email" class="f">', "email"),
        ClassificationExample('<input type="password"><img src="eye.svg">', "password"),
    ]
    print("\nfew-shot prompt:")
    print(build_fewshot_prompt(shots, '<span>Given name</span><input target>', vocab))

    # noisy model answers are mapped back onto the vocabulary
    for raw in ["name_first", "e mail", "postcode_thing"]:
        print(f"  {raw!r:18s} -> {decode_category(raw, vocab)}")


if __name__ == "__main__":
    main()

"""Run a predictor over a dataset and collect the metric bundle for one task kind."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from .codec import CategoryVocabulary, ClassificationExample, decode_category, encode_classification_input
from .distill import DescriptionExample
from .metrics import bleu, exact_match, mean_rouge1_f
from .nav import Outcome, run_episode

TASK_KINDS = ("classify", "describe", "navigate")


@dataclass
class EvalReport:
    task: str
    n: int
    exact_match_pct: Optional[float] = None
    bleu: Optional[float] = None
    rouge1_f: Optional[float] = None
    success_rate_pct: Optional[float] = None
    failure_mode_counts: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")


def _predict_all(inputs: Sequence[str], predictor: Callable[[str], str], failures: Counter) -> list[str]:
    preds = []
    for text in inputs:
        try:
            preds.append(predictor(text))
        except Exception as exc:  # noqa: BLE001 - transport failures are scored as wrong answers
            failures[type(exc).__name__] += 1
            preds.append("")
    return preds


def _text_report(kind: str, preds: list[str], golds: list[str], failures: Counter) -> EvalReport:
    n = len(golds)
    return EvalReport(
        task=kind,
        n=n,
        exact_match_pct=100.0 * sum(exact_match(p, g) for p, g in zip(preds, golds)) / n,
        bleu=bleu(preds, golds),
        rouge1_f=mean_rouge1_f(preds, golds),
        failure_mode_counts=dict(failures),
    )


def evaluate_descriptions(examples: Iterable[DescriptionExample], predictor: Callable[[str], str]) -> EvalReport:
    examples = list(examples)
    if not examples:
        raise ValueError("empty dataset")
    failures: Counter = Counter()
    preds = _predict_all([ex.snippet_html for ex in examples], predictor, failures)
    return _text_report("describe", preds, [ex.description for ex in examples], failures)


def evaluate_classification(
    examples: Iterable[ClassificationExample],
    predictor: Callable[[str], str],
    vocab: Optional[CategoryVocabulary] = None,
) -> EvalReport:
    """Exact match on decoded categories; out-of-vocabulary outputs count as wrong."""
    examples = list(examples)
    if not examples:
        raise ValueError("empty dataset")
    vocab = vocab or CategoryVocabulary.load()
    failures: Counter = Counter()
    raw = _predict_all([encode_classification_input(ex.snippet_html) for ex in examples], predictor, failures)
    preds = []
    for text in raw:
        decoded = decode_category(text, vocab)
        if not decoded.in_vocabulary:
            failures["out_of_vocabulary"] += 1
        preds.append(decoded.category)
    return _text_report("classify", preds, [ex.category for ex in examples], failures)


def evaluate_navigation(
    episodes: Iterable[tuple[str, int]],
    policy_factory: Callable[[str, int], Callable[[str], str]],
) -> EvalReport:
    """Success rate over ``(task, seed)`` episodes; ``policy_factory(task, seed)`` builds each policy."""
    episodes = list(episodes)
    if not episodes:
        raise ValueError("no episodes")
    failures: Counter = Counter()
    wins = 0
    for task, seed in episodes:
        try:
            record = run_episode(task, seed, policy_factory(task, seed))
        except Exception as exc:  # noqa: BLE001
            failures[type(exc).__name__] += 1
            continue
        failures.update(record.parse_errors)
        wins += record.outcome is Outcome.SUCCESS
    return EvalReport(
        task="navigate",
        n=len(episodes),
        success_rate_pct=100.0 * wins / len(episodes),
        failure_mode_counts=dict(failures),
    )


def evaluate(dataset, predictor, kind: str, vocab: Optional[CategoryVocabulary] = None) -> EvalReport:
    """Dispatch on ``kind``: ``describe``, ``classify`` or ``navigate``.

    For ``navigate`` the dataset holds ``(task, seed)`` pairs and ``predictor``
    is a ``(task, seed) -> policy`` factory.
    """
    if kind == "describe":
        return evaluate_descriptions(dataset, predictor)
    if kind == "classify":
        return evaluate_classification(dataset, predictor, vocab)
    if kind == "navigate":
        return evaluate_navigation(dataset, predictor)
    raise ValueError(f"unknown task kind {kind!r}; expected one of {TASK_KINDS}")

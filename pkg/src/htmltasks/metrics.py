"""Exact match, corpus BLEU and ROUGE-1.

Tokenization for BLEU and ROUGE-1 is whitespace splitting.  BLEU is
case-sensitive; ROUGE-1 lower-cases first.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import NamedTuple, Sequence


class EmptyInput(ValueError):
    pass


def exact_match(pred: str, gold: str) -> int:
    return int(pred.strip() == gold.strip())


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_stats(preds: Sequence[str], golds: Sequence[str], max_order: int = 4):
    """Clipped n-gram matches and totals per order, plus system and reference lengths."""
    if len(preds) != len(golds):
        raise ValueError(f"{len(preds)} predictions for {len(golds)} references")
    if not preds:
        raise EmptyInput("no sentence pairs")
    matches = [0] * max_order
    totals = [0] * max_order
    sys_len = ref_len = 0
    for pred, gold in zip(preds, golds):
        p, g = pred.split(), gold.split()
        sys_len += len(p)
        ref_len += len(g)
        for n in range(1, max_order + 1):
            pc, gc = _ngrams(p, n), _ngrams(g, n)
            matches[n - 1] += sum(min(c, gc[gram]) for gram, c in pc.items())
            totals[n - 1] += max(len(p) - n + 1, 0)
    return matches, totals, sys_len, ref_len


def bleu(preds: Sequence[str], golds: Sequence[str], max_order: int = 4) -> float:
    """Corpus BLEU in [0, 100] with one reference per prediction.

    No smoothing: any zero n-gram precision gives 0.  Orders the whole corpus
    is too short to contain (zero candidate n-grams) are left out of the
    geometric mean, so a corpus of one-word descriptions can still score 100.
    """
    matches, totals, sys_len, ref_len = bleu_stats(preds, golds, max_order)
    orders = [n for n in range(max_order) if totals[n] > 0]
    if not orders or any(matches[n] == 0 for n in orders):
        return 0.0
    log_precision = sum(math.log(matches[n] / totals[n]) for n in orders) / len(orders)
    if sys_len >= ref_len:
        bp = 1.0
    else:
        bp = math.exp(1 - ref_len / sys_len)
    return 100.0 * bp * math.exp(log_precision)


class Rouge(NamedTuple):
    precision: float
    recall: float
    f1: float


def rouge1(pred: str, gold: str) -> Rouge:
    p = pred.lower().split()
    g = gold.lower().split()
    if not p or not g:
        return Rouge(0.0, 0.0, 0.0)
    overlap = sum((Counter(p) & Counter(g)).values())
    precision = overlap / len(p)
    recall = overlap / len(g)
    f1 = 0.0 if overlap == 0 else 2 * precision * recall / (precision + recall)
    return Rouge(precision, recall, f1)


def mean_rouge1_f(preds: Sequence[str], golds: Sequence[str]) -> float:
    if len(preds) != len(golds):
        raise ValueError(f"{len(preds)} predictions for {len(golds)} references")
    if not preds:
        raise EmptyInput("no sentence pairs")
    return sum(rouge1(p, g).f1 for p, g in zip(preds, golds)) / len(preds)

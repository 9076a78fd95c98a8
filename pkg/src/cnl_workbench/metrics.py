"""Translation quality metrics: exact match, semantic match, BLEU, ROUGE-L.

Variants are pinned here because they are the contract the tests freeze:
corpus-level BLEU over orders 1-4 with add-one smoothing on any order whose
match count is zero, brevity penalty exp(1 - r/c) for short output; ROUGE-L
as the mean per-pair LCS F1 (beta = 1). Tokens are whitespace tokens.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

from . import cnl
from .cnl import CnlGrammar


class LengthMismatch(ValueError):
    pass


class EmptyInput(ValueError):
    pass


def _check_lists(predictions: Sequence[str], references: Sequence[str]) -> None:
    if len(predictions) != len(references):
        raise LengthMismatch(
            f"{len(predictions)} predictions vs {len(references)} references"
        )
    if not predictions:
        raise EmptyInput("need at least one prediction/reference pair")


def _normalize_ws(text: str) -> str:
    return " ".join(text.split())


def exact_match_accuracy(
    predictions: Sequence[str], references: Sequence[str], strict: bool = False
) -> float:
    """Fraction of string-equal pairs; whitespace-normalized unless ``strict``."""
    _check_lists(predictions, references)
    if strict:
        hits = sum(1 for p, r in zip(predictions, references) if p == r)
    else:
        hits = sum(
            1 for p, r in zip(predictions, references) if _normalize_ws(p) == _normalize_ws(r)
        )
    return hits / len(predictions)


def semantic_accuracy(
    predictions: Sequence[str], references: Sequence[str], grammar: CnlGrammar
) -> float:
    """Fraction where both sides parse and are equal up to operand order.

    Anything unparseable counts as a mismatch, so on grammar-bound references
    this dominates exact-match accuracy.
    """
    _check_lists(predictions, references)
    hits = 0
    for prediction, reference in zip(predictions, references):
        try:
            a = cnl.parse_text(prediction, grammar)
            b = cnl.parse_text(reference, grammar)
        except (cnl.ParseError, cnl.UnterminatedQuote):
            continue
        if cnl.semantic_equal(a, b):
            hits += 1
    return hits / len(predictions)


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(predictions: Sequence[str], references: Sequence[str]) -> float:
    """Corpus-level BLEU, single reference per prediction."""
    _check_lists(predictions, references)
    pred_tokens = [p.split() for p in predictions]
    ref_tokens = [r.split() for r in references]

    log_precision_sum = 0.0
    for n in range(1, 5):
        matches = 0
        total = 0
        for pred, ref in zip(pred_tokens, ref_tokens):
            counts = _ngram_counts(pred, n)
            ref_counts = _ngram_counts(ref, n)
            matches += sum(min(c, ref_counts[g]) for g, c in counts.items())
            total += max(0, len(pred) - n + 1)
        if matches == 0:
            matches, total = matches + 1, total + 1
        log_precision_sum += 0.25 * math.log(matches / total)

    c = sum(len(t) for t in pred_tokens)
    r = sum(len(t) for t in ref_tokens)
    if c == 0:
        return 0.0
    brevity = 1.0 if c >= r else math.exp(1.0 - r / c)
    return brevity * math.exp(log_precision_sum)


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Longest common subsequence length, O(len(a) * len(b))."""
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for x in a:
        current = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[len(b)]


def rouge_l(predictions: Sequence[str], references: Sequence[str]) -> float:
    """Mean per-pair LCS F1; 0 for a pair when either side is empty."""
    _check_lists(predictions, references)
    total = 0.0
    for prediction, reference in zip(predictions, references):
        p_tokens = prediction.split()
        r_tokens = reference.split()
        if not p_tokens or not r_tokens:
            continue
        lcs = lcs_length(p_tokens, r_tokens)
        precision = lcs / len(p_tokens)
        recall = lcs / len(r_tokens)
        if precision + recall > 0:
            total += 2 * precision * recall / (precision + recall)
    return total / len(predictions)

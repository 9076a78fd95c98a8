"""Shared test scaffolding: deterministic scorers and a tiny overlap grammar."""

from __future__ import annotations

import math

from cnl_workbench.cnl import ActionSpec, CnlGrammar, Comparator, EffectSpec
from cnl_workbench.rng import Lcg, fold_tokens


class RandomScorer:
    """Pseudo-random but pure: the distribution is a function of (source, prefix)."""

    def __init__(self, vocab, seed: int):
        self.vocab = sorted(vocab)
        self.seed = seed

    def score_next(self, source, prefix):
        rng = Lcg(fold_tokens(self.seed, (source, "\x1d") + tuple(prefix)))
        weights = [rng.random() + 1e-9 for _ in range(len(self.vocab) + 1)]
        total = sum(weights)
        logps = {t: math.log(w / total) for t, w in zip(self.vocab, weights)}
        return logps, math.log(weights[-1] / total)


class PathScorer:
    """Probability 1 on the next token of a fixed path, end-of-sequence after it."""

    def __init__(self, path):
        self.path = tuple(path)

    def score_next(self, source, prefix):
        prefix = tuple(prefix)
        k = len(prefix)
        if prefix == self.path[:k] and k < len(self.path):
            return {self.path[k]: 0.0}, -math.inf
        return {}, 0.0


class BiasedScorer:
    """Puts nearly all mass on one token everywhere; the rest is spread uniformly."""

    def __init__(self, vocab, favourite: str, favour: float = 0.97):
        self.vocab = sorted(set(vocab) | {favourite})
        self.favourite = favourite
        self.favour = favour

    def score_next(self, source, prefix):
        rest = (1.0 - self.favour) / len(self.vocab)  # leftover incl. eos share
        logps = {
            t: math.log(self.favour if t == self.favourite else rest) for t in self.vocab
        }
        return logps, math.log(rest)


def overlap_grammar() -> CnlGrammar:
    """Small grammar whose action set has a strict prefix pair."""
    return CnlGrammar(
        subjects=("customer", "loan"),
        attributes={"customer": ("age",), "loan": ("amount",)},
        comparators=(
            Comparator("is greater than", "numeric", ">"),
            Comparator("equals", "numeric", "=="),
        ),
        actions=(
            ActionSpec("approve the loan", (EffectSpec("decision", value="approve"),)),
            ActionSpec("reject the loan", (EffectSpec("decision", value="reject"),)),
            ActionSpec(
                "reject the loan with message <STR>",
                (EffectSpec("decision", value="reject"), EffectSpec("message", arg=0)),
            ),
        ),
    )


def rich_grammar() -> CnlGrammar:
    """Grammar exercising all three literal kinds in clause position."""
    return CnlGrammar(
        subjects=("account",),
        attributes={"account": ("balance", "owner", "active")},
        comparators=(
            Comparator("is more than", "numeric", ">"),
            Comparator("equals", "numeric", "=="),
            Comparator("matches", "textual", "=="),
            Comparator("stays", "boolean", "=="),
        ),
        actions=(
            ActionSpec("approve the loan", (EffectSpec("decision", value="approve"),)),
            ActionSpec("reject the loan", (EffectSpec("decision", value="reject"),)),
        ),
    )

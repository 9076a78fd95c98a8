"""Built-in next-token scorers.

A scorer answers "given the source NL and the output prefix, what comes
next" as a log-probability map over its closed vocabulary plus an
end-of-sequence score. Exponentiated, each returned distribution sums to 1.
Scorers are pure: identical (source, prefix) pairs yield identical
distributions, so decodes are reproducible and parallel-safe.

Two implementations live here: an add-k smoothed n-gram over the corpus CNL
(source-blind, the desk-scale stand-in for a fine-tuned model) and a mixture
that blends the n-gram with continuation counts from the CNLs of the most
similar training pairs.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Callable, Protocol, Sequence

from .cnl import tokenize
from .prompting import TfidfIndex, ranked_ids
from .trie import EmptyCorpus

_BOS = "\x00<bos>"
_EOS = "\x00<eos>"


class Scorer(Protocol):
    def score_next(
        self, source: str, prefix: Sequence[str]
    ) -> tuple[dict[str, float], float]:
        """Return (token -> log-probability, end-of-sequence log-probability)."""
        ...


class NgramScorer:
    """Order-n add-k language model over tokenized CNL statements.

    P(t | ctx) = (c(ctx, t) + k) / (c(ctx) + k * V) with V the vocabulary
    size including end-of-sequence; an unseen context therefore scores
    uniformly. The NL source is ignored.
    """

    def __init__(self, statements: Sequence[str], order: int = 3, k: float = 0.1,
                 tokenizer: Callable[[str], list[str]] = tokenize):
        if not statements:
            raise EmptyCorpus("n-gram scorer needs at least one statement")
        if order < 1:
            raise ValueError("order must be >= 1")
        self.order = order
        self.k = k
        self._continuations: dict[tuple[str, ...], Counter] = {}
        vocab: set[str] = set()
        for statement in statements:
            tokens = tokenizer(statement)
            vocab.update(tokens)
            padded = [_BOS] * (order - 1) + tokens + [_EOS]
            for i in range(order - 1, len(padded)):
                ctx = tuple(padded[i - order + 1 : i])
                self._continuations.setdefault(ctx, Counter())[padded[i]] += 1
        self.vocabulary = frozenset(vocab)
        self._v = len(self.vocabulary) + 1  # + end-of-sequence

    def _context(self, prefix: Sequence[str]) -> tuple[str, ...]:
        padded = [_BOS] * (self.order - 1) + list(prefix)
        return tuple(padded[len(padded) - self.order + 1 :])

    def score_next(self, source: str, prefix: Sequence[str]) -> tuple[dict[str, float], float]:
        counts = self._continuations.get(self._context(prefix), Counter())
        total = sum(counts.values())
        denom = total + self.k * self._v
        logps = {
            token: math.log((counts.get(token, 0) + self.k) / denom)
            for token in self.vocabulary
        }
        eos = math.log((counts.get(_EOS, 0) + self.k) / denom)
        return logps, eos


def train_ngram(statements: Sequence[str], order: int = 3, k: float = 0.1,
                tokenizer: Callable[[str], list[str]] = tokenize) -> NgramScorer:
    return NgramScorer(statements, order=order, k=k, tokenizer=tokenizer)


class RetrievalMixtureScorer:
    """lambda * n-gram + (1 - lambda) * retrieval continuation counts.

    Retrieval pulls the top-k training pairs by NL similarity to the source,
    then distributes mass over the tokens that follow the current prefix in
    those pairs' CNLs (uniform over the vocabulary when none of them extends
    the prefix). lambda = 1 degenerates to the pure n-gram.
    """

    def __init__(self, corpus, ngram: NgramScorer, k: int = 5, lam: float = 0.5,
                 tokenizer: Callable[[str], list[str]] = tokenize):
        train = list(corpus.pairs_of("train"))
        if not train:
            raise EmptyCorpus("retrieval scorer needs a non-empty train split")
        if not 0.0 <= lam <= 1.0:
            raise ValueError("lambda must be in [0, 1]")
        self.k = k
        self.lam = lam
        self.ngram = ngram
        self._index = TfidfIndex([(p.id, p.nl) for p in train])
        self._cnl_tokens = {p.id: tuple(tokenizer(p.cnl)) for p in train}
        self._vocab = sorted(
            set(ngram.vocabulary) | {t for toks in self._cnl_tokens.values() for t in toks}
        )
        self._retrieved_cache: dict[str, list[tuple[str, ...]]] = {}

    def _retrieved(self, source: str) -> list[tuple[str, ...]]:
        hit = self._retrieved_cache.get(source)
        if hit is None:
            top = ranked_ids(self._index, source)[: self.k]
            hit = [self._cnl_tokens[pair_id] for pair_id in top]
            self._retrieved_cache[source] = hit
        return hit

    def score_next(self, source: str, prefix: Sequence[str]) -> tuple[dict[str, float], float]:
        prefix = tuple(prefix)
        counts: Counter = Counter()
        for tokens in self._retrieved(source):
            if tokens[: len(prefix)] == prefix:
                if len(tokens) > len(prefix):
                    counts[tokens[len(prefix)]] += 1
                else:
                    counts[_EOS] += 1
        support = len(self._vocab) + 1
        total = sum(counts.values())
        if total == 0:
            p_ret = {token: 1.0 / support for token in self._vocab}
            p_ret_eos = 1.0 / support
        else:
            p_ret = {token: counts.get(token, 0) / total for token in self._vocab}
            p_ret_eos = counts.get(_EOS, 0) / total

        ng_logps, ng_eos = self.ngram.score_next(source, prefix)
        out: dict[str, float] = {}
        for token in self._vocab:
            p_ng = math.exp(ng_logps[token]) if token in ng_logps else 0.0
            p = self.lam * p_ng + (1.0 - self.lam) * p_ret[token]
            out[token] = math.log(p) if p > 0.0 else -math.inf
        p_eos = self.lam * math.exp(ng_eos) + (1.0 - self.lam) * p_ret_eos
        return out, math.log(p_eos) if p_eos > 0.0 else -math.inf


def retrieval_mixture_scorer(corpus, k: int = 5, lam: float = 0.5,
                             ngram: NgramScorer | None = None,
                             tokenizer: Callable[[str], list[str]] = tokenize) -> RetrievalMixtureScorer:
    if ngram is None:
        ngram = train_ngram([p.cnl for p in corpus.pairs_of("train")], tokenizer=tokenizer)
    return RetrievalMixtureScorer(corpus, ngram, k=k, lam=lam, tokenizer=tokenizer)

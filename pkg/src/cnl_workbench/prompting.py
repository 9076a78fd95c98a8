"""Few-shot prompt assembly from the most similar training pairs.

Similarity is cosine over tf-idf vectors of lowercased word tokens, with the
smoothed idf ``ln((1 + N) / (1 + df)) + 1`` so no vector collapses to zero.
Pairs are appended most-similar-last (adjacent to the query) until the token
budget minus the reserved output span is exhausted.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

DEFAULT_PAIR_TEMPLATE = "NL: {nl}\nCNL: {cnl}\n\n"
DEFAULT_QUERY_TEMPLATE = "NL: {query}\nCNL:"


class BudgetTooSmall(ValueError):
    pass


def word_tokens(text: str) -> list[str]:
    return text.lower().split()


def count_tokens(text: str) -> int:
    return len(text.split())


@dataclass(frozen=True)
class PromptConfig:
    context_budget: int = 512
    reserved_output: int = 64
    pair_template: str = DEFAULT_PAIR_TEMPLATE
    query_template: str = DEFAULT_QUERY_TEMPLATE
    separator: str = ""
    token_counter: Callable[[str], int] = count_tokens

    def __post_init__(self):
        if self.reserved_output >= self.context_budget:
            raise BudgetTooSmall(
                f"reserved_output {self.reserved_output} >= context_budget {self.context_budget}"
            )


@dataclass(frozen=True)
class Prompt:
    text: str
    pair_ids: tuple[str, ...]  # most similar first
    token_count: int


class TfidfIndex:
    """Frozen tf-idf index over the train-split NL texts of a corpus."""

    def __init__(self, documents: Sequence[tuple[str, str]]):
        """``documents``: (pair id, NL text), in corpus insertion order."""
        self.ids = [doc_id for doc_id, _ in documents]
        token_lists = [word_tokens(text) for _, text in documents]
        df: Counter = Counter()
        for tokens in token_lists:
            df.update(set(tokens))
        n_docs = len(token_lists)
        self._idf = {
            term: math.log((1 + n_docs) / (1 + count)) + 1.0 for term, count in df.items()
        }
        self._default_idf = math.log(1 + n_docs) + 1.0  # unseen term, df = 0
        self._vectors = [self._vectorize(tokens) for tokens in token_lists]

    def _vectorize(self, tokens: Sequence[str]) -> dict[str, float]:
        counts = Counter(tokens)
        vec = {
            term: tf * self._idf.get(term, self._default_idf) for term, tf in counts.items()
        }
        norm = math.sqrt(sum(w * w for w in vec.values()))
        if norm > 0:
            vec = {term: w / norm for term, w in vec.items()}
        return vec

    def similarities(self, query: str) -> list[float]:
        qvec = self._vectorize(word_tokens(query))
        out = []
        for dvec in self._vectors:
            small, large = (qvec, dvec) if len(qvec) <= len(dvec) else (dvec, qvec)
            out.append(sum(w * large.get(term, 0.0) for term, w in small.items()))
        return out


def rank_by_similarity(query_nl: str, corpus, split: str = "train") -> list[str]:
    """Pair ids of ``split``, descending tf-idf cosine to ``query_nl``.

    Ties keep corpus insertion order. The index is rebuilt per call; callers
    on a hot path should hold a :class:`TfidfIndex` via ``ranked_pairs``.
    """
    documents = [(pair.id, pair.nl) for pair in corpus.pairs_of(split)]
    if not documents:
        raise ValueError(f"corpus has no pairs in split {split!r}")
    index = TfidfIndex(documents)
    return ranked_ids(index, query_nl)


def ranked_ids(index: TfidfIndex, query_nl: str) -> list[str]:
    sims = index.similarities(query_nl)
    order = sorted(range(len(sims)), key=lambda i: (-sims[i], i))
    return [index.ids[i] for i in order]


def build_prompt(query_nl: str, corpus, config: Optional[PromptConfig] = None) -> Prompt:
    """Budgeted few-shot prompt for ``query_nl`` over the train split.

    Ranked pairs are admitted while the rendered prompt stays within
    ``context_budget - reserved_output``; admission stops at the first pair
    that does not fit. The most similar admitted pair sits closest to the
    query.
    """
    config = config or PromptConfig()
    limit = config.context_budget - config.reserved_output
    query_text = config.query_template.format(query=query_nl)
    if config.token_counter(query_text) > limit:
        raise BudgetTooSmall("query alone exceeds the prompt budget")

    ranked = rank_by_similarity(query_nl, corpus)
    by_id = {pair.id: pair for pair in corpus.pairs_of("train")}
    admitted: list[str] = []
    rendered: list[str] = []
    for pair_id in ranked:
        pair = by_id[pair_id]
        candidate = config.pair_template.format(nl=pair.nl, cnl=pair.cnl)
        # Most similar closest to the query: new, less similar pairs go in front.
        trial_parts = list(reversed(rendered + [candidate])) + [query_text]
        trial = config.separator.join(trial_parts)
        if config.token_counter(trial) > limit:
            break
        rendered.append(candidate)
        admitted.append(pair_id)

    text = config.separator.join(list(reversed(rendered)) + [query_text])
    return Prompt(text=text, pair_ids=tuple(admitted), token_count=config.token_counter(text))

"""Prefix tree over tokenized CNL statements.

The trie is the decoding constraint: ``allowed_next`` answers "which tokens
may legally follow this prefix", and a terminal flag marks complete
statements. Under the abstract-literals policy, numerals and quoted strings
are replaced by the marker tokens ``<NUM>`` / ``<STR>`` before insertion, so
one path stands for every literal instantiation of a statement.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence

from .cnl import NUM_MARKER, STR_MARKER, is_number_token, is_quoted_token, tokenize

# Placeholders emitted by the decoder when a marker has no candidate literal
# in the source; they walk the trie like their marker but never parse.
NUM_MISSING = "<NUM-missing>"
STR_MISSING = "<STR-missing>"


class MarkerPolicy(str, Enum):
    NONE = "none"
    ABSTRACT_LITERALS = "abstract-literals"


@dataclass(frozen=True)
class MarkerToken:
    kind: str  # "NUM" | "STR"

    @property
    def text(self) -> str:
        return NUM_MARKER if self.kind == "NUM" else STR_MARKER


def marker_for(token: str) -> Optional[str]:
    """Marker text standing for ``token``, or None for fixed-vocabulary words."""
    if token == NUM_MARKER or token == NUM_MISSING or is_number_token(token):
        return NUM_MARKER
    if token == STR_MARKER or token == STR_MISSING or is_quoted_token(token):
        return STR_MARKER
    return None


class EmptyCorpus(ValueError):
    pass


class _Node:
    __slots__ = ("children", "terminal")

    def __init__(self):
        self.children: dict[str, _Node] = {}
        self.terminal = False


class TokenTrie:
    """Built once from statements, frozen thereafter; reads are lock-free."""

    def __init__(self, policy: MarkerPolicy = MarkerPolicy.NONE):
        self.policy = policy
        self._root = _Node()
        self.vocabulary: set[str] = set()
        self._statement_count = 0

    def _abstract(self, tokens: Sequence[str]) -> list[str]:
        if self.policy is not MarkerPolicy.ABSTRACT_LITERALS:
            return list(tokens)
        return [marker_for(t) or t for t in tokens]

    def insert(self, tokens: Sequence[str]) -> None:
        node = self._root
        for token in self._abstract(tokens):
            child = node.children.get(token)
            if child is None:
                child = _Node()
                node.children[token] = child
                self.vocabulary.add(token)
            node = child
        if not node.terminal:
            node.terminal = True
            self._statement_count += 1

    def _walk(self, prefix: Sequence[str]) -> Optional[_Node]:
        node = self._root
        for token in self._abstract(prefix):
            node = node.children.get(token)
            if node is None:
                return None
        return node

    def allowed_next(self, prefix: Sequence[str]) -> tuple[frozenset[str], bool]:
        """Edge labels leaving the node reached by ``prefix``, plus terminal flag.

        An off-trie prefix yields ``(frozenset(), False)``, not an error.
        """
        node = self._walk(prefix)
        if node is None:
            return frozenset(), False
        return frozenset(node.children), node.terminal

    def accepts(self, sequence: Sequence[str]) -> bool:
        """True iff ``sequence`` is a complete inserted statement.

        Under abstract-literals, concrete numerals and quoted tokens in the
        query match their marker edges.
        """
        node = self._walk(sequence)
        return node is not None and node.terminal

    def __len__(self) -> int:
        return self._statement_count

    def iter_statements(self) -> Iterable[tuple[str, ...]]:
        """All inserted statements, in canonical (sorted-edge) order."""

        def rec(node: _Node, path: tuple[str, ...]) -> Iterable[tuple[str, ...]]:
            if node.terminal:
                yield path
            for token in sorted(node.children):
                yield from rec(node.children[token], path + (token,))

        yield from rec(self._root, ())

    def structure(self):
        """Canonical nested form (sorted children); equal for permuted builds."""

        def rec(node: _Node):
            return (node.terminal, tuple((t, rec(c)) for t, c in sorted(node.children.items())))

        return rec(self._root)


def build_trie(
    statements: Sequence[str],
    policy: MarkerPolicy = MarkerPolicy.NONE,
    tokenizer: Callable[[str], list[str]] = tokenize,
) -> TokenTrie:
    """Trie with one root path per distinct tokenized statement.

    ``tokenizer`` is a seam: word tokenization by default, substitutable by
    a subword tokenizer without touching the trie.
    """
    if not statements:
        raise EmptyCorpus("cannot build a trie from zero statements")
    trie = TokenTrie(policy)
    for statement in statements:
        trie.insert(tokenizer(statement))
    return trie


def save_statements(statements: Sequence[str], path: str, tokenizer=tokenize) -> None:
    """Persisted trie form: one tokenized statement per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for statement in statements:
            fh.write(" ".join(tokenizer(statement)))
            fh.write("\n")


def load_trie(path: str, policy: MarkerPolicy = MarkerPolicy.NONE) -> TokenTrie:
    """Rebuild a trie from its line-per-statement persisted form."""
    with open(path, "r", encoding="utf-8") as fh:
        statements = [line.rstrip("\n") for line in fh if line.strip()]
    return build_trie(statements, policy)

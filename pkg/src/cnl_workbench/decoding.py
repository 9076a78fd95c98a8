"""Beam-search decoding over a pluggable scorer, optionally trie-masked.

In constrained mode every expansion step intersects the scorer's support
with the trie's allowed continuations, renormalizes over that set (uniform
fallback when the scorer puts zero mass there), and only finishes a
hypothesis where the trie marks end-of-sequence. Finished constrained
hypotheses are therefore always complete trie statements.

Marker expansion closes the unseen-literal gap: when the trie offers a
``<NUM>`` / ``<STR>`` edge and literal expansion is on, the marker is
replaced by one branch per literal of that kind extracted from the source
NL, scored uniformly across the branches.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from typing import Optional

from .cnl import CnlGrammar, NUM_MARKER, STR_MARKER, ParseError, parse
from .scorers import Scorer
from .trie import MarkerToken, NUM_MISSING, STR_MISSING, TokenTrie

_NUMBER_SPAN = re.compile(r"\d+(?:\.\d+)?")
_QUOTED_SPAN = re.compile(r'"[^"]*"')


class NoCandidates(ValueError):
    pass


@dataclass(frozen=True)
class BeamConfig:
    """Decode settings; the width default follows the four-beam protocol."""

    beam_width: int = 4
    max_length: int = 64
    constrained: bool = True
    trie_scope: str = "train"  # "train" | "combined"; recorded in eval reports
    literal_expansion: bool = False
    renormalize: bool = True
    missing_literal_penalty: float = -20.0

    def __post_init__(self):
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.max_length < 1:
            raise ValueError("max_length must be >= 1")


@dataclass(frozen=True)
class Hypothesis:
    tokens: tuple[str, ...]
    logprob: float  # cumulative, sum of per-step scores
    finished: bool
    missing_literal: bool = False

    @property
    def normalized_score(self) -> float:
        return self.logprob / max(1, len(self.tokens))

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class Candidate:
    hypothesis: Hypothesis
    valid: bool
    parse_error: Optional[str] = None

    @property
    def text(self) -> str:
        return self.hypothesis.text

    @property
    def score(self) -> float:
        return self.hypothesis.normalized_score


@dataclass(frozen=True)
class DecodeResult:
    candidates: tuple[Candidate, ...]  # best first
    constraint_exhausted: bool = False
    max_length_exceeded: bool = False

    @property
    def best(self) -> Optional[Candidate]:
        return self.candidates[0] if self.candidates else None


def expand_marker(source: str, marker: MarkerToken) -> list[str]:
    """Literal token texts of the marker's kind found in the source NL.

    Ordered by appearance, de-duplicated keeping the first occurrence;
    string literals keep their quotes. Raises :class:`NoCandidates` when the
    source holds nothing of that kind.
    """
    pattern = _NUMBER_SPAN if marker.kind == "NUM" else _QUOTED_SPAN
    seen: list[str] = []
    for m in pattern.finditer(source):
        text = m.group(0)
        if text not in seen:
            seen.append(text)
    if not seen:
        raise NoCandidates(f"source contains no {marker.kind} literal")
    return seen


def _rank_key(hyp: Hypothesis):
    # Descending normalized score; ties by token text, then shorter first.
    return (-hyp.normalized_score, hyp.tokens, len(hyp.tokens))


def _search_key(item: Hypothesis):
    return (-item.logprob, item.tokens)


def beam_decode(
    source: str,
    scorer: Scorer,
    trie: Optional[TokenTrie] = None,
    config: Optional[BeamConfig] = None,
    grammar: Optional[CnlGrammar] = None,
) -> DecodeResult:
    """Beam search for the CNL translation of ``source``.

    The returned candidates are ranked by length-normalized cumulative
    log-probability; each carries a validity flag (a grammar parse when a
    grammar is supplied, trie acceptance otherwise). Dead-ended constrained
    searches set ``constraint_exhausted`` and still return the best partial
    hypotheses.
    """
    config = config or BeamConfig()
    if config.constrained and trie is None:
        raise ValueError("constrained decoding requires a trie")

    active: list[Hypothesis] = [Hypothesis(tokens=(), logprob=0.0, finished=False)]
    finished: dict[tuple[str, ...], Hypothesis] = {}
    exhausted = False

    for _ in range(config.max_length):
        extensions: list[Hypothesis] = []
        any_continuation = False
        for hyp in active:
            token_logps, eos_logp = scorer.score_next(source, hyp.tokens)
            if config.constrained:
                steps = _constrained_steps(hyp, token_logps, eos_logp, trie, source, config)
            else:
                steps = _unconstrained_steps(hyp, token_logps, eos_logp)
            if steps:
                any_continuation = True
            for nxt in steps:
                if nxt.finished:
                    prev = finished.get(nxt.tokens)
                    if prev is None or nxt.logprob > prev.logprob:
                        finished[nxt.tokens] = nxt
                else:
                    extensions.append(nxt)
        if config.constrained and active and not any_continuation:
            exhausted = True
            break
        extensions.sort(key=_search_key)
        # Dedup identical token sequences, keeping the best-scored survivor.
        seen: set[tuple[str, ...]] = set()
        active = []
        for hyp in extensions:
            if hyp.tokens not in seen:
                seen.add(hyp.tokens)
                active.append(hyp)
            if len(active) == config.beam_width:
                break
        if not active:
            break

    length_exceeded = bool(active) and not exhausted

    # Complete hypotheses first; partial debris (max length or exhaustion)
    # trails, each group ranked by length-normalized score.
    ranked = sorted(finished.values(), key=_rank_key) + sorted(active, key=_rank_key)
    candidates = tuple(_judge(h, trie, grammar) for h in ranked)
    return DecodeResult(
        candidates=candidates,
        constraint_exhausted=exhausted,
        max_length_exceeded=length_exceeded,
    )


def _constrained_steps(
    hyp: Hypothesis,
    token_logps: dict[str, float],
    eos_logp: float,
    trie: TokenTrie,
    source: str,
    config: BeamConfig,
) -> list[Hypothesis]:
    allowed, eos_ok = trie.allowed_next(hyp.tokens)
    if not allowed and not eos_ok:
        return []
    options = sorted(allowed)
    masses = [math.exp(token_logps[t]) if t in token_logps else 0.0 for t in options]
    eos_mass = math.exp(eos_logp) if eos_ok else 0.0
    total = sum(masses) + eos_mass
    if config.renormalize:
        if total > 0.0:
            step_logps = [math.log(m / total) if m > 0.0 else -math.inf for m in masses]
            eos_step = math.log(eos_mass / total) if eos_mass > 0.0 else -math.inf
        else:
            uniform = -math.log(len(options) + (1 if eos_ok else 0))
            step_logps = [uniform] * len(options)
            eos_step = uniform if eos_ok else -math.inf
    else:
        # Mask-only mode: keep raw scorer scores, uniform fallback unchanged.
        if total > 0.0:
            step_logps = [math.log(m) if m > 0.0 else -math.inf for m in masses]
            eos_step = math.log(eos_mass) if eos_mass > 0.0 else -math.inf
        else:
            uniform = -math.log(len(options) + (1 if eos_ok else 0))
            step_logps = [uniform] * len(options)
            eos_step = uniform if eos_ok else -math.inf

    out: list[Hypothesis] = []
    for token, step in zip(options, step_logps):
        assert token in allowed  # mask containment
        if config.literal_expansion and token in (NUM_MARKER, STR_MARKER):
            out.extend(_marker_branches(hyp, token, source, config))
            continue
        if step == -math.inf:
            continue
        out.append(
            Hypothesis(tokens=hyp.tokens + (token,), logprob=hyp.logprob + step,
                       finished=False, missing_literal=hyp.missing_literal)
        )
    if eos_ok and eos_step != -math.inf:
        out.append(replace(hyp, logprob=hyp.logprob + eos_step, finished=True))
    return out


def _marker_branches(hyp: Hypothesis, marker_text: str, source: str,
                     config: BeamConfig) -> list[Hypothesis]:
    marker = MarkerToken("NUM" if marker_text == NUM_MARKER else "STR")
    try:
        literals = expand_marker(source, marker)
    except NoCandidates:
        placeholder = NUM_MISSING if marker.kind == "NUM" else STR_MISSING
        return [
            Hypothesis(tokens=hyp.tokens + (placeholder,),
                       logprob=hyp.logprob + config.missing_literal_penalty,
                       finished=False, missing_literal=True)
        ]
    step = -math.log(len(literals))
    return [
        Hypothesis(tokens=hyp.tokens + (lit,), logprob=hyp.logprob + step,
                   finished=False, missing_literal=hyp.missing_literal)
        for lit in literals
    ]


def _unconstrained_steps(
    hyp: Hypothesis, token_logps: dict[str, float], eos_logp: float
) -> list[Hypothesis]:
    out = [
        Hypothesis(tokens=hyp.tokens + (token,), logprob=hyp.logprob + logp, finished=False,
                   missing_literal=hyp.missing_literal)
        for token, logp in sorted(token_logps.items())
        if logp != -math.inf
    ]
    if eos_logp != -math.inf:
        out.append(replace(hyp, logprob=hyp.logprob + eos_logp, finished=True))
    return out


def _judge(hyp: Hypothesis, trie: Optional[TokenTrie], grammar: Optional[CnlGrammar]) -> Candidate:
    if hyp.missing_literal:
        return Candidate(hyp, valid=False, parse_error="unfilled literal marker")
    if grammar is not None:
        try:
            parse(list(hyp.tokens), grammar)
            return Candidate(hyp, valid=True)
        except ParseError as exc:
            return Candidate(hyp, valid=False, parse_error=str(exc))
    if trie is not None:
        return Candidate(hyp, valid=trie.accepts(hyp.tokens) if hyp.finished else False)
    return Candidate(hyp, valid=hyp.finished)

"""Independent brute-force oracles.

Everything here deliberately avoids the implementation paths it is used to
check: n-grams are counted with list scans instead of Counters, LCS is found
by enumerating subsequences, and the condition interpreter walks the CNL AST
directly without transpiling.
"""

from __future__ import annotations

import math
from decimal import Decimal
from itertools import combinations

from cnl_workbench.cnl import And, Clause, CnlAst, Or


def ngrams_list(tokens: list[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def bleu_brute(predictions: list[str], references: list[str]) -> float:
    pred_tok = [p.split() for p in predictions]
    ref_tok = [r.split() for r in references]
    log_sum = 0.0
    for n in range(1, 5):
        matches = 0
        total = 0
        for pred, ref in zip(pred_tok, ref_tok):
            pred_ngrams = ngrams_list(pred, n)
            ref_ngrams = ngrams_list(ref, n)
            total += len(pred_ngrams)
            for gram in set(pred_ngrams):
                matches += min(pred_ngrams.count(gram), ref_ngrams.count(gram))
        if matches == 0:
            matches += 1
            total += 1
        log_sum += 0.25 * math.log(matches / total)
    c = sum(len(t) for t in pred_tok)
    r = sum(len(t) for t in ref_tok)
    if c == 0:
        return 0.0
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)
    return bp * math.exp(log_sum)


def is_subsequence(needle: tuple, haystack: list) -> bool:
    it = iter(haystack)
    return all(any(x == y for y in it) for x in needle)


def lcs_brute(a: list[str], b: list[str]) -> int:
    """Max length over all subsequences of ``a`` also subsequences of ``b``."""
    for length in range(len(a), 0, -1):
        for positions in combinations(range(len(a)), length):
            candidate = tuple(a[i] for i in positions)
            if is_subsequence(candidate, b):
                return length
    return 0


def rouge_l_brute(predictions: list[str], references: list[str]) -> float:
    total = 0.0
    for prediction, reference in zip(predictions, references):
        p = prediction.split()
        r = reference.split()
        if not p or not r:
            continue
        lcs = lcs_brute(p, r)
        prec = lcs / len(p)
        rec = lcs / len(r)
        if prec + rec > 0:
            total += 2 * prec * rec / (prec + rec)
    return total / len(predictions)


def interpret_condition(ast: CnlAst, record: dict) -> bool:
    """Direct AST evaluation over a record; never touches the rule program."""

    def clause_holds(clause: Clause) -> bool:
        key = clause.subject + "." + clause.attribute.replace(" ", "_")
        if key not in record:
            return False
        actual = record[key]
        expected = clause.literal.value
        if isinstance(expected, Decimal):
            if isinstance(actual, bool) or not isinstance(actual, (int, float, Decimal)):
                raise TypeError(f"{key}: numeric comparison against {actual!r}")
            if isinstance(actual, float):
                actual = Decimal(str(actual))
        elif isinstance(expected, bool):
            if not isinstance(actual, bool):
                raise TypeError(f"{key}: boolean comparison against {actual!r}")
        else:
            if not isinstance(actual, str):
                raise TypeError(f"{key}: string comparison against {actual!r}")
        table = {
            "is greater than": lambda x, y: x > y,
            "is more than": lambda x, y: x > y,
            "is less than": lambda x, y: x < y,
            "is at least": lambda x, y: x >= y,
            "is at most": lambda x, y: x <= y,
            "equals": lambda x, y: x == y,
        }
        return table[clause.comparator](actual, expected)

    def walk(node) -> bool:
        if isinstance(node, Clause):
            return clause_holds(node)
        if isinstance(node, And):
            return walk(node.left) and walk(node.right)
        if isinstance(node, Or):
            return walk(node.left) or walk(node.right)
        raise TypeError(node)

    return walk(ast.condition)


def tfidf_cosine_brute(query: str, documents: list[str]) -> list[float]:
    """Cosine over tf * (ln((1+N)/(1+df)) + 1) weighted word counts."""
    doc_tokens = [d.lower().split() for d in documents]
    n = len(doc_tokens)
    vocabulary = sorted({t for toks in doc_tokens for t in toks} | set(query.lower().split()))
    df = {term: sum(1 for toks in doc_tokens if term in toks) for term in vocabulary}
    idf = {term: math.log((1 + n) / (1 + df[term])) + 1.0 for term in vocabulary}

    def vector(tokens: list[str]) -> list[float]:
        weights = [tokens.count(term) * idf[term] for term in vocabulary]
        norm = math.sqrt(sum(w * w for w in weights))
        return [w / norm for w in weights] if norm else weights

    qv = vector(query.lower().split())
    return [sum(a * b for a, b in zip(qv, vector(toks))) for toks in doc_tokens]


def statement_raw_score(scorer, source: str, tokens: list[str]) -> float:
    """Sum of the scorer's log-probabilities along a statement, plus eos."""
    total = 0.0
    for i, token in enumerate(tokens):
        logps, _ = scorer.score_next(source, tuple(tokens[:i]))
        total += logps.get(token, -math.inf)
    _, eos = scorer.score_next(source, tuple(tokens))
    return total + eos


def statement_renormalized_score(scorer, trie, source: str, tokens: list[str]) -> float:
    """Statement score under per-step renormalization over the trie's allowed set."""
    total = 0.0
    for i, token in enumerate(tokens):
        prefix = tuple(tokens[:i])
        logps, eos_logp = scorer.score_next(source, prefix)
        allowed, eos_ok = trie.allowed_next(prefix)
        mass = sum(math.exp(logps[t]) for t in allowed if t in logps)
        if eos_ok:
            mass += math.exp(eos_logp)
        if mass > 0.0:
            p = math.exp(logps.get(token, -math.inf)) / mass
            total += math.log(p) if p > 0 else -math.inf
        else:
            total += -math.log(len(allowed) + (1 if eos_ok else 0))
    prefix = tuple(tokens)
    logps, eos_logp = scorer.score_next(source, prefix)
    allowed, eos_ok = trie.allowed_next(prefix)
    assert eos_ok
    mass = sum(math.exp(logps[t]) for t in allowed if t in logps) + math.exp(eos_logp)
    if mass > 0.0:
        p = math.exp(eos_logp) / mass
        total += math.log(p) if p > 0 else -math.inf
    else:
        total += -math.log(len(allowed) + 1)
    return total

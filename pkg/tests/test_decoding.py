import json
import math
from dataclasses import asdict

import pytest

from cnl_workbench import cnl
from cnl_workbench.decoding import (
    BeamConfig,
    NoCandidates,
    beam_decode,
    expand_marker,
)
from cnl_workbench.rng import Lcg
from cnl_workbench.scorers import train_ngram
from cnl_workbench.trie import MarkerPolicy, MarkerToken, build_trie

from helpers import BiasedScorer, PathScorer, RandomScorer
from oracles import statement_raw_score, statement_renormalized_score


def test_deterministic_scorer_follows_single_path():
    trie = build_trie(["a b c"])
    result = beam_decode("src", PathScorer(["a", "b", "c"]), trie, BeamConfig(beam_width=1))
    best = result.best
    assert best.hypothesis.tokens == ("a", "b", "c")
    assert best.hypothesis.finished
    assert not result.constraint_exhausted


def test_mask_removes_off_trie_token():
    trie = build_trie(["a b"])
    scorer = BiasedScorer({"a", "b", "z"}, favourite="z")
    result = beam_decode("src", scorer, trie, BeamConfig(beam_width=2))
    assert result.best.hypothesis.tokens == ("a", "b")
    assert all("z" not in c.hypothesis.tokens for c in result.candidates)


def test_unconstrained_follows_scorer():
    scorer = PathScorer(["x", "y"])
    result = beam_decode("src", scorer, None, BeamConfig(beam_width=1, constrained=False))
    assert result.best.hypothesis.tokens == ("x", "y")


def test_constrained_requires_trie():
    with pytest.raises(ValueError):
        beam_decode("src", PathScorer(["a"]), None, BeamConfig(constrained=True))


def test_beam_config_invariants():
    with pytest.raises(ValueError):
        BeamConfig(beam_width=0)
    with pytest.raises(ValueError):
        BeamConfig(max_length=0)
    assert BeamConfig().beam_width == 4


def statements_fixture(n: int, seed: int) -> list[str]:
    rng = Lcg(seed)
    words = ["a", "b", "c"]
    out: list[str] = []
    while len(out) < n:
        stmt = " ".join(rng.choice(words) for _ in range(rng.randint(1, 5)))
        if stmt not in out:
            out.append(stmt)
    return out


@pytest.mark.parametrize("renormalize", [True, False])
@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_small_instance_optimality(renormalize, seed):
    # Beam wide enough to hold every statement: the result must equal the
    # argmax over all trie statements of length-normalized statement score,
    # computed here by exhaustive enumeration.
    statements = statements_fixture(10, 100 + seed)
    trie = build_trie(statements)
    scorer = RandomScorer(trie.vocabulary, seed)
    config = BeamConfig(beam_width=64, max_length=10, renormalize=renormalize)
    result = beam_decode("src", scorer, trie, config)

    def oracle_score(stmt: str) -> float:
        tokens = stmt.split()
        if renormalize:
            total = statement_renormalized_score(scorer, trie, "src", tokens)
        else:
            total = statement_raw_score(scorer, "src", tokens)
        return total / max(1, len(tokens))

    best_stmt = max(statements, key=lambda s: (oracle_score(s), [s.split()]))
    expected = max(oracle_score(s) for s in statements)
    assert math.isclose(result.best.score, expected, rel_tol=1e-9)
    assert result.best.hypothesis.tokens == tuple(best_stmt.split())


def test_monotone_beam_widths():
    statements = ["a b c", "a b d", "a c", "b a d c", "b b", "c a b d e"]
    trie = build_trie(statements)
    for seed in range(10):
        scorer = RandomScorer(trie.vocabulary, seed)
        previous = -math.inf
        for width in range(1, 9):
            result = beam_decode("s", scorer, trie, BeamConfig(beam_width=width, max_length=10))
            best = next(c for c in result.candidates if c.hypothesis.finished)
            assert best.score >= previous - 1e-12
            previous = best.score


def test_candidates_ranked_descending():
    statements = statements_fixture(12, 9)
    trie = build_trie(statements)
    result = beam_decode("s", RandomScorer(trie.vocabulary, 5), trie,
                         BeamConfig(beam_width=8, max_length=10))
    finished = [c for c in result.candidates if c.hypothesis.finished]
    scores = [c.score for c in finished]
    assert scores == sorted(scores, reverse=True)


def test_decode_deterministic_byte_identical(small_corpus, grammar):
    trie = build_trie(small_corpus.statements("train"))
    scorer = train_ngram([p.cnl for p in small_corpus.pairs_of("train")])
    pair = small_corpus.pairs_of("test")[0]
    one = beam_decode(pair.nl, scorer, trie, BeamConfig(), grammar)
    two = beam_decode(pair.nl, scorer, trie, BeamConfig(), grammar)
    assert one == two
    assert json.dumps(asdict(one)) == json.dumps(asdict(two))


def test_constrained_outputs_always_parse(grammar):
    rng = Lcg(21)
    statements = sorted({
        cnl.serialize(cnl.sample_ast(grammar, rng), grammar) for _ in range(60)
    })
    trie = build_trie(statements)
    for seed in range(200):
        scorer = RandomScorer(trie.vocabulary, seed)
        result = beam_decode(f"src {seed}", scorer, trie, BeamConfig(beam_width=2, max_length=40))
        assert not result.constraint_exhausted
        finished = [c for c in result.candidates if c.hypothesis.finished]
        assert finished
        for candidate in finished:
            cnl.parse(list(candidate.hypothesis.tokens), grammar)
            assert candidate.valid


def test_unconstrained_validity_flag_via_grammar(grammar, small_corpus):
    scorer = train_ngram([p.cnl for p in small_corpus.pairs_of("train")])
    result = beam_decode(
        "anything", scorer, None,
        BeamConfig(beam_width=2, max_length=30, constrained=False), grammar,
    )
    for candidate in result.candidates:
        try:
            cnl.parse(list(candidate.hypothesis.tokens), grammar)
            parses = True
        except cnl.ParseError:
            parses = False
        assert candidate.valid == parses


# ---------------------------------------------------------------------------
# marker expansion


def test_expand_marker_numbers_in_order():
    assert expand_marker("age over 18 and score over 600", MarkerToken("NUM")) == ["18", "600"]


def test_expand_marker_no_digits():
    with pytest.raises(NoCandidates):
        expand_marker("reject old loans", MarkerToken("NUM"))


def test_expand_marker_quoted_string():
    assert expand_marker('send message "hello" now', MarkerToken("STR")) == ['"hello"']


def test_expand_marker_dedupes_keeping_order():
    assert expand_marker("18 then 600 then 18", MarkerToken("NUM")) == ["18", "600"]


def test_expand_marker_decimals():
    assert expand_marker("rate should be 3.5 percent", MarkerToken("NUM")) == ["3.5"]


def test_literal_expansion_fills_markers_from_source(grammar):
    statements = [
        "if customer age is greater than 18 then approve the loan",
        "if customer age is greater than 18 then reject the loan",
    ]
    trie = build_trie(statements, MarkerPolicy.ABSTRACT_LITERALS)
    scorer = train_ngram(statements)
    config = BeamConfig(beam_width=4, max_length=20, literal_expansion=True)
    result = beam_decode("approve anyone older than 25", scorer, trie, config, grammar)
    best = result.best
    assert "25" in best.hypothesis.tokens
    assert best.valid
    cnl.parse(list(best.hypothesis.tokens), grammar)


def test_literal_expansion_branches_over_all_candidates(grammar):
    statements = ["if customer age is greater than 18 then approve the loan"]
    trie = build_trie(statements, MarkerPolicy.ABSTRACT_LITERALS)
    scorer = train_ngram(statements)
    config = BeamConfig(beam_width=8, max_length=20, literal_expansion=True)
    result = beam_decode("maybe 21 or maybe 30", scorer, trie, config, grammar)
    finished_literals = {
        c.hypothesis.tokens[6] for c in result.candidates if c.hypothesis.finished
    }
    assert finished_literals == {"21", "30"}


def test_missing_literal_placeholder_is_flagged_invalid(grammar):
    statements = ["if customer age is greater than 18 then approve the loan"]
    trie = build_trie(statements, MarkerPolicy.ABSTRACT_LITERALS)
    scorer = train_ngram(statements)
    config = BeamConfig(beam_width=2, max_length=20, literal_expansion=True)
    result = beam_decode("no digits anywhere", scorer, trie, config, grammar)
    best = result.best
    assert "<NUM-missing>" in best.hypothesis.tokens
    assert best.hypothesis.missing_literal
    assert not best.valid
    # penalty applied once per missing marker
    assert best.hypothesis.logprob < BeamConfig().missing_literal_penalty / 2


def test_without_expansion_markers_surface_and_fail_validation(grammar):
    statements = ["if customer age is greater than 18 then approve the loan"]
    trie = build_trie(statements, MarkerPolicy.ABSTRACT_LITERALS)
    scorer = train_ngram(statements)
    result = beam_decode("age over 25", scorer, trie,
                         BeamConfig(beam_width=2, max_length=20), grammar)
    best = result.best
    assert "<NUM>" in best.hypothesis.tokens
    assert not best.valid

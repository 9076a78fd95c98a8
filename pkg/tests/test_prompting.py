import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cnl_workbench.corpus import NlCnlPair, PairCorpus
from cnl_workbench.prompting import (
    BudgetTooSmall,
    PromptConfig,
    build_prompt,
    count_tokens,
    rank_by_similarity,
)

from oracles import tfidf_cosine_brute


def make_corpus(nl_texts, cnl_texts=None):
    cnl_texts = cnl_texts or [f"cnl {i}" for i in range(len(nl_texts))]
    return PairCorpus(
        pairs=tuple(
            NlCnlPair(id=f"{i:06d}", nl=nl, cnl=c, split="train")
            for i, (nl, c) in enumerate(zip(nl_texts, cnl_texts))
        )
    )


def test_identical_query_ranks_first_with_similarity_one():
    corpus = make_corpus(["approve young customers", "reject big loans", "other words here"])
    ranked = rank_by_similarity("approve young customers", corpus)
    assert ranked[0] == "000000"
    sims = tfidf_cosine_brute(
        "approve young customers", [p.nl for p in corpus.pairs_of("train")]
    )
    assert math.isclose(sims[0], 1.0, rel_tol=1e-12)


def test_zero_overlap_query_scores_zero():
    corpus = make_corpus(["alpha beta", "gamma delta"])
    sims = tfidf_cosine_brute("omega psi", ["alpha beta", "gamma delta"])
    assert sims == [0.0, 0.0]
    # ties at zero keep insertion order
    assert rank_by_similarity("omega psi", corpus) == ["000000", "000001"]


def test_ranking_matches_brute_force_cosine():
    docs = [
        "approve the loan when income is high",
        "reject when the credit score is low",
        "income and credit both matter for the loan",
    ]
    corpus = make_corpus(docs)
    query = "what happens when income is low"
    sims = tfidf_cosine_brute(query, docs)
    expected = [f"{i:06d}" for i in sorted(range(len(docs)), key=lambda i: (-sims[i], i))]
    assert rank_by_similarity(query, corpus) == expected


def test_case_insensitive_ranking():
    corpus = make_corpus(["Approve Young Customers", "reject big loans"])
    assert rank_by_similarity("APPROVE young CUSTOMERS", corpus)[0] == "000000"


def test_build_prompt_admits_exactly_one_pair():
    corpus = make_corpus(["aa bb", "cc dd"], ["x y", "z w"])
    # rendered pair = "NL: aa bb\nCNL: x y\n\n" -> 6 tokens; query = "NL: q\nCNL:" -> 4.
    config = PromptConfig(context_budget=12, reserved_output=2)
    prompt = build_prompt("aa bb", corpus, config)
    assert prompt.pair_ids == ("000000",)
    assert prompt.token_count == 10
    assert prompt.text.endswith("NL: aa bb\nCNL:")


def test_build_prompt_reserved_output_ge_budget():
    with pytest.raises(BudgetTooSmall):
        PromptConfig(context_budget=16, reserved_output=16)


def test_build_prompt_query_alone_too_big():
    corpus = make_corpus(["aa"])
    config = PromptConfig(context_budget=5, reserved_output=2)
    with pytest.raises(BudgetTooSmall):
        build_prompt("one two three four five", corpus, config)


def test_build_prompt_huge_budget_includes_all_least_similar_first():
    nls = [f"query words {i}" for i in range(10)]
    corpus = make_corpus(nls)
    prompt = build_prompt("query words 3", corpus, PromptConfig(context_budget=4096))
    assert len(prompt.pair_ids) == 10
    assert prompt.pair_ids[0] == "000003"  # most similar, adjacent to the query
    most_similar_pos = prompt.text.rfind("query words 3\nCNL: cnl 3")
    least_similar_pos = prompt.text.find(f"NL: {corpus.pairs[int(prompt.pair_ids[-1])].nl}")
    assert least_similar_pos < most_similar_pos


def test_build_prompt_stops_at_first_misfit():
    # Second-ranked pair is long; third would fit, but admission must stop.
    corpus = make_corpus(
        ["match match", "match " + "filler " * 30, "match match match"],
        ["c", "c", "c"],
    )
    config = PromptConfig(context_budget=30, reserved_output=2)
    prompt = build_prompt("match match", corpus, config)
    assert "000001" not in prompt.pair_ids
    ranked = rank_by_similarity("match match", corpus)
    cut = ranked.index("000001")
    assert list(prompt.pair_ids) == ranked[:cut]


def test_budget_safety_and_prefix_monotonicity():
    nls = [f"shared words plus {i} extra" for i in range(8)]
    corpus = make_corpus(nls)
    query = "shared words plus 2 extra"
    previous_ids = None
    for budget in range(120, 8, -7):
        try:
            prompt = build_prompt(query, corpus, PromptConfig(budget, 4))
        except BudgetTooSmall:
            break
        assert prompt.token_count <= budget - 4
        if previous_ids is not None:
            assert prompt.pair_ids == previous_ids[: len(prompt.pair_ids)]
        previous_ids = prompt.pair_ids


@given(st.integers(min_value=8, max_value=200), st.integers(min_value=1, max_value=7))
def test_budget_safety_property(budget, reserved):
    corpus = make_corpus([f"words {i} here" for i in range(5)])
    try:
        prompt = build_prompt("words 1 here", corpus, PromptConfig(budget, reserved))
    except BudgetTooSmall:
        return
    assert prompt.token_count <= budget - reserved
    assert count_tokens(prompt.text) == prompt.token_count


def test_build_prompt_deterministic():
    corpus = make_corpus([f"words {i}" for i in range(6)])
    config = PromptConfig(64, 8)
    assert build_prompt("words 2", corpus, config) == build_prompt("words 2", corpus, config)


def test_prompt_template_shapes():
    corpus = make_corpus(["the input"], ["the output"])
    prompt = build_prompt("the input", corpus, PromptConfig(64, 8))
    assert prompt.text == "NL: the input\nCNL: the output\n\nNL: the input\nCNL:"

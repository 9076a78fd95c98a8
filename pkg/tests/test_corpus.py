import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cnl_workbench import cnl
from cnl_workbench.corpus import (
    CnlParseFailure,
    GeneratorConfig,
    InsufficientTrainData,
    IoFailure,
    NlCnlPair,
    PairCorpus,
    SchemaError,
    SplitSpec,
    generate_synthetic,
    generator_config_from_json_dict,
    load_jsonl,
    load_tsv_adapter,
    sample_limited,
    save_jsonl,
    split,
)


def write_lines(path, lines):
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def unlabeled(n):
    return PairCorpus(pairs=tuple(NlCnlPair(f"{i:06d}", f"nl {i}", f"cnl {i}") for i in range(n)))


# ---------------------------------------------------------------------------
# loaders


def test_load_jsonl_two_lines(tmp_path):
    path = tmp_path / "pairs.jsonl"
    write_lines(path, [
        json.dumps({"nl": "approve adults", "cnl": "if a then b"}),
        json.dumps({"nl": "reject kids", "cnl": "if c then d"}),
    ])
    corpus = load_jsonl(str(path))
    assert len(corpus) == 2
    assert [p.id for p in corpus.pairs] == ["000000", "000001"]
    assert not corpus.grammar_bound


def test_load_jsonl_missing_cnl(tmp_path):
    path = tmp_path / "bad.jsonl"
    write_lines(path, [json.dumps({"nl": "no cnl here"})])
    with pytest.raises(SchemaError) as exc_info:
        load_jsonl(str(path))
    assert exc_info.value.line == 1


def test_load_jsonl_grammar_bound_rejects_bad_cnl(tmp_path, grammar):
    path = tmp_path / "bound.jsonl"
    write_lines(path, [
        json.dumps({"nl": "ok", "cnl": "if customer age equals 5 then approve the loan"}),
        json.dumps({"nl": "bad", "cnl": "if nonsense then what"}),
    ])
    with pytest.raises(CnlParseFailure) as exc_info:
        load_jsonl(str(path), grammar)
    assert exc_info.value.line == 2
    assert isinstance(exc_info.value.error, cnl.ParseError)


def test_load_jsonl_duplicate_ids(tmp_path):
    path = tmp_path / "dup.jsonl"
    write_lines(path, [
        json.dumps({"id": "x", "nl": "a", "cnl": "b"}),
        json.dumps({"id": "x", "nl": "c", "cnl": "d"}),
    ])
    with pytest.raises(SchemaError):
        load_jsonl(str(path))


def test_load_jsonl_missing_file():
    with pytest.raises(IoFailure):
        load_jsonl("/nonexistent/pairs.jsonl")


def test_load_tsv_pair(tmp_path):
    path = tmp_path / "overnight.tsv"
    write_lines(path, ["what player scored 3 points\tplayer whose points is 3"])
    corpus = load_tsv_adapter(str(path))
    assert len(corpus) == 1
    assert corpus.pairs[0].nl == "what player scored 3 points"
    assert corpus.pairs[0].cnl == "player whose points is 3"
    assert not corpus.grammar_bound


def test_load_tsv_two_tabs(tmp_path):
    path = tmp_path / "bad.tsv"
    write_lines(path, ["a\tb\tc"])
    with pytest.raises(SchemaError):
        load_tsv_adapter(str(path))


def test_load_tsv_empty_file(tmp_path):
    path = tmp_path / "empty.tsv"
    path.write_text("", encoding="utf-8")
    assert len(load_tsv_adapter(str(path))) == 0


def test_save_load_round_trip_bytes(tmp_path, synth_corpus):
    first = tmp_path / "one.jsonl"
    second = tmp_path / "two.jsonl"
    save_jsonl(synth_corpus, str(first))
    reloaded = load_jsonl(str(first))
    assert reloaded.pairs == synth_corpus.pairs
    save_jsonl(reloaded, str(second))
    assert first.read_bytes() == second.read_bytes()


# ---------------------------------------------------------------------------
# split


def test_split_100_is_70_24_6():
    corpus = split(unlabeled(100), SplitSpec(seed=3))
    assert corpus.split_sizes() == {"train": 70, "test": 24, "validation": 6}


def test_split_50_is_35_12_3():
    corpus = split(unlabeled(50), SplitSpec(seed=3))
    assert corpus.split_sizes() == {"train": 35, "test": 12, "validation": 3}


def test_split_deterministic():
    a = split(unlabeled(100), SplitSpec(seed=9))
    b = split(unlabeled(100), SplitSpec(seed=9))
    assert a.pairs == b.pairs
    c = split(unlabeled(100), SplitSpec(seed=10))
    assert c.pairs != a.pairs


def test_split_fractions_must_sum_to_one():
    with pytest.raises(ValueError):
        SplitSpec(train=0.7, test=0.2, validation=0.2)


@settings(max_examples=40)
@given(st.integers(min_value=1, max_value=400), st.integers(min_value=0, max_value=2**32))
def test_split_partition_property(n, seed):
    corpus = split(unlabeled(n), SplitSpec(seed=seed))
    sizes = corpus.split_sizes()
    assert sizes["test"] == (24 * n) // 100
    assert sizes["validation"] == (6 * n) // 100
    assert sizes["train"] == n - sizes["test"] - sizes["validation"]
    assert sum(sizes.values()) == n
    assert all(p.split in ("train", "test", "validation") for p in corpus.pairs)


def test_split_preserves_pair_order_and_content():
    base = unlabeled(30)
    labeled = split(base, SplitSpec(seed=1))
    assert [p.id for p in labeled.pairs] == [p.id for p in base.pairs]
    assert [(p.nl, p.cnl) for p in labeled.pairs] == [(p.nl, p.cnl) for p in base.pairs]


# ---------------------------------------------------------------------------
# sample_limited


def test_sample_limited_insufficient():
    corpus = split(unlabeled(100), SplitSpec(seed=0))  # train = 70
    with pytest.raises(InsufficientTrainData):
        sample_limited(corpus, n=100, seed=0)


def test_sample_limited_exact_size():
    corpus = split(unlabeled(1000), SplitSpec(seed=0))  # train = 700
    limited = sample_limited(corpus, n=100, seed=5)
    assert limited.split_sizes() == {"train": 100, "test": 240, "validation": 60}
    assert limited.pairs_of("test") == corpus.pairs_of("test")
    assert limited.pairs_of("validation") == corpus.pairs_of("validation")
    assert set(limited.pairs_of("train")) <= set(corpus.pairs_of("train"))


def test_sample_limited_deterministic():
    corpus = split(unlabeled(1000), SplitSpec(seed=0))
    assert sample_limited(corpus, 100, seed=4).pairs == sample_limited(corpus, 100, seed=4).pairs


# ---------------------------------------------------------------------------
# synthetic generation


def test_generate_synthetic_all_cnl_parse(grammar):
    corpus = generate_synthetic(GeneratorConfig(seed=1, rule_count=200))
    assert len(corpus) == 200
    assert corpus.grammar_bound
    for pair in corpus.pairs:
        cnl.parse_text(pair.cnl, grammar)


def test_generate_synthetic_nl_differs_from_cnl():
    corpus = generate_synthetic(GeneratorConfig(seed=2, rule_count=200))
    for pair in corpus.pairs:
        assert pair.nl != pair.cnl


def test_generate_synthetic_byte_identical(tmp_path):
    first = tmp_path / "a.jsonl"
    second = tmp_path / "b.jsonl"
    save_jsonl(generate_synthetic(GeneratorConfig(seed=7, rule_count=150)), str(first))
    save_jsonl(generate_synthetic(GeneratorConfig(seed=7, rule_count=150)), str(second))
    assert first.read_bytes() == second.read_bytes()


def test_generate_synthetic_template_substitution():
    templates = tuple(f"anyone older than {{value}} variant{i}" for i in range(3))
    config = GeneratorConfig(
        seed=0,
        rule_count=50,
        clause_templates={sym: templates for sym in (">", "<", ">=", "<=", "==")},
    )
    corpus = generate_synthetic(config)
    for pair in corpus.pairs:
        assert "anyone older than" in pair.nl


def test_generate_synthetic_literals_appear_in_nl(grammar):
    corpus = generate_synthetic(GeneratorConfig(seed=3, rule_count=100))
    for pair in corpus.pairs:
        ast = cnl.parse_text(pair.cnl, grammar)
        literals = []

        def collect(node):
            if isinstance(node, cnl.Clause):
                literals.append(node.literal.lexeme)
            else:
                collect(node.left)
                collect(node.right)

        collect(ast.condition)
        for lexeme in literals:
            assert lexeme in pair.nl


def test_generator_config_validation():
    with pytest.raises(ValueError):
        GeneratorConfig(rule_count=0)
    with pytest.raises(ValueError):
        GeneratorConfig(clause_templates={">": ("only {value}", "two {value}")})
    with pytest.raises(ValueError):
        GeneratorConfig(clause_templates={">": ("a", "b", "c")})


def test_generator_config_from_json():
    config = generator_config_from_json_dict(
        {"seed": 12, "rule_count": 40, "string_pool": ["alpha", "beta"]}
    )
    assert config.seed == 12
    assert config.rule_count == 40
    assert config.string_pool == ("alpha", "beta")
    corpus = generate_synthetic(config)
    assert len(corpus) == 40


def test_statements_scopes(synth_corpus):
    train_only = synth_corpus.statements("train")
    combined = synth_corpus.statements("combined")
    assert len(train_only) == 350
    assert len(combined) == 500
    with pytest.raises(ValueError):
        synth_corpus.statements("bogus")

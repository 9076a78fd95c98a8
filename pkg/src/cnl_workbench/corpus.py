"""NL-CNL pair corpora: loading, splitting, subsampling, synthesis.

Splitting follows the 70/24/6 protocol: a seed-pinned shuffle, floors of the
test and validation fractions, and every remainder item going to train. All
randomness here runs through the package's portable LCG so corpora and
splits are byte-identical across platforms and runs.

The synthetic generator stands in for the unavailable miniloan paraphrase
data: it samples rules from the grammar, serializes them to CNL, and renders
the NL side from a paraphrase template bank with per-attribute value pools.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

from . import cnl
from .cnl import CnlGrammar, ParseError, UnterminatedQuote
from .rng import Lcg

SPLITS = ("train", "test", "validation")


class IoFailure(OSError):
    pass


class SchemaError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CnlParseFailure(ValueError):
    def __init__(self, line: int, error: Exception):
        super().__init__(f"line {line}: CNL does not parse: {error}")
        self.line = line
        self.error = error


class InsufficientTrainData(ValueError):
    pass


@dataclass(frozen=True)
class NlCnlPair:
    id: str
    nl: str
    cnl: str
    split: str = "unassigned"


@dataclass(frozen=True)
class PairCorpus:
    pairs: tuple[NlCnlPair, ...]
    provenance: str = ""
    seed: Optional[int] = None
    grammar_bound: bool = False

    def __len__(self) -> int:
        return len(self.pairs)

    def pairs_of(self, split: str) -> tuple[NlCnlPair, ...]:
        return tuple(p for p in self.pairs if p.split == split)

    def split_sizes(self) -> dict[str, int]:
        return {name: len(self.pairs_of(name)) for name in SPLITS}

    def statements(self, scope: str = "train") -> list[str]:
        """CNL statements for trie construction.

        ``scope`` is "train" (leak-free default) or "combined" (train, test
        and validation together, the protocol the original experiments used).
        """
        if scope == "train":
            return [p.cnl for p in self.pairs_of("train")]
        if scope == "combined":
            return [p.cnl for p in self.pairs if p.split in SPLITS]
        raise ValueError(f"unknown trie scope {scope!r}")


@dataclass(frozen=True)
class SplitSpec:
    train: float = 0.70
    test: float = 0.24
    validation: float = 0.06
    seed: int = 0

    def __post_init__(self):
        total = Fraction(str(self.train)) + Fraction(str(self.test)) + Fraction(str(self.validation))
        if total != 1:
            raise ValueError(f"split fractions sum to {float(total)}, not 1.0")


def _check_unique_ids(pairs: Sequence[NlCnlPair]) -> None:
    seen: dict[str, int] = {}
    for i, pair in enumerate(pairs, start=1):
        if pair.id in seen:
            raise SchemaError(i, f"duplicate id {pair.id!r} (first seen on line {seen[pair.id]})")
        seen[pair.id] = i


def load_jsonl(path: str, grammar: Optional[CnlGrammar] = None) -> PairCorpus:
    """One JSON object per line: {"id"?, "nl", "cnl", "split"?}.

    With a grammar, every CNL line must parse (the corpus is grammar-bound);
    offenders raise :class:`CnlParseFailure` with their line number.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc

    pairs: list[NlCnlPair] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(lineno, f"invalid JSON: {exc}") from exc
        if not isinstance(doc, dict) or "nl" not in doc or "cnl" not in doc:
            raise SchemaError(lineno, "object must carry 'nl' and 'cnl'")
        split = doc.get("split", "unassigned")
        if split not in SPLITS + ("unassigned",):
            raise SchemaError(lineno, f"unknown split {split!r}")
        pair = NlCnlPair(
            id=str(doc.get("id", f"{lineno - 1:06d}")),
            nl=str(doc["nl"]),
            cnl=str(doc["cnl"]),
            split=split,
        )
        if grammar is not None:
            try:
                cnl.parse_text(pair.cnl, grammar)
            except (ParseError, UnterminatedQuote) as exc:
                raise CnlParseFailure(lineno, exc) from exc
        pairs.append(pair)
    _check_unique_ids(pairs)
    return PairCorpus(
        pairs=tuple(pairs), provenance=f"jsonl:{path}", grammar_bound=grammar is not None
    )


def save_jsonl(corpus: PairCorpus, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for pair in corpus.pairs:
            doc = {"id": pair.id, "nl": pair.nl, "cnl": pair.cnl}
            if pair.split != "unassigned":
                doc["split"] = pair.split
            fh.write(json.dumps(doc, ensure_ascii=False))
            fh.write("\n")


def load_tsv_adapter(path: str) -> PairCorpus:
    """Adapter for overnight-style files: one "NL<TAB>CNL" pair per line.

    The result is not grammar-bound; its CNLs are opaque token sequences as
    far as the trie, decoder and metrics are concerned.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    pairs: list[NlCnlPair] = []
    for lineno, line in enumerate(lines, start=1):
        if not line:
            continue
        if line.count("\t") != 1:
            raise SchemaError(lineno, f"expected exactly one tab, found {line.count(chr(9))}")
        nl, cnl_text = line.split("\t")
        pairs.append(NlCnlPair(id=f"{lineno - 1:06d}", nl=nl, cnl=cnl_text))
    _check_unique_ids(pairs)
    return PairCorpus(pairs=tuple(pairs), provenance=f"tsv:{path}", grammar_bound=False)


def split(corpus: PairCorpus, spec: SplitSpec) -> PairCorpus:
    """Assign split labels: shuffle by seed, floor fractions, remainder to train."""
    if not corpus.pairs:
        raise ValueError("cannot split an empty corpus")
    n = len(corpus.pairs)
    n_test = int(Fraction(str(spec.test)) * n)
    n_validation = int(Fraction(str(spec.validation)) * n)
    n_train = n - n_test - n_validation

    order = list(range(n))
    Lcg(spec.seed).shuffle(order)
    label_by_index: dict[int, str] = {}
    for rank, index in enumerate(order):
        if rank < n_train:
            label_by_index[index] = "train"
        elif rank < n_train + n_test:
            label_by_index[index] = "test"
        else:
            label_by_index[index] = "validation"

    pairs = tuple(
        replace(pair, split=label_by_index[i]) for i, pair in enumerate(corpus.pairs)
    )
    return replace(corpus, pairs=pairs, seed=spec.seed)


def sample_limited(corpus: PairCorpus, n: int = 100, seed: int = 0) -> PairCorpus:
    """Shrink the train split to a uniform n-sample; other splits untouched."""
    train_ids = [p.id for p in corpus.pairs_of("train")]
    if len(train_ids) < n:
        raise InsufficientTrainData(f"train split has {len(train_ids)} < {n} pairs")
    keep = set(Lcg(seed).sample(train_ids, n))
    pairs = tuple(
        pair for pair in corpus.pairs if pair.split != "train" or pair.id in keep
    )
    return replace(corpus, pairs=pairs)


# ---------------------------------------------------------------------------
# Synthetic corpus generation

_CLAUSE_TEMPLATES: dict[str, tuple[str, ...]] = {
    ">": (
        "the {subject} {attribute} is over {value}",
        "{subject} {attribute} above {value}",
        "a {subject} whose {attribute} exceeds {value}",
    ),
    "<": (
        "the {subject} {attribute} is under {value}",
        "{subject} {attribute} below {value}",
        "a {subject} whose {attribute} stays beneath {value}",
    ),
    ">=": (
        "the {subject} {attribute} is {value} or more",
        "{subject} {attribute} reaching {value}",
        "a {subject} whose {attribute} is no lower than {value}",
    ),
    "<=": (
        "the {subject} {attribute} is {value} or less",
        "{subject} {attribute} capped at {value}",
        "a {subject} whose {attribute} is no higher than {value}",
    ),
    "==": (
        "the {subject} {attribute} is exactly {value}",
        "{subject} {attribute} of precisely {value}",
        "a {subject} whose {attribute} comes to {value}",
    ),
}

_ACTION_TEMPLATES: dict[str, tuple[str, ...]] = {
    "approve the loan": ("approve it", "give the loan a green light", "accept the application"),
    "reject the loan": ("reject it", "turn the application down", "decline the request"),
    "set the rate to <NUM>": (
        "price the rate at {0}",
        "put the rate on {0}",
        "fix the interest rate at {0}",
    ),
    "reject the loan with message <STR>": (
        "decline it and say {0}",
        "turn it down with the note {0}",
        "reject it, explaining {0}",
    ),
}

_AND_PHRASES = ("and", "while", "and also")
_OR_PHRASES = ("or", "or else", "or alternatively")
_FRAMES = ("when {cond}, {acts}", "{acts} whenever {cond}", "should {cond}, {acts}")

_NUMBER_POOLS: dict[str, tuple[str, ...]] = {
    "age": ("18", "21", "25", "65"),
    "credit score": ("580", "600", "640", "720"),
    "amount": ("1000", "5000", "20000", "100000"),
    "duration": ("6", "12", "48", "120"),
    "yearly income": ("24000", "30000", "55000", "90000"),
}
_DEFAULT_NUMBERS = ("1", "2", "10", "100")
_RATE_POOL = ("1.5", "2.0", "3.5", "4.25")
_STRING_POOL = ("low score", "missing documents", "income too low", "term too long")


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    rule_count: int = 500
    max_clauses: int = 3
    max_actions: int = 2
    clause_templates: dict[str, tuple[str, ...]] = field(default_factory=lambda: dict(_CLAUSE_TEMPLATES))
    action_templates: dict[str, tuple[str, ...]] = field(default_factory=lambda: dict(_ACTION_TEMPLATES))
    number_pools: dict[str, tuple[str, ...]] = field(default_factory=lambda: dict(_NUMBER_POOLS))
    default_numbers: tuple[str, ...] = _DEFAULT_NUMBERS
    string_pool: tuple[str, ...] = _STRING_POOL
    rate_pool: tuple[str, ...] = _RATE_POOL

    def __post_init__(self):
        if self.rule_count < 1 or self.max_clauses < 1 or self.max_actions < 1:
            raise ValueError("rule_count, max_clauses and max_actions must be >= 1")
        for symbol, templates in self.clause_templates.items():
            if len(templates) < 3:
                raise ValueError(f"need >= 3 clause templates for {symbol!r}")
            for t in templates:
                if "{value}" not in t:
                    raise ValueError(f"clause template {t!r} lacks a {{value}} slot")


def generator_config_from_json_dict(doc: dict) -> GeneratorConfig:
    kwargs = {}
    for key in ("seed", "rule_count", "max_clauses", "max_actions"):
        if key in doc:
            kwargs[key] = doc[key]
    for key in ("clause_templates", "action_templates", "number_pools"):
        if key in doc:
            kwargs[key] = {k: tuple(v) for k, v in doc[key].items()}
    for key in ("default_numbers", "string_pool", "rate_pool"):
        if key in doc:
            kwargs[key] = tuple(doc[key])
    return GeneratorConfig(**kwargs)


def _literal_sampler(config: GeneratorConfig, rng: Lcg):
    def literal_for(kind: str, subject=None, attribute=None) -> cnl.Literal:
        if kind == cnl.NUMERIC:
            if attribute is None:
                return cnl.Literal.number(rng.choice(config.rate_pool))
            pool = config.number_pools.get(attribute, config.default_numbers)
            return cnl.Literal.number(rng.choice(pool))
        if kind == cnl.TEXTUAL:
            return cnl.Literal.string(rng.choice(config.string_pool))
        return cnl.Literal.boolean(rng.randrange(2) == 0)

    return literal_for


def _render_condition(node, rng: Lcg, grammar: CnlGrammar, config: GeneratorConfig) -> str:
    if isinstance(node, cnl.Clause):
        comparator = grammar.comparator_by_phrase(node.comparator)
        template = rng.choice(config.clause_templates[comparator.symbol])
        return template.format(
            subject=node.subject, attribute=node.attribute, value=node.literal.lexeme
        )
    left = _render_condition(node.left, rng, grammar, config)
    right = _render_condition(node.right, rng, grammar, config)
    phrase = rng.choice(_AND_PHRASES if isinstance(node, cnl.And) else _OR_PHRASES)
    return f"{left} {phrase} {right}"


def _render_actions(actions: Sequence[cnl.Action], rng: Lcg, config: GeneratorConfig) -> str:
    parts = []
    for action in actions:
        templates = config.action_templates.get(action.template)
        if templates is None:
            parts.append(action.template)
            continue
        rendered = rng.choice(templates)
        for i, arg in enumerate(action.args):
            rendered = rendered.replace("{" + str(i) + "}", arg.lexeme)
        parts.append(rendered)
    return " and ".join(parts)


def generate_synthetic(config: GeneratorConfig, grammar: Optional[CnlGrammar] = None) -> PairCorpus:
    """Deterministic synthetic corpus; every CNL parses, every NL differs from it."""
    grammar = grammar or cnl.default_grammar()
    rng = Lcg(config.seed)
    literal_for = _literal_sampler(config, rng)
    pairs: list[NlCnlPair] = []
    seen: set[tuple[str, str]] = set()
    index = 0
    while len(pairs) < config.rule_count:
        ast = cnl.sample_ast(
            grammar, rng,
            max_clauses=config.max_clauses,
            max_actions=config.max_actions,
            literal_for=literal_for,
        )
        cnl_text = cnl.serialize(ast, grammar)
        frame = rng.choice(_FRAMES)
        nl_text = frame.format(
            cond=_render_condition(ast.condition, rng, grammar, config),
            acts=_render_actions(ast.actions, rng, config),
        )
        key = (nl_text, cnl_text)
        # Reject duplicates and (never observed, but cheap) NL == CNL collisions.
        if nl_text == cnl_text or (key in seen and index < config.rule_count * 50):
            index += 1
            continue
        seen.add(key)
        pairs.append(NlCnlPair(id=f"{len(pairs):06d}", nl=nl_text, cnl=cnl_text))
        index += 1
    return PairCorpus(
        pairs=tuple(pairs),
        provenance=f"synthetic:seed={config.seed}",
        seed=config.seed,
        grammar_bound=True,
    )

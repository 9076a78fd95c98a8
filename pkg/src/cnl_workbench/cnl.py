"""Constrained natural language: grammar, tokenizer, parser, serializer.

The CNL is a small rule language whose concrete syntax reads like English:

    rule    := "if" cond "then" action {"and" action}
    cond    := term {"or" term}
    term    := clause {"and" clause}
    clause  := subject attribute comparator literal
    literal := NUMBER | QUOTED_STRING | "true" | "false"

"and" binds tighter than "or"; connectives at the same level associate left.
The word inventory (subjects, attributes, comparators, action templates) is
data, not code: a :class:`CnlGrammar` instance, loadable from JSON.

Parse errors carry the exact set of grammar-legal continuations at the
failure position, with open literal positions reported as the marker tokens
``<NUM>`` / ``<STR>``. That same marker convention is used by the token trie,
so a parse error's expected set lines up with trie-driven completion.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Callable, Iterable, Optional, Sequence

from .rng import Lcg

Token = str

KEYWORD_IF = "if"
KEYWORD_THEN = "then"
CONNECTIVE_AND = "and"
CONNECTIVE_OR = "or"
BOOLEAN_TOKENS = ("true", "false")
RESERVED_WORDS = frozenset({KEYWORD_IF, KEYWORD_THEN, CONNECTIVE_AND, CONNECTIVE_OR, *BOOLEAN_TOKENS})

NUM_MARKER = "<NUM>"
STR_MARKER = "<STR>"

NUMBER_RE = re.compile(r"^[+-]?[0-9]+(\.[0-9]+)?$")

NUMERIC, TEXTUAL, BOOLEAN = "numeric", "textual", "boolean"
OPERAND_KINDS = (NUMERIC, TEXTUAL, BOOLEAN)


class CnlError(Exception):
    """Base for errors raised by this package's CNL layer."""


class UnterminatedQuote(CnlError):
    def __init__(self, position: int):
        super().__init__(f"quote opened at character {position} never closes")
        self.position = position


class GrammarError(CnlError):
    """The grammar definition itself is malformed."""


class ParseError(CnlError):
    """Input rejected; carries the exact legal continuations at the failure.

    ``position`` is a token index, ``expected`` the set of token texts legal
    there (literal slots appear as ``<NUM>`` / ``<STR>``), ``found`` the
    offending token or ``None`` at end of input.
    """

    def __init__(self, position: int, expected: Iterable[str], found: Optional[str]):
        self.position = position
        self.expected = frozenset(expected)
        self.found = found
        shown = ", ".join(sorted(self.expected))
        got = repr(found) if found is not None else "end of input"
        super().__init__(f"at token {position}: expected one of {{{shown}}}, found {got}")


def is_number_token(text: str) -> bool:
    return NUMBER_RE.match(text) is not None


def is_quoted_token(text: str) -> bool:
    return len(text) >= 2 and text.startswith('"') and text.endswith('"')


def tokenize(text: str) -> list[Token]:
    """Whitespace tokenizer with double-quoted spans kept as single tokens.

    Everything outside quotes is lowercased; quoted content is preserved
    verbatim (including internal whitespace and case). Raises
    :class:`UnterminatedQuote` if a quote opens and never closes.
    """
    tokens: list[Token] = []
    buf: list[str] = []
    in_quote = False
    quote_open_at = -1
    for i, ch in enumerate(text):
        if ch == '"':
            if not in_quote:
                in_quote = True
                quote_open_at = i
            else:
                in_quote = False
            buf.append(ch)
        elif ch.isspace() and not in_quote:
            if buf:
                tokens.append("".join(buf))
                buf = []
        else:
            buf.append(ch if in_quote else ch.lower())
    if in_quote:
        raise UnterminatedQuote(quote_open_at)
    if buf:
        tokens.append("".join(buf))
    return tokens


# ---------------------------------------------------------------------------
# Grammar


@dataclass(frozen=True)
class Comparator:
    phrase: str
    kind: str  # one of OPERAND_KINDS
    symbol: str  # rule-program comparison operator, e.g. ">"

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(self.phrase.split())


@dataclass(frozen=True)
class EffectSpec:
    """Declarative effect attached to an action template.

    ``type`` is one of "decision", "set", "message". ``arg`` indexes into the
    action's slot arguments when the effect value comes from the CNL text.
    """

    type: str
    value: Optional[str] = None
    key: Optional[str] = None
    arg: Optional[int] = None


@dataclass(frozen=True)
class ActionSpec:
    template: str  # e.g. 'set the rate to <NUM>'
    effects: tuple[EffectSpec, ...]

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(self.template.split())

    @property
    def slot_kinds(self) -> tuple[str, ...]:
        kinds = []
        for w in self.words:
            if w == NUM_MARKER:
                kinds.append(NUMERIC)
            elif w == STR_MARKER:
                kinds.append(TEXTUAL)
        return tuple(kinds)


def _phrase_word_ok(word: str) -> bool:
    if not word or word in RESERVED_WORDS or word in (NUM_MARKER, STR_MARKER):
        return False
    return not is_number_token(word) and not is_quoted_token(word)


def _check_prefix_safety(phrases: Sequence[tuple[str, ...]], followers: frozenset[str], label: str) -> None:
    # Greedy longest-match needs one token of lookahead to be decisive: where
    # one phrase strictly extends another, the divergence token must not also
    # be a legal follower of the shorter phrase.
    for p in phrases:
        for q in phrases:
            if p != q and len(q) > len(p) and q[: len(p)] == p:
                if q[len(p)] in followers:
                    raise GrammarError(
                        f"{label} phrase {' '.join(q)!r} extends {' '.join(p)!r} "
                        f"with ambiguous token {q[len(p)]!r}"
                    )


@dataclass(frozen=True)
class CnlGrammar:
    """Word inventory of the CNL; immutable once constructed.

    ``attributes`` maps each subject phrase to its attribute phrases. Every
    comparator declares the literal kind it accepts and the comparison symbol
    it transpiles to.
    """

    subjects: tuple[str, ...]
    attributes: dict[str, tuple[str, ...]]
    comparators: tuple[Comparator, ...]
    actions: tuple[ActionSpec, ...]

    def __post_init__(self):
        self._validate()

    def _validate(self) -> None:
        def check_distinct(phrases: Sequence[str], label: str) -> None:
            if len(set(phrases)) != len(phrases):
                raise GrammarError(f"duplicate {label} phrase")
            for phrase in phrases:
                words = phrase.split()
                if not words:
                    raise GrammarError(f"empty {label} phrase")
                for w in words:
                    if not (_phrase_word_ok(w) or w in (NUM_MARKER, STR_MARKER)):
                        raise GrammarError(f"illegal word {w!r} in {label} phrase {phrase!r}")

        if not self.subjects:
            raise GrammarError("grammar needs at least one subject")
        check_distinct(self.subjects, "subject")
        for subj in self.subjects:
            attrs = self.attributes.get(subj, ())
            if not attrs:
                raise GrammarError(f"subject {subj!r} has no attributes")
            check_distinct(attrs, "attribute")
        if not self.comparators:
            raise GrammarError("grammar needs at least one comparator")
        check_distinct([c.phrase for c in self.comparators], "comparator")
        for comp in self.comparators:
            if comp.kind not in OPERAND_KINDS:
                raise GrammarError(f"comparator {comp.phrase!r} has unknown kind {comp.kind!r}")
        if not self.actions:
            raise GrammarError("grammar needs at least one action")
        check_distinct([a.template for a in self.actions], "action")
        for act in self.actions:
            for w in act.words:
                if w in (NUM_MARKER, STR_MARKER):
                    continue
                if not _phrase_word_ok(w):
                    raise GrammarError(f"illegal word {w!r} in action {act.template!r}")
            for eff in act.effects:
                if eff.arg is not None and not (0 <= eff.arg < len(act.slot_kinds)):
                    raise GrammarError(f"effect arg {eff.arg} out of range for {act.template!r}")

        subject_words = tuple(tuple(s.split()) for s in self.subjects)
        attr_first = frozenset(a.split()[0] for attrs in self.attributes.values() for a in attrs)
        _check_prefix_safety(subject_words, attr_first, "subject")
        comp_first = frozenset(c.words[0] for c in self.comparators)
        for subj in self.subjects:
            attr_words = tuple(tuple(a.split()) for a in self.attributes[subj])
            _check_prefix_safety(attr_words, comp_first, "attribute")
        comp_words = tuple(c.words for c in self.comparators)
        _check_prefix_safety(comp_words, frozenset(), "comparator")
        for comp in self.comparators:
            for other in self.comparators:
                if comp is not other and len(other.words) > len(comp.words):
                    if other.words[: len(comp.words)] == comp.words:
                        raise GrammarError(
                            f"comparator {other.phrase!r} extends {comp.phrase!r}; "
                            "literal positions make this ambiguous"
                        )
        action_words = tuple(a.words for a in self.actions)
        _check_prefix_safety(action_words, frozenset({CONNECTIVE_AND}), "action")

    def attributes_of(self, subject: str) -> tuple[str, ...]:
        return self.attributes[subject]

    def comparator_by_phrase(self, phrase: str) -> Comparator:
        for c in self.comparators:
            if c.phrase == phrase:
                return c
        raise KeyError(phrase)

    def action_by_template(self, template: str) -> ActionSpec:
        for a in self.actions:
            if a.template == template:
                return a
        raise KeyError(template)

    def vocabulary(self) -> frozenset[str]:
        """All fixed words of the language (no literals, no markers)."""
        words = {KEYWORD_IF, KEYWORD_THEN, CONNECTIVE_AND, CONNECTIVE_OR}
        for s in self.subjects:
            words.update(s.split())
        for attrs in self.attributes.values():
            for a in attrs:
                words.update(a.split())
        for c in self.comparators:
            words.update(c.words)
        for a in self.actions:
            words.update(w for w in a.words if w not in (NUM_MARKER, STR_MARKER))
        return frozenset(words)


def grammar_to_json_dict(grammar: CnlGrammar) -> dict:
    return {
        "subjects": list(grammar.subjects),
        "attributes": {s: list(a) for s, a in grammar.attributes.items()},
        "comparators": [
            {"phrase": c.phrase, "kind": c.kind, "symbol": c.symbol} for c in grammar.comparators
        ],
        "actions": [
            {
                "template": a.template,
                "effects": [
                    {k: v for k, v in (("type", e.type), ("value", e.value), ("key", e.key), ("arg", e.arg)) if v is not None}
                    for e in a.effects
                ],
            }
            for a in grammar.actions
        ],
    }


def grammar_from_json_dict(doc: dict) -> CnlGrammar:
    try:
        comparators = tuple(
            Comparator(c["phrase"], c["kind"], c["symbol"]) for c in doc["comparators"]
        )
        actions = tuple(
            ActionSpec(
                a["template"],
                tuple(
                    EffectSpec(
                        type=e["type"],
                        value=e.get("value"),
                        key=e.get("key"),
                        arg=e.get("arg"),
                    )
                    for e in a.get("effects", ())
                ),
            )
            for a in doc["actions"]
        )
        return CnlGrammar(
            subjects=tuple(doc["subjects"]),
            attributes={s: tuple(a) for s, a in doc["attributes"].items()},
            comparators=comparators,
            actions=actions,
        )
    except (KeyError, TypeError) as exc:
        raise GrammarError(f"malformed grammar document: {exc}") from exc


def load_grammar(path: str) -> CnlGrammar:
    with open(path, "r", encoding="utf-8") as fh:
        return grammar_from_json_dict(json.load(fh))


def save_grammar(grammar: CnlGrammar, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(grammar_to_json_dict(grammar), fh, indent=2)
        fh.write("\n")


def default_grammar() -> CnlGrammar:
    """The miniloan-flavored grammar the workbench ships with."""
    return CnlGrammar(
        subjects=("customer", "loan", "borrower"),
        attributes={
            "customer": ("age", "credit score"),
            "loan": ("amount", "duration"),
            "borrower": ("yearly income", "credit score"),
        },
        comparators=(
            Comparator("is greater than", NUMERIC, ">"),
            Comparator("is more than", NUMERIC, ">"),
            Comparator("is less than", NUMERIC, "<"),
            Comparator("is at least", NUMERIC, ">="),
            Comparator("is at most", NUMERIC, "<="),
            Comparator("equals", NUMERIC, "=="),
        ),
        actions=(
            ActionSpec("approve the loan", (EffectSpec("decision", value="approve"),)),
            ActionSpec("reject the loan", (EffectSpec("decision", value="reject"),)),
            ActionSpec(
                "set the rate to <NUM>",
                (EffectSpec("set", key="loan.rate", arg=0),),
            ),
            ActionSpec(
                "reject the loan with message <STR>",
                (EffectSpec("decision", value="reject"), EffectSpec("message", arg=0)),
            ),
        ),
    )


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Literal:
    kind: str  # "number" | "string" | "boolean"
    lexeme: str  # exact token text, quotes included for strings

    def __post_init__(self):
        if self.kind == "number" and not is_number_token(self.lexeme):
            raise ValueError(f"not a number lexeme: {self.lexeme!r}")
        if self.kind == "string" and not is_quoted_token(self.lexeme):
            raise ValueError(f"not a quoted lexeme: {self.lexeme!r}")
        if self.kind == "boolean" and self.lexeme not in BOOLEAN_TOKENS:
            raise ValueError(f"not a boolean lexeme: {self.lexeme!r}")

    @property
    def value(self):
        if self.kind == "number":
            return Decimal(self.lexeme)
        if self.kind == "string":
            return self.lexeme[1:-1]
        return self.lexeme == "true"

    @staticmethod
    def number(lexeme: str) -> "Literal":
        return Literal("number", lexeme)

    @staticmethod
    def string(content: str) -> "Literal":
        return Literal("string", f'"{content}"')

    @staticmethod
    def boolean(flag: bool) -> "Literal":
        return Literal("boolean", "true" if flag else "false")


@dataclass(frozen=True)
class Clause:
    subject: str
    attribute: str
    comparator: str  # comparator phrase
    literal: Literal


@dataclass(frozen=True)
class And:
    left: "ConditionNode"
    right: "ConditionNode"


@dataclass(frozen=True)
class Or:
    left: "ConditionNode"
    right: "ConditionNode"


ConditionNode = Clause | And | Or


@dataclass(frozen=True)
class Action:
    template: str
    args: tuple[Literal, ...] = ()


@dataclass(frozen=True)
class CnlAst:
    condition: ConditionNode
    actions: tuple[Action, ...]


def validate_ast(ast: CnlAst, grammar: CnlGrammar) -> None:
    """Raise ValueError unless ``ast`` is expressible under ``grammar``.

    Checks every clause against the word inventory, literal kinds against
    comparator kinds, action arity, and the structural constraint that no
    Or node sits below an And node (the concrete syntax cannot spell that).
    """

    def walk(node: ConditionNode, under_and: bool) -> None:
        if isinstance(node, Clause):
            if node.subject not in grammar.subjects:
                raise ValueError(f"unknown subject {node.subject!r}")
            if node.attribute not in grammar.attributes_of(node.subject):
                raise ValueError(f"unknown attribute {node.attribute!r} of {node.subject!r}")
            comp = grammar.comparator_by_phrase(node.comparator)
            kind_map = {NUMERIC: "number", TEXTUAL: "string", BOOLEAN: "boolean"}
            if node.literal.kind != kind_map[comp.kind]:
                raise ValueError(
                    f"literal kind {node.literal.kind} does not fit comparator {comp.phrase!r}"
                )
        elif isinstance(node, And):
            walk(node.left, True)
            walk(node.right, True)
        elif isinstance(node, Or):
            if under_and:
                raise ValueError("or-node below and-node is not expressible")
            walk(node.left, False)
            walk(node.right, False)
        else:
            raise ValueError(f"unknown condition node {node!r}")

    walk(ast.condition, False)
    if not ast.actions:
        raise ValueError("rule needs at least one action")
    for action in ast.actions:
        spec = grammar.action_by_template(action.template)
        kinds = spec.slot_kinds
        if len(action.args) != len(kinds):
            raise ValueError(f"action {action.template!r} expects {len(kinds)} args")
        kind_map = {NUMERIC: "number", TEXTUAL: "string"}
        for arg, kind in zip(action.args, kinds):
            if arg.kind != kind_map[kind]:
                raise ValueError(f"argument {arg.lexeme!r} does not fit slot of {action.template!r}")


# ---------------------------------------------------------------------------
# Parser


def _literal_expected(kind: str) -> frozenset[str]:
    if kind == NUMERIC:
        return frozenset({NUM_MARKER})
    if kind == TEXTUAL:
        return frozenset({STR_MARKER})
    return frozenset(BOOLEAN_TOKENS)


def _token_fits(pattern_word: str, token: Optional[Token]) -> bool:
    if token is None:
        return False
    if pattern_word == NUM_MARKER:
        return is_number_token(token)
    if pattern_word == STR_MARKER:
        return is_quoted_token(token)
    return pattern_word == token


class _Parser:
    def __init__(self, tokens: Sequence[Token], grammar: CnlGrammar):
        self.tokens = list(tokens)
        self.grammar = grammar
        self.pos = 0
        # Continuations of longer phrases abandoned by greedy matching, keyed
        # by token position; folded into any error raised at that position so
        # expected sets stay exact.
        self._pending: dict[int, set[str]] = {}

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def fail(self, expected: Iterable[str], position: Optional[int] = None):
        pos = self.pos if position is None else position
        expected = set(expected) | self._pending.get(pos, set())
        found = self.tokens[pos] if pos < len(self.tokens) else None
        raise ParseError(pos, expected, found)

    def expect_word(self, word: str) -> None:
        if self.peek() != word:
            self.fail({word})
        self.pos += 1

    def match_phrase(self, phrases: Sequence[tuple[str, ...]], label: str) -> tuple[str, ...]:
        """Greedy longest-match of one phrase from ``phrases`` at ``pos``.

        On committing a shorter phrase over a still-viable longer one, the
        longer phrase's continuation tokens are recorded as pending for the
        commit position.
        """
        viable = list(phrases)
        offset = 0
        complete: Optional[tuple[str, ...]] = None
        while True:
            for p in viable:
                if len(p) == offset:
                    complete = p
            alive = [p for p in viable if len(p) > offset]
            token = self.tokens[self.pos + offset] if self.pos + offset < len(self.tokens) else None
            matching = [p for p in alive if _token_fits(p[offset], token)]
            if not matching:
                # Fall back to a completed shorter phrase only at its exact
                # boundary; past it we are committed to the longer phrase
                # (the divergence token cannot belong to the outer context,
                # which grammar validation guarantees).
                if complete is not None and len(complete) == offset:
                    if alive:
                        conts = {p[offset] for p in alive}
                        self._pending.setdefault(self.pos + offset, set()).update(conts)
                    self.pos += len(complete)
                    return complete
                self.fail({p[offset] for p in alive}, position=self.pos + offset)
            viable = matching
            offset += 1

    def parse_rule(self) -> CnlAst:
        self.expect_word(KEYWORD_IF)
        condition = self.parse_or()
        if self.peek() != KEYWORD_THEN:
            # A complete clause may always be extended before "then".
            self.fail({CONNECTIVE_AND, CONNECTIVE_OR, KEYWORD_THEN})
        self.pos += 1
        actions = [self.parse_action()]
        while self.peek() is not None:
            if self.peek() != CONNECTIVE_AND:
                self.fail({CONNECTIVE_AND})
            self.pos += 1
            actions.append(self.parse_action())
        return CnlAst(condition=condition, actions=tuple(actions))

    def parse_or(self) -> ConditionNode:
        node = self.parse_and()
        while self.peek() == CONNECTIVE_OR:
            self.pos += 1
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> ConditionNode:
        node = self.parse_clause()
        while self.peek() == CONNECTIVE_AND:
            self.pos += 1
            node = And(node, self.parse_clause())
        return node

    def parse_clause(self) -> Clause:
        subject_words = self.match_phrase(
            [tuple(s.split()) for s in self.grammar.subjects], "subject"
        )
        subject = " ".join(subject_words)
        attr_words = self.match_phrase(
            [tuple(a.split()) for a in self.grammar.attributes_of(subject)], "attribute"
        )
        attribute = " ".join(attr_words)
        comp_words = self.match_phrase(
            [c.words for c in self.grammar.comparators], "comparator"
        )
        comparator = self.grammar.comparator_by_phrase(" ".join(comp_words))
        literal = self.parse_literal(comparator.kind)
        return Clause(subject, attribute, comparator.phrase, literal)

    def parse_literal(self, kind: str) -> Literal:
        token = self.peek()
        if kind == NUMERIC and token is not None and is_number_token(token):
            self.pos += 1
            return Literal("number", token)
        if kind == TEXTUAL and token is not None and is_quoted_token(token):
            self.pos += 1
            return Literal("string", token)
        if kind == BOOLEAN and token in BOOLEAN_TOKENS:
            self.pos += 1
            return Literal("boolean", token)
        self.fail(_literal_expected(kind))

    def parse_action(self) -> Action:
        start = self.pos
        words = self.match_phrase([a.words for a in self.grammar.actions], "action")
        template = " ".join(words)
        spec = self.grammar.action_by_template(template)
        args = []
        for i, w in enumerate(spec.words):
            token = self.tokens[start + i]
            if w == NUM_MARKER:
                args.append(Literal("number", token))
            elif w == STR_MARKER:
                args.append(Literal("string", token))
        return Action(template=template, args=tuple(args))


def parse(tokens: Sequence[Token], grammar: CnlGrammar) -> CnlAst:
    """Parse a token sequence into the unique AST under ``grammar``.

    Raises :class:`ParseError` with the exact expected-token set on failure.
    """
    return _Parser(tokens, grammar).parse_rule()


def parse_text(text: str, grammar: CnlGrammar) -> CnlAst:
    return parse(tokenize(text), grammar)


# ---------------------------------------------------------------------------
# Serializer, normalizer, semantic equality


def serialize_condition(node: ConditionNode) -> str:
    if isinstance(node, Clause):
        return f"{node.subject} {node.attribute} {node.comparator} {node.literal.lexeme}"
    connective = CONNECTIVE_AND if isinstance(node, And) else CONNECTIVE_OR
    return f"{serialize_condition(node.left)} {connective} {serialize_condition(node.right)}"


def serialize_action(action: Action, grammar: CnlGrammar) -> str:
    spec = grammar.action_by_template(action.template)
    out = []
    arg_iter = iter(action.args)
    for w in spec.words:
        if w in (NUM_MARKER, STR_MARKER):
            out.append(next(arg_iter).lexeme)
        else:
            out.append(w)
    return " ".join(out)


def serialize(ast: CnlAst, grammar: CnlGrammar) -> str:
    """Render an AST back to CNL text; inverse of :func:`parse` on valid ASTs."""
    cond = serialize_condition(ast.condition)
    acts = f" {CONNECTIVE_AND} ".join(serialize_action(a, grammar) for a in ast.actions)
    return f"{KEYWORD_IF} {cond} {KEYWORD_THEN} {acts}"


def _flatten(node: ConditionNode, ctor: type, out: list) -> None:
    if isinstance(node, ctor):
        _flatten(node.left, ctor, out)
        _flatten(node.right, ctor, out)
    else:
        out.append(node)


def _normalize_condition(node: ConditionNode) -> ConditionNode:
    if isinstance(node, Clause):
        return node
    ctor = type(node)
    operands: list[ConditionNode] = []
    _flatten(node, ctor, operands)
    operands = [_normalize_condition(op) for op in operands]
    operands.sort(key=serialize_condition)
    result = operands[0]
    for op in operands[1:]:
        result = ctor(result, op)
    return result


def normalize(ast: CnlAst) -> CnlAst:
    """Canonical form for semantic comparison.

    Chains of the same connective are flattened, operands sorted by their
    serialized text, and the chain rebuilt left-leaning. Idempotent; actions
    are left untouched (their order is an execution order).
    """
    return CnlAst(condition=_normalize_condition(ast.condition), actions=ast.actions)


def semantic_equal(a: CnlAst, b: CnlAst) -> bool:
    """True iff the two rules differ at most by operand order within connectives."""
    return normalize(a) == normalize(b)


# ---------------------------------------------------------------------------
# Grammar sampling (shared by property tests and the synthetic corpus)

_DEFAULT_NUMBER_POOL = ("18", "21", "600", "640", "1000", "5000", "12", "48", "30000", "3.5")
_DEFAULT_STRING_POOL = ("low score", "missing documents", "over limit")


def default_literal_sampler(rng: Lcg):
    def literal_for(kind: str, subject: Optional[str] = None, attribute: Optional[str] = None) -> Literal:
        if kind == NUMERIC:
            return Literal.number(rng.choice(_DEFAULT_NUMBER_POOL))
        if kind == TEXTUAL:
            return Literal.string(rng.choice(_DEFAULT_STRING_POOL))
        return Literal.boolean(rng.randrange(2) == 0)

    return literal_for


def sample_clause(grammar: CnlGrammar, rng: Lcg, literal_for: Callable) -> Clause:
    subject = rng.choice(grammar.subjects)
    attribute = rng.choice(grammar.attributes_of(subject))
    comparator = rng.choice(grammar.comparators)
    return Clause(subject, attribute, comparator.phrase, literal_for(comparator.kind, subject, attribute))


def sample_ast(
    grammar: CnlGrammar,
    rng: Lcg,
    max_clauses: int = 3,
    max_actions: int = 2,
    literal_for: Optional[Callable] = None,
) -> CnlAst:
    """Uniform-ish random rule expressible under ``grammar``.

    Clauses are grouped into and-chains joined by or, so every condition
    shape the concrete syntax can spell is reachable.
    """
    literal_for = literal_for or default_literal_sampler(rng)
    n_clauses = rng.randint(1, max_clauses)
    clauses = [sample_clause(grammar, rng, literal_for) for _ in range(n_clauses)]
    groups: list[list[Clause]] = [[]]
    for i, clause in enumerate(clauses):
        groups[-1].append(clause)
        if i < n_clauses - 1 and rng.randrange(2) == 0:
            groups.append([])
    terms: list[ConditionNode] = []
    for group in groups:
        node: ConditionNode = group[0]
        for clause in group[1:]:
            node = And(node, clause)
        terms.append(node)
    condition: ConditionNode = terms[0]
    for term in terms[1:]:
        condition = Or(condition, term)

    n_actions = rng.randint(1, max_actions)
    actions = []
    for _ in range(n_actions):
        spec = rng.choice(grammar.actions)
        args = tuple(literal_for(kind) for kind in spec.slot_kinds)
        actions.append(Action(spec.template, args))
    return CnlAst(condition=condition, actions=tuple(actions))

"""Transpilation of CNL rules into executable rule programs, plus the engine.

A rule program is the automation-code level: a boolean tree of typed
predicates over flat attribute-value records, with effects applied when the
tree fires. Programs serialize to a stable JSON form, so golden files can
pin the transpiler output bit-for-bit.

Numeric comparison happens in decimal, never binary floating point: record
and program numbers are converted through ``Decimal(str(x))`` before any
comparison, so ``0.1`` means one tenth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Any, Optional, Union

from .cnl import Action, And, Clause, CnlAst, CnlGrammar, ConditionNode, Or

COMPARISON_SYMBOLS = (">", "<", ">=", "<=", "==")


class UnsupportedComparator(ValueError):
    pass


class TypeMismatch(ValueError):
    def __init__(self, key: str, op: str, detail: str):
        super().__init__(f"predicate {key} {op}: {detail}")
        self.key = key
        self.op = op


@dataclass(frozen=True)
class Predicate:
    key: str
    op: str
    value: Union[Decimal, str, bool]


@dataclass(frozen=True)
class WhenAnd:
    left: "WhenNode"
    right: "WhenNode"


@dataclass(frozen=True)
class WhenOr:
    left: "WhenNode"
    right: "WhenNode"


WhenNode = Union[Predicate, WhenAnd, WhenOr]


@dataclass(frozen=True)
class RuleProgram:
    name: str
    when: WhenNode
    then: tuple[dict, ...]  # effect dicts, applied in order


@dataclass
class ExecutionTrace:
    fired: bool
    predicates: list[dict] = field(default_factory=list)  # evaluation order
    missing: list[str] = field(default_factory=list)  # keys absent from the record
    applied: list[dict] = field(default_factory=list)
    decision: Optional[str] = None
    messages: list[str] = field(default_factory=list)
    record_after: Optional[dict] = None


def attribute_key(subject: str, attribute: str) -> str:
    return f"{subject}.{attribute.replace(' ', '_')}"


def transpile(ast: CnlAst, grammar: CnlGrammar, name: str = "rule") -> RuleProgram:
    """Map an AST to its rule program; total over grammar-valid ASTs."""

    def predicate(clause: Clause) -> Predicate:
        comparator = grammar.comparator_by_phrase(clause.comparator)
        if comparator.symbol not in COMPARISON_SYMBOLS:
            raise UnsupportedComparator(
                f"comparator {comparator.phrase!r} maps to unknown symbol {comparator.symbol!r}"
            )
        return Predicate(
            key=attribute_key(clause.subject, clause.attribute),
            op=comparator.symbol,
            value=clause.literal.value,
        )

    def walk(node: ConditionNode) -> WhenNode:
        if isinstance(node, Clause):
            return predicate(node)
        if isinstance(node, And):
            return WhenAnd(walk(node.left), walk(node.right))
        if isinstance(node, Or):
            return WhenOr(walk(node.left), walk(node.right))
        raise TypeError(f"unknown condition node {node!r}")

    effects: list[dict] = []
    for action in ast.actions:
        effects.extend(_action_effects(action, grammar))
    return RuleProgram(name=name, when=walk(ast.condition), then=tuple(effects))


def _action_effects(action: Action, grammar: CnlGrammar) -> list[dict]:
    spec = grammar.action_by_template(action.template)
    out = []
    for eff in spec.effects:
        if eff.type == "decision":
            out.append({"effect": "decision", "value": eff.value})
        elif eff.type == "set":
            value = action.args[eff.arg].value if eff.arg is not None else eff.value
            out.append({"effect": "set", "key": eff.key, "value": value})
        elif eff.type == "message":
            text = action.args[eff.arg].value if eff.arg is not None else eff.value
            out.append({"effect": "message", "text": text})
        else:
            raise ValueError(f"unknown effect type {eff.type!r}")
    return out


# ---------------------------------------------------------------------------
# Execution


def _as_decimal(value: Any) -> Optional[Decimal]:
    if isinstance(value, bool):
        return None
    if isinstance(value, Decimal):
        return value
    if isinstance(value, int):
        return Decimal(value)
    if isinstance(value, float):
        return Decimal(str(value))
    return None


def _eval_predicate(pred: Predicate, record: dict, trace: ExecutionTrace) -> bool:
    entry = {"key": pred.key, "op": pred.op, "value": _jsonable_value(pred.value)}
    if pred.key not in record:
        entry.update(outcome=False, missing=True)
        trace.predicates.append(entry)
        if pred.key not in trace.missing:
            trace.missing.append(pred.key)
        return False

    actual = record[pred.key]
    expected = pred.value
    if isinstance(expected, Decimal):
        actual_num = _as_decimal(actual)
        if actual_num is None:
            raise TypeMismatch(pred.key, pred.op, f"numeric comparison against {type(actual).__name__}")
        outcome = _compare(actual_num, pred.op, expected)
    elif isinstance(expected, bool):
        if not isinstance(actual, bool):
            raise TypeMismatch(pred.key, pred.op, f"boolean comparison against {type(actual).__name__}")
        outcome = _compare(actual, pred.op, expected)
    else:  # string
        if not isinstance(actual, str):
            raise TypeMismatch(pred.key, pred.op, f"string comparison against {type(actual).__name__}")
        outcome = _compare(actual, pred.op, expected)

    entry.update(outcome=outcome, missing=False)
    trace.predicates.append(entry)
    return outcome


def _compare(actual, op: str, expected) -> bool:
    if op == ">":
        return actual > expected
    if op == "<":
        return actual < expected
    if op == ">=":
        return actual >= expected
    if op == "<=":
        return actual <= expected
    if op == "==":
        return actual == expected
    raise UnsupportedComparator(op)


def execute(program: RuleProgram, record: dict) -> ExecutionTrace:
    """Evaluate the when-tree (short-circuiting) and apply effects if fired.

    Missing attributes make their predicate false and are listed in the
    trace. Raises :class:`TypeMismatch` on kind-incompatible comparisons.
    """
    trace = ExecutionTrace(fired=False)

    def walk(node: WhenNode) -> bool:
        if isinstance(node, Predicate):
            return _eval_predicate(node, record, trace)
        if isinstance(node, WhenAnd):
            return walk(node.left) and walk(node.right)
        if isinstance(node, WhenOr):
            return walk(node.left) or walk(node.right)
        raise TypeError(f"unknown when node {node!r}")

    trace.fired = walk(program.when)
    if trace.fired:
        mutated = dict(record)
        for effect in program.then:
            trace.applied.append(effect)
            if effect["effect"] == "decision":
                trace.decision = effect["value"]
            elif effect["effect"] == "set":
                mutated[effect["key"]] = effect["value"]
            elif effect["effect"] == "message":
                trace.messages.append(effect["text"])
        trace.record_after = mutated
    return trace


# ---------------------------------------------------------------------------
# JSON form


def _jsonable_value(value):
    if isinstance(value, Decimal):
        as_int = int(value)
        return as_int if value == as_int else float(value)
    return value


def _when_to_dict(node: WhenNode) -> dict:
    if isinstance(node, Predicate):
        return {"pred": {"key": node.key, "op": node.op, "value": _jsonable_value(node.value)}}
    label = "and" if isinstance(node, WhenAnd) else "or"
    return {label: [_when_to_dict(node.left), _when_to_dict(node.right)]}


def program_to_json_dict(program: RuleProgram) -> dict:
    return {
        "name": program.name,
        "when": _when_to_dict(program.when),
        "then": [dict(effect, **{"value": _jsonable_value(effect["value"])})
                 if "value" in effect else dict(effect)
                 for effect in program.then],
    }


def program_to_json(program: RuleProgram) -> str:
    return json.dumps(program_to_json_dict(program), indent=2) + "\n"


class ProgramSchemaError(ValueError):
    pass


def _value_from_json(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return Decimal(str(value))
    if isinstance(value, str):
        return value
    raise ProgramSchemaError(f"unsupported predicate value {value!r}")


def _when_from_dict(doc: dict) -> WhenNode:
    if not isinstance(doc, dict) or len(doc) != 1:
        raise ProgramSchemaError(f"malformed when node: {doc!r}")
    if "pred" in doc:
        pred = doc["pred"]
        try:
            key, op, value = pred["key"], pred["op"], pred["value"]
        except (KeyError, TypeError) as exc:
            raise ProgramSchemaError(f"malformed predicate: {pred!r}") from exc
        if op not in COMPARISON_SYMBOLS:
            raise ProgramSchemaError(f"unknown comparison op {op!r}")
        return Predicate(key=key, op=op, value=_value_from_json(value))
    label, children = next(iter(doc.items()))
    if label not in ("and", "or") or not isinstance(children, list) or len(children) != 2:
        raise ProgramSchemaError(f"malformed when node: {doc!r}")
    ctor = WhenAnd if label == "and" else WhenOr
    return ctor(_when_from_dict(children[0]), _when_from_dict(children[1]))


def program_from_json_dict(doc: dict) -> RuleProgram:
    try:
        name, when, then = doc["name"], doc["when"], doc["then"]
    except (KeyError, TypeError) as exc:
        raise ProgramSchemaError(f"malformed program document") from exc
    if not isinstance(then, list):
        raise ProgramSchemaError("'then' must be a list of effects")
    effects = []
    for effect in then:
        if not isinstance(effect, dict) or "effect" not in effect:
            raise ProgramSchemaError(f"malformed effect: {effect!r}")
        effect = dict(effect)
        if effect["effect"] == "set" and "value" in effect:
            effect["value"] = _value_from_json(effect["value"])
        effects.append(effect)
    return RuleProgram(name=name, when=_when_from_dict(when), then=tuple(effects))


def trace_to_json_dict(trace: ExecutionTrace) -> dict:
    return {
        "fired": trace.fired,
        "predicates": trace.predicates,
        "missing": trace.missing,
        "applied": [
            dict(e, **{"value": _jsonable_value(e["value"])}) if "value" in e else dict(e)
            for e in trace.applied
        ],
        "decision": trace.decision,
        "messages": trace.messages,
        "record_after": (
            {k: _jsonable_value(v) for k, v in trace.record_after.items()}
            if trace.record_after is not None
            else None
        ),
    }

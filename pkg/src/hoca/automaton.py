"""Finite-control automata over a storage type, and their text format.

A transition carries a total test vector: every test of the storage type is
assigned a required outcome, so the transition relation is literally a
subset of ``Q x {true,false}^T x Q x F``.  The file format allows omitted
("don't care") tests; these are expanded at parse time over the satisfiable
total vectors of the storage type.

File format (line oriented, ``#`` comments)::

    storage: P{_,0,1}(C)
    states: q0 q1 q2
    initial: q0
    final: q2
    mode: q1 universal            # optional; default existential
    trans: q0 [top=_] push(1) q1
    trans: q1 [top=1] stay(pop) q1
    trans: q1 [top=1] pop q2

Test syntax inside brackets: ``top=s``, ``empty=true|false``,
``inner(T)`` or ``inner(T)=false`` for an inner test with polarity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError, UnknownStateError, UnknownSymbolError, UnsupportedOpError
from .storage import (
    Empty,
    Inner,
    OpId,
    StorageConfig,
    StorageExpr,
    TestId,
    TestVector,
    Top,
    apply_op,
    config_outcomes,
    format_op,
    format_storage,
    format_test,
    initial_config,
    op_well_typed,
    parse_op,
    parse_storage,
    satisfiable_vectors,
    test_well_typed,
    tests_of,
)


@dataclass(frozen=True)
class Transition:
    source: str
    tests: TestVector
    target: str
    op: OpId


@dataclass(frozen=True)
class StorageAutomaton:
    storage: StorageExpr
    states: tuple[str, ...]
    initial: str
    transitions: tuple[Transition, ...]
    final: str | None = None
    universal: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        known = set(self.states)
        if self.initial not in known:
            raise UnknownStateError(f"initial state {self.initial!r} not declared")
        if self.final is not None and self.final not in known:
            raise UnknownStateError(f"final state {self.final!r} not declared")
        for st in self.universal:
            if st not in known:
                raise UnknownStateError(f"universal state {st!r} not declared")
        for tr in self.transitions:
            if tr.source not in known or tr.target not in known:
                raise UnknownStateError(f"transition uses undeclared state: {tr}")
            if not op_well_typed(self.storage, tr.op):
                raise ParseError(f"op {format_op(tr.op)} ill-typed for this storage")

    @property
    def all_existential(self) -> bool:
        return not self.universal


def successors(
    aut: StorageAutomaton, state: str, config: StorageConfig
) -> list[tuple[Transition, str, StorageConfig]]:
    """Applicable transitions at ``(state, config)`` in declaration order."""
    outcome = config_outcomes(aut.storage, config)
    result = []
    for tr in aut.transitions:
        if tr.source != state or tr.tests != outcome:
            continue
        nxt = apply_op(aut.storage, tr.op, config)
        if nxt is not None:
            result.append((tr, tr.target, nxt))
    return result


# ---------------------------------------------------------------------------
# Don't-care expansion
# ---------------------------------------------------------------------------

def expand_constraints(
    storage: StorageExpr, constraints: dict[TestId, bool]
) -> tuple[TestVector, ...]:
    """All satisfiable total vectors consistent with partial constraints."""
    for test in constraints:
        if not test_well_typed(storage, test):
            raise ParseError(f"test {format_test(test)} ill-typed for this storage")
    out = []
    for vec in satisfiable_vectors(storage):
        assigned = dict(vec)
        if all(assigned[t] == v for t, v in constraints.items()):
            out.append(vec)
    return tuple(out)


def make_transitions(
    storage: StorageExpr,
    source: str,
    constraints: dict[TestId, bool],
    op: OpId,
    target: str,
) -> tuple[Transition, ...]:
    vectors = expand_constraints(storage, constraints)
    if not vectors:
        raise ParseError(f"unsatisfiable test constraints on {source} -> {target}")
    return tuple(Transition(source, vec, target, op) for vec in vectors)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOP_RE = re.compile(r"top\s*=\s*([A-Za-z0-9_']+)")
_EMPTY_RE = re.compile(r"empty\s*=\s*(true|false)")
_POL_RE = re.compile(r"\s*=\s*(true|false)")


def parse_test_constraints(text: str, line: int | None = None) -> dict[TestId, bool]:
    """Parse the bracket contents of a transition line."""
    constraints: dict[TestId, bool] = {}
    pos = 0
    while pos < len(text):
        if text[pos].isspace() or text[pos] == ",":
            pos += 1
            continue
        if text.startswith("inner", pos):
            test, value, pos = _parse_inner_test(text, pos, line)
            constraints[test] = value
            continue
        m = _TOP_RE.match(text, pos)
        if m:
            constraints[Top(m.group(1))] = True
            pos = m.end()
            continue
        m = _EMPTY_RE.match(text, pos)
        if m:
            constraints[Empty()] = m.group(1) == "true"
            pos = m.end()
            continue
        raise ParseError(f"bad test syntax: {text[pos:]!r}", line=line)
    return constraints


def _parse_inner_test(text: str, pos: int, line: int | None) -> tuple[TestId, bool, int]:
    """Parse ``inner( ... )`` with balanced parens and optional polarity suffix."""
    pos += len("inner")
    if pos >= len(text) or text[pos] != "(":
        raise ParseError("expected '(' after inner", line=line)
    depth = 1
    start = pos + 1
    pos += 1
    while pos < len(text) and depth:
        if text[pos] == "(":
            depth += 1
        elif text[pos] == ")":
            depth -= 1
        pos += 1
    if depth:
        raise ParseError("unterminated inner(...)", line=line)
    body = text[start : pos - 1]
    inner_items = parse_test_constraints(body, line)
    if len(inner_items) != 1:
        raise ParseError("inner(...) takes exactly one test", line=line)
    ((inner_test, inner_val),) = inner_items.items()
    m = _POL_RE.match(text, pos)
    if m:
        inner_val = m.group(1) == "true"
        pos = m.end()
    return Inner(inner_test), inner_val, pos


def parse_automaton(text: str) -> StorageAutomaton:
    storage: StorageExpr | None = None
    states: list[str] = []
    initial: str | None = None
    final: str | None = None
    universal: set[str] = set()
    raw_transitions: list[tuple[int, str, dict[TestId, bool], OpId, str]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        rest = rest.strip()
        if key == "storage":
            storage = parse_storage(rest)
        elif key == "states":
            states.extend(rest.split())
        elif key == "initial":
            initial = rest
        elif key == "final":
            final = rest
        elif key == "mode":
            parts = rest.split()
            if len(parts) != 2 or parts[1] not in ("universal", "existential"):
                raise ParseError(f"bad mode line: {raw!r}", line=lineno)
            if parts[1] == "universal":
                universal.add(parts[0])
        elif key == "trans":
            raw_transitions.append(_parse_trans_line(rest, lineno))
        else:
            raise ParseError(f"unknown directive {key!r}", line=lineno)

    if storage is None:
        raise ParseError("missing 'storage:' line")
    if initial is None:
        raise ParseError("missing 'initial:' line")
    if not states:
        raise ParseError("missing 'states:' line")

    transitions: list[Transition] = []
    for lineno, source, constraints, op, target in raw_transitions:
        if source not in states or target not in states:
            raise UnknownStateError(f"undeclared state on line {lineno}")
        _check_symbols(storage, constraints, op, lineno)
        transitions.extend(make_transitions(storage, source, constraints, op, target))

    return StorageAutomaton(
        storage=storage,
        states=tuple(states),
        initial=initial,
        transitions=tuple(transitions),
        final=final,
        universal=frozenset(universal),
    )


def _parse_trans_line(rest: str, lineno: int):
    m = re.fullmatch(r"(\S+)\s*(\[(?P<tests>[^\]]*)\])?\s*(?P<body>.*)", rest)
    if not m:
        raise ParseError(f"bad transition line: {rest!r}", line=lineno)
    source = m.group(1)
    constraints = parse_test_constraints(m.group("tests") or "", lineno)
    body = m.group("body").strip()
    parts = body.rsplit(None, 1)
    if len(parts) != 2:
        raise ParseError(f"transition needs an op and a target state: {rest!r}", line=lineno)
    op_text, target = parts
    op = parse_op(op_text.strip())
    return lineno, source, constraints, op, target


def _check_symbols(storage, constraints, op, lineno) -> None:
    for test in constraints:
        if not test_well_typed(storage, test):
            raise UnknownSymbolError(
                f"test {format_test(test)} does not fit storage "
                f"{format_storage(storage)}",
                line=lineno,
            )
    if not op_well_typed(storage, op):
        raise UnsupportedOpError(
            f"op {format_op(op)} does not fit storage {format_storage(storage)} "
            f"(line {lineno})"
        )


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def _vector_constraints(storage: StorageExpr, vec: TestVector) -> list[str]:
    """Compress a total vector back to the minimal constraint syntax.

    Satisfiable vectors pin exactly one top symbol per pushdown level, so
    printing the true top (plus empty-test polarities) reconstructs the
    vector exactly when re-expanded.
    """
    from .storage import Counter, Pushdown, PushdownInv, ZCounter

    assigned = dict(vec)
    items: list[str] = []

    def nest(depth: int, text: str) -> str:
        for _ in range(depth):
            text = f"inner({text})"
        return text

    def wrap(depth: int, test: TestId) -> TestId:
        for _ in range(depth):
            test = Inner(test)
        return test

    expr: StorageExpr = storage
    depth = 0
    while isinstance(expr, (Pushdown, PushdownInv)):
        true_syms = [s for s in expr.alphabet if assigned[wrap(depth, Top(s))]]
        items.append(nest(depth, f"top={true_syms[0]}"))
        expr = expr.inner
        depth += 1
    if isinstance(expr, ZCounter):
        val = "true" if assigned[wrap(depth, Empty())] else "false"
        items.append(nest(depth, f"empty={val}"))
    else:
        assert isinstance(expr, Counter)
    return items


def format_automaton(aut: StorageAutomaton) -> str:
    lines = [
        f"storage: {format_storage(aut.storage)}",
        f"states: {' '.join(aut.states)}",
        f"initial: {aut.initial}",
    ]
    if aut.final is not None:
        lines.append(f"final: {aut.final}")
    for st in aut.states:
        if st in aut.universal:
            lines.append(f"mode: {st} universal")
    for tr in aut.transitions:
        tests = " ".join(_vector_constraints(aut.storage, tr.tests))
        lines.append(f"trans: {tr.source} [{tests}] {format_op(tr.op)} {tr.target}")
    return "\n".join(lines) + "\n"


def run_successor_config(
    aut: StorageAutomaton, tr: Transition, config: StorageConfig
) -> StorageConfig | None:
    """Apply one transition if its tests match and its op is defined."""
    if tr.tests != config_outcomes(aut.storage, config):
        return None
    return apply_op(aut.storage, tr.op, config)

"""The storage-type algebra: counters, zero-test counters, and pushdowns of storages.

A storage type is a set of configurations together with a finite family of
total tests and partial operations, plus a distinguished initial
configuration.  Two base types are provided:

* ``Counter`` -- a pushdown over the one-letter alphabet ``{_}``; a stack of
  ``n+1`` bottom symbols is identified with the natural number ``n``, so the
  initial counter is 0 and ``pop`` is undefined at 0.
* ``ZCounter`` -- the same, extended with an emptiness test that holds
  exactly at counter value 0.

Two operators build new storage types from an inner one:

* ``Pushdown(alphabet, inner)`` -- nonempty stacks of (symbol, inner
  configuration) pairs with ``push``/``pop``/``stay`` operations.
* ``PushdownInv(alphabet, inner)`` -- the same, except ``pop`` is replaced
  by an inverse push, applicable only when the two topmost inner
  configurations coincide.

Operations are exact partial functions: ``apply_op`` returns ``None`` when
an operation is undefined on a configuration, which signals that a
transition is inapplicable, not a fault.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import IllTypedError, ParseError, UnknownSymbolError

#: The distinguished bottom symbol, written ``_`` in all text formats.
BOTTOM = "_"


# ---------------------------------------------------------------------------
# Storage expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Counter:
    """Counter without zero test (unary pushdown)."""


@dataclass(frozen=True)
class ZCounter:
    """Counter with zero test."""


@dataclass(frozen=True)
class Pushdown:
    """Pushdown of an inner storage type."""

    alphabet: tuple[str, ...]
    inner: "StorageExpr"

    def __post_init__(self) -> None:
        _check_alphabet(self.alphabet)


@dataclass(frozen=True)
class PushdownInv:
    """Pushdown of an inner storage with inverse push instead of pop."""

    alphabet: tuple[str, ...]
    inner: "StorageExpr"

    def __post_init__(self) -> None:
        _check_alphabet(self.alphabet)


StorageExpr = Union[Counter, ZCounter, Pushdown, PushdownInv]


def _check_alphabet(alphabet: tuple[str, ...]) -> None:
    if not alphabet:
        raise IllTypedError("pushdown alphabet must be nonempty")
    if BOTTOM not in alphabet:
        raise IllTypedError(f"pushdown alphabet must contain '{BOTTOM}'")
    if len(set(alphabet)) != len(alphabet):
        raise IllTypedError("pushdown alphabet has duplicate symbols")


# ---------------------------------------------------------------------------
# Configurations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CounterVal:
    """Configuration of ``Counter``/``ZCounter``: the counter value."""

    value: int


@dataclass(frozen=True)
class StackVal:
    """Configuration of a pushdown operator; the last entry is the top."""

    entries: tuple[tuple[str, "StorageConfig"], ...]


StorageConfig = Union[CounterVal, StackVal]


def initial_config(expr: StorageExpr) -> StorageConfig:
    if isinstance(expr, (Counter, ZCounter)):
        return CounterVal(0)
    return StackVal(((BOTTOM, initial_config(expr.inner)),))


def config_well_typed(expr: StorageExpr, config: StorageConfig) -> bool:
    if isinstance(expr, (Counter, ZCounter)):
        return isinstance(config, CounterVal) and config.value >= 0
    if not isinstance(config, StackVal) or not config.entries:
        return False
    return all(
        sym in expr.alphabet and config_well_typed(expr.inner, inner)
        for sym, inner in config.entries
    )


# ---------------------------------------------------------------------------
# Tests and operations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Top:
    """Is the topmost symbol equal to ``symbol``?"""

    symbol: str


@dataclass(frozen=True)
class Empty:
    """Is the counter 0?  Only ``ZCounter`` carries this test."""


@dataclass(frozen=True)
class Inner:
    """An inner-storage test applied to the topmost inner configuration."""

    test: "TestId"


TestId = Union[Top, Empty, Inner]


@dataclass(frozen=True)
class PushSym:
    """Base-counter push (increment); the symbol must be the bottom symbol."""

    symbol: str


@dataclass(frozen=True)
class Pop:
    """Remove the topmost symbol/entry; undefined at height 1 / counter 0."""


@dataclass(frozen=True)
class Id:
    """Total identity; well typed on every storage."""


@dataclass(frozen=True)
class PushPair:
    """Push ``symbol`` paired with a copy of the topmost inner configuration."""

    symbol: str


@dataclass(frozen=True)
class InvPush:
    """Inverse push: remove the top entry when it duplicates the one below."""

    symbol: str


@dataclass(frozen=True)
class Stay:
    """Apply an inner operation to the topmost inner configuration."""

    op: "OpId"


OpId = Union[PushSym, Pop, Id, PushPair, InvPush, Stay]


def tests_of(expr: StorageExpr) -> tuple[TestId, ...]:
    """The full test set of a storage type, in canonical order."""
    if isinstance(expr, Counter):
        return (Top(BOTTOM),)
    if isinstance(expr, ZCounter):
        return (Top(BOTTOM), Empty())
    return tuple(Top(sym) for sym in expr.alphabet) + tuple(
        Inner(t) for t in tests_of(expr.inner)
    )


def ops_of(expr: StorageExpr) -> tuple[OpId, ...]:
    """A canonical generating set of operations (identity included via stay)."""
    if isinstance(expr, (Counter, ZCounter)):
        return (PushSym(BOTTOM), Pop(), Id())
    removes: tuple[OpId, ...]
    if isinstance(expr, Pushdown):
        removes = (Pop(),)
    else:
        removes = tuple(InvPush(sym) for sym in expr.alphabet)
    return (
        tuple(PushPair(sym) for sym in expr.alphabet)
        + tuple(Stay(f) for f in ops_of(expr.inner))
        + removes
    )


def test_well_typed(expr: StorageExpr, test: TestId) -> bool:
    if isinstance(test, Top):
        if isinstance(expr, (Counter, ZCounter)):
            return test.symbol == BOTTOM
        return test.symbol in expr.alphabet
    if isinstance(test, Empty):
        return isinstance(expr, ZCounter)
    if isinstance(test, Inner):
        return isinstance(expr, (Pushdown, PushdownInv)) and test_well_typed(
            expr.inner, test.test
        )
    return False


def op_well_typed(expr: StorageExpr, op: OpId) -> bool:
    if isinstance(op, Id):
        return True
    if isinstance(expr, (Counter, ZCounter)):
        if isinstance(op, PushSym):
            return op.symbol == BOTTOM
        return isinstance(op, Pop)
    if isinstance(op, PushPair):
        return op.symbol in expr.alphabet
    if isinstance(op, Stay):
        return op_well_typed(expr.inner, op.op)
    if isinstance(op, Pop):
        return isinstance(expr, Pushdown)
    if isinstance(op, InvPush):
        return isinstance(expr, PushdownInv) and op.symbol in expr.alphabet
    return False


def eval_test(expr: StorageExpr, test: TestId, config: StorageConfig) -> bool:
    """Evaluate a test; tests are total."""
    if not test_well_typed(expr, test):
        raise IllTypedError(f"test {format_test(test)} ill-typed for {format_storage(expr)}")
    if isinstance(test, Top):
        if isinstance(config, CounterVal):
            return True  # the only symbol is the bottom symbol
        return config.entries[-1][0] == test.symbol
    if isinstance(test, Empty):
        assert isinstance(config, CounterVal)
        return config.value == 0
    assert isinstance(test, Inner) and isinstance(config, StackVal)
    assert isinstance(expr, (Pushdown, PushdownInv))
    return eval_test(expr.inner, test.test, config.entries[-1][1])


def apply_op(expr: StorageExpr, op: OpId, config: StorageConfig) -> StorageConfig | None:
    """Apply an operation; returns ``None`` where the partial function is undefined."""
    if not op_well_typed(expr, op):
        raise IllTypedError(f"op {format_op(op)} ill-typed for {format_storage(expr)}")
    if isinstance(op, Id):
        return config
    if isinstance(config, CounterVal):
        if isinstance(op, PushSym):
            return CounterVal(config.value + 1)
        assert isinstance(op, Pop)
        return CounterVal(config.value - 1) if config.value >= 1 else None
    assert isinstance(config, StackVal)
    assert isinstance(expr, (Pushdown, PushdownInv))
    entries = config.entries
    top_sym, top_inner = entries[-1]
    if isinstance(op, PushPair):
        return StackVal(entries + ((op.symbol, top_inner),))
    if isinstance(op, Stay):
        new_inner = apply_op(expr.inner, op.op, top_inner)
        if new_inner is None:
            return None
        return StackVal(entries[:-1] + ((top_sym, new_inner),))
    if isinstance(op, Pop):
        return StackVal(entries[:-1]) if len(entries) >= 2 else None
    assert isinstance(op, InvPush)
    if len(entries) >= 2 and top_sym == op.symbol and top_inner == entries[-2][1]:
        return StackVal(entries[:-1])
    return None


# ---------------------------------------------------------------------------
# Test vectors
# ---------------------------------------------------------------------------

#: A total assignment over ``tests_of(expr)``, in that canonical order.
TestVector = tuple[tuple[TestId, bool], ...]


def config_outcomes(expr: StorageExpr, config: StorageConfig) -> TestVector:
    """The full test outcome vector of a configuration."""
    return tuple((t, eval_test(expr, t, config)) for t in tests_of(expr))


def satisfiable_vectors(expr: StorageExpr) -> tuple[TestVector, ...]:
    """All total test vectors satisfied by at least one configuration.

    Exactly one top test holds per pushdown level, and the inner component
    ranges over the inner storage's satisfiable vectors; this keeps the
    don't-care expansion linear in the number of configuration shapes
    instead of exponential in the number of tests.
    """
    if isinstance(expr, Counter):
        return (((Top(BOTTOM), True),),)
    if isinstance(expr, ZCounter):
        return (
            ((Top(BOTTOM), True), (Empty(), True)),
            ((Top(BOTTOM), True), (Empty(), False)),
        )
    vectors = []
    for sym in expr.alphabet:
        tops = tuple((Top(s), s == sym) for s in expr.alphabet)
        for inner_vec in satisfiable_vectors(expr.inner):
            inner_part = tuple((Inner(t), val) for t, val in inner_vec)
            vectors.append(tops + inner_part)
    return tuple(vectors)


# ---------------------------------------------------------------------------
# Text formats
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"[A-Za-z0-9_']+")


def parse_storage(text: str) -> StorageExpr:
    """Parse the storage grammar ``C | Z | P{s1,...,sn}(E) | Pinv{s1,...,sn}(E)``."""
    expr, pos = _parse_storage(text, 0)
    pos = _skip_ws(text, pos)
    if pos != len(text):
        raise ParseError(f"trailing input in storage expression: {text[pos:]!r}", col=pos)
    return expr


build_storage = parse_storage


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _parse_storage(text: str, pos: int) -> tuple[StorageExpr, int]:
    pos = _skip_ws(text, pos)
    if text.startswith("Pinv", pos):
        return _parse_pushdown(text, pos + 4, PushdownInv)
    if text.startswith("P", pos):
        return _parse_pushdown(text, pos + 1, Pushdown)
    if text.startswith("C", pos):
        return Counter(), pos + 1
    if text.startswith("Z", pos):
        return ZCounter(), pos + 1
    raise ParseError(f"expected storage expression at {text[pos:]!r}", col=pos)


def _parse_pushdown(text: str, pos: int, cls) -> tuple[StorageExpr, int]:
    pos = _skip_ws(text, pos)
    if pos >= len(text) or text[pos] != "{":
        raise ParseError("expected '{' with the pushdown alphabet", col=pos)
    end = text.find("}", pos)
    if end < 0:
        raise ParseError("unterminated pushdown alphabet", col=pos)
    symbols = tuple(s.strip() for s in text[pos + 1 : end].split(",") if s.strip())
    for sym in symbols:
        if not _TOKEN_RE.fullmatch(sym):
            raise UnknownSymbolError(f"bad symbol {sym!r} in alphabet", col=pos)
    pos = _skip_ws(text, end + 1)
    if pos >= len(text) or text[pos] != "(":
        raise ParseError("expected '(' with the inner storage", col=pos)
    inner, pos = _parse_storage(text, pos + 1)
    pos = _skip_ws(text, pos)
    if pos >= len(text) or text[pos] != ")":
        raise ParseError("expected ')' after the inner storage", col=pos)
    return cls(symbols, inner), pos + 1


def format_storage(expr: StorageExpr) -> str:
    if isinstance(expr, Counter):
        return "C"
    if isinstance(expr, ZCounter):
        return "Z"
    head = "P" if isinstance(expr, Pushdown) else "Pinv"
    return f"{head}{{{','.join(expr.alphabet)}}}({format_storage(expr.inner)})"


def parse_op(text: str) -> OpId:
    """Parse ``push(s) | pushsym(s) | pop | id | invpush(s) | stay(f)``."""
    op, pos = _parse_op(text, 0)
    pos = _skip_ws(text, pos)
    if pos != len(text):
        raise ParseError(f"trailing input in operation: {text[pos:]!r}", col=pos)
    return op


def _parse_op(text: str, pos: int) -> tuple[OpId, int]:
    pos = _skip_ws(text, pos)
    m = _TOKEN_RE.match(text, pos)
    if not m:
        raise ParseError(f"expected operation at {text[pos:]!r}", col=pos)
    head = m.group(0)
    pos = m.end()
    if head == "pop":
        return Pop(), pos
    if head == "id":
        return Id(), pos
    if head in ("push", "pushsym", "invpush"):
        sym, pos = _parse_paren_token(text, pos)
        if head == "push":
            return PushPair(sym), pos
        if head == "pushsym":
            return PushSym(sym), pos
        return InvPush(sym), pos
    if head == "stay":
        pos = _skip_ws(text, pos)
        if pos >= len(text) or text[pos] != "(":
            raise ParseError("expected '(' after stay", col=pos)
        inner, pos = _parse_op(text, pos + 1)
        pos = _skip_ws(text, pos)
        if pos >= len(text) or text[pos] != ")":
            raise ParseError("expected ')' closing stay", col=pos)
        return Stay(inner), pos + 1
    raise ParseError(f"unknown operation {head!r}", col=pos)


def _parse_paren_token(text: str, pos: int) -> tuple[str, int]:
    pos = _skip_ws(text, pos)
    if pos >= len(text) or text[pos] != "(":
        raise ParseError("expected '(symbol)'", col=pos)
    pos = _skip_ws(text, pos + 1)
    m = _TOKEN_RE.match(text, pos)
    if not m:
        raise ParseError("expected a symbol", col=pos)
    pos = _skip_ws(text, m.end())
    if pos >= len(text) or text[pos] != ")":
        raise ParseError("expected ')'", col=pos)
    return m.group(0), pos + 1


def format_op(op: OpId) -> str:
    if isinstance(op, Pop):
        return "pop"
    if isinstance(op, Id):
        return "id"
    if isinstance(op, PushPair):
        return f"push({op.symbol})"
    if isinstance(op, PushSym):
        return f"pushsym({op.symbol})"
    if isinstance(op, InvPush):
        return f"invpush({op.symbol})"
    assert isinstance(op, Stay)
    return f"stay({format_op(op.op)})"


def format_test(test: TestId) -> str:
    if isinstance(test, Top):
        return f"top={test.symbol}"
    if isinstance(test, Empty):
        return "empty"
    assert isinstance(test, Inner)
    return f"inner({format_test(test.test)})"


def format_config(expr: StorageExpr, config: StorageConfig) -> str:
    if isinstance(config, CounterVal):
        return str(config.value)
    assert isinstance(expr, (Pushdown, PushdownInv))
    return "".join(
        f"({sym},{format_config(expr.inner, inner)})" for sym, inner in config.entries
    )

"""Storage algebra: parsing, exact step semantics, partiality."""

from __future__ import annotations

import itertools
import random

import pytest

from hoca.errors import IllTypedError, ParseError
from hoca.storage import (
    BOTTOM,
    Counter,
    CounterVal,
    Empty,
    Id,
    Inner,
    InvPush,
    Pop,
    PushPair,
    Pushdown,
    PushdownInv,
    PushSym,
    StackVal,
    Stay,
    Top,
    ZCounter,
    apply_op,
    config_outcomes,
    eval_test,
    format_storage,
    initial_config,
    ops_of,
    parse_op,
    parse_storage,
    satisfiable_vectors,
    tests_of as storage_tests_of,
)


def stack(*entries):
    return StackVal(tuple((s, CounterVal(n)) for s, n in entries))


def test_parse_base_cases():
    assert parse_storage("Z") == ZCounter()
    assert parse_storage("C") == Counter()
    assert parse_storage("P{_,0,1}(C)") == Pushdown(("_", "0", "1"), Counter())
    assert parse_storage("Pinv{_,0,1}(Z)") == PushdownInv(("_", "0", "1"), ZCounter())


def test_parse_roundtrip():
    for text in ("Z", "C", "P{_,0,1}(C)", "Pinv{_,a}(Z)", "P{_}(P{_,0}(Z))"):
        expr = parse_storage(text)
        assert parse_storage(format_storage(expr)) == expr


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_storage("P{_,0,1}(C")
    with pytest.raises(ParseError):
        parse_storage("Q")
    with pytest.raises(IllTypedError):
        parse_storage("P{0,1}(C)")  # bottom symbol missing


def test_apply_op_examples():
    assert apply_op(Counter(), Pop(), CounterVal(0)) is None
    p = Pushdown(("_", "0", "1"), Counter())
    assert apply_op(p, PushPair("1"), stack(("_", 0))) == stack(("_", 0), ("1", 0))
    pinv = PushdownInv(("_",), Counter())
    assert apply_op(pinv, InvPush("_"), stack(("_", 3), ("_", 3))) == stack(("_", 3))
    assert apply_op(pinv, InvPush("_"), stack(("_", 3), ("_", 2))) is None


def test_pop_on_pushdowninv_is_ill_typed():
    pinv = PushdownInv(("_",), Counter())
    with pytest.raises(IllTypedError):
        apply_op(pinv, Pop(), stack(("_", 0), ("_", 0)))


def test_eval_test_examples():
    assert eval_test(ZCounter(), Empty(), CounterVal(0)) is True
    assert eval_test(ZCounter(), Empty(), CounterVal(2)) is False
    p = Pushdown(("_", "0", "1"), Counter())
    assert eval_test(p, Top("1"), stack(("_", 2), ("1", 0))) is True
    pz = Pushdown(("_", "0", "1"), ZCounter())
    assert eval_test(pz, Inner(Empty()), stack(("_", 2), ("1", 0))) is True


def test_op_parse_roundtrip():
    from hoca.storage import format_op

    for text in ("pop", "id", "push(1)", "pushsym(_)", "invpush(0)", "stay(pop)", "stay(stay(pushsym(_)))"):
        assert format_op(parse_op(text)) == text


def enumerate_configs(expr, max_height, max_counter):
    if isinstance(expr, (Counter, ZCounter)):
        return [CounterVal(n) for n in range(max_counter + 1)]
    inner = enumerate_configs(expr.inner, max_height, max_counter)
    out = []
    for h in range(1, max_height + 1):
        for syms in itertools.product(expr.alphabet, repeat=h):
            for inners in itertools.product(inner, repeat=h):
                out.append(StackVal(tuple(zip(syms, inners))))
    return out


def defined_by_definition(expr, op, config) -> bool:
    """Independent partiality predicate, written straight off the definitions."""
    if isinstance(op, Id):
        return True
    if isinstance(config, CounterVal):
        if isinstance(op, PushSym):
            return True
        return config.value >= 1  # pop
    if isinstance(op, PushPair):
        return True
    if isinstance(op, Pop):
        return len(config.entries) >= 2
    if isinstance(op, InvPush):
        return (
            len(config.entries) >= 2
            and config.entries[-1][0] == op.symbol
            and config.entries[-1][1] == config.entries[-2][1]
        )
    if isinstance(op, Stay):
        return defined_by_definition(expr.inner, op.op, config.entries[-1][1])
    raise AssertionError(op)


@pytest.mark.parametrize(
    "expr,height,counter",
    [
        (Counter(), 3, 4),
        (ZCounter(), 3, 4),
        (Pushdown(("_", "a"), Counter()), 4, 3),
        (PushdownInv(("_", "a"), ZCounter()), 4, 3),
        (Pushdown(("_",), Pushdown(("_", "a"), ZCounter())), 2, 2),
    ],
)
def test_partiality_exhaustive(expr, height, counter):
    for config in enumerate_configs(expr, height, counter):
        for op in ops_of(expr):
            got = apply_op(expr, op, config)
            assert (got is not None) == defined_by_definition(expr, op, config)


def test_apply_is_pure():
    expr = Pushdown(("_", "a"), ZCounter())
    config = stack(("_", 1), ("a", 2))
    op = Stay(Pop())
    assert apply_op(expr, op, config) == apply_op(expr, op, config)
    assert config == stack(("_", 1), ("a", 2))


def test_satisfiable_vectors_cover_all_outcomes():
    rng = random.Random(5)
    for expr in (ZCounter(), Pushdown(("_", "a"), ZCounter()), PushdownInv(("_", "0", "1"), Counter())):
        vectors = set(satisfiable_vectors(expr))
        for config in enumerate_configs(expr, 2, 2):
            assert config_outcomes(expr, config) in vectors
        # and every satisfiable vector is hit by some small config
        seen = {config_outcomes(expr, c) for c in enumerate_configs(expr, 2, 2)}
        assert seen == vectors
        assert len(vectors) >= 1
        rng.random()


def test_tests_of_shapes():
    assert storage_tests_of(Counter()) == (Top(BOTTOM),)
    assert storage_tests_of(ZCounter()) == (Top(BOTTOM), Empty())
    pz = Pushdown(("_", "a"), ZCounter())
    assert storage_tests_of(pz) == (Top("_"), Top("a"), Inner(Top("_")), Inner(Empty()))


def test_initial_configs():
    assert initial_config(ZCounter()) == CounterVal(0)
    assert initial_config(Pushdown(("_", "a"), Counter())) == stack(("_", 0))

"""Storage-simulation passes: reachable original-state sets are preserved."""

from __future__ import annotations

import random

import pytest

from gen import random_storage_automaton
from hoca.automaton import StorageAutomaton, make_transitions
from hoca.errors import UnsupportedOpError
from hoca.oracle import Caps, decide_reachability
from hoca.storage import (
    Counter,
    Id,
    InvPush,
    Pop,
    PushPair,
    Pushdown,
    PushdownInv,
    PushSym,
    Stay,
    Top,
    ZCounter,
)
from hoca.transforms import eliminate_level2_symbols, invpush_to_pop, pop_to_invpush

P3Z = Pushdown(("_", "0", "1"), ZCounter())
P3C = Pushdown(("_", "0", "1"), Counter())
PINV_C = PushdownInv(("_", "0", "1"), Counter())
PINV_Z = PushdownInv(("_", "0", "1"), ZCounter())


def verdict_map(aut: StorageAutomaton, originals, caps: Caps):
    return {q: decide_reachability(aut, q, caps) for q in originals}


def assert_preserved(aut, out, in_caps, out_caps, context):
    lhs = verdict_map(aut, aut.states, in_caps)
    rhs = verdict_map(out, aut.states, out_caps)
    for q in aut.states:
        if lhs[q] is None or rhs[q] is None:
            continue
        assert lhs[q] == rhs[q], (context, q, lhs, rhs)


def test_elim_symbols_transition_free():
    aut = StorageAutomaton(storage=P3Z, states=("q0",), initial="q0", transitions=())
    out = eliminate_level2_symbols(aut)
    caps = Caps((4,), 16, 5000)
    assert decide_reachability(out, "q0", caps) is True


def test_elim_symbols_single_push():
    trans = make_transitions(P3Z, "q0", {Top("_"): True}, PushPair("1"), "q1")
    aut = StorageAutomaton(storage=P3Z, states=("q0", "q1"), initial="q0", transitions=trans)
    out = eliminate_level2_symbols(aut)
    caps = Caps((6,), 16, 20_000)
    assert decide_reachability(out, "q1", caps) is True


def test_elim_symbols_random_equivalence():
    rng = random.Random(179)
    for trial in range(50):
        aut = random_storage_automaton(rng, P3Z, max_q=3, max_trans=8)
        out = eliminate_level2_symbols(aut)
        assert_preserved(
            aut, out, Caps((5,), 8, 40_000), Caps((5,), 8 * 3 + 4, 150_000), ("elim", trial)
        )


def test_elim_symbols_rejects_wrong_storage():
    aut = StorageAutomaton(storage=P3C, states=("q0",), initial="q0", transitions=())
    with pytest.raises(UnsupportedOpError):
        eliminate_level2_symbols(aut)


def test_pop_to_invpush_transition_free():
    aut = StorageAutomaton(storage=P3C, states=("q0", "q1"), initial="q0", transitions=())
    out = pop_to_invpush(aut)
    assert isinstance(out.storage, PushdownInv)
    caps = Caps((4,), 8, 4000)
    assert decide_reachability(out, "q0", caps) is True
    assert decide_reachability(out, "q1", caps) is False


def test_pop_to_invpush_push_then_pop():
    trans = []
    trans += make_transitions(P3C, "q0", {Top("_"): True}, PushPair("1"), "q1")
    trans += make_transitions(P3C, "q1", {Top("1"): True}, Pop(), "q2")
    aut = StorageAutomaton(storage=P3C, states=("q0", "q1", "q2"), initial="q0", transitions=tuple(trans))
    out = pop_to_invpush(aut)
    caps = Caps((12,), 8, 30_000)
    assert decide_reachability(out, "q2", caps) is True


def test_pop_to_invpush_pop_after_counter_moves():
    # the popped entry carries counter changes that the unwind must undo
    trans = []
    trans += make_transitions(P3C, "q0", {Top("_"): True}, PushPair("1"), "q1")
    trans += make_transitions(P3C, "q1", {Top("1"): True}, Stay(PushSym("_")), "q2")
    trans += make_transitions(P3C, "q2", {Top("1"): True}, Pop(), "q3")
    aut = StorageAutomaton(
        storage=P3C, states=("q0", "q1", "q2", "q3"), initial="q0", transitions=tuple(trans)
    )
    out = pop_to_invpush(aut)
    caps = Caps((16,), 10, 60_000)
    assert decide_reachability(out, "q3", caps) is True


@pytest.mark.parametrize("storage", [P3C, P3Z])
def test_pop_to_invpush_random_equivalence(storage):
    rng = random.Random(181)
    for trial in range(40):
        aut = random_storage_automaton(rng, storage, max_q=3, max_trans=7)
        out = pop_to_invpush(aut)
        assert_preserved(
            aut, out, Caps((5,), 10, 40_000), Caps((17,), 14, 250_000), ("p2i", trial)
        )


@pytest.mark.parametrize("storage", [PINV_C, PINV_Z])
def test_invpush_to_pop_random_equivalence(storage):
    rng = random.Random(191)
    for trial in range(40):
        aut = random_storage_automaton(rng, storage, max_q=3, max_trans=7)
        out = invpush_to_pop(aut)
        assert_preserved(
            aut, out, Caps((5,), 10, 40_000), Caps((17,), 14, 250_000), ("i2p", trial)
        )


def test_invpush_to_pop_transition_free():
    aut = StorageAutomaton(storage=PINV_C, states=("q0",), initial="q0", transitions=())
    out = invpush_to_pop(aut)
    assert isinstance(out.storage, Pushdown)
    assert decide_reachability(out, "q0", Caps((4,), 8, 4000)) is True


def test_roundtrip_preserves_reachability():
    rng = random.Random(193)
    for trial in range(20):
        aut = random_storage_automaton(rng, P3C, max_q=3, max_trans=5)
        rt = invpush_to_pop(pop_to_invpush(aut))
        assert_preserved(
            aut, rt, Caps((4,), 8, 30_000), Caps((38,), 12, 400_000), ("roundtrip", trial)
        )


def test_output_size_polynomial():
    rng = random.Random(197)
    for _ in range(10):
        for storage, passes in ((P3Z, (eliminate_level2_symbols,)), (P3C, (pop_to_invpush,)),
                                (PINV_C, (invpush_to_pop,))):
            aut = random_storage_automaton(rng, storage, max_q=3, max_trans=8)
            k = max(1, len(aut.transitions))
            for fn in passes:
                out = fn(aut)
                bound = 10 * len(aut.states) * len(storage.alphabet) * k
                assert len(out.states) <= bound, (fn.__name__, len(out.states), bound)


def test_aux_state_naming_is_deterministic():
    rng = random.Random(199)
    aut = random_storage_automaton(rng, P3C, max_q=3, max_trans=6)
    assert pop_to_invpush(aut) == pop_to_invpush(aut)
    assert invpush_to_pop(pop_to_invpush(aut)) == invpush_to_pop(pop_to_invpush(aut))

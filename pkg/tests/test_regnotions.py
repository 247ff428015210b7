"""Unary alternating automata and 2-store membership."""

from __future__ import annotations

import random

import pytest

from hoca.errors import UnknownStateError
from hoca.regnotions import (
    TwoStoreAutomaton,
    UnaryAfa,
    afa_unary_membership,
    divisibility_afa,
    parse_two_store,
    two_store_membership,
)


def test_afa_accept_all():
    afa = UnaryAfa(("s",), "s", frozenset({"s"}), (("s", "s"),))
    assert all(afa_unary_membership(afa, m) for m in range(8))


def test_afa_no_accepting_rejects_all():
    afa = UnaryAfa(("s", "t"), "s", frozenset(), (("s", "t"),), universal=frozenset({"t"}))
    assert not any(afa_unary_membership(afa, m) for m in range(8))


def test_afa_divisible_by_three():
    afa = divisibility_afa(3)
    for m in range(7):
        assert afa_unary_membership(afa, m) == (m % 3 == 0)


def test_afa_universal_needs_all_branches():
    # from u both branches must accept the remaining word
    afa = UnaryAfa(
        ("u", "a", "b"),
        "u",
        frozenset({"a"}),
        (("u", "a"), ("u", "b"), ("a", "a"), ("b", "a")),
        universal=frozenset({"u"}),
    )
    # after one letter: both a and b must accept the rest; b accepts length>=1 only
    assert not afa_unary_membership(afa, 1)
    assert afa_unary_membership(afa, 2)


def prime_tsa(primes) -> TwoStoreAutomaton:
    """Accepts (_, v1)...(_, vn) iff n = len(primes) and p_i divides v_i.

    Entries are consumed from the top, so the chain checks the last prime
    first.
    """
    n = len(primes)
    states = tuple(f"g{i}" for i in range(n + 1))
    afas = {f"div{p}": divisibility_afa(p) for p in primes}
    transitions = tuple(
        (f"g{i}", "_", f"div{primes[n - 1 - i]}", f"g{i+1}") for i in range(n)
    )
    return TwoStoreAutomaton(states, frozenset({f"g{n}"}), afas, transitions)


def test_two_store_case1_empty_config():
    # fully consuming the configuration lands in case 1: empty rest, q in F
    tsa = prime_tsa((2,))
    assert two_store_membership(tsa, "g0", (("_", 4),)) is True
    # a state outside F with the same consumption is rejected
    assert two_store_membership(tsa, "g1", (("_", 4),)) is False

    with pytest.raises(UnknownStateError):
        two_store_membership(tsa, "nope", (("_", 0),))


def test_two_store_existential_failing_afa():
    tsa = prime_tsa((2,))
    assert not two_store_membership(tsa, "g0", (("_", 3),))


def test_two_store_prime_fixture():
    tsa = prime_tsa((2, 5))
    assert two_store_membership(tsa, "g0", (("_", 6), ("_", 10)))
    assert not two_store_membership(tsa, "g0", (("_", 5), ("_", 10)))
    assert not two_store_membership(tsa, "g0", (("_", 6), ("_", 11)))
    assert not two_store_membership(tsa, "g0", (("_", 6),))


def test_two_store_universal_vacuous():
    tsa = TwoStoreAutomaton(
        ("u", "f"),
        frozenset({"u", "f"}),
        {"all": UnaryAfa(("s",), "s", frozenset({"s"}), (("s", "s"),))},
        (),
        universal=frozenset({"u"}),
    )
    # no matching transitions: the universal quantifier is vacuously true,
    # but the configuration is only consumed down to length 0 at q in F
    assert two_store_membership(tsa, "u", (("_", 1),)) is True


def test_two_store_universal_conjunction():
    good = UnaryAfa(("s",), "s", frozenset({"s"}), (("s", "s"),))
    bad = UnaryAfa(("s",), "s", frozenset(), ())
    tsa = TwoStoreAutomaton(
        ("u", "f"),
        frozenset({"f"}),
        {"good": good, "bad": bad},
        (("u", "_", "good", "f"), ("u", "_", "bad", "f")),
        universal=frozenset({"u"}),
    )
    # the failing branch blocks the universal state
    assert not two_store_membership(tsa, "u", (("_", 2),))


def nfa_run_over_entries(tsa: TwoStoreAutomaton, state, config) -> bool:
    """Plain NFA semantics over the entry sequence, for the cross-check."""
    current = {state}
    for sym, counter in reversed(config):
        nxt = set()
        for q, s, name, p in tsa.transitions:
            if q in current and s == sym and afa_unary_membership(tsa.afas[name], counter):
                nxt.add(p)
        current = nxt
    return bool(current & tsa.accepting)


def test_existential_tsa_equals_nfa_run():
    rng = random.Random(211)
    for _ in range(50):
        n_states = rng.randint(1, 3)
        states = tuple(f"q{i}" for i in range(n_states))
        afas = {"d2": divisibility_afa(2), "d3": divisibility_afa(3)}
        transitions = tuple(
            (rng.choice(states), rng.choice(("_", "a")), rng.choice(("d2", "d3")), rng.choice(states))
            for _ in range(rng.randint(0, 5))
        )
        tsa = TwoStoreAutomaton(
            states, frozenset(rng.sample(states, k=rng.randint(0, n_states))), afas, transitions
        )
        for _ in range(10):
            config = tuple(
                (rng.choice(("_", "a")), rng.randint(0, 6))
                for _ in range(rng.randint(1, 3))
            )
            q = rng.choice(states)
            assert two_store_membership(tsa, q, config) == nfa_run_over_entries(tsa, q, config)


def test_pair_set_not_captured_by_corpus():
    """The equal-counters set is tree-regular but beyond the corpus automata."""
    from hoca.trees import encode, ta_membership
    from test_trees import pair_ta

    ta = pair_ta()
    corpus = [prime_tsa((2,)), prime_tsa((2, 5)), prime_tsa((3, 2))]
    for tsa in corpus:
        start = tsa.states[0]
        agrees = True
        for m in range(9):
            want = True  # (m, m) pairs are all in the target set
            got = two_store_membership(tsa, start, (("_", m), ("_", m)))
            if got != want:
                agrees = False
        for m1 in range(4):
            for m2 in range(4):
                if m1 == m2:
                    continue
                if two_store_membership(tsa, start, (("_", m1), ("_", m2))):
                    agrees = False
        assert not agrees
    # while the tree automaton nails it exactly
    for m in range(9):
        assert ta_membership(ta, encode(("q", (("_", m), ("_", m)))))


def test_parse_two_store_format():
    text = """\
afa d2 states: r0 r1
afa d2 initial: r0
afa d2 accept: r0
afa d2 trans: r0 -> r1
afa d2 trans: r1 -> r0
states: g0 g1
accept: g1
trans: g0 (_, d2) g1
"""
    tsa = parse_two_store(text)
    assert two_store_membership(tsa, "g0", (("_", 4),))
    assert not two_store_membership(tsa, "g0", (("_", 3),))

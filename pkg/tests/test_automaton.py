"""Automaton file format and successor computation."""

from __future__ import annotations

import pytest

from hoca.automaton import (
    StorageAutomaton,
    format_automaton,
    make_transitions,
    parse_automaton,
    successors,
)
from hoca.errors import ParseError, UnknownStateError, UnsupportedOpError
from hoca.storage import CounterVal, Pop, Pushdown, StackVal, Top, ZCounter, initial_config

EXAMPLE = """\
# tiny example
storage: P{_,0,1}(C)
states: q0 q1 q2
initial: q0
final: q2
trans: q0 [top=_ ] push(1) q1
trans: q1 [top=1] stay(pop) q1
trans: q1 [top=1] pop q2
"""


def test_parse_example():
    aut = parse_automaton(EXAMPLE)
    assert aut.states == ("q0", "q1", "q2")
    assert aut.initial == "q0"
    assert aut.final == "q2"
    assert len(aut.transitions) == 3
    assert aut.all_existential


def test_format_roundtrip():
    aut = parse_automaton(EXAMPLE)
    again = parse_automaton(format_automaton(aut))
    assert again.transitions == aut.transitions
    assert again.storage == aut.storage


def test_dont_care_expansion():
    text = """\
storage: P{_,a}(Z)
states: q0 q1
initial: q0
trans: q0 pop q1
"""
    aut = parse_automaton(text)
    # 2 top symbols x 2 inner-empty polarities
    assert len(aut.transitions) == 4


def test_mode_lines():
    text = """\
storage: Z
states: q0 q1
initial: q0
mode: q0 universal
trans: q0 [empty=true] pushsym(_) q1
"""
    aut = parse_automaton(text)
    assert aut.universal == frozenset({"q0"})
    assert not aut.all_existential


def test_undeclared_state_rejected():
    text = "storage: Z\nstates: q0\ninitial: q0\ntrans: q0 pop q9\n"
    with pytest.raises(UnknownStateError):
        parse_automaton(text)


def test_ill_typed_op_rejected():
    text = "storage: P{_,0,1}(C)\nstates: q0 q1\ninitial: q0\ntrans: q0 [top=_] stay(stay(pop)) q1\n"
    with pytest.raises(UnsupportedOpError):
        parse_automaton(text)


def test_unsatisfiable_tests_rejected():
    text = "storage: Z\nstates: q0\ninitial: q0\ntrans: q0 [top=a] id q0\n"
    with pytest.raises(ParseError):
        parse_automaton(text)


def test_successors_examples():
    storage = Pushdown(("_",), ZCounter())
    empty_aut = StorageAutomaton(
        storage=storage, states=("q0",), initial="q0", transitions=()
    )
    assert successors(empty_aut, "q0", initial_config(storage)) == []

    trans = make_transitions(storage, "q0", {Top("_"): True}, Pop(), "q1")
    aut = StorageAutomaton(
        storage=storage, states=("q0", "q1"), initial="q0", transitions=trans
    )
    height1 = StackVal((("_", CounterVal(0)),))
    assert successors(aut, "q0", height1) == []  # pop undefined at height 1
    height2 = StackVal((("_", CounterVal(0)), ("_", CounterVal(2))))
    succ = successors(aut, "q0", height2)
    assert len(succ) == 1
    assert succ[0][1] == "q1"
    assert succ[0][2] == height1

"""Bounded regular reachability against tree-automaton target sets."""

from __future__ import annotations

import random

from gen import random_hocs2
from hoca.hoca2 import INITIAL_L2, Hocs2, L2Transition, validate_l2_run, push, to_storage_automaton
from hoca.oracle import Caps, reach_oracle
from hoca.regreach import bounded_post_star, bounded_pre_star, summary_interface
from hoca.summaries import build_summary_dfa
from hoca.trees import TreeAutomaton, encode, ta_intersect, ta_membership, validity_ta

CAPS = Caps((3,), 3, 10_000)


def state_ta(alphabet, states, accept_states) -> TreeAutomaton:
    """Encodings of configurations whose control state is in the given set."""
    base = validity_ta(alphabet, states)
    rules = tuple(
        (lbl, ls, rs, s)
        for (lbl, ls, rs, s) in base.node_rules
        if s != "acc" or lbl in accept_states
    )
    return TreeAutomaton(base.states, base.leaf_rules, rules, base.accepting)


def empty_ta() -> TreeAutomaton:
    return TreeAutomaton(frozenset({"x"}), (), (), frozenset())


def test_pre_star_trivial_target():
    aut = Hocs2(("_", "a"), ("q0", "qt"), "q0", (L2Transition("q0", "_", push("a"), "qt"),))
    targets = state_ta(aut.alphabet, aut.states, {"qt"})
    res = bounded_pre_star(aut, targets, CAPS)
    assert res.verdicts[("q0", INITIAL_L2)] is True
    run = res.witnesses[("q0", INITIAL_L2)]
    validate_l2_run(aut, run)
    assert ta_membership(targets, encode((run.states[-1], run.configs[-1])))


def test_pre_star_empty_target():
    rng = random.Random(139)
    for _ in range(5):
        aut = random_hocs2(rng, max_q=2, max_sym=2, max_trans=5)
        res = bounded_pre_star(aut, empty_ta(), CAPS)
        assert res.verdicts[(aut.initial, INITIAL_L2)] is False
        assert res.members == ()


def test_pre_star_agrees_with_reach_oracle():
    rng = random.Random(149)
    for _ in range(40):
        aut = random_hocs2(rng, max_q=3, max_sym=2, max_trans=6)
        target_state = rng.choice(aut.states)
        targets = state_ta(aut.alphabet, aut.states, {target_state})
        res = bounded_pre_star(aut, targets, CAPS)
        oracle = reach_oracle(to_storage_automaton(aut), target_state, CAPS)
        # both sides explore exactly the cap-bounded graph
        assert res.verdicts[(aut.initial, INITIAL_L2)] == oracle.found


def test_post_star_seed_initial():
    rng = random.Random(151)
    for _ in range(10):
        aut = random_hocs2(rng, max_q=2, max_sym=2, max_trans=6)
        init_only = seed_config_ta(aut)
        res = bounded_post_star(aut, init_only, CAPS)
        # forward closure from the initial configuration only
        reachable = explicit_forward(aut, CAPS)
        assert set(res.members) == reachable


def seed_config_ta(aut: Hocs2) -> TreeAutomaton:
    """A tree automaton accepting exactly the initial configuration's encoding."""
    rules = [
        ("_", "leaf", None, "stk"),
        (aut.initial, "stk", None, "acc"),
    ]
    return TreeAutomaton(
        frozenset({"leaf", "stk", "acc"}),
        (("_", "leaf"),),
        tuple(rules),
        frozenset({"acc"}),
    )


def explicit_forward(aut: Hocs2, caps: Caps):
    from hoca.hoca2 import successors_l2

    seen = {(aut.initial, INITIAL_L2)}
    queue = list(seen)
    while queue:
        st, cfg = queue.pop()
        for _, nst, ncf in successors_l2(aut, st, cfg):
            if len(ncf) > caps.height_at(0) or any(n > caps.max_counter for _, n in ncf):
                continue
            if (nst, ncf) not in seen:
                seen.add((nst, ncf))
                queue.append((nst, ncf))
    return seen


def test_post_star_empty_seed():
    aut = Hocs2(("_",), ("q0",), "q0", ())
    res = bounded_post_star(aut, empty_ta(), CAPS)
    assert res.members == ()
    assert res.verdicts[("q0", INITIAL_L2)] is False


def test_pre_post_duality_on_singletons():
    rng = random.Random(157)
    for _ in range(15):
        aut = random_hocs2(rng, max_q=2, max_sym=2, max_trans=6)
        seeds = seed_config_ta(aut)
        fwd = bounded_post_star(aut, seeds, CAPS)
        # c in post*({init}) iff init in pre*({c}); spot-check a few members
        members = list(fwd.members)[:5]
        for state, cfg in members:
            single = single_config_ta(state, cfg)
            back = bounded_pre_star(aut, single, CAPS, queries=[(aut.initial, INITIAL_L2)])
            assert back.verdicts[(aut.initial, INITIAL_L2)] is True


def single_config_ta(state, cfg) -> TreeAutomaton:
    """Tree automaton for exactly one configuration encoding."""
    tree = encode((state, cfg))
    rules = []
    leaf_rules = []
    counter = 0

    def build(node):
        nonlocal counter
        name = f"n{counter}"
        counter += 1
        if node.is_leaf:
            leaf_rules.append((node.label, name))
            return name
        ls = build(node.left) if node.left is not None else None
        rs = build(node.right) if node.right is not None else None
        rules.append((node.label, ls, rs, name))
        return name

    root = build(tree)
    states = frozenset(f"n{i}" for i in range(counter))
    return TreeAutomaton(states, tuple(leaf_rules), tuple(rules), frozenset({root}))


def test_witness_soundness():
    rng = random.Random(163)
    for _ in range(20):
        aut = random_hocs2(rng, max_q=3, max_sym=2, max_trans=6)
        target_state = rng.choice(aut.states)
        targets = state_ta(aut.alphabet, aut.states, {target_state})
        res = bounded_pre_star(aut, targets, CAPS)
        for query, run in res.witnesses.items():
            validate_l2_run(aut, run)
            assert (run.states[0], run.configs[0]) == query
            assert ta_membership(targets, encode((run.states[-1], run.configs[-1])))


def test_cap_monotonicity_of_in_verdicts():
    rng = random.Random(167)
    bigger = Caps((4,), 4, 20_000)
    for _ in range(15):
        aut = random_hocs2(rng, max_q=2, max_sym=2, max_trans=6)
        target_state = rng.choice(aut.states)
        targets = state_ta(aut.alphabet, aut.states, {target_state})
        small_res = bounded_pre_star(aut, targets, CAPS)
        big_res = bounded_pre_star(aut, targets, bigger)
        if small_res.verdicts[(aut.initial, INITIAL_L2)]:
            assert big_res.verdicts[(aut.initial, INITIAL_L2)]


def test_summary_interface_matches():
    rng = random.Random(173)
    aut = random_hocs2(rng, max_q=2, max_sym=1, max_trans=5)
    assert summary_interface(aut) == build_summary_dfa(aut)

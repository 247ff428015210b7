"""Returns/loops summaries: table computation, the simulation, the summary DFA."""

from __future__ import annotations

import random

from gen import random_hocs2
from hoca.hoca2 import (
    DEC,
    INC,
    NOP,
    POP,
    Hocs2,
    L2Transition,
    normalize,
    oracle_loops,
    oracle_returns,
    push,
    successors_l2,
    to_storage_automaton,
)
from hoca.oracle import Caps, decide_reachability
from hoca.summaries import (
    INF,
    ReturnTable,
    _sweep,
    bounds,
    build_summary_dfa,
    compute_return_table,
    counter_word,
    generate_pda,
    inf_symbol,
    loops_query,
    reach_hoca,
    ret_query,
    summary_value,
)


def test_bounds_examples():
    a = Hocs2(("_", "a", "b"), ("q0", "q1", "q2", "q3"), "q0", ())
    assert bounds(a) == bounds(a).__class__(h0=48, k0=2304, n0=96)
    b = Hocs2(("_",), ("q0",), "q0", ())
    assert (bounds(b).h0, bounds(b).k0, bounds(b).n0) == (1, 1, 2)
    c = Hocs2(("_", "a"), ("q0", "q1"), "q0", ())
    assert (bounds(c).h0, bounds(c).k0, bounds(c).n0) == (8, 64, 16)


def test_counter_word():
    assert counter_word(3, 0) == (0,)
    assert counter_word(3, 2) == (2, 1, 0)
    assert counter_word(3, 5) == (4, 4, 3, 2, 1, 0)  # overflow symbol is 4


def test_generate_pda_inc_only():
    aut = Hocs2(("_",), ("q0",), "q0", (L2Transition("q0", "_", INC, "q0"),))
    table = ReturnTable.all_infinite(aut, bounds(aut).h0)
    pds = generate_pda(aut, table)
    h0 = bounds(aut).h0
    # pushes b1 on b0, the overflow symbol on b_h0 and on itself; nothing else
    assert all(len(r.push) == 2 for r in pds.rules)
    tops = sorted((r.top, r.push[0]) for r in pds.rules)
    assert tops == [(0, 1), (1, inf_symbol(h0)), (inf_symbol(h0), inf_symbol(h0))]


def test_generate_pda_dec_excludes_counter_zero():
    aut = Hocs2(("_",), ("q0", "q1"), "q0", (L2Transition("q0", "_", DEC, "q1"),))
    h0 = bounds(aut).h0
    pds = generate_pda(aut, ReturnTable.all_infinite(aut, h0))
    assert all(len(r.push) == 0 for r in pds.rules)
    assert sorted(r.top for r in pds.rules) == list(range(1, h0 + 1)) + [inf_symbol(h0)]


def test_generate_pda_all_infinite_push_is_empty():
    aut = Hocs2(("_",), ("q0", "q1"), "q0", (L2Transition("q0", "_", push("_"), "q1"),))
    pds = generate_pda(aut, ReturnTable.all_infinite(aut, bounds(aut).h0))
    assert pds.rules == ()


def test_table_no_pops_all_infinite():
    rng = random.Random(73)
    for _ in range(20):
        aut = random_hocs2(rng, max_q=3, max_sym=2, max_trans=6)
        aut = Hocs2(
            aut.alphabet,
            aut.states,
            aut.initial,
            tuple(t for t in aut.transitions if t.op != POP),
        )
        table = compute_return_table(aut)
        assert all(v == INF for v in table.values)


def push_dec_pop() -> Hocs2:
    return Hocs2(
        ("_", "1"),
        ("q0", "q1", "q2"),
        "q0",
        (
            L2Transition("q0", "_", push("1"), "q1"),
            L2Transition("q1", "1", DEC, "q1"),
            L2Transition("q1", "1", POP, "q2"),
        ),
    )


def test_table_push_dec_pop():
    table = compute_return_table(push_dec_pop())
    assert table.get("1", "q1", "q2") == 0
    assert table.get("_", "q0", "q2") == INF  # no pop consumes a bottom-symbol entry


def test_table_forced_two_decrements():
    aut = Hocs2(
        ("_", "a"),
        ("q0", "q1", "q2", "q3", "q4"),
        "q0",
        (
            L2Transition("q0", "_", push("a"), "q1"),
            L2Transition("q1", "a", DEC, "q2"),
            L2Transition("q2", "a", DEC, "q3"),
            L2Transition("q3", "a", POP, "q4"),
        ),
    )
    table = compute_return_table(aut)
    assert table.get("a", "q1", "q4") == 2
    pairs, complete = oracle_returns(aut, "a", 2, budget=3, max_counter=10)
    assert complete and ("q1", "q4") in pairs
    pairs1, complete1 = oracle_returns(aut, "a", 1, budget=3, max_counter=10)
    assert complete1 and ("q1", "q4") not in pairs1


def test_table_monotone_across_sweeps():
    rng = random.Random(79)
    for _ in range(25):
        aut = random_hocs2(rng, max_q=3, max_sym=2, max_trans=10)
        prev = None
        for k in range(1, 6):
            table = compute_return_table(aut, max_sweeps=k)
            if prev is not None:
                assert all(a <= b for a, b in zip(table.values, prev.values))
            prev = table


def test_fixpoint_is_stable():
    rng = random.Random(83)
    for _ in range(25):
        aut = random_hocs2(rng, max_q=3, max_sym=2, max_trans=10)
        table = compute_return_table(aut)
        b = bounds(aut)
        pops = {}
        for tr in aut.transitions:
            if tr.op == POP:
                pops.setdefault((tr.source, tr.top), []).append(tr.target)
        again = _sweep(aut, generate_pda(aut, table), b, pops)
        assert again == table


def test_early_stop_equals_full_run():
    rng = random.Random(89)
    for _ in range(10):
        aut = random_hocs2(rng, max_q=2, max_sym=1, max_trans=6)
        k0 = bounds(aut).k0  # at most 16 here
        assert compute_return_table(aut) == compute_return_table(aut, max_sweeps=k0)


def test_reach_hoca_trivial_cases():
    aut = Hocs2(("_",), ("q0", "q1"), "q0", ())
    norm, drain = normalize(aut, "q0")
    assert reach_hoca(norm, drain)
    norm2, drain2 = normalize(aut, "q1")
    assert not reach_hoca(norm2, drain2)


def test_reach_hoca_push_dec_pop():
    norm, drain = normalize(push_dec_pop(), "q2")
    assert reach_hoca(norm, drain)


def test_reach_hoca_agrees_with_oracle_sample():
    rng = random.Random(97)
    caps = Caps((5,), 12, 30_000)
    checked = 0
    for _ in range(80):
        aut = random_hocs2(rng)
        target = rng.choice(aut.states)
        norm, drain = normalize(aut, target)
        verdict = decide_reachability(to_storage_automaton(norm), drain, caps)
        if verdict is None:
            continue
        assert reach_hoca(norm, drain) == verdict, (aut, target)
        checked += 1
    assert checked >= 70


def test_ret_query_rules():
    aut = Hocs2(("_",), ("p", "q"), "p", ())
    table = ReturnTable(("_",), ("p", "q"), 1, (0, INF, 1, INF))
    assert ret_query(table, "_", "p", "p", 0)
    assert not ret_query(table, "_", "p", "q", 5)
    assert not ret_query(table, "_", "q", "p", 0)
    assert ret_query(table, "_", "q", "p", 1)


def test_ret_query_matches_oracle_sample():
    rng = random.Random(101)
    from hoca.hoca2 import oracle_ret_inf

    for _ in range(25):
        aut = random_hocs2(rng, max_q=3, max_sym=2, max_trans=8)
        table = compute_return_table(aut)
        h0 = bounds(aut).h0
        for sym in aut.alphabet:
            for i in (0, 1, 2, h0, h0 + 2):
                pairs, ok = oracle_ret_inf(aut, sym, i)
                if not ok:
                    continue
                expected = {
                    (p, q)
                    for p in aut.states
                    for q in aut.states
                    if ret_query(table, sym, p, q, i)
                }
                assert pairs == expected, (aut, sym, i)


def test_loops_query_examples():
    aut = Hocs2(("_",), ("q0", "q1"), "q0", ())
    table = compute_return_table(aut)
    diag = frozenset({("q0", "q0"), ("q1", "q1")})
    assert loops_query(aut, table, "_", 0) == diag
    assert loops_query(aut, table, "_", 3) == diag

    aut2 = Hocs2(
        ("_",),
        ("q0", "q1"),
        "q0",
        (L2Transition("q0", "_", INC, "q0"), L2Transition("q0", "_", DEC, "q1")),
    )
    table2 = compute_return_table(aut2)
    for i in range(4):
        assert ("q0", "q1") in loops_query(aut2, table2, "_", i)
        oracle_pairs, _ = oracle_loops(aut2, "_", i, budget=4, max_counter=i + 8)
        assert ("q0", "q1") in oracle_pairs


def test_summary_dfa_transition_free():
    aut = Hocs2(("_",), ("q",), "q", ())
    dfa = build_summary_dfa(aut)
    assert dfa.num_states == 1
    value = dfa.state_after(0)
    assert value == ((("_", frozenset(), frozenset({("q", "q")}))),)


def test_summary_dfa_push_dec_pop_constant():
    aut = push_dec_pop()
    dfa = build_summary_dfa(aut)
    for n in range(bounds(aut).n0 + 3):
        assert dfa.state_after(n) == dfa.state_after(0)


def test_summary_dfa_size_bound():
    rng = random.Random(103)
    for _ in range(15):
        aut = random_hocs2(rng, max_q=2, max_sym=2, max_trans=8)
        dfa = build_summary_dfa(aut)
        ns = len(aut.alphabet)
        nq = len(aut.states)
        assert dfa.num_states <= 2 * (ns * nq * nq + 1)


def restricted_reach_pairs(aut: Hocs2, p: str, sym: str, counter: int, max_counter: int, max_steps=60_000):
    """(state, top symbol) pairs reachable at the entry's height without popping it."""
    base = (("_", 0), (sym, counter))
    seen = {(p, base)}
    queue = [(p, base)]
    found = {(p, sym)}
    head = 0
    complete = True
    while head < len(queue):
        st, cfg = queue[head]
        head += 1
        for _, nst, ncf in successors_l2(aut, st, cfg):
            if len(ncf) < 2:
                continue  # popping the starting entry ends the simulated scope
            if ncf[-1][1] > max_counter or len(ncf) > 2 + 12:
                complete = False
                continue
            if (nst, ncf) in seen:
                continue
            if len(seen) >= max_steps:
                return found, False
            seen.add((nst, ncf))
            if len(ncf) == 2:
                found.add((nst, ncf[-1][0]))
            queue.append((nst, ncf))
    return found, complete


def test_simulation_invariant_against_restricted_oracle():
    from hoca.pds import reach_pda

    rng = random.Random(107)
    checked = 0
    for _ in range(60):
        aut = random_hocs2(rng, max_q=3, max_sym=2, max_trans=8)
        table = compute_return_table(aut)
        pds = generate_pda(aut, table)
        h0 = bounds(aut).h0
        sym = rng.choice(aut.alphabet)
        i = rng.randint(0, 3)
        p = rng.choice(aut.states)
        result = None
        prev = None
        for scale in (1, 2, 4):
            pairs, ok = restricted_reach_pairs(aut, p, sym, i, (i + 10) * scale)
            if ok or pairs == prev:
                result = pairs
                break
            prev = pairs
        if result is None:
            continue
        word = counter_word(h0, i)
        for r in aut.states:
            for tau in aut.alphabet:
                got = reach_pda(pds, ((p, sym), word), (r, tau))
                assert got == ((r, tau) in result), (aut, p, sym, i, r, tau)
        checked += 1
    assert checked >= 45

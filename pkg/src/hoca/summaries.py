"""Returns/loops summaries for level-2 counter automata.

The centrepiece is the reduction of a restricted level-2 automaton to a
level-1 pushdown system that simulates behaviour within a single level-2
entry: the stack tracks the top counter in unary with height-indexed
symbols ``b0..b_h0`` (capped by an overflow symbol), increments push,
decrements pop, and a level-2 push followed by a complete return of the
pushed entry collapses into an internal move guarded by the returns table.

The returns table ``a[sym, p, q]`` holds the least top counter from which a
(p -> q) return on ``sym`` exists; it is computed by the fixpoint sweep
that repeatedly regenerates the pushdown system from the current table and
re-scans which counters admit each pop.  Stabilization is guaranteed by the
bounds ``h0 = |S||Q|^2`` (counters), ``k0 = |S|^2|Q|^4`` (height budget)
and ``n0 = 2|S||Q|^2`` (loops), so the sweep may stop at the first
fixpoint with an unchanged result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import IllFormedTableError
from .hoca2 import Hocs2
from .pds import (
    PAutomaton,
    Pds,
    PdsRule,
    accepts,
    all_configs_automaton,
    pre_star,
    singleton_automaton,
)
from .storage import BOTTOM

INF = math.inf


@dataclass(frozen=True)
class Bounds:
    """Stabilization bounds derived from the automaton size."""

    h0: int
    k0: int
    n0: int


def bounds(aut: Hocs2) -> Bounds:
    ns = len(aut.alphabet)
    nq = len(aut.states)
    return Bounds(h0=ns * nq * nq, k0=ns * ns * nq**4, n0=2 * ns * nq * nq)


@dataclass(frozen=True)
class ReturnTable:
    """``values[sym, p, q]`` is the least counter admitting a (p -> q) return, else inf."""

    alphabet: tuple[str, ...]
    states: tuple[str, ...]
    h0: int
    values: tuple[float, ...]  # row-major over (sym, p, q)

    def __post_init__(self) -> None:
        expected = len(self.alphabet) * len(self.states) ** 2
        if len(self.values) != expected:
            raise IllFormedTableError(
                f"table has {len(self.values)} entries, expected {expected}"
            )
        for v in self.values:
            if v != INF and not (isinstance(v, int) and 0 <= v <= self.h0):
                raise IllFormedTableError(f"table value {v!r} outside 0..{self.h0}, inf")

    def _index(self, sym: str, p: str, q: str) -> int:
        nq = len(self.states)
        return (
            self.alphabet.index(sym) * nq * nq
            + self.states.index(p) * nq
            + self.states.index(q)
        )

    def get(self, sym: str, p: str, q: str) -> float:
        return self.values[self._index(sym, p, q)]

    @classmethod
    def all_infinite(cls, aut: Hocs2, h0: int) -> "ReturnTable":
        size = len(aut.alphabet) * len(aut.states) ** 2
        return cls(aut.alphabet, aut.states, h0, (INF,) * size)


def ret_query(table: ReturnTable, sym: str, p: str, q: str, counter: int) -> bool:
    """Is (p, q) realized by a return from top entry ``(sym, counter)``?"""
    return counter >= table.get(sym, p, q)


# ---------------------------------------------------------------------------
# The level-1 simulation
# ---------------------------------------------------------------------------

def inf_symbol(h0: int) -> int:
    return h0 + 1


def counter_word(h0: int, n: int) -> tuple[int, ...]:
    """Top-first stack word encoding counter ``n``.

    Bottom-up the stack reads ``b0 b1 .. b_min(n,h0)`` followed by overflow
    symbols for every unit above ``h0``; the top symbol is the capped value.
    """
    bottom_first = list(range(min(n, h0) + 1)) + [inf_symbol(h0)] * max(0, n - h0)
    return tuple(reversed(bottom_first))


def generate_pda(aut: Hocs2, table: ReturnTable) -> Pds:
    """Build the level-1 pushdown system simulating one level-2 entry.

    Controls are (state, top-symbol) pairs.  Decrements pop (except on
    ``b0``, which encodes counter 0 where a decrement is undefined),
    increments push the next height symbol saturating at the overflow
    symbol, level-2 pushes become internal moves to every return target
    the table admits at the current counter, no-ops become internal moves,
    and level-2 pops contribute nothing (they end the simulated entry).
    """
    if table.alphabet != aut.alphabet or table.states != aut.states:
        raise IllFormedTableError("table shape does not match the automaton")
    h0 = table.h0
    inf_sym = inf_symbol(h0)
    alphabet = tuple(range(h0 + 2))
    rules: list[PdsRule] = []
    for tr in aut.transitions:
        src = (tr.source, tr.top)
        kind = tr.op[0]
        if kind == "dec":
            dst = (tr.target, tr.top)
            for i in range(1, h0 + 1):
                rules.append(PdsRule(src, i, dst, ()))
            rules.append(PdsRule(src, inf_sym, dst, ()))
        elif kind == "inc":
            dst = (tr.target, tr.top)
            for i in range(h0):
                rules.append(PdsRule(src, i, dst, (i + 1, i)))
            rules.append(PdsRule(src, h0, dst, (inf_sym, h0)))
            rules.append(PdsRule(src, inf_sym, dst, (inf_sym, inf_sym)))
        elif kind == "nop":
            dst = (tr.target, tr.top)
            for i in range(h0 + 2):
                rules.append(PdsRule(src, i, dst, (i,)))
        elif kind == "push":
            pushed = tr.op[1]
            for r in aut.states:
                least = table.get(pushed, tr.target, r)
                if least == INF:
                    continue
                dst = (r, tr.top)
                for i in range(int(least), h0 + 1):
                    rules.append(PdsRule(src, i, dst, (i,)))
                rules.append(PdsRule(src, inf_sym, dst, (inf_sym,)))
        # kind == "pop": returns are consumed by the caller, no rule
    controls = tuple((q, sym) for q in aut.states for sym in aut.alphabet)
    return Pds(controls, alphabet, tuple(rules))


# ---------------------------------------------------------------------------
# Table computation
# ---------------------------------------------------------------------------

def _accepting_prefixes(pre: PAutomaton, h0: int) -> dict:
    """For each automaton state s, the least i such that the counter-``i``
    word is accepted starting from s (scanning i = 0..h0)."""
    by_key: dict[tuple, set] = {}
    for s, a, t in pre.transitions:
        by_key.setdefault((s, a), set()).add(t)
    least: dict = {}
    # W holds the states from which the word (i, i-1, .., 0) is accepted.
    current: set = set()
    for i in range(h0 + 1):
        tail = pre.accepting if i == 0 else current
        current = {s for s in pre.states if by_key.get((s, i), set()) & tail}
        for s in current:
            least.setdefault(s, i)
    return least


def compute_return_table(aut: Hocs2, max_sweeps: int | None = None) -> ReturnTable:
    """Fixpoint iteration of the table sweeps.

    Each sweep rebuilds the simulation from the current table and records,
    per pop transition and starting (sym, state), the least counter from
    which the pop becomes reachable.  The sweep commits atomically; values
    only decrease across sweeps and the loop stops at the first unchanged
    sweep (the stabilization bound ``k0`` caps the number of useful sweeps).
    """
    b = bounds(aut)
    table = ReturnTable.all_infinite(aut, b.h0)
    pops: dict[tuple[str, str], list[str]] = {}
    for tr in aut.transitions:
        if tr.op[0] == "pop":
            pops.setdefault((tr.source, tr.top), []).append(tr.target)
    limit = b.k0 if max_sweeps is None else max_sweeps
    for _ in range(limit):
        pds = generate_pda(aut, table)
        fresh = _sweep(aut, pds, b, pops)
        if fresh == table:
            return table
        table = fresh
    return table


def _sweep(aut: Hocs2, pds: Pds, b: Bounds, pops) -> ReturnTable:
    nq = len(aut.states)
    values = [INF] * (len(aut.alphabet) * nq * nq)
    for (r, tau), targets in pops.items():
        pre = pre_star(pds, all_configs_automaton(pds, (r, tau)))
        least = _accepting_prefixes(pre, b.h0)
        for si, sym in enumerate(aut.alphabet):
            for pi, p in enumerate(aut.states):
                i = least.get((p, sym))
                if i is None:
                    continue
                for q in targets:
                    idx = si * nq * nq + pi * nq + aut.states.index(q)
                    values[idx] = min(values[idx], i)
    return ReturnTable(aut.alphabet, aut.states, b.h0, tuple(values))


# ---------------------------------------------------------------------------
# Reachability and loops
# ---------------------------------------------------------------------------

def reach_hoca(aut: Hocs2, target: str) -> bool:
    """Control-state reachability for a normalized automaton.

    The automaton is expected to carry the drain gadget for ``target``
    (see ``hoca2.normalize``): the verdict checks that the simulation
    reaches ``(target, bottom)`` from the initial entry at counter 0.
    """
    from .pds import reach_pda

    table = compute_return_table(aut)
    pds = generate_pda(aut, table)
    return reach_pda(pds, ((aut.initial, BOTTOM), (0,)), (target, BOTTOM))


def loops_query(
    aut: Hocs2,
    table: ReturnTable,
    sym: str,
    counter: int,
    pds: Pds | None = None,
) -> frozenset[tuple[str, str]]:
    """State pairs realized by loops at top entry ``(sym, counter)``.

    A loop exists iff the simulation can run from ``((q, sym), w)`` back to
    ``((q', sym), w)`` for the stack word encoding the counter; counters
    above ``n0`` behave like ``n0``.
    """
    b = bounds(aut)
    effective = min(counter, b.n0)
    if pds is None:
        pds = generate_pda(aut, table)
    word = counter_word(b.h0, effective)
    pairs = set()
    for q2 in aut.states:
        goal = ((q2, sym), word)
        pre = pre_star(pds, singleton_automaton(pds, goal))
        for q1 in aut.states:
            if accepts(pre, ((q1, sym), word)):
                pairs.add((q1, q2))
    return frozenset(pairs)


# ---------------------------------------------------------------------------
# The summary word automaton
# ---------------------------------------------------------------------------

#: One summary value: per alphabet symbol, the unbounded return pairs and
#: loop pairs at a given counter.
SummaryValue = tuple[tuple[str, frozenset, frozenset], ...]


@dataclass(frozen=True)
class SummaryDfa:
    """Deterministic unary automaton tracking (returns, loops) per counter.

    After reading ``n`` letters the automaton is in ``state_after(n)``,
    the summary value at counter ``n``; the chain stabilizes at ``n0``.
    """

    values: tuple[SummaryValue, ...]
    chain: tuple[int, ...]  # value index per counter 0..n0
    succ: tuple[int, ...]  # per value, the successor value index
    n0: int

    @property
    def num_states(self) -> int:
        return len(self.values)

    def state_after(self, n: int) -> SummaryValue:
        return self.values[self.chain[min(n, self.n0)]]


def summary_value(
    aut: Hocs2, table: ReturnTable, counter: int, pds: Pds | None = None
) -> SummaryValue:
    items = []
    for sym in aut.alphabet:
        rets = frozenset(
            (p, q)
            for p in aut.states
            for q in aut.states
            if ret_query(table, sym, p, q, counter)
        )
        items.append((sym, rets, loops_query(aut, table, sym, counter, pds)))
    return tuple(items)


def build_summary_dfa(aut: Hocs2) -> SummaryDfa:
    b = bounds(aut)
    table = compute_return_table(aut)
    pds = generate_pda(aut, table)
    values: list[SummaryValue] = []
    chain: list[int] = []
    for i in range(b.n0 + 1):
        value = summary_value(aut, table, i, pds)
        if value not in values:
            values.append(value)
        chain.append(values.index(value))
    succ = [0] * len(values)
    for i in range(b.n0 + 1):
        succ[chain[i]] = chain[min(i + 1, b.n0)]
    return SummaryDfa(tuple(values), tuple(chain), tuple(succ), b.n0)

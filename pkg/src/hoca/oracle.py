"""Bounded explicit-state oracles for storage automata.

These are the independent reference implementations the rest of the package
is validated against: a breadth-first control-state reachability search, an
alternating (attractor-based) variant, and the valid-operation-sequence
check.  All of them are exact on the explored region; caps bound the region
and a ``NotFoundWithinCaps`` outcome never asserts unreachability.

``decide_reachability`` wraps the search in the stabilization protocol:
run, double all caps, and accept "unreachable" only when two consecutive
doublings agree (or when some run exhausted the capped region without
pruning anything, which is already definitive).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _kernels
from .automaton import StorageAutomaton, Transition, successors
from .errors import InvalidTraceError
from .storage import (
    BOTTOM,
    Counter,
    CounterVal,
    Empty,
    Id,
    Inner,
    InvPush,
    OpId,
    Pop,
    PushPair,
    Pushdown,
    PushdownInv,
    PushSym,
    StackVal,
    Stay,
    StorageConfig,
    StorageExpr,
    TestId,
    Top,
    ZCounter,
    apply_op,
    config_outcomes,
    eval_test,
    initial_config,
)


@dataclass(frozen=True)
class Caps:
    """Exploration bounds: pushdown heights per nesting level, counter values, steps."""

    max_pd_height: tuple[int, ...] = (8,)
    max_counter: int = 16
    max_steps: int = 100_000

    def __post_init__(self) -> None:
        heights = self.max_pd_height
        if isinstance(heights, int):
            object.__setattr__(self, "max_pd_height", (heights,))
        if not all(h > 0 for h in self.max_pd_height) or self.max_counter < 0:
            raise ValueError("caps must be positive")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")

    def height_at(self, level: int) -> int:
        return self.max_pd_height[min(level, len(self.max_pd_height) - 1)]

    def doubled(self) -> "Caps":
        return Caps(
            tuple(2 * h for h in self.max_pd_height),
            2 * self.max_counter,
            2 * self.max_steps,
        )


def within_caps(expr: StorageExpr, config: StorageConfig, caps: Caps, level: int = 0) -> bool:
    if isinstance(config, CounterVal):
        return config.value <= caps.max_counter
    assert isinstance(expr, (Pushdown, PushdownInv))
    if len(config.entries) > caps.height_at(level):
        return False
    return all(within_caps(expr.inner, inner, caps, level + 1) for _, inner in config.entries)


@dataclass(frozen=True)
class Trace:
    """A run: (states[i], configs[i]) joined by transitions[i]."""

    states: tuple[str, ...]
    configs: tuple[StorageConfig, ...]
    transitions: tuple[Transition, ...]

    def __len__(self) -> int:
        return len(self.transitions)


def validate_trace(aut: StorageAutomaton, trace: Trace) -> None:
    """Replay a trace through the step semantics; raise if it does not fit."""
    if len(trace.states) != len(trace.configs) or len(trace.transitions) != len(trace.states) - 1:
        raise InvalidTraceError("trace length mismatch")
    for i, tr in enumerate(trace.transitions):
        if tr.source != trace.states[i] or tr.target != trace.states[i + 1]:
            raise InvalidTraceError(f"transition {i} does not join the adjacent states")
        if tr.tests != config_outcomes(aut.storage, trace.configs[i]):
            raise InvalidTraceError(f"test vector of transition {i} does not match")
        nxt = apply_op(aut.storage, tr.op, trace.configs[i])
        if nxt != trace.configs[i + 1]:
            raise InvalidTraceError(f"operation of transition {i} does not produce the next config")


@dataclass(frozen=True)
class OracleResult:
    """Outcome of a bounded search.

    ``found`` distinguishes Reachable from NotFoundWithinCaps; the latter
    does not assert unreachability.  ``complete`` means the whole
    cap-bounded region was explored and nothing was pruned, in which case
    NotFound is definitive.
    """

    found: bool
    trace: Trace | None
    pruned: bool
    steps_exhausted: bool
    visited: int

    @property
    def complete(self) -> bool:
        return not (self.pruned or self.steps_exhausted)


# ---------------------------------------------------------------------------
# Level-2 fast path
# ---------------------------------------------------------------------------

_OP_CODES = {"nop": 0, "push": 1, "pop": 2, "inc": 3, "dec": 4, "invpush": 5}


def _level2_rows(aut: StorageAutomaton):
    """Encode a level-2 counter automaton for the compiled kernel.

    Returns ``(rows, row_transitions, sym_index)`` or ``None`` when the
    automaton is not of that shape (the generic search handles it then).
    """
    storage = aut.storage
    if not isinstance(storage, (Pushdown, PushdownInv)):
        return None
    if not isinstance(storage.inner, (Counter, ZCounter)):
        return None
    has_zero_test = isinstance(storage.inner, ZCounter)
    sym_index = {sym: i for i, sym in enumerate(storage.alphabet)}
    state_index = {st: i for i, st in enumerate(aut.states)}

    rows = []
    row_transitions = []
    for tr in aut.transitions:
        assigned = dict(tr.tests)
        tops = [s for s in storage.alphabet if assigned.get(Top(s))]
        if len(tops) != 1 or not assigned.get(Inner(Top(BOTTOM)), True):
            continue  # unsatisfiable vector: transition is dead
        emp = -1
        if has_zero_test:
            emp = 1 if assigned[Inner(Empty())] else 0
        code = _encode_l2_op(storage, tr.op, sym_index)
        if code is None:
            return None
        rows.append((state_index[tr.source], sym_index[tops[0]], emp, code[0], code[1],
                     state_index[tr.target]))
        row_transitions.append(tr)
    return rows, row_transitions, sym_index, state_index


def _encode_l2_op(storage, op: OpId, sym_index) -> tuple[int, int] | None:
    if isinstance(op, Id):
        return (_OP_CODES["nop"], 0)
    if isinstance(op, PushPair):
        return (_OP_CODES["push"], sym_index[op.symbol])
    if isinstance(op, Pop):
        return (_OP_CODES["pop"], 0)
    if isinstance(op, InvPush):
        return (_OP_CODES["invpush"], sym_index[op.symbol])
    if isinstance(op, Stay):
        inner = op.op
        if isinstance(inner, Id):
            return (_OP_CODES["nop"], 0)
        if isinstance(inner, PushSym):
            return (_OP_CODES["inc"], 0)
        if isinstance(inner, Pop):
            return (_OP_CODES["dec"], 0)
    return None


def _l2_trace(aut: StorageAutomaton, row_transitions, witness) -> Trace:
    states = [aut.initial]
    configs = [initial_config(aut.storage)]
    transitions = []
    for idx in witness:
        tr = row_transitions[idx]
        nxt = apply_op(aut.storage, tr.op, configs[-1])
        assert nxt is not None
        transitions.append(tr)
        states.append(tr.target)
        configs.append(nxt)
    return Trace(tuple(states), tuple(configs), tuple(transitions))


# ---------------------------------------------------------------------------
# Reachability oracles
# ---------------------------------------------------------------------------

def reach_oracle(aut: StorageAutomaton, target: str, caps: Caps) -> OracleResult:
    """Breadth-first control-state reachability from the initial configuration.

    Deterministic: FIFO queue, transitions in declaration order; a found
    trace is minimal-length among cap-respecting witnesses.
    """
    if not aut.all_existential:
        raise ValueError("reach_oracle requires an all-existential automaton")
    encoded = _level2_rows(aut)
    if encoded is not None:
        rows, row_transitions, sym_index, state_index = encoded
        found, pruned, exhausted, visited, witness = _kernels.l2_reach(
            len(aut.states),
            rows,
            state_index[aut.initial],
            sym_index[BOTTOM],
            state_index[target],
            caps.height_at(0),
            caps.max_counter,
            caps.max_steps,
        )
        trace = _l2_trace(aut, row_transitions, witness) if found else None
        return OracleResult(found, trace, pruned, exhausted, visited)
    return _reach_generic(aut, target, caps)


def _reach_generic(aut: StorageAutomaton, target: str, caps: Caps) -> OracleResult:
    start = (aut.initial, initial_config(aut.storage))
    if aut.initial == target:
        return OracleResult(True, Trace((aut.initial,), (start[1],), ()), False, False, 1)
    visited = {start: 0}
    parents: list[tuple[int, Transition | None]] = [(-1, None)]
    queue = [start]
    pruned = False
    head = 0
    while head < len(queue):
        state, config = queue[head]
        cur = visited[(state, config)]
        head += 1
        for tr, nxt_state, nxt_config in successors(aut, state, config):
            key = (nxt_state, nxt_config)
            if key in visited:
                continue
            if not within_caps(aut.storage, nxt_config, caps):
                pruned = True
                continue
            if len(visited) >= caps.max_steps:
                return OracleResult(False, None, pruned, True, len(visited))
            visited[key] = len(parents)
            parents.append((cur, tr))
            if nxt_state == target:
                return OracleResult(
                    True, _generic_trace(aut, parents, queue, key), pruned, False, len(visited)
                )
            queue.append(key)
    return OracleResult(False, None, pruned, False, len(visited))


def _generic_trace(aut, parents, queue, last_key) -> Trace:
    chain: list[Transition] = []
    node = len(parents) - 1
    while node > 0:
        prev, tr = parents[node]
        chain.append(tr)
        node = prev
    chain.reverse()
    states = [aut.initial]
    configs = [initial_config(aut.storage)]
    for tr in chain:
        states.append(tr.target)
        configs.append(apply_op(aut.storage, tr.op, configs[-1]))
    return Trace(tuple(states), tuple(configs), tuple(chain))


def alt_reach_oracle(aut: StorageAutomaton, target: str, caps: Caps) -> OracleResult:
    """Alternating control-state reachability over the cap-bounded graph.

    Computed as a backward attractor: a configuration with the target
    control state wins; an existential configuration wins if some successor
    wins; a universal one wins if it has at least one successor and all of
    them win.  Successors pruned by the caps are treated as absent, which
    makes universal verdicts conservative relative to the unbounded graph.
    """
    start = (aut.initial, initial_config(aut.storage))
    index = {start: 0}
    nodes = [start]
    edges: list[list[int]] = []
    pruned = False
    exhausted = False
    head = 0
    while head < len(nodes):
        state, config = nodes[head]
        head += 1
        out = []
        for _, nxt_state, nxt_config in successors(aut, state, config):
            key = (nxt_state, nxt_config)
            if key not in index:
                if not within_caps(aut.storage, nxt_config, caps):
                    pruned = True
                    continue
                if len(nodes) >= caps.max_steps:
                    exhausted = True
                    continue
                index[key] = len(nodes)
                nodes.append(key)
            out.append(index[key])
        edges.append(out)

    winning = [state == target for state, _ in nodes]
    changed = True
    while changed:
        changed = False
        for i, (state, _) in enumerate(nodes):
            if winning[i]:
                continue
            succs = edges[i]
            if state in aut.universal:
                ok = bool(succs) and all(winning[j] for j in succs)
            else:
                ok = any(winning[j] for j in succs)
            if ok:
                winning[i] = True
                changed = True
    return OracleResult(winning[0], None, pruned, exhausted, len(nodes))


def decide_reachability(
    aut: StorageAutomaton,
    target: str,
    caps: Caps,
    doublings: int = 2,
    alternating: bool = False,
) -> bool | None:
    """Stabilization protocol: ``True``/``False`` verdict or ``None`` (indeterminate).

    "Unreachable" is accepted either when a run explores its whole
    cap-bounded region without pruning, or when the final two doubled runs
    both explored everything below their config caps and agree on NotFound.
    Runs cut short by the step budget never support an unreachable verdict.
    """
    search = alt_reach_oracle if alternating else reach_oracle
    results = []
    current = caps
    for _ in range(doublings + 1):
        res = search(aut, target, current)
        if res.found:
            return True
        if res.complete:
            return False
        results.append(res)
        current = current.doubled()
    if all(not r.steps_exhausted for r in results[-2:]):
        return False
    return None


# ---------------------------------------------------------------------------
# Valid operation sequences
# ---------------------------------------------------------------------------

#: A letter of the valid-sequence language: an operation, or a test with a
#: required outcome (the identity restricted to configurations passing it).
ValLetter = OpId | tuple[TestId, bool]


def val_check(expr: StorageExpr, seq: list[ValLetter]) -> bool:
    """Is the operation/test sequence applicable to the initial configuration?"""
    config = initial_config(expr)
    for letter in seq:
        if isinstance(letter, tuple):
            test, expected = letter
            if eval_test(expr, test, config) != expected:
                return False
        else:
            nxt = apply_op(expr, letter, config)
            if nxt is None:
                return False
            config = nxt
    return True

"""Level-2 counter automata: pushdowns of counters, in restricted form.

Configurations are nonempty sequences of (symbol, counter) pairs; the last
entry is the top.  Operations are restricted to the five forms the
reduction pipeline works with: push a symbol (copying the top counter),
pop, increment/decrement the top counter, and no-op.  ``normalize`` brings
a generic pushdown-of-counter automaton into this form and appends a drain
gadget so that control-state reachability becomes reachability of the
single configuration ``(_, 0)`` in a fresh state.

Run classification (returns and loops) lives here as well: a *return*
consumes the starting top entry exactly once at its final step, a *loop*
comes back to the starting configuration without ever dipping below it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .automaton import StorageAutomaton, Transition, make_transitions
from .errors import (
    IllTypedError,
    InvalidTraceError,
    ParseError,
    UnknownStateError,
    UnsupportedOpError,
)
from .oracle import Caps, OracleResult, Trace, decide_reachability, reach_oracle
from .storage import (
    BOTTOM,
    Counter,
    CounterVal,
    Id,
    Inner,
    Pop,
    PushPair,
    Pushdown,
    PushSym,
    StackVal,
    Stay,
    Top,
)

# ---------------------------------------------------------------------------
# Model
# ---------------------------------------------------------------------------

#: Restricted level-2 operation: ("push", sym) | ("pop",) | ("inc",) |
#: ("dec",) | ("nop",), as a tagged tuple.
L2Op = tuple

POP: L2Op = ("pop",)
INC: L2Op = ("inc",)
DEC: L2Op = ("dec",)
NOP: L2Op = ("nop",)


def push(symbol: str) -> L2Op:
    return ("push", symbol)


#: A configuration: nonempty stack of (symbol, counter), top last.
L2Config = tuple[tuple[str, int], ...]

INITIAL_L2: L2Config = ((BOTTOM, 0),)


def height(config: L2Config) -> int:
    """The number of stack entries."""
    return len(config)


@dataclass(frozen=True)
class L2Transition:
    source: str
    top: str
    op: L2Op
    target: str


@dataclass(frozen=True)
class Hocs2:
    alphabet: tuple[str, ...]
    states: tuple[str, ...]
    initial: str
    transitions: tuple[L2Transition, ...]

    def __post_init__(self) -> None:
        if BOTTOM not in self.alphabet:
            raise IllTypedError(f"alphabet must contain '{BOTTOM}'")
        known = set(self.states)
        if self.initial not in known:
            raise UnknownStateError(f"initial state {self.initial!r} not declared")
        for tr in self.transitions:
            if tr.source not in known or tr.target not in known:
                raise UnknownStateError(f"transition uses undeclared state: {tr}")
            if tr.top not in self.alphabet:
                raise IllTypedError(f"top symbol {tr.top!r} not in the alphabet")
            if tr.op[0] == "push" and tr.op[1] not in self.alphabet:
                raise IllTypedError(f"pushed symbol {tr.op[1]!r} not in the alphabet")


def apply_l2_op(op: L2Op, config: L2Config) -> L2Config | None:
    sym, cnt = config[-1]
    kind = op[0]
    if kind == "nop":
        return config
    if kind == "push":
        return config + ((op[1], cnt),)
    if kind == "pop":
        return config[:-1] if len(config) >= 2 else None
    if kind == "inc":
        return config[:-1] + ((sym, cnt + 1),)
    if kind == "dec":
        return config[:-1] + ((sym, cnt - 1),) if cnt >= 1 else None
    raise IllTypedError(f"unknown level-2 op {op!r}")


def successors_l2(
    aut: Hocs2, state: str, config: L2Config
) -> list[tuple[L2Transition, str, L2Config]]:
    top = config[-1][0]
    out = []
    for tr in aut.transitions:
        if tr.source != state or tr.top != top:
            continue
        nxt = apply_l2_op(tr.op, config)
        if nxt is not None:
            out.append((tr, tr.target, nxt))
    return out


# ---------------------------------------------------------------------------
# Conversions to and from the generic automaton
# ---------------------------------------------------------------------------

def l2_storage(alphabet: tuple[str, ...]) -> Pushdown:
    return Pushdown(alphabet, Counter())


_OP_TO_STORAGE = {
    "pop": Pop(),
    "inc": Stay(PushSym(BOTTOM)),
    "dec": Stay(Pop()),
    "nop": Id(),
}


def to_storage_automaton(aut: Hocs2, final: str | None = None) -> StorageAutomaton:
    storage = l2_storage(aut.alphabet)
    transitions: list[Transition] = []
    for tr in aut.transitions:
        op = PushPair(tr.op[1]) if tr.op[0] == "push" else _OP_TO_STORAGE[tr.op[0]]
        transitions.extend(
            make_transitions(storage, tr.source, {Top(tr.top): True}, op, tr.target)
        )
    return StorageAutomaton(
        storage=storage,
        states=aut.states,
        initial=aut.initial,
        transitions=tuple(transitions),
        final=final,
    )


def _l2_op_from_storage(op) -> L2Op:
    if isinstance(op, PushPair):
        return push(op.symbol)
    if isinstance(op, Pop):
        return POP
    if isinstance(op, Id):
        return NOP
    if isinstance(op, Stay):
        if isinstance(op.op, PushSym):
            return INC
        if isinstance(op.op, Pop):
            return DEC
        if isinstance(op.op, Id):
            return NOP
    raise UnsupportedOpError(f"operation {op!r} has no restricted level-2 form")


def hocs2_from_automaton(aut: StorageAutomaton) -> Hocs2:
    storage = aut.storage
    if not isinstance(storage, Pushdown) or not isinstance(storage.inner, Counter):
        raise IllTypedError("expected a pushdown-of-counter storage: P{...}(C)")
    transitions = []
    for tr in aut.transitions:
        assigned = dict(tr.tests)
        tops = [s for s in storage.alphabet if assigned.get(Top(s))]
        if len(tops) != 1 or not assigned.get(Inner(Top(BOTTOM)), True):
            continue  # unsatisfiable vector, no behaviour
        transitions.append(L2Transition(tr.source, tops[0], _l2_op_from_storage(tr.op), tr.target))
    return Hocs2(storage.alphabet, aut.states, aut.initial, tuple(transitions))


def parse_hocs2(text: str) -> Hocs2:
    from .automaton import parse_automaton

    return hocs2_from_automaton(parse_automaton(text))


def format_hocs2(aut: Hocs2) -> str:
    from .automaton import format_automaton

    return format_automaton(to_storage_automaton(aut))


# ---------------------------------------------------------------------------
# Normalization: drain gadget
# ---------------------------------------------------------------------------

def fresh_state(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "'"
    return name


def normalize(aut: StorageAutomaton | Hocs2, q: str) -> tuple[Hocs2, str]:
    """Append the drain gadget for target ``q``.

    The output automaton reaches the full configuration ``(_, 0)`` in the
    fresh drain state iff ``q`` is reachable in the input: from any
    configuration, decrements and pops always lead down to ``(_, 0)``, and
    the bottom symbol can never change.
    """
    h = aut if isinstance(aut, Hocs2) else hocs2_from_automaton(aut)
    if q not in h.states:
        raise UnknownStateError(f"unknown drain target {q!r}")
    qhat = fresh_state(q + "_drain", set(h.states))
    gadget = []
    for sym in h.alphabet:
        gadget.append(L2Transition(q, sym, NOP, qhat))
    for sym in h.alphabet:
        gadget.append(L2Transition(qhat, sym, POP, qhat))
        gadget.append(L2Transition(qhat, sym, DEC, qhat))
    return (
        Hocs2(h.alphabet, h.states + (qhat,), h.initial, h.transitions + tuple(gadget)),
        qhat,
    )


def reach_oracle_l2(aut: Hocs2, target: str, caps: Caps) -> OracleResult:
    return reach_oracle(to_storage_automaton(aut), target, caps)


def decide_reachability_l2(aut: Hocs2, target: str, caps: Caps, doublings: int = 2):
    return decide_reachability(to_storage_automaton(aut), target, caps, doublings)


# ---------------------------------------------------------------------------
# Runs and their classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class L2Run:
    """A finite run: (states[i], configs[i]) joined by transitions[i]."""

    states: tuple[str, ...]
    configs: tuple[L2Config, ...]
    transitions: tuple[L2Transition, ...]

    def __len__(self) -> int:
        return len(self.transitions)


RETURN = "return"
LOOP = "loop"
NEITHER = "neither"


def validate_l2_run(aut: Hocs2, run: L2Run) -> None:
    if len(run.states) != len(run.configs) or len(run.transitions) != len(run.states) - 1:
        raise InvalidTraceError("run length mismatch")
    if not run.configs:
        raise InvalidTraceError("a run has at least one configuration")
    known = set(aut.transitions)
    for i, tr in enumerate(run.transitions):
        if tr not in known:
            raise InvalidTraceError(f"transition {i} is not part of the automaton")
        if tr.source != run.states[i] or tr.target != run.states[i + 1]:
            raise InvalidTraceError(f"transition {i} does not join the adjacent states")
        if run.configs[i][-1][0] != tr.top:
            raise InvalidTraceError(f"top-symbol test of transition {i} fails")
        if apply_l2_op(tr.op, run.configs[i]) != run.configs[i + 1]:
            raise InvalidTraceError(f"operation of transition {i} does not match")


def classify_run(aut: Hocs2, run: L2Run, base_height: int) -> str:
    """Classify a run as a return, a loop, or neither, relative to ``base_height``.

    The run must start at that height; ``s`` below denotes the stack prefix
    under the starting top entry.  A return ends exactly at ``s`` and never
    visits it earlier; a loop restores the starting storage and never
    visits ``s`` at all.  The empty run is a loop.
    """
    validate_l2_run(aut, run)
    start = run.configs[0]
    end = run.configs[-1]
    if height(start) != base_height:
        return NEITHER
    prefix = start[:-1]
    if run.transitions and end == prefix and all(c != prefix for c in run.configs[:-1]):
        return RETURN
    if end == start and all(c != prefix for c in run.configs):
        return LOOP
    return NEITHER


def run_from_trace(aut: Hocs2, trace: Trace) -> L2Run:
    """Convert a storage-level trace into a level-2 run."""
    configs = tuple(l2_config_from_storage(c) for c in trace.configs)
    transitions = []
    for i, tr in enumerate(trace.transitions):
        assigned = dict(tr.tests)
        tops = [s for s in aut.alphabet if assigned.get(Top(s))]
        transitions.append(
            L2Transition(tr.source, tops[0], _l2_op_from_storage(tr.op), tr.target)
        )
    return L2Run(trace.states, configs, tuple(transitions))


def l2_config_from_storage(config: StackVal) -> L2Config:
    return tuple((sym, inner.value) for sym, inner in config.entries)


def storage_config_from_l2(config: L2Config) -> StackVal:
    return StackVal(tuple((sym, CounterVal(cnt)) for sym, cnt in config))


def format_l2_run(run: L2Run) -> str:
    """One `state | config` line per step."""
    return "\n".join(
        f"{st} | {format_l2_config(cfg)}" for st, cfg in zip(run.states, run.configs)
    ) + "\n"


# ---------------------------------------------------------------------------
# Return/loop oracles (bounded explicit enumeration)
# ---------------------------------------------------------------------------

def oracle_returns(
    aut: Hocs2,
    sym: str,
    counter: int,
    budget: int,
    max_counter: int,
    max_steps: int = 200_000,
) -> tuple[frozenset[tuple[str, str]], bool]:
    """State pairs realized by returns from top entry ``(sym, counter)``.

    ``budget`` bounds the height increase (part of the definition, not an
    approximation); the counter cap and step cap bound the search, and the
    returned flag reports whether the enumeration was exhaustive w.r.t.
    those caps.
    """
    base: L2Config = ((BOTTOM, 0), (sym, counter))
    pairs = set()
    complete = True
    for p in aut.states:
        found, ok = _explore_above(aut, p, base, budget, max_counter, max_steps, returns=True)
        pairs.update((p, q) for q in found)
        complete = complete and ok
    return frozenset(pairs), complete


def oracle_loops(
    aut: Hocs2,
    sym: str,
    counter: int,
    budget: int,
    max_counter: int,
    max_steps: int = 200_000,
) -> tuple[frozenset[tuple[str, str]], bool]:
    """State pairs realized by loops at top entry ``(sym, counter)``."""
    base: L2Config = ((BOTTOM, 0), (sym, counter))
    pairs = set()
    complete = True
    for p in aut.states:
        found, ok = _explore_above(aut, p, base, budget, max_counter, max_steps, returns=False)
        pairs.update((p, q) for q in found)
        complete = complete and ok
    return frozenset(pairs), complete


def _explore_above(aut, start_state, base, budget, max_counter, max_steps, returns):
    """BFS over configs strictly above the prefix of ``base``.

    With ``returns`` set, collect states reached by the single pop that
    descends to the prefix (and do not explore further there); otherwise
    collect states of configurations equal to ``base`` itself.
    """
    max_height = len(base) + budget
    found = set()
    complete = True
    start = (start_state, base)
    visited = {start}
    queue = [start]
    head = 0
    if not returns:
        found.add(start_state)
    while head < len(queue):
        state, config = queue[head]
        head += 1
        for tr, nxt_state, nxt_config in successors_l2(aut, state, config):
            if len(nxt_config) < len(base):
                if returns:
                    found.add(nxt_state)
                continue  # never explore at or below the prefix
            if len(nxt_config) > max_height:
                continue  # outside the height budget by definition
            if nxt_config[-1][1] > max_counter:
                complete = False
                continue
            key = (nxt_state, nxt_config)
            if key in visited:
                continue
            if len(visited) >= max_steps:
                return found, False
            visited.add(key)
            if not returns and nxt_config == base:
                found.add(nxt_state)
            queue.append(key)
    return found, complete


def stabilized_pairs(compute, rounds: int = 4) -> tuple[frozenset, bool]:
    """Run ``compute(scale)`` for doubling scales until two consecutive agree."""
    prev = None
    for i in range(rounds):
        pairs, complete = compute(2**i)
        if prev is not None and pairs == prev:
            return pairs, True
        prev = pairs
    return prev, False


def oracle_ret_inf(
    aut: Hocs2, sym: str, counter: int, base_budget: int = 4, base_counter_cap: int | None = None
) -> tuple[frozenset[tuple[str, str]], bool]:
    """Stabilized estimate of the unbounded-return pair set."""
    if base_counter_cap is None:
        base_counter_cap = counter + 8

    def compute(scale):
        return oracle_returns(aut, sym, counter, base_budget * scale, base_counter_cap * scale)

    return stabilized_pairs(compute)


def oracle_loops_inf(
    aut: Hocs2, sym: str, counter: int, base_budget: int = 4, base_counter_cap: int | None = None
) -> tuple[frozenset[tuple[str, str]], bool]:
    """Stabilized estimate of the unbounded-loop pair set."""
    if base_counter_cap is None:
        base_counter_cap = counter + 8

    def compute(scale):
        return oracle_loops(aut, sym, counter, base_budget * scale, base_counter_cap * scale)

    return stabilized_pairs(compute)


# ---------------------------------------------------------------------------
# Config literals
# ---------------------------------------------------------------------------

_ENTRY_RE = re.compile(r"\(\s*([A-Za-z0-9_']+)\s*,\s*(\d+)\s*\)")


def parse_l2_config(text: str) -> L2Config:
    """Parse a configuration literal like ``(_,0)(1,5)``."""
    entries = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _ENTRY_RE.match(text, pos)
        if not m:
            raise ParseError(f"bad configuration literal at {text[pos:]!r}", col=pos)
        entries.append((m.group(1), int(m.group(2))))
        pos = m.end()
    if not entries:
        raise ParseError("a configuration has at least one entry")
    return tuple(entries)


def format_l2_config(config: L2Config) -> str:
    return "".join(f"({sym},{cnt})" for sym, cnt in config)

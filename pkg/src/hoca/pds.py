"""Level-1 pushdown systems: pre*/post* saturation and reachability queries.

Configurations are pairs ``(control, word)`` with the stack written
top-first; rules rewrite the topmost symbol into at most two symbols (the
first pushed symbol is the new top).  Regular sets of configurations are
represented by automata whose runs start at the control state and read the
stack word; saturation adds transitions to such an automaton until it
denotes ``pre*``/``post*`` of the original language.

The saturation inner loop for ``pre*`` runs on the compiled kernel (with a
pure fallback); ``post*`` is the standard worklist algorithm with epsilon
edges materialized away.  A bounded breadth-first oracle over the
configuration graph is provided for cross-checking.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Hashable, Iterable

from . import _kernels
from .errors import ParseError

State = Hashable
Sym = Hashable
Config = tuple[State, tuple[Sym, ...]]


@dataclass(frozen=True)
class PdsRule:
    state: State
    top: Sym
    target: State
    push: tuple[Sym, ...]  # length 0..2, new top first

    def __post_init__(self) -> None:
        if len(self.push) > 2:
            raise ParseError("rule right-hand side longer than 2 (normalize first)")


@dataclass(frozen=True)
class Pds:
    controls: tuple[State, ...]
    alphabet: tuple[Sym, ...]
    rules: tuple[PdsRule, ...]


@dataclass(frozen=True)
class PAutomaton:
    """A regular set of configurations: runs start at the control state."""

    controls: tuple[State, ...]
    states: tuple[State, ...]
    transitions: frozenset[tuple[State, Sym, State]]
    accepting: frozenset[State]


def accepts(pa: PAutomaton, config: Config) -> bool:
    state, word = config
    current = {state}
    for sym in word:
        current = {t for s, a, t in pa.transitions if s in current and a == sym}
        if not current:
            return False
    return bool(current & pa.accepting)


def successors_pds(pds: Pds, config: Config) -> list[Config]:
    state, word = config
    if not word:
        return []
    out = []
    for rule in pds.rules:
        if rule.state == state and rule.top == word[0]:
            out.append((rule.target, rule.push + word[1:]))
    return out


# ---------------------------------------------------------------------------
# Saturation
# ---------------------------------------------------------------------------

def _standard_form(pds: Pds, pa: PAutomaton) -> PAutomaton:
    """Copy so that no transition enters a control state and all controls exist."""
    controls = set(pds.controls)
    needs_copy = any(t in controls for _, _, t in pa.transitions)
    states = list(pa.states)
    for p in pds.controls:
        if p not in states:
            states.append(p)
    if not needs_copy:
        return PAutomaton(pds.controls, tuple(states), pa.transitions, pa.accepting)
    shadow = {s: ("shadow", s) for s in states}
    trans = {(shadow[s], a, shadow[t]) for s, a, t in pa.transitions}
    for p in pds.controls:
        trans.update((p, a, shadow[t]) for s, a, t in pa.transitions if s == p)
    accepting = {shadow[s] for s in pa.accepting} | (set(pa.accepting) & controls)
    all_states = tuple(states) + tuple(shadow[s] for s in states)
    return PAutomaton(pds.controls, all_states, frozenset(trans), frozenset(accepting))


def pre_star(pds: Pds, pa: PAutomaton) -> PAutomaton:
    """Automaton for the configurations that can reach some member of ``pa``."""
    pa0 = _standard_form(pds, pa)
    states = list(pa0.states)
    state_ix = {s: i for i, s in enumerate(states)}
    syms = list(pds.alphabet)
    for _, a, _ in pa0.transitions:
        if a not in syms:
            syms.append(a)
    sym_ix = {a: i for i, a in enumerate(syms)}

    pop_rules, one_rules, two_rules = [], [], []
    for r in pds.rules:
        p, g, q = state_ix[r.state], sym_ix[r.top], state_ix[r.target]
        if len(r.push) == 0:
            pop_rules.append((p, g, q))
        elif len(r.push) == 1:
            one_rules.append((p, g, q, sym_ix[r.push[0]]))
        else:
            two_rules.append((p, g, q, sym_ix[r.push[0]], sym_ix[r.push[1]]))
    trans = [(state_ix[s], sym_ix[a], state_ix[t]) for s, a, t in pa0.transitions]

    rel = _kernels.prestar(len(states), len(syms), pop_rules, one_rules, two_rules, trans)
    out = frozenset((states[s], syms[a], states[t]) for s, a, t in rel)
    return PAutomaton(pds.controls, tuple(states), out, pa0.accepting)


def post_star(pds: Pds, pa: PAutomaton) -> PAutomaton:
    """Automaton for the configurations reachable from some member of ``pa``."""
    pa0 = _standard_form(pds, pa)
    states = list(pa0.states)
    mid = {}
    for r in pds.rules:
        if len(r.push) == 2:
            key = (r.target, r.push[0])
            if key not in mid:
                mid[key] = ("mid",) + key
                states.append(mid[key])

    rel: set[tuple[State, Sym, State]] = set()
    targets: dict[tuple[State, Sym], set[State]] = defaultdict(set)
    out_of: dict[State, set[tuple[Sym, State]]] = defaultdict(set)
    eps_into: dict[State, set[State]] = defaultdict(set)  # s -> controls with eps edge to s
    eps: set[tuple[State, State]] = set()

    by_head: dict[tuple[State, Sym], list[PdsRule]] = defaultdict(list)
    for r in pds.rules:
        by_head[(r.state, r.top)].append(r)

    worklist: list[tuple[State, Sym, State]] = list(pa0.transitions)
    for key, m in mid.items():
        worklist.append((key[0], key[1], m))

    def add_eps(p: State, q: State) -> None:
        if (p, q) in eps:
            return
        eps.add((p, q))
        eps_into[q].add(p)
        for a, t in list(out_of.get(q, ())):
            worklist.append((p, a, t))

    while worklist:
        t = worklist.pop()
        if t in rel:
            continue
        rel.add(t)
        q, g, s = t
        targets[(q, g)].add(s)
        out_of[q].add((g, s))
        for p in eps_into.get(q, ()):
            worklist.append((p, g, s))
        for r in by_head.get((q, g), ()):
            if len(r.push) == 0:
                add_eps(r.target, s)
            elif len(r.push) == 1:
                worklist.append((r.target, r.push[0], s))
            else:
                worklist.append((mid[(r.target, r.push[0])], r.push[1], s))

    accepting = set(pa0.accepting)
    for p, q in eps:
        if q in accepting:
            accepting.add(p)
    return PAutomaton(pds.controls, tuple(states), frozenset(rel), frozenset(accepting))


# ---------------------------------------------------------------------------
# Reachability queries
# ---------------------------------------------------------------------------

def all_configs_automaton(pds: Pds, target: State) -> PAutomaton:
    """Accepts every configuration whose control state is ``target``."""
    fin = ("all", target)
    trans = {(target, a, fin) for a in pds.alphabet} | {(fin, a, fin) for a in pds.alphabet}
    states = tuple(pds.controls) + ((fin,) if target in pds.controls else (target, fin))
    return PAutomaton(pds.controls, states, frozenset(trans), frozenset({target, fin}))


def singleton_automaton(pds: Pds, config: Config) -> PAutomaton:
    state, word = config
    nodes = [state] + [("w", state, i, word) for i in range(1, len(word) + 1)]
    trans = {(nodes[i], word[i], nodes[i + 1]) for i in range(len(word))}
    states = tuple(pds.controls) + tuple(n for n in nodes if n not in pds.controls)
    return PAutomaton(pds.controls, states, frozenset(trans), frozenset({nodes[-1]}))


def reach_pda(pds: Pds, config: Config, target: State) -> bool:
    """Can the control state ``target`` be reached from ``config``?"""
    if config[0] == target:
        return True
    return accepts(pre_star(pds, all_configs_automaton(pds, target)), config)


def reach_pda_config(pds: Pds, c1: Config, c2: Config) -> bool:
    """Is there a run from configuration ``c1`` to configuration ``c2``?"""
    if c1 == c2:
        return True
    return accepts(pre_star(pds, singleton_automaton(pds, c2)), c1)


# ---------------------------------------------------------------------------
# Bounded explicit oracle
# ---------------------------------------------------------------------------

def bounded_region(pds: Pds, max_len: int) -> list[Config]:
    """All configurations with stack length up to ``max_len``."""
    words: list[tuple[Sym, ...]] = [()]
    frontier: list[tuple[Sym, ...]] = [()]
    for _ in range(max_len):
        frontier = [w + (a,) for w in frontier for a in pds.alphabet]
        words.extend(frontier)
    return [(p, w) for p in pds.controls for w in words]


def region_accept_set(pds: Pds, pa: PAutomaton, max_len: int) -> set[Config]:
    """All accepted configurations with ``|w| <= max_len``, via one trie walk."""
    step: dict[tuple[State, Sym], set[State]] = defaultdict(set)
    for s, a, t in pa.transitions:
        step[(s, a)].add(t)
    accepted: set[Config] = set()

    def walk(control: State, word: tuple[Sym, ...], states: frozenset[State]) -> None:
        if states & pa.accepting:
            accepted.add((control, word))
        if len(word) == max_len:
            return
        for a in pds.alphabet:
            nxt = frozenset().union(*(step.get((s, a), set()) for s in states)) if states else frozenset()
            if nxt:
                walk(control, word + (a,), nxt)

    for p in pds.controls:
        walk(p, (), frozenset({p}))
    return accepted


def prestar_marks(pds: Pds, pa: PAutomaton, max_len: int) -> set[Config]:
    """Configs with ``|w| <= max_len`` that reach ``L(pa)`` inside the bounded graph.

    Computed backward: seeds are the accepted configurations of the region,
    and predecessors are read off the rules directly.
    """
    marked = region_accept_set(pds, pa, max_len)
    worklist = list(marked)
    while worklist:
        state, word = worklist.pop()
        for r in pds.rules:
            if r.target != state:
                continue
            k = len(r.push)
            if word[:k] != r.push:
                continue
            pred = (r.state, (r.top,) + word[k:])
            if len(pred[1]) <= max_len and pred not in marked:
                marked.add(pred)
                worklist.append(pred)
    return marked


def poststar_marks(pds: Pds, pa: PAutomaton, max_len: int) -> set[Config]:
    """Configs with ``|w| <= max_len`` reachable from ``L(pa)`` inside the bounded graph."""
    marked = region_accept_set(pds, pa, max_len)
    worklist = list(marked)
    while worklist:
        config = worklist.pop()
        for succ in successors_pds(pds, config):
            if len(succ[1]) <= max_len and succ not in marked:
                marked.add(succ)
                worklist.append(succ)
    return marked


def stabilized_marks(compute, query_len: int, start_len: int, rounds: int = 4):
    """Grow the exploration bound until the marks restricted to ``query_len`` agree."""
    prev = None
    length = start_len
    for _ in range(rounds):
        marks = {c for c in compute(length) if len(c[1]) <= query_len}
        if prev is not None and marks == prev:
            return marks, True
        prev = marks
        length += 2
    return prev, False


# ---------------------------------------------------------------------------
# Text formats
# ---------------------------------------------------------------------------

def parse_pds(text: str) -> Pds:
    """Parse ``rule: p a -> q b c`` lines (``-`` for the empty word).

    Right-hand sides longer than two symbols are normalized by splitting
    the push through fresh control states.
    """
    controls: list[State] = []
    alphabet: list[Sym] = []
    rules: list[PdsRule] = []
    fresh = 0

    def note_control(p):
        if p not in controls:
            controls.append(p)

    def note_sym(a):
        if a not in alphabet:
            alphabet.append(a)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        if key.strip() == "control":
            for p in rest.split():
                note_control(p)
            continue
        if key.strip() != "rule":
            raise ParseError(f"unknown directive in pds file: {raw!r}", line=lineno)
        lhs, _, rhs = rest.partition("->")
        lhs_parts = lhs.split()
        rhs_parts = rhs.split()
        if len(lhs_parts) != 2 or len(rhs_parts) < 2:
            raise ParseError(f"bad rule line: {raw!r}", line=lineno)
        p, a = lhs_parts
        q, word = rhs_parts[0], tuple(s for s in rhs_parts[1:] if s != "-")
        note_control(p)
        note_control(q)
        note_sym(a)
        for s in word:
            note_sym(s)
        if len(word) <= 2:
            rules.append(PdsRule(p, a, q, word))
        else:
            # split a long push through fresh controls, building bottom-up
            k = len(word)
            prev_state: State = p
            prev_top: Sym = a
            for j in range(1, k):
                lo = k - 1 - j
                if j == k - 1:
                    nxt: State = q
                else:
                    nxt = f"_push{fresh}"
                    fresh += 1
                    note_control(nxt)
                rules.append(PdsRule(prev_state, prev_top, nxt, (word[lo], word[lo + 1])))
                prev_state, prev_top = nxt, word[lo]
    return Pds(tuple(controls), tuple(alphabet), tuple(rules))


def format_pds(pds: Pds) -> str:
    lines = []
    for r in pds.rules:
        rhs = " ".join(str(s) for s in r.push) if r.push else "-"
        lines.append(f"rule: {r.state} {r.top} -> {r.target} {rhs}")
    return "\n".join(lines) + "\n"


def parse_pautomaton(text: str, pds: Pds) -> PAutomaton:
    """Parse ``pa-state``, ``pa-accept``, and ``pa-trans: s a -> t`` lines."""
    states = list(pds.controls)
    accepting: set[State] = set()
    trans: set[tuple[State, Sym, State]] = set()

    def note(s):
        if s not in states:
            states.append(s)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        key = parts[0].rstrip(":")
        rest = parts[1].strip() if len(parts) > 1 else ""
        if key == "pa-state":
            for s in rest.split():
                note(s)
        elif key == "pa-accept":
            for s in rest.split():
                note(s)
                accepting.add(s)
        elif key == "pa-trans":
            lhs, _, rhs = rest.partition("->")
            parts = lhs.split()
            tgt = rhs.split()
            if len(parts) != 2 or len(tgt) != 1:
                raise ParseError(f"bad pa-trans line: {raw!r}", line=lineno)
            note(parts[0])
            note(tgt[0])
            trans.add((parts[0], parts[1], tgt[0]))
        else:
            raise ParseError(f"unknown directive in pa file: {raw!r}", line=lineno)
    return PAutomaton(pds.controls, tuple(states), frozenset(trans), frozenset(accepting))

"""Alternating unary finite automata and 2-store automata (membership only).

A 2-store automaton reads a level-2 configuration entrywise from the top:
each transition is labelled by a stack symbol together with a unary
alternating finite automaton that must accept the counter value written in
unary.  Existential states need one matching transition to succeed,
universal states need every matching transition to succeed (vacuously true
with none, per the literal acceptance definition; this differs from the
run-tree convention the alternating reachability oracle uses).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError, UnknownStateError
from .hoca2 import L2Config


@dataclass(frozen=True)
class UnaryAfa:
    """Alternating finite automaton over a one-letter alphabet.

    Acceptance of length ``m`` follows run trees: a universal state with no
    successors cannot consume a remaining letter, so it rejects positive
    lengths (and an automaton without accepting states rejects everything).
    """

    states: tuple[str, ...]
    initial: str
    accepting: frozenset[str]
    edges: tuple[tuple[str, str], ...]
    universal: frozenset[str] = field(default_factory=frozenset)


def afa_unary_membership(afa: UnaryAfa, m: int) -> bool:
    """Does the automaton accept the unary word of length ``m``?

    Backward dynamic program over the remaining length.
    """
    succ = {s: [] for s in afa.states}
    for s, t in afa.edges:
        succ[s].append(t)
    good = {s: s in afa.accepting for s in afa.states}
    for _ in range(m):
        nxt = {}
        for s in afa.states:
            outs = succ[s]
            if s in afa.universal:
                nxt[s] = bool(outs) and all(good[t] for t in outs)
            else:
                nxt[s] = any(good[t] for t in outs)
        good = nxt
    return good[afa.initial]


@dataclass(frozen=True)
class TwoStoreAutomaton:
    states: tuple[str, ...]
    accepting: frozenset[str]
    afas: dict[str, UnaryAfa]
    transitions: tuple[tuple[str, str, str, str], ...]  # (state, symbol, afa name, state)
    universal: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        known = set(self.states)
        for q, _, name, p in self.transitions:
            if q not in known or p not in known:
                raise UnknownStateError(f"transition uses undeclared state: {q} -> {p}")
            if name not in self.afas:
                raise ParseError(f"transition references unknown afa {name!r}")


def two_store_membership(tsa: TwoStoreAutomaton, state: str, config: L2Config) -> bool:
    """Acceptance of ``(state, config)``, consuming entries from the top."""
    if state not in tsa.states:
        raise UnknownStateError(f"unknown state {state!r}")

    def accept(q: str, upto: int) -> bool:
        if upto == 0:
            return q in tsa.accepting
        sym, counter = config[upto - 1]
        matching = [
            (name, p) for (src, s, name, p) in tsa.transitions if src == q and s == sym
        ]
        if q in tsa.universal:
            return all(
                afa_unary_membership(tsa.afas[name], counter) and accept(p, upto - 1)
                for name, p in matching
            )
        return any(
            afa_unary_membership(tsa.afas[name], counter) and accept(p, upto - 1)
            for name, p in matching
        )

    return accept(state, len(config))


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

def parse_two_store(text: str) -> TwoStoreAutomaton:
    """Parse the 2-store format.

    Shared lines: ``states:``, ``accept:``, ``mode: q universal`` and
    ``trans: q (sym, afaname) q'``.  Each referenced automaton is declared
    through ``afa NAME states/initial/accept/mode/trans`` lines, with afa
    transitions written ``s -> t``.
    """
    states: list[str] = []
    accepting: set[str] = set()
    universal: set[str] = set()
    transitions: list[tuple[str, str, str, str]] = []
    afa_parts: dict[str, dict] = {}

    def afa_entry(name: str) -> dict:
        return afa_parts.setdefault(
            name, {"states": [], "initial": None, "accept": set(), "universal": set(), "edges": []}
        )

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("afa "):
            rest = line[4:].strip()
            parts = rest.split(None, 1)
            if len(parts) != 2:
                raise ParseError(f"bad afa line: {raw!r}", line=lineno)
            name, body = parts
            entry = afa_entry(name)
            key, _, value = body.partition(":")
            key = key.strip()
            value = value.strip()
            if key == "states":
                entry["states"].extend(value.split())
            elif key == "initial":
                entry["initial"] = value
            elif key == "accept":
                entry["accept"].update(value.split())
            elif key == "mode":
                st, mode = value.split()
                if mode == "universal":
                    entry["universal"].add(st)
            elif key == "trans":
                src, _, dst = value.partition("->")
                entry["edges"].append((src.strip(), dst.strip()))
            else:
                raise ParseError(f"unknown afa directive {key!r}", line=lineno)
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        rest = rest.strip()
        if key == "states":
            states.extend(rest.split())
        elif key == "accept":
            accepting.update(rest.split())
        elif key == "mode":
            st, mode = rest.split()
            if mode == "universal":
                universal.add(st)
        elif key == "trans":
            import re

            m = re.fullmatch(r"(\S+)\s*\(\s*(\S+?)\s*,\s*(\S+?)\s*\)\s*(\S+)", rest)
            if not m:
                raise ParseError(f"bad 2-store trans line: {raw!r}", line=lineno)
            q, sym, name, p = m.groups()
            transitions.append((q, sym, name, p))
        else:
            raise ParseError(f"unknown directive {key!r} in 2-store file", line=lineno)

    afas = {}
    for name, entry in afa_parts.items():
        if entry["initial"] is None:
            raise ParseError(f"afa {name!r} has no initial state")
        afas[name] = UnaryAfa(
            states=tuple(entry["states"]),
            initial=entry["initial"],
            accepting=frozenset(entry["accept"]),
            edges=tuple(entry["edges"]),
            universal=frozenset(entry["universal"]),
        )
    return TwoStoreAutomaton(
        states=tuple(states),
        accepting=frozenset(accepting),
        afas=afas,
        transitions=tuple(transitions),
        universal=frozenset(universal),
    )


def divisibility_afa(modulus: int) -> UnaryAfa:
    """Accepts unary words whose length is divisible by ``modulus``."""
    states = tuple(f"r{i}" for i in range(modulus))
    edges = tuple((f"r{i}", f"r{(i + 1) % modulus}") for i in range(modulus))
    return UnaryAfa(states, "r0", frozenset({"r0"}), edges)

"""Constructive storage-simulation passes.

Three compilation passes, each preserving the set of reachable original
states (auxiliary chain states excluded):

* ``eliminate_level2_symbols`` -- a pushdown-of-zero-test-counter automaton
  over the alphabet ``{_,0,1}`` becomes one over the unary alphabet, with
  the top symbol encoded in the counter value modulo 3 (the bottom symbol
  counts as 2).  Every original counter move is tripled, so the symbol code
  survives arithmetic.

* ``pop_to_invpush`` -- pops are compiled away in favour of inverse pushes.
* ``invpush_to_pop`` -- the reverse direction.

The pop/inverse-push passes annotate every stack entry with the operation
that undoes it and keep the representation reduced: pushing creates a
remove-annotated block, a counter move either cancels the matching
stay-annotated block on top or stacks a new one, and removal unwinds the
stay history.  Annotated symbols are coded over ``{_,0,1}`` as fixed-width
blocks of three stack entries, bottom-up ``(symbol, kind, cap)``: the cap
entry carries the live inner configuration and its constant top symbol
``0`` keeps blocks distinguishable from the bare bottom entry, the kind
entry marks how the block is undone (``_`` removal, ``0`` undo-increment,
``1`` undo-decrement), and the symbol entry holds the represented stack
symbol plus the inner configuration the block was created over.
"""

from __future__ import annotations

from .automaton import StorageAutomaton, Transition, make_transitions
from .errors import UnsupportedOpError
from .storage import (
    BOTTOM,
    Counter,
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
    Stay,
    StorageExpr,
    TestId,
    Top,
    ZCounter,
    tests_of,
)

CAP = "0"  # constant top symbol of every block
KIND_REMOVE = "_"
KIND_UNDO_INC = "0"  # block created by a decrement; an increment cancels it
KIND_UNDO_DEC = "1"  # block created by an increment; a decrement cancels it

_CODED = (BOTTOM, "0", "1")


class _Builder:
    """Accumulates output transitions and hands out deterministic fresh states."""

    def __init__(self, storage: StorageExpr, states: tuple[str, ...]):
        self.storage = storage
        self.states: list[str] = list(states)
        self._taken = set(states)
        self.transitions: list[Transition] = []

    def fresh(self, hint: str) -> str:
        name = hint
        while name in self._taken:
            name += "'"
        self._taken.add(name)
        self.states.append(name)
        return name

    def step(self, src: str, constraints: dict[TestId, bool], op: OpId, dst: str) -> None:
        self.transitions.extend(make_transitions(self.storage, src, constraints, op, dst))

    def chain(self, src: str, steps, dst: str, hint: str) -> None:
        """Thread (constraints, op) steps from src to dst through fresh states."""
        cur = src
        for n, (constraints, op) in enumerate(steps):
            nxt = dst if n == len(steps) - 1 else self.fresh(f"{hint}.{n}")
            self.step(cur, constraints, op, nxt)
            cur = nxt
        if not steps:
            self.step(src, {}, Id(), dst)


def _transition_requirements(aut: StorageAutomaton, tr: Transition):
    """Split a total vector into (top symbol, inner-test constraints)."""
    storage = aut.storage
    assigned = dict(tr.tests)
    tops = [s for s in storage.alphabet if assigned.get(Top(s))]
    if len(tops) != 1:
        return None  # unsatisfiable vector: dead transition
    inner = {}
    for t in tests_of(storage.inner):
        inner[Inner(t)] = assigned[Inner(t)]
    return tops[0], inner


def _reachability_guard(aut: StorageAutomaton) -> None:
    if aut.universal:
        raise UnsupportedOpError("simulation passes expect all-existential automata")


# ---------------------------------------------------------------------------
# Symbol elimination via counter mod 3
# ---------------------------------------------------------------------------

_SYM_VALUE = {"0": 0, "1": 1, BOTTOM: 2}


def eliminate_level2_symbols(aut: StorageAutomaton) -> StorageAutomaton:
    """Compile ``P{_,0,1}(Z)`` down to the unary-alphabet ``P{_}(Z)``.

    The counter stores ``3 * v + code(symbol)``; counter moves are tripled
    and the symbol code is read off destructively on a pushed copy by
    counting decrements modulo 3 until the zero test fires.
    """
    _reachability_guard(aut)
    storage = aut.storage
    if (
        not isinstance(storage, Pushdown)
        or not isinstance(storage.inner, ZCounter)
        or not set(storage.alphabet) <= set(_CODED)
    ):
        raise UnsupportedOpError("expected a P{_,0,1}(Z) automaton")

    out_storage = Pushdown((BOTTOM,), ZCounter())
    b = _Builder(out_storage, aut.states)
    init0 = b.fresh("init")
    # counter 2 encodes the initial bottom symbol
    b.chain(init0, [({}, Stay(PushSym(BOTTOM))), ({}, Stay(PushSym(BOTTOM)))], aut.initial, "init")

    inc = Stay(PushSym(BOTTOM))
    dec = Stay(Pop())
    t_empty = Inner(Empty())

    for ti, tr in enumerate(aut.transitions):
        req = _transition_requirements(aut, tr)
        if req is None:
            continue
        sym, inner_req = req
        want_empty = inner_req[t_empty]
        code = _SYM_VALUE[sym]
        hint = f"t{ti}"

        steps: list = []
        # Phase A: read the symbol code off a pushed copy.
        steps.append(({}, PushPair(BOTTOM)))
        cyc = [b.fresh(f"{hint}.c{j}") for j in range(3)]
        entry = b.fresh(f"{hint}.in")
        _chain_into(b, tr.source, steps, entry, f"{hint}.a")
        b.step(entry, {}, Id(), cyc[0])
        for j in range(3):
            b.step(cyc[j], {t_empty: False}, dec, cyc[(j + 1) % 3])
        after = b.fresh(f"{hint}.rd")
        b.step(cyc[code], {t_empty: True}, Pop(), after)

        # Phase B: the original zero test, under the symbol offset.
        steps = [({}, dec)] * code
        steps.append(({t_empty: want_empty}, Id()))
        steps.extend([({}, inc)] * code)

        # Phase C: the operation itself.
        op = tr.op
        if isinstance(op, Pop):
            steps.append(({}, Pop()))
        elif isinstance(op, PushPair):
            steps.append(({}, PushPair(BOTTOM)))
            steps.extend([({}, dec)] * code)
            steps.extend([({}, inc)] * _SYM_VALUE[op.symbol])
        elif isinstance(op, Stay) and isinstance(op.op, PushSym):
            steps.extend([({}, inc)] * 3)
        elif isinstance(op, Stay) and isinstance(op.op, Pop):
            steps.extend([({}, dec)] * 3)
        elif isinstance(op, Id) or (isinstance(op, Stay) and isinstance(op.op, Id)):
            steps.append(({}, Id()))
        else:
            raise UnsupportedOpError(f"unrestricted operation {op!r}")
        b.chain(after, steps, tr.target, f"{hint}.b")

    return StorageAutomaton(
        storage=out_storage,
        states=tuple(b.states),
        initial=init0,
        transitions=tuple(b.transitions),
    )


def _chain_into(b: _Builder, src: str, steps, dst: str, hint: str) -> None:
    b.chain(src, steps, dst, hint)


# ---------------------------------------------------------------------------
# Shared block machinery for the pop/inverse-push passes
# ---------------------------------------------------------------------------

def _inner_op(kind: str) -> OpId:
    """The cap adjustment a stay-block of this kind was created with."""
    if kind == KIND_UNDO_DEC:
        return Stay(PushSym(BOTTOM))
    if kind == KIND_UNDO_INC:
        return Stay(Pop())
    return Id()


def _undo_op(kind: str) -> OpId:
    if kind == KIND_UNDO_DEC:
        return Stay(Pop())
    if kind == KIND_UNDO_INC:
        return Stay(PushSym(BOTTOM))
    return Id()


def _stay_kind(op: Stay) -> str:
    """Kind of the block a stay creates: future cancel is the inverse move."""
    if isinstance(op.op, PushSym):
        return KIND_UNDO_DEC
    return KIND_UNDO_INC


def _cancel_kind(op: Stay) -> str:
    """Kind of the block this stay cancels."""
    if isinstance(op.op, PushSym):
        return KIND_UNDO_INC
    return KIND_UNDO_DEC


def _block_build(sym: str, kind: str, adjust: OpId | None) -> list:
    steps = [({}, PushPair(sym)), ({}, PushPair(kind)), ({}, PushPair(CAP))]
    if adjust is not None and not isinstance(adjust, Id):
        steps.append(({}, adjust))
    return steps


def _simple_stay(op: OpId) -> Stay | None:
    if isinstance(op, Stay) and isinstance(op.op, (PushSym, Pop)):
        return op
    return None


def _check_codable(storage) -> None:
    if not set(storage.alphabet) <= set(_CODED):
        raise UnsupportedOpError("block coding needs the alphabet within {_,0,1}")
    if not isinstance(storage.inner, (Counter, ZCounter)):
        raise UnsupportedOpError("expected a counter-like inner storage")


# ---------------------------------------------------------------------------
# pop -> inverse push
# ---------------------------------------------------------------------------

def pop_to_invpush(aut: StorageAutomaton) -> StorageAutomaton:
    """Compile a pushdown automaton into one whose only removal is inverse push.

    Every pushed entry becomes a remove-annotated block; counter stays
    either cancel the matching stay-annotated block via (adjust; inverse
    pushes) or stack a new one; a pop unwinds the stay history of the top
    entry and inverse-pushes its block away.
    """
    _reachability_guard(aut)
    storage = aut.storage
    if not isinstance(storage, Pushdown):
        raise UnsupportedOpError("expected a pushdown storage")
    _check_codable(storage)

    out_storage = PushdownInv(_CODED, storage.inner)
    b = _Builder(out_storage, aut.states)

    def peel_then(src: str, inner_req, sym_req: str, hint: str, tail_steps, dst: str) -> None:
        """Branch on the top shape, verify the represented top symbol, restore
        the block, then run ``tail_steps``."""
        if sym_req == BOTTOM:
            b.chain(src, [({Top(BOTTOM): True, **inner_req}, Id())] + tail_steps, dst, hint + ".bare")
        for kind in (KIND_REMOVE, KIND_UNDO_INC, KIND_UNDO_DEC):
            steps = [({Top(CAP): True, **inner_req}, _undo_op(kind))]
            steps.append(({}, InvPush(CAP)))
            steps.append(({Top(kind): True}, InvPush(kind)))
            rebuild = [
                ({Top(sym_req): True}, PushPair(kind)),
                ({}, PushPair(CAP)),
            ]
            adjust = _inner_op(kind)
            if not isinstance(adjust, Id):
                rebuild.append(({}, adjust))
            b.chain(src, steps + rebuild + tail_steps, dst, f"{hint}.k{kind}")

    for ti, tr in enumerate(aut.transitions):
        req = _transition_requirements(aut, tr)
        if req is None:
            continue
        sym_req, inner_req = req
        hint = f"t{ti}"
        op = tr.op

        if isinstance(op, PushPair):
            peel_then(tr.source, inner_req, sym_req, hint,
                      _block_build(op.symbol, KIND_REMOVE, None), tr.target)
        elif isinstance(op, Id) or (isinstance(op, Stay) and isinstance(op.op, Id)):
            peel_then(tr.source, inner_req, sym_req, hint, [({}, Id())], tr.target)
        elif (stay := _simple_stay(op)) is not None:
            # cancel the matching stay-block ...
            ck = _cancel_kind(stay)
            b.chain(
                tr.source,
                [
                    ({Top(CAP): True, **inner_req}, stay),
                    ({}, InvPush(CAP)),
                    ({Top(ck): True}, InvPush(ck)),
                    ({Top(sym_req): True}, InvPush(sym_req)),
                ],
                tr.target,
                f"{hint}.cancel",
            )
            # ... or stack a new one
            peel_then(tr.source, inner_req, sym_req, hint + ".grow",
                      _block_build(sym_req, _stay_kind(stay), stay), tr.target)
        elif isinstance(op, Pop):
            loop = b.fresh(f"{hint}.unwind")
            b.step(tr.source, {Top(CAP): True, **inner_req}, Id(), loop)
            # peel one stay-block and come back
            for kind in (KIND_UNDO_INC, KIND_UNDO_DEC):
                steps = [
                    ({Top(CAP): True}, _undo_op(kind)),
                    ({}, InvPush(CAP)),
                    ({Top(kind): True}, InvPush(kind)),
                ]
                for sym in _CODED:
                    b.chain(loop, steps + [({Top(sym): True}, InvPush(sym))], loop,
                            f"{hint}.u{kind}{sym}")
            # finish: remove the entry's own block
            fin = [
                ({Top(CAP): True}, InvPush(CAP)),
                ({Top(KIND_REMOVE): True}, InvPush(KIND_REMOVE)),
                ({Top(sym_req): True}, InvPush(sym_req)),
            ]
            b.chain(loop, fin, tr.target, f"{hint}.fin")
        else:
            raise UnsupportedOpError(f"unrestricted operation {op!r}")

    return StorageAutomaton(
        storage=out_storage,
        states=tuple(b.states),
        initial=aut.initial,
        transitions=tuple(b.transitions),
    )


# ---------------------------------------------------------------------------
# inverse push -> pop
# ---------------------------------------------------------------------------

def invpush_to_pop(aut: StorageAutomaton) -> StorageAutomaton:
    """Compile an inverse-push automaton into an ordinary pushdown automaton."""
    _reachability_guard(aut)
    storage = aut.storage
    if not isinstance(storage, PushdownInv):
        raise UnsupportedOpError("expected an inverse-push storage")
    _check_codable(storage)

    out_storage = Pushdown(_CODED, storage.inner)
    b = _Builder(out_storage, aut.states)

    def peel_then(src: str, inner_req, sym_req: str, hint: str, tail_steps, dst: str) -> None:
        if sym_req == BOTTOM:
            b.chain(src, [({Top(BOTTOM): True, **inner_req}, Id())] + tail_steps, dst, hint + ".bare")
        for kind in (KIND_REMOVE, KIND_UNDO_INC, KIND_UNDO_DEC):
            steps = [
                ({Top(CAP): True, **inner_req}, Pop()),
                ({Top(kind): True}, Pop()),
            ]
            rebuild = [
                ({Top(sym_req): True}, PushPair(kind)),
                ({}, PushPair(CAP)),
            ]
            adjust = _inner_op(kind)
            if not isinstance(adjust, Id):
                rebuild.append(({}, adjust))
            b.chain(src, steps + rebuild + tail_steps, dst, f"{hint}.k{kind}")

    for ti, tr in enumerate(aut.transitions):
        req = _transition_requirements(aut, tr)
        if req is None:
            continue
        sym_req, inner_req = req
        hint = f"t{ti}"
        op = tr.op

        if isinstance(op, PushPair):
            peel_then(tr.source, inner_req, sym_req, hint,
                      _block_build(op.symbol, KIND_REMOVE, None), tr.target)
        elif isinstance(op, Id) or (isinstance(op, Stay) and isinstance(op.op, Id)):
            peel_then(tr.source, inner_req, sym_req, hint, [({}, Id())], tr.target)
        elif (stay := _simple_stay(op)) is not None:
            ck = _cancel_kind(stay)
            b.chain(
                tr.source,
                [
                    ({Top(CAP): True, **inner_req}, Pop()),
                    ({Top(ck): True}, Pop()),
                    ({Top(sym_req): True}, Pop()),
                ],
                tr.target,
                f"{hint}.cancel",
            )
            peel_then(tr.source, inner_req, sym_req, hint + ".grow",
                      _block_build(sym_req, _stay_kind(stay), stay), tr.target)
        elif isinstance(op, InvPush):
            if op.symbol != sym_req:
                continue  # the top test and the inverse push can never both fire
            b.chain(
                tr.source,
                [
                    ({Top(CAP): True, **inner_req}, Pop()),
                    ({Top(KIND_REMOVE): True}, Pop()),
                    ({Top(sym_req): True}, Pop()),
                ],
                tr.target,
                f"{hint}.inv",
            )
        else:
            raise UnsupportedOpError(f"unrestricted operation {op!r}")

    return StorageAutomaton(
        storage=out_storage,
        states=tuple(b.states),
        initial=aut.initial,
        transitions=tuple(b.transitions),
    )

"""Binary-tree encoding of level-2 configurations, and bottom-up tree automata.

A configuration ``(sym_1, v_1) .. (sym_m, v_m)`` encodes recursively: if the
first counter is 0 the tree is a bottom-labelled node whose left child is
the leaf ``sym_1`` and whose right child encodes the rest; otherwise the
maximal prefix of positive counters is decremented and encoded on the left,
the remainder (which necessarily starts at counter 0) on the right.  The
full configuration ``(q, p)`` becomes ``q(E(p), -)``.  Consequences used by
the tests: every entry ``(sym, i)`` owns a leaf whose root-to-leaf path has
exactly ``i + 2`` left edges, and the inorder traversal lists the leaves in
stack order.

Tree automata here are bottom-up and nondeterministic; absent children are
first-class (these trees are not binary-complete).  Term syntax:
``q(T,-)``, ``_(T1,T2)``, a bare label for a leaf, ``-`` for absent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterator

from .errors import InvalidEncodingError, ParseError
from .hoca2 import L2Config
from .storage import BOTTOM


@dataclass(frozen=True)
class BinTree:
    label: str
    left: "BinTree | None" = None
    right: "BinTree | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None and self.right is None


def leaf(label: str) -> BinTree:
    return BinTree(label)


def tree_size(t: BinTree) -> int:
    n = 1
    if t.left:
        n += tree_size(t.left)
    if t.right:
        n += tree_size(t.right)
    return n


# ---------------------------------------------------------------------------
# Encoding and decoding
# ---------------------------------------------------------------------------

def encode_stack(p: L2Config | tuple) -> BinTree | None:
    """Encode a (possibly empty) entry sequence."""
    if not p:
        return None
    sym1, v1 = p[0]
    if v1 == 0:
        return BinTree(BOTTOM, leaf(sym1), encode_stack(p[1:]))
    j = 1
    while j < len(p) and p[j][1] >= 1:
        j += 1
    left = tuple((sym, v - 1) for sym, v in p[:j])
    right = p[j:]
    return BinTree(BOTTOM, encode_stack(left), encode_stack(right))


def encode(config: tuple[str, L2Config]) -> BinTree:
    """Encode a full configuration ``(state, stack)``."""
    state, stack = config
    return BinTree(state, encode_stack(stack), None)


def decode(t: BinTree) -> tuple[str, L2Config]:
    """Invert the encoding; raises ``InvalidEncodingError`` off the image."""
    if t.is_leaf or t.left is None or t.right is not None:
        raise InvalidEncodingError("root must have exactly a left child", "")
    return t.label, _decode_stack(t.left, "0")


def _decode_stack(t: BinTree, pos: str) -> L2Config:
    if t.label != BOTTOM:
        raise InvalidEncodingError(f"internal node labelled {t.label!r}", pos)
    if t.left is None:
        raise InvalidEncodingError("internal node without a left child", pos)
    if t.left.is_leaf:
        rest: tuple = ()
        if t.right is not None:
            rest = _decode_stack(t.right, pos + "1")
        return ((t.left.label, 0),) + rest
    left_part = _decode_stack(t.left, pos + "0")
    bumped = tuple((sym, v + 1) for sym, v in left_part)
    if t.right is None:
        return bumped
    rest = _decode_stack(t.right, pos + "1")
    if rest[0][1] != 0:
        raise InvalidEncodingError("right sibling must start at counter 0", pos + "1")
    return bumped + rest


def leaf_paths(t: BinTree, path: str = "") -> Iterator[tuple[str, str]]:
    """Yield (path, label) for every leaf; '0' marks a left edge."""
    if t.is_leaf:
        yield path, t.label
        return
    if t.left is not None:
        yield from leaf_paths(t.left, path + "0")
    if t.right is not None:
        yield from leaf_paths(t.right, path + "1")


def inorder_leaves(t: BinTree) -> list[str]:
    out: list[str] = []

    def walk(node: BinTree) -> None:
        if node.left is not None:
            walk(node.left)
        if node.is_leaf:
            out.append(node.label)
        if node.right is not None:
            walk(node.right)

    walk(t)
    return out


# ---------------------------------------------------------------------------
# Term syntax
# ---------------------------------------------------------------------------

def format_tree(t: BinTree | None) -> str:
    if t is None:
        return "-"
    if t.is_leaf:
        return t.label
    return f"{t.label}({format_tree(t.left)},{format_tree(t.right)})"


def parse_tree(text: str) -> BinTree:
    tree, pos = _parse_tree(text, 0)
    pos = _skip(text, pos)
    if pos != len(text):
        raise ParseError(f"trailing input in tree term: {text[pos:]!r}", col=pos)
    if tree is None:
        raise ParseError("'-' is not a tree")
    return tree


def _skip(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _parse_tree(text: str, pos: int) -> tuple[BinTree | None, int]:
    pos = _skip(text, pos)
    if pos < len(text) and text[pos] == "-":
        return None, pos + 1
    start = pos
    while pos < len(text) and (text[pos].isalnum() or text[pos] in "_'"):
        pos += 1
    if pos == start:
        raise ParseError(f"expected a tree term at {text[start:]!r}", col=start)
    label = text[start:pos]
    pos = _skip(text, pos)
    if pos < len(text) and text[pos] == "(":
        left, pos = _parse_tree(text, pos + 1)
        pos = _skip(text, pos)
        if pos >= len(text) or text[pos] != ",":
            raise ParseError("expected ',' between children", col=pos)
        right, pos = _parse_tree(text, pos + 1)
        pos = _skip(text, pos)
        if pos >= len(text) or text[pos] != ")":
            raise ParseError("expected ')' closing the children", col=pos)
        return BinTree(label, left, right), pos + 1
    return BinTree(label), pos


# ---------------------------------------------------------------------------
# Tree automata
# ---------------------------------------------------------------------------

TaState = Hashable


@dataclass(frozen=True)
class TreeAutomaton:
    """Bottom-up nondeterministic tree automaton with absent-child markers.

    ``leaf_rules`` map a label to a state for childless nodes;
    ``node_rules`` are (label, left-state-or-None, right-state-or-None,
    state) for nodes with at least one child.
    """

    states: frozenset[TaState]
    leaf_rules: tuple[tuple[str, TaState], ...]
    node_rules: tuple[tuple[str, TaState | None, TaState | None, TaState], ...]
    accepting: frozenset[TaState]


def _run_states(ta: TreeAutomaton, t: BinTree) -> frozenset[TaState]:
    if t.is_leaf:
        return frozenset(s for lbl, s in ta.leaf_rules if lbl == t.label)
    lefts: frozenset[TaState | None] = (
        _run_states(ta, t.left) if t.left is not None else frozenset({None})
    )
    rights: frozenset[TaState | None] = (
        _run_states(ta, t.right) if t.right is not None else frozenset({None})
    )
    out = set()
    for lbl, ls, rs, s in ta.node_rules:
        if lbl != t.label:
            continue
        if (ls in lefts if t.left is not None else ls is None) and (
            rs in rights if t.right is not None else rs is None
        ):
            out.add(s)
    return frozenset(out)


def ta_membership(ta: TreeAutomaton, t: BinTree) -> bool:
    return bool(_run_states(ta, t) & ta.accepting)


def ta_intersect(a: TreeAutomaton, b: TreeAutomaton) -> TreeAutomaton:
    """Product construction; the tree shape synchronizes absent children."""
    leaf_rules = tuple(
        (la, (sa, sb)) for la, sa in a.leaf_rules for lb, sb in b.leaf_rules if la == lb
    )
    node_rules = []
    for la, lsa, rsa, sa in a.node_rules:
        for lb, lsb, rsb, sb in b.node_rules:
            if la != lb:
                continue
            if (lsa is None) != (lsb is None) or (rsa is None) != (rsb is None):
                continue
            ls = None if lsa is None else (lsa, lsb)
            rs = None if rsa is None else (rsa, rsb)
            node_rules.append((la, ls, rs, (sa, sb)))
    states = frozenset((x, y) for x in a.states for y in b.states)
    accepting = frozenset((x, y) for x in a.accepting for y in b.accepting)
    return TreeAutomaton(states, leaf_rules, tuple(node_rules), accepting)


def ta_union(a: TreeAutomaton, b: TreeAutomaton) -> TreeAutomaton:
    """Disjoint union (nondeterminism does the rest)."""

    def tag(which, s):
        return (which, s)

    states = frozenset(tag(0, s) for s in a.states) | frozenset(tag(1, s) for s in b.states)
    leaf_rules = tuple((lbl, tag(0, s)) for lbl, s in a.leaf_rules) + tuple(
        (lbl, tag(1, s)) for lbl, s in b.leaf_rules
    )

    def lift(which, rules):
        out = []
        for lbl, ls, rs, s in rules:
            out.append(
                (
                    lbl,
                    None if ls is None else tag(which, ls),
                    None if rs is None else tag(which, rs),
                    tag(which, s),
                )
            )
        return tuple(out)

    node_rules = lift(0, a.node_rules) + lift(1, b.node_rules)
    accepting = frozenset(tag(0, s) for s in a.accepting) | frozenset(
        tag(1, s) for s in b.accepting
    )
    return TreeAutomaton(states, leaf_rules, node_rules, accepting)


def ta_emptiness(ta: TreeAutomaton) -> BinTree | None:
    """Return a witness tree accepted by the automaton, or None if empty."""
    witness: dict[TaState, BinTree] = {}
    for lbl, s in ta.leaf_rules:
        witness.setdefault(s, BinTree(lbl))
    changed = True
    while changed:
        changed = False
        for lbl, ls, rs, s in ta.node_rules:
            if s in witness:
                continue
            if (ls is None or ls in witness) and (rs is None or rs in witness):
                lt = witness[ls] if ls is not None else None
                rt = witness[rs] if rs is not None else None
                witness[s] = BinTree(lbl, lt, rt)
                changed = True
    for s in ta.accepting:
        if s in witness:
            return witness[s]
    return None


def validity_ta(alphabet: tuple[str, ...], states: tuple[str, ...]) -> TreeAutomaton:
    """Accepts exactly the encodings of configurations over the given sizes.

    Internally: ``A``-shaped subtrees put a leaf on the left (first counter
    0), ``B``-shaped ones a subtree (first counter positive); a ``B`` right
    sibling must be absent or ``A``-shaped, since the split point is
    maximal.
    """
    LEAF, A, B, ACC = "leaf", "a", "b", "acc"
    leaf_rules = tuple((sym, LEAF) for sym in alphabet)
    node_rules: list = []
    for right in (None, A, B):
        node_rules.append((BOTTOM, LEAF, right, A))
    for left_shape in (A, B):
        for right in (None, A):
            node_rules.append((BOTTOM, left_shape, right, B))
    for q in states:
        node_rules.append((q, A, None, ACC))
        node_rules.append((q, B, None, ACC))
    return TreeAutomaton(
        frozenset({LEAF, A, B, ACC}), leaf_rules, tuple(node_rules), frozenset({ACC})
    )


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

def parse_tree_automaton(text: str) -> TreeAutomaton:
    """Parse ``ta-state``, ``ta-accept``, ``ta-leaf a -> s`` and
    ``ta-node lbl (s1, s2) -> s`` lines (``-`` for an absent child)."""
    states: set[TaState] = set()
    accepting: set[TaState] = set()
    leaf_rules: list[tuple[str, TaState]] = []
    node_rules: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        key = parts[0].rstrip(":")
        rest = parts[1].strip() if len(parts) > 1 else ""
        if key == "ta-state":
            states.update(rest.split())
        elif key == "ta-accept":
            for s in rest.split():
                states.add(s)
                accepting.add(s)
        elif key == "ta-leaf":
            lhs, _, rhs = rest.partition("->")
            lbl = lhs.strip()
            s = rhs.strip()
            if not lbl or not s:
                raise ParseError(f"bad ta-leaf line: {raw!r}", line=lineno)
            states.add(s)
            leaf_rules.append((lbl, s))
        elif key == "ta-node":
            m = _parse_node_rule(rest, lineno)
            node_rules.append(m)
            states.add(m[3])
            for child in (m[1], m[2]):
                if child is not None:
                    states.add(child)
        else:
            raise ParseError(f"unknown directive in ta file: {raw!r}", line=lineno)
    return TreeAutomaton(frozenset(states), tuple(leaf_rules), tuple(node_rules), frozenset(accepting))


def _parse_node_rule(rest: str, lineno: int):
    import re

    m = re.fullmatch(
        r"(\S+)\s*\(\s*(\S+?)\s*,\s*(\S+?)\s*\)\s*->\s*(\S+)", rest
    )
    if not m:
        raise ParseError(f"bad ta-node line: {rest!r}", line=lineno)
    lbl, ls, rs, s = m.groups()
    return (lbl, None if ls == "-" else ls, None if rs == "-" else rs, s)


def format_tree_automaton(ta: TreeAutomaton) -> str:
    names = {s: f"s{i}" for i, s in enumerate(sorted(ta.states, key=repr))}
    lines = [f"ta-state {names[s]}" for s in sorted(ta.states, key=repr)]
    lines += [f"ta-accept {names[s]}" for s in sorted(ta.accepting, key=repr)]
    lines += [f"ta-leaf {lbl} -> {names[s]}" for lbl, s in ta.leaf_rules]
    for lbl, ls, rs, s in ta.node_rules:
        l = "-" if ls is None else names[ls]
        r = "-" if rs is None else names[rs]
        lines.append(f"ta-node {lbl} ({l}, {r}) -> {names[s]}")
    return "\n".join(lines) + "\n"

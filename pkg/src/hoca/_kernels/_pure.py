"""Pure-Python twins of the compiled kernels.

Semantics, iteration order, and tie-breaking match ``_speedups`` exactly;
the test suite asserts agreement on random instances.
"""

from __future__ import annotations

from collections import defaultdict, deque

# l2_reach op codes
NOP, PUSH, POP, INC, DEC, INVPUSH = range(6)


def prestar(
    n_states: int,
    n_syms: int,
    pop_rules: list[tuple[int, int, int]],
    one_rules: list[tuple[int, int, int, int]],
    two_rules: list[tuple[int, int, int, int, int]],
    trans: list[tuple[int, int, int]],
) -> set[tuple[int, int, int]]:
    """Saturate an automaton against pushdown rules (backward closure).

    Rules rewrite the topmost stack symbol: ``pop_rules`` ``(p,g) -> (q,)``,
    ``one_rules`` ``(p,g) -> (q, g1)``, ``two_rules`` ``(p,g) -> (q, g1 g2)``
    with ``g1`` the new top.  Returns the saturated transition set.
    """
    rel: set[tuple[int, int, int]] = set()
    targets: dict[tuple[int, int], set[int]] = defaultdict(set)
    by_head1: dict[tuple[int, int], list[tuple[int, int]]] = defaultdict(list)
    by_head2: dict[tuple[int, int], list[tuple[int, int, int]]] = defaultdict(list)
    pending: dict[tuple[int, int], list[tuple[int, int]]] = defaultdict(list)

    for p, g, q, g1 in one_rules:
        by_head1[(q, g1)].append((p, g))
    for p, g, q, g1, g2 in two_rules:
        by_head2[(q, g1)].append((p, g, g2))

    worklist: deque[tuple[int, int, int]] = deque(trans)
    for p, g, q in pop_rules:
        worklist.append((p, g, q))

    while worklist:
        t = worklist.popleft()
        if t in rel:
            continue
        rel.add(t)
        q, g, s = t
        targets[(q, g)].add(s)
        for p, g0 in by_head1.get((q, g), ()):
            worklist.append((p, g0, s))
        for p, g0, g2 in by_head2.get((q, g), ()):
            pending[(s, g2)].append((p, g0))
            for s2 in targets.get((s, g2), ()):
                worklist.append((p, g0, s2))
        for p, g0 in pending.get((q, g), ()):
            worklist.append((p, g0, s))
    return rel


def l2_reach(
    n_states: int,
    trans: list[tuple[int, int, int, int, int, int]],
    start_state: int,
    bot_sym: int,
    target: int,
    max_height: int,
    max_counter: int,
    max_steps: int,
) -> tuple[bool, bool, bool, int, list[int] | None]:
    """Breadth-first control-state reachability over level-2 configurations.

    ``trans`` rows are ``(src, top_sym, empty_req, op, arg, dst)`` where
    ``empty_req`` is -1 (no zero test), 1 (counter must be 0) or 0 (counter
    must be nonzero); op codes are NOP/PUSH/POP/INC/DEC/INVPUSH.

    A configuration is a stack of (symbol, counter) pairs, packed into a
    tuple of ints.  Returns ``(found, pruned, steps_exhausted, visited,
    witness)`` with the witness as a list of transition indices; ``pruned``
    reports that some successor exceeded a height/counter cap.
    """
    span = max_counter + 1
    start = (start_state, (bot_sym * span,))
    if start_state == target:
        return True, False, False, 1, []

    by_src: dict[int, list[tuple[int, ...]]] = defaultdict(list)
    for idx, (src, sym, emp, op, arg, dst) in enumerate(trans):
        by_src[src].append((idx, sym, emp, op, arg, dst))

    visited: dict[tuple[int, tuple[int, ...]], int] = {start: 0}
    parents: list[tuple[int, int]] = [(-1, -1)]
    queue: list[tuple[int, tuple[int, ...]]] = [start]
    pruned = False
    head = 0

    while head < len(queue):
        state, stack = queue[head]
        cur = visited[(state, stack)]
        head += 1
        top = stack[-1]
        top_sym, top_cnt = divmod(top, span)
        for idx, sym, emp, op, arg, dst in by_src.get(state, ()):
            if sym != top_sym:
                continue
            if emp >= 0 and (top_cnt == 0) != (emp == 1):
                continue
            if op == NOP:
                nstack = stack
            elif op == PUSH:
                if len(stack) >= max_height:
                    pruned = True
                    continue
                nstack = stack + (arg * span + top_cnt,)
            elif op == POP:
                if len(stack) < 2:
                    continue
                nstack = stack[:-1]
            elif op == INC:
                if top_cnt >= max_counter:
                    pruned = True
                    continue
                nstack = stack[:-1] + (top + 1,)
            elif op == DEC:
                if top_cnt == 0:
                    continue
                nstack = stack[:-1] + (top - 1,)
            else:  # INVPUSH
                if len(stack) < 2 or top_sym != arg or stack[-2] % span != top_cnt:
                    continue
                nstack = stack[:-1]
            key = (dst, nstack)
            if key in visited:
                continue
            if len(visited) >= max_steps:
                return False, pruned, True, len(visited), None
            visited[key] = len(parents)
            parents.append((cur, idx))
            if dst == target:
                witness = []
                node = len(parents) - 1
                while node > 0:
                    node, tr_idx = parents[node]
                    witness.append(tr_idx)
                witness.reverse()
                return True, pruned, False, len(visited), witness
            queue.append(key)
    return False, pruned, False, len(visited), None

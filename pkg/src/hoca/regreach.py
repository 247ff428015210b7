"""Bounded regular forward/backward reachability for level-2 counter automata.

Target sets are given as tree automata over configuration encodings.  The
polynomial-time construction of an exact pre*/post* tree automaton is not
built here (its missing ingredient beyond the summary word automaton is a
product with a reachability relation automaton that lives in prior work);
instead these functions explore the cap-bounded configuration graph
explicitly and answer membership queries with replayable witnesses, which
is what the cross-validation needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .hoca2 import Hocs2, L2Config, L2Run, successors_l2
from .oracle import Caps
from .summaries import SummaryDfa, build_summary_dfa
from .trees import TreeAutomaton, encode, ta_membership

Node = tuple[str, L2Config]


@dataclass(frozen=True)
class RegReachResult:
    """Per-query verdicts over the cap-bounded graph.

    ``True`` means In (with a replayable witness run); ``False`` means
    NotWithinCaps, which never asserts absence.  ``members`` lists every
    cap-bounded configuration in the computed set.
    """

    verdicts: dict[Node, bool]
    witnesses: dict[Node, L2Run]
    members: tuple[Node, ...]
    caps: Caps


def _bounded_nodes(aut: Hocs2, caps: Caps) -> list[Node]:
    height = caps.height_at(0)
    configs: list[L2Config] = []
    for h in range(1, height + 1):
        for syms in product(aut.alphabet, repeat=h):
            for counters in product(range(caps.max_counter + 1), repeat=h):
                configs.append(tuple(zip(syms, counters)))
    return [(q, c) for q in aut.states for c in configs]


def _graph(aut: Hocs2, caps: Caps, nodes: list[Node]):
    index = {n: i for i, n in enumerate(nodes)}
    edges: list[list[tuple[int, object]]] = []
    for state, config in nodes:
        out = []
        for tr, nxt_state, nxt_config in successors_l2(aut, state, config):
            j = index.get((nxt_state, nxt_config))
            if j is not None:
                out.append((j, tr))
        edges.append(out)
    return index, edges


def _witness_from(nodes, edges, start: int, goal_set: set[int]) -> L2Run:
    """Shortest path inside the graph from ``start`` into ``goal_set``."""
    parent: dict[int, tuple[int, object]] = {start: (-1, None)}
    queue = [start]
    head = 0
    end = start if start in goal_set else None
    while head < len(queue) and end is None:
        cur = queue[head]
        head += 1
        for j, tr in edges[cur]:
            if j in parent:
                continue
            parent[j] = (cur, tr)
            if j in goal_set:
                end = j
                break
            queue.append(j)
    assert end is not None
    chain = []
    node = end
    while parent[node][0] >= 0:
        prev, tr = parent[node]
        chain.append((tr, node))
        node = prev
    chain.reverse()
    states = [nodes[start][0]]
    configs = [nodes[start][1]]
    transitions = []
    for tr, j in chain:
        transitions.append(tr)
        states.append(nodes[j][0])
        configs.append(nodes[j][1])
    return L2Run(tuple(states), tuple(configs), tuple(transitions))


def bounded_pre_star(
    aut: Hocs2,
    targets: TreeAutomaton,
    caps: Caps,
    queries: list[Node] | None = None,
) -> RegReachResult:
    """Cap-bounded members of pre* of the encoded target set.

    A node is In when some descendant inside the capped graph (including
    itself) has its encoding accepted by ``targets``.
    """
    nodes = _bounded_nodes(aut, caps)
    index, edges = _graph(aut, caps, nodes)
    accepted = {i for i, n in enumerate(nodes) if ta_membership(targets, encode(n))}
    marked = set(accepted)
    changed = True
    while changed:
        changed = False
        for i in range(len(nodes)):
            if i in marked:
                continue
            if any(j in marked for j, _ in edges[i]):
                marked.add(i)
                changed = True
    if queries is None:
        from .hoca2 import INITIAL_L2

        queries = [(aut.initial, INITIAL_L2)]
    verdicts = {}
    witnesses = {}
    for q in queries:
        i = index.get(q)
        hit = i is not None and i in marked
        verdicts[q] = hit
        if hit:
            witnesses[q] = _witness_from(nodes, edges, i, accepted)
    members = tuple(nodes[i] for i in sorted(marked))
    return RegReachResult(verdicts, witnesses, members, caps)


def bounded_post_star(
    aut: Hocs2,
    seeds: TreeAutomaton,
    caps: Caps,
    queries: list[Node] | None = None,
) -> RegReachResult:
    """Cap-bounded members of post* of the encoded seed set (forward closure)."""
    nodes = _bounded_nodes(aut, caps)
    index, edges = _graph(aut, caps, nodes)
    seed_set = {i for i, n in enumerate(nodes) if ta_membership(seeds, encode(n))}
    marked = set(seed_set)
    worklist = list(seed_set)
    while worklist:
        cur = worklist.pop()
        for j, _ in edges[cur]:
            if j not in marked:
                marked.add(j)
                worklist.append(j)
    if queries is None:
        from .hoca2 import INITIAL_L2

        queries = [(aut.initial, INITIAL_L2)]
    # For witnesses we need paths from a seed to the query: search the
    # reversed graph from the query, or equivalently the forward graph
    # from all seeds at once.
    redges: list[list[tuple[int, object]]] = [[] for _ in nodes]
    for i, out in enumerate(edges):
        for j, tr in out:
            redges[j].append((i, tr))
    verdicts = {}
    witnesses = {}
    for q in queries:
        i = index.get(q)
        hit = i is not None and i in marked
        verdicts[q] = hit
        if hit:
            back = _witness_from(nodes, redges, i, seed_set)
            witnesses[q] = _reverse_run(back)
    members = tuple(nodes[i] for i in sorted(marked))
    return RegReachResult(verdicts, witnesses, members, caps)


def _reverse_run(run: L2Run) -> L2Run:
    return L2Run(
        tuple(reversed(run.states)),
        tuple(reversed(run.configs)),
        tuple(reversed(run.transitions)),
    )


def summary_interface(aut: Hocs2) -> SummaryDfa:
    """The deterministic unary summary automaton (re-export)."""
    return build_summary_dfa(aut)

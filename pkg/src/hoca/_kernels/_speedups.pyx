# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels: pushdown saturation and level-2 explicit-state search.

Must stay semantically identical to ``_pure``; the suite cross-checks them.
"""

from libcpp.pair cimport pair
from libcpp.string cimport string
from libcpp.unordered_map cimport unordered_map
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

ctypedef long long i64


def prestar(int n_states, int n_syms, pop_rules, one_rules, two_rules, trans):
    cdef int nk = n_states * n_syms
    cdef vector[vector[int]] targets = vector[vector[int]](nk)
    cdef vector[vector[int]] by_head1 = vector[vector[int]](nk)
    cdef vector[vector[pair[int, int]]] by_head2 = vector[vector[pair[int, int]]](nk)
    cdef vector[vector[int]] pending = vector[vector[int]](nk)
    cdef unordered_set[i64] rel
    cdef vector[i64] worklist
    cdef int p, g, q, g1, g2, s, s2, src_key, head_key, i
    cdef i64 t
    cdef size_t head = 0
    cdef pair[int, int] pr

    for p, g, q, g1 in one_rules:
        by_head1[q * n_syms + g1].push_back(p * n_syms + g)
    for p, g, q, g1, g2 in two_rules:
        pr.first = p * n_syms + g
        pr.second = g2
        by_head2[q * n_syms + g1].push_back(pr)
    for q, g, s in trans:
        worklist.push_back((<i64>(q * n_syms + g)) * n_states + s)
    for p, g, q in pop_rules:
        worklist.push_back((<i64>(p * n_syms + g)) * n_states + q)

    while head < worklist.size():
        t = worklist[head]
        head += 1
        if rel.count(t):
            continue
        rel.insert(t)
        s = <int>(t % n_states)
        head_key = <int>(t / n_states)
        targets[head_key].push_back(s)
        for i in range(<int>by_head1[head_key].size()):
            src_key = by_head1[head_key][i]
            worklist.push_back((<i64>src_key) * n_states + s)
        for i in range(<int>by_head2[head_key].size()):
            src_key = by_head2[head_key][i].first
            g2 = by_head2[head_key][i].second
            pending[s * n_syms + g2].push_back(src_key)
            for s2 in targets[s * n_syms + g2]:
                worklist.push_back((<i64>src_key) * n_states + s2)
        for i in range(<int>pending[head_key].size()):
            src_key = pending[head_key][i]
            worklist.push_back((<i64>src_key) * n_states + s)

    out = set()
    for t in rel:
        s = <int>(t % n_states)
        head_key = <int>(t / n_states)
        out.add((head_key // n_syms, head_key % n_syms, s))
    return out


cdef string _key(int state, vector[int]& stk):
    cdef string k
    k.append(<char*>&state, sizeof(int))
    if stk.size() > 0:
        k.append(<char*>stk.data(), stk.size() * sizeof(int))
    return k


# op codes, matching _pure
cdef enum:
    OP_NOP = 0
    OP_PUSH = 1
    OP_POP = 2
    OP_INC = 3
    OP_DEC = 4
    OP_INVPUSH = 5


def l2_reach(int n_states, trans, int start_state, int bot_sym, int target,
             int max_height, int max_counter, int max_steps):
    cdef int span = max_counter + 1
    cdef int nt = len(trans)
    cdef vector[int] tsym = vector[int](nt)
    cdef vector[int] temp = vector[int](nt)
    cdef vector[int] topc = vector[int](nt)
    cdef vector[int] targ = vector[int](nt)
    cdef vector[int] tdst = vector[int](nt)
    cdef vector[vector[int]] by_src = vector[vector[int]](n_states)
    cdef int idx, src, sym, emp, op, arg, dst

    for idx, (src, sym, emp, op, arg, dst) in enumerate(trans):
        tsym[idx] = sym
        temp[idx] = emp
        topc[idx] = op
        targ[idx] = arg
        tdst[idx] = dst
        by_src[src].push_back(idx)

    if start_state == target:
        return True, False, False, 1, []

    cdef vector[vector[int]] arena
    cdef vector[int] st_of
    cdef vector[pair[int, int]] parents
    cdef unordered_map[string, int] visited
    cdef vector[int] start_stack
    cdef bint pruned = False
    cdef size_t head = 0
    cdef int state, top, top_sym, top_cnt, node, tr_idx, h
    cdef vector[int] stack, nstack
    cdef string key
    cdef pair[int, int] par

    start_stack.push_back(bot_sym * span)
    visited[_key(start_state, start_stack)] = 0
    par.first = -1
    par.second = -1
    parents.push_back(par)
    arena.push_back(start_stack)
    st_of.push_back(start_state)

    while head < arena.size():
        stack = arena[head]
        state = st_of[head]
        head += 1
        top = stack[stack.size() - 1]
        top_sym = top / span
        top_cnt = top % span
        for idx in by_src[state]:
            if tsym[idx] != top_sym:
                continue
            emp = temp[idx]
            if emp >= 0 and (top_cnt == 0) != (emp == 1):
                continue
            op = topc[idx]
            nstack = stack
            if op == OP_NOP:
                pass
            elif op == OP_PUSH:
                if <int>stack.size() >= max_height:
                    pruned = True
                    continue
                nstack.push_back(targ[idx] * span + top_cnt)
            elif op == OP_POP:
                if stack.size() < 2:
                    continue
                nstack.pop_back()
            elif op == OP_INC:
                if top_cnt >= max_counter:
                    pruned = True
                    continue
                nstack[nstack.size() - 1] = top + 1
            elif op == OP_DEC:
                if top_cnt == 0:
                    continue
                nstack[nstack.size() - 1] = top - 1
            else:  # OP_INVPUSH
                if stack.size() < 2 or top_sym != targ[idx]:
                    continue
                if stack[stack.size() - 2] % span != top_cnt:
                    continue
                nstack.pop_back()
            dst = tdst[idx]
            key = _key(dst, nstack)
            if visited.count(key):
                continue
            if <int>visited.size() >= max_steps:
                return False, pruned, True, visited.size(), None
            visited[key] = <int>parents.size()
            par.first = <int>head - 1
            par.second = idx
            parents.push_back(par)
            if dst == target:
                witness = []
                node = <int>parents.size() - 1
                while node > 0:
                    tr_idx = parents[node].second
                    node = parents[node].first
                    witness.append(tr_idx)
                witness.reverse()
                return True, pruned, False, visited.size(), witness
            arena.push_back(nstack)
            st_of.push_back(dst)
    return False, pruned, False, visited.size(), None

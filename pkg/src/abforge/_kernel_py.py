"""Pure-Python execution kernel.

Same contract as the compiled ``_kernel.execute``: mutates ``counts`` and
``states`` in place and returns ``(steps, halted)``.  Policies: 0 lowest
edge first (whole edge drained at once), 1 round-robin over edge ids
(one letter per visit), 2 uniformly random active edge (one letter per
step, splitmix64 stream seeded by ``seed``).
"""
from __future__ import annotations

import heapq

MASK = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return state, z ^ (z >> 31)


def execute(trans, trans_off, nstates, outv, out_off, nout, out_edge, out_edge_off,
            edge_dst, edge_port, counts, states, policy, seed, budget, trace=None):
    n_edges = len(edge_dst)
    steps = 0

    def fire(e, c):
        """Process c letters from edge e; return edges that became active."""
        v = edge_dst[e]
        i = edge_port[e]
        ns = nstates[v]
        tb = trans_off[v] + i * ns
        no = nout[v]
        ob = out_off[v]
        eb = out_edge_off[v]
        q = states[v]
        woke = []
        for _ in range(c):
            if trace is not None:
                trace.append((e, v, q))
            base = ob + (i * ns + q) * no
            for j in range(no):
                k = outv[base + j]
                if k:
                    e2 = out_edge[eb + j]
                    if counts[e2] == 0 and edge_dst[e2] >= 0:
                        woke.append(e2)
                    counts[e2] += k
            q = trans[tb + q]
        states[v] = q
        return woke

    if policy == 0:
        heap = [e for e in range(n_edges) if counts[e] > 0 and edge_dst[e] >= 0]
        heapq.heapify(heap)
        queued = [False] * n_edges
        for e in heap:
            queued[e] = True
        while heap:
            e = heapq.heappop(heap)
            queued[e] = False
            c = counts[e]
            if c == 0:
                continue
            if steps + c > budget:
                c = budget - steps
                counts[e] -= c
                fire(e, c)
                return budget, False
            counts[e] = 0
            steps += c
            for e2 in fire(e, c):
                if not queued[e2]:
                    queued[e2] = True
                    heapq.heappush(heap, e2)
            if counts[e] > 0 and not queued[e]:
                queued[e] = True
                heapq.heappush(heap, e)
        return steps, True

    if policy == 1:
        ptr = 0
        idle = 0
        while idle < n_edges:
            e = ptr
            ptr = ptr + 1 if ptr + 1 < n_edges else 0
            if counts[e] > 0 and edge_dst[e] >= 0:
                if steps >= budget:
                    return steps, False
                counts[e] -= 1
                steps += 1
                fire(e, 1)
                idle = 0
            else:
                idle += 1
        return steps, True

    rng = seed & MASK
    active = [e for e in range(n_edges) if counts[e] > 0 and edge_dst[e] >= 0]
    pos = [-1] * n_edges
    for p, e in enumerate(active):
        pos[e] = p
    while active:
        if steps >= budget:
            return steps, False
        rng, r = splitmix64(rng)
        e = active[r % len(active)]
        counts[e] -= 1
        steps += 1
        if counts[e] == 0:
            last = active.pop()
            if last != e:
                active[pos[e]] = last
                pos[last] = pos[e]
            pos[e] = -1
        for e2 in fire(e, 1):
            if pos[e2] < 0:
                pos[e2] = len(active)
                active.append(e2)
        if counts[e] > 0 and pos[e] < 0:
            pos[e] = len(active)
            active.append(e)
    return steps, True

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled execution kernel; mirrors ``_kernel_py.execute`` exactly."""
from libc.stdlib cimport malloc, free
from libc.stdint cimport uint64_t


cdef inline uint64_t _mix(uint64_t* state) noexcept nogil:
    state[0] += <uint64_t>0x9E3779B97F4A7C15ULL
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef struct Net:
    const long long* trans
    const long long* trans_off
    const long long* nstates
    const long long* outv
    const long long* out_off
    const long long* nout
    const long long* out_edge
    const long long* out_edge_off
    const long long* edge_dst
    const long long* edge_port
    long long* counts
    long long* states


cdef inline int _fire(Net* n, long long e, long long c, long long* woke) noexcept nogil:
    """Process c letters from edge e; write newly active edges to woke."""
    cdef long long v = n.edge_dst[e]
    cdef long long i = n.edge_port[e]
    cdef long long ns = n.nstates[v]
    cdef long long tb = n.trans_off[v] + i * ns
    cdef long long no = n.nout[v]
    cdef long long ob = n.out_off[v]
    cdef long long eb = n.out_edge_off[v]
    cdef long long q = n.states[v]
    cdef long long base, j, k, e2, r
    cdef int nw = 0
    for r in range(c):
        base = ob + (i * ns + q) * no
        for j in range(no):
            k = n.outv[base + j]
            if k:
                e2 = n.out_edge[eb + j]
                if n.counts[e2] == 0 and n.edge_dst[e2] >= 0:
                    woke[nw] = e2
                    nw += 1
                n.counts[e2] += k
        q = n.trans[tb + q]
    n.states[v] = q
    return nw


cdef inline void _push(long long* heap, long long* size, long long x) noexcept nogil:
    cdef long long p = size[0]
    size[0] += 1
    cdef long long parent
    while p > 0:
        parent = (p - 1) >> 1
        if heap[parent] <= x:
            break
        heap[p] = heap[parent]
        p = parent
    heap[p] = x


cdef inline long long _pop(long long* heap, long long* size) noexcept nogil:
    cdef long long top = heap[0]
    size[0] -= 1
    cdef long long x = heap[size[0]]
    cdef long long n = size[0]
    cdef long long p = 0, c
    while True:
        c = 2 * p + 1
        if c >= n:
            break
        if c + 1 < n and heap[c + 1] < heap[c]:
            c += 1
        if heap[c] >= x:
            break
        heap[p] = heap[c]
        p = c
    if n > 0:
        heap[p] = x
    return top


def execute(const long long[:] trans, const long long[:] trans_off, const long long[:] nstates,
            const long long[:] outv, const long long[:] out_off, const long long[:] nout,
            const long long[:] out_edge, const long long[:] out_edge_off,
            const long long[:] edge_dst, const long long[:] edge_port,
            long long[:] counts, long long[:] states, int policy, unsigned long long seed,
            long long budget, trace=None):
    if trace is not None:
        raise ValueError("the compiled kernel does not record traces")
    cdef long long n_edges = edge_dst.shape[0]
    cdef long long steps = 0
    cdef Net n
    cdef long long dummy = 0
    n.trans = &trans[0] if trans.shape[0] else &dummy
    n.trans_off = &trans_off[0] if trans_off.shape[0] else &dummy
    n.nstates = &nstates[0] if nstates.shape[0] else &dummy
    n.outv = &outv[0] if outv.shape[0] else &dummy
    n.out_off = &out_off[0] if out_off.shape[0] else &dummy
    n.nout = &nout[0] if nout.shape[0] else &dummy
    n.out_edge = &out_edge[0] if out_edge.shape[0] else &dummy
    n.out_edge_off = &out_edge_off[0] if out_edge_off.shape[0] else &dummy
    if n_edges == 0:
        return 0, True
    n.edge_dst = &edge_dst[0]
    n.edge_port = &edge_port[0]
    n.counts = &counts[0]
    n.states = &states[0] if states.shape[0] else &dummy

    cdef long long* woke = <long long*>malloc(sizeof(long long) * (n_edges + 1))
    cdef long long* heap = <long long*>malloc(sizeof(long long) * (n_edges + 1))
    cdef long long* pos = <long long*>malloc(sizeof(long long) * (n_edges + 1))
    cdef long long size = 0, e, c, w, ptr, idle, last
    cdef int nw
    cdef uint64_t rng = seed
    cdef bint halted = True
    try:
        with nogil:
            for e in range(n_edges):
                pos[e] = -1
            if policy == 0:
                for e in range(n_edges):
                    if n.counts[e] > 0 and n.edge_dst[e] >= 0:
                        _push(heap, &size, e)
                        pos[e] = 1
                while size > 0:
                    e = _pop(heap, &size)
                    pos[e] = -1
                    c = n.counts[e]
                    if c == 0:
                        continue
                    if steps + c > budget:
                        c = budget - steps
                        n.counts[e] -= c
                        _fire(&n, e, c, woke)
                        steps = budget
                        halted = False
                        break
                    n.counts[e] = 0
                    steps += c
                    # counts only grow inside a batch, so each out-edge wakes at most once
                    nw = _fire(&n, e, c, woke)
                    for w in range(nw):
                        if pos[woke[w]] < 0:
                            pos[woke[w]] = 1
                            _push(heap, &size, woke[w])
                    if n.counts[e] > 0 and pos[e] < 0:
                        pos[e] = 1
                        _push(heap, &size, e)
            elif policy == 1:
                ptr = 0
                idle = 0
                while idle < n_edges:
                    e = ptr
                    ptr = ptr + 1 if ptr + 1 < n_edges else 0
                    if n.counts[e] > 0 and n.edge_dst[e] >= 0:
                        if steps >= budget:
                            halted = False
                            break
                        n.counts[e] -= 1
                        steps += 1
                        _fire(&n, e, 1, woke)
                        idle = 0
                    else:
                        idle += 1
            else:
                size = 0
                for e in range(n_edges):
                    if n.counts[e] > 0 and n.edge_dst[e] >= 0:
                        pos[e] = size
                        heap[size] = e
                        size += 1
                while size > 0:
                    if steps >= budget:
                        halted = False
                        break
                    e = heap[_mix(&rng) % <uint64_t>size]
                    n.counts[e] -= 1
                    steps += 1
                    if n.counts[e] == 0:
                        size -= 1
                        last = heap[size]
                        if last != e:
                            heap[pos[e]] = last
                            pos[last] = pos[e]
                        pos[e] = -1
                    nw = _fire(&n, e, 1, woke)
                    for w in range(nw):
                        if pos[woke[w]] < 0:
                            pos[woke[w]] = size
                            heap[size] = woke[w]
                            size += 1
                    if n.counts[e] > 0 and pos[e] < 0:
                        pos[e] = size
                        heap[size] = e
                        size += 1
    finally:
        free(woke)
        free(heap)
        free(pos)
    return steps, halted


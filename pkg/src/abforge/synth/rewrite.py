"""Network-to-network rewrites: removing primes, and trading topplers for 2-topplers with feedback."""
from __future__ import annotations

import math
from functools import lru_cache

from ..gates import GateSpec, splitter, toppler
from ..network import Builder, Network, Node, Sig, Simulator


def rebuild(net: Network, replace) -> Network:
    """Copy ``net`` node by node; ``replace(b, node, in_wires)`` emits each node.

    Returning None from ``replace`` keeps the node unchanged.
    """
    b = Builder()
    ins = {eid: b.input() for eid in net.inputs}
    fwd = {(e.src, e.src_port): b.forward() for e in net.edges if e.src is not None}
    for v in net.nodes:
        wires = []
        for i in range(v.proc.k):
            e = net.in_edge(v.id, i)
            wires.append(fwd[(e.src, e.src_port)] if e.src is not None else ins.get(e.id))
        outs = replace(b, v, wires)
        if outs is None:
            outs = b._node(gate=v.gate, processor=v.processor, ins=wires)
        for j, o in enumerate(outs):
            if o is not None:
                b.bind(fwd[(v.id, j)], o)
            else:
                raise ValueError("replacement produced a zero wire for a live port")
    for eid in net.outputs:
        e = net.edge(eid)
        b.output(fwd[(e.src, e.src_port)] if e.src is not None else None)
    return b.build()


# ---------------------------------------------------------------------------
# unpriming
# ---------------------------------------------------------------------------


def emit_unprimed(b: Builder, x: Sig, lam: int, q: int) -> Sig:
    """floor((x + q)/lam) as floor((x + q min(x, 1))/lam) with an unprimed toppler."""
    a, c = b.split(x, 2)
    flag = b.presink(c)
    return b.gate(toppler(lam, 0), [b.add([a] + b.split(flag, q))])[0]


def rewrite_unprime(net: Network) -> Network:
    def replace(b, v, wires):
        g = v.gate
        if g is None or g.kind != "toppler" or g.prime == 0:
            return None
        return [emit_unprimed(b, wires[0], g.lam, g.prime)]

    return rebuild(net, replace)


# ---------------------------------------------------------------------------
# feedback
# ---------------------------------------------------------------------------


def counter_bits(lam: int) -> list:
    """b_0..b_{r-1}: binary digits of 2^r - lam with r = ceil(log2 lam); b_{r-1} = 0."""
    r = max(1, math.ceil(math.log2(lam)))
    while (1 << r) < lam:  # guard against float rounding
        r += 1
    while r > 1 and (1 << (r - 1)) >= lam:
        r -= 1
    d = (1 << r) - lam
    return [(d >> i) & 1 for i in range(r)]


def emit_counter(b: Builder, x: Sig, lam: int, states=None) -> tuple:
    """Chain of 2-topplers whose overflow is fed back; returns (output wire, toppler node ids)."""
    bits = counter_bits(lam)
    r = len(bits)
    if states is None:
        states = bits[:-1] + [0]
    loops = []
    ids = []
    w = x
    for i in range(r):
        if bits[i]:
            f = b.forward()
            loops.append(f)
            w = b.add([w, f])
        ids.append(len(b._nodes))
        w = b.gate(toppler(2, states[i]), [w])[0]
    outs = b.split(w, 1 + len(loops))
    for f, o in zip(loops, outs[1:]):
        b.bind(f, o)
    return outs[0], ids


@lru_cache(maxsize=None)
def counter_states(lam: int, q: int) -> tuple:
    """2-toppler states of the counter after it has absorbed q letters."""
    b = Builder()
    out, ids = emit_counter(b, b.input(), lam)
    b.output(out)
    net = b.build()
    sim = Simulator(net)
    sim.feed([q])
    sim.settle()
    pos = {v.id: p for p, v in enumerate(net.nodes)}
    return tuple(sim.states[pos[i]] for i in ids)


def emit_feedback_toppler(b: Builder, x: Sig, lam: int, q: int = 0) -> Sig:
    if lam <= 2:
        return b.gate(toppler(lam, q), [x])[0] if lam == 2 else x
    return emit_counter(b, x, lam, list(counter_states(lam, q)))[0]


def emit_feedback_delayer(b: Builder, x: Sig) -> Sig:
    """Adder into a 2-toppler whose split output returns to the adder."""
    f = b.forward()
    t = b.gate(toppler(2, 0), [b.add([x, f])])[0]
    out, back = b.split(t, 2)
    b.bind(f, back)
    return out


def rewrite_feedback(net: Network) -> Network:
    def replace(b, v, wires):
        g = v.gate
        if g is None:
            return None
        if g.kind == "toppler" and g.lam >= 3:
            return [emit_feedback_toppler(b, wires[0], g.lam, g.prime)]
        if g.kind == "delayer":
            return [emit_feedback_delayer(b, wires[0])]
        return None

    return rebuild(net, replace)


def feedback_toppler(lam: int, q: int = 0) -> Network:
    """Stand-alone emulation of a q-primed lam-toppler."""
    b = Builder()
    b.output(emit_feedback_toppler(b, b.input(), lam, q))
    return b.build()


def feedback_delayer() -> Network:
    b = Builder()
    b.output(emit_feedback_delayer(b, b.input()))
    return b.build()

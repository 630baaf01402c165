"""Networks for arbitrary (eventually periodic) functions, using all five gates.

The last coordinate ``z`` is peeled off by interleaving: after splitting F
into pieces of roughness one, every ``n``-th layer of a piece is a function
that stops changing (or grows by exactly one per step) after its first
layer step, and the pieces' layers are recombined with a pseudo-minimum.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..core import ZilepError, ZilepFunction, is_bounded, layer_profile
from ..network import Network, Sig, Simulator
from ..pseudomin import eval_M, pseudomin_zilep
from .common import (ModeError, Options, SynthBuilder, SynthesisError, SynthesisTooLarge,
                     check_on_box, emit, floor_pieces, support, synthesize, tabulate,
                     verification_shape)


# ---------------------------------------------------------------------------
# one input: delayer chain with presink taps
# ---------------------------------------------------------------------------


def transient_split(F: ZilepFunction):
    """(R, steps, G): F(x) = G((x - R)^+) + sum_{i<R} steps[i] 1[x > i]."""
    R, lam = F.margins[0], F.periods[0]
    steps = [F((i + 1,))[0] - F((i,))[0] for i in range(R)]
    base = F((R,))[0]
    G = tabulate(lambda x: F((x[0] + R,))[0] - base, 1, (lam,), (0,))
    return R, steps, G


def emit_unary_transient(b: SynthBuilder, F: ZilepFunction, x: Sig | None) -> Sig | None:
    from .recurrent import emit_unary_recurrent

    R, steps, G = transient_split(F)
    if R == 0:
        return emit_unary_recurrent(b, G, x)
    b.passes["unary_transient"] += 1
    terms = []
    s = x
    for i in range(R):
        if steps[i]:
            tap, s = b.split(s, 2)
            terms.append(b.scale(b.presink(tap), steps[i]))
        s = b.delayer(s)
    terms.append(emit_unary_recurrent(b, G, s) if any(G.table) else None)
    return b.add(terms)


# ---------------------------------------------------------------------------
# two layers: functions constant in z >= 1
# ---------------------------------------------------------------------------


def _layer(F: ZilepFunction, z: int, minus: int = 0):
    """The (k-1)-ary function y -> F(y, z) - minus (None when k = 1)."""
    if F.k == 1:
        return None
    return tabulate(lambda y: F(tuple(y) + (z,))[0] - minus, F.k - 1, F.periods[:-1], F.margins[:-1])


def _y_points(F: ZilepFunction):
    return itertools.product(*(range(r + p + 1) for r, p in zip(F.margins[:-1], F.periods[:-1])))


def two_layer_condition(F: ZilepFunction) -> bool:
    return all(F(tuple(y) + (2,)) == F(tuple(y) + (1,)) for y in _y_points(F)) and \
        F.coeffs[0][-1] == 0 and F.margins[-1] <= 1


@dataclass
class TwoLayerPiece:
    u: int
    f0: ZilepFunction | None
    f1: ZilepFunction | None
    uses_z: bool


def two_layer_plan(F: ZilepFunction) -> list:
    """Pieces (u, f0, f1) with F = sum of floor((f0 + f1 + u + 1[z > 0]) / 2)."""
    if not two_layer_condition(F):
        raise ModeError("function changes after its first step in the last coordinate")
    W = max(F(tuple(y) + (1,))[0] - F(tuple(y) + (0,))[0] for y in _y_points(F))
    if W == 0:
        return [TwoLayerPiece(0, _layer(F, 0), None, False)]
    plan = []
    for p in floor_pieces(F, W):
        if all(p(tuple(y) + (1,)) == p(tuple(y) + (0,)) for y in _y_points(p)):
            plan.append(TwoLayerPiece(0, _layer(p, 0), None, False))
            continue
        u = p((0,) * (p.k - 1) + (1,))[0]
        plan.append(TwoLayerPiece(u, _layer(p, 0), _layer(p, 1, u), True))
    return plan


def emit_two_layer(b: SynthBuilder, F: ZilepFunction, ins) -> Sig | None:
    b.passes["two_layer"] += 1
    plan = two_layer_plan(F)
    y, z = list(ins[:-1]), ins[-1]
    subs = []
    for piece in plan:
        subs.append(piece.f0)
        subs.append(piece.f1)
    deps = [set(support(g)) if g is not None else set() for g in subs]
    pools = [b.split(y[i], sum(1 for d in deps if i in d)) for i in range(len(y))]
    zs = b.split(z, sum(1 for p in plan if p.uses_z))
    outs = []
    for n, piece in enumerate(plan):
        wires = []
        for g, d in zip((piece.f0, piece.f1), deps[2 * n:2 * n + 2]):
            if g is None:
                wires.append(None)
            else:
                wires.append(emit(b, g, [pools[i].pop() if i in d else None for i in range(len(y))],
                                  "general"))
        if not piece.uses_z:
            outs.append(wires[0])
            continue
        total = b.add([wires[0], wires[1], b.presink(zs.pop())])
        outs.append(b.toppler(total, 2, piece.u) if total is not None else None)
    return b.add(outs)


def two_layer(F: ZilepFunction) -> Network:
    b = SynthBuilder()
    ins = [b.input() for _ in range(F.k)]
    b.output(emit_two_layer(b, F, ins))
    return b.build()


# ---------------------------------------------------------------------------
# interleaving
# ---------------------------------------------------------------------------


def zeta(n: int, i: int, z: int) -> int:
    return (z + n - i - 1) // n


def layer_targets(n: int, z: int) -> list:
    """z_i = n zeta_i(z) + i; a permutation of z..z+n-1."""
    return [n * zeta(n, i, z) + i for i in range(n)]


@dataclass
class InterleavePlan:
    n: int
    case: int
    u: tuple
    G: list
    H: list | None
    primes: tuple

    @property
    def M(self) -> ZilepFunction:
        """The combiner v -> M(v + u) as a tabulated function."""
        return pseudomin_zilep(self.n, self.u)

    def combine(self, y, z) -> int:
        """Right side of the interleaving identity at (y, z)."""
        vals = [self.G[i](tuple(y) + (zeta(self.n, i, z),))[0] + self.u[i] for i in range(self.n)]
        return eval_M(self.n, vals)


def interleave_plan(F: ZilepFunction, n: int, case: int, check: bool = True) -> InterleavePlan:
    if case not in (0, 1):
        raise ValueError("case must be 0 or 1")
    k = F.k
    yp, yr = F.periods[:-1], F.margins[:-1]
    zero = (0,) * (k - 1)
    u = tuple(F(zero + (i,))[0] for i in range(n))
    G = []
    for i in range(n):
        try:
            G.append(tabulate(lambda x, i=i: F(tuple(x[:-1]) + (n * x[-1] + i,))[0] - u[i],
                              k, yp + (1,), yr + (1,)))
        except ZilepError as e:
            raise SynthesisError(f"layer {i} of width {n} is not eventually periodic: {e}", F)
    H = None
    if case == 1:
        H = [tabulate(lambda x, g=g: g(tuple(x[:-1]) + (min(x[-1], 1),))[0], k, yp + (1,), yr + (1,))
             for g in G]
        if check:
            for g, h in zip(G, H):
                check_on_box(g, lambda x, h=h: h(x)[0] + max(x[-1] - 1, 0), "layer split")
    if eval_M(n, u) != 0:
        raise SynthesisError(f"offsets {u} give M(u) = {eval_M(n, u)}", F)
    plan = InterleavePlan(n, case, u, G, H, tuple(n - i - 1 for i in range(n)))
    if check:
        check_on_box(F, lambda x: plan.combine(x[:-1], x[-1]), "interleaving identity")
    return plan


@lru_cache(maxsize=None)
def _pseudomin_network(n: int) -> Network:
    from .recurrent import synth_recurrent

    return synth_recurrent(pseudomin_zilep(n, (0,) * n))


@lru_cache(maxsize=256)
def _combiner(n: int, u: tuple) -> Network:
    """Network for v -> M(v + u): the unshifted one, restarted after reading u."""
    base = _pseudomin_network(n)
    if not any(u):
        return base
    sim = Simulator(base)
    sim.feed(u)
    sim.settle()
    if sim.output() != (0,):
        raise SynthesisError(f"pseudo-minimum offsets {u} do not map to zero")
    return base.with_states(sim.states)


def emit_interleave(b: SynthBuilder, plan: InterleavePlan, ins) -> Sig | None:
    b.passes[f"interleave_case{plan.case}"] += 1
    n = plan.n
    y, z = list(ins[:-1]), ins[-1]
    layers = plan.G if plan.case == 0 else plan.H
    sup = [set(support(g)) for g in layers]
    ky = len(y)
    pools = [b.split(y[i], sum(1 for d in sup if i in d)) for i in range(ky)]
    zs = b.split(z, n)
    outs = []
    for i in range(n):
        zt = b.toppler(zs[i], n, plan.primes[i])
        uses_zeta = ky in sup[i]
        if plan.case == 1:
            za, zb = b.split(zt, 2) if uses_zeta else (None, zt)
            extra = b.delayer(zb)
        else:
            za, extra = zt, None
        wires = [pools[j].pop() if j in sup[i] else None for j in range(ky)]
        if uses_zeta:
            body = emit_two_layer(b, layers[i], wires + [za])
        else:
            body = emit(b, layers[i], wires + [None], "general")
        outs.append(b.add([body, extra]))
    if n == 1:
        return outs[0]
    return b.embed(_combiner(n, plan.u), outs)[0]


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def choose_width(W: int, S: Fraction, L: int, R: int) -> int:
    """Interleave width for slope S > 0: least multiple of L with n >= R and S n >= W."""
    n = L
    while n < R or S * n < W:
        n += L
    return n


def required_width(F: ZilepFunction, coord: int | None = None) -> int:
    """Interleave width the general compiler needs when inducting on ``coord``."""
    prof = layer_profile(F, coord)
    W, S, L, R = prof.roughness, prof.slope, prof.period, prof.margin
    if W == 0:
        return 0
    if S == 0:
        return max(R, 1)
    return choose_width(W, S, L, R)


def permute(F: ZilepFunction, order) -> ZilepFunction:
    """G(x) = F(y) with y[order[i]] = x[i]."""
    order = list(order)

    def g(x):
        y = [0] * F.k
        for i, c in enumerate(order):
            y[c] = x[i]
        return F(y)[0]

    return tabulate(g, F.k, [F.periods[c] for c in order], [F.margins[c] for c in order])


def induction_order(F: ZilepFunction) -> list:
    """Coordinate order putting last the coordinate with the smallest interleave width."""
    widths = [required_width(F, c) for c in range(F.k)]
    best = min(range(F.k), key=lambda c: (widths[c], c != F.k - 1))
    return [c for c in range(F.k) if c != best] + [best]


def general_pieces(F: ZilepFunction):
    """Roughness-one pieces of F along its last coordinate, with (n, case) for each."""
    prof = layer_profile(F)
    W, S, L, R = prof.roughness, prof.slope, prof.period, prof.margin
    if W == 0:
        return []
    if S == 0:
        return [(p, max(p.margins[-1], 1), 0) for p in floor_pieces(F, W)]
    n = choose_width(W, S, L, R)
    m = int(S * n)
    return [(p, n, 1) for p in floor_pieces(F, m)]


def emit_general(b: SynthBuilder, F: ZilepFunction, ins) -> Sig | None:
    from .bounded import emit_bounded
    from .recurrent import emit_recurrent

    opts = b.options
    if opts.shortcuts and F.is_zilp:
        return emit_recurrent(b, F, ins)
    if opts.shortcuts and is_bounded(F).bounded:
        return emit_bounded(b, F, ins)
    if F.k == 1:
        return emit_unary_transient(b, F, ins[0])
    order = induction_order(F)
    if order != list(range(F.k)):
        b.passes["reorder"] += 1
        F = permute(F, order)
        ins = [ins[c] for c in order]
    pieces = general_pieces(F)
    if len(pieces) > 1:
        b.passes["meagerize_general"] += 1
    deps = [set(support(p)) for p, _, _ in pieces]
    pools = [b.split(ins[i], sum(1 for d in deps if i in d)) for i in range(F.k)]
    outs = []
    for (p, n, case), d in zip(pieces, deps):
        wires = [pools[i].pop() if i in d else None for i in range(F.k)]
        full = len(d) == F.k
        if not full or (opts.shortcuts and (p.is_zilp or is_bounded(p).bounded)):
            outs.append(emit(b, p, wires, "general"))
            continue
        if n > opts.max_width:
            raise SynthesisTooLarge(
                f"interleave width {n} exceeds the cap {opts.max_width} for {p!r}")
        plan = interleave_plan(p, n, case, check=opts.check)
        outs.append(emit_interleave(b, plan, wires))
    return b.add(outs)


def synth_general(f: ZilepFunction, options: Options | None = None, with_passes: bool = False):
    return synthesize(f, "general", options, with_passes)

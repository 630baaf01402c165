"""Adder/splitter/toppler networks for periodic (ZILP) functions."""
from __future__ import annotations

from fractions import Fraction

from ..core import ZilepFunction, is_meager
from ..network import Builder, Network, Sig
from .common import (ModeError, SynthBuilder, SynthesisError, check_on_box, emit, fan_out,
                     floor_pieces, is_linear, synthesize, tabulate)


def _require_zilp(f: ZilepFunction):
    if not f.is_zilp:
        raise ModeError(f"function has margins {f.margins}; the periodic compiler needs all zero")


# ---------------------------------------------------------------------------
# linear maps
# ---------------------------------------------------------------------------


def emit_linear(b: Builder, f: ZilepFunction, ins) -> list:
    """One wire per output, computing x -> L x with nonnegative integer L."""
    L = [[int(c) for c in row] for row in f.coeffs]
    copies = [b.split(s, sum(L[j][i] for j in range(f.l))) for i, s in enumerate(ins)]
    outs = []
    for j in range(f.l):
        terms = []
        for i in range(f.k):
            for _ in range(L[j][i]):
                terms.append(copies[i].pop())
        outs.append(b.add(terms))
    return outs


def synth_linear(f: ZilepFunction) -> Network:
    if not is_linear(f):
        raise ModeError("function is not an integer linear map")
    b = Builder()
    ins = [b.input() for _ in range(f.k)]
    for o in emit_linear(b, f, ins):
        b.output(o)
    return b.build()


# ---------------------------------------------------------------------------
# one input
# ---------------------------------------------------------------------------


def unary_primes(f: ZilepFunction) -> list:
    """Toppler primes for a unary periodic f: d_i copies primed lambda - i."""
    lam = f.periods[0]
    primes = []
    for i in range(1, lam + 1):
        d = f((i,))[0] - f((i - 1,))[0]
        primes.extend([(lam - i) % lam] * d)
    return primes


def emit_unary_recurrent(b: SynthBuilder, f: ZilepFunction, x: Sig | None) -> Sig | None:
    _require_zilp(f)
    b.passes["unary_recurrent"] += 1
    lam = f.periods[0]
    primes = unary_primes(f)
    if lam == 1:
        return b.scale(x, len(primes))
    branches = b.split(x, len(primes))
    return b.add([b.toppler(s, lam, q) for s, q in zip(branches, primes)])


def synth_unary_recurrent(f: ZilepFunction) -> Network:
    if f.k != 1 or f.l != 1:
        raise ModeError("expected a unary function with unary output")
    _require_zilp(f)
    b = SynthBuilder()
    b.output(emit_unary_recurrent(b, f, b.input()))
    return b.build()


# ---------------------------------------------------------------------------
# meagerization and the main reduction
# ---------------------------------------------------------------------------


def meagerize(f: ZilepFunction, coord: int | None = None, check: bool = True) -> list:
    """Split f into m = lambda_c b_c pieces floor((f + j)/m), each meager in c."""
    _require_zilp(f)
    c = f.k - 1 if coord is None else coord
    m = is_meager(f, c).quantum
    if m == 0:
        raise ModeError(f"coordinate {c} is degenerate (zero slope)")
    pieces = floor_pieces(f, m)
    if check:
        check_on_box(f, lambda x: sum(p(x)[0] for p in pieces), "meagerization sum")
    return pieces


def main_reduction(f: ZilepFunction, check: bool = True):
    """(g, c, lambda) with f(y, z) = floor((g(y) + z + c) / lambda) for meager f.

    Extending f below zero along z by f(y, z - lambda) = f(y, z) - 1, the
    least z with f(y, z) >= 0 is min over residues rho of rho - lambda f(y, rho).
    """
    _require_zilp(f)
    k = f.k
    meager = is_meager(f, k - 1)
    if not meager.meager:
        raise ModeError(f"function is not meager in its last coordinate (quantum {meager.quantum})")
    lam = f.periods[-1]

    def h(y):
        return min(rho - lam * f(tuple(y) + (rho,))[0] for rho in range(lam))

    h0 = h((0,) * (k - 1))
    c = -h0
    if not 0 <= c < lam:
        raise SynthesisError(f"offset {c} outside [0, {lam})", f)
    if k == 1:
        g = None
    else:
        g = tabulate(lambda y: h0 - h(y), k - 1, f.periods[:-1], (0,) * (k - 1))
    if check:
        gv = (lambda x: 0) if g is None else (lambda x: g(x[:-1])[0])
        check_on_box(f, lambda x: (gv(x) + x[-1] + c) // lam, "main reduction identity")
    return g, c, lam


def emit_recurrent(b: SynthBuilder, f: ZilepFunction, ins) -> Sig | None:
    """f has unary output and depends on every coordinate."""
    _require_zilp(f)
    if is_linear(f):
        b.passes["linear"] += 1
        return emit_linear(b, f, ins)[0]
    if f.k == 1:
        return emit_unary_recurrent(b, f, ins[0])
    if is_meager(f, f.k - 1).quantum > 1:
        b.passes["meagerize"] += 1
        pieces = meagerize(f, check=b.options.check)
        wires = fan_out(b, ins, pieces)
        return b.add([emit(b, p, w, "recurrent") for p, w in zip(pieces, wires)])
    b.passes["main_reduction"] += 1
    g, c, lam = main_reduction(f, check=b.options.check)
    y = emit(b, g, ins[:-1], "recurrent")
    return b.toppler(b.add([y, ins[-1]]), lam, c)


def synth_recurrent(f: ZilepFunction, options=None, with_passes: bool = False):
    _require_zilp(f)
    return synthesize(f, "recurrent", options, with_passes)

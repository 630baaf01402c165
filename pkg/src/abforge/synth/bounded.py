"""Delayer/presink networks for bounded functions.

A bounded f is the sum over j < J of the indicators 1[f(x) > j]; each
indicator is an OR over the minimal points m of {f > j} of the AND over
coordinates of 1[x_i >= m_i].  Thresholds on one coordinate share a single
delayer chain with a presink tap at each level.
"""
from __future__ import annotations

import itertools

from ..core import ZilepFunction, is_bounded
from ..network import Sig
from .common import ModeError, SynthBuilder, synthesize


def minimal_points(f: ZilepFunction, j: int) -> list:
    """Minimal elements of {x : f(x) > j}, scanned over the box."""
    shape = [r + p + 1 for r, p in zip(f.margins, f.periods)]
    pts = []
    for x in itertools.product(*(range(s) for s in shape)):
        if f.box_value(x)[0] <= j:
            continue
        minimal = True
        for i in range(f.k):
            if x[i] > 0:
                y = list(x)
                y[i] -= 1
                if f.box_value(y)[0] > j:
                    minimal = False
                    break
        if minimal:
            pts.append(x)
    return pts


def _fold(b: SynthBuilder, wires, combine):
    acc = wires[0]
    for w in wires[1:]:
        acc = combine(b.add([acc, w]))
    return acc


def emit_bounded(b: SynthBuilder, f: ZilepFunction, ins) -> Sig | None:
    bd = is_bounded(f)
    if not bd.bounded:
        raise ModeError("function is unbounded; the bounded compiler needs zero slopes")
    b.passes["bounded"] += 1
    J = bd.bound
    terms = [[minimal_points(f, j)] for j in range(J)]
    # count how often each (coordinate, threshold) indicator is needed
    need = {}
    for (pts,) in terms:
        for m in pts:
            for i, t in enumerate(m):
                if t > 0:
                    need[(i, t)] = need.get((i, t), 0) + 1
    taps = {}
    for i in range(f.k):
        levels = sorted(t for (c, t) in need if c == i)
        if not levels:
            continue
        s = ins[i]
        for t in range(1, levels[-1] + 1):
            if t == levels[-1]:
                tap, s = s, None
            elif (i, t) in need:
                tap, s = b.split(s, 2)
            else:
                tap = None
            if tap is not None:
                taps[(i, t)] = b.split(b.presink(tap), need[(i, t)])
            if s is not None:
                s = b.delayer(s)
    outs = []
    for (pts,) in terms:
        clauses = []
        for m in pts:
            lits = [taps[(i, t)].pop() for i, t in enumerate(m) if t > 0]
            clauses.append(_fold(b, lits, b.delayer))
        outs.append(_fold(b, clauses, b.presink))
    return b.add(outs)


def synth_bounded(f: ZilepFunction, options=None, with_passes: bool = False):
    for j in range(f.l):
        if not is_bounded(f.component(j)).bounded:
            raise ModeError("function is unbounded; the bounded compiler needs zero slopes")
    return synthesize(f, "bounded", options, with_passes)

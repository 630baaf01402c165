"""Shared machinery for the synthesis passes."""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

from ..core import ZilepFunction, minimize
from ..network import Builder, Network, Sig


class SynthesisError(AssertionError):
    """An internal soundness check failed; ``chain`` lists the enclosing passes."""

    def __init__(self, msg: str, f: ZilepFunction | None = None):
        super().__init__(msg)
        self.chain = []
        if f is not None:
            self.chain.append(("origin", f.to_json()))

    def __str__(self):
        base = super().__str__()
        if not self.chain:
            return base
        trail = " <- ".join(name for name, _ in self.chain)
        return f"{base} [{trail}]"


class SynthesisTooLarge(RuntimeError):
    """The construction would need an interleave width beyond the configured cap."""


class ModeError(ValueError):
    """The function is outside the class handled by the requested entry point."""


@dataclass
class Options:
    shortcuts: bool = True  # route ZILP / bounded sub-functions to the cheaper compilers
    max_width: int = 4  # largest interleave width n accepted by the general compiler
    check: bool = True  # run internal identity checks on the tables


class SynthBuilder(Builder):
    def __init__(self, options: Options | None = None):
        super().__init__()
        self.options = options or Options()
        self.passes = Counter()


# ---------------------------------------------------------------------------
# function helpers
# ---------------------------------------------------------------------------


def tabulate(func: Callable, k: int, periods, margins) -> ZilepFunction:
    """Tabulate a unary-output function and shrink its periods and margins."""
    return minimize(ZilepFunction.from_callable(func, k, periods, margins))


def support(f: ZilepFunction) -> list:
    """Coordinates the function actually depends on."""
    shape = f.shape
    keep = []
    for i in range(f.k):
        ranges = [range(s) for s in shape]
        ranges[i] = range(shape[i] - 1)
        for x in itertools.product(*ranges):
            y = list(x)
            y[i] += 1
            if f.box_value(x) != f.box_value(y):
                keep.append(i)
                break
    return keep


def restrict(f: ZilepFunction, keep: Sequence[int]) -> ZilepFunction:
    """The function of the kept coordinates obtained by zeroing the others."""
    keep = list(keep)
    if keep == list(range(f.k)):
        return f

    def g(y):
        x = [0] * f.k
        for i, v in zip(keep, y):
            x[i] = v
        return f(x)[0]

    return tabulate(g, len(keep), [f.periods[i] for i in keep], [f.margins[i] for i in keep])


def floor_pieces(f: ZilepFunction, m: int) -> list:
    """The m functions floor((f + j) / m), j < m, whose sum is f."""
    if m == 1:
        return [f]
    jumps = f.jumps()[0]
    periods = [lam * m // math.gcd(m, J) for lam, J in zip(f.periods, jumps)]
    return [tabulate(lambda x, j=j: (f(x)[0] + j) // m, f.k, periods, f.margins) for j in range(m)]


def is_linear(f: ZilepFunction) -> bool:
    if any(c.denominator != 1 for row in f.coeffs for c in row):
        return False
    for x in f.box_points():
        v = f.box_value(x)
        for j in range(f.l):
            if v[j] != sum(int(c) * a for c, a in zip(f.coeffs[j], x)):
                return False
    return True


def verification_shape(f: ZilepFunction) -> tuple:
    """Grid sides covering [0, 2 (r_i + lambda_i)] per coordinate."""
    return tuple(2 * (r + p) + 1 for r, p in zip(f.margins, f.periods))


def check_on_box(f: ZilepFunction, other: Callable, what: str):
    """Compare f with ``other`` on f's box; enough when both share f's periods."""
    for x in f.box_points():
        a, b = f(x)[0], other(x)
        if a != b:
            raise SynthesisError(f"{what} fails at {x}: {a} != {b}", f)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def emit(b: SynthBuilder, f: ZilepFunction, ins: Sequence[Sig | None], mode: str) -> Sig | None:
    """Emit gates computing unary-output ``f`` from the wires ``ins``."""
    if f.l != 1:
        raise ValueError("emit expects unary output")
    keep = support(f)
    if not keep:
        return None
    live = restrict(f, keep)
    sub = [ins[i] for i in keep]
    if all(s is None for s in sub):
        return None
    try:
        if mode == "recurrent":
            from .recurrent import emit_recurrent
            return emit_recurrent(b, live, sub)
        if mode == "bounded":
            from .bounded import emit_bounded
            return emit_bounded(b, live, sub)
        if mode == "general":
            from .general import emit_general
            return emit_general(b, live, sub)
    except SynthesisError as e:
        e.chain.append((mode, live.to_json()))
        raise
    raise ValueError(f"unknown mode {mode!r}")


def split_inputs(b: Builder, ins: Sequence[Sig | None], uses: Sequence[int]) -> list:
    """Split wire i into uses[i] copies; returns a list of per-wire copy lists."""
    return [b.split(s, u) for s, u in zip(ins, uses)]


def split_outputs(f: ZilepFunction) -> list:
    """The unary components of a multi-output function."""
    return [f.component(j) for j in range(f.l)]


def synthesize(f: ZilepFunction, mode: str, options: Options | None = None,
               with_passes: bool = False):
    """Build a network for ``f`` (any output count) with the given compiler."""
    b = SynthBuilder(options)
    ins = [b.input() for _ in range(f.k)]
    comps = split_outputs(f)
    if len(comps) > 1:
        b.passes["split_outputs"] += 1
    copies = [b.split(s, len(comps)) for s in ins]
    for j, g in enumerate(comps):
        b.output(emit(b, g, [c[j] for c in copies], mode))
    net = b.build()
    return (net, b.passes) if with_passes else net


def dependents(fs: Sequence[ZilepFunction]) -> list:
    """For a family of functions, which coordinates each one depends on."""
    return [set(support(g)) for g in fs]


def fan_out(b: Builder, ins: Sequence[Sig | None], fs: Sequence[ZilepFunction]) -> list:
    """Per function, input wires with copies only where that function needs them."""
    deps = dependents(fs)
    k = len(ins)
    pools = [b.split(ins[i], sum(1 for d in deps if i in d)) for i in range(k)]
    out = []
    for d in deps:
        out.append([pools[i].pop() if i in d else None for i in range(k)])
    return out

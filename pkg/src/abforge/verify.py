"""Oracle comparison of a network against a function, with schedule fuzzing.

A verification walks the whole grid with the lowest-edge-id schedule and
compares every output with the function.  It then replays grid points
under seeded random schedules and demands the same outputs, trash counts
and final states.  Finally it scans the grid for monotonicity.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import asdict, dataclass, field

from .core import ZilepFunction
from .network import (LOWEST, BudgetExceeded, Network, Simulator, default_budget, seeded)

DEFAULT_FUZZ = 100


@dataclass(frozen=True)
class VerifyConfig:
    bounds: tuple | None = None  # largest coordinate checked, per input; None picks 2 (r + lambda)
    fuzz: int = DEFAULT_FUZZ
    seed: int = 0
    budget_factor: int = 1
    fmt: str = "text"

    def __post_init__(self):
        if self.fuzz < 1:
            raise ValueError("fuzz count must be at least 1")
        if self.budget_factor < 1:
            raise ValueError("budget multiplier must be at least 1")
        if self.fmt not in ("text", "json"):
            raise ValueError(f"unknown report format {self.fmt!r}")

    def grid_bounds(self, f: ZilepFunction) -> tuple:
        if self.bounds is None:
            return tuple(2 * (r + p) for r, p in zip(f.margins, f.periods))
        b = tuple(self.bounds)
        if len(b) != f.k:
            raise ValueError(f"need {f.k} grid bounds, got {len(b)}")
        for i, (hi, r, p) in enumerate(zip(b, f.margins, f.periods)):
            if hi < r + p:
                raise ValueError(
                    f"bound {hi} on coordinate {i} misses a full period past the margin ({r + p})")
        return b


@dataclass
class VerifyReport:
    passed: bool
    grid_points: int
    schedules: int
    seed: int
    bounds: tuple
    mismatch: dict | None = None  # first grid point where network and function differ
    order_dependence: dict | None = None
    monotonicity: dict | None = None
    budget_exceeded: dict | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bounds"] = list(self.bounds)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def text(self) -> str:
        head = "PASS" if self.passed else "FAIL"
        lines = [f"{head}: {self.grid_points} grid points, {self.schedules} schedules, seed {self.seed}"]
        if self.mismatch:
            m = self.mismatch
            lines.append(f"  mismatch at x={_fmt(m['x'])}: network {m['network']}, function {m['function']}")
        if self.order_dependence:
            o = self.order_dependence
            lines.append(f"  schedule seed {o['seed']} at x={_fmt(o['x'])} differs in {o['field']}")
        if self.monotonicity:
            m = self.monotonicity
            lines.append(f"  output decreases from x={_fmt(m['x'])} to x={_fmt(m['y'])}")
        if self.budget_exceeded:
            b = self.budget_exceeded
            lines.append(f"  step budget {b['budget']} exhausted at x={_fmt(b['x'])}")
        lines.extend("  " + n for n in self.notes)
        return "\n".join(lines)


def _fmt(x) -> str:
    return ",".join(str(v) for v in x)


def _grid_outputs(net: Network, bounds, factor: int):
    """Outputs over the grid, walking the last coordinate incrementally."""
    sim = Simulator(net)
    out = {}
    k = len(bounds)
    unit = (0,) * (k - 1) + (1,)
    for prefix in itertools.product(*(range(b + 1) for b in bounds[:-1])):
        sim.reset()
        x = tuple(prefix) + (0,)
        for z in range(bounds[-1] + 1):
            sim.feed(x if z == 0 else unit)
            try:
                sim.settle(LOWEST, factor * default_budget(net, sum(sim.fed)))
            except BudgetExceeded as e:
                raise _GridBudget(tuple(prefix) + (z,), e.budget)
            out[tuple(prefix) + (z,)] = sim.output()
    return out


class _GridBudget(Exception):
    def __init__(self, x, budget):
        self.x, self.budget = x, budget


def verify(f: ZilepFunction, net: Network, config: VerifyConfig | None = None) -> VerifyReport:
    """Compare ``net`` with ``f`` on the grid, fuzz schedules and scan for monotonicity."""
    config = config or VerifyConfig()
    if len(net.inputs) != f.k or len(net.outputs) != f.l:
        raise ValueError(f"network has {len(net.inputs)} inputs and {len(net.outputs)} outputs; "
                         f"function maps N^{f.k} to N^{f.l}")
    bounds = config.grid_bounds(f)
    points = sorted(itertools.product(*(range(b + 1) for b in bounds)))
    rep = VerifyReport(True, len(points), config.fuzz, config.seed, bounds)
    try:
        grid = _grid_outputs(net, bounds, config.budget_factor)
    except _GridBudget as e:
        rep.passed = False
        rep.budget_exceeded = {"x": list(e.x), "budget": e.budget}
        return rep

    for x in points:
        want = tuple(f(x))
        if grid[x] != want:
            rep.passed = False
            rep.mismatch = {"x": list(x), "network": list(grid[x]), "function": list(want)}
            break

    rep.order_dependence, budget_hit = _fuzz(net, points, config)
    if budget_hit:
        rep.budget_exceeded = budget_hit
    if rep.order_dependence or budget_hit:
        rep.passed = False

    rep.monotonicity = _monotonicity(grid, bounds)
    if rep.monotonicity:
        rep.passed = False
    return rep


def _fuzz(net: Network, points, config: VerifyConfig):
    """Replay grid points under seeded random schedules; first disagreement or budget hit."""
    rng = random.Random(config.seed)
    reference = {}
    for s in range(config.fuzz):
        # the far corner exercises the most letters; other schedules pick points at random
        x = points[-1] if s == 0 else points[rng.randrange(len(points))]
        seed = rng.getrandbits(63)
        if x not in reference:
            reference[x] = _run(net, x, LOWEST, config)
        got = _run(net, x, seeded(seed), config)
        for r in (reference[x], got):
            if isinstance(r, int):
                return None, {"x": list(x), "budget": r, "seed": seed}
        for field_name in ("output", "trash", "states"):
            if getattr(reference[x], field_name) != getattr(got, field_name):
                return {"x": list(x), "seed": seed, "field": field_name}, None
    return None, None


def _run(net: Network, x, schedule, config: VerifyConfig):
    sim = Simulator(net)
    sim.feed(x)
    budget = config.budget_factor * default_budget(net, sum(x))
    try:
        sim.settle(schedule, budget)
    except BudgetExceeded:
        return budget
    return sim.result()


def _monotonicity(grid: dict, bounds) -> dict | None:
    """First unit step along a coordinate where some output decreases."""
    for x in sorted(grid):
        for i in range(len(bounds)):
            if x[i] < bounds[i]:
                y = x[:i] + (x[i] + 1,) + x[i + 1:]
                if any(a > b for a, b in zip(grid[x], grid[y])):
                    return {"x": list(x), "y": list(y)}
    return None

"""Named example functions and random generators for tests and benchmarks."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .core import AbelianProcessor, ZilepFunction, check_abelian, zilep_to_processor

# values of the three-quarter-slope example on one period
FIG5_VALUES = (0, 1, 3, 3)

# a two-input periodic function with periods (4, 5) and slopes (1/2, 4/5);
# rows are x1 = 0..3, columns x2 = 0..4
FIG6_TABLE = (
    (0, 0, 1, 2, 3),
    (0, 1, 1, 2, 3),
    (0, 1, 3, 3, 4),
    (1, 1, 3, 4, 5),
)


def fig5() -> ZilepFunction:
    return ZilepFunction.from_callable(
        lambda x: FIG5_VALUES[x[0] % 4] + 3 * (x[0] // 4), 1, (4,), (0,))


def fig6_value(x1: int, x2: int) -> int:
    q1, r1 = divmod(x1, 4)
    q2, r2 = divmod(x2, 5)
    return FIG6_TABLE[r1][r2] + 2 * q1 + 4 * q2


def fig6() -> ZilepFunction:
    return ZilepFunction.from_callable(lambda x: fig6_value(*x), 2, (4, 5), (0, 0))


def fig6_with_margins() -> ZilepFunction:
    """The periodic example shifted by one in each coordinate, plus transient steps."""

    def f(x):
        a, b = x
        return fig6_value(max(a - 1, 0), max(b - 1, 0)) + min(a, 1) + min(b, 1)

    return ZilepFunction.from_callable(f, 2, (4, 5), (1, 1))


def floor_function(lam: int, prime: int = 0) -> ZilepFunction:
    return ZilepFunction.from_callable(lambda x: (x[0] + prime) // lam, 1, (lam,), (0,))


def delayer_function() -> ZilepFunction:
    return ZilepFunction.from_callable(lambda x: max(x[0] - 1, 0), 1, (1,), (1,))


def presink_function() -> ZilepFunction:
    return ZilepFunction.from_callable(lambda x: min(x[0], 1), 1, (1,), (1,))


# ---------------------------------------------------------------------------
# random generators
# ---------------------------------------------------------------------------


def random_zilep(rng: random.Random, k: int, periods, margins, jumps, spread: int = 2) -> ZilepFunction:
    """Random increasing function with f(x + lam_i e_i) = f(x) + jumps[i] for x_i >= r_i.

    Values are chosen point by point in row-major order, each between the
    largest predecessor and the ceiling imposed by the periodic extension.
    """
    shape = [r + p for r, p in zip(margins, periods)]
    vals = {}
    for x in itertools.product(*(range(s) for s in shape)):
        if not any(x):
            vals[x] = 0
            continue
        lo = max(vals[x[:i] + (x[i] - 1,) + x[i + 1:]] for i in range(k) if x[i] > 0)
        hi = None
        for i in range(k):
            if x[i] > margins[i]:
                cap = vals[x[:i] + (margins[i],) + x[i + 1:]] + jumps[i]
                hi = cap if hi is None else min(hi, cap)
        top = lo + spread if hi is None else min(hi, lo + spread)
        # lean towards small steps so tables stay varied but not wild
        vals[x] = lo + min(rng.randint(0, top - lo), rng.randint(0, top - lo))

    def f(x):
        red = []
        shift = 0
        for i in range(k):
            xi = x[i]
            if xi >= shape[i]:
                m = (xi - shape[i]) // periods[i] + 1
                xi -= m * periods[i]
                shift += m * jumps[i]
            red.append(xi)
        return vals[tuple(red)] + shift

    return ZilepFunction.from_callable(f, k, periods, margins)


def random_zilp(rng: random.Random, max_k: int = 3, max_period: int = 5, max_den: int = 5) -> ZilepFunction:
    k = rng.randint(1, max_k)
    periods, jumps = [], []
    for _ in range(k):
        lam = rng.randint(1, max_period)
        # slope J/lam with reduced denominator at most max_den
        while True:
            J = rng.randint(0, 2 * lam)
            if Fraction(J, lam).denominator <= max_den:
                break
        periods.append(lam)
        jumps.append(J)
    return random_zilep(rng, k, periods, [0] * k, jumps)


def random_bounded(rng: random.Random, max_k: int = 3, max_value: int = 4, max_margin: int = 4) -> ZilepFunction:
    k = rng.randint(1, max_k)
    margins = [rng.randint(0, max_margin) for _ in range(k)]
    while True:
        f = random_zilep(rng, k, [1] * k, margins, [0] * k, spread=1)
        if max(f.table) <= max_value:
            return f


def random_general(rng: random.Random, max_k: int = 2, max_period: int = 4, max_margin: int = 4) -> ZilepFunction:
    k = rng.randint(1, max_k)
    periods = [rng.randint(1, max_period) for _ in range(k)]
    margins = [rng.randint(0, max_margin) for _ in range(k)]
    jumps = [rng.randint(0, p) for p in periods]
    return random_zilep(rng, k, periods, margins, jumps)


def random_abelian_processor(rng: random.Random, max_states: int = 8, max_k: int = 2,
                             max_l: int = 2) -> AbelianProcessor:
    """A random abelian processor: a random function's canonical processor,
    restricted to the states reachable from a random start."""
    while True:
        k = rng.randint(1, max_k)
        l = rng.randint(1, max_l)
        periods = [rng.randint(1, 3) for _ in range(k)]
        margins = [rng.randint(0, 2) for _ in range(k)]
        if eval_size(periods, margins) > max_states:
            continue
        comps = [random_zilep(rng, k, periods, margins, [rng.randint(0, p) for p in periods])
                 for _ in range(l)]
        f = ZilepFunction.from_callable(lambda x: [c(x)[0] for c in comps], k, periods, margins, l)
        p = zilep_to_processor(f)
        p = p.with_initial(rng.randrange(p.n_states))
        assert check_abelian(p) is None
        return p


def eval_size(periods, margins) -> int:
    n = 1
    for p, r in zip(periods, margins):
        n *= p + r
    return n

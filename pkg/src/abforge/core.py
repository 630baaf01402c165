"""Finite abelian processors and the ZILP/ZILEP function classes.

A processor is stored with integer state indices; letters are referred to
by position in the input/output alphabets.  Functions are stored as a linear
part (exact rationals) plus a dense table over the box
``[0, r_i + lambda_i]`` in each coordinate, from which every value is
recovered by periodic reduction.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import networkx as nx

MAX_BOX = 10**7


class ProcessorError(ValueError):
    """Malformed processor description."""


class ZilepError(ValueError):
    """A table/parameter set that does not describe a ZILEP function."""


class BoxTooLarge(ZilepError):
    pass


# ---------------------------------------------------------------------------
# processors
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AbelianProcessor:
    input_alphabet: tuple
    output_alphabet: tuple
    states: tuple
    initial: int
    transitions: tuple  # [letter][state] -> state
    outputs: tuple  # [letter][state] -> output vector

    def __post_init__(self):
        k, l, n = len(self.input_alphabet), len(self.output_alphabet), len(self.states)
        if k < 1 or l < 1:
            raise ProcessorError("alphabets must be non-empty")
        if n < 1:
            raise ProcessorError("state set must be non-empty")
        if not 0 <= self.initial < n:
            raise ProcessorError(f"initial state {self.initial} out of range")
        if len(self.transitions) != k or len(self.outputs) != k:
            raise ProcessorError("need one transition and one output map per input letter")
        for i in range(k):
            t, o = self.transitions[i], self.outputs[i]
            if len(t) != n or len(o) != n:
                raise ProcessorError(f"letter {i}: maps must cover all {n} states")
            for q in range(n):
                if not 0 <= t[q] < n:
                    raise ProcessorError(f"letter {i}, state {q}: target {t[q]} out of range")
                if len(o[q]) != l or any(c < 0 for c in o[q]):
                    raise ProcessorError(f"letter {i}, state {q}: bad output vector {o[q]}")
        seen = {self.initial}
        todo = [self.initial]
        while todo:
            q = todo.pop()
            for t in self.transitions:
                if t[q] not in seen:
                    seen.add(t[q])
                    todo.append(t[q])
        if len(seen) != n:
            missing = sorted(set(range(n)) - seen)
            raise ProcessorError(f"states {missing} are not accessible from the initial state")

    @classmethod
    def build(cls, transitions, outputs, initial=0, states=None, inputs=None, outputs_alphabet=None):
        """Convenience constructor from nested lists."""
        transitions = tuple(tuple(int(s) for s in t) for t in transitions)
        outputs = tuple(tuple(tuple(int(c) for c in v) for v in o) for o in outputs)
        n = len(transitions[0])
        l = len(outputs[0][0])
        if states is None:
            states = tuple(range(n))
        if inputs is None:
            inputs = tuple(f"a{i}" for i in range(len(transitions)))
        if outputs_alphabet is None:
            outputs_alphabet = tuple(f"b{j}" for j in range(l))
        return cls(tuple(inputs), tuple(outputs_alphabet), tuple(states), initial, transitions, outputs)

    @property
    def k(self) -> int:
        return len(self.input_alphabet)

    @property
    def l(self) -> int:
        return len(self.output_alphabet)

    @property
    def n_states(self) -> int:
        return len(self.states)

    def with_initial(self, q: int) -> AbelianProcessor:
        """Same maps started from ``q``, restricted to the states ``q`` can reach."""
        reach = [q]
        seen = {q}
        for s in reach:
            for t in self.transitions:
                if t[s] not in seen:
                    seen.add(t[s])
                    reach.append(t[s])
        keep = sorted(seen)
        index = {s: j for j, s in enumerate(keep)}
        return AbelianProcessor(
            self.input_alphabet,
            self.output_alphabet,
            tuple(self.states[s] for s in keep),
            index[q],
            tuple(tuple(index[t[s]] for s in keep) for t in self.transitions),
            tuple(tuple(o[s] for s in keep) for o in self.outputs),
        )

    # serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "letters_in": list(self.input_alphabet),
            "letters_out": list(self.output_alphabet),
            "states": [s if isinstance(s, (int, str)) else str(s) for s in self.states],
            "initial": self.initial,
            "transitions": [list(t) for t in self.transitions],
            "outputs": [[list(v) for v in o] for o in self.outputs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> AbelianProcessor:
        try:
            return cls(
                tuple(d["letters_in"]),
                tuple(d["letters_out"]),
                tuple(d["states"]),
                int(d["initial"]),
                tuple(tuple(int(s) for s in t) for t in d["transitions"]),
                tuple(tuple(tuple(int(c) for c in v) for v in o) for o in d["outputs"]),
            )
        except KeyError as e:
            raise ProcessorError(f"processor document missing field {e.args[0]!r}") from None
        except (TypeError, ValueError) as e:
            if isinstance(e, ProcessorError):
                raise
            raise ProcessorError(f"malformed processor document: {e}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> AbelianProcessor:
        return cls.from_dict(json.loads(text))


class Counterexample(NamedTuple):
    i: int
    j: int
    state: int
    identity: str  # "transition" or "output"


def check_abelian(p: AbelianProcessor) -> Counterexample | None:
    """Return the first (i, j, q) violating the commutation identities, or None."""
    t, o = p.transitions, p.outputs
    for i in range(p.k):
        for j in range(i + 1, p.k):
            for q in range(p.n_states):
                if t[i][t[j][q]] != t[j][t[i][q]]:
                    return Counterexample(i, j, q, "transition")
                lhs = [a + b for a, b in zip(o[i][q], o[j][t[i][q]])]
                rhs = [a + b for a, b in zip(o[j][q], o[i][t[j][q]])]
                if lhs != rhs:
                    return Counterexample(i, j, q, "output")
    return None


def is_abelian(p: AbelianProcessor) -> bool:
    return check_abelian(p) is None


def feed(p: AbelianProcessor, letter: int, count: int, state: int, out: list) -> int:
    """Feed ``count`` copies of ``letter`` from ``state``; accumulate into ``out``.

    Long runs are shortcut once the orbit of ``state`` under the letter
    closes into a cycle.
    """
    t, o = p.transitions[letter], p.outputs[letter]
    seen = {}
    step = 0
    while count > 0:
        if seen is not None:
            if state in seen:
                step0, out0 = seen[state]
                period = step - step0
                cycles = count // period
                if cycles:
                    for b in range(len(out)):
                        out[b] += cycles * (out[b] - out0[b])
                    count -= cycles * period
                seen = None
                continue
            seen[state] = (step, tuple(out))
        for b, c in enumerate(o[state]):
            out[b] += c
        state = t[state]
        count -= 1
        step += 1
    return state


def eval_processor(p: AbelianProcessor, x: Sequence[int], order: Sequence[int] | None = None,
                   start: int | None = None) -> tuple[tuple[int, ...], int]:
    """Output vector and final state after feeding ``x_i`` copies of each letter.

    ``order`` optionally gives an explicit input word (a sequence of letter
    indices); it must contain each letter ``x_i`` times.
    """
    if len(x) != p.k:
        raise ValueError(f"expected {p.k} input counts, got {len(x)}")
    if any(c < 0 for c in x):
        raise ValueError("input counts must be nonnegative")
    q = p.initial if start is None else start
    out = [0] * p.l
    if order is None:
        for i, c in enumerate(x):
            if c:
                q = feed(p, i, c, q, out)
    else:
        counts = [0] * p.k
        for i in order:
            counts[i] += 1
            for b, c in enumerate(p.outputs[i][q]):
                out[b] += c
            q = p.transitions[i][q]
        if counts != list(x):
            raise ValueError("word does not match the input vector")
    return tuple(out), q


class Recurrence(NamedTuple):
    recurrent: bool
    recurrent_states: frozenset


def classify_recurrence(p: AbelianProcessor) -> Recurrence:
    g = nx.DiGraph()
    g.add_nodes_from(range(p.n_states))
    for t in p.transitions:
        g.add_edges_from((q, t[q]) for q in range(p.n_states))
    cond = nx.condensation(g)
    terminal = [c for c in cond.nodes if cond.out_degree(c) == 0]
    if len(terminal) != 1:
        raise ProcessorError(
            f"{len(terminal)} terminal components reachable; not an abelian monoid action"
        )
    members = frozenset(cond.nodes[terminal[0]]["members"])
    return Recurrence(len(members) == p.n_states, members)


def exponent(p: AbelianProcessor) -> int:
    """Least m with t_i^m acting as the identity on recurrent states, for all i."""
    rec = classify_recurrence(p).recurrent_states
    m = 1
    for t in p.transitions:
        done = set()
        for q in rec:
            if q in done:
                continue
            length, s = 0, q
            while True:
                done.add(s)
                s = t[s]
                length += 1
                if s == q:
                    break
                if length > len(rec):
                    raise ProcessorError("letter does not permute the recurrent class")
            m = math.lcm(m, length)
    return m


# ---------------------------------------------------------------------------
# ZILEP functions
# ---------------------------------------------------------------------------


def _frac(s) -> Fraction:
    return s if isinstance(s, Fraction) else Fraction(s)


@dataclass(frozen=True, eq=False)
class ZilepFunction:
    """Increasing f: N^k -> N^l written as linear part plus eventually periodic part."""

    k: int
    l: int
    coeffs: tuple  # l rows of k Fractions
    periods: tuple
    margins: tuple
    table: tuple  # row-major over the box, output index fastest

    def __post_init__(self):
        k, l = self.k, self.l
        if k < 1 or l < 1:
            raise ZilepError("need k >= 1 and l >= 1")
        if len(self.periods) != k or len(self.margins) != k:
            raise ZilepError("periods and margins need one entry per coordinate")
        if any(p < 1 for p in self.periods) or any(r < 0 for r in self.margins):
            raise ZilepError("periods must be positive and margins nonnegative")
        if len(self.coeffs) != l or any(len(row) != k for row in self.coeffs):
            raise ZilepError("coefficient matrix must be l x k")
        shape = self.shape
        size = math.prod(shape)
        if size > MAX_BOX:
            raise BoxTooLarge(f"box of {size} points exceeds the limit of {MAX_BOX}")
        if len(self.table) != size * l:
            raise ZilepError(f"table has {len(self.table)} entries, expected {size * l}")
        object.__setattr__(self, "_strides", _strides(shape))
        object.__setattr__(self, "_jumps", tuple(
            tuple(int(c * p) for c, p in zip(row, self.periods)) for row in self.coeffs))
        self._validate()

    # geometry ------------------------------------------------------------

    @property
    def shape(self) -> tuple:
        return tuple(r + p + 1 for r, p in zip(self.margins, self.periods))

    @property
    def is_zilp(self) -> bool:
        return not any(self.margins)

    def box_points(self):
        return itertools.product(*(range(s) for s in self.shape))

    def _index(self, x) -> int:
        return sum(a * s for a, s in zip(x, self._strides)) * self.l

    def box_value(self, x) -> tuple:
        i = self._index(x)
        return self.table[i:i + self.l]

    def jumps(self) -> tuple:
        """lambda_i * b_{j,i} as integers, indexed [j][i]."""
        return self._jumps

    # evaluation ----------------------------------------------------------

    def _reduce(self, x):
        """Box point and per-coordinate period counts removed."""
        red, shifts = [], []
        for xi, r, p in zip(x, self.margins, self.periods):
            top = r + p
            if xi > top:
                m = -(-(xi - top) // p)
                red.append(xi - m * p)
                shifts.append(m)
            elif xi < 0 and r == 0:
                m = -(-xi // p)
                red.append(xi + m * p)
                shifts.append(-m)
            elif xi < 0:
                raise ValueError("negative coordinates need a zero margin")
            else:
                red.append(xi)
                shifts.append(0)
        return red, shifts

    def __call__(self, x) -> tuple:
        if len(x) != self.k:
            raise ValueError(f"expected {self.k} coordinates, got {len(x)}")
        red, shifts = self._reduce(x)
        base = self.box_value(red)
        if not any(shifts):
            return tuple(base)
        jumps = self.jumps()
        return tuple(
            base[j] + sum(m * a for m, a in zip(shifts, jumps[j])) for j in range(self.l)
        )

    def value(self, x, j: int = 0) -> int:
        return self(x)[j]

    # validation ----------------------------------------------------------

    def _validate(self):
        k, l, shape, T = self.k, self.l, self.shape, self.table
        if any(T[j] != 0 for j in range(l)):
            raise ZilepError("f(0) must be 0")
        if any(v < 0 for v in T):
            raise ZilepError("values must be natural numbers")
        for j in range(l):
            for i in range(k):
                if (self.coeffs[j][i] * self.periods[i]).denominator != 1:
                    raise ZilepError(
                        f"lambda_{i} * b_({j},{i}) = {self.coeffs[j][i] * self.periods[i]} is not an integer"
                    )
                if self.coeffs[j][i] < 0:
                    raise ZilepError("linear coefficients must be nonnegative")
        jumps = self.jumps()
        st = self._strides
        for x in self.box_points():
            base = self._index(x)
            for i in range(k):
                if x[i] + 1 < shape[i]:
                    nxt = base + st[i] * l
                    for j in range(l):
                        if T[nxt + j] < T[base + j]:
                            raise ZilepError(f"not increasing at {x} along coordinate {i}")
                if x[i] == self.margins[i]:
                    far = base + st[i] * self.periods[i] * l
                    for j in range(l):
                        if T[far + j] != T[base + j] + jumps[j][i]:
                            raise ZilepError(
                                f"extension inconsistent at {x} along coordinate {i}: "
                                f"{T[far + j]} != {T[base + j]} + {jumps[j][i]}"
                            )

    # construction helpers ------------------------------------------------

    @classmethod
    def from_callable(cls, func: Callable, k: int, periods, margins, l: int = 1) -> ZilepFunction:
        """Tabulate ``func`` on the box; the linear part is read off the table.

        ``func`` maps a k-tuple to an int (when ``l == 1``) or to a sequence.
        """
        periods, margins = tuple(periods), tuple(margins)
        shape = tuple(r + p + 1 for r, p in zip(margins, periods))
        size = math.prod(shape)
        if size > MAX_BOX:
            raise BoxTooLarge(f"box of {size} points exceeds the limit of {MAX_BOX}")
        table = []
        for x in itertools.product(*(range(s) for s in shape)):
            v = func(x)
            if l == 1 and not isinstance(v, (tuple, list)):
                table.append(int(v))
            else:
                table.extend(int(c) for c in v)
        strides = _strides(shape)
        coeffs = []
        for j in range(l):
            row = []
            for i in range(k):
                lo = margins[i] * strides[i] * l + j
                hi = (margins[i] + periods[i]) * strides[i] * l + j
                row.append(Fraction(table[hi] - table[lo], periods[i]))
            coeffs.append(tuple(row))
        return cls(k, l, tuple(coeffs), periods, margins, tuple(table))

    def with_box(self, periods, margins) -> ZilepFunction:
        """Re-tabulate on a larger box (periods multiples of the current ones)."""
        for p, q, r, s in zip(periods, self.periods, margins, self.margins):
            if p % q or r < s:
                raise ZilepError("new periods must be multiples and margins must not shrink")
        return ZilepFunction.from_callable(self, self.k, periods, margins, self.l)

    def component(self, j: int) -> ZilepFunction:
        return ZilepFunction(
            self.k, 1, (self.coeffs[j],), self.periods, self.margins, self.table[j::self.l]
        )

    # serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "l": self.l,
            "coeffs": [f"{c.numerator}/{c.denominator}" for row in self.coeffs for c in row],
            "periods": list(self.periods),
            "margins": list(self.margins),
            "table": list(self.table),
        }

    @classmethod
    def from_dict(cls, d: dict) -> ZilepFunction:
        try:
            k, l = int(d["k"]), int(d["l"])
            flat = [Fraction(str(c)) for c in d["coeffs"]]
            if len(flat) != k * l:
                raise ZilepError(f"expected {k * l} coefficients, got {len(flat)}")
            coeffs = tuple(tuple(flat[j * k:(j + 1) * k]) for j in range(l))
            return cls(k, l, coeffs, tuple(int(p) for p in d["periods"]),
                       tuple(int(r) for r in d["margins"]), tuple(int(v) for v in d["table"]))
        except KeyError as e:
            raise ZilepError(f"function document missing field {e.args[0]!r}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> ZilepFunction:
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return (f"ZilepFunction(k={self.k}, l={self.l}, periods={self.periods}, "
                f"margins={self.margins}, coeffs={[[str(c) for c in r] for r in self.coeffs]})")


def _strides(shape) -> tuple:
    st = [1] * len(shape)
    for i in range(len(shape) - 2, -1, -1):
        st[i] = st[i + 1] * shape[i + 1]
    return tuple(st)


def eval_zilep(f: ZilepFunction, x) -> tuple:
    return f(x)


def equivalent(f: ZilepFunction, g: ZilepFunction) -> bool:
    """Exact equality of the functions (not of their representations)."""
    if (f.k, f.l) != (g.k, g.l) or f.coeffs != g.coeffs:
        return False
    periods = tuple(math.lcm(a, b) for a, b in zip(f.periods, g.periods))
    margins = tuple(max(a, b) for a, b in zip(f.margins, g.margins))
    return f.with_box(periods, margins).table == g.with_box(periods, margins).table


def _coordinate_ok(f: ZilepFunction, i: int, period: int, margin: int) -> bool:
    """Does f(x + period e_i) - f(x) equal period * b_i whenever x_i >= margin?"""
    if (period * f.coeffs[0][i]).denominator != 1 and f.l == 1:
        return False
    jumps = [c[i] * period for c in f.coeffs]
    if any(j.denominator != 1 for j in jumps):
        return False
    ranges = [range(r + p) for r, p in zip(f.margins, f.periods)]
    ranges[i] = range(margin, max(margin, f.margins[i]) + f.periods[i])
    for x in itertools.product(*ranges):
        y = list(x)
        y[i] += period
        a, b = f(x), f(y)
        if any(bb - aa != jj for aa, bb, jj in zip(a, b, jumps)):
            return False
    return True


def minimize(f: ZilepFunction) -> ZilepFunction:
    """Shrink margins (first) and periods (second) coordinate by coordinate."""
    periods, margins = list(f.periods), list(f.margins)
    for i in range(f.k):
        r = margins[i]
        while r > 0 and _coordinate_ok(f, i, f.periods[i], r - 1):
            r -= 1
        lam = f.periods[i]
        for d in sorted(_divisors(lam)):
            if d < lam and _coordinate_ok(f, i, d, r):
                lam = d
                break
        periods[i], margins[i] = lam, r
    if periods == list(f.periods) and margins == list(f.margins):
        return f
    return ZilepFunction.from_callable(f, f.k, periods, margins, f.l)


def _divisors(n: int) -> list:
    return [d for d in range(1, n + 1) if n % d == 0]


# ---------------------------------------------------------------------------
# translations between processors and functions
# ---------------------------------------------------------------------------


def _rho(t, n: int) -> tuple[int, int]:
    """Least (tail, cycle) with t^(tail + cycle) = t^tail as maps on range(n)."""
    tail, cyc = 0, 1
    for q in range(n):
        seen = {}
        s, step = q, 0
        while s not in seen:
            seen[s] = step
            s = t[s]
            step += 1
        start = seen[s]
        tail = max(tail, start)
        cyc = math.lcm(cyc, step - start)
    return tail, cyc


def processor_to_zilep(p: AbelianProcessor) -> ZilepFunction:
    periods, margins = [], []
    for t in p.transitions:
        r, lam = _rho(t, p.n_states)
        periods.append(lam)
        margins.append(r)
    return ZilepFunction.from_callable(
        lambda x: eval_processor(p, x)[0], p.k, periods, margins, p.l
    )


def zilep_to_processor(f: ZilepFunction) -> AbelianProcessor:
    """Canonical processor on box representatives; t_i(x) = x + e_i reduced."""
    shape = tuple(r + p for r, p in zip(f.margins, f.periods))
    if math.prod(shape) > MAX_BOX:
        raise BoxTooLarge("state space too large")
    points = list(itertools.product(*(range(s) for s in shape)))
    index = {x: n for n, x in enumerate(points)}
    trans, outs = [], []
    for i in range(f.k):
        t, o = [], []
        for x in points:
            y = list(x)
            y[i] += 1
            fx, fy = f.box_value(x), f.box_value(y)
            o.append(tuple(b - a for a, b in zip(fx, fy)))
            if y[i] == shape[i]:
                y[i] -= f.periods[i]
            t.append(index[tuple(y)])
        trans.append(tuple(t))
        outs.append(tuple(o))
    return AbelianProcessor(
        tuple(f"x{i + 1}" for i in range(f.k)),
        tuple(f"y{j + 1}" for j in range(f.l)),
        tuple(",".join(map(str, x)) for x in points),
        0,
        tuple(trans),
        tuple(outs),
    )


# ---------------------------------------------------------------------------
# predicates and layer profiles
# ---------------------------------------------------------------------------


class Meagerness(NamedTuple):
    meager: bool
    quantum: int


def is_meager(f: ZilepFunction, coord: int) -> Meagerness:
    if not f.is_zilp:
        raise ZilepError("meagerness is defined for ZILP functions only")
    if f.l != 1:
        raise ZilepError("meagerness is defined for unary output only")
    m = int(f.coeffs[0][coord] * f.periods[coord])
    return Meagerness(m == 1, m)


class Boundedness(NamedTuple):
    bounded: bool
    bound: int | None


def is_bounded(f: ZilepFunction) -> Boundedness:
    if any(c for row in f.coeffs for c in row):
        return Boundedness(False, None)
    return Boundedness(True, max(f.table))


@dataclass(frozen=True)
class LayerProfile:
    coord: int
    period: int
    slope: Fraction
    margin: int
    roughness: int


def layer_profile(f: ZilepFunction, coord: int | None = None) -> LayerProfile:
    """Period, slope, margin and roughness of a unary-output f along ``coord``."""
    if f.l != 1:
        raise ZilepError("layer profiles need unary output")
    c = f.k - 1 if coord is None else coord
    ranges = [range(r + p) for r, p in zip(f.margins, f.periods)]
    w = 0
    for x in itertools.product(*ranges):
        y = list(x)
        y[c] += 1
        w = max(w, f.box_value(y)[0] - f.box_value(x)[0])
    return LayerProfile(c, f.periods[c], f.coeffs[0][c], f.margins[c], w)

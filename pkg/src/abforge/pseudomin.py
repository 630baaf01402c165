"""A periodic stand-in for the minimum of n integers.

``M`` is defined from its values on the diagonal slab
``K = [0, n-1]^n minus [1, n-1]^n``: a point ``k + n^2 u + s 1`` with ``k``
in ``K`` gets value ``n * sum(u) + s`` (:func:`mhat`), and ``M(x)`` is the
largest such value at a point below ``x``.  Because ``0`` lies in ``K``, a
shifted slab point sits below ``x`` exactly when its offset does, so

    M(x) = max_s  s + n * sum_j floor((x_j - s) / n^2),

and the bracket is periodic in ``s`` with period ``n^2``.  For n = 1 and
n = 2 the identity and ``floor((x1 + x2) / 2)`` satisfy the same two
properties, so :func:`eval_M` uses them there by default and the formula
above otherwise; :func:`eval_M_window` keeps the literal supremum over a
finite window as an independent check.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import ZilepError, ZilepFunction


class MhatConflict(AssertionError):
    """Two slab representations of one point disagree (should never happen)."""


def _check_n(n: int):
    if n < 1:
        raise ValueError("n must be positive")


def mhat(n: int, x: Sequence[int]) -> int | None:
    """Value at a slab point, or None when ``x`` has no representation."""
    _check_n(n)
    x = tuple(x)
    if len(x) != n:
        raise ValueError(f"expected {n} coordinates")
    sq = n * n
    found = None
    m = min(x)
    for s in range(m - sq + 1, m + 1):
        rem = [xj - s for xj in x]
        if all(r % sq <= n - 1 for r in rem) and any(r % sq == 0 for r in rem):
            val = n * sum(r // sq for r in rem) + s
            if found is not None and found != val:
                raise MhatConflict(f"point {x} has values {found} and {val}")
            found = val
    return found


@lru_cache(maxsize=1 << 16)
def _eval_general(n: int, x: tuple) -> int:
    sq = n * n
    m = min(x)
    return max(s + n * sum((xj - s) // sq for xj in x) for s in range(m - sq + 1, m + 1))


def eval_M(n: int, x: Sequence[int], closed_form: bool = True) -> int:
    """The pseudo-minimum at an integer point.

    With ``closed_form`` (the default) n = 1 and n = 2 use the identity and
    ``floor((x1 + x2) / 2)``.
    """
    _check_n(n)
    x = tuple(int(v) for v in x)
    if len(x) != n:
        raise ValueError(f"expected {n} coordinates")
    if closed_form and n == 1:
        return x[0]
    if closed_form and n == 2:
        return (x[0] + x[1]) // 2
    sq = n * n
    # property (i): shift every coordinate into [0, n^2) first
    shifts = [xj // sq for xj in x]
    red = tuple(xj - sq * q for xj, q in zip(x, shifts))
    return _eval_general(n, red) + n * sum(shifts)


def eval_M_array(n: int, X, closed_form: bool = True) -> np.ndarray:
    """:func:`eval_M` on every row of an integer array of shape (N, n)."""
    _check_n(n)
    X = np.asarray(X, dtype=np.int64)
    if X.ndim != 2 or X.shape[1] != n:
        raise ValueError(f"expected an array of shape (N, {n})")
    if closed_form and n == 1:
        return X[:, 0].copy()
    if closed_form and n == 2:
        return np.floor_divide(X[:, 0] + X[:, 1], 2)
    sq = n * n
    shifts = np.floor_divide(X, sq)
    red = X - sq * shifts
    m = red.min(axis=1)
    best = None
    for t in range(sq):
        s = m - t
        val = s + n * np.floor_divide(red - s[:, None], sq).sum(axis=1)
        best = val if best is None else np.maximum(best, val)
    return best + n * shifts.sum(axis=1)


def eval_M_window(n: int, x: Sequence[int], width: int | None = None) -> int:
    """Literal supremum of :func:`mhat` over defined points in ``[x - width, x]``."""
    _check_n(n)
    if width is None:
        width = 2 * n * n + n
    best = None
    for z in itertools.product(*(range(xj - width, xj + 1) for xj in x)):
        v = mhat(n, z)
        if v is not None and (best is None or v > best):
            best = v
    if best is None:
        raise ValueError("window too small to contain a slab point")
    return best


def pseudomin_zilep(n: int, u: Sequence[int]) -> ZilepFunction:
    """The shifted pseudo-minimum v -> M(v + u) as a ZILP function on N^n."""
    _check_n(n)
    u = tuple(u)
    if len(u) != n:
        raise ValueError(f"expected {n} offsets")
    if eval_M(n, u) != 0:
        raise ZilepError(f"M(u) = {eval_M(n, u)} for u = {u}; the shift must map 0 to 0")
    sq = n * n
    return ZilepFunction.from_callable(
        lambda v: eval_M(n, [a + b for a, b in zip(v, u)]), n, (sq,) * n, (0,) * n
    )

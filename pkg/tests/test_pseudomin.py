import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from abforge.core import ZilepError
from abforge.network import evaluate_grid
from abforge.pseudomin import eval_M, eval_M_array, eval_M_window, mhat, pseudomin_zilep
from abforge.synth import synth_recurrent

import oracles


def test_mhat_examples():
    assert mhat(2, (0, 1)) == 0
    assert mhat(2, (3, 2)) == 2
    assert mhat(3, (9, 0, 0)) == 3
    assert mhat(2, (1, 3)) is None


def test_eval_examples():
    assert eval_M(2, (3, 4)) == 3
    assert eval_M(3, (5, 5, 7)) == 5
    for x in range(-30, 30):
        assert eval_M(1, (x,)) == x


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mhat_matches_bruteforce_representations(n):
    for x in itertools.product(range(-n * n, n * n + 2), repeat=n):
        vals = oracles.mhat_bruteforce(n, x)
        assert len(vals) <= 1
        assert mhat(n, x) == (vals.pop() if vals else None)


@pytest.mark.parametrize("n", [2, 3])
def test_formula_matches_literal_supremum(n):
    rng = random.Random(n)
    for _ in range(12 if n == 3 else 200):
        x = tuple(rng.randrange(-12, 13) for _ in range(n))
        narrow = eval_M_window(n, x)
        wide = eval_M_window(n, x, width=3 * n * n + n)
        assert narrow == wide == eval_M(n, x, closed_form=False)


def test_closed_form_for_two_is_a_valid_choice():
    # the literal supremum and the average differ, yet both have properties (i) and (ii)
    assert eval_M(2, (0, 2), closed_form=False) == 0
    assert eval_M(2, (0, 2)) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_array_evaluation_matches_scalar(n):
    rng = np.random.default_rng(n)
    X = rng.integers(-40, 40, size=(500, n))
    got = eval_M_array(n, X)
    for row, v in zip(X, got):
        assert eval_M(n, row) == v


def test_shifted_two_table():
    f = pseudomin_zilep(2, (0, 0))
    assert f.periods == (4, 4) and f.margins == (0, 0)
    assert f.coeffs == ((Fraction(1, 2), Fraction(1, 2)),)
    for v in itertools.product(range(5), repeat=2):
        assert f(v)[0] == (v[0] + v[1]) // 2
    g = pseudomin_zilep(2, (0, 1))
    for v in itertools.product(range(9), repeat=2):
        assert g(v)[0] == (v[0] + v[1] + 1) // 2


def test_shifted_three_table():
    f = pseudomin_zilep(3, (0, 1, 1))
    assert f((0, 0, 0)) == (0,)
    for v in itertools.product(range(10), repeat=3):
        assert f(v)[0] == eval_M(3, (v[0], v[1] + 1, v[2] + 1))


def test_bad_shift_rejected():
    with pytest.raises(ZilepError):
        pseudomin_zilep(2, (2, 2))


@pytest.mark.parametrize("n,u", [(1, (0,)), (2, (0, 0)), (2, (0, 1)), (3, (0, 0, 0)), (3, (0, 1, 1))])
def test_compiled_pseudomin_reproduces_table(n, u):
    f = pseudomin_zilep(n, u)
    net = synth_recurrent(f)
    got = evaluate_grid(net, (n * n + 1,) * n)
    for v, out in got.items():
        assert out == (eval_M(n, [a + b for a, b in zip(v, u)]),)


coords = st.integers(-20, 20)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@given(data=st.data())
def test_periodicity_property(n, data):
    x = tuple(data.draw(coords) for _ in range(n))
    j = data.draw(st.integers(0, n - 1))
    y = list(x)
    y[j] += n * n
    assert eval_M(n, y) == eval_M(n, x) + n


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@given(data=st.data())
def test_near_diagonal_is_minimum(n, data):
    base = data.draw(coords)
    x = tuple(base + data.draw(st.integers(0, n - 1)) for _ in range(n))
    assert eval_M(n, x) == min(x)


@pytest.mark.parametrize("n", [2, 3, 4])
@given(data=st.data())
def test_monotone_and_symmetric(n, data):
    x = tuple(data.draw(coords) for _ in range(n))
    y = tuple(a + data.draw(st.integers(0, 10)) for a in x)
    assert eval_M(n, x) <= eval_M(n, y)
    perm = data.draw(st.permutations(range(n)))
    assert eval_M(n, [x[p] for p in perm]) == eval_M(n, x)

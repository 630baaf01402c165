import itertools
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from abforge.core import (AbelianProcessor, BoxTooLarge, ProcessorError, ZilepError, ZilepFunction,
                          check_abelian, classify_recurrence, equivalent, eval_processor, eval_zilep,
                          exponent, is_bounded, is_meager, layer_profile, minimize, processor_to_zilep,
                          zilep_to_processor)
from abforge.fixtures import (delayer_function, fig5, fig6, fig6_with_margins, floor_function,
                              presink_function, random_abelian_processor, random_general, random_zilp)
from abforge.gates import DELAYER, PRESINK, adder, gate_processor, splitter, toppler

import oracles

seeds = st.integers(0, 2**32 - 1)


def swapped_processor():
    """Two letters on three states where one transition is tampered with."""
    t1 = (1, 2, 0)
    t2 = (2, 2, 0)  # t1 t2 (0) = 0 but t2 t1 (0) = 2
    zero = ((0,),) * 3
    return AbelianProcessor.build([t1, t2], [zero, zero])


# ---------------------------------------------------------------------------
# processors
# ---------------------------------------------------------------------------


def test_toppler_is_abelian():
    assert check_abelian(gate_processor(toppler(3))) is None


def test_commutation_violation_reported():
    ce = check_abelian(swapped_processor())
    assert ce is not None
    assert (ce.i, ce.j) == (0, 1)
    assert ce.identity == "transition"


@given(seeds)
def test_canonical_processor_is_abelian(seed):
    f = random_general(random.Random(seed))
    assert check_abelian(zilep_to_processor(f)) is None


def test_primed_toppler_value():
    assert eval_processor(gate_processor(toppler(4, 3)), (1,))[0] == (1,)


def test_zero_input_stays_put():
    p = gate_processor(toppler(5, 2))
    assert eval_processor(p, (0,)) == ((0,), 2)


def test_delayer_value():
    assert eval_processor(gate_processor(DELAYER), (5,))[0] == (4,)


def test_long_runs_are_shortcut():
    p = gate_processor(toppler(7, 3))
    assert eval_processor(p, (10**9,))[0] == ((10**9 + 3) // 7,)


def test_explicit_word_must_match_counts():
    p = gate_processor(adder())
    with pytest.raises(ValueError):
        eval_processor(p, (1, 1), order=[0, 0])


def test_recurrence_classes():
    assert classify_recurrence(gate_processor(toppler(4))).recurrent
    for g in (DELAYER, PRESINK):
        rec = classify_recurrence(gate_processor(g))
        assert not rec.recurrent
        assert rec.recurrent_states == frozenset({1})


def test_two_terminal_components_rejected():
    # each letter leads into its own absorbing state
    zero = ((0,),) * 3
    p = AbelianProcessor.build([(1, 1, 2), (2, 1, 2)], [zero, zero])
    with pytest.raises(ProcessorError):
        classify_recurrence(p)


def test_exponents():
    assert exponent(gate_processor(toppler(6))) == 6
    assert exponent(gate_processor(splitter())) == 1
    assert exponent(gate_processor(DELAYER)) == 1


def test_processor_json_roundtrip():
    p = gate_processor(toppler(4, 1))
    d = json.loads(p.to_json())
    assert set(d) == {"letters_in", "letters_out", "states", "initial", "transitions", "outputs"}
    q = AbelianProcessor.from_json(p.to_json())
    assert q.transitions == p.transitions and q.outputs == p.outputs and q.initial == 1


# ---------------------------------------------------------------------------
# processor <-> function
# ---------------------------------------------------------------------------


def test_primed_toppler_to_zilep():
    f = processor_to_zilep(gate_processor(toppler(4, 2)))
    assert (f.k, f.periods, f.margins) == (1, (4,), (0,))
    assert f.coeffs == ((Fraction(1, 4),),)
    assert f.table == (0, 0, 1, 1, 1)


def test_delayer_to_zilep():
    f = processor_to_zilep(gate_processor(DELAYER))
    assert (f.periods, f.margins, f.coeffs) == ((1,), (1,), ((Fraction(1),),))
    assert f.table == (0, 0, 1)


def test_fig5_processor_to_zilep():
    f = processor_to_zilep(zilep_to_processor(fig5()))
    assert f.coeffs == ((Fraction(3, 4),),) and f.periods == (4,)
    assert f.table == (0, 1, 3, 3, 3)


def test_floor_half_processor_is_a_toppler():
    p = zilep_to_processor(floor_function(2))
    t = gate_processor(toppler(2))
    assert p.n_states == 2
    assert p.transitions == t.transitions and p.outputs == t.outputs


def test_sum_processor_has_one_state():
    f = ZilepFunction.from_callable(lambda x: x[0] + x[1], 2, (1, 1), (0, 0))
    assert zilep_to_processor(f).n_states == 1


def test_fig6_processor():
    p = zilep_to_processor(fig6())
    assert p.n_states == 20
    assert classify_recurrence(p).recurrent
    assert fig6().coeffs == ((Fraction(1, 2), Fraction(4, 5)),)


def test_fig6_with_margins_is_transient():
    p = zilep_to_processor(fig6_with_margins())
    assert not classify_recurrence(p).recurrent


# ---------------------------------------------------------------------------
# functions
# ---------------------------------------------------------------------------


def test_fig5_values():
    f = fig5()
    assert [f((x,))[0] for x in range(13)] == oracles.fig5_values(13)
    assert eval_zilep(f, (10,)) == (9,)


def test_far_evaluation():
    assert eval_zilep(floor_function(3), (10**6,)) == (333333,)


def test_fig6_far_evaluation_matches_periodic_extension():
    f = fig6()
    for x1, x2 in [(0, 0), (3, 4), (100, 7), (13, 1000)]:
        q1, r1 = divmod(x1, 4)
        q2, r2 = divmod(x2, 5)
        assert f((x1, x2))[0] == f((r1, r2))[0] + 2 * q1 + 4 * q2


def test_meagerness():
    assert is_meager(floor_function(5), 0) == (True, 1)
    assert is_meager(fig6(), 1) == (False, 4)
    ident = ZilepFunction.from_callable(lambda x: x[0], 1, (1,), (0,))
    assert is_meager(ident, 0).meager
    with pytest.raises(ZilepError):
        is_meager(delayer_function(), 0)


def test_boundedness():
    assert is_bounded(presink_function()) == (True, 1)
    assert not is_bounded(ZilepFunction.from_callable(sum, 2, (1, 1), (0, 0))).bounded
    assert is_bounded(ZilepFunction.from_callable(lambda x: 0, 1, (1,), (0,))) == (True, 0)


def test_layer_profile_of_fig6():
    prof = layer_profile(fig6(), 1)
    assert (prof.period, prof.slope, prof.margin) == (5, Fraction(4, 5), 0)
    assert prof.roughness == 2


def test_invalid_tables_rejected():
    with pytest.raises(ZilepError):  # f(0) != 0
        ZilepFunction(1, 1, ((Fraction(1),),), (1,), (0,), (1, 2))
    with pytest.raises(ZilepError):  # decreasing
        ZilepFunction(1, 1, ((Fraction(0),),), (2,), (0,), (0, 1, 0))
    with pytest.raises(ZilepError):  # extension inconsistent
        ZilepFunction(1, 1, ((Fraction(1, 2),),), (2,), (0,), (0, 0, 2))
    with pytest.raises(ZilepError):  # lambda * b not integral
        ZilepFunction(1, 1, ((Fraction(1, 3),),), (2,), (0,), (0, 0, 1))


def test_box_guardrail():
    with pytest.raises(BoxTooLarge):
        ZilepFunction.from_callable(lambda x: 0, 3, (300, 300, 300), (0, 0, 0))


def test_zilep_json_roundtrip():
    f = fig6_with_margins()
    d = json.loads(f.to_json())
    assert set(d) >= {"k", "l", "coeffs", "periods", "margins", "table"}
    assert d["coeffs"] == ["1/2", "4/5"]
    g = ZilepFunction.from_json(f.to_json())
    assert equivalent(f, g) and g.table == f.table


def test_equivalence_across_boxes():
    f = fig6()
    g = f.with_box((8, 10), (2, 3))
    assert equivalent(f, g)
    assert minimize(g).periods == (4, 5) and minimize(g).margins == (0, 0)
    assert not equivalent(floor_function(2), floor_function(2, 1))


def test_minimize_reduces_to_smallest_box():
    f = ZilepFunction.from_callable(lambda x: x[0] // 3, 1, (9,), (4,))
    m = minimize(f)
    assert (m.periods, m.margins) == ((3,), (0,))


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------


@given(seeds)
def test_order_independence_of_processor_words(seed):
    rng = random.Random(seed)
    p = random_abelian_processor(rng)
    x = tuple(rng.randrange(4) for _ in range(p.k))
    want = eval_processor(p, x)
    word = [i for i, c in enumerate(x) for _ in range(c)]
    for _ in range(50):
        rng.shuffle(word)
        assert oracles.word_eval(p.transitions, p.outputs, p.initial, word) == want
        assert eval_processor(p, x, order=word) == want


@given(seeds)
def test_parallelogram_law(seed):
    rng = random.Random(seed)
    p = random_abelian_processor(rng)
    pts = list(itertools.product(range(4), repeat=p.k))
    by_state = {}
    for y in pts:
        by_state.setdefault(eval_processor(p, y)[1], []).append(y)
    f = lambda x: eval_processor(p, x)[0]
    for group in by_state.values():
        y, *rest = group
        for y2 in rest[:3]:
            for x in pts:
                a = [u - v for u, v in zip(f(tuple(map(sum, zip(x, y)))), f(y))]
                b = [u - v for u, v in zip(f(tuple(map(sum, zip(x, y2)))), f(y2))]
                assert a == b


@given(seeds)
def test_processor_to_zilep_roundtrip(seed):
    rng = random.Random(seed)
    p = random_abelian_processor(rng)
    f = processor_to_zilep(p)
    shape = [r + 2 * lam + 1 for r, lam in zip(f.margins, f.periods)]
    for x in oracles.grid(shape):
        assert f(x) == eval_processor(p, x)[0]


@given(seeds)
def test_zilep_to_processor_roundtrip(seed):
    f = random_general(random.Random(seed))
    p = zilep_to_processor(f)
    shape = [r + 2 * lam + 1 for r, lam in zip(f.margins, f.periods)]
    for x in oracles.grid(shape):
        assert eval_processor(p, x)[0] == f(x)


@given(seeds)
def test_zilp_processors_are_recurrent(seed):
    f = random_zilp(random.Random(seed), max_k=2)
    assert classify_recurrence(zilep_to_processor(f)).recurrent


@given(seeds)
def test_functions_are_monotone(seed):
    f = random_general(random.Random(seed))
    shape = [2 * (r + lam) + 1 for r, lam in zip(f.margins, f.periods)]
    for x in oracles.grid(shape):
        for i in range(f.k):
            y = list(x)
            y[i] += 1
            assert f(tuple(y))[0] >= f(x)[0]

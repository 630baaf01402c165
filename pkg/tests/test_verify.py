import json

import pytest

from abforge.fixtures import delayer_function, fig5, fig6
from abforge.gates import adder, splitter, toppler
from abforge.network import Builder
from abforge.synth import feedback_delayer, synth_recurrent, synth_unary_recurrent
from abforge.verify import VerifyConfig, verify


def primed_fig5(primes):
    b = Builder()
    branches = b.gate(splitter(3), [b.input()])
    outs = [b.gate(toppler(4, q), [s])[0] for q, s in zip(primes, branches)]
    b.output(b.gate(adder(3), outs)[0])
    return b.build()


def test_fig5_passes_on_default_grid():
    rep = verify(fig5(), synth_unary_recurrent(fig5()))
    assert rep.passed
    assert rep.grid_points == 9 and rep.schedules == 100
    assert rep.text().startswith("PASS: 9 grid points, 100 schedules, seed 0")


def test_fig5_passes_on_thirteen_points():
    rep = verify(fig5(), primed_fig5((3, 2, 2)), VerifyConfig(bounds=(12,)))
    assert rep.passed and rep.grid_points == 13


def test_misprimed_network_fails_at_one():
    rep = verify(fig5(), primed_fig5((2, 2, 2)))
    assert not rep.passed
    assert rep.mismatch == {"x": [1], "network": [0], "function": [1]}
    assert "mismatch at x=1" in rep.text()


def test_fig6_on_its_figure_grid():
    rep = verify(fig6(), synth_recurrent(fig6()), VerifyConfig(bounds=(13, 15), fuzz=20))
    assert rep.passed and rep.grid_points == 14 * 16


def test_json_report_is_stable():
    net = synth_unary_recurrent(fig5())
    a = verify(fig5(), net, VerifyConfig(seed=3, fuzz=10)).to_json()
    b = verify(fig5(), net, VerifyConfig(seed=3, fuzz=10)).to_json()
    assert a == b
    d = json.loads(a)
    assert d["passed"] and d["seed"] == 3 and d["bounds"] == [8]


def test_cyclic_network_verifies():
    rep = verify(delayer_function(), feedback_delayer(), VerifyConfig(bounds=(20,), fuzz=30))
    assert rep.passed


def test_config_validation():
    with pytest.raises(ValueError):
        VerifyConfig(fuzz=0)
    with pytest.raises(ValueError):
        VerifyConfig(budget_factor=0)
    with pytest.raises(ValueError):
        VerifyConfig(fmt="xml")
    with pytest.raises(ValueError):
        VerifyConfig(bounds=(3,)).grid_bounds(fig5())


def test_arity_mismatch_rejected():
    with pytest.raises(ValueError):
        verify(fig6(), synth_unary_recurrent(fig5()))

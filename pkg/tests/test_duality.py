import math

import numpy as np
import pytest

from riskindex.duality import (
    DualSet,
    dual_eval_tvar_asset,
    dual_eval_tvar_cash,
    greedy_density,
    support_function,
)
from riskindex.errors import BadLevel, BadParameters, DimensionMismatch, NonPositivePayoff
from riskindex.riskcore import ExpectationFloor, TVaRLevel, eval_risk, reproduce_counterexample, tvar_alpha
from riskindex.scenario import ScenarioSpace, TradedAsset, law_of

SP4 = ScenarioSpace([0.25] * 4, {"X": [-10.0, -5.0, 0.0, 5.0], "C": [3.0] * 4, "Z": [0.0] * 4})


def random_instance(rng):
    n = int(rng.integers(1, 13))
    p = rng.uniform(0.05, 1.0, n)
    p /= p.sum()
    sp = ScenarioSpace(p, {"X": np.round(rng.normal(0, 4, n), 3), "S": rng.uniform(0.2, 3.0, n)})
    return sp, float(rng.uniform(0.05, 0.95)), float(rng.uniform(0.5, 2.0))


def test_support_function_examples():
    p = SP4.probs
    assert support_function(TVaRLevel(0.3), p, SP4) == 0.0
    assert support_function(ExpectationFloor(3.0), 2 * p, SP4) == pytest.approx(6.0)
    assert support_function(ExpectationFloor(3.0), [1.0, 0, 0, 0], SP4) == -math.inf
    # all mass on one state violates q_i <= p_i / alpha for alpha = 0.5
    assert support_function(TVaRLevel(0.5), [1.0, 0, 0, 0], SP4) == -math.inf
    with pytest.raises(BadParameters):
        support_function(TVaRLevel(0.3), [-0.1, 0.5, 0.3, 0.3], SP4)
    with pytest.raises(DimensionMismatch):
        support_function(TVaRLevel(0.3), [1.0], SP4)


def test_cash_examples():
    assert dual_eval_tvar_cash(SP4, "C", 0.3) == pytest.approx(-3.0)
    assert dual_eval_tvar_cash(SP4, "X", 0.5) == pytest.approx(7.5)
    with pytest.raises(BadLevel):
        dual_eval_tvar_cash(SP4, "X", 1.0)


def test_cash_matches_primal():
    rng = np.random.default_rng(31)
    for _ in range(200):
        sp, a, _ = random_instance(rng)
        assert dual_eval_tvar_cash(sp, "X", a) == pytest.approx(tvar_alpha(law_of(sp, "X"), a), abs=1e-10)


def test_asset_examples():
    assert dual_eval_tvar_asset(SP4, "X", TradedAsset.cash(), 0.5) == pytest.approx(7.5, abs=1e-9)
    assert dual_eval_tvar_asset(SP4, "Z", TradedAsset(1.0, "C"), 0.5) == pytest.approx(0.0, abs=1e-12)
    rec = reproduce_counterexample()
    tol = 1e-8
    v = dual_eval_tvar_asset(rec.space, "X", TradedAsset(1.0, "S_T"), 0.1, tol)
    assert v == pytest.approx(rec.rho_x, abs=5 * tol)


def test_nonpositive_payoff():
    sp = ScenarioSpace([0.5, 0.5], {"X": [1.0, -1.0], "S": [0.0, 1.0]})
    with pytest.raises(NonPositivePayoff):
        dual_eval_tvar_asset(sp, "X", TradedAsset(1.0, "S"), 0.2)


def test_asset_matches_primal():
    rng = np.random.default_rng(32)
    tol = 1e-9
    for _ in range(200):
        sp, a, s0 = random_instance(rng)
        asset = TradedAsset(s0, "S")
        primal = eval_risk(sp, "X", asset, TVaRLevel(a), tol)
        assert dual_eval_tvar_asset(sp, "X", asset, a, tol) == pytest.approx(primal, abs=5 * tol)


def test_weak_duality():
    rng = np.random.default_rng(33)
    tol = 1e-9
    for _ in range(50):
        sp, a, s0 = random_instance(rng)
        asset = TradedAsset(s0, "S")
        primal = eval_risk(sp, "X", asset, TVaRLevel(a), tol)
        dual = DualSet.for_asset(sp, asset, a)
        for _ in range(20):
            q = greedy_density(rng.normal(size=sp.n_states), sp.probs, a)
            psi = dual.from_probability(q)
            assert dual.contains(psi)
            val = support_function(TVaRLevel(a), psi, sp) - float(psi @ sp.var("X"))
            assert val <= primal + tol


def test_greedy_density_is_feasible():
    rng = np.random.default_rng(34)
    p = rng.uniform(0.1, 1, 9)
    p /= p.sum()
    q = greedy_density(rng.normal(size=9), p, 0.3)
    assert q.sum() == pytest.approx(1.0)
    assert np.all(q <= p / 0.3 + 1e-15) and np.all(q >= 0)

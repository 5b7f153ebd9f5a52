import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from riskindex.errors import DerivativeUnavailable
from riskindex.indices import (
    Attained,
    IndexReport,
    Method,
    conjugate,
    density_moment_threshold,
    estimate_distortion_index,
    estimate_utility_decay,
    index_of_finiteness,
    index_of_qualitative_robustness,
)
from riskindex.riskcore import (
    BetaGamma,
    CappedLog,
    CustomDistortion,
    CustomUtility,
    Distortion,
    EmpiricalDensity,
    ExpectationFloor,
    Exponential,
    FlatPower,
    LogDistortion,
    MaxCorrelation,
    MaxMinVar,
    MaxVar,
    MinMaxVar,
    MinVar,
    NonHara,
    QuantilePower,
    TVaRLevel,
    UtilityFloor,
    UtilitySpec,
)

PARAMS = [1.5, 2.0, 3.0, 5.0]


def as_custom_distortion(delta):
    return CustomDistortion(lambda x, d=delta: float(d(x)), name="wrapped")


def as_custom_utility(fam):
    return CustomUtility(lambda x, f=fam: float(f(x)), name="wrapped")


def test_conjugate():
    assert conjugate(1) == math.inf
    assert conjugate(math.inf) == 1.0
    assert conjugate(2) == 2.0
    assert conjugate(1.5) == pytest.approx(3.0)
    for p in [1, 1.5, 2, 3, math.inf]:
        assert conjugate(conjugate(p)) == pytest.approx(p)


def test_report_invariants():
    with pytest.raises(ValueError):
        IndexReport(0.5, Attained.YES, Method.ANALYTIC)
    with pytest.raises(ValueError):
        IndexReport(2.0, Attained.NO, Method.ANALYTIC, {"fit_residual": 0.0})


def test_golden_examples():
    r = index_of_finiteness(Distortion(MaxVar(3.0)))
    assert (r.index, r.attained, r.method) == (3.0, Attained.NO, Method.ANALYTIC)
    r = index_of_finiteness(UtilityFloor(UtilitySpec(FlatPower(2.0), -1.0)))
    assert (r.index, r.attained) == (2.0, Attained.YES)
    assert index_of_finiteness(UtilityFloor(UtilitySpec(Exponential(1.0)))).index == math.inf
    assert index_of_finiteness(ExpectationFloor(0.0)).index == 1.0
    assert index_of_finiteness(MaxCorrelation(EmpiricalDensity.from_values([0.5, 1.5]))).attained is Attained.YES


def test_flat_power_at_level_zero_is_the_positive_cone():
    # With alpha = sup u the acceptance set is {X >= 0}, which has empty L^p interior.
    assert index_of_finiteness(UtilityFloor(UtilitySpec(FlatPower(2.0), 0.0))).index == math.inf


def test_robustness_examples():
    assert index_of_qualitative_robustness(TVaRLevel(0.05)).index == 1.0
    assert index_of_qualitative_robustness(UtilityFloor(UtilitySpec(Exponential(1.0)))).index == 0.0
    assert index_of_qualitative_robustness(Distortion(BetaGamma(2.0, 3.0))).index == 0.5


def test_estimate_distortion_examples():
    r = estimate_distortion_index(MaxVar(2.0))
    assert r.index == pytest.approx(2.0, abs=0.05) and r.attained is Attained.NO
    assert r.method is Method.NUMERIC_FIT
    r = estimate_distortion_index(MinVar(4.0))
    assert r.index == 1.0 and r.attained is Attained.YES
    r = estimate_distortion_index(LogDistortion())
    assert r.index == 1.0 and r.attained is Attained.YES


def test_estimate_utility_examples():
    r = estimate_utility_decay(UtilitySpec(as_custom_utility(FlatPower(3.0)), -1.0))
    assert r.index == pytest.approx(3.0, abs=0.05) and r.attained is Attained.UNKNOWN
    assert estimate_utility_decay(UtilitySpec(as_custom_utility(Exponential(2.0)))).index == math.inf
    r = estimate_utility_decay(UtilitySpec(as_custom_utility(NonHara(1.0, 0.0)), -1.0))
    assert r.index == pytest.approx(1.0, abs=0.05)
    assert estimate_utility_decay(UtilitySpec(as_custom_utility(CappedLog(1.0)))).index == math.inf


def test_density_threshold():
    assert density_moment_threshold(QuantilePower(3.0)) == 3.0
    assert density_moment_threshold(EmpiricalDensity.from_values([1.0, 1.0])) == math.inf
    assert index_of_finiteness(MaxCorrelation(QuantilePower(1.5))).index == pytest.approx(3.0)


def test_custom_without_derivative_uses_central_difference():
    r = index_of_finiteness(Distortion(as_custom_distortion(MaxVar(3.0))))
    assert r.method is Method.NUMERIC_FIT
    assert r.index == pytest.approx(3.0, abs=0.05)


def test_derivative_unavailable():
    flat = CustomDistortion(lambda x: 1.0 if x > 0 else 0.0)
    with pytest.raises(DerivativeUnavailable):
        estimate_distortion_index(flat)


@pytest.mark.parametrize("g", PARAMS)
def test_numeric_agrees_with_analytic_distortions(g):
    for delta in [MaxVar(g), MinVar(g), MaxMinVar(g), MinMaxVar(g), BetaGamma(g, 2.0)]:
        a = index_of_finiteness(Distortion(delta))
        n = estimate_distortion_index(delta)
        assert n.index == pytest.approx(a.index, abs=0.05), type(delta).__name__
        c = estimate_distortion_index(as_custom_distortion(delta))
        assert c.index == pytest.approx(a.index, abs=0.05), type(delta).__name__


@pytest.mark.parametrize("q", PARAMS)
def test_numeric_agrees_with_analytic_utilities(q):
    u = UtilitySpec(FlatPower(q), -1.0)
    assert estimate_utility_decay(UtilitySpec(as_custom_utility(u.family), -1.0)).index == pytest.approx(
        index_of_finiteness(UtilityFloor(u)).index, abs=0.05
    )


@given(st.sampled_from([
    TVaRLevel(0.05), ExpectationFloor(0.0), Distortion(MaxVar(3.0)), Distortion(LogDistortion()),
    UtilityFloor(UtilitySpec(Exponential(1.0))), UtilityFloor(UtilitySpec(CappedLog(1.0))),
    MaxCorrelation(QuantilePower(2.5)), UtilityFloor(UtilitySpec(NonHara(2.0), -1.0)),
]))
def test_reciprocity(acc):
    f = index_of_finiteness(acc)
    r = index_of_qualitative_robustness(acc)
    if math.isinf(f.index):
        assert r.index == 0.0
    else:
        assert f.index * r.index == pytest.approx(1.0)
    assert r.attained == f.attained

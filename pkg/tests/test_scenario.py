import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskindex.errors import BadAsset, BadLevel, BadWeights, EmptyInput, NonFiniteValue, UnknownVariable
from riskindex.scenario import (
    EmpiricalDistribution,
    ScenarioSpace,
    TradedAsset,
    cdf,
    cdf_left,
    law_of,
    make_empirical,
    psi_p_moment,
    quantile,
    read_sample_csv,
    read_scenario_csv,
    same_law,
    upper_quantile,
    write_scenario_csv,
)

HALF = make_empirical([(-1, 0.5), (1, 0.5)])


def laws(max_atoms=8):
    return st.lists(
        st.tuples(st.integers(-20, 20).map(float), st.floats(0.05, 1.0)), min_size=1, max_size=max_atoms
    ).map(lambda pts: make_empirical([(v, w / sum(x for _, x in pts)) for v, w in pts]))


def test_merge_and_sort():
    assert make_empirical([(1, 0.5), (1, 0.5)]).atoms == [(1.0, 1.0)]
    assert make_empirical([(3, 0.25), (-1, 0.75)]).atoms == [(-1.0, 0.75), (3.0, 0.25)]


def test_rejects_bad_input():
    with pytest.raises(BadWeights):
        make_empirical([(0, 0.5)])
    with pytest.raises(EmptyInput):
        make_empirical([])
    with pytest.raises(NonFiniteValue):
        EmpiricalDistribution.from_arrays([np.inf])
    with pytest.raises(BadWeights):
        EmpiricalDistribution.from_arrays([1.0, 2.0], [1.2, -0.2])


def test_cdf_right_continuity():
    assert cdf(HALF, 0.0) == 0.5
    assert cdf(HALF, -1.0) == 0.5
    assert cdf(HALF, -1.0001) == 0.0
    assert cdf_left(HALF, -1.0) == 0.0
    assert cdf(HALF, 1.0) == 1.0


def test_quantiles():
    assert quantile(HALF, 0.5) == -1.0
    assert quantile(HALF, 0.51) == 1.0
    assert quantile(make_empirical([(5, 1.0)]), 1.0) == 5.0
    assert upper_quantile(HALF, 0.5) == 1.0
    assert upper_quantile(HALF, 0.49) == -1.0
    with pytest.raises(BadLevel):
        quantile(HALF, 0.0)
    with pytest.raises(BadLevel):
        upper_quantile(HALF, 1.0)


def test_same_law():
    a = make_empirical([(2, 0.3), (1, 0.7)])
    b = make_empirical([(1, 0.7), (2, 0.3)])
    assert same_law(a, b)
    assert same_law(make_empirical([(0, 1)]), make_empirical([(1e-7, 1)]), 1e-6)
    assert not same_law(make_empirical([(0, 0.5), (1, 0.5)]), make_empirical([(0, 0.4), (1, 0.6)]), 1e-6)


def test_law_of_space():
    sp = ScenarioSpace([0.2, 0.2, 0.6], {"X": [-1.5, 0, -2]})
    assert law_of(sp, "X").atoms == pytest.approx([(-2, 0.6), (-1.5, 0.2), (0, 0.2)])
    const = ScenarioSpace([0.5, 0.5], {"C": [3, 3]})
    assert law_of(const, "C").atoms == [(3.0, 1.0)]
    perm = ScenarioSpace([0.25] * 4, {"A": [1, 2, 3, 4], "B": [4, 1, 3, 2]})
    assert same_law(law_of(perm, "A"), law_of(perm, "B"))
    with pytest.raises(UnknownVariable):
        sp.var("nope")


def test_space_validation():
    with pytest.raises(BadWeights):
        ScenarioSpace([0.5, 0.6], {"X": [0, 1]})
    with pytest.raises(BadWeights):
        ScenarioSpace([1.0, 0.0], {"X": [0, 1]})


def test_psi_moment():
    assert psi_p_moment(make_empirical([(0, 1)]), 2) == 0.0
    assert psi_p_moment(make_empirical([(-2, 0.5), (2, 0.5)]), 2) == 2.0
    assert psi_p_moment(make_empirical([(-3, 1)]), 1) == 3.0


def test_traded_asset():
    sp = ScenarioSpace([0.5, 0.5], {"S": [1.0, 2.0], "Bad": [-1.0, 1.0], "Z": [0.0, 0.0]})
    assert TradedAsset.cash().payoff_on(sp).tolist() == [1.0, 1.0]
    assert TradedAsset(2.0, "S").payoff_on(sp).tolist() == [1.0, 2.0]
    with pytest.raises(BadAsset):
        TradedAsset(1.0, "Bad").payoff_on(sp)
    with pytest.raises(BadAsset):
        TradedAsset(1.0, "Z").payoff_on(sp)
    with pytest.raises(BadAsset):
        TradedAsset(0.0, 1.0)


def test_csv_roundtrip(tmp_path):
    sp = ScenarioSpace([0.1, 0.3, 0.6], {"X": [1.5, -2.0, 0.25], "S": [1.0, 2.0, 3.0]})
    path = tmp_path / "s.csv"
    write_scenario_csv(sp, path)
    back = read_scenario_csv(path)
    assert np.allclose(back.probs, sp.probs)
    assert np.array_equal(back.var("X"), sp.var("X"))
    (tmp_path / "a.csv").write_text("value\n1\n2\n2\n")
    assert read_sample_csv(tmp_path / "a.csv").atoms == pytest.approx([(1, 1 / 3), (2, 2 / 3)])


@settings(max_examples=60, deadline=None)
@given(laws(), st.floats(0.001, 1.0))
def test_quantile_inverts_cdf(d, t):
    q = quantile(d, t)
    assert cdf(d, q) >= t - 1e-12
    assert cdf_left(d, q) < t + 1e-12


@settings(max_examples=60, deadline=None)
@given(laws())
def test_weights_normalised(d):
    assert abs(d.weights.sum() - 1.0) < 1e-12
    assert np.all(np.diff(d.values) > 0)
    assert d.cum[-1] == 1.0

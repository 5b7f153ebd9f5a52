import numpy as np
import pytest

from riskindex.distributions import (
    FiniteDiscrete,
    LogNormal,
    Mixture,
    Normal,
    ParetoTail,
    PointMass,
    Truncated,
    contaminate,
    sample,
    sample_values,
    spec_from_dict,
    spec_to_dict,
)
from riskindex.errors import BadCount, BadEpsilon, InvalidSpec
from riskindex.metrics import levy_distance
from riskindex.scenario import make_empirical, same_law


def test_point_mass_sample():
    assert sample(PointMass(3.0), 5, 11).atoms == [(3.0, 1.0)]


def test_determinism():
    spec = Mixture([(0.7, Normal(0, 1)), (0.3, LogNormal(0, 0.5))])
    a = sample_values(spec, 1000, 42)
    b = sample_values(spec, 1000, 42)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_values(spec, 1000, 43))
    assert np.array_equal(sample_values(spec, 10, (42, 1, 7)), sample_values(spec, 10, (42, 1, 7)))


def test_normal_mean():
    assert abs(sample(Normal(0, 1), 10_000, 7).mean()) < 4 / np.sqrt(10_000)


def test_bad_count():
    with pytest.raises(BadCount):
        sample(Normal(0, 1), 0, 1)


def test_contaminate():
    base = Truncated(Normal(0, 1), -5, 5)
    assert contaminate(base, 0.0, PointMass(-30.0)) is base
    with pytest.raises(BadEpsilon):
        contaminate(base, 1.0, PointMass(-30.0))
    mix = contaminate(base, 0.01, PointMass(-30.0))
    assert mix.cdf(-30.0) == pytest.approx(0.01)
    assert mix.cdf(-29.0) == pytest.approx(0.01)
    draws = sample_values(mix, 100_000, 3)
    assert abs(np.mean(draws == -30.0) - 0.01) < 4 * np.sqrt(0.01 * 0.99 / 100_000)
    assert np.all((draws == -30.0) | (np.abs(draws) <= 5))


def test_truncated_bounds():
    t = Truncated(Normal(0, 1), -1, 2)
    assert t.essinf() == -1 and t.esssup() == 2
    u = np.array([1e-9, 0.5, 1 - 1e-9])
    x = t.ppf(u)
    assert np.all((x >= -1) & (x <= 2))
    assert np.allclose(t.cdf(x), u, atol=1e-9)


def test_mixture_ppf_inverts_cdf():
    m = Mixture([(0.5, Normal(-2, 1)), (0.5, Normal(3, 0.5))])
    u = np.linspace(0.01, 0.99, 25)
    assert np.allclose(m.cdf(m.ppf(u)), u, atol=1e-9)


def test_pareto_tails():
    up = ParetoTail(1.0, 3.0)
    assert up.essinf() == 1.0 and np.isinf(up.esssup())
    assert up.mean() == pytest.approx(1.5, rel=1e-6)
    lo = ParetoTail(1.0, 3.0, "lower")
    assert lo.esssup() == -1.0


def test_finite_discrete_law():
    law = make_empirical([(-1, 0.25), (2, 0.75)])
    s = sample(FiniteDiscrete(law), 20_000, 5)
    assert set(s.values.tolist()) <= {-1.0, 2.0}
    assert abs(s.weights[0] - 0.25) < 0.02


def test_sample_converges_weakly():
    spec = Normal(0, 1)
    grid = np.linspace(-6, 6, 4001)
    true = make_empirical(zip(grid, np.diff(np.concatenate([[0.0], spec.cdf(grid[:-1]), [1.0]]))))
    d_small = levy_distance(sample(spec, 100, 1), true).value
    d_big = levy_distance(sample(spec, 10_000, 1), true).value
    assert d_big < d_small


def test_json_roundtrip():
    specs = [
        PointMass(2.0),
        FiniteDiscrete(make_empirical([(0, 0.5), (1, 0.5)])),
        Normal(1.0, 2.0),
        LogNormal(0.0, 1.0),
        ParetoTail(2.0, 3.0, "lower"),
        Mixture([(0.9, Truncated(Normal(0, 1), -5, 5)), (0.1, PointMass(-30.0))]),
    ]
    for s in specs:
        back = spec_from_dict(spec_to_dict(s))
        assert spec_to_dict(back) == spec_to_dict(s)
    with pytest.raises(InvalidSpec):
        spec_from_dict({"type": "Nope"})


def test_to_empirical_of_discrete_mixture():
    m = Mixture([(0.5, PointMass(1.0)), (0.5, PointMass(1.0))])
    assert same_law(m.to_empirical(), make_empirical([(1.0, 1.0)]))

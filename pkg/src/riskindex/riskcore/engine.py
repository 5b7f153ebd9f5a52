"""Capital requirements rho_{A,S}(X) = inf{m : X + (m/S0) S_T in A}.

Acceptability is monotone in m because acceptance sets absorb nonnegative
additions and the payoff is nonnegative, so bisection on m is sound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from ..distributions import DistributionSpec
from ..errors import BadAsset, BadParameters, BadTolerance, UnsupportedSpec
from ..scenario import EmpiricalDistribution, ScenarioSpace, TradedAsset, law_of, same_law
from .measures import distortion_rho, entropic_rho, max_correlation_rho, min_correlation, tvar_alpha
from .specs import (
    AcceptanceSpec,
    Distortion,
    EmpiricalDensity,
    ExpectationFloor,
    Exponential,
    MaxCorrelation,
    TVaRDistortion,
    TVaRLevel,
    UtilityFloor,
    UtilitySpec,
)

M_MAX = 1e12
MAX_BISECTIONS = 400


def utility_expectation(space: ScenarioSpace, var_name: str, u: UtilitySpec) -> float:
    return _expected_utility(space.var(var_name), space.probs, u)


def _expected_utility(values, probs, u: UtilitySpec) -> float:
    uv = np.asarray(u(values), dtype=float)
    if np.any(uv == -np.inf):
        return -math.inf
    return float(np.dot(probs, uv))


def acceptable_law(d: EmpiricalDistribution, acc: AcceptanceSpec) -> bool:
    """The defining inequality of ``acc`` evaluated on a law."""
    if isinstance(acc, ExpectationFloor):
        return d.mean() >= acc.alpha
    if isinstance(acc, TVaRLevel):
        return tvar_alpha(d, acc.alpha) <= 0.0
    if isinstance(acc, UtilityFloor):
        return _expected_utility(d.values, d.weights, acc.utility) >= acc.utility.level_alpha
    if isinstance(acc, Distortion):
        return distortion_rho(d, acc.delta) <= 0.0
    if isinstance(acc, MaxCorrelation):
        return max_correlation_rho(d, acc.density) <= 0.0
    raise UnsupportedSpec(f"unknown acceptance variant {type(acc).__name__}")


def is_acceptable(space: ScenarioSpace, var_name: str, acc: AcceptanceSpec) -> bool:
    return acceptable_law(law_of(space, var_name), acc)


def default_tol(values, s0: float = 1.0) -> float:
    scale = max(float(np.max(np.abs(values))) if np.size(values) else 0.0, s0)
    return 1e-9 * max(1.0, scale)


def capital(values, probs, payoff, s0: float, acc: AcceptanceSpec, tol: float) -> float:
    """Bracket-and-bisect search for the least acceptable capital.

    Returns +inf when nothing up to ``M_MAX`` is acceptable and -inf when
    even ``-M_MAX`` is.
    """
    if not (tol > 0 and math.isfinite(tol)):
        raise BadTolerance(f"tolerance must be positive, got {tol!r}")
    x = np.asarray(values, dtype=float)
    s = np.asarray(payoff, dtype=float) / s0

    def ok(m: float) -> bool:
        return acceptable_law(EmpiricalDistribution.from_arrays(x + m * s, probs), acc)

    if ok(0.0):
        hi, step = 0.0, 1.0
        while True:
            m = -min(step, M_MAX)
            if not ok(m):
                lo = m
                break
            hi = m
            if step >= M_MAX:
                return -math.inf
            step *= 2.0
    else:
        lo, step = 0.0, 1.0
        while True:
            m = min(step, M_MAX)
            if ok(m):
                hi = m
                break
            lo = m
            if step >= M_MAX:
                return math.inf
            step *= 2.0
    for _ in range(MAX_BISECTIONS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def eval_risk(
    space: ScenarioSpace,
    var_name: str,
    asset: TradedAsset,
    acc: AcceptanceSpec,
    tol: Optional[float] = None,
) -> float:
    """rho_{A,S}(X) as an extended real (a float, possibly +-inf)."""
    x = space.var(var_name)
    s = asset.payoff_on(space)
    if tol is None:
        tol = default_tol(x, asset.price_s0)
    return capital(x, space.probs, s, asset.price_s0, acc, tol)


def cash_rho(d: EmpiricalDistribution, acc: AcceptanceSpec, tol: float = 1e-10) -> float:
    """Cash-additive risk of a law: the plug-in functional R_A."""
    if isinstance(acc, ExpectationFloor):
        return acc.alpha - d.mean()
    if isinstance(acc, TVaRLevel):
        return tvar_alpha(d, acc.alpha)
    if isinstance(acc, Distortion):
        return distortion_rho(d, acc.delta)
    if isinstance(acc, MaxCorrelation):
        return max_correlation_rho(d, acc.density)
    if isinstance(acc, UtilityFloor):
        u = acc.utility
        if isinstance(u.family, Exponential):
            return entropic_rho(d, u.family.gamma, u.level_alpha)
        return capital(d.values, d.weights, np.ones(len(d)), 1.0, acc, tol)
    raise UnsupportedSpec(f"unknown acceptance variant {type(acc).__name__}")


# ---------------------------------------------------------------- finiteness

@dataclass(frozen=True)
class FinitenessVerdict:
    finite: bool
    criterion: str
    witness: Optional[float] = None


def _positive_probe_points(spec: DistributionSpec) -> np.ndarray:
    if spec.discrete:
        vals = spec.to_empirical().values
        pos = vals[vals > 0]
        return np.concatenate([[pos[0] / 2.0], pos]) if pos.size else pos
    levels = np.concatenate([np.logspace(-15, -1, 29), np.linspace(0.1, 1.0 - 1e-9, 60)])
    x = np.asarray(spec.ppf(levels), dtype=float)
    x = x[np.isfinite(x) & (x > 0)]
    if x.size:
        x = np.concatenate([[x.min() / 2.0], x])
    return np.unique(x)


def _distortion_finiteness(delta, spec: DistributionSpec, label: str) -> FinitenessVerdict:
    xs = _positive_probe_points(spec)
    xs = xs[xs < spec.esssup()] if np.isfinite(spec.esssup()) and xs.size > 1 else xs
    if xs.size == 0:
        return FinitenessVerdict(False, f"{label}: no positive payoff level to probe", None)
    vals = np.asarray(delta(np.asarray(spec.cdf(xs), dtype=float)), dtype=float)
    k = int(np.argmin(vals))
    return FinitenessVerdict(
        bool(vals[k] < 1.0),
        f"{label}: delta(F_ST(x)) < 1 for some x > 0 (min at x={xs[k]:.6g})",
        float(vals[k]),
    )


def _min_correlation_spec(spec: DistributionSpec, density) -> float:
    if spec.discrete:
        return min_correlation(spec.to_empirical(), density)
    slope = density.induced_distortion().right_derivative
    val, _ = integrate.quad(lambda t: float(spec.ppf(t)) * float(slope(t)), 0.0, 1.0, limit=400)
    return val


def finiteness_check(acc: AcceptanceSpec, asset_payoff: DistributionSpec, s0: float) -> FinitenessVerdict:
    """Is rho_{A,S} finite-valued on bounded positions for this payoff?"""
    TradedAsset(s0, asset_payoff)
    if asset_payoff.essinf() < 0:
        raise BadAsset("payoff must be nonnegative")
    if not asset_payoff.esssup() > 0:
        raise BadAsset("payoff must not vanish almost surely")

    if isinstance(acc, ExpectationFloor):
        m = asset_payoff.mean()
        return FinitenessVerdict(m > 0, "expectation floor: E[S_T] > 0", float(m))
    if isinstance(acc, TVaRLevel):
        return _distortion_finiteness(TVaRDistortion(acc.alpha), asset_payoff, "TVaR as distortion")
    if isinstance(acc, Distortion):
        return _distortion_finiteness(acc.delta, asset_payoff, "distortion")
    if isinstance(acc, MaxCorrelation):
        v = _min_correlation_spec(asset_payoff, acc.density)
        return FinitenessVerdict(v > 0, "max-correlation: inf_{Z~S_T} E_Q[Z] > 0", float(v))
    if isinstance(acc, UtilityFloor):
        u = acc.utility
        if not u.family.hits_minus_inf and u.strictly_exceeds_level:
            p0 = float(asset_payoff.cdf(0.0) - asset_payoff.cdf_left(0.0))
            return FinitenessVerdict(
                p0 == 0.0, "utility case (i), u finite and u > alpha somewhere: P(S_T=0) = 0", p0
            )
        lo = float(asset_payoff.essinf())
        return FinitenessVerdict(
            lo > 0.0, "utility case (ii), u hits -inf or u <= alpha: essinf S_T > 0", lo
        )
    raise UnsupportedSpec(f"unknown acceptance variant {type(acc).__name__}")


# ---------------------------------------------------------------- counterexample

@dataclass(frozen=True)
class CounterexampleRecord:
    rho_x: float
    rho_y: float
    same_law: bool
    space: ScenarioSpace
    s0_bound: float = 1.0

    @property
    def holds(self) -> bool:
        """rho(X) > S0 >= rho(Y) for positions with equal laws."""
        return self.same_law and self.rho_x > self.s0_bound >= self.rho_y


def counterexample_space(gamma1, gamma2, lam, p) -> ScenarioSpace:
    """States A, B, C with probabilities p, p, 1-2p and X, Y, S_T on them."""
    st = np.array([gamma1, gamma2, gamma2], dtype=float)
    x = np.array([lam, 0.0, -gamma2])
    y = np.array([0.0, lam, -gamma2])
    return ScenarioSpace([p, p, 1.0 - 2.0 * p], {"X": x, "Y": y, "S_T": st})


def reproduce_counterexample(
    gamma1: float = 1.0,
    gamma2: float = 2.0,
    lam: float = -1.5,
    alpha: float = 0.1,
    p: float = 0.2,
    s0: float = 1.0,
    tol: float = 1e-8,
    cash: bool = False,
) -> CounterexampleRecord:
    """Two positions with the same law but different TVaR capital under a random payoff."""
    if not (0 < gamma1 < gamma2):
        raise BadParameters("need 0 < gamma1 < gamma2")
    if not (-gamma2 < lam < -gamma1):
        raise BadParameters("need -gamma2 < lambda < -gamma1")
    if not (0 < alpha < 1):
        raise BadParameters("need 0 < alpha < 1")
    if not (0 < p < 1 - alpha and p < 0.5):
        raise BadParameters("need 0 < p < min(1 - alpha, 1/2)")
    if not s0 > 0:
        raise BadParameters("need s0 > 0")
    space = counterexample_space(gamma1, gamma2, lam, p)
    asset = TradedAsset.cash() if cash else TradedAsset(s0, "S_T")
    acc = TVaRLevel(alpha)
    return CounterexampleRecord(
        rho_x=eval_risk(space, "X", asset, acc, tol),
        rho_y=eval_risk(space, "Y", asset, acc, tol),
        same_law=same_law(law_of(space, "X"), law_of(space, "Y"), 0.0),
        space=space,
        s0_bound=asset.price_s0,
    )

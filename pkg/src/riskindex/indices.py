"""Index of finiteness and index of qualitative robustness.

Nothing here takes an asset: for finite-valued rho_{A,S} both indices
depend on the acceptance set alone.

Analytic values come from the family formulas. The numeric estimators fit
power laws to the singular behaviour of a distortion's right derivative at
0+, or to the decay of a utility at -inf. The fit window slides further
into the asymptotic regime until the estimate stops moving.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DerivativeUnavailable, UnsupportedSpec
from .riskcore.specs import (
    AcceptanceSpec,
    BetaGamma,
    CappedLog,
    Distortion,
    DistortionFunction,
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
    TVaRDistortion,
    TVaRLevel,
    UtilityFloor,
    UtilitySpec,
)

RESIDUAL_LIMIT = 0.05
BOUNDED_RATIO_TOL = 0.01
SUPERPOLY_SLOPE_JUMP = 0.5
WINDOW_DECADES = 6
STABLE_INDEX_CHANGE = 1e-3


class Attained(str, enum.Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"


class Method(str, enum.Enum):
    ANALYTIC = "Analytic"
    NUMERIC_FIT = "NumericFit"


@dataclass(frozen=True)
class IndexReport:
    """An index value in the extended reals plus how it was obtained.

    ``kind`` is ``"finiteness"`` (values in [1, inf]) or ``"robustness"``
    (values in [0, 1]).
    """

    index: float
    attained: Attained
    method: Method
    diagnostics: dict = field(default_factory=dict)
    kind: str = "finiteness"

    def __post_init__(self):
        if self.kind == "finiteness" and not self.index >= 1.0:
            raise ValueError(f"index of finiteness must be >= 1, got {self.index!r}")
        if self.kind == "robustness" and not 0.0 <= self.index <= 1.0:
            raise ValueError(f"robustness index must lie in [0, 1], got {self.index!r}")
        if self.method is Method.ANALYTIC and "fit_residual" in self.diagnostics:
            raise ValueError("analytic reports carry no fit residual")

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.index)


def conjugate(p: float) -> float:
    """Hoelder conjugate p/(p-1), with 1 <-> inf."""
    if p < 1:
        raise ValueError(f"conjugate exponent needs p >= 1, got {p!r}")
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _analytic(index, attained, **diag) -> IndexReport:
    return IndexReport(float(index), Attained(attained), Method.ANALYTIC, dict(diag))


# ---------------------------------------------------------------- distortions

def _loglog_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least squares log y = s log x + c; returns (s, c, max abs residual)."""
    lx, ly = np.log(x), np.log(y)
    s, c = np.polyfit(lx, ly, 1)
    resid = float(np.max(np.abs(ly - (s * lx + c))))
    return float(s), float(c), resid


def _derivative(delta: DistortionFunction):
    if delta.has_derivative:
        return delta.right_derivative

    def central(lam):
        lam = np.asarray(lam, dtype=float)
        h = 1e-12 * lam
        return (np.asarray(delta(lam + h)) - np.asarray(delta(lam - h))) / (2.0 * h)

    return central


def estimate_distortion_index(delta: DistortionFunction, max_decade: Optional[int] = None) -> IndexReport:
    """Fit delta'_+(l) ~ l^(-beta) as l -> 0+; index = 1 / (1 - beta).

    The first window is l = 10^-3 .. 10^-9. It then slides three decades
    deeper at a time until the index moves by less than 1e-3.
    """
    deriv = _derivative(delta)
    if max_decade is None:
        max_decade = 300 if delta.has_derivative else 250
    start, prev, history = 3, None, []
    while True:
        ks = np.arange(start, start + WINDOW_DECADES + 1)
        lam = 10.0 ** (-ks.astype(float))
        with np.errstate(all="ignore"):
            dv = np.asarray(deriv(lam), dtype=float)
        if not np.all(np.isfinite(dv)) or np.any(dv <= 0):
            if prev is None:
                raise DerivativeUnavailable("right derivative is not positive and finite near 0")
            break
        ratios = dv[1:] / dv[:-1]
        bounded = bool(np.all(np.abs(ratios - 1.0) <= BOUNDED_RATIO_TOL))
        slope, _, resid = _loglog_fit(lam, dv)
        beta = min(max(-slope, 0.0), 1.0)
        index = math.inf if beta >= 1.0 else 1.0 / (1.0 - beta)
        current = dict(beta=beta, index=index, bounded=bounded, resid=resid,
                       grid=(float(lam[0]), float(lam[-1])))
        history.append(current)
        if bounded:
            break
        if prev is not None and abs(index - prev["index"]) < STABLE_INDEX_CHANGE:
            break
        if start + 3 + WINDOW_DECADES > max_decade:
            break
        prev, start = current, start + 3

    diag = dict(fitted_beta=current["beta"], fit_residual=current["resid"],
                grid=list(current["grid"]), windows=len(history))
    if current["bounded"]:
        return IndexReport(1.0, Attained.YES, Method.NUMERIC_FIT, diag)
    q = 1.0 / current["beta"] if current["beta"] > 0 else math.inf
    diag["q"] = q
    attained = Attained.UNKNOWN if current["resid"] > RESIDUAL_LIMIT else Attained.NO
    return IndexReport(max(1.0, current["index"]), attained, Method.NUMERIC_FIT, diag)


def _distortion_analytic(delta: DistortionFunction) -> IndexReport:
    if isinstance(delta, MaxVar):
        g = delta.gamma
        return _analytic(g, "No" if g > 1 else "Yes", family="MaxVar")
    if isinstance(delta, MinVar):
        return _analytic(1.0, "Yes", family="MinVar")
    if isinstance(delta, (MaxMinVar, MinMaxVar)):
        g = delta.gamma
        return _analytic(g, "No" if g > 1 else "Yes", family=type(delta).__name__)
    if isinstance(delta, BetaGamma):
        b = delta.beta
        return _analytic(b, "No" if b > 1 else "Yes", family="BetaGamma")
    if isinstance(delta, (LogDistortion, TVaRDistortion)):
        return _analytic(1.0, "Yes", family=type(delta).__name__)
    return estimate_distortion_index(delta)


# ---------------------------------------------------------------- utilities

def estimate_utility_decay(u: UtilitySpec, max_decade: int = 15) -> IndexReport:
    """Fit |u(-x)| ~ x^q as x -> inf on x = 10^1 .. 10^6, sliding outward."""
    fam = u.family
    diag: dict = {}
    if u.family.sup()[0] <= u.level_alpha:
        diag["reason"] = "sup u <= alpha"
        return IndexReport(math.inf, Attained.NO, Method.NUMERIC_FIT, diag)

    start, prev = 1, None
    while True:
        x = np.logspace(start, start + 5, 21)
        with np.errstate(all="ignore"):
            ux = np.asarray(fam(-x), dtype=float)
        finite = np.isfinite(ux)
        mag = np.abs(ux[finite])
        xs = x[finite]
        if xs.size >= 3 and np.all(mag > 0):
            local = np.diff(np.log(mag)) / np.diff(np.log(xs))
            if local[-1] - local[0] > SUPERPOLY_SLOPE_JUMP:
                diag.update(reason="superpolynomial decay", local_slopes=[local[0], local[-1]],
                            grid=[float(xs[0]), float(xs[-1])])
                return IndexReport(math.inf, Attained.NO, Method.NUMERIC_FIT, diag)
        if not np.all(finite):
            diag.update(reason="u(-x) = -inf on the probe grid", grid=[float(x[0]), float(x[-1])])
            return IndexReport(math.inf, Attained.NO, Method.NUMERIC_FIT, diag)
        slope, _, resid = _loglog_fit(x, np.abs(ux))
        current = dict(q=max(slope, 1.0), resid=resid, grid=[float(x[0]), float(x[-1])])
        if prev is not None and abs(current["q"] - prev["q"]) < STABLE_INDEX_CHANGE:
            break
        if start + 1 + 5 > max_decade:
            break
        prev, start = current, start + 1
    diag.update(fitted_exponent=current["q"], fit_residual=current["resid"], grid=current["grid"])
    return IndexReport(current["q"], Attained.UNKNOWN, Method.NUMERIC_FIT, diag)


def _utility_analytic(u: UtilitySpec) -> IndexReport:
    fam = u.family
    if fam.hits_minus_inf or not u.strictly_exceeds_level:
        return _analytic(math.inf, "No", reason="u attains -inf or u <= alpha everywhere")
    if isinstance(fam, FlatPower):
        return _analytic(fam.q, "Yes", family="FlatPower")
    if isinstance(fam, Exponential):
        return _analytic(math.inf, "No", family="Exponential")
    if isinstance(fam, NonHara):
        return _analytic(1.0, "Yes", family="NonHara")
    if isinstance(fam, CappedLog):
        return _analytic(math.inf, "No", family="CappedLog")
    return estimate_utility_decay(u)


# ---------------------------------------------------------------- densities

def density_moment_threshold(density) -> float:
    """sup{s : dQ/dP in L^s}."""
    if isinstance(density, QuantilePower):
        return float(density.r)
    if isinstance(density, EmpiricalDensity):
        return math.inf
    raise UnsupportedSpec(f"unknown density {type(density).__name__}")


def _density_analytic(density) -> IndexReport:
    q = density_moment_threshold(density)
    if math.isinf(q):
        return _analytic(1.0, "Yes", moment_threshold="inf")
    # Attained iff the density lies in L^q itself; for t^(-1/r) profiles it does not.
    return _analytic(conjugate(q), "No", moment_threshold=q)


def estimate_density_index(density) -> IndexReport:
    """Numeric route through the distortion a max-correlation measure induces."""
    return estimate_distortion_index(density.induced_distortion())


# ---------------------------------------------------------------- dispatch

def index_of_finiteness(acc: AcceptanceSpec) -> IndexReport:
    if isinstance(acc, (ExpectationFloor, TVaRLevel)):
        return _analytic(1.0, "Yes", family=type(acc).__name__)
    if isinstance(acc, UtilityFloor):
        return _utility_analytic(acc.utility)
    if isinstance(acc, Distortion):
        return _distortion_analytic(acc.delta)
    if isinstance(acc, MaxCorrelation):
        return _density_analytic(acc.density)
    raise UnsupportedSpec(f"unknown acceptance variant {type(acc).__name__}")


def robustness_from_finiteness(report: IndexReport) -> IndexReport:
    value = 0.0 if math.isinf(report.index) else 1.0 / report.index
    return IndexReport(value, report.attained, report.method, dict(report.diagnostics), kind="robustness")


def index_of_qualitative_robustness(acc: AcceptanceSpec) -> IndexReport:
    return robustness_from_finiteness(index_of_finiteness(acc))


def index_report_to_dict(r: IndexReport) -> dict:
    return {
        "index": r.index,
        "attained": r.attained.value,
        "method": r.method.value,
        "kind": r.kind,
        "diagnostics": r.diagnostics,
    }

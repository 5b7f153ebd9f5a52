"""Distances between finitely supported laws on the line.

Prohorov distance goes through Strassen's theorem: d_P <= eps iff some
coupling puts mass >= 1 - eps on pairs within distance eps. On the line,
with both supports sorted, each atom's admissible partners form a window
whose endpoints move monotonically, so the max-flow reduces to a single
greedy sweep (leftmost partner first).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import BadTolerance, InternalError
from .scenario import EmpiricalDistribution, psi_p_moment

LEVY_ITERATIONS = 60
PROHOROV_MAX_ITERATIONS = 200


class MetricMethod(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    BINARY_SEARCH_FLOW = "BinarySearchFlow"


@dataclass(frozen=True)
class MetricResult:
    value: float
    method: MetricMethod
    iterations: int

    def to_dict(self) -> dict:
        return {"value": self.value, "method": self.method.value, "iterations": self.iterations}


# ---------------------------------------------------------------- Levy

def _band_holds(a: EmpiricalDistribution, b: EmpiricalDistribution, h: float) -> bool:
    """G(x) <= F(x + h) + h for all x, with F the cdf of ``a`` and G of ``b``.

    G(x) - F(x + h) is a right-continuous step function whose jumps sit at
    atoms of ``b`` and at atoms of ``a`` shifted by -h, so checking those
    points is exhaustive.
    """
    xs = b.values
    f_at = np.searchsorted(a.values, xs + h, side="right")
    f_at = np.where(f_at > 0, a.cum[np.maximum(f_at - 1, 0)], 0.0)
    if np.any(b.cum - f_at > h + 1e-15):
        return False
    # Just before each shifted a-atom, F(x + h) has not jumped yet.
    ys = a.values - h
    g_idx = np.searchsorted(b.values, ys, side="left")
    g_left = np.where(g_idx > 0, b.cum[np.maximum(g_idx - 1, 0)], 0.0)
    f_left = np.concatenate([[0.0], a.cum[:-1]])
    return not np.any(g_left - f_left > h + 1e-15)


def _levy_feasible(d1, d2, h: float) -> bool:
    return _band_holds(d1, d2, h) and _band_holds(d2, d1, h)


def levy_distance(d1: EmpiricalDistribution, d2: EmpiricalDistribution) -> MetricResult:
    """inf{h : F(x-h) - h <= G(x) <= F(x+h) + h for all x}."""
    if _levy_feasible(d1, d2, 0.0):
        return MetricResult(0.0, MetricMethod.CLOSED_FORM, 0)
    lo, hi = 0.0, 1.0
    it = 0
    for it in range(1, LEVY_ITERATIONS + 1):
        mid = 0.5 * (lo + hi)
        if _levy_feasible(d1, d2, mid):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12:
            break
    return MetricResult(hi, MetricMethod.BINARY_SEARCH_FLOW, it)


# ---------------------------------------------------------------- Prohorov

def _windows(x: np.ndarray, y: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Index ranges [lo, hi) of y with abs(x - y) <= eps, per x.

    searchsorted on x -+ eps can be off by one at ties after rounding; the
    ranges are nudged until they agree with the symmetric edge test so both
    flow orientations see the same graph.
    """
    m = len(y)
    lo = np.searchsorted(y, x - eps, side="left")
    hi = np.searchsorted(y, x + eps, side="right")
    while True:
        grow = (lo > 0) & (np.abs(x - y[np.maximum(lo - 1, 0)]) <= eps)
        shrink = (lo < m) & ~grow & (np.abs(x - y[np.minimum(lo, m - 1)]) > eps) & (lo < hi)
        if not (grow.any() or shrink.any()):
            break
        lo = lo - grow + shrink
    while True:
        grow = (hi < m) & (np.abs(x - y[np.minimum(hi, m - 1)]) <= eps)
        shrink = (hi > lo) & ~grow & (np.abs(x - y[np.maximum(hi - 1, 0)]) > eps)
        if not (grow.any() or shrink.any()):
            break
        hi = hi + grow - shrink
    return lo, hi


def interval_max_flow(d1: EmpiricalDistribution, d2: EmpiricalDistribution, eps: float) -> float:
    """Largest coupling mass on pairs with |x - y| <= eps.

    Sources are atoms of ``d1`` and sinks atoms of ``d2``. Serving each
    source from the leftmost sink with spare capacity is optimal because
    windows only move right: a sink skipped by one source is useless to all
    later ones.
    """
    lo_idx, hi_idx = _windows(d1.values, d2.values, eps)
    # In cumulative sink-mass coordinates the sweep is a scalar recurrence:
    # P is the mass of sinks already used or skipped.
    cum_b = np.concatenate([[0.0], d2.cum])
    lows = cum_b[lo_idx].tolist()
    highs = cum_b[hi_idx].tolist()
    flow, pos = 0.0, 0.0
    for a_i, low, high in zip(d1.weights.tolist(), lows, highs):
        start = pos if pos > low else low
        served = high - start
        if served > a_i:
            served = a_i
        if served > 0.0:
            flow += served
            pos = start + served
    return flow


def _prohorov_feasible(d1, d2, eps: float) -> bool:
    # The coupling condition is symmetric, but both orientations are run so
    # an asymmetry in the sweep would surface as an internal error.
    f12 = interval_max_flow(d1, d2, eps)
    f21 = interval_max_flow(d2, d1, eps)
    if abs(f12 - f21) > 1e-9:
        raise InternalError(f"max-flow asymmetric at eps={eps}: {f12} vs {f21}")
    return min(f12, f21) >= 1.0 - eps - 1e-12


def prohorov_distance(d1: EmpiricalDistribution, d2: EmpiricalDistribution, tol: float = 1e-9) -> MetricResult:
    if not (tol > 0 and np.isfinite(tol)):
        raise BadTolerance(f"tolerance must be positive, got {tol!r}")
    if _prohorov_feasible(d1, d2, 0.0):
        return MetricResult(0.0, MetricMethod.CLOSED_FORM, 0)
    lo, hi = 0.0, 1.0
    it = 0
    while hi - lo > tol and it < PROHOROV_MAX_ITERATIONS:
        it += 1
        mid = 0.5 * (lo + hi)
        if _prohorov_feasible(d1, d2, mid):
            hi = mid
        else:
            lo = mid
    # Feasibility must be monotone in eps: the bracket ends must still disagree.
    if _prohorov_feasible(d1, d2, lo) or not _prohorov_feasible(d1, d2, hi):
        raise InternalError("Prohorov feasibility is not monotone in eps")
    return MetricResult(0.5 * (lo + hi), MetricMethod.BINARY_SEARCH_FLOW, it)


def perturbation_gap(d1: EmpiricalDistribution, d2: EmpiricalDistribution, p: float, tol: float = 1e-9) -> float:
    """d_P(mu, nu) + |E_mu psi_p - E_nu psi_p|."""
    dp = prohorov_distance(d1, d2, tol).value
    return dp + abs(psi_p_moment(d1, p) - psi_p_moment(d2, p))

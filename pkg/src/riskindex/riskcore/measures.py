"""Closed-form law-based risk measures on finitely supported laws."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from ..errors import BadDensity, BadLevel
from ..scenario import LEVEL_SNAP, EmpiricalDistribution
from .specs import DensitySpec, DistortionFunction, EmpiricalDensity, QuantilePower


def _level(alpha: float) -> float:
    if not (0.0 < alpha < 1.0):
        raise BadLevel(f"level must lie in (0, 1), got {alpha!r}")
    return float(alpha)


def var_alpha(d: EmpiricalDistribution, alpha: float) -> float:
    """VaR_alpha(X) = inf{m : P(X + m < 0) <= alpha} = -inf{x : F(x) > alpha}."""
    alpha = _level(alpha)
    i = int(np.searchsorted(d.cum, alpha + LEVEL_SNAP, side="right"))
    return -float(d.values[min(i, len(d) - 1)])


def tvar_alpha(d: EmpiricalDistribution, alpha: float) -> float:
    """Average of VaR_beta over beta in (0, alpha].

    VaR_beta is piecewise constant in beta, so the integral is a finite sum;
    the atom straddling level alpha contributes proportionally.
    """
    alpha = _level(alpha)
    upper = np.minimum(d.cum, alpha)
    lower = np.concatenate([[0.0], upper[:-1]])
    return -float(np.dot(d.values, upper - lower)) / alpha


def distortion_rho(d: EmpiricalDistribution, delta: DistortionFunction) -> float:
    """Choquet integral -sum x_i (delta(F_i) - delta(F_{i-1}))."""
    dv = np.asarray(delta(np.concatenate([[0.0], d.cum])), dtype=float)
    return -float(np.dot(d.values, np.diff(dv)))


def _check_density(density: DensitySpec) -> None:
    if not isinstance(density, (EmpiricalDensity, QuantilePower)):
        raise BadDensity(f"unsupported density {type(density).__name__}")


def max_correlation_rho(d: EmpiricalDistribution, density: DensitySpec) -> float:
    """sup E[-XY] over Y distributed as the density: the comonotone pairing.

    The largest density values meet the lowest outcomes. Integrating the
    decreasing rearrangement of the density over each quantile cell of X
    is exactly a distortion with delta(s) = integral_0^s q_D(1-u) du.
    """
    _check_density(density)
    return distortion_rho(d, density.induced_distortion())


def min_correlation(d: EmpiricalDistribution, density: DensitySpec) -> float:
    """inf E[ZY] over Z ~ d and Y distributed as the density (antimonotone pairing)."""
    _check_density(density)
    dv = np.asarray(density.induced_distortion()(np.concatenate([[0.0], d.cum])))
    return float(np.dot(d.values, np.diff(dv)))


def entropic_rho(d: EmpiricalDistribution, gamma: float, level: float = 0.0) -> float:
    """Capital for E[1 - exp(-gamma (X + m))] >= level with the cash asset."""
    if not level < 1.0:
        return math.inf
    lse = float(logsumexp(-gamma * d.values, b=d.weights))
    return (lse - math.log1p(-level)) / gamma

"""Dual side of TVaR and expectation acceptance sets on finite spaces.

A positive functional psi on R^n is psi(X) = sum psi_i X_i. For the TVaR
cone its barrier cone is the set of multiples of probability vectors q with
q_i <= p_i / alpha, on which the support function vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadLevel, BadParameters, DimensionMismatch, InternalError, NoConvergence, NonPositivePayoff
from .riskcore.specs import ExpectationFloor, TVaRLevel
from .scenario import ScenarioSpace, TradedAsset

MEMBERSHIP_TOL = 1e-10
DINKELBACH_CAP = 200


def _level(alpha: float) -> float:
    if not (0.0 < alpha < 1.0):
        raise BadLevel(f"level must lie in (0, 1), got {alpha!r}")
    return float(alpha)


def _functional(psi, space: ScenarioSpace) -> np.ndarray:
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (space.n_states,):
        raise DimensionMismatch(f"functional has shape {psi.shape}, space has {space.n_states} states")
    if np.any(psi < 0):
        raise BadParameters("functional must be nonnegative")
    return psi


def _in_tvar_cone(psi: np.ndarray, probs: np.ndarray, alpha: float) -> bool:
    c = psi.sum()
    if c == 0.0:
        return True
    return bool(np.all(psi / c <= probs / alpha + MEMBERSHIP_TOL))


def support_function(acc, psi, space: ScenarioSpace) -> float:
    """inf over the acceptance set of psi(A); -inf off the barrier cone."""
    psi = _functional(psi, space)
    if isinstance(acc, TVaRLevel):
        return 0.0 if _in_tvar_cone(psi, space.probs, acc.alpha) else -math.inf
    if isinstance(acc, ExpectationFloor):
        c = psi.sum()
        if np.all(np.abs(psi - c * space.probs) <= MEMBERSHIP_TOL):
            return acc.alpha * c
        return -math.inf
    raise BadParameters(f"support function available for TVaRLevel and ExpectationFloor, not {type(acc).__name__}")


@dataclass(frozen=True)
class DualSet:
    """Positive functionals pricing the asset correctly, inside the TVaR barrier cone."""

    space: ScenarioSpace
    payoff: np.ndarray
    s0: float
    alpha: float

    @classmethod
    def for_asset(cls, space: ScenarioSpace, asset: TradedAsset, alpha: float) -> "DualSet":
        return cls(space, asset.payoff_on(space), asset.price_s0, _level(alpha))

    def contains(self, psi) -> bool:
        psi = _functional(psi, self.space)
        if abs(float(psi @ self.payoff) - self.s0) > MEMBERSHIP_TOL * max(1.0, self.s0):
            return False
        return _in_tvar_cone(psi, self.space.probs, self.alpha)

    def from_probability(self, q) -> np.ndarray:
        """Scale a probability vector q so that psi(S_T) = S0."""
        q = np.asarray(q, dtype=float)
        return self.s0 / float(q @ self.payoff) * q


def greedy_density(scores, probs, alpha: float) -> np.ndarray:
    """argmax of sum q_i scores_i over probabilities with q_i <= p_i / alpha.

    Capacity p_i / alpha goes to the highest scores first until unit mass.
    """
    scores = np.asarray(scores, dtype=float)
    order = np.argsort(-scores, kind="stable")
    caps = np.asarray(probs, dtype=float)[order] / alpha
    before = np.concatenate([[0.0], np.cumsum(caps)[:-1]])
    take = np.clip(1.0 - before, 0.0, caps)
    q = np.empty_like(take)
    q[order] = take
    return q


def dual_eval_tvar_cash(space: ScenarioSpace, var_name: str, alpha: float) -> float:
    """max E_Q[-X] over Q with dQ/dP <= 1/alpha."""
    alpha = _level(alpha)
    x = space.var(var_name)
    q = greedy_density(-x, space.probs, alpha)
    return float(q @ -x)


def dual_eval_tvar_asset(
    space: ScenarioSpace,
    var_name: str,
    asset: TradedAsset,
    alpha: float,
    tol: float = 1e-9,
) -> float:
    """sup over Q with dQ/dP <= 1/alpha of S0 E_Q[-X] / E_Q[S_T], by Dinkelbach."""
    alpha = _level(alpha)
    if not (tol > 0 and math.isfinite(tol)):
        raise BadParameters(f"tolerance must be positive, got {tol!r}")
    x = space.var(var_name)
    s = asset.payoff_on(space)
    if np.any(s <= 0):
        raise NonPositivePayoff("payoff must be strictly positive in every state")
    s0 = asset.price_s0

    def ratio(q):
        return s0 * float(q @ -x) / float(q @ s)

    t = ratio(space.probs)
    for _ in range(DINKELBACH_CAP):
        q = greedy_density(-s0 * x - t * s, space.probs, alpha)
        t_new = ratio(q)
        if t_new < t - 1e-12 * max(1.0, abs(t)):
            raise InternalError(f"Dinkelbach iterate decreased: {t} -> {t_new}")
        if t_new - t < tol:
            return max(t, t_new)
        t = t_new
    raise NoConvergence(f"Dinkelbach did not settle within {DINKELBACH_CAP} iterations")

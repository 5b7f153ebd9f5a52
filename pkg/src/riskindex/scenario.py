"""Finite probability spaces and empirical laws on the real line.

Everything in here is immutable: arrays are copied on construction and
flagged read-only.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BadAsset,
    BadExponent,
    BadLevel,
    BadWeights,
    EmptyInput,
    NonFiniteValue,
    UnknownVariable,
)

WEIGHT_SUM_TOL = 1e-9
# Levels closer than this to a cumulative weight count as hitting it.
LEVEL_SNAP = 1e-12


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Weighted atoms on the real line, sorted and merged.

    Build instances through :func:`make_empirical` or
    :meth:`from_arrays`; the constructor trusts its input.
    """

    values: np.ndarray
    weights: np.ndarray
    cum: np.ndarray = field(repr=False)

    @classmethod
    def from_arrays(cls, values, weights=None) -> "EmpiricalDistribution":
        """Merge equal values exactly, sort, renormalise.

        ``weights`` defaults to uniform. The total must already be 1 within
        ``WEIGHT_SUM_TOL``.
        """
        v = np.asarray(values, dtype=float).ravel()
        if v.size == 0:
            raise EmptyInput("at least one atom is required")
        if not np.all(np.isfinite(v)):
            raise NonFiniteValue("atom values must be finite")
        if weights is None:
            w = np.full(v.size, 1.0 / v.size)
        else:
            w = np.asarray(weights, dtype=float).ravel()
            if w.shape != v.shape:
                raise BadWeights("values and weights differ in length")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise BadWeights("weights must be finite and strictly positive")
        total = math.fsum(w)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise BadWeights(f"weights sum to {total!r}, not 1")
        uniq, inv = np.unique(v, return_inverse=True)
        merged = np.bincount(inv.ravel(), weights=w, minlength=uniq.size)
        merged = merged / merged.sum()
        cum = np.cumsum(merged)
        cum[-1] = 1.0
        return cls(_frozen(uniq), _frozen(merged), _frozen(cum))

    @classmethod
    def point(cls, c: float) -> "EmpiricalDistribution":
        return cls.from_arrays([c])

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.weights.tolist()))

    def __len__(self) -> int:
        return int(self.values.size)

    def mean(self) -> float:
        return float(np.dot(self.values, self.weights))

    def shift(self, t: float) -> "EmpiricalDistribution":
        return EmpiricalDistribution.from_arrays(self.values + t, self.weights)

    def scale(self, c: float) -> "EmpiricalDistribution":
        return EmpiricalDistribution.from_arrays(self.values * c, self.weights)

    def negate(self) -> "EmpiricalDistribution":
        return self.scale(-1.0)

    def lp_norm(self, p: float) -> float:
        """Norm of the identity map in L^p of this law (p may be inf)."""
        a = np.abs(self.values)
        if math.isinf(p):
            return float(a.max())
        return float(np.dot(self.weights, a**p) ** (1.0 / p))


def make_empirical(points: Iterable[tuple[float, float]]) -> EmpiricalDistribution:
    pts = list(points)
    if not pts:
        raise EmptyInput("at least one (value, weight) pair is required")
    values = [float(v) for v, _ in pts]
    weights = [float(w) for _, w in pts]
    return EmpiricalDistribution.from_arrays(values, weights)


def cdf(d: EmpiricalDistribution, x: float) -> float:
    """Right-continuous distribution function P(X <= x)."""
    i = int(np.searchsorted(d.values, x, side="right"))
    return 0.0 if i == 0 else float(d.cum[i - 1])


def cdf_left(d: EmpiricalDistribution, x: float) -> float:
    """P(X < x)."""
    i = int(np.searchsorted(d.values, x, side="left"))
    return 0.0 if i == 0 else float(d.cum[i - 1])


def quantile(d: EmpiricalDistribution, t: float) -> float:
    """Lower quantile inf{x : F(x) >= t} for t in (0, 1]."""
    if not (0.0 < t <= 1.0):
        raise BadLevel(f"quantile level must lie in (0, 1], got {t!r}")
    i = int(np.searchsorted(d.cum, t - LEVEL_SNAP, side="left"))
    return float(d.values[min(i, len(d) - 1)])


def upper_quantile(d: EmpiricalDistribution, t: float) -> float:
    """Upper quantile inf{x : F(x) > t} for t in [0, 1)."""
    if not (0.0 <= t < 1.0):
        raise BadLevel(f"upper quantile level must lie in [0, 1), got {t!r}")
    i = int(np.searchsorted(d.cum, t + LEVEL_SNAP, side="right"))
    return float(d.values[min(i, len(d) - 1)])


def same_law(d1: EmpiricalDistribution, d2: EmpiricalDistribution, tol: float = 0.0) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if len(d1) != len(d2):
        return False
    return bool(
        np.all(np.abs(d1.values - d2.values) <= tol)
        and np.all(np.abs(d1.weights - d2.weights) <= tol)
    )


def psi_p_moment(d: EmpiricalDistribution, p: float) -> float:
    """Integral of |x|^p / p against the law."""
    if not p >= 1:
        raise BadExponent(f"exponent must be >= 1, got {p!r}")
    return float(np.dot(d.weights, np.abs(d.values) ** p) / p)


@dataclass(frozen=True)
class ScenarioSpace:
    """Finitely many states with strictly positive probabilities."""

    probs: np.ndarray
    vars: Mapping[str, np.ndarray]

    def __init__(self, probs: Sequence[float], vars: Mapping[str, Sequence[float]]):
        p = np.asarray(probs, dtype=float).ravel()
        if p.size == 0:
            raise EmptyInput("a scenario space needs at least one state")
        if not np.all(np.isfinite(p)) or np.any(p <= 0):
            raise BadWeights("state probabilities must be strictly positive")
        total = math.fsum(p)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise BadWeights(f"state probabilities sum to {total!r}, not 1")
        columns = {}
        for name, col in vars.items():
            c = np.asarray(col, dtype=float).ravel()
            if c.shape != p.shape:
                raise BadWeights(
                    f"variable {name!r} has {c.size} entries for {p.size} states"
                )
            if not np.all(np.isfinite(c)):
                raise NonFiniteValue(f"variable {name!r} has non-finite entries")
            columns[name] = _frozen(c)
        object.__setattr__(self, "probs", _frozen(p / p.sum()))
        object.__setattr__(self, "vars", dict(columns))

    @property
    def n_states(self) -> int:
        return int(self.probs.size)

    def var(self, name: str) -> np.ndarray:
        try:
            return self.vars[name]
        except KeyError:
            raise UnknownVariable(f"no variable named {name!r}") from None

    def with_var(self, name: str, values) -> "ScenarioSpace":
        cols = dict(self.vars)
        cols[name] = values
        return ScenarioSpace(self.probs, cols)

    def expectation(self, values) -> float:
        return float(np.dot(self.probs, values))


def law_of(space: ScenarioSpace, var_name: str) -> EmpiricalDistribution:
    return EmpiricalDistribution.from_arrays(space.var(var_name), space.probs)


@dataclass(frozen=True)
class TradedAsset:
    """An eligible asset with price ``price_s0`` and terminal payoff.

    ``payoff`` names a variable of a scenario space, is a nonnegative
    constant (``1.0`` with price 1 is the cash asset), or is a
    :class:`~riskindex.distributions.DistributionSpec` for parametric checks.
    """

    price_s0: float
    payoff: object

    def __post_init__(self):
        if not (math.isfinite(self.price_s0) and self.price_s0 > 0):
            raise BadAsset(f"asset price must be positive, got {self.price_s0!r}")
        if isinstance(self.payoff, (int, float)) and not isinstance(self.payoff, bool):
            if not (math.isfinite(self.payoff) and self.payoff > 0):
                raise BadAsset("a constant payoff must be positive")

    @classmethod
    def cash(cls) -> "TradedAsset":
        return cls(1.0, 1.0)

    def payoff_on(self, space: ScenarioSpace) -> np.ndarray:
        """Payoff vector on ``space``; validates sign and non-degeneracy."""
        if isinstance(self.payoff, str):
            s = space.var(self.payoff)
        elif isinstance(self.payoff, (int, float)):
            s = np.full(space.n_states, float(self.payoff))
        else:
            raise BadAsset("a parametric payoff cannot be evaluated on a scenario space")
        if np.any(s < 0):
            raise BadAsset("asset payoff is negative in some state")
        if not np.any(s > 0):
            raise BadAsset("asset payoff is zero in every state")
        return s


def read_scenario_csv(path: str | Path) -> ScenarioSpace:
    """Load a scenario file: header row, first column ``prob``."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise EmptyInput(f"{path}: empty scenario file")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "prob":
        raise BadWeights(f"{path}: first column must be 'prob'")
    try:
        data = np.array([[float(c) for c in r] for r in rows[1:]], dtype=float)
    except ValueError as exc:
        raise NonFiniteValue(f"{path}: non-numeric entry ({exc})") from None
    if data.size == 0:
        raise EmptyInput(f"{path}: no scenario rows")
    if data.shape[1] != len(header):
        raise BadWeights(f"{path}: ragged rows")
    return ScenarioSpace(data[:, 0], {h: data[:, k] for k, h in enumerate(header) if k})


def write_scenario_csv(space: ScenarioSpace, path: str | Path) -> None:
    names = list(space.vars)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["prob", *names])
        for i in range(space.n_states):
            w.writerow([repr(float(space.probs[i]))] + [repr(float(space.vars[n][i])) for n in names])


def read_sample_csv(path: str | Path) -> EmpiricalDistribution:
    """One value per row, optional non-numeric header; uniform weights."""
    values = []
    with open(path, newline="") as fh:
        for k, row in enumerate(csv.reader(fh)):
            if not row or not row[0].strip():
                continue
            try:
                values.append(float(row[0]))
            except ValueError:
                if k == 0:
                    continue
                raise NonFiniteValue(f"{path}: non-numeric entry {row[0]!r}") from None
    return EmpiricalDistribution.from_arrays(values)

"""Parametric laws used as data-generating processes and asset payoffs.

Sampling is inverse-CDF on uniforms drawn from a Philox stream, a
counter-based generator: draw ``i`` of ``sample(spec, n, seed)`` depends
only on ``seed`` and ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy import integrate, special

from .errors import BadCount, BadEpsilon, InvalidSpec, UnsupportedSpec
from .scenario import EmpiricalDistribution, cdf as _emp_cdf, cdf_left as _emp_cdf_left

Seed = Union[int, Sequence[int]]


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidSpec(msg)


class DistributionSpec:
    """Common interface. ``cdf`` is right-continuous; ``ppf`` is the lower quantile."""

    discrete = False

    def cdf(self, x):
        raise NotImplementedError

    def cdf_left(self, x):
        return self.cdf(x)

    def ppf(self, u):
        raise NotImplementedError

    def essinf(self) -> float:
        raise NotImplementedError

    def esssup(self) -> float:
        raise NotImplementedError

    def mean(self) -> float:
        lo, hi = self.essinf(), self.esssup()
        if math.isfinite(lo) and math.isfinite(hi):
            val, _ = integrate.quad(lambda t: float(self.ppf(t)), 0.0, 1.0, limit=200)
            return val
        raise UnsupportedSpec(f"no mean available for {type(self).__name__}")

    def to_empirical(self) -> EmpiricalDistribution:
        raise UnsupportedSpec(f"{type(self).__name__} is not finitely supported")


@dataclass(frozen=True)
class PointMass(DistributionSpec):
    c: float
    discrete = True

    def __post_init__(self):
        _require(math.isfinite(self.c), "point mass location must be finite")

    def cdf(self, x):
        return np.where(np.asarray(x, dtype=float) >= self.c, 1.0, 0.0)

    def cdf_left(self, x):
        return np.where(np.asarray(x, dtype=float) > self.c, 1.0, 0.0)

    def ppf(self, u):
        return np.full(np.shape(u), self.c, dtype=float)

    def essinf(self):
        return self.c

    def esssup(self):
        return self.c

    def mean(self):
        return self.c

    def to_empirical(self):
        return EmpiricalDistribution.point(self.c)


@dataclass(frozen=True)
class FiniteDiscrete(DistributionSpec):
    law: EmpiricalDistribution
    discrete = True

    def cdf(self, x):
        return np.vectorize(lambda v: _emp_cdf(self.law, v), otypes=[float])(x)

    def cdf_left(self, x):
        return np.vectorize(lambda v: _emp_cdf_left(self.law, v), otypes=[float])(x)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self.law.cum, u - 1e-12, side="left")
        return self.law.values[np.minimum(idx, len(self.law) - 1)]

    def essinf(self):
        return float(self.law.values[0])

    def esssup(self):
        return float(self.law.values[-1])

    def mean(self):
        return self.law.mean()

    def to_empirical(self):
        return self.law


@dataclass(frozen=True)
class Normal(DistributionSpec):
    mean_: float
    sd: float

    def __init__(self, mean: float, sd: float):
        object.__setattr__(self, "mean_", float(mean))
        object.__setattr__(self, "sd", float(sd))
        _require(math.isfinite(self.mean_), "normal mean must be finite")
        _require(self.sd > 0, "normal sd must be positive")

    def cdf(self, x):
        return special.ndtr((np.asarray(x, dtype=float) - self.mean_) / self.sd)

    def ppf(self, u):
        return self.mean_ + self.sd * special.ndtri(np.asarray(u, dtype=float))

    def essinf(self):
        return -math.inf

    def esssup(self):
        return math.inf

    def mean(self):
        return self.mean_


@dataclass(frozen=True)
class LogNormal(DistributionSpec):
    mean_log: float
    sd_log: float

    def __post_init__(self):
        _require(math.isfinite(self.mean_log), "mean_log must be finite")
        _require(self.sd_log > 0, "sd_log must be positive")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (np.log(np.where(x > 0, x, 1.0)) - self.mean_log) / self.sd_log
        return np.where(x > 0, special.ndtr(z), 0.0)

    def ppf(self, u):
        return np.exp(self.mean_log + self.sd_log * special.ndtri(np.asarray(u, dtype=float)))

    def essinf(self):
        return 0.0

    def esssup(self):
        return math.inf

    def mean(self):
        return math.exp(self.mean_log + 0.5 * self.sd_log**2)


@dataclass(frozen=True)
class ParetoTail(DistributionSpec):
    """``scale * U**(-1/a)``; the lower variant is its mirror image."""

    scale: float
    tail_index: float
    sign: str = "upper"

    def __post_init__(self):
        _require(self.scale > 0, "Pareto scale must be positive")
        _require(self.tail_index > 0, "Pareto tail index must be positive")
        _require(self.sign in ("upper", "lower"), "Pareto sign must be 'upper' or 'lower'")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        a, s = self.tail_index, self.scale
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.sign == "upper":
                return np.where(x >= s, 1.0 - (s / np.where(x >= s, x, s)) ** a, 0.0)
            return np.where(x <= -s, (s / np.where(x <= -s, -x, s)) ** a, 1.0)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        a, s = self.tail_index, self.scale
        if self.sign == "upper":
            return s * (1.0 - u) ** (-1.0 / a)
        return -s * u ** (-1.0 / a)

    def essinf(self):
        return self.scale if self.sign == "upper" else -math.inf

    def esssup(self):
        return math.inf if self.sign == "upper" else -self.scale

    def mean(self):
        a, s = self.tail_index, self.scale
        m = s * a / (a - 1.0) if a > 1 else math.inf
        return m if self.sign == "upper" else -m


@dataclass(frozen=True)
class Mixture(DistributionSpec):
    components: tuple[tuple[float, DistributionSpec], ...]

    def __init__(self, components):
        comps = tuple((float(w), s) for w, s in components)
        object.__setattr__(self, "components", comps)
        _require(len(comps) > 0, "a mixture needs at least one component")
        _require(all(w >= 0 for w, _ in comps), "mixture weights must be nonnegative")
        _require(abs(math.fsum(w for w, _ in comps) - 1.0) <= 1e-12,
                 "mixture weights must sum to 1")

    @property
    def discrete(self):
        return all(s.discrete for w, s in self.components if w > 0)

    def _live(self):
        return [(w, s) for w, s in self.components if w > 0]

    def cdf(self, x):
        return sum(w * s.cdf(x) for w, s in self._live())

    def cdf_left(self, x):
        return sum(w * s.cdf_left(x) for w, s in self._live())

    def ppf(self, u):
        # Bracket by the component quantiles, then bisect on F(x) >= u.
        u = np.atleast_1d(np.asarray(u, dtype=float))
        qs = np.array([s.ppf(u) for _, s in self._live()])
        lo, hi = qs.min(axis=0), qs.max(axis=0)
        for _ in range(200):
            if np.all(hi - lo <= 1e-15 * np.maximum(1.0, np.abs(hi))):
                break
            mid = 0.5 * (lo + hi)
            ok = self.cdf(mid) >= u
            hi = np.where(ok, mid, hi)
            lo = np.where(ok, lo, mid)
        return hi

    def essinf(self):
        return min(s.essinf() for _, s in self._live())

    def esssup(self):
        return max(s.esssup() for _, s in self._live())

    def mean(self):
        return math.fsum(w * s.mean() for w, s in self._live())

    def to_empirical(self):
        vals, wts = [], []
        for w, s in self._live():
            e = s.to_empirical()
            vals.append(e.values)
            wts.append(w * e.weights)
        return EmpiricalDistribution.from_arrays(np.concatenate(vals), np.concatenate(wts))

    def _draw(self, u: np.ndarray) -> np.ndarray:
        live = self._live()
        edges = np.cumsum([w for w, _ in live])
        edges[-1] = 1.0
        k = np.minimum(np.searchsorted(edges, u, side="right"), len(live) - 1)
        out = np.empty_like(u)
        start = 0.0
        for j, (w, s) in enumerate(live):
            sel = k == j
            if np.any(sel):
                v = np.clip((u[sel] - start) / w, _U_MIN, 1.0 - _U_MIN)
                out[sel] = _draw(s, v)
            start = edges[j]
        return out


@dataclass(frozen=True)
class Truncated(DistributionSpec):
    inner: DistributionSpec
    low: float
    high: float

    def __post_init__(self):
        _require(self.low < self.high, "truncation needs low < high")
        _require(self._mass() > 0, "truncation window carries no mass")

    @property
    def discrete(self):
        return self.inner.discrete

    def _mass(self) -> float:
        return float(self.inner.cdf(self.high) - self.inner.cdf_left(self.low))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        base = self.inner.cdf_left(self.low)
        val = (self.inner.cdf(np.minimum(x, self.high)) - base) / self._mass()
        return np.where(x < self.low, 0.0, np.clip(val, 0.0, 1.0))

    def cdf_left(self, x):
        x = np.asarray(x, dtype=float)
        base = self.inner.cdf_left(self.low)
        val = (self.inner.cdf_left(np.minimum(x, self.high)) - base) / self._mass()
        return np.where(x <= self.low, 0.0, np.where(x > self.high, 1.0, np.clip(val, 0.0, 1.0)))

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        base = self.inner.cdf_left(self.low)
        return np.clip(self.inner.ppf(base + u * self._mass()), self.low, self.high)

    def essinf(self):
        return max(self.low, self.inner.essinf())

    def esssup(self):
        return min(self.high, self.inner.esssup())

    def to_empirical(self):
        e = self.inner.to_empirical()
        keep = (e.values >= self.low) & (e.values <= self.high)
        w = e.weights[keep]
        return EmpiricalDistribution.from_arrays(e.values[keep], w / w.sum())


# ---------------------------------------------------------------- sampling

_U_MIN = 2.0**-54


def _uniforms(n: int, seed: Seed) -> np.ndarray:
    words = [int(seed)] if np.ndim(seed) == 0 else [int(s) for s in seed]
    if any(w < 0 for w in words):
        raise BadCount("seed words must be nonnegative")
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))
    # random() returns k / 2**53; the half-step offset keeps draws in (0, 1).
    return gen.random(n) + _U_MIN


def _draw(spec: DistributionSpec, u: np.ndarray) -> np.ndarray:
    if isinstance(spec, Mixture):
        return spec._draw(u)
    return np.asarray(spec.ppf(u), dtype=float)


def sample_values(spec: DistributionSpec, n: int, seed: Seed) -> np.ndarray:
    """The ``n`` raw draws, unsorted, in draw-index order."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise BadCount(f"sample size must be a positive integer, got {n!r}")
    return _draw(spec, _uniforms(int(n), seed))


def sample(spec: DistributionSpec, n: int, seed: Seed) -> EmpiricalDistribution:
    """Empirical law of ``n`` i.i.d. draws from ``spec``."""
    return EmpiricalDistribution.from_arrays(sample_values(spec, n, seed))


def contaminate(base: DistributionSpec, eps: float, contaminant: DistributionSpec) -> DistributionSpec:
    if not (0.0 <= eps < 1.0):
        raise BadEpsilon(f"contamination level must lie in [0, 1), got {eps!r}")
    if eps == 0.0:
        return base
    return Mixture([(1.0 - eps, base), (eps, contaminant)])


# ---------------------------------------------------------------- JSON

def spec_to_dict(spec: DistributionSpec) -> dict:
    if isinstance(spec, PointMass):
        return {"type": "PointMass", "c": spec.c}
    if isinstance(spec, FiniteDiscrete):
        return {"type": "FiniteDiscrete", "atoms": [[v, w] for v, w in spec.law.atoms]}
    if isinstance(spec, Normal):
        return {"type": "Normal", "mean": spec.mean_, "sd": spec.sd}
    if isinstance(spec, LogNormal):
        return {"type": "LogNormal", "mean_log": spec.mean_log, "sd_log": spec.sd_log}
    if isinstance(spec, ParetoTail):
        return {"type": "ParetoTail", "scale": spec.scale, "tail_index": spec.tail_index,
                "sign": spec.sign}
    if isinstance(spec, Mixture):
        return {"type": "Mixture",
                "components": [{"weight": w, "spec": spec_to_dict(s)} for w, s in spec.components]}
    if isinstance(spec, Truncated):
        return {"type": "Truncated", "inner": spec_to_dict(spec.inner),
                "low": spec.low, "high": spec.high}
    raise UnsupportedSpec(f"cannot serialise {type(spec).__name__}")


def spec_from_dict(obj: dict) -> DistributionSpec:
    try:
        kind = obj["type"]
        if kind == "PointMass":
            return PointMass(float(obj["c"]))
        if kind == "FiniteDiscrete":
            from .scenario import make_empirical
            return FiniteDiscrete(make_empirical((float(v), float(w)) for v, w in obj["atoms"]))
        if kind == "Normal":
            return Normal(float(obj["mean"]), float(obj["sd"]))
        if kind == "LogNormal":
            return LogNormal(float(obj["mean_log"]), float(obj["sd_log"]))
        if kind == "ParetoTail":
            return ParetoTail(float(obj["scale"]), float(obj["tail_index"]), obj.get("sign", "upper"))
        if kind == "Mixture":
            return Mixture([(float(c["weight"]), spec_from_dict(c["spec"])) for c in obj["components"]])
        if kind == "Truncated":
            return Truncated(spec_from_dict(obj["inner"]), float(obj["low"]), float(obj["high"]))
    except (KeyError, TypeError) as exc:
        raise InvalidSpec(f"malformed distribution spec: {exc}") from None
    raise InvalidSpec(f"unknown distribution type {obj.get('type')!r}")

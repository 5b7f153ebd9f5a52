"""Acceptance-set families and the ingredients they are built from.

Utilities and distortions are validated for shape when constructed:
monotone and concave on a finite grid. Black-box callables can only be
checked there, not everywhere.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from ..errors import BadDensity, BadLevel, InvalidSpec, UnsupportedSpec
from ..scenario import EmpiricalDistribution, ScenarioSpace

UTILITY_GRID = np.sinh(np.linspace(-np.arcsinh(50.0), np.arcsinh(50.0), 64))
DISTORTION_GRID = np.linspace(0.0, 1.0, 1024)
UTILITY_TOP = 1e9


def _check_monotone_concave(x: np.ndarray, y: np.ndarray, what: str) -> None:
    finite = np.isfinite(y)
    if np.any(np.isnan(y)) or np.any(y == np.inf):
        raise InvalidSpec(f"{what} returned NaN or +inf on the test grid")
    if not np.all(finite):
        # -inf is allowed only on a left half-line.
        first = int(np.argmax(finite))
        if not finite.any() or not np.all(finite[first:]):
            raise InvalidSpec(f"{what} must be finite to the right of its -inf region")
        x, y = x[first:], y[first:]
    dy = np.diff(y)
    scale = 1e-9 * (1.0 + np.abs(y[:-1]))
    if np.any(dy < -scale):
        raise InvalidSpec(f"{what} is not increasing on the test grid")
    slopes = dy / np.diff(x)
    if np.any(np.diff(slopes) > 1e-7 * (1.0 + np.abs(slopes[:-1]))):
        raise InvalidSpec(f"{what} is not concave on the test grid")


# ---------------------------------------------------------------- utilities

class UtilityFamily:
    """An increasing, concave, bounded-above u: R -> R u {-inf}."""

    analytic = True
    hits_minus_inf = False

    def __call__(self, x):
        raise NotImplementedError

    def sup(self) -> tuple[float, bool]:
        """(sup u, whether it is attained)."""
        raise NotImplementedError


@dataclass(frozen=True)
class Exponential(UtilityFamily):
    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise InvalidSpec("exponential utility needs gamma > 0")

    def __call__(self, x):
        with np.errstate(over="ignore"):
            return -np.expm1(-self.gamma * np.asarray(x, dtype=float))

    def sup(self):
        return 1.0, False


@dataclass(frozen=True)
class FlatPower(UtilityFamily):
    q: float

    def __post_init__(self):
        if not self.q >= 1:
            raise InvalidSpec("flat power utility needs q >= 1")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            return np.where(x < 0, -np.abs(np.minimum(x, 0.0)) ** self.q, 0.0)

    def sup(self):
        return 0.0, True


@dataclass(frozen=True)
class CappedLog(UtilityFamily):
    c: float
    hits_minus_inf = True

    def __post_init__(self):
        if not self.c > 0:
            raise InvalidSpec("capped log utility needs c > 0")

    @property
    def cap(self) -> float:
        return math.log1p(self.c)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            mid = np.log1p(np.clip(x, 0.0, self.c))
        return np.where(x < 0, -np.inf, np.where(x >= self.c, self.cap, mid))

    def sup(self):
        return self.cap, True


@dataclass(frozen=True)
class NonHara(UtilityFamily):
    a: float
    c: float = 0.0

    def __post_init__(self):
        if not self.a > 0 or not self.c >= 0:
            raise InvalidSpec("non-HARA utility needs a > 0 and c >= 0")

    def _raw(self, x):
        a = self.a
        return (1.0 + a * x - np.hypot(1.0, a * x)) / a

    @property
    def cap(self) -> float:
        return float(self._raw(self.c))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= self.c, self.cap, self._raw(np.minimum(x, self.c)))

    def sup(self):
        return self.cap, True


@dataclass(frozen=True)
class CustomUtility(UtilityFamily):
    """User-supplied scalar evaluator; analysed numerically only."""

    evaluator: Callable[[float], float]
    name: str = "custom"
    analytic = False

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = np.array([float(self.evaluator(float(v))) for v in x.ravel()])
        return out.reshape(x.shape)

    @property
    def hits_minus_inf(self) -> bool:
        probe = -np.logspace(0, 9, 37)
        return bool(np.any(self(probe) == -np.inf))

    def sup(self):
        top = float(self(np.array([UTILITY_TOP]))[0])
        below = float(self(np.array([UTILITY_TOP / 2]))[0])
        return top, top == below


@dataclass(frozen=True)
class UtilitySpec:
    """A utility family together with the acceptance level alpha."""

    family: UtilityFamily
    level_alpha: float = 0.0

    def __post_init__(self):
        u = self.family
        if not math.isfinite(self.level_alpha):
            raise InvalidSpec("utility level must be finite")
        _check_monotone_concave(UTILITY_GRID, u(UTILITY_GRID), "utility")
        top = float(u(np.array([UTILITY_TOP]))[0])
        if not math.isfinite(top):
            raise InvalidSpec("utility must be bounded above (u(1e9) finite)")
        s, attained = u.sup()
        if not (self.level_alpha < s or (attained and self.level_alpha <= s)):
            raise InvalidSpec(
                f"acceptance set is empty: u never reaches level {self.level_alpha!r}"
            )

    def __call__(self, x):
        return self.family(x)

    @property
    def strictly_exceeds_level(self) -> bool:
        """Whether u(x) > alpha for some x."""
        return self.level_alpha < self.family.sup()[0]


# ---------------------------------------------------------------- distortions

class DistortionFunction:
    """Concave increasing delta on [0, 1] with delta(0)=0, delta(1)=1."""

    analytic = True

    def __call__(self, x):
        raise NotImplementedError

    def right_derivative(self, x):
        raise NotImplementedError

    @property
    def has_derivative(self) -> bool:
        return True

    def validate(self) -> None:
        y = np.asarray(self(DISTORTION_GRID), dtype=float)
        if abs(y[0]) > 1e-12 or abs(y[-1] - 1.0) > 1e-12:
            raise InvalidSpec("a distortion must satisfy delta(0)=0 and delta(1)=1")
        if np.any(np.diff(y) < -1e-12):
            raise InvalidSpec("distortion is not increasing on the test grid")
        if np.any(np.diff(y, 2) > 1e-12):
            raise InvalidSpec("distortion is not concave on the test grid")


def _checked(cls):
    """Run ``validate`` after the dataclass constructor finishes."""
    init = cls.__init__

    @functools.wraps(init)
    def checked_init(self, *args, **kwargs):
        init(self, *args, **kwargs)
        if type(self) is cls:
            self.validate()

    cls.__init__ = checked_init
    return cls


def _gamma_ok(g, name="gamma"):
    if not g >= 1:
        raise InvalidSpec(f"{name} must be >= 1")


@_checked
@dataclass(frozen=True)
class MaxVar(DistortionFunction):
    gamma: float

    def __post_init__(self):
        _gamma_ok(self.gamma)

    def __call__(self, x):
        return np.asarray(x, dtype=float) ** (1.0 / self.gamma)

    def right_derivative(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return x ** (1.0 / self.gamma - 1.0) / self.gamma


@_checked
@dataclass(frozen=True)
class MinVar(DistortionFunction):
    gamma: float

    def __post_init__(self):
        _gamma_ok(self.gamma)

    def __call__(self, x):
        with np.errstate(divide="ignore"):
            return -np.expm1(self.gamma * np.log1p(-np.asarray(x, dtype=float)))

    def right_derivative(self, x):
        return self.gamma * (1.0 - np.asarray(x, dtype=float)) ** (self.gamma - 1.0)


@_checked
@dataclass(frozen=True)
class MaxMinVar(DistortionFunction):
    """(1 - (1-x)^g)^(1/g)."""

    gamma: float

    def __post_init__(self):
        _gamma_ok(self.gamma)

    def __call__(self, x):
        with np.errstate(divide="ignore"):
            inner = -np.expm1(self.gamma * np.log1p(-np.asarray(x, dtype=float)))
        return inner ** (1.0 / self.gamma)

    def right_derivative(self, x):
        x = np.asarray(x, dtype=float)
        g = self.gamma
        with np.errstate(divide="ignore"):
            inner = -np.expm1(g * np.log1p(-x))
            return inner ** (1.0 / g - 1.0) * (1.0 - x) ** (g - 1.0)


@_checked
@dataclass(frozen=True)
class BetaGamma(DistortionFunction):
    """1 - (1 - x^(1/beta))^gamma: power-beta behaviour at 0, smooth at 1.

    ``MinMaxVar(g)`` is the case beta = gamma = g.
    """

    beta: float
    gamma: float

    def __post_init__(self):
        _gamma_ok(self.beta, "beta")
        _gamma_ok(self.gamma)

    def __call__(self, x):
        root = np.asarray(x, dtype=float) ** (1.0 / self.beta)
        with np.errstate(divide="ignore"):
            return -np.expm1(self.gamma * np.log1p(-root))

    def right_derivative(self, x):
        x = np.asarray(x, dtype=float)
        b, g = self.beta, self.gamma
        with np.errstate(divide="ignore"):
            root = x ** (1.0 / b)
            return (g / b) * (1.0 - root) ** (g - 1.0) * x ** (1.0 / b - 1.0)


@_checked
@dataclass(frozen=True)
class MinMaxVar(DistortionFunction):
    """1 - (1 - x^(1/g))^g."""

    gamma: float

    def __post_init__(self):
        _gamma_ok(self.gamma)

    def __call__(self, x):
        root = np.asarray(x, dtype=float) ** (1.0 / self.gamma)
        with np.errstate(divide="ignore"):
            return -np.expm1(self.gamma * np.log1p(-root))

    def right_derivative(self, x):
        x = np.asarray(x, dtype=float)
        g = self.gamma
        with np.errstate(divide="ignore"):
            return (1.0 - x ** (1.0 / g)) ** (g - 1.0) * x ** (1.0 / g - 1.0)


@_checked
@dataclass(frozen=True)
class LogDistortion(DistortionFunction):
    def __call__(self, x):
        return np.log1p(np.asarray(x, dtype=float)) / math.log(2.0)

    def right_derivative(self, x):
        return 1.0 / (math.log(2.0) * (1.0 + np.asarray(x, dtype=float)))


@_checked
@dataclass(frozen=True)
class TVaRDistortion(DistortionFunction):
    """min(x / alpha, 1): the distortion behind Tail Value-at-Risk."""

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise BadLevel("TVaR level must lie in (0, 1)")

    def __call__(self, x):
        return np.minimum(np.asarray(x, dtype=float) / self.alpha, 1.0)

    def right_derivative(self, x):
        return np.where(np.asarray(x, dtype=float) < self.alpha, 1.0 / self.alpha, 0.0)


@_checked
@dataclass(frozen=True)
class CustomDistortion(DistortionFunction):
    fn: Callable
    derivative: Optional[Callable] = None
    name: str = "custom"
    analytic = False

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.array([float(self.fn(float(v))) for v in x.ravel()])
        return out.reshape(x.shape)

    @property
    def has_derivative(self) -> bool:
        return self.derivative is not None

    def right_derivative(self, x):
        if self.derivative is None:
            from ..errors import DerivativeUnavailable
            raise DerivativeUnavailable("no right derivative supplied")
        x = np.asarray(x, dtype=float)
        out = np.array([float(self.derivative(float(v))) for v in x.ravel()])
        return out.reshape(x.shape)


# ---------------------------------------------------------------- densities

class DensitySpec:
    """Law of a Radon-Nikodym density dQ/dP (nonnegative, unit mean)."""

    def induced_distortion(self) -> DistortionFunction:
        raise NotImplementedError

    def norm(self, p: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class EmpiricalDensity(DensitySpec):
    law: EmpiricalDistribution

    def __post_init__(self):
        if self.law.values[0] < 0:
            raise BadDensity("density values must be nonnegative")
        if abs(self.law.mean() - 1.0) > 1e-10:
            raise BadDensity(f"density must have unit mean, got {self.law.mean()!r}")

    @classmethod
    def from_space(cls, space: ScenarioSpace, values) -> "EmpiricalDensity":
        v = np.asarray(values, dtype=float)
        if v.shape != space.probs.shape:
            raise BadDensity("density vector length differs from the number of states")
        return cls(EmpiricalDistribution.from_arrays(v, space.probs))

    @classmethod
    def from_values(cls, values, probs=None) -> "EmpiricalDensity":
        return cls(EmpiricalDistribution.from_arrays(values, probs))

    def induced_distortion(self):
        return _EmpiricalDensityDistortion(self.law)

    def norm(self, p):
        return self.law.lp_norm(p)


@dataclass(frozen=True)
class QuantilePower(DensitySpec):
    """Density whose decreasing rearrangement is c_r t^(-1/r), c_r = (r-1)/r."""

    r: float

    def __post_init__(self):
        if not self.r > 1:
            raise BadDensity("quantile-power density needs r > 1")

    @property
    def c_r(self) -> float:
        return (self.r - 1.0) / self.r

    def decreasing_profile(self, t):
        return self.c_r * np.asarray(t, dtype=float) ** (-1.0 / self.r)

    def induced_distortion(self):
        # integral of c_r u^(-1/r) over [0, s] is s^(1-1/r), i.e. MaxVar(r').
        return MaxVar(self.r / (self.r - 1.0))

    def norm(self, p):
        if math.isinf(p) or p >= self.r:
            return math.inf
        # ||D||_p^p = c_r^p / (1 - p/r)
        return self.c_r * (1.0 - p / self.r) ** (-1.0 / p)


class _EmpiricalDensityDistortion(DistortionFunction):
    """s -> integral over [0, s] of the decreasing rearrangement of D."""

    def __init__(self, law: EmpiricalDistribution):
        # Decreasing rearrangement: largest density values first.
        vals = law.values[::-1]
        wts = law.weights[::-1]
        self._knots = np.concatenate([[0.0], np.cumsum(wts)])
        self._knots[-1] = 1.0
        self._levels = np.concatenate([[0.0], np.cumsum(vals * wts)])
        self._levels /= self._levels[-1]
        self._slopes = vals

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self._knots, self._levels)

    def right_derivative(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self._knots, x, side="right") - 1, 0, len(self._slopes) - 1)
        return self._slopes[idx]


# ---------------------------------------------------------------- acceptance sets

@dataclass(frozen=True)
class ExpectationFloor:
    """E[X] >= alpha."""

    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise InvalidSpec("expectation floor must be finite")


@dataclass(frozen=True)
class TVaRLevel:
    """TVaR_alpha(X) <= 0."""

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise BadLevel(f"TVaR level must lie in (0, 1), got {self.alpha!r}")


@dataclass(frozen=True)
class UtilityFloor:
    """E[u(X)] >= alpha."""

    utility: UtilitySpec


@dataclass(frozen=True)
class Distortion:
    """rho_delta(X) <= 0."""

    delta: DistortionFunction


@dataclass(frozen=True)
class MaxCorrelation:
    """E[XY] >= 0 for every Y distributed as dQ/dP."""

    density: DensitySpec


AcceptanceSpec = Union[ExpectationFloor, TVaRLevel, UtilityFloor, Distortion, MaxCorrelation]

COHERENT_VARIANTS = (TVaRLevel, Distortion, MaxCorrelation)


# ---------------------------------------------------------------- JSON

_UTILITY_FAMILIES = {
    "Exponential": (Exponential, ("gamma",)),
    "FlatPower": (FlatPower, ("q",)),
    "CappedLog": (CappedLog, ("c",)),
    "NonHara": (NonHara, ("a", "c")),
}
_DISTORTIONS = {
    "MaxVar": (MaxVar, ("gamma",)),
    "MinVar": (MinVar, ("gamma",)),
    "MaxMinVar": (MaxMinVar, ("gamma",)),
    "MinMaxVar": (MinMaxVar, ("gamma",)),
    "BetaGamma": (BetaGamma, ("beta", "gamma")),
    "LogDistortion": (LogDistortion, ()),
}


def _build(table, obj, key):
    name = obj.get(key)
    if name not in table:
        raise UnsupportedSpec(f"unknown {key} {name!r}")
    cls, params = table[name]
    kwargs = {p: float(obj[p]) for p in params if p in obj}
    return cls(**kwargs)


def _dump(table, spec, key):
    for name, (cls, params) in table.items():
        if type(spec) is cls:
            return {key: name, **{p: getattr(spec, p) for p in params}}
    raise UnsupportedSpec(f"cannot serialise {type(spec).__name__}")


def acceptance_from_dict(obj: dict) -> AcceptanceSpec:
    """Parse the ``variant``-tagged JSON form of an acceptance set."""
    try:
        variant = obj["variant"]
        if variant == "ExpectationFloor":
            return ExpectationFloor(float(obj["alpha"]))
        if variant == "TVaRLevel":
            return TVaRLevel(float(obj["alpha"]))
        if variant == "UtilityFloor":
            u = obj["utility"]
            return UtilityFloor(UtilitySpec(_build(_UTILITY_FAMILIES, u, "family"),
                                            float(u.get("level_alpha", 0.0))))
        if variant == "Distortion":
            return Distortion(_build(_DISTORTIONS, obj["distortion"], "family"))
        if variant == "MaxCorrelation":
            d = obj["density"]
            if d.get("type") == "QuantilePower":
                return MaxCorrelation(QuantilePower(float(d["r"])))
            if d.get("type") == "EmpiricalDensity":
                return MaxCorrelation(EmpiricalDensity.from_values(d["values"], d.get("probs")))
            raise UnsupportedSpec(f"unknown density type {d.get('type')!r}")
    except (KeyError, TypeError) as exc:
        raise InvalidSpec(f"malformed acceptance spec: missing {exc}") from None
    raise UnsupportedSpec(f"unknown acceptance variant {obj.get('variant')!r}")


def acceptance_to_dict(acc: AcceptanceSpec) -> dict:
    if isinstance(acc, ExpectationFloor):
        return {"variant": "ExpectationFloor", "alpha": acc.alpha}
    if isinstance(acc, TVaRLevel):
        return {"variant": "TVaRLevel", "alpha": acc.alpha}
    if isinstance(acc, UtilityFloor):
        u = _dump(_UTILITY_FAMILIES, acc.utility.family, "family")
        u["level_alpha"] = acc.utility.level_alpha
        return {"variant": "UtilityFloor", "utility": u}
    if isinstance(acc, Distortion):
        return {"variant": "Distortion", "distortion": _dump(_DISTORTIONS, acc.delta, "family")}
    if isinstance(acc, MaxCorrelation):
        d = acc.density
        if isinstance(d, QuantilePower):
            return {"variant": "MaxCorrelation", "density": {"type": "QuantilePower", "r": d.r}}
        return {"variant": "MaxCorrelation",
                "density": {"type": "EmpiricalDensity", "values": d.law.values.tolist(),
                            "probs": d.law.weights.tolist()}}
    raise UnsupportedSpec(f"cannot serialise {type(acc).__name__}")

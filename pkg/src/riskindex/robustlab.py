"""Monte Carlo checks of qualitative robustness.

Every replication draws from its own counter-based stream keyed by
(seed, ..., replication index), so results never depend on scheduling.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import canonical
from .distributions import DistributionSpec, contaminate, sample, spec_from_dict, spec_to_dict
from .errors import BadCount, BadParameters, UnsupportedSpec
from .metrics import perturbation_gap, prohorov_distance
from .riskcore.engine import cash_rho
from .riskcore.specs import AcceptanceSpec, TVaRLevel, UtilityFloor, acceptance_from_dict, acceptance_to_dict
from .scenario import EmpiricalDistribution

OVERFLOW_SENTINEL = 1e15
N_REF = 100_000
ESTIMATE_TOL = 1e-10

__all__ = [
    "OVERFLOW_SENTINEL",
    "ExperimentConfig",
    "RobustnessReport",
    "ReportRow",
    "contaminate",
    "estimator_law",
    "lp_continuity_probe",
    "run_experiment",
    "thread_count",
]


def thread_count() -> int:
    """Worker cap from RISKINDEX_THREADS; unset or 0 means one per CPU."""
    raw = os.environ.get("RISKINDEX_THREADS", "").strip()
    n = int(raw) if raw else 0
    if n < 0:
        raise BadParameters("RISKINDEX_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def _seed_words(seed) -> tuple[int, ...]:
    return (int(seed),) if np.ndim(seed) == 0 else tuple(int(s) for s in seed)


def _finite_estimate(v: float) -> float:
    if v == math.inf:
        return OVERFLOW_SENTINEL
    if v == -math.inf:
        return -OVERFLOW_SENTINEL
    return min(max(v, -OVERFLOW_SENTINEL), OVERFLOW_SENTINEL)


def estimate_values(acc: AcceptanceSpec, spec: DistributionSpec, n: int, reps: int, seed) -> np.ndarray:
    """Plug-in estimates, one per replication, in replication order."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise BadCount(f"sample size must be a positive integer, got {n!r}")
    if not isinstance(reps, (int, np.integer)) or reps < 1:
        raise BadCount(f"replication count must be a positive integer, got {reps!r}")
    words = _seed_words(seed)

    def one(r: int) -> float:
        return _finite_estimate(cash_rho(sample(spec, int(n), words + (r,)), acc, ESTIMATE_TOL))

    workers = min(thread_count(), int(reps))
    if workers <= 1:
        return np.array([one(r) for r in range(reps)])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.array(list(pool.map(one, range(reps))))


def estimator_law(acc: AcceptanceSpec, spec: DistributionSpec, n: int, reps: int, seed) -> EmpiricalDistribution:
    """Law of R_A(m_n) over ``reps`` replications, each weighted 1/reps."""
    return EmpiricalDistribution.from_arrays(estimate_values(acc, spec, n, reps, seed))


# ---------------------------------------------------------------- experiment

@dataclass(frozen=True)
class ExperimentConfig:
    acc: AcceptanceSpec
    base: DistributionSpec
    contaminant: DistributionSpec
    epsilons: tuple[float, ...]
    n: int
    reps: int
    p: float = 1.0
    seed: int = 0
    tol: float = 1e-6
    n_ref: int = N_REF

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        if self.n < 10:
            raise BadParameters("n must be at least 10")
        if self.reps < 50:
            raise BadParameters("reps must be at least 50")
        if not self.p >= 1:
            raise BadParameters("p must be >= 1")
        if not self.tol > 0:
            raise BadParameters("tol must be positive")
        if self.n_ref < 1:
            raise BadParameters("n_ref must be positive")
        if not self.epsilons or any(not 0.0 <= e < 1.0 for e in self.epsilons):
            raise BadParameters("epsilons must be a nonempty list in [0, 1)")
        if not (math.isfinite(self.base.essinf()) and math.isfinite(self.base.esssup())):
            raise BadParameters("base law must be bounded; truncate it")
        if not 0 <= int(self.seed) < 2**64:
            raise BadParameters("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        try:
            return cls(
                acc=acceptance_from_dict(obj["acceptance"]),
                base=spec_from_dict(obj["base"]),
                contaminant=spec_from_dict(obj["contaminant"]),
                epsilons=tuple(obj["epsilons"]),
                n=int(obj["n"]),
                reps=int(obj["reps"]),
                p=float(obj.get("p", 1.0)),
                seed=int(obj.get("seed", 0)),
                tol=float(obj.get("tol", 1e-6)),
                n_ref=int(obj.get("n_ref", N_REF)),
            )
        except KeyError as exc:
            raise BadParameters(f"config is missing {exc}") from None

    def to_dict(self) -> dict:
        return {
            "acceptance": acceptance_to_dict(self.acc),
            "base": spec_to_dict(self.base),
            "contaminant": spec_to_dict(self.contaminant),
            "epsilons": list(self.epsilons),
            "n": self.n,
            "reps": self.reps,
            "p": self.p,
            "seed": self.seed,
            "tol": self.tol,
            "n_ref": self.n_ref,
        }


@dataclass(frozen=True)
class ReportRow:
    eps: float
    gap: float
    dp_distance: float
    mean_mu: float
    mean_nu: float
    spread_mu: float
    spread_nu: float

    FIELDS = ("eps", "gap", "dp_distance", "mean_mu", "mean_nu", "spread_mu", "spread_nu")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.FIELDS}


@dataclass(frozen=True)
class RobustnessReport:
    config: ExperimentConfig
    rows: tuple[ReportRow, ...]
    seeds: dict = field(default_factory=dict)

    def row(self, eps: float) -> ReportRow:
        for r in self.rows:
            if r.eps == eps:
                return r
        raise KeyError(eps)

    def to_dict(self) -> dict:
        return {"config": self.config.to_dict(), "rows": [r.to_dict() for r in self.rows], "seeds": self.seeds}

    def to_json(self) -> str:
        return canonical.dumps(self.to_dict())

    def write(self, out_dir) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        jpath, cpath = out / "report.json", out / "report.csv"
        jpath.write_text(self.to_json() + "\n")
        with open(cpath, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(ReportRow.FIELDS)
            for r in self.rows:
                w.writerow([canonical.dumps(getattr(r, k)).strip('"') for k in ReportRow.FIELDS])
        return jpath, cpath


def _moments(values: np.ndarray) -> tuple[float, float]:
    return float(np.mean(values)), float(np.std(values))


def run_experiment(config: ExperimentConfig) -> RobustnessReport:
    """Estimator-law distances and admissibility gaps across contamination levels.

    Seed layout: (seed, 0, r) for the uncontaminated estimator replications,
    (seed, 1, k, r) for contamination level k, (seed, 2) and (seed, 3, k)
    for the large reference samples behind the admissibility gap.
    """
    s = int(config.seed)
    mu_vals = estimate_values(config.acc, config.base, config.n, config.reps, (s, 0))
    mu_law = EmpiricalDistribution.from_arrays(mu_vals)
    mean_mu, spread_mu = _moments(mu_vals)
    ref_mu = sample(config.base, config.n_ref, (s, 2))

    rows = []
    for k, eps in sorted(enumerate(config.epsilons), key=lambda kv: kv[1]):
        nu = contaminate(config.base, eps, config.contaminant)
        nu_vals = estimate_values(config.acc, nu, config.n, config.reps, (s, 1, k))
        ref_nu = sample(nu, config.n_ref, (s, 3, k))
        rows.append(ReportRow(
            eps=eps,
            gap=perturbation_gap(ref_mu, ref_nu, config.p, config.tol),
            dp_distance=prohorov_distance(mu_law, EmpiricalDistribution.from_arrays(nu_vals), config.tol).value,
            mean_mu=mean_mu,
            mean_nu=_moments(nu_vals)[0],
            spread_mu=spread_mu,
            spread_nu=_moments(nu_vals)[1],
        ))
    seeds = {"mu": [s, 0], "nu": [[s, 1, k] for k in range(len(config.epsilons))],
             "ref_mu": [s, 2], "ref_nu": [[s, 3, k] for k in range(len(config.epsilons))]}
    return RobustnessReport(config, tuple(rows), seeds)


# ---------------------------------------------------------------- Lp probe

def lp_probe_position(n: int, p: float) -> EmpiricalDistribution:
    """Law of -n^(1/p) on an event of probability 1/n^2, zero elsewhere.

    Its L^p norm is n^(-1/p), so the sequence tends to 0 in L^p.
    """
    if n < 1:
        raise BadCount("probe index must be positive")
    if n == 1:
        return EmpiricalDistribution.from_arrays([-1.0])
    return EmpiricalDistribution.from_arrays([-(n ** (1.0 / p)), 0.0], [1.0 / n**2, 1.0 - 1.0 / n**2])


def lp_continuity_probe(acc: AcceptanceSpec, p: float, n_list: Sequence[int], tol: float = 1e-10) -> list[tuple[float, float]]:
    """(||X_n||_p, rho(X_n)) along positions shrinking to 0 in L^p."""
    if not isinstance(acc, (UtilityFloor, TVaRLevel)):
        raise UnsupportedSpec("the probe covers UtilityFloor and TVaRLevel")
    if not p >= 1:
        raise BadParameters("p must be >= 1")
    ns = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise BadParameters("n_list must be strictly increasing")
    out = []
    for n in ns:
        d = lp_probe_position(n, p)
        out.append((d.lp_norm(p), cash_rho(d, acc, tol)))
    return out

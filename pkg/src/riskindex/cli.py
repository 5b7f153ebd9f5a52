"""Command line entry point: ``riskindex <subcommand> ...``.

Exit status 0 on success, 2 on bad flags or unreadable inputs, 1 when the
computation itself fails. Every result is printed as canonical JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import canonical
from .errors import RiskIndexError
from .indices import index_of_finiteness, index_of_qualitative_robustness, index_report_to_dict
from .metrics import levy_distance, perturbation_gap, prohorov_distance
from .riskcore.engine import eval_risk, reproduce_counterexample
from .riskcore.specs import acceptance_from_dict
from .robustlab import ExperimentConfig, lp_continuity_probe, run_experiment
from .scenario import TradedAsset, read_sample_csv, read_scenario_csv


class UsageError(Exception):
    """Bad flags or missing inputs; maps to exit status 2."""


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return p


def _load_json(arg: str) -> dict:
    """A JSON file path, or an inline JSON object."""
    text = arg.strip()
    if not text.startswith("{"):
        text = _existing(arg).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {arg!r}: {exc}") from None
    if not isinstance(obj, dict):
        raise UsageError("expected a JSON object")
    return obj


def _emit(obj) -> None:
    sys.stdout.write(canonical.dumps(obj) + "\n")


# ---------------------------------------------------------------- subcommands

def cmd_eval(args) -> int:
    space = read_scenario_csv(_existing(args.scenario))
    acc = acceptance_from_dict(_load_json(args.acceptance))
    if args.asset_payoff is None:
        asset = TradedAsset(args.asset_price, 1.0)
    else:
        try:
            payoff = float(args.asset_payoff)
        except ValueError:
            payoff = args.asset_payoff
        asset = TradedAsset(args.asset_price, payoff)
    rho = eval_risk(space, args.var, asset, acc, args.tol)
    _emit({"rho": rho, "var": args.var})
    return 0


def cmd_index(args) -> int:
    acc = acceptance_from_dict(_load_json(args.acceptance))
    _emit({
        "finiteness": index_report_to_dict(index_of_finiteness(acc)),
        "robustness": index_report_to_dict(index_of_qualitative_robustness(acc)),
    })
    return 0


def cmd_metric(args) -> int:
    a = read_sample_csv(_existing(args.a))
    b = read_sample_csv(_existing(args.b))
    if args.metric == "levy":
        res = levy_distance(a, b)
    else:
        res = prohorov_distance(a, b, args.tol)
    out = res.to_dict()
    out["metric"] = args.metric
    if args.p is not None:
        out["p"] = args.p
        out["gap"] = perturbation_gap(a, b, args.p, args.tol)
    _emit(out)
    return 0


def cmd_robustness(args) -> int:
    config = ExperimentConfig.from_dict(_load_json(args.config))
    report = run_experiment(config)
    jpath, cpath = report.write(args.out)
    _emit({"json": str(jpath), "csv": str(cpath), "rows": len(report.rows)})
    return 0


def cmd_counterexample(args) -> int:
    rec = reproduce_counterexample(args.gamma1, args.gamma2, args.lam, args.alpha, args.p, args.s0, args.tol)
    space = rec.space
    _emit({
        "rho_x": rec.rho_x,
        "rho_y": rec.rho_y,
        "same_law": rec.same_law,
        "holds": rec.holds,
        "s0": rec.s0_bound,
        "params": {"gamma1": args.gamma1, "gamma2": args.gamma2, "lambda": args.lam,
                   "alpha": args.alpha, "p": args.p, "s0": args.s0},
        "space": {"probs": list(space.probs), "vars": {k: list(v) for k, v in space.vars.items()}},
    })
    return 0 if rec.holds else 1


def cmd_probe(args) -> int:
    acc = acceptance_from_dict(_load_json(args.acceptance))
    rows = lp_continuity_probe(acc, args.p, args.n)
    _emit({"p": args.p, "rows": [{"n": n, "lp_norm": nrm, "rho": rho} for n, (nrm, rho) in zip(args.n, rows)]})
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="riskindex", description="Risk measures with general eligible assets.")
    sub = ap.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="capital requirement of a scenario variable")
    e.add_argument("--scenario", required=True)
    e.add_argument("--var", required=True)
    e.add_argument("--acceptance", required=True, help="JSON file or inline JSON object")
    e.add_argument("--asset-payoff", default=None, help="scenario variable name or positive constant")
    e.add_argument("--asset-price", type=float, default=1.0)
    e.add_argument("--tol", type=float, default=None)
    e.set_defaults(func=cmd_eval)

    i = sub.add_parser("index", help="index of finiteness and of qualitative robustness")
    i.add_argument("--acceptance", required=True)
    i.set_defaults(func=cmd_index)

    m = sub.add_parser("metric", help="distance between two samples")
    m.add_argument("--a", required=True)
    m.add_argument("--b", required=True)
    m.add_argument("--metric", choices=("levy", "prohorov"), default="prohorov")
    m.add_argument("--p", type=float, default=None)
    m.add_argument("--tol", type=float, default=1e-9)
    m.set_defaults(func=cmd_metric)

    r = sub.add_parser("robustness", help="contamination experiment")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_robustness)

    c = sub.add_parser("counterexample", help="law-invariance failure under a random payoff")
    c.add_argument("--gamma1", type=float, default=1.0)
    c.add_argument("--gamma2", type=float, default=2.0)
    c.add_argument("--lambda", dest="lam", type=float, default=-1.5)
    c.add_argument("--alpha", type=float, default=0.1)
    c.add_argument("--p", type=float, default=0.2)
    c.add_argument("--s0", type=float, default=1.0)
    c.add_argument("--tol", type=float, default=1e-8)
    c.set_defaults(func=cmd_counterexample)

    pr = sub.add_parser("probe", help="L^p continuity probe")
    pr.add_argument("--acceptance", required=True)
    pr.add_argument("--p", type=float, required=True)
    pr.add_argument("--n", type=int, nargs="+", default=[4, 16, 64, 256, 1024, 4096])
    pr.set_defaults(func=cmd_probe)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"riskindex: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"riskindex: {exc}", file=sys.stderr)
        return 2
    except (RiskIndexError, ValueError, KeyError, ArithmeticError, RuntimeError) as exc:
        print(f"riskindex: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

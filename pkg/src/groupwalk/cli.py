"""Command-line client.

Every subcommand builds the same request models the HTTP service consumes
and calls the shared handlers in-process, then renders CSV or JSON. Data
goes to stdout or --output; --progress chatter goes to stderr only.

Exit codes: 0 success, 1 invalid input, 2 failed verification assertions.
"""

from __future__ import annotations

import argparse
import os
import sys

from pydantic import ValidationError

from .errors import GroupWalkError
from .products import default_cache
from .service import ops
from .service import schemas as S
from .textio import csv_text, json_text


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", help="output path (stdout if omitted)")
    p.add_argument("--format", choices=("csv", "json"), default=None,
                   help="override the subcommand's default output format")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--cap", type=int, default=50_000, help="group enumeration cap")
    p.add_argument("--tol", type=float, default=1e-13, help="continuous-time tolerance")
    p.add_argument("--config", help="key=value file; entries override flags")
    p.add_argument("--progress", action="store_true", help="report progress on stderr")


def build_parser() -> _Parser:
    parser = _Parser(prog="groupwalk")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("group", help="group table info")
    p.add_argument("--group", required=True)
    _add_common(p)

    p = sub.add_parser("growth", help="volume growth and moderate-growth certificate")
    p.add_argument("--group", required=True)
    p.add_argument("--gens", help="comma-separated elements (coords joined with '.')")
    p.add_argument("--moderate-a", type=float, default=None)
    p.add_argument("--moderate-d", type=float, default=1.0)
    _add_common(p)

    p = sub.add_parser("walk", help="single-walk curves, mixing times, spectral gap")
    wsub = p.add_subparsers(dest="walk_command", required=True)
    for name in ("curve", "mix", "gap"):
        wp = wsub.add_parser(name)
        wp.add_argument("--group", required=True)
        wp.add_argument("--gens")
        wp.add_argument("--law", default="lazy")
        if name == "curve":
            wp.add_argument("--clock", choices=("discrete", "continuous"), default="discrete")
            wp.add_argument("--steps", help="discrete step range, e.g. 0..20")
            wp.add_argument("--times", help="comma-separated times (continuous clock)")
            wp.add_argument("--moderate-a", type=float, default=None)
            wp.add_argument("--moderate-d", type=float, default=1.0)
        if name == "mix":
            wp.add_argument("--metric", choices=("tv", "hellinger"), default="tv")
            wp.add_argument("--clock", choices=("discrete", "continuous"), default="discrete")
            wp.add_argument("--eps", type=float, required=True)
        _add_common(wp)

    p = sub.add_parser("product", help="product-chain curves and brackets")
    psub = p.add_subparsers(dest="product_command", required=True)
    pp = psub.add_parser("curve")
    pp.add_argument("--factors", required=True, help="comma-separated group descriptors")
    pp.add_argument("--laws", help="comma-separated laws, one per factor (default lazy)")
    pp.add_argument("--weights", required=True, help="comma-separated positive weights")
    pp.add_argument("--times", required=True, help="comma-separated times")
    pp.add_argument("--a-param", type=float, default=S.ProductCurveRequest.model_fields["a_param"].default)
    pp.add_argument("--oracle-cap", type=int, default=2000)
    _add_common(pp)

    p = sub.add_parser("laplace", help="exponential-sum cutoff functionals")
    lsub = p.add_subparsers(dest="laplace_command", required=True)
    lt = lsub.add_parser("tau")
    lt.add_argument("--a", required=True, help="comma-separated coefficients")
    lt.add_argument("--lam", required=True, help="comma-separated rates")
    lt.add_argument("--c", type=float, required=True)
    _add_common(lt)
    lm = lsub.add_parser("mixing")
    lm.add_argument("--a", required=True)
    lm.add_argument("--lam", required=True)
    lm.add_argument("--eps", type=float, required=True)
    _add_common(lm)

    p = sub.add_parser("family", help="product-family scans from a spec file")
    fsub = p.add_subparsers(dest="family_command", required=True)
    fp = fsub.add_parser("scan")
    fp.add_argument("--spec", required=True, help="family spec file (key=value lines)")
    _add_common(fp)

    p = sub.add_parser("experiment", help="cutoff phase-transition drivers")
    esub = p.add_subparsers(dest="experiment_command", required=True)
    eh = esub.add_parser("heisenberg")
    eh.add_argument("--gamma", type=float, required=True)
    eh.add_argument("--n-max", type=int, default=60)
    eh.add_argument("--mode", choices=("formula", "exact-small"), default="formula")
    _add_common(eh)
    er = esub.add_parser("randomized")
    er.add_argument("--mode", choices=("poly", "exp"), required=True)
    er.add_argument("--gamma", type=float, default=None)
    er.add_argument("--dist", default="uniform(0,2)")
    er.add_argument("--trials", type=int, default=20)
    er.add_argument("--n-max", type=int, default=400)
    _add_common(er)

    p = sub.add_parser("verify", help="run the inequality/identity battery")
    p.add_argument("suite", nargs="?", default=None,
                   help="single check to run (default: all)")
    p.add_argument("--group", help="override the fixture group for 'sandwich'")
    p.add_argument("--steps", help="override the step range for 'sandwich'")
    _add_common(p)
    return parser


def _apply_config_file(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    with open(args.config, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise GroupWalkError(f"bad config line {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if not hasattr(args, key):
                raise GroupWalkError(f"unknown config key {key!r}")
            current = getattr(args, key)
            if isinstance(current, bool):
                setattr(args, key, value.lower() in ("1", "true", "yes"))
            elif isinstance(current, int):
                setattr(args, key, int(value))
            elif isinstance(current, float):
                setattr(args, key, float(value))
            else:
                setattr(args, key, value)


def _floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _progress(args, message: str) -> None:
    if getattr(args, "progress", False):
        print(message, file=sys.stderr)


def _emit(args, text: str, suffix: str = "") -> None:
    if args.output:
        path = args.output + suffix
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_pair(args, csv_doc: str, json_doc: str, default_format: str = "csv") -> None:
    """CSV table plus JSON summary; both files with --output, one to stdout."""
    if args.output:
        _emit(args, csv_doc, ".csv")
        _emit(args, json_doc, ".json")
        return
    fmt = args.format or default_format
    sys.stdout.write(csv_doc if fmt == "csv" else json_doc)


def _config_echo(args, keys: list[str]) -> dict:
    return {k: getattr(args, k.replace("-", "_")) for k in keys
            if getattr(args, k.replace("-", "_"), None) is not None}


def _cmd_group(args) -> int:
    resp = ops.group_info(S.GroupInfoRequest(group=args.group))
    _emit(args, json_text(resp.model_dump()))
    return 0


def _cmd_growth(args) -> int:
    resp = ops.growth(S.GrowthRequest(
        group=args.group, gens=args.gens, moderate_a=args.moderate_a,
        moderate_d=args.moderate_d, cap=args.cap))
    cfg = _config_echo(args, ["group", "gens", "moderate_a", "moderate_d"])
    cfg["diameter"] = resp.diameter
    cfg["minimal_a"] = resp.minimal_a
    rows = [(r.m, r.volume, r.ball_fraction, r.modgrowth_lhs, r.modgrowth_rhs)
            for r in resp.rows]
    doc = csv_text(["m", "volume", "ball_fraction", "modgrowth_lhs", "modgrowth_rhs"],
                   rows, cfg, seed=args.seed)
    if (args.format or "csv") == "json":
        _emit(args, json_text(resp.model_dump()))
    else:
        _emit(args, doc)
    return 0


def _cmd_walk(args) -> int:
    if args.walk_command == "curve":
        resp = ops.walk_curve(S.WalkCurveRequest(
            group=args.group, gens=args.gens, law=args.law, cap=args.cap,
            clock=args.clock, steps=args.steps,
            times=_floats(args.times) if args.times else None,
            tol=args.tol, moderate_a=args.moderate_a, moderate_d=args.moderate_d))
        cfg = _config_echo(args, ["group", "gens", "law", "clock", "steps", "times", "tol"])
        rows = [(r.clock, r.time, r.tv, r.hellinger, r.tv_upper_bound, r.tv_lower_bound)
                for r in resp.rows]
        doc = csv_text(["clock", "time", "tv", "hellinger", "tv_upper_bound",
                        "tv_lower_bound"], rows, cfg, seed=args.seed)
        _emit(args, doc if (args.format or "csv") == "csv" else json_text(resp.model_dump()))
        return 0
    if args.walk_command == "mix":
        resp = ops.walk_mix(S.WalkMixRequest(
            group=args.group, gens=args.gens, law=args.law, cap=args.cap,
            metric=args.metric, clock=args.clock, eps=args.eps, tol=args.tol))
        _emit(args, json_text(resp.model_dump()))
        return 0
    resp = ops.walk_gap(S.WalkGapRequest(group=args.group, gens=args.gens,
                                         law=args.law, cap=args.cap))
    _emit(args, json_text(resp.model_dump()))
    return 0


def _cmd_product(args) -> int:
    cache_dir = os.environ.get("GROUPWALK_CACHE_DIR")
    cache_path = os.path.join(cache_dir, "factor_curves.json") if cache_dir else None
    if cache_path:
        default_cache().load(cache_path)
    resp = ops.product_curve(S.ProductCurveRequest(
        factors=[f for f in args.factors.split(",") if f],
        laws=[l for l in args.laws.split(",")] if args.laws else None,
        weights=_floats(args.weights), times=_floats(args.times),
        a_param=args.a_param, tol=args.tol, oracle_cap=args.oracle_cap, cap=args.cap))
    if cache_path:
        default_cache().save(cache_path)
    cfg = _config_echo(args, ["factors", "laws", "weights", "times", "a_param", "tol"])
    rows = [(r.t, r.hellinger_exact, r.tv_lower, r.tv_upper, r.lemma_lower,
             r.lemma_upper, r.oracle_available, r.oracle_value) for r in resp.rows]
    doc = csv_text(["t", "hellinger_exact", "tv_lower", "tv_upper", "lemmaA1_lower",
                    "lemmaA1_upper", "oracle_available", "oracle_value"],
                   rows, cfg, seed=args.seed)
    _emit(args, doc if (args.format or "csv") == "csv" else json_text(resp.model_dump()))
    return 0


def _cmd_laplace(args) -> int:
    if args.laplace_command == "tau":
        resp = ops.laplace_tau(S.LaplaceTauRequest(
            a=_floats(args.a), lam=_floats(args.lam), c=args.c))
    else:
        resp = ops.laplace_mixing(S.LaplaceMixRequest(
            a=_floats(args.a), lam=_floats(args.lam), eps=args.eps))
    _emit(args, json_text(resp.model_dump()))
    return 0


def _cmd_family(args) -> int:
    with open(args.spec, "r", encoding="utf-8") as fh:
        text = fh.read()
    from .cutoff import parse_family_file

    fs = parse_family_file(text)
    resp = ops.family_scan(S.FamilyScanRequest(
        kind=fs.kind, recipe=fs.recipe, weight_rule=fs.weight_rule,
        n_range=",".join(str(n) for n in fs.n_range), seed=fs.seed,
        trend=S.TrendSettings(rel_slope=fs.trend.rel_slope,
                              bounded_ratio=fs.trend.bounded_ratio,
                              min_points=fs.trend.min_points)))
    cfg = {"kind": resp.kind, "recipe": resp.recipe, "weight_rule": resp.weight_rule}
    eps_keys = sorted(resp.rows[0].mix_products) if resp.rows else []
    header = ["n", "log_q", "log_t", "log_l1", "stat"] + [f"mix_x_l1_eps_{e}" for e in eps_keys]
    rows = [
        tuple([r.n, r.log_q, r.log_t, r.log_l1, r.stat] +
              [r.mix_products[e] for e in eps_keys])
        for r in resp.rows
    ]
    csv_doc = csv_text(header, rows, cfg, seed=fs.seed)
    json_doc = json_text({"verdict": resp.verdict, "trend": resp.trend,
                          "thresholds": resp.thresholds, "config": cfg, "seed": fs.seed})
    _emit_pair(args, csv_doc, json_doc)
    return 0


def _cmd_experiment(args) -> int:
    if args.experiment_command == "heisenberg":
        _progress(args, f"heisenberg experiment gamma={args.gamma} n<={args.n_max}")
        resp = ops.heisenberg_experiment(S.HeisenbergExperimentRequest(
            gamma=args.gamma, n_max=args.n_max, mode=args.mode))
        cfg = {"experiment": "heisenberg", "gamma": args.gamma,
               "n_max": args.n_max, "mode": args.mode}
        rows = [(r.n, r.log_q, r.log_t, r.log_l1, r.stat, r.verdict) for r in resp.rows]
        csv_doc = csv_text(["n", "log_q", "log_t", "log_l1", "stat", "verdict"],
                           rows, cfg, seed=args.seed)
        summary = {"verdict": resp.verdict, "trend": resp.trend,
                   "thresholds": resp.thresholds, "config": cfg, "seed": args.seed,
                   "exact_small": [r.model_dump() for r in resp.exact_small]}
        _emit_pair(args, csv_doc, json_text(summary))
        return 0
    _progress(args, f"randomized experiment mode={args.mode} trials={args.trials}")
    resp = ops.randomized_experiment(S.RandomizedExperimentRequest(
        mode=args.mode, gamma=args.gamma, dist=args.dist, seed=args.seed,
        n_max=args.n_max, trials=args.trials))
    cfg = {"experiment": "randomized", "mode": args.mode, "gamma": args.gamma,
           "dist": args.dist, "trials": args.trials, "n_max": args.n_max}
    rows = [(t.trial, t.verdict, t.mu_hat, t.final_stat, t.final_raw_stat)
            for t in resp.trials]
    csv_doc = csv_text(["trial", "verdict", "mu_hat", "final_stat", "final_raw_stat"],
                       rows, cfg, seed=args.seed)
    summary = {"fractions": resp.fractions, "thresholds": resp.thresholds,
               "config": cfg, "seed": args.seed}
    _emit_pair(args, csv_doc, json_text(summary))
    return 0


def _cmd_verify(args) -> int:
    from .verify import check_sandwich, verify_all
    from .groups import canonical_generators, parse_group
    from .walks import WalkSpec, lazy_law
    from .cutoff import parse_n_range

    if args.suite == "sandwich" and args.group:
        group = parse_group(args.group, args.cap)
        walk = WalkSpec(group, lazy_law(group, canonical_generators(group)))
        steps = parse_n_range(args.steps, min_value=0) if args.steps else range(0, 21)
        result = check_sandwich({group.label: walk}, steps=steps)
        checks = [result]
        all_passed = not result.failed
        seed = args.seed
    else:
        report = verify_all(seed=args.seed, only=[args.suite] if args.suite else None)
        checks = list(report.checks)
        all_passed = report.all_passed
        seed = report.seed
    for c in checks:
        print(f"{c.name}: {c.status.upper()} ({c.detail})")
    doc = json_text({"seed": seed, "all_passed": all_passed,
                     "checks": [{"name": c.name, "status": c.status, "detail": c.detail}
                                for c in checks]})
    if args.output:
        _emit(args, doc)
    return 0 if all_passed else 2


_COMMANDS = {
    "group": _cmd_group,
    "growth": _cmd_growth,
    "walk": _cmd_walk,
    "product": _cmd_product,
    "laplace": _cmd_laplace,
    "family": _cmd_family,
    "experiment": _cmd_experiment,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args)
        return _COMMANDS[args.command](args)
    except (GroupWalkError, ValidationError, OSError, ValueError) as exc:
        print(f"groupwalk: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

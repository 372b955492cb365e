"""Shared handlers behind both the HTTP routes and the CLI subcommands.

Each function maps a request model to a response model using the core
package; transport concerns (HTTP codes, CSV rendering, exit codes) live in
the callers.
"""

from __future__ import annotations

import math

import numpy as np

from .. import __version__
from ..cutoff import (
    ExponentialSum,
    FamilySpec,
    TrendConfig,
    build_family,
    exp_sum_mixing,
    experiment_heisenberg,
    experiment_randomized,
    lambda_tau,
    parse_n_range,
)
from ..errors import InvalidParameterError
from ..groups import canonical_generators, generator_set, parse_elements, parse_group
from ..growth import check_moderate_growth, growth_profile, minimal_A
from ..products import ProductWalkSpec, build_flat, product_hellinger_bounds, product_hellinger_ct, product_tv_bracket
from ..verify import verify_all
from ..walks import (
    WalkSpec,
    distance,
    heat_distribution,
    hellinger_distance,
    lazy_law,
    mixing_time,
    moderate_constants,
    spectral_gap,
    uniform_law,
)
from . import schemas as S


def _trend_config(t: S.TrendSettings) -> TrendConfig:
    return TrendConfig(rel_slope=t.rel_slope, bounded_ratio=t.bounded_ratio,
                       min_points=t.min_points)


def build_walk(req: S.WalkRequest) -> WalkSpec:
    group = parse_group(req.group, req.cap)
    gens = (generator_set(group, parse_elements(group, req.gens), symmetric=False)
            if req.gens else canonical_generators(group))
    law = req.law.strip()
    if law == "lazy":
        return WalkSpec(group, lazy_law(group, gens))
    if law == "uniform":
        return WalkSpec(group, uniform_law(group, gens))
    if law.startswith("custom:"):
        q = np.zeros(group.order)
        for part in law[len("custom:"):].split(","):
            elem, _, prob = part.partition(":")
            q[parse_elements(group, elem)[0]] += float(prob)
        return WalkSpec(group, q)
    raise InvalidParameterError(f"unknown law {law!r}; use lazy, uniform or custom:<elem>:<p>,...")


def group_info(req: S.GroupInfoRequest) -> S.GroupInfoResponse:
    group = parse_group(req.group)
    return S.GroupInfoResponse(
        label=group.label, order=group.order, id_index=group.id_index,
        coord_width=group.coord_width,
        default_generators=list(canonical_generators(group).members),
    )


def growth(req: S.GrowthRequest) -> S.GrowthResponse:
    group = parse_group(req.group, req.cap)
    gens = (generator_set(group, parse_elements(group, req.gens), symmetric=False)
            if req.gens else canonical_generators(group))
    prof = growth_profile(group, gens)
    min_a = minimal_A(prof, req.moderate_d)
    a = req.moderate_a if req.moderate_a is not None else min_a
    cert = check_moderate_growth(prof, a, req.moderate_d)
    rho, order = prof.diameter, prof.group_order
    rows = [
        S.GrowthRow(
            m=m, volume=prof.volumes[m - 1],
            ball_fraction=prof.volumes[m - 1] / order,
            modgrowth_lhs=prof.volumes[m - 1] / prof.volumes[-1],
            modgrowth_rhs=(m / rho) ** req.moderate_d / a,
        )
        for m in range(1, rho + 1)
    ]
    return S.GrowthResponse(label=group.label, order=order, diameter=rho,
                            moderate_a=a, moderate_d=req.moderate_d, minimal_a=min_a,
                            cert_satisfied=cert.satisfied, rows=rows)


def walk_curve(req: S.WalkCurveRequest) -> S.WalkCurveResponse:
    walk = build_walk(req)
    prof = growth_profile(walk.group, walk.support)
    min_a = minimal_A(prof, req.moderate_d)
    a = req.moderate_a if req.moderate_a is not None else min_a
    cert = check_moderate_growth(prof, a, req.moderate_d)
    c1, _ = moderate_constants(cert.A, cert.d)
    eta, rho = walk.eta, prof.diameter
    lam = spectral_gap(walk) if walk.symmetric else None
    if req.clock == "discrete":
        if req.times:
            times = sorted(float(t) for t in req.times)
        else:
            times = [float(m) for m in parse_n_range(req.steps or "0..20", min_value=0)]
    else:
        if not req.times:
            raise InvalidParameterError("continuous curves need explicit times")
        times = sorted(float(t) for t in req.times)
    rows = []
    upper_gate = cert.satisfied and walk.symmetric and walk.group.id_index in walk.support.members
    for t in times:
        tv = distance(walk, "tv", req.clock, t, req.tol)
        hl = distance(walk, "hellinger", req.clock, t, req.tol)
        ub = lb = None
        if upper_gate:
            rate = eta * t / rho ** 2 if req.clock == "discrete" else eta * t / (2.0 * rho ** 2)
            ub = c1 * math.exp(-rate)
        if req.clock == "continuous" and lam is not None:
            lb = 0.5 * math.exp(-lam * t)
        rows.append(S.WalkCurveRow(clock=req.clock, time=t, tv=tv, hellinger=hl,
                                   tv_upper_bound=ub, tv_lower_bound=lb))
    return S.WalkCurveResponse(label=walk.group.label, rows=rows)


def walk_mix(req: S.WalkMixRequest) -> S.WalkMixResponse:
    walk = build_walk(req)
    value = mixing_time(walk, req.metric, req.clock, req.eps, tol=req.tol)
    return S.WalkMixResponse(metric=req.metric, clock=req.clock, eps=req.eps,
                             mixing_time=float(value))


def walk_gap(req: S.WalkGapRequest) -> S.WalkGapResponse:
    walk = build_walk(req)
    return S.WalkGapResponse(
        label=walk.group.label, gap=spectral_gap(walk),
        method="dense-eigh" if walk.group.order <= 2000 else "power-iteration")


def _parse_product(req: S.ProductCurveRequest) -> ProductWalkSpec:
    laws = req.laws or ["lazy"] * len(req.factors)
    if len(laws) != len(req.factors):
        raise InvalidParameterError("laws must match factors")
    factors = [build_walk(S.WalkRequest(group=g, law=law, cap=req.cap))
               for g, law in zip(req.factors, laws)]
    return ProductWalkSpec(factors, np.asarray(req.weights, dtype=float))


def product_curve(req: S.ProductCurveRequest) -> S.ProductCurveResponse:
    pw = _parse_product(req)
    flat_order = 1
    for f in pw.factors:
        flat_order *= f.group.order
    flat = build_flat(pw, req.cap) if flat_order <= req.oracle_cap else None
    rows = []
    for t in sorted(req.times):
        h = product_hellinger_ct(pw, t, req.tol)
        lo, hi = product_tv_bracket(pw, t, req.tol)
        b = product_hellinger_bounds(pw, t, req.a_param, req.tol)
        oracle = hellinger_distance(heat_distribution(flat, t, req.tol)) if flat else None
        rows.append(S.ProductCurveRow(
            t=t, hellinger_exact=h, tv_lower=lo, tv_upper=hi,
            lemma_lower=max(b.max_factor_lower, b.exp_lower),
            lemma_upper=b.exp_upper if b.upper_valid else math.nan,
            upper_valid=b.upper_valid,
            oracle_available=flat is not None, oracle_value=oracle))
    label = "x".join(f.group.label for f in pw.factors)
    return S.ProductCurveResponse(label=label, rows=rows)


def laplace_tau(req: S.LaplaceTauRequest) -> S.LaplaceTauResponse:
    result = lambda_tau(ExponentialSum(tuple(req.a), tuple(req.lam)), req.c)
    return S.LaplaceTauResponse(found=result.found, j=result.j, lambda_c=result.lambda_c,
                                tau_c=result.tau_c, total_mass=result.total_mass)


def laplace_mixing(req: S.LaplaceMixRequest) -> S.LaplaceMixResponse:
    value = exp_sum_mixing(ExponentialSum(tuple(req.a), tuple(req.lam)), req.eps)
    return S.LaplaceMixResponse(mixing_time=value)


def family_scan(req: S.FamilyScanRequest) -> S.FamilyScanResponse:
    cfg = _trend_config(req.trend)
    fs = FamilySpec(kind=req.kind, recipe=req.recipe, weight_rule=req.weight_rule,
                    n_range=parse_n_range(req.n_range), seed=req.seed, trend=cfg)
    bundle = build_family(fs, tuple(req.eps_grid))
    verdict = bundle.trend.verdict
    rows = [
        S.FamilyRowModel(
            n=r.n, log_q=r.log_q, log_t=r.log_t, log_l1=r.log_l1, stat=r.stat,
            mix_products={str(e): v for e, v in r.mix_products.items()},
            verdict=verdict)
        for r in bundle.rows
    ]
    return S.FamilyScanResponse(
        kind=fs.kind, recipe=fs.recipe, weight_rule=fs.weight_rule, verdict=verdict,
        trend=_trend_dict(bundle.trend), thresholds=cfg.as_dict(), rows=rows)


def _trend_dict(trend) -> dict:
    return {"verdict": trend.verdict, "slope": trend.slope, "rel_slope": trend.rel_slope,
            "window_mean": trend.window_mean, "window_ratio": trend.window_ratio,
            "window_start": trend.window_start}


def heisenberg_experiment(req: S.HeisenbergExperimentRequest) -> S.HeisenbergExperimentResponse:
    cfg = _trend_config(req.trend)
    exp = experiment_heisenberg(req.gamma, range(1, req.n_max + 1), req.mode, cfg)
    rows = [
        S.FamilyRowModel(
            n=r.n, log_q=r.log_q, log_t=r.log_t, log_l1=r.log_l1, stat=r.stat,
            mix_products={str(e): v for e, v in r.mix_products.items()},
            verdict=exp.trend.verdict)
        for r in exp.rows
    ]
    exact = [
        S.ExactSmallRowModel(
            n=r.n, t=r.t, hellinger_exact=r.hellinger_exact,
            lower_max_factor=r.lower_max_factor, lower_exp=r.lower_exp,
            lower_proof_form=r.lower_proof_form, c1_fitted=r.c1_fitted,
            flat_hellinger_ct=r.flat_hellinger_ct,
            flat_hellinger_discrete=r.flat_hellinger_discrete,
            discrete_steps=r.discrete_steps)
        for r in exp.exact_small
    ]
    return S.HeisenbergExperimentResponse(
        gamma=req.gamma, mode=req.mode, verdict=exp.trend.verdict,
        trend=_trend_dict(exp.trend), thresholds=cfg.as_dict(), rows=rows, exact_small=exact)


def randomized_experiment(req: S.RandomizedExperimentRequest) -> S.RandomizedExperimentResponse:
    cfg = _trend_config(req.trend)
    exp = experiment_randomized(req.mode, req.dist, req.seed, range(1, req.n_max + 1),
                                req.trials, req.gamma, cfg)
    trials = [
        S.TrialModel(trial=t.trial, verdict=t.verdict, mu_hat=t.mu_hat,
                     final_stat=t.stat_series[-1], final_raw_stat=t.raw_stat_series[-1])
        for t in exp.trials
    ]
    return S.RandomizedExperimentResponse(
        mode=exp.mode, gamma=exp.gamma, dist=exp.sampler, seed=exp.seed,
        trials=trials, fractions=exp.fractions, thresholds=cfg.as_dict())


def run_verify(req: S.VerifyRequest) -> S.VerifyResponse:
    report = verify_all(seed=req.seed, only=req.only)
    return S.VerifyResponse(
        seed=report.seed, all_passed=report.all_passed,
        checks=[S.CheckModel(name=c.name, status=c.status, detail=c.detail)
                for c in report.checks])


def version_info() -> S.VersionResponse:
    return S.VersionResponse(name="groupwalk", version=__version__)

"""Built-in verification battery: every inequality and identity the package
relies on, run against a fixed fixture set with machine-readable results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cutoff import ExponentialSum, exp_sum_eval, exp_sum_mixing, lambda_tau
from .errors import GroupWalkError
from .groups import canonical_generators, generator_set, make_cyclic, make_heisenberg
from .growth import check_moderate_growth, growth_profile, minimal_A
from .products import ProductWalkSpec, build_flat, product_hellinger_bounds, product_hellinger_ct, product_tv_bracket
from .walks import (
    WalkSpec,
    check_cts_bounds,
    check_moderate_bounds,
    distance,
    heat_distribution,
    heat_deviation_spectral,
    hellinger_from_deviation,
    lazy_law,
    spectral_gap,
    tv_from_deviation,
    uniform_law,
    walk_distribution,
    hellinger_distance,
    tv_distance,
)

SANDWICH_SLACK = 1e-10


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str            # pass | fail | skip
    detail: str

    @property
    def failed(self) -> bool:
        return self.status == "fail"


@dataclass(frozen=True)
class VerifyReport:
    checks: tuple[CheckResult, ...]
    seed: int

    @property
    def all_passed(self) -> bool:
        return not any(c.failed for c in self.checks)


def _lazy_cycle_walk(n: int) -> WalkSpec:
    g = make_cyclic(n)
    return WalkSpec(g, lazy_law(g, canonical_generators(g)))


def _heisenberg_walk(m: int) -> WalkSpec:
    g = make_heisenberg(m)
    return WalkSpec(g, uniform_law(g, canonical_generators(g)))


def _sqrt_jump_walk(n: int) -> WalkSpec:
    g = make_cyclic(n)
    r = int(math.isqrt(n))
    gens = generator_set(g, {0, 1 % n, (n - 1) % n, r % n, (n - r) % n})
    return WalkSpec(g, uniform_law(g, gens))


def _product_fixture() -> ProductWalkSpec:
    return ProductWalkSpec([_lazy_cycle_walk(3), _lazy_cycle_walk(5)], np.array([0.5, 0.5]))


def standard_fixtures() -> dict[str, WalkSpec]:
    """The walk battery used by the verification suite."""
    fixtures = {
        "Z3-lazy": _lazy_cycle_walk(3),
        "Z11-lazy": _lazy_cycle_walk(11),
        "Z9-sqrt": _sqrt_jump_walk(9),
        "H3": _heisenberg_walk(3),
        "H4": _heisenberg_walk(4),
        "Z3xZ5": build_flat(_product_fixture()),
    }
    return fixtures


def _profile_for(walk: WalkSpec):
    return growth_profile(walk.group, walk.support)


def check_sandwich(fixtures=None, steps=range(0, 65),
                   cts_multipliers=(0.0, 0.5, 1.0, 2.0, 4.0, 8.0)) -> CheckResult:
    """1 - sqrt(1 - tv^2) <= hellinger^2 <= tv at every fixture/time pair."""
    fixtures = fixtures or standard_fixtures()
    worst = 0.0
    count = 0
    for name, walk in fixtures.items():
        rho = _profile_for(walk).diameter
        for m in steps:
            p = walk_distribution(walk, m)
            worst = max(worst, _sandwich_violation(tv_distance(p), hellinger_distance(p)))
            count += 1
        ts = set(cts_multipliers) | {float(rho ** 2), 4.0 * rho ** 2}
        for t in sorted(ts):
            if walk.symmetric:
                dev = heat_deviation_spectral(walk, t)
                d_tv, d_h = tv_from_deviation(dev), hellinger_from_deviation(dev)
            else:
                p = heat_distribution(walk, t)
                d_tv, d_h = tv_distance(p), hellinger_distance(p)
            worst = max(worst, _sandwich_violation(d_tv, d_h))
            count += 1
    status = "pass" if worst <= SANDWICH_SLACK else "fail"
    return CheckResult("sandwich", status,
                       f"{count} (chain, time) pairs, worst violation {worst:.3e}")


def _sandwich_violation(d_tv: float, d_h: float) -> float:
    lower = 1.0 - math.sqrt(max(1.0 - d_tv * d_tv, 0.0))
    h2 = d_h * d_h
    return max(lower - h2, h2 - d_tv, 0.0)


def check_product_identity(t_grid=(0.0, 0.5, 1.0, 2.0, 5.0, 10.0)) -> CheckResult:
    """Continuous product identity against the flat tensor oracle, plus the
    discrete witness where the same combination rule fails."""
    specs = {
        "Z3xZ5": _product_fixture(),
        "Z3xZ3": ProductWalkSpec([_lazy_cycle_walk(3), _lazy_cycle_walk(3)],
                                 np.array([0.5, 0.5])),
        "Z2xZ3xZ5": ProductWalkSpec(
            [_lazy_cycle_walk(2), _lazy_cycle_walk(3), _lazy_cycle_walk(5)],
            np.array([0.25, 0.25, 0.5])),
        "H3xZ2": ProductWalkSpec([_heisenberg_walk(3), _lazy_cycle_walk(2)],
                                 np.array([0.75, 0.25])),
    }
    worst = 0.0
    for name, pw in specs.items():
        flat = build_flat(pw)
        rho = _profile_for(flat).diameter
        for t in sorted(set(t_grid) | {float(rho ** 2)}):
            formula = product_hellinger_ct(pw, t)
            oracle = hellinger_distance(heat_distribution(flat, t))
            worst = max(worst, abs(formula - oracle))
    # discrete-time witness: two lazy Z3 factors at m = 2 steps
    pw = ProductWalkSpec([_lazy_cycle_walk(3), _lazy_cycle_walk(3)], np.array([0.5, 0.5]))
    flat = build_flat(pw)
    h1 = hellinger_distance(walk_distribution(pw.factors[0], 1))
    candidate = math.sqrt(1.0 - (1.0 - h1 * h1) ** 2)
    actual = hellinger_distance(walk_distribution(flat, 2))
    gap = abs(actual - candidate)
    ok = worst <= 1e-9 and gap >= 1e-3
    return CheckResult("product-identity", "pass" if ok else "fail",
                       f"max |formula - oracle| = {worst:.3e}; discrete witness gap {gap:.3e}")


def check_product_bounds(t_grid=(0.5, 1.0, 2.0, 5.0, 10.0)) -> CheckResult:
    """Factor-wise Hellinger bounds bracket the exact value; TV bracket holds."""
    pw = _product_fixture()
    flat = build_flat(pw)
    worst = 0.0
    for t in t_grid:
        exact = product_hellinger_ct(pw, t)
        b = product_hellinger_bounds(pw, t)
        worst = max(worst, b.max_factor_lower - exact, b.exp_lower - exact)
        if b.upper_valid:
            worst = max(worst, exact - b.exp_upper)
        lo, hi = product_tv_bracket(pw, t)
        oracle_tv = tv_distance(heat_distribution(flat, t))
        worst = max(worst, lo - oracle_tv - 1e-9, oracle_tv - hi - 1e-9)
    return CheckResult("product-bounds", "pass" if worst <= 1e-10 else "fail",
                       f"worst bound violation {worst:.3e}")


def check_submultiplicative(max_total=40, t_grid=None) -> CheckResult:
    """4 d_H is non-increasing and submultiplicative on both clocks."""
    t_grid = t_grid or [0.25 * k for k in range(1, 11)]
    worst = 0.0
    for walk in (_lazy_cycle_walk(11), _heisenberg_walk(3)):
        d = [hellinger_distance(walk_distribution(walk, m)) for m in range(max_total + 1)]
        for m in range(max_total):
            worst = max(worst, d[m + 1] - d[m])
        for n in range(1, max_total):
            for m in range(1, max_total - n + 1):
                worst = max(worst, 4.0 * d[n + m] - (4.0 * d[n]) * (4.0 * d[m]))
        dc = {t: hellinger_from_deviation(heat_deviation_spectral(walk, t)) for t in t_grid}
        ts = sorted(t_grid)
        for a, b in zip(ts, ts[1:]):
            worst = max(worst, dc[b] - dc[a])
        for a in ts:
            for b in ts:
                if a + b in dc:
                    worst = max(worst, 4.0 * dc[a + b] - (4.0 * dc[a]) * (4.0 * dc[b]))
    return CheckResult("hellinger-submultiplicative", "pass" if worst <= 1e-10 else "fail",
                       f"worst violation {worst:.3e}")


def check_moderate_growth_suite() -> CheckResult:
    """Diameters and moderate-growth certificates for the cyclic and
    Heisenberg families."""
    problems = []
    for n in range(2, 41):
        g = make_cyclic(n)
        prof = growth_profile(g, canonical_generators(g))
        if prof.diameter != n // 2:
            problems.append(f"Z{n} diameter {prof.diameter} != {n // 2}")
        if not check_moderate_growth(prof, 1.0, 1.0).satisfied:
            problems.append(f"Z{n} fails (1,1) moderate growth")
        if minimal_A(prof, 1.0) > 1.0 + 1e-12:
            problems.append(f"Z{n} minimal A > 1")
    for m in range(3, 8):
        g = make_heisenberg(m)
        prof = growth_profile(g, canonical_generators(g))
        if not (m - 1 <= prof.diameter <= m + 2):
            problems.append(f"H{m} diameter {prof.diameter} outside [{m - 1}, {m + 2}]")
        if not check_moderate_growth(prof, 48.0, 3.0).satisfied:
            problems.append(f"H{m} fails (48,3) moderate growth")
        if minimal_A(prof, 3.0) > 48.0:
            problems.append(f"H{m} minimal A exceeds 48")
    status = "pass" if not problems else "fail"
    return CheckResult("growth-certificates", status,
                       "; ".join(problems) if problems else "cyclic n=2..40 and Heisenberg m=3..7 verified")


def check_discrete_bounds(steps=range(0, 101)) -> CheckResult:
    """Explicit-constant discrete bounds on cyclic and Heisenberg fixtures,
    including the lower-bound prerequisite gate."""
    problems = []
    for n in range(5, 26):
        g = make_cyclic(n)
        gens = canonical_generators(g)
        walk = WalkSpec(g, uniform_law(g, gens))
        prof = growth_profile(g, gens)
        cert = check_moderate_growth(prof, 1.0, 1.0)
        report = check_moderate_bounds(walk, cert, prof, steps)
        if not report.upper_checked or not report.all_ok:
            problems.append(f"Z{n} upper bound failed")
    for m in range(3, 6):
        walk = _heisenberg_walk(m)
        prof = _profile_for(walk)
        cert = check_moderate_growth(prof, 48.0, 3.0)
        report = check_moderate_bounds(walk, cert, prof, steps)
        if not report.upper_checked or not report.all_ok:
            problems.append(f"H{m} upper bound failed")
    gate = check_moderate_bounds(
        _lazy_cycle_walk(11),
        check_moderate_growth(growth_profile(make_cyclic(11), canonical_generators(make_cyclic(11))), 1.0, 1.0),
        growth_profile(make_cyclic(11), canonical_generators(make_cyclic(11))),
        range(0, 5))
    if gate.lower_checked or not any("prerequisite not met" in note for note in gate.notes):
        problems.append("Z11 lower-bound gate did not report 'prerequisite not met'")
    status = "pass" if not problems else "fail"
    return CheckResult("discrete-moderate-bounds", status,
                       "; ".join(problems) if problems else
                       "upper bounds hold on Z5..Z25 and H3..H5; Z11 lower gate reported")


def check_cts_lower_bound(multipliers=(0.5, 1.0, 2.0, 4.0)) -> CheckResult:
    """Continuous-time spectral-gap lower bound, exact on the two-point walk."""
    g2 = make_cyclic(2)
    q = np.array([0.0, 1.0])
    w2 = WalkSpec(g2, q)
    lam = spectral_gap(w2)
    problems = []
    if abs(lam - 2.0) > 1e-12:
        problems.append(f"two-point gap {lam} != 2")
    for t in (0.3, 1.0, 2.5):
        d = tv_from_deviation(heat_deviation_spectral(w2, t))
        if abs(d - 0.5 * math.exp(-2.0 * t)) > 1e-8:
            problems.append(f"two-point closed form off at t={t}")
    for name, walk in standard_fixtures().items():
        if not walk.symmetric:
            continue
        prof = _profile_for(walk)
        lam = spectral_gap(walk)
        for mult in multipliers:
            t = mult * prof.diameter ** 2
            d = tv_from_deviation(heat_deviation_spectral(walk, t))
            if d - 0.5 * math.exp(-lam * t) <= 0:
                problems.append(f"{name}: no positive margin at t={t}")
    status = "pass" if not problems else "fail"
    return CheckResult("cts-lower-bound", status,
                       "; ".join(problems) if problems else
                       "equality on the two-point walk, positive margin on all fixtures")


def check_cts_bound_reports() -> CheckResult:
    """check_cts_bounds accepts every symmetric fixture and all rows pass."""
    problems = []
    for name, walk in standard_fixtures().items():
        if not walk.symmetric:
            continue
        prof = _profile_for(walk)
        d_exp = 3.0 if name.startswith("H") else 1.0
        cert = check_moderate_growth(prof, minimal_A(prof, d_exp), d_exp)
        rho = prof.diameter
        report = check_cts_bounds(walk, cert, prof, [0.5 * rho ** 2, rho ** 2, 2.0 * rho ** 2])
        if not report.all_ok:
            problems.append(f"{name} bound rows failed")
    status = "pass" if not problems else "fail"
    return CheckResult("cts-bound-reports", status,
                       "; ".join(problems) if problems else "all symmetric fixtures pass")


def check_laplace(seed: int = 42) -> CheckResult:
    """Unit values of the cutoff-time functionals and the eval/mixing round trip."""
    problems = []
    s = ExponentialSum((1.0, 1.0, 1.0), (1.0, 2.0, 3.0))
    lt = lambda_tau(s, 0.5)
    if abs(lt.tau_c - math.log(2.0)) > 1e-12 or lt.j != 1:
        problems.append("tau(0.5) != log 2")
    lt = lambda_tau(s, 1.5)
    if abs(lt.tau_c - max(math.log(3.0) / 2.0, math.log(4.0) / 3.0)) > 1e-12 or lt.j != 2:
        problems.append("tau(1.5) mismatch")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        k = int(rng.integers(1, 8))
        row = ExponentialSum(tuple(rng.uniform(0.1, 3.0, k)), tuple(rng.uniform(0.05, 5.0, k)))
        eps = float(rng.uniform(0.05, 0.9)) * row.total_mass
        t = exp_sum_mixing(row, eps)
        if t > 0:
            worst = max(worst, abs(exp_sum_eval(row, t) - eps) / eps)
    if worst > 1e-9:
        problems.append(f"mixing inversion rel err {worst:.2e}")
    status = "pass" if not problems else "fail"
    return CheckResult("laplace-criterion", status,
                       "; ".join(problems) if problems else
                       f"unit values exact; inversion rel err <= {worst:.2e}")


def check_symmetric_gating() -> CheckResult:
    """Non-symmetric fixtures must be skipped by symmetric-only checks, not failed."""
    g = make_cyclic(5)
    q = np.zeros(5)
    q[1], q[4] = 0.7, 0.3
    walk = WalkSpec(g, q)
    if walk.symmetric:
        return CheckResult("symmetric-gating", "fail", "fixture unexpectedly symmetric")
    try:
        spectral_gap(walk)
        return CheckResult("symmetric-gating", "fail", "spectral gap accepted asymmetric law")
    except GroupWalkError:
        pass
    p = walk_distribution(walk, 3)
    viol = _sandwich_violation(tv_distance(p), hellinger_distance(p))
    status = "pass" if viol <= SANDWICH_SLACK else "fail"
    return CheckResult("symmetric-gating", status,
                       "symmetric-only checks skip; metric sandwich still holds")


_CHECKS = {
    "growth": check_moderate_growth_suite,
    "sandwich": check_sandwich,
    "product-identity": check_product_identity,
    "product-bounds": check_product_bounds,
    "submultiplicative": check_submultiplicative,
    "moderate-bounds": check_discrete_bounds,
    "cts-lower": check_cts_lower_bound,
    "cts-reports": check_cts_bound_reports,
    "laplace": check_laplace,
    "gating": check_symmetric_gating,
}


def available_checks() -> list[str]:
    return list(_CHECKS)


def verify_all(seed: int = 42, only: list[str] | None = None) -> VerifyReport:
    """Run the named checks (all by default) in a fixed order."""
    names = only or list(_CHECKS)
    results = []
    for name in names:
        if name not in _CHECKS:
            raise GroupWalkError(f"unknown check {name!r}; available: {available_checks()}")
        fn = _CHECKS[name]
        results.append(fn(seed) if name == "laplace" else fn())
    return VerifyReport(tuple(results), seed)

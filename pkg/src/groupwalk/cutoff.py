"""Cutoff diagnostics: exponential-sum mixing, cutoff-time functionals and
finite-n experiment drivers for product families.

Everything family-sized runs on log-rates. Rows with rates like exp(-n^1.5)
underflow doubles long before n reaches interesting sizes, so the row data
structure is the sorted vector of log rates and every functional (t_n, u_n,
tau(c), proxy mixing times) is computed from differences of logs. The
scale-invariant decision statistics (t_n * l_{n,1} and friends) stay modest
and feed a declared trend test.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .groups import make_cyclic, make_heisenberg, canonical_generators
from .growth import growth_profile
from .products import ProductWalkSpec, build_flat, product_hellinger_ct, default_cache
from .walks import WalkSpec, distance, lazy_law, uniform_law

# ---------------------------------------------------------------------------
# exponential sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentialSum:
    """f(t) = sum_i a_i exp(-lam_i t) with positive coefficients and rates."""

    a: tuple[float, ...]
    lam: tuple[float, ...]
    _order: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        lam = tuple(float(x) for x in self.lam)
        if len(a) != len(lam) or not a:
            raise InvalidParameterError("a and lam must be equally long and nonempty")
        if min(a) <= 0 or min(lam) <= 0:
            raise InvalidParameterError("all coefficients and rates must be positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "lam", lam)
        order = tuple(int(i) for i in np.argsort(lam, kind="stable"))
        object.__setattr__(self, "_order", order)

    @property
    def total_mass(self) -> float:
        return math.fsum(self.a)

    def sorted_view(self) -> tuple[np.ndarray, np.ndarray]:
        """(a, lam) reordered by ascending rate, stable on ties."""
        idx = np.asarray(self._order)
        return np.asarray(self.a)[idx], np.asarray(self.lam)[idx]


def exp_sum_eval(s: ExponentialSum, t: float) -> float:
    """f(t), evaluated through logs when the terms underflow."""
    if t < 0:
        raise InvalidParameterError("time must be >= 0")
    exponents = [math.log(a) - lam * t for a, lam in zip(s.a, s.lam)]
    top = max(exponents)
    if top < -700.0:
        # all terms subnormal; return exp(logsumexp), possibly 0.0
        return math.exp(top + math.log(math.fsum(math.exp(e - top) for e in exponents)))
    return math.fsum(a * math.exp(-lam * t) for a, lam in zip(s.a, s.lam))


def exp_sum_mixing(s: ExponentialSum, eps: float) -> float:
    """min{t >= 0 : f(t) <= eps}; f is strictly decreasing so bisection is exact."""
    if eps <= 0:
        raise InvalidParameterError("eps must be positive")
    if s.total_mass <= eps:
        return 0.0
    lo, hi = 0.0, 1.0
    while exp_sum_eval(s, hi) > eps:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if exp_sum_eval(s, mid) > eps:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass(frozen=True)
class LambdaTau:
    found: bool
    j: int | None = None
    lambda_c: float | None = None
    tau_c: float | None = None
    total_mass: float = 0.0


def lambda_tau(s: ExponentialSum, c: float) -> LambdaTau:
    """Cutoff-time functionals of the sum at threshold c.

    Rates are taken in ascending order with coefficient prefix sums in the
    same order; j is the first index whose prefix mass exceeds c, and
    tau_c = max_{i >= j} log(1 + a_1 + ... + a_i) / lam_i.
    """
    if c <= 0:
        raise InvalidParameterError("c must be positive")
    a, lam = s.sorted_view()
    prefix = np.cumsum(a)
    total = float(prefix[-1])
    hits = np.nonzero(prefix > c)[0]
    if hits.size == 0:
        return LambdaTau(found=False, total_mass=total)
    j = int(hits[0])
    tau = max(math.log1p(float(prefix[i])) / float(lam[i]) for i in range(j, len(lam)))
    return LambdaTau(found=True, j=j + 1, lambda_c=float(lam[j]), tau_c=tau, total_mass=total)


# log-space versions for unit-coefficient rows (a_i = 1, lam_i = exp(log_lam))


def _unit_row_log_tau(log_lam_sorted: np.ndarray, c: float) -> tuple[int, float, float] | None:
    """(j, log lambda_c, log tau_c) for a row with unit coefficients."""
    k = len(log_lam_sorted)
    j = int(math.floor(c)) + 1  # prefix sums are 1, 2, ..., k
    if j > k:
        return None
    log_tau = max(math.log(math.log1p(i)) - float(log_lam_sorted[i - 1])
                  for i in range(j, k + 1))
    return j, float(log_lam_sorted[j - 1]), log_tau


def _unit_row_mixing_scaled(log_lam_sorted: np.ndarray, eps: float) -> float:
    """T(eps) * lam_min for f(t) = sum exp(-lam_i t), computed on the scaled clock.

    Substituting s = lam_min * t keeps every quantity representable even when
    the rates themselves underflow.
    """
    k = len(log_lam_sorted)
    if k <= eps:
        return 0.0
    log_ratios = log_lam_sorted - log_lam_sorted[0]  # >= 0, may be astronomically large

    def f(sclock: float) -> float:
        if sclock <= 0.0:
            return float(k)
        # term_i = exp(-ratio_i * s); anything with log(ratio_i * s) > ~6.6 is 0
        log_args = log_ratios + math.log(sclock)
        live = log_args <= 6.62
        return float(np.sum(np.exp(-np.exp(log_args[live]))))

    lo, hi = 0.0, math.log(k / eps) + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f(mid) > eps:
            lo = mid
        else:
            hi = mid
    return hi


# ---------------------------------------------------------------------------
# cutoff-time formulas
# ---------------------------------------------------------------------------


def row_cutoff_time_log(log_lrow: np.ndarray) -> float:
    """log t_n = max_i (log log(i+1) - log l_i) over a non-decreasing log-rate row."""
    arr = np.asarray(log_lrow, dtype=float)
    if arr.size == 0:
        raise InvalidParameterError("empty rate row")
    if np.any(np.diff(arr) < 0):
        raise InvalidParameterError("rate row must be non-decreasing")
    return max(math.log(math.log(i + 2)) - float(arr[i]) for i in range(arr.size))


def row_cutoff_time(lrow) -> float:
    """t_n = max_i log(i+1) / l_i for a non-decreasing positive row."""
    arr = np.asarray(lrow, dtype=float)
    if arr.size == 0 or arr.min() <= 0:
        raise InvalidParameterError("rate row must be positive and nonempty")
    if np.any(np.diff(arr) < 0):
        raise InvalidParameterError("rate row must be non-decreasing")
    return math.exp(row_cutoff_time_log(np.log(arr)))


@dataclass(frozen=True)
class MonotoneCutoffResult:
    value: float
    statistic: float       # value itself when rates increase, value * last rate when they decrease
    direction: str


def monotone_cutoff_time(lseq, direction: str) -> MonotoneCutoffResult:
    """max_i log(i+1) / l_i over a monotone rate sequence, traversed in reverse
    when the rates decrease, plus the scale-free decision statistic."""
    arr = np.asarray(lseq, dtype=float)
    if arr.size == 0 or arr.min() <= 0:
        raise InvalidParameterError("rate sequence must be positive and nonempty")
    diffs = np.diff(arr)
    if direction == "increasing":
        if np.any(diffs < 0):
            raise InvalidParameterError("sequence is not non-decreasing")
        u = max(math.log(i + 2) / float(arr[i]) for i in range(arr.size))
        return MonotoneCutoffResult(value=u, statistic=u, direction=direction)
    if direction == "decreasing":
        if np.any(diffs > 0):
            raise InvalidParameterError("sequence is not non-increasing")
        n = arr.size
        u = max(math.log(i + 1) / float(arr[n - i]) for i in range(1, n + 1))
        return MonotoneCutoffResult(value=u, statistic=u * float(arr[-1]), direction=direction)
    raise InvalidParameterError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# trend test
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrendConfig:
    """Declared finite-n proxy for "tends to infinity" vs "stays bounded".

    Over the upper half of the index range: growing needs the least-squares
    slope of the statistic against log n, normalized by the window mean, to
    exceed ``rel_slope`` with a net increase across the window; bounded needs
    the window max/min ratio below ``bounded_ratio``.
    """

    rel_slope: float = 0.08
    bounded_ratio: float = 2.0
    min_points: int = 4

    def as_dict(self) -> dict:
        return {"rel_slope": self.rel_slope, "bounded_ratio": self.bounded_ratio,
                "min_points": self.min_points}


@dataclass(frozen=True)
class TrendResult:
    verdict: str           # growing | bounded | inconclusive
    slope: float
    rel_slope: float
    window_mean: float
    window_ratio: float
    window_start: int


def trend_verdict(ns, values, cfg: TrendConfig = TrendConfig()) -> TrendResult:
    ns = list(ns)
    values = [float(v) for v in values]
    if len(ns) != len(values) or not ns:
        raise InvalidParameterError("trend test needs matching nonempty series")
    start = len(ns) // 2
    win_n, win_v = ns[start:], values[start:]
    if len(win_v) < cfg.min_points:
        return TrendResult("inconclusive", 0.0, 0.0, 0.0, 0.0, ns[start])
    x = np.log(np.asarray(win_n, dtype=float))
    y = np.asarray(win_v)
    xc = x - x.mean()
    slope = float(xc @ (y - y.mean()) / (xc @ xc))
    mean = float(y.mean())
    ratio = float(y.max() / y.min()) if y.min() > 0 else math.inf
    rel = slope / mean if mean > 0 else 0.0
    if rel > cfg.rel_slope and win_v[-1] > win_v[0]:
        verdict = "growing"
    elif ratio < cfg.bounded_ratio:
        verdict = "bounded"
    else:
        verdict = "inconclusive"
    return TrendResult(verdict, slope, rel, mean, ratio, ns[start])


# ---------------------------------------------------------------------------
# Laplace criterion scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanSeries:
    c: float
    eps: float | None        # None for tau(c)*lambda(c) series
    ns: tuple[int, ...]
    values: tuple[float, ...]
    skipped: tuple[int, ...]  # rows where c >= total mass
    trend: TrendResult


@dataclass(frozen=True)
class ScanReport:
    series: tuple[ScanSeries, ...]
    remark_consistent: bool
    trend_config: TrendConfig


def cutoff_criterion_scan(rows, c_grid, eps_grid=(),
                          cfg: TrendConfig = TrendConfig()) -> ScanReport:
    """Tabulate tau_n(c) lambda_n(c) and T_n(eps) lambda_n(c) across rows.

    ``rows`` is a sequence of (n, ExponentialSum). The report also checks the
    finite-n analogue of the threshold monotonicity: once the tau-series at
    some c is judged growing, every larger c in the grid must be too.
    """
    rows = sorted(rows, key=lambda item: item[0])
    series = []
    verdict_by_c = {}
    for c in sorted(c_grid):
        ns, vals, skipped = [], [], []
        for n, s in rows:
            lt = lambda_tau(s, c)
            if not lt.found:
                skipped.append(n)
                continue
            ns.append(n)
            vals.append(lt.tau_c * lt.lambda_c)
        trend = trend_verdict(ns, vals, cfg) if ns else TrendResult(
            "inconclusive", 0.0, 0.0, 0.0, 0.0, 0)
        verdict_by_c[c] = trend.verdict
        series.append(ScanSeries(c, None, tuple(ns), tuple(vals), tuple(skipped), trend))
        for eps in sorted(eps_grid):
            ns_e, vals_e, skipped_e = [], [], []
            for n, s in rows:
                lt = lambda_tau(s, c)
                if not lt.found:
                    skipped_e.append(n)
                    continue
                ns_e.append(n)
                vals_e.append(exp_sum_mixing(s, eps) * lt.lambda_c)
            trend_e = trend_verdict(ns_e, vals_e, cfg) if ns_e else TrendResult(
                "inconclusive", 0.0, 0.0, 0.0, 0.0, 0)
            series.append(ScanSeries(c, eps, tuple(ns_e), tuple(vals_e),
                                     tuple(skipped_e), trend_e))
    cs = sorted(verdict_by_c)
    consistent = True
    for i, c in enumerate(cs):
        if verdict_by_c[c] == "growing":
            if any(verdict_by_c[c2] != "growing" for c2 in cs[i + 1:]):
                consistent = False
    return ScanReport(tuple(series), consistent, cfg)


# ---------------------------------------------------------------------------
# boundedness probe for monotone rate rules
# ---------------------------------------------------------------------------

_RULES = {
    "power": lambda n, p: p * math.log(n),
    "logpower": lambda n, p: p * math.log(math.log(n + 1.0)),
    "exponential": lambda n, g: -(n ** g),
    "geometric": lambda n, r: n * math.log(r),
    "constant": lambda n, c: math.log(c),
}


def parse_rate_rule(text: str):
    """"name:param" -> (name, param, callable n -> log l_n)."""
    m = re.fullmatch(r"([a-z]+):([-+0-9.eE]+)", text.strip())
    if not m or m.group(1) not in _RULES:
        raise InvalidParameterError(
            f"unknown rate rule {text!r}; use one of {sorted(_RULES)} as name:param")
    name, param = m.group(1), float(m.group(2))
    if name == "geometric" and param <= 0:
        raise InvalidParameterError("geometric rule needs r > 0")
    if name == "constant" and param <= 0:
        raise InvalidParameterError("constant rule needs c > 0")
    if name == "exponential" and param <= 0:
        raise InvalidParameterError("exponential rule needs gamma > 0")
    fn = _RULES[name]
    return name, param, lambda n: fn(n, param)


@dataclass(frozen=True)
class ProbeRow:
    n: int
    log_l: float
    logn_over_l: float
    ratio_next: float | None
    un_statistic: float


@dataclass(frozen=True)
class ProbeReport:
    rows: tuple[ProbeRow, ...]
    direction: str
    clause: str
    statistic_trend: TrendResult


def boundedness_probe(rule: str, n_range, cfg: TrendConfig = TrendConfig()) -> ProbeReport:
    """Tabulate the monotone cutoff-time statistic along a built-in rate rule.

    For non-decreasing rules the deciding quantity is sup log n / l_n; for
    non-increasing rules the ratio l_n / l_(n+1) decides: drifting down to 1
    means the statistic grows without bound, staying bounded away from 1
    pins it.
    """
    _, _, logl = parse_rate_rule(rule)
    ns = sorted(set(int(n) for n in n_range))
    if not ns or ns[0] < 1:
        raise InvalidParameterError("n_range must contain positive integers")
    logs = {n: logl(n) for n in ns}
    nmax = ns[-1]
    full = np.array([logl(n) for n in range(1, nmax + 2)])
    diffs = np.diff(full[:-1])
    if np.all(diffs >= -1e-15):
        direction = "increasing"
    elif np.all(diffs <= 1e-15):
        direction = "decreasing"
    else:
        raise InvalidParameterError(f"rule {rule!r} is not monotone over the range")
    rows = []
    stats = []
    for n in ns:
        row = full[:n]
        if direction == "increasing":
            log_u = max(math.log(math.log(i + 2)) - float(row[i]) for i in range(n))
            stat = math.exp(log_u)
        else:
            log_u = max(math.log(math.log(i + 1)) - float(row[n - i]) for i in range(1, n + 1))
            stat = math.exp(log_u + float(row[n - 1]))
        stats.append(stat)
        rows.append(ProbeRow(
            n=n,
            log_l=float(logs[n]),
            logn_over_l=math.exp(math.log(math.log(n)) - logs[n]) if n > 1 else 0.0,
            ratio_next=math.exp(float(full[n - 1] - full[n])),
            un_statistic=stat,
        ))
    trend = trend_verdict(ns, stats, cfg)
    if direction == "increasing":
        sup_vals = [r.logn_over_l for r in rows]
        unbounded = trend_verdict(ns, [max(sup_vals[:i + 1]) for i in range(len(ns))], cfg)
        clause = ("sup log n / l_n unbounded -> u_n grows"
                  if unbounded.verdict == "growing" else
                  "sup log n / l_n bounded -> u_n bounded")
    else:
        tail = [r.ratio_next for r in rows[len(rows) // 2:]]
        excess_first, excess_last = tail[0] - 1.0, tail[-1] - 1.0
        if excess_last <= 0.02 or excess_last <= 0.75 * excess_first:
            clause = "l_n / l_(n+1) -> 1 -> u_n l_n grows"
        elif excess_last >= 0.05 and excess_last >= 0.9 * excess_first:
            clause = "liminf l_n / l_(n+1) > 1 -> u_n l_n bounded"
        else:
            clause = "ratio behaviour inconclusive on this range"
    return ProbeReport(tuple(rows), direction, clause, trend)


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

FACTOR_CAP = 2000
_HEIS_RHO_EXACT_LIMIT = 9  # modulus up to which the diameter comes from BFS
_heis_rho_cache: dict[int, int] = {}


def _heisenberg_rho(m: int) -> int:
    if m <= _HEIS_RHO_EXACT_LIMIT:
        if m not in _heis_rho_cache:
            g = make_heisenberg(m)
            _heis_rho_cache[m] = growth_profile(g, canonical_generators(g)).diameter
        return _heis_rho_cache[m]
    # inside the known bracket [m - 1, m + 2]; m + 1 tracks the exact small values
    return m + 1


def recipe_rho(recipe: str, i: int) -> int:
    """Graph diameter of the i-th factor of the named family."""
    if recipe == "heisenberg":
        return _heisenberg_rho(i + 2)
    if recipe == "lazy-cycle":
        return (i + 2) // 2
    raise InvalidParameterError(f"unknown factor recipe {recipe!r}")


def recipe_walk(recipe: str, i: int) -> WalkSpec | None:
    """Concrete WalkSpec for factor i, or None when it exceeds the factor cap."""
    if recipe == "heisenberg":
        m = i + 2
        if m ** 3 > FACTOR_CAP:
            return None
        g = make_heisenberg(m)
        return WalkSpec(g, uniform_law(g, canonical_generators(g)))
    if recipe == "lazy-cycle":
        n = i + 2
        if n > FACTOR_CAP:
            return None
        g = make_cyclic(n)
        return WalkSpec(g, lazy_law(g, canonical_generators(g)))
    raise InvalidParameterError(f"unknown factor recipe {recipe!r}")


def _logsumexp(values: np.ndarray) -> float:
    top = float(np.max(values))
    return top + math.log(float(np.sum(np.exp(values - top))))


@dataclass(frozen=True)
class FamilyRow:
    n: int
    log_q: float
    log_l_row: tuple[float, ...]   # sorted ascending
    log_t: float
    log_l1: float
    stat: float                    # t_n * l_{n,1}
    mix_products: dict             # eps -> T_n(eps) * l_{n,1} on the proxy sum

    def exponential_sum(self) -> ExponentialSum | None:
        lams = [math.exp(x) for x in self.log_l_row]
        if min(lams) <= 0.0:
            return None
        return ExponentialSum(tuple(1.0 for _ in lams), tuple(lams))


@dataclass(frozen=True)
class FamilyBundle:
    rows: tuple[FamilyRow, ...]
    trend: TrendResult
    trend_config: TrendConfig
    recipe: str
    kind: str


def family_rows_from_log_weights(log_p: np.ndarray, log_rho2: np.ndarray, n_values,
                                 eps_grid=(0.25,)) -> list[FamilyRow]:
    """Rows of sorted log rates log(p_i / (q_n rho_i^2)) for prefix products."""
    rows = []
    for n in n_values:
        lp = log_p[:n]
        log_q = _logsumexp(lp)
        log_l = np.sort(lp - log_q - log_rho2[:n])
        log_t = row_cutoff_time_log(log_l)
        stat = math.exp(log_t + float(log_l[0]))
        mix = {eps: _unit_row_mixing_scaled(log_l, eps) for eps in eps_grid}
        rows.append(FamilyRow(
            n=int(n), log_q=log_q, log_l_row=tuple(float(x) for x in log_l),
            log_t=log_t, log_l1=float(log_l[0]), stat=stat, mix_products=mix))
    return rows


_WEIGHT_RULES = ("polyexp", "constant", "power")


def parse_weight_rule(text: str):
    """Deterministic weight rules: "polyexp:gamma=G", "constant:c=C", "power:a=A".

    polyexp gives log p_n = 2 log n - n^gamma, the weight shape driving the
    phase-transition experiments.
    """
    m = re.fullmatch(r"([a-z]+):([a-z]+)=([-+0-9.eE]+)", text.strip())
    if not m or m.group(1) not in _WEIGHT_RULES:
        raise InvalidParameterError(
            f"unknown weight rule {text!r}; builtins: polyexp:gamma=, constant:c=, power:a=")
    name, value = m.group(1), float(m.group(3))
    if name == "polyexp":
        if value <= 0:
            raise InvalidParameterError("polyexp needs gamma > 0")
        return name, lambda n: 2.0 * math.log(n) - n ** value
    if name == "constant":
        if value <= 0:
            raise InvalidParameterError("constant weight must be positive")
        return name, lambda n: math.log(value)
    if value == 0:
        return name, lambda n: 0.0
    return name, lambda n: value * math.log(n)


@dataclass
class FamilySpec:
    """Description of a product family: factor recipe, weights and range."""

    kind: str                  # "GP" (nested prefix products) or "FP" (triangular rows)
    recipe: str                # "heisenberg" | "lazy-cycle"
    weight_rule: str
    n_range: list[int]
    seed: int = 0
    trend: TrendConfig = field(default_factory=TrendConfig)

    def __post_init__(self):
        if self.kind not in ("GP", "FP"):
            raise InvalidParameterError("family kind must be GP or FP")
        if self.recipe not in ("heisenberg", "lazy-cycle"):
            raise InvalidParameterError(f"unknown factor recipe {self.recipe!r}")
        self.n_range = sorted(set(int(n) for n in self.n_range))
        if not self.n_range or self.n_range[0] < 1:
            raise InvalidParameterError("n_range must contain positive integers")


def build_family(fs: FamilySpec, eps_grid=(0.25,)) -> FamilyBundle:
    """Per-n rate rows, cutoff-time statistics and the trend verdict."""
    _, log_weight = parse_weight_rule(fs.weight_rule)
    nmax = fs.n_range[-1]
    log_p = np.array([log_weight(i) for i in range(1, nmax + 1)])
    log_rho2 = np.array([2.0 * math.log(recipe_rho(fs.recipe, i)) for i in range(1, nmax + 1)])
    rows = family_rows_from_log_weights(log_p, log_rho2, fs.n_range, eps_grid)
    trend = trend_verdict([r.n for r in rows], [r.stat for r in rows], fs.trend)
    return FamilyBundle(tuple(rows), trend, fs.trend, fs.recipe, fs.kind)


def parse_family_file(text: str) -> FamilySpec:
    """Flat key=value format; '#' starts a comment.

    Recognized keys: kind, recipe, weight_rule, n_range (e.g. "1..60"),
    seed, trend_rel_slope, trend_bounded_ratio, trend_min_points.
    """
    fields: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameterError(f"bad family-spec line {raw!r}")
        key, value = line.split("=", 1)
        fields[key.strip()] = value.strip()
    missing = {"kind", "recipe", "weight_rule", "n_range"} - set(fields)
    if missing:
        raise InvalidParameterError(f"family spec missing keys: {sorted(missing)}")
    trend = TrendConfig(
        rel_slope=float(fields.get("trend_rel_slope", TrendConfig.rel_slope)),
        bounded_ratio=float(fields.get("trend_bounded_ratio", TrendConfig.bounded_ratio)),
        min_points=int(fields.get("trend_min_points", TrendConfig.min_points)),
    )
    return FamilySpec(
        kind=fields["kind"],
        recipe=fields["recipe"],
        weight_rule=fields["weight_rule"],
        n_range=parse_n_range(fields["n_range"]),
        seed=int(fields.get("seed", 0)),
        trend=trend,
    )


def parse_n_range(text: str, min_value: int = 1) -> list[int]:
    """"1..60" or a comma-separated list of indices."""
    text = text.strip()
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo < min_value or hi < lo:
            raise InvalidParameterError(f"bad range {text!r}")
        return list(range(lo, hi + 1))
    try:
        values = sorted(set(int(p) for p in text.split(",") if p.strip()))
    except ValueError:
        raise InvalidParameterError(f"bad n_range {text!r}") from None
    if not values or values[0] < min_value:
        raise InvalidParameterError(f"bad n_range {text!r}")
    return values


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactSmallRow:
    n: int
    t: float
    hellinger_exact: float
    lower_max_factor: float
    lower_exp: float
    lower_proof_form: float
    c1_fitted: float
    flat_hellinger_ct: float | None
    flat_hellinger_discrete: float | None
    discrete_steps: int | None


@dataclass(frozen=True)
class HeisenbergExperiment:
    gamma: float
    rows: tuple[FamilyRow, ...]
    trend: TrendResult
    trend_config: TrendConfig
    exact_small: tuple[ExactSmallRow, ...]


def experiment_heisenberg(gamma: float, n_range, mode: str = "formula",
                          cfg: TrendConfig = TrendConfig(),
                          eps_grid=(0.25,)) -> HeisenbergExperiment:
    """Phase-transition driver for nested Heisenberg products with
    weights p_n = n^2 exp(-n^gamma).

    Formula mode tracks the scale-free statistic t_n * l_{n,1}; its trend
    verdict flips from growing to bounded as gamma crosses 1. Exact-small
    mode additionally evaluates true continuous-time product Hellinger
    curves for up to four factors and records the proof-form lower bound
    with a fitted per-factor decay constant.
    """
    if gamma <= 0:
        raise InvalidParameterError("gamma must be positive")
    if mode not in ("formula", "exact-small"):
        raise InvalidParameterError("mode must be formula or exact-small")
    fs = FamilySpec(kind="GP", recipe="heisenberg",
                    weight_rule=f"polyexp:gamma={gamma!r}", n_range=list(n_range), trend=cfg)
    bundle = build_family(fs, eps_grid)
    exact_rows: list[ExactSmallRow] = []
    if mode == "exact-small":
        exact_rows = _heisenberg_exact_small(gamma, [r for r in bundle.rows if r.n <= 4])
    return HeisenbergExperiment(gamma, bundle.rows, bundle.trend, cfg, tuple(exact_rows))


def _heisenberg_exact_small(gamma: float, rows) -> list[ExactSmallRow]:
    cache = default_cache()
    out = []
    for row in rows:
        n = row.n
        factors = [recipe_walk("heisenberg", i) for i in range(1, n + 1)]
        if any(f is None for f in factors):
            continue
        log_p = np.array([2.0 * math.log(i) - i ** gamma for i in range(1, n + 1)])
        weights = np.exp(log_p - _logsumexp(log_p))
        weights /= weights.sum()
        pw = ProductWalkSpec(factors, weights)
        rhos = [recipe_rho("heisenberg", i) for i in range(1, n + 1)]
        t_n = math.exp(row.log_t)
        flat = build_flat(pw) if n <= 2 else None
        for mult in (0.25, 0.5, 1.0, 2.0):
            t = mult * t_n
            hs = [cache.hellinger_ct(f, w * t) for f, w in zip(factors, weights)]
            exact = product_hellinger_ct(pw, t, cache=cache)
            ssq = math.fsum(h * h for h in hs)
            # fit the smallest per-factor decay constant consistent with
            # (1/4) exp(-c1 * s / rho^2) <= d on this grid point
            c1 = 0.0
            for h, w, rho in zip(hs, weights, rhos):
                s = w * t
                if s > 0 and 0 < h < 0.25:
                    c1 = max(c1, -(rho ** 2) * math.log(4.0 * h) / s)
            g_val = math.fsum(
                math.exp(-min(2.0 * c1 * w * t / rho ** 2, 745.0))
                for w, rho in zip(weights, rhos))
            proof_lower = math.sqrt(max(1.0 - math.exp(-g_val / 16.0), 0.0))
            flat_ct = flat_disc = None
            steps = None
            if flat is not None:
                flat_ct = distance(flat, "hellinger", "continuous", t)
                steps = int(round(t))
                flat_disc = distance(flat, "hellinger", "discrete", steps)
            out.append(ExactSmallRow(
                n=n, t=t, hellinger_exact=exact,
                lower_max_factor=max(hs),
                lower_exp=math.sqrt(max(1.0 - math.exp(-ssq), 0.0)),
                lower_proof_form=proof_lower,
                c1_fitted=c1,
                flat_hellinger_ct=flat_ct,
                flat_hellinger_discrete=flat_disc,
                discrete_steps=steps,
            ))
    return out


_SAMPLERS = ("uniform", "exponential", "lognormal", "constant")


def parse_sampler(text: str):
    """"uniform(a,b)" | "exponential(rate)" | "lognormal(mu,sigma)" | "constant(c)".

    Returns (label, mean_log, draw) where draw(rng, size) samples the positive
    weight variables and mean_log is E[log X] for the exp-mode hypothesis.
    """
    m = re.fullmatch(r"([a-z]+)\(([^)]*)\)", text.strip())
    if not m or m.group(1) not in _SAMPLERS:
        raise InvalidParameterError(
            f"unknown sampler {text!r}; builtins: {', '.join(_SAMPLERS)}")
    name = m.group(1)
    args = [float(p) for p in m.group(2).split(",")] if m.group(2).strip() else []
    if name == "uniform":
        if len(args) != 2 or not 0 <= args[0] < args[1]:
            raise InvalidParameterError("uniform sampler needs 0 <= a < b")
        a, b = args
        if a == 0.0:
            mean_log = (b * math.log(b) - b) / b  # limit of the closed form as a -> 0
        else:
            mean_log = (b * math.log(b) - b - a * math.log(a) + a) / (b - a)
        return text, mean_log, lambda rng, size: rng.uniform(a, b, size)
    if name == "exponential":
        if len(args) != 1 or args[0] <= 0:
            raise InvalidParameterError("exponential sampler needs rate > 0")
        rate = args[0]
        mean_log = -np.euler_gamma - math.log(rate)
        return text, mean_log, lambda rng, size: rng.exponential(1.0 / rate, size)
    if name == "lognormal":
        if len(args) != 2 or args[1] <= 0:
            raise InvalidParameterError("lognormal sampler needs (mu, sigma > 0)")
        mu, sigma = args
        return text, mu, lambda rng, size: rng.lognormal(mu, sigma, size)
    if len(args) != 1 or args[0] <= 0:
        raise InvalidParameterError("constant sampler needs c > 0")
    c = args[0]
    return text, math.log(c), lambda rng, size: np.full(size, c)


@dataclass(frozen=True)
class TrialResult:
    trial: int
    verdict: str
    mu_hat: float | None
    stat_series: tuple[float, ...]       # decision statistic per n
    raw_stat_series: tuple[float, ...]   # sorted sampled-ratio statistic per n


@dataclass(frozen=True)
class RandomizedExperiment:
    mode: str
    gamma: float | None
    sampler: str
    seed: int
    n_values: tuple[int, ...]
    trials: tuple[TrialResult, ...]
    fractions: dict
    trend_config: TrendConfig


def experiment_randomized(mode: str, dist: str, seed: int, n_range, trials: int,
                          gamma: float | None = None,
                          cfg: TrendConfig = TrendConfig()) -> RandomizedExperiment:
    """Randomized lazy-cycle products: polynomial or multiplicative weights.

    Weights are p_n = (X_1 + ... + X_n)^gamma (poly mode, gamma > 0) or
    p_n = X_1 ... X_n (exp mode, needs E[log X] > 0). Each trial redraws the
    sequence from a per-trial derived seed. The reported raw statistic comes
    from the sorted sampled ratios p_i / rho_i^2; the cutoff verdict in poly
    mode is taken on the law-of-large-numbers comparables
    l_n = mu_hat^gamma n^(gamma-2), whose trend is the almost-sure dichotomy
    the finite-n proxy is after (the raw head noise freezes the sampled
    statistic on exactly the boundary cases the experiment probes).
    """
    if mode not in ("poly", "exp"):
        raise InvalidParameterError("mode must be poly or exp")
    if mode == "poly" and (gamma is None or gamma <= 0):
        raise InvalidParameterError("poly mode needs gamma > 0")
    if trials < 1:
        raise InvalidParameterError("at least one trial required")
    label, mean_log, draw = parse_sampler(dist)
    if mode == "exp" and mean_log <= 0:
        raise InvalidParameterError(
            f"exp mode needs E[log X] > 0; sampler {label} has E[log X] = {mean_log:g}")
    n_values = sorted(set(int(n) for n in n_range))
    if not n_values or n_values[0] < 1:
        raise InvalidParameterError("n_range must contain positive integers")
    nmax = n_values[-1]
    log_rho2 = np.array([2.0 * math.log((i + 2) // 2) for i in range(1, nmax + 1)])
    results = []
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        xs = draw(rng, nmax)
        xs = np.maximum(xs, 1e-300)
        if mode == "poly":
            csum = np.cumsum(xs)
            log_p = gamma * np.log(csum)
            mu_hat = float(csum[-1] / nmax)
            idx = np.arange(1, nmax + 1, dtype=float)
            log_comp = gamma * math.log(mu_hat) + (gamma - 2.0) * np.log(idx)
        else:
            log_p = np.cumsum(np.log(xs))
            mu_hat = None
            log_comp = None
        raw_rows = log_p - log_rho2
        raw_stats = [_sorted_row_stat(raw_rows[:n]) for n in n_values]
        if mode == "poly":
            dec_stats = [_sorted_row_stat(log_comp[:n]) for n in n_values]
        else:
            dec_stats = raw_stats
        verdict = trend_verdict(n_values, dec_stats, cfg).verdict
        results.append(TrialResult(trial, verdict, mu_hat,
                                   tuple(dec_stats), tuple(raw_stats)))
    fractions = {v: sum(1 for r in results if r.verdict == v) / trials
                 for v in ("growing", "bounded", "inconclusive")}
    return RandomizedExperiment(mode, gamma, label, seed, tuple(n_values),
                                tuple(results), fractions, cfg)


def _sorted_row_stat(log_row: np.ndarray) -> float:
    """t * l_1 of the non-decreasing rearrangement of a log-rate row."""
    row = np.sort(np.asarray(log_row, dtype=float))
    return math.exp(row_cutoff_time_log(row) + float(row[0]))

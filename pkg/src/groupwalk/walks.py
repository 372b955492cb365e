"""Exact evolution of a single random walk and its distance-to-uniform curves.

Distributions are dense float vectors indexed by group elements. Discrete
time uses exact convolution powers; continuous time uses uniformization
(a truncated Poisson mixture of the discrete powers). For symmetric step
laws a spectral evaluator provides full relative accuracy deep in the tail,
where the uniformized values sit at double-precision noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidParameterError,
    ScanCapExceededError,
    UnsupportedWalkError,
)
from .groups import CyclicTable, GeneratorSet, GroupTable, ProductTable, generator_set
from .growth import GrowthProfile, ModerateGrowthCert

PROB_TOL = 1e-12
DEFAULT_HEAT_TOL = 1e-13


def validate_distribution(group: GroupTable, probs) -> np.ndarray:
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (group.order,):
        raise InvalidParameterError(
            f"distribution length {probs.shape} does not match |{group.label}| = {group.order}")
    if probs.min() < -PROB_TOL:
        raise InvalidParameterError("distribution has a negative entry")
    if abs(float(probs.sum()) - 1.0) > PROB_TOL:
        raise InvalidParameterError(f"distribution sums to {probs.sum()!r}, not 1")
    return np.maximum(probs, 0.0)


def delta(group: GroupTable) -> np.ndarray:
    p = np.zeros(group.order)
    p[group.id_index] = 1.0
    return p


def uniform(group: GroupTable) -> np.ndarray:
    return np.full(group.order, 1.0 / group.order)


def lazy_law(group: GroupTable, gens: GeneratorSet) -> np.ndarray:
    """Q(id) = 1/2, remaining mass uniform over the non-identity generators."""
    others = [g for g in gens.members if g != group.id_index]
    if not others:
        raise InvalidParameterError("lazy law needs at least one non-identity generator")
    q = np.zeros(group.order)
    q[group.id_index] = 0.5
    q[others] += 0.5 / len(others)
    return q


def uniform_law(group: GroupTable, gens: GeneratorSet) -> np.ndarray:
    """Uniform mass over the whole generator set (identity included if present)."""
    q = np.zeros(group.order)
    q[list(gens.members)] = 1.0 / len(gens.members)
    return q


@dataclass
class WalkSpec:
    """A random walk: a group plus the increment law Q.

    The support is derived from Q and checked to generate the group, which
    makes the walk irreducible with uniform stationary law. Immutable after
    construction apart from internal caches; safe to share across readers.
    """

    group: GroupTable
    step_law: np.ndarray
    support: GeneratorSet = field(init=False)
    symmetric: bool = field(init=False)
    _pow_cache: dict = field(init=False, repr=False, compare=False)
    _eig: tuple | None = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        self.step_law = validate_distribution(self.group, self.step_law)
        members = tuple(int(i) for i in np.nonzero(self.step_law)[0])
        inv_members = {int(self.group.inv(x)) for x in members}
        self.symmetric = set(members) == inv_members and all(
            abs(self.step_law[x] - self.step_law[int(self.group.inv(x))]) <= PROB_TOL
            for x in members
        )
        self.support = generator_set(self.group, members, symmetric=self.symmetric)
        self._pow_cache = {}

    @property
    def eta(self) -> float:
        """Smallest step probability on the support."""
        return float(min(self.step_law[x] for x in self.support.members))

    @property
    def lazy(self) -> bool:
        return self.step_law[self.group.id_index] >= 0.5 - PROB_TOL

    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha1(self.step_law.tobytes()).hexdigest()[:16]
        return f"{self.group.label}#{h}"


def convolve(f: np.ndarray, g: np.ndarray, group: GroupTable) -> np.ndarray:
    """(f*g)(x) = sum_z f(z) g(z^-1 x), streamed over the support of f."""
    if f.shape != (group.order,) or g.shape != (group.order,):
        raise InvalidParameterError("convolution operands must live on the given group")
    out = np.zeros(group.order)
    xs = np.arange(group.order)
    support = np.nonzero(f)[0]
    for z in support:
        out += f[z] * g[group.op(int(group.inv(int(z))), xs)]
    return out


def walk_distribution(walk: WalkSpec, m: int) -> np.ndarray:
    """Q^(m) by repeated squaring with a cached doubling ladder."""
    if m < 0:
        raise InvalidParameterError("step count must be >= 0")
    if m == 0:
        return delta(walk.group)
    cache = walk._pow_cache
    if m in cache:
        return cache[m]

    def ladder(k: int) -> np.ndarray:
        if k in cache:
            return cache[k]
        if k == 1:
            cache[1] = walk.step_law
            return walk.step_law
        half = ladder(k // 2)
        cache[k] = convolve(half, half, walk.group)
        return cache[k]

    result = None
    bit = 1
    while bit <= m:
        if m & bit:
            piece = ladder(bit)
            result = piece if result is None else convolve(piece, result, walk.group)
        bit <<= 1
    cache[m] = result
    return result


def _poisson_window(t: float, tol: float) -> tuple[int, int, np.ndarray]:
    """Contiguous index window whose Poisson(t) mass is >= 1 - tol.

    Grown outward from the mode so large t keeps the window near t +- O(sqrt t).
    """

    def logw(m: int) -> float:
        return -t + m * math.log(t) - math.lgamma(m + 1)

    mode = max(int(t), 0)
    lo = hi = mode
    weights = {mode: math.exp(logw(mode))}
    acc = weights[mode]
    while acc < 1.0 - tol:
        w_lo = math.exp(logw(lo - 1)) if lo > 0 else -1.0
        w_hi = math.exp(logw(hi + 1))
        if w_hi >= w_lo:
            hi += 1
            weights[hi] = w_hi
            acc += w_hi
        else:
            lo -= 1
            weights[lo] = w_lo
            acc += w_lo
    return lo, hi, np.array([weights[m] for m in range(lo, hi + 1)])


def heat_distribution(walk: WalkSpec, t: float, tol: float = DEFAULT_HEAT_TOL) -> np.ndarray:
    """H_t(id, .) via uniformization, renormalized after truncation.

    The dropped Poisson tail has mass <= tol, so each entry is accurate to
    tol before renormalization.
    """
    if t < 0:
        raise InvalidParameterError("time must be >= 0")
    if not 0 < tol <= 1e-6:
        raise InvalidParameterError("tol must lie in (0, 1e-6]")
    if t == 0:
        return delta(walk.group)
    lo, hi, weights = _poisson_window(t, tol)
    p = walk_distribution(walk, lo)
    out = weights[0] * p
    for m in range(lo + 1, hi + 1):
        p = convolve(walk.step_law, p, walk.group)
        out += weights[m - lo] * p
    return out / out.sum()


def _eigensystem(walk: WalkSpec) -> tuple[np.ndarray, np.ndarray]:
    if not walk.symmetric:
        raise UnsupportedWalkError("spectral evaluation needs a symmetric step law")
    if walk._eig is None:
        K = transition_matrix(walk)
        walk._eig = np.linalg.eigh(K)
    return walk._eig


def transition_matrix(walk: WalkSpec) -> np.ndarray:
    """Dense K(x, y) = Q(x^-1 y)."""
    n = walk.group.order
    xs = np.arange(n)
    K = np.empty((n, n))
    for x in range(n):
        K[x] = walk.step_law[walk.group.op(int(walk.group.inv(x)), xs)]
    return K


def heat_deviation_spectral(walk: WalkSpec, t: float) -> np.ndarray:
    """H_t(id, .) - 1/|G| from the eigendecomposition (symmetric laws only).

    Summing only the non-stationary eigenmodes avoids the cancellation that
    makes uniformized values unreliable once distances reach ~1e-14.
    """
    vals, vecs = _eigensystem(walk)
    n = walk.group.order
    dev = np.zeros(n)
    for k in range(n):
        if 1.0 - vals[k] < 1e-12:
            continue
        dev += math.exp(-t * (1.0 - vals[k])) * vecs[walk.group.id_index, k] * vecs[:, k]
    return dev


def heat_distribution_spectral(walk: WalkSpec, t: float) -> np.ndarray:
    return 1.0 / walk.group.order + heat_deviation_spectral(walk, t)


def tv_distance(probs: np.ndarray) -> float:
    """sum_y max(p(y) - 1/|G|, 0); the maximizing-set form of total variation."""
    u = 1.0 / len(probs)
    return min(1.0, math.fsum(p - u for p in probs if p > u))


def hellinger_distance(probs: np.ndarray) -> float:
    """sqrt((1/2) sum_y (sqrt p(y) - sqrt(1/|G|))^2)."""
    u = math.sqrt(1.0 / len(probs))
    s = math.fsum((math.sqrt(p if p > 0.0 else 0.0) - u) ** 2 for p in probs)
    return min(1.0, math.sqrt(0.5 * s))


def tv_from_deviation(dev: np.ndarray) -> float:
    return min(1.0, math.fsum(d for d in dev if d > 0.0))


def hellinger_from_deviation(dev: np.ndarray) -> float:
    n = len(dev)
    u = math.sqrt(1.0 / n)
    s = math.fsum((math.sqrt(max(1.0 / n + d, 0.0)) - u) ** 2 for d in dev)
    return min(1.0, math.sqrt(0.5 * s))


_METRICS = {"tv": tv_distance, "hellinger": hellinger_distance}


def distance(walk: WalkSpec, metric: str, clock: str, time: float,
             tol: float = DEFAULT_HEAT_TOL, method: str = "uniformization") -> float:
    """Distance to uniform at one time point on either clock."""
    if metric not in _METRICS:
        raise InvalidParameterError(f"unknown metric {metric!r}")
    if clock == "discrete":
        if time != int(time) or time < 0:
            raise InvalidParameterError("discrete clock needs an integer step count >= 0")
        return _METRICS[metric](walk_distribution(walk, int(time)))
    if clock != "continuous":
        raise InvalidParameterError(f"unknown clock {clock!r}")
    if method == "spectral":
        dev = heat_deviation_spectral(walk, time)
        return tv_from_deviation(dev) if metric == "tv" else hellinger_from_deviation(dev)
    return _METRICS[metric](heat_distribution(walk, time, tol))


@dataclass(frozen=True)
class DistanceCurve:
    times: tuple
    values: tuple
    metric: str
    clock: str


def distance_curve(walk: WalkSpec, metric: str, clock: str, times,
                   tol: float = DEFAULT_HEAT_TOL, method: str = "uniformization") -> DistanceCurve:
    ts = sorted(times)
    vals = tuple(distance(walk, metric, clock, t, tol, method) for t in ts)
    return DistanceCurve(tuple(ts), vals, metric, clock)


def mixing_time(walk: WalkSpec, metric: str, clock: str, eps: float,
                scan_cap: int = 1 << 30, tol: float = DEFAULT_HEAT_TOL,
                time_tol: float = 1e-6):
    """First time the distance drops to eps.

    Both metrics are non-increasing along the chain (the stationary law is a
    fixed point of the kernel), so a doubling bracket plus binary search /
    bisection is exact.
    """
    if not 0 < eps < 1:
        raise InvalidParameterError("eps must lie in (0, 1)")
    if distance(walk, metric, clock, 0, tol) <= eps:
        return 0 if clock == "discrete" else 0.0
    if clock == "discrete":
        hi = 1
        while distance(walk, metric, clock, hi, tol) > eps:
            hi *= 2
            if hi > scan_cap:
                raise ScanCapExceededError(f"no m <= {scan_cap} reaches eps={eps}")
        lo = hi // 2  # d(lo) > eps, d(hi) <= eps
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if distance(walk, metric, clock, mid, tol) > eps:
                lo = mid
            else:
                hi = mid
        return hi
    hi = 1.0
    while distance(walk, metric, clock, hi, tol) > eps:
        hi *= 2
        if hi > scan_cap:
            raise ScanCapExceededError(f"no t <= {scan_cap} reaches eps={eps}")
    lo = hi / 2 if hi > 1.0 else 0.0
    while hi - lo > time_tol:
        mid = 0.5 * (lo + hi)
        if distance(walk, metric, clock, mid, tol) > eps:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def spectral_gap(walk: WalkSpec, dense_cutoff: int = 2000, rel_tol: float = 1e-10) -> float:
    """Smallest nonzero eigenvalue of I - K for a symmetric step law."""
    if not walk.symmetric:
        raise UnsupportedWalkError("spectral gap is implemented for symmetric laws only")
    if walk.group.order <= dense_cutoff:
        vals, _ = _eigensystem(walk)
        return float(1.0 - vals[-2])
    return spectral_gap_power(walk, rel_tol=rel_tol)


def spectral_gap_power(walk: WalkSpec, rel_tol: float = 1e-10, max_iters: int = 200000) -> float:
    """Deflated power iteration on (K + I)/2, which makes the target eigenvalue
    the largest one after removing the stationary mode."""
    if not walk.symmetric:
        raise UnsupportedWalkError("spectral gap is implemented for symmetric laws only")
    group, q = walk.group, walk.step_law
    n = group.order
    xs = np.arange(n)
    support = [(int(z), float(q[z])) for z in np.nonzero(q)[0]]
    perms = {z: group.op(xs, z) for z, _ in support}

    def matvec(v: np.ndarray) -> np.ndarray:
        out = np.zeros(n)
        for z, w in support:
            out += w * v[perms[z]]
        return 0.5 * (out + v)

    rng = np.random.default_rng(12345)
    v = rng.standard_normal(n)
    v -= v.mean()
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(max_iters):
        w = matvec(v)
        w -= w.mean()
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 1.0
        v = w / nrm
        est = float(v @ matvec(v))
        if abs(est - prev) <= rel_tol * max(abs(est), 1e-30):
            prev = est
            break
        prev = est
    mu2 = 2.0 * prev - 1.0
    return 1.0 - mu2


def spectral_gap_characters(walk: WalkSpec) -> float:
    """Character-formula gap for cyclic groups and products of cyclic groups.

    Eigenvalues of K are sum_x Q(x) cos(2 pi <k, x>) over frequency vectors k.
    """
    dims = _cyclic_dims(walk.group)
    if dims is None:
        raise UnsupportedWalkError("character formula needs a (product of) cyclic group(s)")
    if not walk.symmetric:
        raise UnsupportedWalkError("character cross-check assumes a symmetric law")
    support = np.nonzero(walk.step_law)[0]
    weights = walk.step_law[support]
    coords = np.array([_cyclic_coords(walk.group, int(x)) for x in support], dtype=float)
    best = -1.0
    for k in np.ndindex(*dims):
        if all(ki == 0 for ki in k):
            continue
        phase = coords @ (2.0 * math.pi * np.asarray(k, dtype=float) / np.asarray(dims, dtype=float))
        val = float(np.sum(weights * np.cos(phase)))
        best = max(best, val)
    return 1.0 - best


def _cyclic_dims(group: GroupTable):
    if isinstance(group, CyclicTable):
        return (group.n,)
    if isinstance(group, ProductTable):
        dims = []
        for f in group.factors:
            sub = _cyclic_dims(f)
            if sub is None:
                return None
            dims.extend(sub)
        return tuple(dims)
    return None


def _cyclic_coords(group: GroupTable, index: int):
    if isinstance(group, CyclicTable):
        return (index,)
    coords = []
    for f, c in zip(group.factors, group.split(index)):
        coords.extend(_cyclic_coords(f, int(c)))
    return tuple(coords)


# ---------------------------------------------------------------------------
# bound checkers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundRow:
    time: float
    value: float
    upper: float | None
    lower: float | None
    upper_ok: bool | None
    lower_ok: bool | None


@dataclass(frozen=True)
class BoundReport:
    rows: tuple[BoundRow, ...]
    upper_checked: bool
    lower_checked: bool
    notes: tuple[str, ...]
    constants: dict

    @property
    def all_ok(self) -> bool:
        return all((r.upper_ok is not False) and (r.lower_ok is not False) for r in self.rows)


def moderate_constants(A: float, d: float) -> tuple[float, float]:
    """(C1, C2) = (A^(1/2) 2^(d(d+3)/4), A^2 2^(4d+2))."""
    return math.sqrt(A) * 2.0 ** (d * (d + 3) / 4.0), A * A * 2.0 ** (4.0 * d + 2.0)


def check_moderate_bounds(walk: WalkSpec, cert: ModerateGrowthCert,
                          profile: GrowthProfile, steps) -> BoundReport:
    """Discrete-time sandwich with explicit constants from the growth certificate.

    Upper: d_TV(m) <= C1 exp(-eta m / rho^2), needs a satisfied certificate,
    symmetric Q and id in the support. Lower: d_TV(m) >= (1/2) exp(-C2 m / rho^2),
    additionally gated on rho >= A 2^(2d+2); when the gate fails the bound is
    reported as "prerequisite not met" rather than evaluated.
    """
    notes = []
    C1, C2 = moderate_constants(cert.A, cert.d)
    rho = profile.diameter
    upper_ok_gate = True
    if not cert.satisfied:
        upper_ok_gate = False
        notes.append("upper: certificate not satisfied")
    if not walk.symmetric:
        upper_ok_gate = False
        notes.append("upper: step law not symmetric")
    if walk.group.id_index not in walk.support.members:
        upper_ok_gate = False
        notes.append("upper: identity not in the support")
    lower_gate = upper_ok_gate
    threshold = cert.A * 2.0 ** (2.0 * cert.d + 2.0)
    if rho < threshold:
        lower_gate = False
        notes.append(f"lower: prerequisite not met (rho = {rho} < A*2^(2d+2) = {threshold:g})")
    eta = walk.eta
    rows = []
    for m in steps:
        val = distance(walk, "tv", "discrete", m)
        ub = C1 * math.exp(-eta * m / rho ** 2) if upper_ok_gate else None
        lb = 0.5 * math.exp(-C2 * m / rho ** 2) if lower_gate else None
        rows.append(BoundRow(
            time=float(m), value=val,
            upper=ub, lower=lb,
            upper_ok=(val <= ub + 1e-12) if ub is not None else None,
            lower_ok=(val >= lb - 1e-12) if lb is not None else None,
        ))
    return BoundReport(tuple(rows), upper_ok_gate, lower_gate, tuple(notes),
                       {"C1": C1, "C2": C2, "eta": eta, "rho": rho,
                        "lower_rho_threshold": threshold})


def check_cts_bounds(walk: WalkSpec, cert: ModerateGrowthCert, profile: GrowthProfile,
                     times, metric: str = "tv", method: str = "spectral") -> BoundReport:
    """Continuous-time bounds that are testable without unknown constants.

    Lower: d_TV(t) >= (1/2) e^(-lambda t) with the computed spectral gap,
    valid for any symmetric law. Upper: d_TV(t) <= C1 e^(-eta t / (2 rho^2))
    with C1 from the certificate. Hellinger rows reuse the TV bounds through
    the two-sided TV/Hellinger comparison. The fitted decay constant
    C_fit = max_t -(rho^2/t) log(2 d(t)) is reported, never asserted.
    """
    if not walk.symmetric:
        raise UnsupportedWalkError("continuous bound checks need a symmetric law")
    C1, _ = moderate_constants(cert.A, cert.d)
    rho = profile.diameter
    eta = walk.eta
    lam = spectral_gap(walk)
    upper_gate = cert.satisfied and walk.group.id_index in walk.support.members
    notes = []
    if not upper_gate:
        notes.append("upper: certificate not satisfied or id not in support")
    if rho < 4:
        notes.append("note: rho < 4, outside the stated scope of the diameter-form lower bound")
    rows = []
    c_fit = 0.0
    for t in times:
        dev = heat_deviation_spectral(walk, t) if method == "spectral" else None
        d_tv = tv_from_deviation(dev) if dev is not None else distance(walk, "tv", "continuous", t)
        lb_tv = 0.5 * math.exp(-lam * t)
        ub_tv = C1 * math.exp(-eta * t / (2.0 * rho ** 2)) if upper_gate else None
        if t > 0 and d_tv > 0:
            c_fit = max(c_fit, -(rho ** 2) * math.log(2.0 * d_tv) / t)
        if metric == "tv":
            val, lb, ub = d_tv, lb_tv, ub_tv
        else:
            val = hellinger_from_deviation(dev) if dev is not None \
                else distance(walk, "hellinger", "continuous", t)
            # from 1 - sqrt(1 - d^2) <= h^2 <= d applied to the TV bounds
            lb = math.sqrt(max(1.0 - math.sqrt(max(1.0 - lb_tv ** 2, 0.0)), 0.0))
            ub = math.sqrt(ub_tv) if ub_tv is not None else None
        rows.append(BoundRow(
            time=float(t), value=val, upper=ub, lower=lb,
            upper_ok=(val <= ub + 1e-12) if ub is not None else None,
            lower_ok=val >= lb - 1e-12,
        ))
    return BoundReport(tuple(rows), upper_gate, True, tuple(notes),
                       {"C1": C1, "eta": eta, "rho": rho, "lambda": lam, "C_fit": c_fit})

"""Product walks: the weighted product construction and its Hellinger calculus.

In continuous time the product chain factorizes exactly, so its Hellinger
distance is a closed-form combination of factor distances evaluated at
rescaled times. Nothing comparable exists in discrete time; the flat
construction below doubles as the brute-force oracle for small products.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .groups import DEFAULT_ENUMERATION_CAP, ProductTable, lift_to_product, make_product
from .walks import (
    DEFAULT_HEAT_TOL,
    PROB_TOL,
    WalkSpec,
    distance,
    mixing_time,
)

DEFAULT_LEMMA_A = 1.0 / math.sqrt(2.0)


@dataclass
class ProductWalkSpec:
    """Factors plus a positive probability vector of pick-coordinate weights."""

    factors: list[WalkSpec]
    weights: np.ndarray

    def __post_init__(self):
        if not self.factors:
            raise InvalidParameterError("product walk needs at least one factor")
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (len(self.factors),):
            raise InvalidParameterError("weights length must match the factor count")
        if self.weights.min() <= 0:
            raise InvalidParameterError("weights must all be positive")
        if abs(float(self.weights.sum()) - 1.0) > PROB_TOL:
            raise InvalidParameterError(
                f"weights sum to {float(self.weights.sum())!r}, not 1")


def build_flat(pw: ProductWalkSpec, cap: int = DEFAULT_ENUMERATION_CAP) -> WalkSpec:
    """One walk on the direct-product group; exact but exponential in size.

    The flat step law puts weight p_i * Q_i(z) on the element with z in
    coordinate i and the identity elsewhere.
    """
    if len(pw.factors) == 1:
        return pw.factors[0]
    group = make_product([f.group for f in pw.factors], cap)
    assert isinstance(group, ProductTable)
    q = np.zeros(group.order)
    for pos, (factor, weight) in enumerate(zip(pw.factors, pw.weights)):
        for z in np.nonzero(factor.step_law)[0]:
            q[lift_to_product(group, pos, int(z))] += weight * factor.step_law[z]
    return WalkSpec(group, q)


class FactorCurveCache:
    """Memo for factor Hellinger values keyed by (walk, time, tol, method).

    Families reuse a handful of factor shapes at many times, so this turns
    k-factor evaluations into O(distinct factors). An optional JSON file
    (see GROUPWALK_CACHE_DIR) persists values across CLI runs.
    """

    def __init__(self):
        self._store: dict[str, float] = {}

    @staticmethod
    def _key(walk: WalkSpec, t: float, tol: float, method: str) -> str:
        return f"{walk.fingerprint()}|{t!r}|{tol!r}|{method}"

    def hellinger_ct(self, walk: WalkSpec, t: float,
                     tol: float = DEFAULT_HEAT_TOL, method: str = "uniformization") -> float:
        key = self._key(walk, t, tol, method)
        if key not in self._store:
            self._store[key] = distance(walk, "hellinger", "continuous", t, tol, method)
        return self._store[key]

    def load(self, path: str) -> None:
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                self._store.update(json.load(fh))

    def save(self, path: str) -> None:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(dict(sorted(self._store.items())), fh)


_GLOBAL_CACHE = FactorCurveCache()


def default_cache() -> FactorCurveCache:
    return _GLOBAL_CACHE


def product_hellinger_ct(pw: ProductWalkSpec, t: float, tol: float = DEFAULT_HEAT_TOL,
                         method: str = "uniformization",
                         cache: FactorCurveCache | None = None) -> float:
    """Exact continuous-time Hellinger distance of the product walk.

    d(t)^2 = 1 - prod_i (1 - d_i(p_i t)^2) with each factor evaluated at its
    own slowed-down clock.
    """
    if t < 0:
        raise InvalidParameterError("time must be >= 0")
    cache = cache or _GLOBAL_CACHE
    prod = 1.0
    for factor, weight in zip(pw.factors, pw.weights):
        h = cache.hellinger_ct(factor, weight * t, tol, method)
        prod *= 1.0 - h * h
    return math.sqrt(max(1.0 - prod, 0.0))


@dataclass(frozen=True)
class HellingerBounds:
    max_factor_lower: float
    exp_lower: float
    exp_upper: float
    upper_valid: bool
    a_param: float
    min_valid_time: float


def product_hellinger_bounds(pw: ProductWalkSpec, t: float, a_param: float = DEFAULT_LEMMA_A,
                             tol: float = DEFAULT_HEAT_TOL, method: str = "uniformization",
                             cache: FactorCurveCache | None = None) -> HellingerBounds:
    """Factor-wise sandwich around the exact product distance.

    Lower bounds hold for all t: the best single factor, and
    sqrt(1 - exp(-sum d_i^2)). The exponential upper bound
    sqrt(1 - exp(-sum d_i^2 / (1 - a^2))) only applies once every factor has
    mixed below ``a_param`` on its rescaled clock; before that it is
    reported with ``upper_valid`` False.
    """
    if not 0 < a_param < 1:
        raise InvalidParameterError("a_param must lie in (0, 1)")
    cache = cache or _GLOBAL_CACHE
    hs = [cache.hellinger_ct(f, w * t, tol, method) for f, w in zip(pw.factors, pw.weights)]
    ssq = math.fsum(h * h for h in hs)
    min_valid = float(max(
        mixing_time(f, "hellinger", "continuous", a_param, tol=tol) / w
        for f, w in zip(pw.factors, pw.weights)
    ))
    return HellingerBounds(
        max_factor_lower=max(hs),
        exp_lower=math.sqrt(max(1.0 - math.exp(-ssq), 0.0)),
        exp_upper=math.sqrt(max(1.0 - math.exp(-ssq / (1.0 - a_param ** 2)), 0.0)),
        upper_valid=bool(t >= min_valid),
        a_param=a_param,
        min_valid_time=min_valid,
    )


def product_tv_bracket(pw: ProductWalkSpec, t: float, tol: float = DEFAULT_HEAT_TOL,
                       method: str = "uniformization",
                       cache: FactorCurveCache | None = None) -> tuple[float, float]:
    """TV bracket [h^2, sqrt(h^2 (2 - h^2))] implied by the exact Hellinger value.

    This inverts the two-sided TV/Hellinger comparison; it is a bracket, not
    an estimate, and both ends are clamped to [0, 1].
    """
    h = product_hellinger_ct(pw, t, tol, method, cache)
    h2 = min(h * h, 1.0)
    lower = h2
    upper = math.sqrt(max(h2 * (2.0 - h2), 0.0))
    return max(lower, 0.0), min(upper, 1.0)

"""Pydantic request/response models for the HTTP service and the CLI client."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class GroupInfoRequest(BaseModel):
    group: str


class GroupInfoResponse(BaseModel):
    label: str
    order: int
    id_index: int
    coord_width: int
    default_generators: list[int]


class GrowthRequest(BaseModel):
    group: str
    gens: Optional[str] = None          # element list; default canonical set
    moderate_a: Optional[float] = None  # default: minimal A for moderate_d
    moderate_d: float = 1.0
    cap: int = 50_000


class GrowthRow(BaseModel):
    m: int
    volume: int
    ball_fraction: float
    modgrowth_lhs: float
    modgrowth_rhs: float


class GrowthResponse(BaseModel):
    label: str
    order: int
    diameter: int
    moderate_a: float
    moderate_d: float
    minimal_a: float
    cert_satisfied: bool
    rows: list[GrowthRow]


class WalkRequest(BaseModel):
    group: str
    gens: Optional[str] = None
    law: str = "lazy"                   # lazy | uniform | custom:<elem>:<p>,...
    cap: int = 50_000


class WalkCurveRequest(WalkRequest):
    clock: str = "discrete"             # discrete | continuous
    steps: Optional[str] = None         # e.g. "0..20" for the discrete clock
    times: Optional[list[float]] = None
    tol: float = 1e-13
    moderate_a: Optional[float] = None
    moderate_d: float = 1.0


class WalkCurveRow(BaseModel):
    clock: str
    time: float
    tv: float
    hellinger: float
    tv_upper_bound: Optional[float] = None
    tv_lower_bound: Optional[float] = None


class WalkCurveResponse(BaseModel):
    label: str
    rows: list[WalkCurveRow]


class WalkMixRequest(WalkRequest):
    metric: str = "tv"
    clock: str = "discrete"
    eps: float = Field(gt=0, lt=1)
    tol: float = 1e-13


class WalkMixResponse(BaseModel):
    metric: str
    clock: str
    eps: float
    mixing_time: float


class WalkGapRequest(WalkRequest):
    pass


class WalkGapResponse(BaseModel):
    label: str
    gap: float
    method: str


class ProductCurveRequest(BaseModel):
    factors: list[str]
    laws: Optional[list[str]] = None    # default: lazy on every factor
    weights: list[float]
    times: list[float]
    a_param: float = 0.7071067811865476
    tol: float = 1e-13
    oracle_cap: int = 2000
    cap: int = 50_000


class ProductCurveRow(BaseModel):
    t: float
    hellinger_exact: float
    tv_lower: float
    tv_upper: float
    lemma_lower: float
    lemma_upper: float
    upper_valid: bool
    oracle_available: bool
    oracle_value: Optional[float] = None


class ProductCurveResponse(BaseModel):
    label: str
    rows: list[ProductCurveRow]


class LaplaceTauRequest(BaseModel):
    a: list[float]
    lam: list[float]
    c: float = Field(gt=0)


class LaplaceTauResponse(BaseModel):
    found: bool
    j: Optional[int] = None
    lambda_c: Optional[float] = None
    tau_c: Optional[float] = None
    total_mass: float


class LaplaceMixRequest(BaseModel):
    a: list[float]
    lam: list[float]
    eps: float = Field(gt=0)


class LaplaceMixResponse(BaseModel):
    mixing_time: float


class TrendSettings(BaseModel):
    rel_slope: float = 0.08
    bounded_ratio: float = 2.0
    min_points: int = 4


class FamilyScanRequest(BaseModel):
    kind: str = "GP"
    recipe: str = "lazy-cycle"
    weight_rule: str = "constant:c=1"
    n_range: str = "1..40"
    seed: int = 0
    trend: TrendSettings = TrendSettings()
    eps_grid: list[float] = [0.25]


class FamilyRowModel(BaseModel):
    n: int
    log_q: float
    log_t: float
    log_l1: float
    stat: float
    mix_products: dict[str, float]
    verdict: str


class FamilyScanResponse(BaseModel):
    kind: str
    recipe: str
    weight_rule: str
    verdict: str
    trend: dict
    thresholds: dict
    rows: list[FamilyRowModel]


class HeisenbergExperimentRequest(BaseModel):
    gamma: float = Field(gt=0)
    n_max: int = 60
    mode: str = "formula"
    trend: TrendSettings = TrendSettings()


class ExactSmallRowModel(BaseModel):
    n: int
    t: float
    hellinger_exact: float
    lower_max_factor: float
    lower_exp: float
    lower_proof_form: float
    c1_fitted: float
    flat_hellinger_ct: Optional[float] = None
    flat_hellinger_discrete: Optional[float] = None
    discrete_steps: Optional[int] = None


class HeisenbergExperimentResponse(BaseModel):
    gamma: float
    mode: str
    verdict: str
    trend: dict
    thresholds: dict
    rows: list[FamilyRowModel]
    exact_small: list[ExactSmallRowModel]


class RandomizedExperimentRequest(BaseModel):
    mode: str                          # poly | exp
    gamma: Optional[float] = None
    dist: str = "uniform(0,2)"
    seed: int = 42
    n_max: int = 400
    trials: int = 20
    trend: TrendSettings = TrendSettings()


class TrialModel(BaseModel):
    trial: int
    verdict: str
    mu_hat: Optional[float] = None
    final_stat: float
    final_raw_stat: float


class RandomizedExperimentResponse(BaseModel):
    mode: str
    gamma: Optional[float]
    dist: str
    seed: int
    trials: list[TrialModel]
    fractions: dict[str, float]
    thresholds: dict


class VerifyRequest(BaseModel):
    seed: int = 42
    only: Optional[list[str]] = None


class CheckModel(BaseModel):
    name: str
    status: str
    detail: str


class VerifyResponse(BaseModel):
    seed: int
    all_passed: bool
    checks: list[CheckModel]


class VersionResponse(BaseModel):
    name: str
    version: str

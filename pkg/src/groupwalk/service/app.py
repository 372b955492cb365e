"""FastAPI wiring around the shared operation handlers.

Run with: uvicorn groupwalk.service.app:app
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..errors import GroupWalkError
from . import ops
from . import schemas as S

app = FastAPI(title="groupwalk", description="Random walks on finite groups: "
              "exact mixing curves, growth certificates and cutoff diagnostics")


def _guard(fn, *args):
    try:
        return fn(*args)
    except GroupWalkError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/version", response_model=S.VersionResponse)
def version() -> S.VersionResponse:
    return ops.version_info()


@app.post("/group/info", response_model=S.GroupInfoResponse)
def group_info(req: S.GroupInfoRequest) -> S.GroupInfoResponse:
    return _guard(ops.group_info, req)


@app.post("/growth", response_model=S.GrowthResponse)
def growth(req: S.GrowthRequest) -> S.GrowthResponse:
    return _guard(ops.growth, req)


@app.post("/walk/curve", response_model=S.WalkCurveResponse)
def walk_curve(req: S.WalkCurveRequest) -> S.WalkCurveResponse:
    return _guard(ops.walk_curve, req)


@app.post("/walk/mix", response_model=S.WalkMixResponse)
def walk_mix(req: S.WalkMixRequest) -> S.WalkMixResponse:
    return _guard(ops.walk_mix, req)


@app.post("/walk/gap", response_model=S.WalkGapResponse)
def walk_gap(req: S.WalkGapRequest) -> S.WalkGapResponse:
    return _guard(ops.walk_gap, req)


@app.post("/product/curve", response_model=S.ProductCurveResponse)
def product_curve(req: S.ProductCurveRequest) -> S.ProductCurveResponse:
    return _guard(ops.product_curve, req)


@app.post("/laplace/tau", response_model=S.LaplaceTauResponse)
def laplace_tau(req: S.LaplaceTauRequest) -> S.LaplaceTauResponse:
    return _guard(ops.laplace_tau, req)


@app.post("/laplace/mixing", response_model=S.LaplaceMixResponse)
def laplace_mixing(req: S.LaplaceMixRequest) -> S.LaplaceMixResponse:
    return _guard(ops.laplace_mixing, req)


@app.post("/family/scan", response_model=S.FamilyScanResponse)
def family_scan(req: S.FamilyScanRequest) -> S.FamilyScanResponse:
    return _guard(ops.family_scan, req)


@app.post("/experiment/heisenberg", response_model=S.HeisenbergExperimentResponse)
def experiment_heisenberg(req: S.HeisenbergExperimentRequest) -> S.HeisenbergExperimentResponse:
    return _guard(ops.heisenberg_experiment, req)


@app.post("/experiment/randomized", response_model=S.RandomizedExperimentResponse)
def experiment_randomized(req: S.RandomizedExperimentRequest) -> S.RandomizedExperimentResponse:
    return _guard(ops.randomized_experiment, req)


@app.post("/verify", response_model=S.VerifyResponse)
def verify(req: S.VerifyRequest) -> S.VerifyResponse:
    return _guard(ops.run_verify, req)

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Query

from gcm_lab import models
from gcm_lab.errors import ConfigError, GcmLabError, UnknownLabelError
from gcm_lab.services.catalog import LabelCatalog
from gcm_lab.services.experiments import ExperimentRunner
from gcm_lab.services.gcm_system import assemble_family, evaluation_report
from gcm_lab.services.patterns import pattern_report
from gcm_lab.services.presets import RunPresets
from gcm_lab.services.quat_core import QMatrix
from gcm_lab.services.reports import to_plain
from gcm_lab.services.spectral import SpectrumRequest, diagonalize, random_orbit_point

app = FastAPI(title="GCM Lab", version="1.0.0")

catalog = LabelCatalog()
presets = RunPresets()
runner = ExperimentRunner()


@app.get("/health")
def health() -> dict[str, str]:
    return {"status": "ok"}


@app.post("/v1/family/evaluate", response_model=models.EvaluateResponse, response_model_by_alias=True)
def evaluate_family(request: models.EvaluateRequest) -> models.EvaluateResponse:
    try:
        if request.matrix is not None:
            point = diagonalize(QMatrix.from_literal(request.matrix.model_dump()))
        elif request.lam is not None:
            point = random_orbit_point(SpectrumRequest(tuple(request.lam)), request.seed)
        else:
            raise HTTPException(status_code=400, detail="Provide either 'matrix' or 'lambda'")
        report = evaluation_report(assemble_family(point.n, request.variant), point)
    except GcmLabError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return models.EvaluateResponse.model_validate(report)


@app.get("/v1/patterns/count", response_model=models.PatternCountResponse, response_model_exclude_none=True)
def count_patterns(
    kind: str = Query(pattern="^(gl|sp)$"),
    top: str = Query(min_length=1, description="comma-separated top row"),
    list_patterns: bool = Query(False, alias="list"),
) -> models.PatternCountResponse:
    try:
        row = [int(x) for x in top.split(",") if x.strip()]
        return models.PatternCountResponse.model_validate(pattern_report(kind, row, include_list=list_patterns))
    except (GcmLabError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


@app.get("/v1/explain/{label}", response_model=models.ExplainEntry)
def explain(label: str) -> models.ExplainEntry:
    try:
        return catalog.explain(label)
    except UnknownLabelError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc


@app.get("/v1/presets", response_model=list[models.PresetSummary])
def list_presets() -> list[models.PresetSummary]:
    return presets.list_presets()


@app.get("/v1/presets/{name}")
def get_preset(name: str) -> dict:
    try:
        return presets.get_preset(name)
    except ValueError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc


@app.post("/v1/experiments/run")
def run_experiments(config: models.RunConfig) -> dict:
    try:
        summary, reports = runner.run(config)
    except ConfigError as exc:
        raise HTTPException(
            status_code=400,
            detail={"message": str(exc), "issues": [i.model_dump() for i in exc.issues]},
        ) from exc
    except GcmLabError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    response = models.RunResponse(summary=summary, reports=to_plain(reports))
    return response.model_dump(by_alias=True)

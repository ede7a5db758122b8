"""HTTP rendering service.

Wraps the core renderer behind a small JSON API so long-running or
multi-client deployments can share one simulation backend. Scenes arrive
fully inline (pattern payloads embedded); impulse responses return as plain
tap arrays, leaving file serialization to the client.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .errors import ConfigurationError, RirkitError
from .scene import (
    SceneConfig,
    emit_pattern_plot,
    run_scene,
    scene_from_dict,
    _build_pattern,
)

__all__ = ["app", "RenderRequest", "RenderResponse"]

app = FastAPI(title="rirkit", version="0.1.0")


class RenderRequest(BaseModel):
    scene: dict
    workers: int = Field(default=1, ge=1, le=64)


class PairResult(BaseModel):
    source: int
    microphone: int
    sampling_rate: float
    taps: list[float]


class RenderResponse(BaseModel):
    pairs: list[PairResult]
    manifest: dict


class ValidateResponse(BaseModel):
    valid: bool
    errors: list[str] = []


class PatternPlotRequest(BaseModel):
    pattern: dict
    frequencies: list[float]
    sampling_rate: float = 16000.0
    resolution_deg: float = Field(default=1.0, gt=0)


class PatternPlotResponse(BaseModel):
    rows: list[tuple[float, float, float]]


def _validated_scene(data: dict) -> SceneConfig:
    try:
        return scene_from_dict(data)
    except ConfigurationError as e:
        raise HTTPException(status_code=422, detail=str(e))


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/scenes/validate", response_model=ValidateResponse)
def validate_scene(request: RenderRequest):
    try:
        scene_from_dict(request.scene)
    except ConfigurationError as e:
        return ValidateResponse(valid=False, errors=str(e).splitlines())
    return ValidateResponse(valid=True)


@app.post("/render", response_model=RenderResponse)
def render_scene(request: RenderRequest):
    scene = _validated_scene(request.scene)
    try:
        pairs, manifest = run_scene(scene, workers=request.workers)
    except ConfigurationError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except RirkitError as e:
        raise HTTPException(status_code=500, detail=str(e))
    return RenderResponse(
        pairs=[
            PairResult(
                source=p["source"],
                microphone=p["microphone"],
                sampling_rate=p["impulse_response"].f_s,
                taps=p["impulse_response"].taps.tolist(),
            )
            for p in pairs
        ],
        manifest=manifest,
    )


@app.post("/patterns/plot", response_model=PatternPlotResponse)
def pattern_plot(request: PatternPlotRequest):
    nyquist = request.sampling_rate / 2
    if any(f < 0 or f > nyquist for f in request.frequencies):
        raise HTTPException(status_code=422, detail="frequency outside [0, f_s/2]")
    try:
        pattern = _build_pattern(request.pattern)
        rows = emit_pattern_plot(
            pattern, request.frequencies, request.sampling_rate,
            resolution_deg=request.resolution_deg,
        )
    except RirkitError as e:
        raise HTTPException(status_code=422, detail=str(e))
    return PatternPlotResponse(rows=rows)

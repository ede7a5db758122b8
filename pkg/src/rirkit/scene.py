"""Scene configuration, batch rendering, and output serialization.

A scene is a YAML document naming the room, one or more directed sources and
microphones (each with a pattern, inline or by file reference), the render
parameters, and the requested output formats. ``run_scene`` renders every
(source, microphone) pair and returns the impulse responses together with a
manifest of parameters and tap statistics.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from scipy.io import wavfile

from .errors import ConfigurationError, PatternError
from .geometry import RoomSpec
from .orientation import DirectedEndpoint, Orientation
from .patterns import Pattern, pattern_from_dict, pattern_response
from .renderer import ImpulseResponse, RenderConfig, Transducer, render

__all__ = [
    "SceneConfig",
    "load_scene",
    "scene_from_dict",
    "scene_to_dict",
    "run_scene",
    "write_outputs",
    "emit_pattern_plot",
    "OUTPUT_FORMATS",
]

OUTPUT_FORMATS = ("csv", "wav", "raw")

Vec3 = tuple[float, float, float]


class RoomModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dimensions: Vec3
    reflection_coefficients: tuple[float, float, float, float, float, float]
    speed_of_sound: float = 340.0
    sampling_rate: float = 16000.0


class EndpointModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    position: Vec3
    a_z: Vec3
    a_x: Vec3
    pattern: Union[str, dict] = "omnidirectional"


class RenderModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    q_x: int = Field(ge=0)
    q_y: int = Field(ge=0)
    q_z: int = Field(ge=0)
    l_h: int = Field(ge=1)
    q_max: int = -1
    d: int = Field(default=32, ge=1)
    d_e: Optional[int] = None
    n_fft: Optional[int] = None


class OutputModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: str = "."
    formats: list[Literal["csv", "wav", "raw"]] = ["wav"]
    normalize: bool = False


class SceneConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    room: RoomModel
    sources: list[EndpointModel] = Field(min_length=1)
    microphones: list[EndpointModel] = Field(min_length=1)
    render: RenderModel
    outputs: OutputModel = OutputModel()

    @model_validator(mode="after")
    def _positions_inside_room(self):
        dims = self.room.dimensions
        for role, eps in (("sources", self.sources), ("microphones", self.microphones)):
            for i, ep in enumerate(eps):
                for axis in range(3):
                    if not 0 < ep.position[axis] < dims[axis]:
                        raise ValueError(
                            f"{role}[{i}].position must be strictly inside the room, "
                            f"got {ep.position} for dimensions {dims}"
                        )
        return self


def scene_from_dict(data: dict) -> SceneConfig:
    try:
        return SceneConfig.model_validate(data)
    except ValidationError as e:
        lines = [
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
        ]
        raise ConfigurationError("invalid scene:\n  " + "\n  ".join(lines)) from e


def scene_to_dict(scene: SceneConfig) -> dict:
    return scene.model_dump(mode="json")


def load_scene(path) -> SceneConfig:
    """Parse and validate a scene file; pattern file references are resolved
    to inline definitions relative to the scene's directory."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except FileNotFoundError:
        raise ConfigurationError(f"scene file not found: {path}")
    except yaml.YAMLError as e:
        raise ConfigurationError(f"cannot parse scene file {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigurationError(f"scene file {path} must contain a mapping")
    scene = scene_from_dict(data)
    for ep in scene.sources + scene.microphones:
        ep.pattern = _resolve_pattern_spec(ep.pattern, base=path.parent)
    return scene


_ANALYTIC_NAMES = {
    "omnidirectional", "dipole", "cardioid", "supercardioid", "simplified_speaker",
}


def _resolve_pattern_spec(spec: Union[str, dict], base: Path) -> dict:
    """Turn a pattern reference into an inline definition dict."""
    if isinstance(spec, dict):
        return spec
    if spec in _ANALYTIC_NAMES:
        return {"type": spec}
    pfile = base / spec
    if not pfile.is_file():
        raise ConfigurationError(
            f"pattern reference {spec!r} is neither a known pattern name "
            f"nor a readable file under {base}"
        )
    try:
        return yaml.safe_load(pfile.read_text())
    except yaml.YAMLError as e:
        raise ConfigurationError(f"cannot parse pattern file {pfile}: {e}")


def _build_pattern(spec: Union[str, dict]) -> Pattern:
    if isinstance(spec, str):
        spec = {"type": spec}
    try:
        return pattern_from_dict(spec)
    except PatternError as e:
        raise ConfigurationError(str(e)) from e


def _transducer(ep: EndpointModel) -> Transducer:
    return Transducer(
        endpoint=DirectedEndpoint(r=ep.position, a_z=ep.a_z, a_x=ep.a_x),
        pattern=_build_pattern(ep.pattern),
    )


def _room_spec(scene: SceneConfig) -> RoomSpec:
    r = scene.room
    return RoomSpec(
        L_x=r.dimensions[0], L_y=r.dimensions[1], L_z=r.dimensions[2],
        betas=r.reflection_coefficients, c=r.speed_of_sound, f_s=r.sampling_rate,
    )


def _render_config(scene: SceneConfig) -> RenderConfig:
    m = scene.render
    return RenderConfig(
        Q_x=m.q_x, Q_y=m.q_y, Q_z=m.q_z, L_h=m.l_h, Q_max=m.q_max,
        D=m.d, D_e=m.d_e, N_fft=m.n_fft,
    )


def _tap_stats(h: np.ndarray) -> dict:
    peak = float(np.max(np.abs(h))) if h.size else 0.0
    rms = float(np.sqrt(np.mean(h**2))) if h.size else 0.0
    if peak > 0:
        first = int(np.argmax(np.abs(h) >= 1e-4 * peak))
    else:
        first = -1
    return {"peak": peak, "rms": rms, "first_arrival_index": first}


def run_scene(scene: SceneConfig, workers: int = 1):
    """Render every (source, microphone) pair of a validated scene.

    Returns (pairs, manifest) where each pair is a dict with the endpoint
    indices and the :class:`ImpulseResponse`, and the manifest echoes the
    configuration with per-pair tap statistics.
    """
    room = _room_spec(scene)
    cfg = _render_config(scene)
    scene_dict = scene_to_dict(scene)
    digest = hashlib.sha256(
        json.dumps(scene_dict, sort_keys=True).encode()
    ).hexdigest()

    started = time.perf_counter()
    pairs = []
    for si, src_model in enumerate(scene.sources):
        src = _transducer(src_model)
        for mi, mic_model in enumerate(scene.microphones):
            mic = _transducer(mic_model)
            ir = render(room, src, mic, cfg, workers=workers)
            pairs.append({"source": si, "microphone": mi, "impulse_response": ir})
    elapsed = time.perf_counter() - started

    manifest = {
        "input_sha256": digest,
        "parameters": scene_dict,
        "workers": workers,
        "elapsed_seconds": elapsed,
        "pairs": [
            {
                "source": p["source"],
                "microphone": p["microphone"],
                "length": int(p["impulse_response"].taps.size),
                "sampling_rate": p["impulse_response"].f_s,
                **_tap_stats(p["impulse_response"].taps),
            }
            for p in pairs
        ],
    }
    return pairs, manifest


def write_outputs(
    pairs, out_dir, formats, normalize: bool = False, stem: str = "ir"
) -> list[Path]:
    """Serialize rendered pairs in each requested format.

    csv: "index,value" rows; wav: mono 32-bit float; raw: little-endian
    float64. Normalization (to 0.9 full scale) applies to WAV only.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for p in pairs:
        ir: ImpulseResponse = p["impulse_response"]
        base = f"{stem}_s{p['source']}_m{p['microphone']}"
        for fmt in formats:
            if fmt not in OUTPUT_FORMATS:
                raise ConfigurationError(f"unknown output format {fmt!r}")
            target = out_dir / f"{base}.{fmt}"
            if fmt == "csv":
                lines = [f"{i},{float(v)!r}" for i, v in enumerate(ir.taps)]
                target.write_text("\n".join(lines) + "\n")
            elif fmt == "wav":
                data = ir.taps.astype(np.float32)
                if normalize:
                    peak = np.max(np.abs(data))
                    if peak > 0:
                        data = data * np.float32(0.9 / peak)
                wavfile.write(target, int(round(ir.f_s)), data)
            else:
                target.write_bytes(ir.taps.astype("<f8").tobytes())
            written.append(target)
    return written


def emit_pattern_plot(
    pattern: Pattern, frequencies, f_s: float, resolution_deg: float = 1.0
):
    """Polar plot data: (frequency_hz, theta_deg, gain) rows at phi = 0.

    Gain is the response magnitude; theta sweeps the full circle so the rows
    plot directly on a polar axis.
    """
    rows = []
    thetas = np.arange(0.0, 360.0, resolution_deg)
    for f in frequencies:
        for th in thetas:
            o = Orientation.from_angles(np.radians(th), 0.0)
            g = pattern_response(pattern, [f], o, f_s)[0]
            rows.append((float(f), float(th), float(abs(g))))
    return rows

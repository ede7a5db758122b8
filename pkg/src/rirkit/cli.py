"""Command-line client for the rendering service.

The CLI validates and resolves scene files locally, then talks to the HTTP
API: in-process by default, or a remote server via --server. File outputs
are always written client-side.

Exit codes: 0 success, 1 validation error, 2 runtime error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx
import yaml

from .errors import ConfigurationError
from .scene import OUTPUT_FORMATS, load_scene, scene_to_dict

EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _post(client, path, payload):
    try:
        resp = client.post(path, json=payload)
    except httpx.HTTPError as e:
        _fail(f"cannot reach render service: {e}", EXIT_RUNTIME)
    if resp.status_code == 422:
        _fail(resp.json().get("detail", resp.text), EXIT_VALIDATION)
    if resp.status_code != 200:
        _fail(f"service returned {resp.status_code}: {resp.text}", EXIT_RUNTIME)
    return resp.json()


@click.group()
def main():
    """Room impulse response simulation for directional sources and sensors."""


@main.command()
@click.argument("scene_path", type=click.Path(path_type=Path))
@click.option("--out-dir", type=click.Path(path_type=Path), default=None,
              help="Output directory (default: from the scene file).")
@click.option("--format", "formats", type=click.Choice(OUTPUT_FORMATS), multiple=True,
              help="Output format(s); overrides the scene file.")
@click.option("--q-x", type=int, default=None, help="Override reflection order Q_x.")
@click.option("--q-y", type=int, default=None, help="Override reflection order Q_y.")
@click.option("--q-z", type=int, default=None, help="Override reflection order Q_z.")
@click.option("--q-max", type=int, default=None, help="Override directional cutoff.")
@click.option("--taps-half-length", "-D", "d", type=int, default=None,
              help="Override tap half length D.")
@click.option("--length", "l_h", type=int, default=None,
              help="Override impulse response length L_h.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--manifest", "manifest_path", type=click.Path(path_type=Path),
              default=None, help="Where to write the run manifest JSON.")
@click.option("--normalize", is_flag=True, help="Normalize WAV output to 0.9 FS.")
@click.option("--server", default=None, help="Remote service URL (default: in-process).")
def render(scene_path, out_dir, formats, q_x, q_y, q_z, q_max, d, l_h,
           workers, manifest_path, normalize, server):
    """Render all (source, microphone) pairs of SCENE_PATH."""
    try:
        scene = load_scene(scene_path)
    except ConfigurationError as e:
        _fail(str(e), EXIT_VALIDATION)

    overrides = {"q_x": q_x, "q_y": q_y, "q_z": q_z, "q_max": q_max, "d": d, "l_h": l_h}
    for key, value in overrides.items():
        if value is not None:
            setattr(scene.render, key, value)
    if formats:
        scene.outputs.formats = list(formats)
    if out_dir is not None:
        scene.outputs.directory = str(out_dir)
    if normalize:
        scene.outputs.normalize = True

    data = _post(_client(server), "/render",
                 {"scene": scene_to_dict(scene), "workers": workers})

    import numpy as np

    from .renderer import ImpulseResponse
    from .scene import write_outputs

    pairs = [
        {
            "source": p["source"],
            "microphone": p["microphone"],
            "impulse_response": ImpulseResponse(
                taps=np.asarray(p["taps"]), f_s=p["sampling_rate"]
            ),
        }
        for p in data["pairs"]
    ]
    try:
        written = write_outputs(
            pairs, scene.outputs.directory, scene.outputs.formats,
            normalize=scene.outputs.normalize,
        )
    except OSError as e:
        _fail(f"cannot write outputs: {e}", EXIT_RUNTIME)
    if manifest_path is not None:
        manifest_path.parent.mkdir(parents=True, exist_ok=True)
        manifest_path.write_text(json.dumps(data["manifest"], indent=2) + "\n")
        click.echo(f"manifest: {manifest_path}")
    for path in written:
        click.echo(str(path))


@main.command()
@click.argument("scene_path", type=click.Path(path_type=Path))
@click.option("--server", default=None, help="Remote service URL (default: in-process).")
def validate(scene_path, server):
    """Check a scene file and report the first validation problem."""
    try:
        scene = load_scene(scene_path)
    except ConfigurationError as e:
        _fail(str(e), EXIT_VALIDATION)
    data = _post(_client(server), "/scenes/validate",
                 {"scene": scene_to_dict(scene)})
    if not data["valid"]:
        _fail("\n".join(data["errors"]), EXIT_VALIDATION)
    click.echo("scene is valid")


@main.command("pattern-plot")
@click.argument("pattern_ref")
@click.option("--freq", "frequencies", type=float, multiple=True, required=True,
              help="Frequency in Hz; repeatable.")
@click.option("--sampling-rate", type=float, default=16000.0, show_default=True)
@click.option("--resolution", type=float, default=1.0, show_default=True,
              help="Angular step in degrees.")
@click.option("--output", "-o", type=click.Path(path_type=Path), required=True)
@click.option("--server", default=None, help="Remote service URL (default: in-process).")
def pattern_plot(pattern_ref, frequencies, sampling_rate, resolution, output, server):
    """Emit polar gain data for PATTERN_REF (a name or a pattern file)."""
    if Path(pattern_ref).is_file():
        try:
            pattern = yaml.safe_load(Path(pattern_ref).read_text())
        except yaml.YAMLError as e:
            _fail(f"cannot parse pattern file: {e}", EXIT_VALIDATION)
    else:
        pattern = {"type": pattern_ref}
    data = _post(
        _client(server), "/patterns/plot",
        {
            "pattern": pattern,
            "frequencies": list(frequencies),
            "sampling_rate": sampling_rate,
            "resolution_deg": resolution,
        },
    )
    lines = ["frequency_hz,theta_deg,gain"]
    lines += [f"{f!r},{t!r},{g!r}" for f, t, g in data["rows"]]
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text("\n".join(lines) + "\n")
    click.echo(str(output))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the rendering service."""
    import uvicorn

    uvicorn.run("rirkit.service:app", host=host, port=port)


if __name__ == "__main__":
    main()

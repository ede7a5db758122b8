"""Impulse-response rendering loop.

Enumerates images in a fixed lexicographic order, synthesizes per-image taps
(directional pipeline below a reflection-order cutoff, closed-form sinc taps
above it), and accumulates windowed, distance-attenuated contributions into
the output buffer. Accumulation runs over fixed-size chunks merged in order,
so parallel and serial renders are bit-identical.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .delay import (
    anti_alias_window,
    default_fft_size,
    mirror_spectrum,
    omni_taps,
    pattern_taps,
    split_delay,
)
from .errors import ConfigurationError
from .geometry import (
    ImageIndex,
    ImageSource,
    RoomSpec,
    enumerate_images,
    geometry_of,
    reflection_product,
)
from .orientation import (
    DirectedEndpoint,
    frame_from_anchors,
    mirror_anchor,
    sensor_orientation,
    source_orientation,
)
from .patterns import Pattern, pattern_response

__all__ = [
    "RenderConfig",
    "ImpulseResponse",
    "Transducer",
    "is_directional",
    "compute_image_taps",
    "render",
]

# images per accumulation chunk; fixed so worker count cannot affect results
_CHUNK = 16384


@dataclass(frozen=True)
class RenderConfig:
    """Reflection orders, directional cutoff, and tap/output sizes."""

    Q_x: int
    Q_y: int
    Q_z: int
    L_h: int
    Q_max: int = -1
    D: int = 32
    D_e: int | None = None
    N_fft: int | None = None

    def __post_init__(self):
        if min(self.Q_x, self.Q_y, self.Q_z) < 0:
            raise ConfigurationError("reflection orders must be nonnegative")
        if self.L_h < 1:
            raise ConfigurationError("impulse response length must be >= 1")
        if self.D < 1:
            raise ConfigurationError("tap half length D must be >= 1")
        if self.D_e is not None and self.D_e < self.D:
            raise ConfigurationError("centering offset D_e must be >= D")

    @property
    def d_e(self) -> int:
        return self.D if self.D_e is None else self.D_e

    @property
    def fft_size(self) -> int:
        return default_fft_size(self.D) if self.N_fft is None else self.N_fft


@dataclass(frozen=True)
class ImpulseResponse:
    """Real tap vector at a fixed sampling rate."""

    taps: np.ndarray
    f_s: float


@dataclass(frozen=True)
class Transducer:
    """A directed endpoint together with its directivity pattern."""

    endpoint: DirectedEndpoint
    pattern: Pattern


def is_directional(index, Q_max: int):
    """Whether an image keeps its directional pattern under the cutoff.

    True iff every |q_d| <= Q_max; a negative Q_max disables the directional
    branch entirely (classical omnidirectional image model).
    """
    if isinstance(index, ImageIndex):
        index = index.as_array()
    idx = np.atleast_2d(np.asarray(index, dtype=int))
    if Q_max < 0:
        out = np.zeros(idx.shape[0], dtype=bool)
    else:
        out = np.all(np.abs(idx[:, 3:]) <= Q_max, axis=1)
    if np.ndim(index) == 1:
        return bool(out[0])
    return out


def _half_grid_freqs(n_fft: int, f_s: float) -> np.ndarray:
    return np.arange(n_fft // 2 + 1) * f_s / n_fft


def _combined_half_spectrum(
    index_row: np.ndarray,
    r_n: np.ndarray,
    phi_n: np.ndarray,
    source: Transducer,
    sensor_frame,
    sensor_pattern: Pattern,
    room: RoomSpec,
    freqs: np.ndarray,
) -> np.ndarray:
    """Source times sensor pattern response on the half DFT grid."""
    a_z_n = mirror_anchor(source.endpoint.a_z, index_row, room)
    a_x_n = mirror_anchor(source.endpoint.a_x, index_row, room)
    frame_n = frame_from_anchors(DirectedEndpoint(r=r_n, a_z=a_z_n, a_x=a_x_n))
    ori_src = source_orientation(frame_n, phi_n)
    ori_mic = sensor_orientation(sensor_frame, phi_n)
    b = pattern_response(source.pattern, freqs, ori_src, room.f_s)
    a = pattern_response(sensor_pattern, freqs, ori_mic, room.f_s)
    return a * b


def compute_image_taps(
    image: ImageSource,
    source: Transducer,
    sensor: Transducer,
    room: RoomSpec,
    cfg: RenderConfig,
) -> np.ndarray:
    """Taps of one directional image: orientation, pattern, fractional delay."""
    freqs = _half_grid_freqs(cfg.fft_size, room.f_s)
    sensor_frame = frame_from_anchors(sensor.endpoint)
    c_half = _combined_half_spectrum(
        image.index.as_array(), image.r_n, image.phi_n,
        source, sensor_frame, sensor.pattern, room, freqs,
    )
    zeta = split_delay(image.tau_n, room.f_s).zeta
    return pattern_taps(mirror_spectrum(c_half, cfg.fft_size), zeta, cfg.D, cfg.d_e)


def _accumulate(h: np.ndarray, tap_matrix, zetas, starts, scales, D: int):
    """Window, scale, and scatter-add a batch of tap rows into h."""
    if len(starts) == 0:
        return
    ell = np.arange(2 * D + 1)
    win = 0.54 - 0.46 * np.cos(np.pi * (ell[None, :] - zetas[:, None]) / D)
    vals = scales[:, None] * win * tap_matrix
    idx = starts[:, None] + ell[None, :]
    valid = (idx >= 0) & (idx < h.size)
    h += np.bincount(idx[valid], weights=vals[valid], minlength=h.size)


def _render_chunk(
    sl: slice,
    indices, zetas, tau_int, scales, phi, positions, directional,
    source, sensor_frame, sensor_pattern, room, cfg,
) -> np.ndarray:
    h = np.zeros(cfg.L_h)
    idx = indices[sl]
    z = zetas[sl]
    starts = tau_int[sl] - cfg.D
    sc = scales[sl]
    dmask = directional[sl]

    omni = ~dmask
    if np.any(omni):
        ell = np.arange(2 * cfg.D + 1)
        taps = np.sinc(ell[None, :] - z[omni, None] - cfg.D)
        _accumulate(h, taps, z[omni], starts[omni], sc[omni], cfg.D)

    if np.any(dmask):
        freqs = _half_grid_freqs(cfg.fft_size, room.f_s)
        rows = np.where(dmask)[0]
        c_half = np.empty((rows.size, freqs.size), dtype=complex)
        for out_row, i in enumerate(rows):
            c_half[out_row] = _combined_half_spectrum(
                idx[i], positions[sl][i], phi[sl][i],
                source, sensor_frame, sensor_pattern, room, freqs,
            )
        taps = pattern_taps(
            mirror_spectrum(c_half, cfg.fft_size), z[dmask], cfg.D, cfg.d_e
        )
        _accumulate(h, taps, z[dmask], starts[dmask], sc[dmask], cfg.D)
    return h


def render(
    room: RoomSpec,
    source: Transducer,
    sensor: Transducer,
    cfg: RenderConfig,
    workers: int = 1,
) -> ImpulseResponse:
    """Render the impulse response from source to sensor.

    Images below the directional cutoff go through the full orientation and
    pattern pipeline; the rest use closed-form omnidirectional taps (and an
    omnidirectional sensor, matching the cutoff's semantics). Results are
    bit-identical for any worker count.
    """
    mic_pos = sensor.endpoint.r
    if not room.contains(mic_pos):
        raise ConfigurationError(
            f"microphone position {tuple(mic_pos)} is not strictly inside the room"
        )
    indices, positions = enumerate_images(
        room, source.endpoint.r, cfg.Q_x, cfg.Q_y, cfg.Q_z
    )
    phi, d, tau = geometry_of(positions, mic_pos, room.c)
    betas = reflection_product(indices, room.betas)

    x = tau * room.f_s
    tau_int = np.floor(x + 0.5).astype(np.int64)
    zetas = x - tau_int
    scales = betas / (4.0 * np.pi * d)
    directional = is_directional(indices, cfg.Q_max)

    keep = tau_int - cfg.D < cfg.L_h
    indices, positions, phi = indices[keep], positions[keep], phi[keep]
    tau_int, zetas, scales = tau_int[keep], zetas[keep], scales[keep]
    directional = directional[keep]

    sensor_frame = frame_from_anchors(sensor.endpoint)
    n = len(tau_int)
    chunks = [slice(a, min(a + _CHUNK, n)) for a in range(0, n, _CHUNK)]

    def work(sl):
        return _render_chunk(
            sl, indices, zetas, tau_int, scales, phi, positions, directional,
            source, sensor_frame, sensor.pattern, room, cfg,
        )

    h = np.zeros(cfg.L_h)
    if workers <= 1 or len(chunks) <= 1:
        partials = map(work, chunks)
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        partials = pool.map(work, chunks)
    for partial in partials:  # fixed merge order for determinism
        h += partial
    if workers > 1 and len(chunks) > 1:
        pool.shutdown()
    return ImpulseResponse(taps=h, f_s=room.f_s)

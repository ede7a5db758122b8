"""Image-source enumeration for shoebox rooms.

Positions of mirrored sources, per-image wall reflection products, and
source-to-microphone path geometry (direction, distance, delay).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DegeneratePathError

__all__ = [
    "RoomSpec",
    "ImageIndex",
    "ImageSource",
    "image_indices",
    "mirror_point",
    "enumerate_images",
    "reflection_product",
    "geometry_of",
]


@dataclass(frozen=True)
class RoomSpec:
    """Shoebox room: edge lengths, wall reflection coefficients, medium."""

    L_x: float
    L_y: float
    L_z: float
    betas: tuple[float, float, float, float, float, float]
    c: float = 340.0
    f_s: float = 16000.0

    def __post_init__(self):
        dims = (self.L_x, self.L_y, self.L_z)
        if any(not np.isfinite(d) or d <= 0 for d in dims):
            raise ConfigurationError(f"room edge lengths must be positive, got {dims}")
        if len(self.betas) != 6:
            raise ConfigurationError("exactly six reflection coefficients required")
        if any(b < 0 or b > 1 for b in self.betas):
            raise ConfigurationError(
                f"reflection coefficients must lie in [0, 1], got {self.betas}"
            )
        if self.c <= 0:
            raise ConfigurationError("speed of sound must be positive")
        if self.f_s <= 0:
            raise ConfigurationError("sampling rate must be positive")

    @property
    def dimensions(self) -> np.ndarray:
        return np.array([self.L_x, self.L_y, self.L_z])

    def contains(self, point) -> bool:
        """True if the point lies strictly inside the room."""
        p = np.asarray(point, dtype=float)
        return bool(np.all(p > 0) and np.all(p < self.dimensions))


@dataclass(frozen=True)
class ImageIndex:
    """Mirror index of one image: parity bits p and wall-pair counts q."""

    p_x: int
    p_y: int
    p_z: int
    q_x: int
    q_y: int
    q_z: int

    def __post_init__(self):
        if any(p not in (0, 1) for p in (self.p_x, self.p_y, self.p_z)):
            raise ConfigurationError("parity bits must be 0 or 1")

    @property
    def is_zero(self) -> bool:
        return not any((self.p_x, self.p_y, self.p_z, self.q_x, self.q_y, self.q_z))

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.p_x, self.p_y, self.p_z, self.q_x, self.q_y, self.q_z], dtype=int
        )


@dataclass(frozen=True)
class ImageSource:
    """One mirrored source with its path geometry to the microphone."""

    index: ImageIndex
    r_n: np.ndarray
    beta_n: float
    phi_n: np.ndarray = field(repr=False)
    d_n: float = 0.0
    tau_n: float = 0.0


def image_indices(Q_x: int, Q_y: int, Q_z: int) -> np.ndarray:
    """All image indices as an (N, 6) int array of (p_x, p_y, p_z, q_x, q_y, q_z).

    Rows are in lexicographic order over (q_x, q_y, q_z, p_x, p_y, p_z); this
    ordering is part of the determinism contract and must not change.
    """
    for q in (Q_x, Q_y, Q_z):
        if q < 0:
            raise ConfigurationError("reflection orders must be nonnegative")
    qx = np.arange(-Q_x, Q_x + 1)
    qy = np.arange(-Q_y, Q_y + 1)
    qz = np.arange(-Q_z, Q_z + 1)
    p = np.array([0, 1])
    grids = np.meshgrid(qx, qy, qz, p, p, p, indexing="ij")
    cols = [g.ravel() for g in grids]
    # column layout: p bits first, q counts second
    return np.stack([cols[3], cols[4], cols[5], cols[0], cols[1], cols[2]], axis=1)


def mirror_point(point, indices: np.ndarray, room: RoomSpec) -> np.ndarray:
    """Mirror a point through the walls selected by one or more image indices.

    ``indices`` is (6,) or (N, 6) in (p, q) layout; returns positions with a
    matching leading shape. The same formula applies to sources and anchors.
    """
    idx = np.atleast_2d(np.asarray(indices, dtype=int))
    p = np.asarray(point, dtype=float)
    signs = np.where(idx[:, :3] == 0, 1.0, -1.0)
    pos = signs * p + 2.0 * idx[:, 3:] * room.dimensions
    if np.ndim(indices) == 1:
        return pos[0]
    return pos


def enumerate_images(
    room: RoomSpec, source_pos, Q_x: int, Q_y: int, Q_z: int
) -> tuple[np.ndarray, np.ndarray]:
    """Enumerate all 8(2Q_x+1)(2Q_y+1)(2Q_z+1) image positions.

    Returns (indices, positions) with indices as in :func:`image_indices` and
    positions of shape (N, 3). The source must lie strictly inside the room.
    """
    src = np.asarray(source_pos, dtype=float)
    if not room.contains(src):
        raise ConfigurationError(
            f"source position {tuple(src)} is not strictly inside the room"
        )
    idx = image_indices(Q_x, Q_y, Q_z)
    return idx, mirror_point(src, idx, room)


def reflection_product(indices, betas) -> np.ndarray | float:
    """Per-image product of wall reflection coefficients.

    beta = bx0^|qx-px| * bx1^|qx| * by0^|qy-py| * by1^|qy| * bz0^|qz-pz| * bz1^|qz|
    """
    if isinstance(indices, ImageIndex):
        indices = indices.as_array()
    idx = np.atleast_2d(np.asarray(indices, dtype=int))
    b = np.asarray(betas, dtype=float)
    p, q = idx[:, :3], idx[:, 3:]
    lo = np.abs(q - p)  # wall at coordinate 0
    hi = np.abs(q)  # wall at coordinate L
    out = (
        b[0] ** lo[:, 0] * b[1] ** hi[:, 0]
        * b[2] ** lo[:, 1] * b[3] ** hi[:, 1]
        * b[4] ** lo[:, 2] * b[5] ** hi[:, 2]
    )
    if np.ndim(indices) == 1:
        return float(out[0])
    return out


def geometry_of(image_pos, mic_pos, c: float):
    """Direction vector, distance, and propagation delay of each image path.

    Accepts a single position or an (N, 3) batch. Raises
    :class:`DegeneratePathError` if any image coincides with the microphone.
    """
    if c <= 0:
        raise ConfigurationError("speed of sound must be positive")
    pos = np.asarray(image_pos, dtype=float)
    phi = pos - np.asarray(mic_pos, dtype=float)
    d = np.linalg.norm(phi, axis=-1)
    if np.any(d == 0):
        raise DegeneratePathError("image source coincides with the microphone")
    return phi, d, d / c

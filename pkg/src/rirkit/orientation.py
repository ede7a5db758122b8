"""Coordinate frames from anchor points and orientation angles.

A source or sensor is directed by two auxiliary anchor points: one behind it
on the negative z-axis of its local frame, one on the negative x-axis. The
frame's y-axis follows from rotating x by 90 degrees around z (cross product
via the skew matrix). Orientation angles locate the counterpart direction in
that local frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateAnchorError
from .geometry import ImageIndex, RoomSpec, mirror_point

__all__ = [
    "DirectedEndpoint",
    "Frame",
    "Orientation",
    "skew_matrix",
    "projection_matrix",
    "frame_from_anchors",
    "mirror_anchor",
    "source_orientation",
    "sensor_orientation",
    "orientation_vector",
]

# relative threshold below which the projected x-anchor counts as parallel to z
_PARALLEL_TOL = 1e-9
# sin(theta) below which the azimuth is conventionally (cos, sin) = (1, 0)
_POLE_TOL = 1e-12


@dataclass(frozen=True)
class DirectedEndpoint:
    """A position with its two frame-defining anchor points."""

    r: np.ndarray
    a_z: np.ndarray
    a_x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", np.asarray(self.r, dtype=float))
        object.__setattr__(self, "a_z", np.asarray(self.a_z, dtype=float))
        object.__setattr__(self, "a_x", np.asarray(self.a_x, dtype=float))
        if np.array_equal(self.r, self.a_z) or np.array_equal(self.r, self.a_x):
            raise DegenerateAnchorError("anchor point coincides with the position")


@dataclass(frozen=True)
class Frame:
    """Right-handed orthonormal basis (i, j, k) in world coordinates."""

    i: np.ndarray
    j: np.ndarray
    k: np.ndarray


@dataclass(frozen=True)
class Orientation:
    """Elevation/azimuth of a direction expressed in a local frame."""

    cos_theta: float
    sin_theta: float
    cos_phi: float
    sin_phi: float

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "Orientation":
        return cls(math.cos(theta), abs(math.sin(theta)), math.cos(phi), math.sin(phi))

    @property
    def phi(self) -> float:
        return math.atan2(self.sin_phi, self.cos_phi)

    @property
    def gamma(self) -> np.ndarray:
        return orientation_vector(self)


def skew_matrix(k) -> np.ndarray:
    """Antisymmetric matrix T such that T @ v == cross(k, v)."""
    kx, ky, kz = np.asarray(k, dtype=float)
    return np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])


def projection_matrix(k) -> np.ndarray:
    """Orthogonal projector onto the plane normal to k."""
    k = np.asarray(k, dtype=float)
    nk2 = float(k @ k)
    if nk2 == 0.0:
        raise DegenerateAnchorError("cannot project along a zero axis")
    return np.eye(3) - np.outer(k, k) / nk2


def frame_from_anchors(ep: DirectedEndpoint) -> Frame:
    """Build the orthonormal local frame implied by the anchor points.

    k points from the z-anchor to the position; the raw x direction is
    orthogonalized against k before normalization, so hand-placed anchors
    need not be exactly perpendicular.
    """
    k_raw = ep.r - ep.a_z
    nk = np.linalg.norm(k_raw)
    if nk == 0.0:
        raise DegenerateAnchorError("z-anchor coincides with the position")
    k = k_raw / nk

    i_raw = ep.r - ep.a_x
    ni_raw = np.linalg.norm(i_raw)
    if ni_raw == 0.0:
        raise DegenerateAnchorError("x-anchor coincides with the position")
    i_perp = i_raw - k * (k @ i_raw)
    ni = np.linalg.norm(i_perp)
    if ni < _PARALLEL_TOL * ni_raw:
        raise DegenerateAnchorError("x-anchor lies on the z-axis of the frame")
    i = i_perp / ni
    j = skew_matrix(k) @ i
    return Frame(i=i, j=j, k=k)


def mirror_anchor(a, index: ImageIndex | np.ndarray, room: RoomSpec) -> np.ndarray:
    """Mirror an anchor point with the same wall reflections as its source."""
    if isinstance(index, ImageIndex):
        index = index.as_array()
    return mirror_point(a, index, room)


def _angles(frame: Frame, phi_n, sign: float) -> Orientation:
    phi_n = np.asarray(phi_n, dtype=float)
    nphi = np.linalg.norm(phi_n)
    if nphi == 0.0:
        raise DegenerateAnchorError("direction vector is zero")
    cos_t = sign * float(phi_n @ frame.k) / nphi
    cos_t = min(1.0, max(-1.0, cos_t))
    sin_t = math.sqrt(max(0.0, 1.0 - cos_t * cos_t))

    # in-plane component of the (signed) direction
    v = sign * (phi_n - frame.k * (frame.k @ phi_n))
    nv = np.linalg.norm(v)
    if sin_t < _POLE_TOL or nv == 0.0:
        # azimuth undefined at the pole; fixed convention
        return Orientation(cos_t, sin_t, 1.0, 0.0)
    return Orientation(cos_t, sin_t, float(frame.i @ v) / nv, float(frame.j @ v) / nv)


def source_orientation(frame: Frame, phi_n) -> Orientation:
    """Orientation of the sensor as seen from a source frame (looks along -phi)."""
    return _angles(frame, phi_n, -1.0)


def sensor_orientation(frame: Frame, phi_n) -> Orientation:
    """Orientation of an image source as seen from the sensor frame (+phi)."""
    return _angles(frame, phi_n, 1.0)


def orientation_vector(o: Orientation) -> np.ndarray:
    """Unit vector (sin t cos p, sin t sin p, cos t) for the orientation angles."""
    return np.array(
        [o.sin_theta * o.cos_phi, o.sin_theta * o.sin_phi, o.cos_theta]
    )

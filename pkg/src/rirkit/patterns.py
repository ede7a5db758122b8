"""Frequency-dependent radiation and directivity patterns.

Analytic first-order families (omni, dipole, cardioid, supercardioid), the
frequency-dependent cardioid model of a talker, spherical-harmonic
coefficient sets, and sampled direction grids with nearest-direction lookup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import lpmv

from .errors import PatternError
from .orientation import Orientation

__all__ = [
    "Pattern",
    "Omnidirectional",
    "Dipole",
    "Cardioid",
    "Supercardioid",
    "SimplifiedSpeaker",
    "SphericalHarmonics",
    "SampledGrid",
    "associated_legendre",
    "spherical_harmonic",
    "simplified_speaker",
    "nearest_sample_lookup",
    "pattern_response",
    "evaluate_pattern",
    "speaker_harmonics",
    "pattern_from_dict",
    "pattern_to_dict",
]


def associated_legendre(m: int, ell: int, x):
    """Associated Legendre P_{m,ell}(x) with the Condon-Shortley phase.

    ``m`` is the (nonnegative) degree, ``ell`` the order with |ell| <= m.
    Negative orders use P_{m,-ell} = (-1)^ell (m-ell)!/(m+ell)! P_{m,ell}.
    """
    if abs(ell) > m:
        raise PatternError(f"order |{ell}| exceeds degree {m}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1 + 1e-12):
        raise PatternError("argument must lie in [-1, 1]")
    if ell >= 0:
        return lpmv(ell, m, x)
    ell = -ell
    scale = (-1.0) ** ell * math.factorial(m - ell) / math.factorial(m + ell)
    return scale * lpmv(ell, m, x)


def spherical_harmonic(m: int, ell: int, theta, phi):
    """Orthonormal complex spherical harmonic Y_{m,ell}(theta, phi)."""
    norm = math.sqrt(
        (2 * m + 1) / (4 * math.pi) * math.factorial(m - ell) / math.factorial(m + ell)
    )
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return norm * associated_legendre(m, ell, np.cos(theta)) * np.exp(1j * ell * phi)


def simplified_speaker(f, cos_theta):
    """Talker radiation gain: frequency-dependent cardioid with a rear floor.

    Omnidirectional at DC, increasingly directional with frequency; the rear
    lobe floor decays as 1/(1+f_kHz)^2.
    """
    f = np.asarray(f, dtype=float)
    ct = np.asarray(cos_theta, dtype=float)
    if np.any(np.abs(ct) > 1 + 1e-12):
        raise PatternError("cos(theta) must lie in [-1, 1]")
    if np.any(f < 0):
        raise PatternError("frequency must be nonnegative")
    fk = f / 1000.0
    arg = 1.0 + 0.6743 * fk + 0.3776 * fk**2 - 0.0540 * fk**3 + 0.020 * fk**4
    if np.any(arg <= 0):
        raise PatternError("directivity order is undefined at this frequency")
    rho = np.log(arg)
    front = np.clip(0.5 * (1.0 + ct), 0.0, 1.0)
    back = np.clip(0.5 * (1.0 - ct), 0.0, 1.0)
    # 0^0 := 1 so the on-axis gain is exactly 1 at every frequency
    s = np.where((front == 0.0) & (rho == 0.0), 1.0, front**rho)
    eps = back**8 / (1.0 + fk) ** 2
    return eps * (1.0 - s) + s


def nearest_sample_lookup(directions: np.ndarray, gamma_n) -> int:
    """Index of the grid direction closest to gamma_n (max dot product).

    Ties resolve to the lowest index.
    """
    directions = np.asarray(directions, dtype=float)
    if directions.size == 0:
        raise PatternError("direction grid is empty")
    return int(np.argmax(directions @ np.asarray(gamma_n, dtype=float)))


def _nearest_freq_indices(grid: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    return np.argmin(np.abs(grid[None, :] - np.asarray(freqs, float)[:, None]), axis=1)


class Pattern:
    """Base class for directivity patterns.

    Subclasses implement ``response(freqs, orientation) -> complex array``
    evaluated at the given orientation for each frequency in hertz.
    """

    tag: str = ""

    def response(self, freqs, orientation: Orientation) -> np.ndarray:
        raise NotImplementedError


class Omnidirectional(Pattern):
    tag = "omnidirectional"

    def response(self, freqs, orientation):
        return np.ones(np.shape(freqs), dtype=complex)


class Dipole(Pattern):
    tag = "dipole"

    def response(self, freqs, orientation):
        return np.full(np.shape(freqs), orientation.cos_theta, dtype=complex)


class Cardioid(Pattern):
    tag = "cardioid"

    def response(self, freqs, orientation):
        g = 0.5 + 0.5 * orientation.cos_theta
        return np.full(np.shape(freqs), g, dtype=complex)


class Supercardioid(Pattern):
    tag = "supercardioid"

    def response(self, freqs, orientation):
        g = (math.sqrt(2) - 1.0) + (2.0 - math.sqrt(2)) * orientation.cos_theta
        return np.full(np.shape(freqs), g, dtype=complex)


class SimplifiedSpeaker(Pattern):
    tag = "simplified_speaker"

    def response(self, freqs, orientation):
        return simplified_speaker(freqs, orientation.cos_theta).astype(complex)


@dataclass
class SphericalHarmonics(Pattern):
    """Pattern given by spherical-harmonic coefficients on a frequency grid.

    ``coefficients`` has shape ((order+1)^2, F) with rows in (m, ell) order,
    m = 0..order and ell = -m..m; ``freq_grid`` has F ascending frequencies.
    Coefficient tracks are looked up at the nearest grid frequency.
    """

    order: int
    freq_grid: np.ndarray
    coefficients: np.ndarray
    tag: str = field(default="spherical_harmonics", init=False)

    def __post_init__(self):
        self.freq_grid = np.asarray(self.freq_grid, dtype=float)
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        n = (self.order + 1) ** 2
        if self.coefficients.shape != (n, self.freq_grid.size):
            raise PatternError(
                f"expected {(n, self.freq_grid.size)} coefficient array, "
                f"got {self.coefficients.shape}"
            )

    def basis(self, orientation: Orientation) -> np.ndarray:
        """All (order+1)^2 harmonics at the orientation's angles."""
        theta = math.acos(min(1.0, max(-1.0, orientation.cos_theta)))
        phi = orientation.phi
        vals = np.empty((self.order + 1) ** 2, dtype=complex)
        row = 0
        for m in range(self.order + 1):
            for ell in range(-m, m + 1):
                vals[row] = spherical_harmonic(m, ell, theta, phi)
                row += 1
        return vals

    def response(self, freqs, orientation):
        freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
        y = self.basis(orientation)
        cols = _nearest_freq_indices(self.freq_grid, freqs)
        return y @ self.coefficients[:, cols]


@dataclass
class SampledGrid(Pattern):
    """Pattern sampled on a set of directions; nearest direction wins.

    ``directions`` is (L, 3) unit vectors; ``responses`` is (L, F) complex on
    the ``freq_grid`` frequencies.
    """

    directions: np.ndarray
    freq_grid: np.ndarray
    responses: np.ndarray
    tag: str = field(default="sampled_grid", init=False)

    def __post_init__(self):
        self.directions = np.asarray(self.directions, dtype=float)
        self.freq_grid = np.asarray(self.freq_grid, dtype=float)
        self.responses = np.asarray(self.responses, dtype=complex)
        if self.directions.ndim != 2 or self.directions.shape[1] != 3:
            raise PatternError("directions must be an (L, 3) array")
        if self.directions.shape[0] < 1:
            raise PatternError("at least one grid direction is required")
        norms = np.linalg.norm(self.directions, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            raise PatternError("grid directions must be unit vectors")
        if self.responses.shape != (self.directions.shape[0], self.freq_grid.size):
            raise PatternError("responses shape does not match directions/frequencies")

    def response(self, freqs, orientation):
        freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
        i_star = nearest_sample_lookup(self.directions, orientation.gamma)
        cols = _nearest_freq_indices(self.freq_grid, freqs)
        return self.responses[i_star, cols]


def pattern_response(pattern: Pattern, freqs, orientation: Orientation, f_s: float):
    """Complex gain of ``pattern`` at each frequency, bounded by Nyquist."""
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    if np.any(freqs < 0) or np.any(freqs > f_s / 2 + 1e-9):
        raise PatternError("frequency outside [0, f_s/2]")
    return np.atleast_1d(pattern.response(freqs, orientation))


def evaluate_pattern(pattern: Pattern, f: float, orientation: Orientation, f_s: float):
    """Scalar-frequency convenience wrapper over :func:`pattern_response`."""
    return complex(pattern_response(pattern, [f], orientation, f_s)[0])


def speaker_harmonics(order: int = 9, freq_grid=None) -> SphericalHarmonics:
    """Project the talker radiation model onto spherical harmonics.

    The model is symmetric around the front axis, so only ell = 0 tracks are
    nonzero. Projection uses Gauss-Legendre quadrature in cos(theta), exact
    for the polynomial part of the integrand.
    """
    if freq_grid is None:
        freq_grid = np.arange(0.0, 8001.0, 250.0)
    freq_grid = np.asarray(freq_grid, dtype=float)
    x, w = np.polynomial.legendre.leggauss(max(4 * order, 64))
    gains = np.stack([simplified_speaker(f, x) for f in freq_grid], axis=1)
    coeffs = np.zeros(((order + 1) ** 2, freq_grid.size), dtype=complex)
    row = 0
    for m in range(order + 1):
        for ell in range(-m, m + 1):
            if ell == 0:
                # 2*pi from the trivial azimuth integral
                y = spherical_harmonic(m, 0, np.arccos(x), 0.0).real
                coeffs[row] = 2.0 * math.pi * (w * y) @ gains
            row += 1
    return SphericalHarmonics(order=order, freq_grid=freq_grid, coefficients=coeffs)


_ANALYTIC = {
    p.tag: p
    for p in (Omnidirectional(), Dipole(), Cardioid(), Supercardioid(), SimplifiedSpeaker())
}


def pattern_from_dict(spec: dict) -> Pattern:
    """Build a pattern from its file/wire representation.

    Analytic variants: ``{"type": "cardioid"}`` etc. Coefficient sets:
    ``{"type": "spherical_harmonics", "order": M,
       "coefficients": [[m, ell, frequency, real, imag], ...]}``.
    Sampled grids:
    ``{"type": "sampled_grid",
       "samples": [[theta_deg, phi_deg, frequency, real, imag], ...]}``.
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise PatternError("pattern definition must be a mapping with a 'type' key")
    kind = spec["type"]
    if kind in _ANALYTIC:
        return _ANALYTIC[kind]
    if kind == "spherical_harmonics":
        try:
            order = int(spec["order"])
            records = spec["coefficients"]
        except KeyError as e:
            raise PatternError(f"spherical_harmonics pattern missing field {e}")
        freqs = sorted({float(rec[2]) for rec in records})
        fpos = {f: i for i, f in enumerate(freqs)}
        coeffs = np.zeros(((order + 1) ** 2, len(freqs)), dtype=complex)
        for m, ell, f, re, im in records:
            m, ell = int(m), int(ell)
            if abs(ell) > m or m > order:
                raise PatternError(f"coefficient (m={m}, ell={ell}) out of range")
            coeffs[m * m + m + ell, fpos[float(f)]] = complex(float(re), float(im))
        return SphericalHarmonics(order=order, freq_grid=np.array(freqs), coefficients=coeffs)
    if kind == "sampled_grid":
        records = spec.get("samples")
        if not records:
            raise PatternError("sampled_grid pattern requires 'samples' records")
        angles = sorted({(float(r[0]), float(r[1])) for r in records})
        freqs = sorted({float(r[2]) for r in records})
        apos = {a: i for i, a in enumerate(angles)}
        fpos = {f: i for i, f in enumerate(freqs)}
        resp = np.zeros((len(angles), len(freqs)), dtype=complex)
        for th, ph, f, re, im in records:
            resp[apos[(float(th), float(ph))], fpos[float(f)]] = complex(
                float(re), float(im)
            )
        t = np.radians([a[0] for a in angles])
        p = np.radians([a[1] for a in angles])
        dirs = np.stack(
            [np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=1
        )
        return SampledGrid(directions=dirs, freq_grid=np.array(freqs), responses=resp)
    raise PatternError(f"unknown pattern type {kind!r}")


def pattern_to_dict(pattern: Pattern) -> dict:
    """Inverse of :func:`pattern_from_dict` (angles reconstructed for grids)."""
    if pattern.tag in _ANALYTIC:
        return {"type": pattern.tag}
    if isinstance(pattern, SphericalHarmonics):
        records = []
        row = 0
        for m in range(pattern.order + 1):
            for ell in range(-m, m + 1):
                for fi, f in enumerate(pattern.freq_grid):
                    c = pattern.coefficients[row, fi]
                    if c != 0:
                        records.append(
                            [m, ell, float(f), float(c.real), float(c.imag)]
                        )
                row += 1
        return {"type": pattern.tag, "order": pattern.order, "coefficients": records}
    if isinstance(pattern, SampledGrid):
        records = []
        for li, g in enumerate(pattern.directions):
            th = math.degrees(math.acos(min(1.0, max(-1.0, g[2]))))
            ph = math.degrees(math.atan2(g[1], g[0])) % 360.0
            for fi, f in enumerate(pattern.freq_grid):
                c = pattern.responses[li, fi]
                records.append([th, ph, float(f), float(c.real), float(c.imag)])
        return {"type": pattern.tag, "samples": records}
    raise PatternError(f"cannot serialize pattern {pattern!r}")

"""Integer/fractional delay split and FIR tap synthesis.

Each propagation delay is rounded to the sample grid; the sub-sample
remainder is realized by a windowed interpolation filter of length 2D+1.
For flat spectra the taps have the closed sinc form; for frequency-dependent
pattern responses they come from an inverse DFT of the combined spectrum
with the fractional-delay phase applied on signed frequencies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "DelaySplit",
    "split_delay",
    "omni_taps",
    "pattern_taps",
    "anti_alias_window",
    "mirror_spectrum",
    "default_fft_size",
]

_CONJ_SYM_TOL = 1e-9
_REAL_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class DelaySplit:
    """Sample-grid delay plus fractional remainder in [-0.5, 0.5)."""

    tau_int: int
    zeta: float


def split_delay(tau: float, f_s: float) -> DelaySplit:
    """Split a delay in seconds into integer samples and a fractional part.

    Halfway values round half-up, so e.g. 100.5 samples becomes (101, -0.5)
    and zeta always lies in [-0.5, 0.5).
    """
    if tau < 0:
        raise ConfigurationError("delay must be nonnegative")
    x = tau * f_s
    tau_int = math.floor(x + 0.5)
    return DelaySplit(tau_int=tau_int, zeta=x - tau_int)


def omni_taps(zeta: float, D: int) -> np.ndarray:
    """Closed-form fractional-delay taps for a flat (unit) spectrum.

    c(l) = sinc(l - zeta - D) for l = 0..2D; the zeta = 0 case is the unit
    impulse at l = D.
    """
    if D < 1:
        raise ConfigurationError("half length D must be >= 1")
    ell = np.arange(2 * D + 1)
    return np.sinc(ell - zeta - D)


def default_fft_size(D: int) -> int:
    """Smallest power of two >= 8(2D+1)."""
    return 1 << (8 * (2 * D + 1) - 1).bit_length()


def mirror_spectrum(half: np.ndarray, n_fft: int) -> np.ndarray:
    """Extend a half spectrum on bins 0..n_fft//2 to full conjugate symmetry.

    Bins 0 and n_fft/2 are forced real so the inverse transform is exactly
    real for arbitrary complex pattern gains.
    """
    half = np.asarray(half, dtype=complex)
    if half.shape[-1] != n_fft // 2 + 1:
        raise ConfigurationError(
            f"half spectrum must have {n_fft // 2 + 1} bins, got {half.shape[-1]}"
        )
    full = np.zeros(half.shape[:-1] + (n_fft,), dtype=complex)
    full[..., : n_fft // 2 + 1] = half
    full[..., 0] = half[..., 0].real
    full[..., n_fft // 2] = half[..., n_fft // 2].real
    full[..., n_fft // 2 + 1 :] = np.conj(full[..., 1 : n_fft // 2][..., ::-1])
    return full


def pattern_taps(
    C: np.ndarray, zeta: float, D: int, D_e: int | None = None
) -> np.ndarray:
    """Taps embedding a combined pattern spectrum and a fractional delay.

    ``C`` is the combined response on the full DFT grid of size len(C) over
    [0, 2pi) and must be conjugate symmetric; the result is the real inverse
    transform of C(w) exp(-j w (zeta + D_e)) cropped to 2D+1 taps centered
    at D_e. Supports a leading batch dimension on ``C`` with per-row zeta.
    """
    C = np.asarray(C, dtype=complex)
    n_fft = C.shape[-1]
    if D_e is None:
        D_e = D
    if D_e < D:
        raise ConfigurationError("centering offset D_e must be >= D")
    if n_fft < 4 * (2 * D + 1):
        raise ConfigurationError("DFT grid too small for the requested tap length")
    if D_e + D >= n_fft:
        raise ConfigurationError("centering offset D_e too large for the DFT grid")
    mirrored = np.conj(np.roll(C[..., ::-1], 1, axis=-1))
    scale = np.maximum(np.max(np.abs(C), axis=-1, keepdims=True), 1e-300)
    if np.any(np.abs(C - mirrored) > _CONJ_SYM_TOL * scale):
        raise ConfigurationError("combined spectrum is not conjugate symmetric")
    if n_fft % 2:
        raise ConfigurationError("DFT grid size must be even")
    # signed angular frequencies so a real spectrum yields real taps; the
    # Nyquist bin is real-cast, averaging the +/- pi phase contributions
    omega = 2.0 * np.pi * np.fft.fftfreq(n_fft)
    shift = np.asarray(zeta, dtype=float)[..., None] + D_e
    shifted = C * np.exp(-1j * omega * shift)
    shifted[..., n_fft // 2] = shifted[..., n_fft // 2].real
    e = np.fft.ifft(shifted, axis=-1)
    taps = e[..., D_e - D : D_e + D + 1]
    resid = np.max(np.abs(taps.imag)) / max(np.max(np.abs(taps)), 1e-300)
    if resid > _REAL_RESIDUAL_TOL:
        raise ConfigurationError("inverse transform is not real within tolerance")
    return np.ascontiguousarray(taps.real)


def anti_alias_window(zeta: float, D: int) -> np.ndarray:
    """Hamming window of length 2D+1, shifted by the fractional delay."""
    if D < 1:
        raise ConfigurationError("half length D must be >= 1")
    ell = np.arange(2 * D + 1)
    return 0.54 - 0.46 * np.cos(np.pi * (ell - zeta) / D)

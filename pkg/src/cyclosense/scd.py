"""Spectral correlation density estimation by the frequency-smoothing method.

One analysis window of K real samples is tapered and transformed; the cyclic
periodogram

    I_a(f) = X(f + a/2) * conj(X(f - a/2)) / (K * U)

is formed on a grid of even DFT-bin offsets a (the cyclic frequencies) and
smoothed along f with a moving average. U is the mean squared taper
coefficient, which keeps the noise level taper-invariant. Frequencies are
indexed on the centered (fftshift) axis; a cell is valid only when both
f + a/2 and f - a/2 fall inside the K-bin axis, so no wraparound ever mixes
unrelated frequencies.

The alpha profile reduces the (f, alpha) plane to the alpha axis by taking
the per-alpha maximum magnitude over valid cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .siggen import SampleBuffer

TAPERS = ("hamming", "rectangular")

__all__ = [
    "TAPERS",
    "ScdConfig",
    "ScdMatrix",
    "AlphaProfile",
    "AlphaSupportError",
    "taper_coefficients",
    "snap_alpha_to_even_bin",
    "segment_windows",
    "estimate_scd",
    "alpha_profile",
]


class AlphaSupportError(ValueError):
    """An alpha column has no valid (f, alpha) cells to reduce over."""


@dataclass(frozen=True)
class ScdConfig:
    """Estimator configuration.

    alpha_grid holds cyclic frequencies as even DFT-bin offsets so that
    f +/- a/2 lands on integer bins without interpolation. smoothing_length
    is coerced up to the next odd integer to keep the moving average centered.
    """

    window_length_k: int
    smoothing_length: int
    alpha_grid: tuple[int, ...]
    taper: str = "hamming"

    def __post_init__(self) -> None:
        k = int(self.window_length_k)
        if k < 2 or (k & (k - 1)) != 0:
            raise ValueError("window_length_k must be a power of two >= 2")
        object.__setattr__(self, "window_length_k", k)
        sm = int(self.smoothing_length)
        if sm < 1:
            raise ValueError("smoothing_length must be positive")
        sm |= 1  # odd coercion
        if sm >= k:
            raise ValueError("smoothing_length must be smaller than the window")
        object.__setattr__(self, "smoothing_length", sm)
        if self.taper not in TAPERS:
            raise ValueError(f"unknown taper {self.taper!r}")
        grid = tuple(int(a) for a in self.alpha_grid)
        if not grid:
            raise ValueError("alpha_grid must not be empty")
        if len(set(grid)) != len(grid):
            raise ValueError("alpha_grid entries must be unique")
        for a in grid:
            if a % 2 != 0:
                raise ValueError(f"alpha bin offset {a} is not even")
            if abs(a) >= k:
                raise ValueError(f"alpha bin offset {a} out of range |a| < {k}")
        object.__setattr__(self, "alpha_grid", grid)


@dataclass(frozen=True)
class ScdMatrix:
    """Complex SCD estimate on a (f bin, alpha bin) grid.

    values has shape (K, n_alpha); f_axis_hz is the centered frequency axis
    and alpha_axis_hz the cyclic frequency of each column. valid_mask marks
    cells whose bin pair lies fully inside the K-bin axis.
    """

    values: np.ndarray
    f_axis_hz: np.ndarray
    alpha_axis_hz: np.ndarray
    alpha_bins: tuple[int, ...]
    valid_mask: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != self.valid_mask.shape:
            raise ValueError("values and valid_mask shapes disagree")
        if self.values.shape != (self.f_axis_hz.size, self.alpha_axis_hz.size):
            raise ValueError("axis lengths do not match the value grid")
        if len(self.alpha_bins) != self.alpha_axis_hz.size:
            raise ValueError("alpha_bins length does not match the alpha axis")


@dataclass(frozen=True)
class AlphaProfile:
    """Per-alpha maxima of |SCD| over the valid frequency support."""

    alphas_hz: np.ndarray
    alpha_bins: tuple[int, ...]
    maxima: np.ndarray
    window_index: int = 0

    def __post_init__(self) -> None:
        if self.alphas_hz.size != self.maxima.size or len(self.alpha_bins) != self.maxima.size:
            raise ValueError("profile axes disagree in length")
        if not np.all(np.isfinite(self.maxima)) or np.any(self.maxima < 0):
            raise ValueError("profile maxima must be finite and nonnegative")


def taper_coefficients(name: str, length: int) -> np.ndarray:
    """Taper coefficients for the analysis window."""
    if name == "hamming":
        j = np.arange(length)
        return 0.54 - 0.46 * np.cos(2.0 * np.pi * j / (length - 1))
    if name == "rectangular":
        return np.ones(length)
    raise ValueError(f"unknown taper {name!r}")


def snap_alpha_to_even_bin(alpha_hz: float, sample_rate_hz: float, window_length_k: int) -> int:
    """Snap a cyclic frequency in Hz to the nearest even DFT-bin offset."""
    bins = alpha_hz * window_length_k / sample_rate_hz
    return 2 * int(round(bins / 2.0))


def segment_windows(buffer: SampleBuffer, window_length_k: int) -> list[SampleBuffer]:
    """Split a buffer into floor(len/K) contiguous non-overlapping windows.

    Window i holds samples [i*K, (i+1)*K); the trailing remainder is dropped.
    """
    k = int(window_length_k)
    if k < 1:
        raise ValueError("window length must be positive")
    n = len(buffer)
    if k > n:
        raise ValueError(f"window length {k} exceeds buffer length {n}")
    count = n // k
    return [
        SampleBuffer(buffer.samples[i * k:(i + 1) * k], buffer.sample_rate_hz)
        for i in range(count)
    ]


def _smoothed(column: np.ndarray, smoothing_length: int) -> np.ndarray:
    """Centered moving average with fixed 1/smoothing_length normalization.

    Cells whose window is truncated by the ends of the column average in
    implicit zeros; renormalizing by the surviving cell count would make the
    cell variance position-dependent and bias a max statistic toward the
    edges.
    """
    full = np.convolve(column, np.ones(smoothing_length) / smoothing_length, mode="full")
    half = (smoothing_length - 1) // 2
    return full[half:half + column.size]


def estimate_scd(window: SampleBuffer, cfg: ScdConfig) -> ScdMatrix:
    """Frequency-smoothed cyclic periodogram of one analysis window."""
    k = cfg.window_length_k
    if len(window) != k:
        raise ValueError(f"window length {len(window)} does not match K={k}")
    taper = taper_coefficients(cfg.taper, k)
    power_norm = float(np.mean(taper * taper))
    spectrum = np.fft.fftshift(np.fft.fft(taper * window.samples))

    n_alpha = len(cfg.alpha_grid)
    values = np.zeros((k, n_alpha), dtype=np.complex128)
    mask = np.zeros((k, n_alpha), dtype=bool)
    for col, a in enumerate(cfg.alpha_grid):
        half = a // 2
        lo = abs(half)
        hi = k - 1 - abs(half)
        raw = (
            spectrum[lo + half:hi + half + 1]
            * np.conj(spectrum[lo - half:hi - half + 1])
            / (k * power_norm)
        )
        values[lo:hi + 1, col] = _smoothed(raw, cfg.smoothing_length)
        mask[lo:hi + 1, col] = True

    fs = window.sample_rate_hz
    f_axis = (np.arange(k) - k // 2) * fs / k
    alpha_axis = np.array(cfg.alpha_grid, dtype=np.float64) * fs / k
    return ScdMatrix(values, f_axis, alpha_axis, cfg.alpha_grid, mask)


def alpha_profile(scd: ScdMatrix, window_index: int = 0) -> AlphaProfile:
    """Reduce an SCD matrix to per-alpha maxima of |values| over valid cells."""
    n_alpha = scd.alpha_axis_hz.size
    maxima = np.empty(n_alpha)
    for col in range(n_alpha):
        cells = scd.values[scd.valid_mask[:, col], col]
        if cells.size == 0:
            raise AlphaSupportError(
                f"alpha bin {scd.alpha_bins[col]} has no valid frequency support"
            )
        maxima[col] = np.max(np.abs(cells))
    return AlphaProfile(
        alphas_hz=scd.alpha_axis_hz.copy(),
        alpha_bins=scd.alpha_bins,
        maxima=maxima,
        window_index=int(window_index),
    )

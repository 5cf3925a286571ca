"""Seedable generation of AM test signals, white Gaussian noise, and SNR mixtures.

Every generator is a pure function of its spec and seed, so identical inputs
reproduce identical buffers. Buffers are immutable once created and safe to
share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MODULATIONS = ("am",)

__all__ = [
    "MODULATIONS",
    "SignalSpec",
    "SampleBuffer",
    "NoiseSpec",
    "generate_am",
    "generate_awgn",
    "mix_at_snr",
]


@dataclass(frozen=True)
class SignalSpec:
    """Parameters of a modulated test signal.

    The modulation index is the peak deviation of the message envelope:
    the emitted waveform is (1 + index * m(t)) * cos(2*pi*fc*t) with
    max|m| = 1, so index <= 1 keeps the envelope nonnegative.
    """

    carrier_freq_hz: float
    baseband_bandwidth_hz: float
    sample_rate_hz: float
    duration_samples: int
    modulation: str = "am"
    modulation_index: float = 0.5

    def __post_init__(self) -> None:
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if self.carrier_freq_hz <= 0:
            raise ValueError("carrier_freq_hz must be positive")
        if self.carrier_freq_hz >= self.sample_rate_hz / 2:
            raise ValueError(
                f"carrier {self.carrier_freq_hz} Hz violates the Nyquist limit "
                f"{self.sample_rate_hz / 2} Hz"
            )
        if not 0 < self.baseband_bandwidth_hz < self.carrier_freq_hz:
            raise ValueError("baseband_bandwidth_hz must lie in (0, carrier_freq_hz)")
        if int(self.duration_samples) < 1 or self.duration_samples != int(self.duration_samples):
            raise ValueError("duration_samples must be a positive integer")
        if self.modulation not in MODULATIONS:
            raise ValueError(f"unsupported modulation {self.modulation!r}")
        if not 0.0 <= self.modulation_index <= 1.0:
            raise ValueError("modulation_index must lie in [0, 1]")


@dataclass(frozen=True)
class SampleBuffer:
    """Real-valued time-domain samples with their sample rate.

    The sample array is coerced to float64 and frozen (read-only) so buffers
    can be handed to concurrent consumers without copies.
    """

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self) -> None:
        arr = np.array(self.samples, dtype=np.float64, copy=True)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("samples must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must all be finite")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def power(self) -> float:
        """Mean squared amplitude of the buffer."""
        return float(np.mean(self.samples * self.samples))


@dataclass(frozen=True)
class NoiseSpec:
    """White Gaussian noise description: variance (power) and RNG seed."""

    variance: float
    seed: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.variance) and self.variance > 0):
            raise ValueError("variance must be positive and finite")
        if self.seed != int(self.seed) or int(self.seed) < 0:
            raise ValueError("seed must be a nonnegative integer")


def _bandlimited_message(n: int, bandwidth_hz: float, sample_rate_hz: float,
                         rng: np.random.Generator) -> np.ndarray:
    """Zero-mean Gaussian message brickwall-filtered to [0, bandwidth] and
    normalized to unit peak. Returns zeros when no DFT bin falls in band."""
    white = rng.standard_normal(n)
    spec = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(n, d=1.0 / sample_rate_hz)
    spec[freqs > bandwidth_hz] = 0.0
    spec[0] = 0.0
    message = np.fft.irfft(spec, n)
    peak = np.max(np.abs(message))
    if peak > 0.0:
        message /= peak
    return message


def generate_am(spec: SignalSpec, seed: int) -> SampleBuffer:
    """Generate an AM waveform (1 + index*m(t)) * cos(2*pi*fc*t).

    The message m(t) is band-limited Gaussian noise, peak-normalized so the
    deviation never exceeds the modulation index. With index 0 the output is
    exactly the unmodulated carrier cos(2*pi*fc*k/fs).
    """
    if seed != int(seed) or int(seed) < 0:
        raise ValueError("seed must be a nonnegative integer")
    n = int(spec.duration_samples)
    rng = np.random.default_rng(int(seed))
    message = _bandlimited_message(n, spec.baseband_bandwidth_hz, spec.sample_rate_hz, rng)
    carrier = np.cos(
        2.0 * np.pi * spec.carrier_freq_hz / spec.sample_rate_hz * np.arange(n)
    )
    wave = (1.0 + spec.modulation_index * message) * carrier
    return SampleBuffer(wave, spec.sample_rate_hz)


def generate_awgn(length: int, noise: NoiseSpec, sample_rate_hz: float = 1.0) -> SampleBuffer:
    """Generate i.i.d. zero-mean Gaussian samples with the requested variance.

    White noise has no band structure of its own; pass the sample rate of the
    signal it will accompany (default 1.0 for standalone statistical use).
    """
    if length != int(length) or int(length) < 1:
        raise ValueError("length must be a positive integer")
    rng = np.random.default_rng(int(noise.seed))
    samples = np.sqrt(noise.variance) * rng.standard_normal(int(length))
    return SampleBuffer(samples, sample_rate_hz)


def mix_at_snr(signal: SampleBuffer, noise: SampleBuffer, snr_db: float) -> SampleBuffer:
    """Return g*signal + noise with g chosen so the measured power ratio is snr_db.

    The SNR is defined over the full sampling bandwidth:
    10*log10(P(g*signal) / P(noise)) == snr_db with P the mean square.
    """
    if len(signal) != len(noise):
        raise ValueError("signal and noise must have equal length")
    if noise.sample_rate_hz != signal.sample_rate_hz:
        raise ValueError("signal and noise sample rates disagree")
    if not np.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    p_signal = signal.power
    p_noise = noise.power
    if p_signal <= 0.0:
        raise ValueError("signal has zero power")
    if p_noise <= 0.0:
        raise ValueError("noise has zero power")
    gain = np.sqrt(10.0 ** (snr_db / 10.0) * p_noise / p_signal)
    return SampleBuffer(gain * signal.samples + noise.samples, signal.sample_rate_hz)

"""Dynamics compression and FFT spectrum analysis.

These are the two transformations whose implementation quirks the
fingerprinting vectors exploit.  This module is a self-consistent
reference engine: a soft-knee static curve with a one-pole gain
envelope, a hand-rolled radix-2 FFT, and a Blackman-windowed magnitude
analyser with exponential smoothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .synth import AudioBuffer

# floor for |sample| before converting to dB; keeps log10 finite on silence
_LEVEL_EPS = 1e-60


@dataclass(frozen=True)
class CompressorParams:
    threshold_db: float = -24.0
    knee_db: float = 30.0
    ratio: float = 12.0
    attack: float = 0.003
    release: float = 0.25

    def __post_init__(self):
        vals = (self.threshold_db, self.knee_db, self.ratio, self.attack, self.release)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("compressor parameters must be finite")
        if self.ratio < 1:
            raise ValueError("ratio must be >= 1")
        if self.knee_db < 0 or self.attack < 0 or self.release < 0:
            raise ValueError("knee, attack and release must be >= 0")


@dataclass(frozen=True)
class AnalyserConfig:
    fft_size: int = 2048
    smoothing: float = 0.8
    min_db: float = -100.0

    def __post_init__(self):
        if not (32 <= self.fft_size <= 32768) or self.fft_size & (self.fft_size - 1):
            raise ValueError("fft_size must be a power of two in [32, 32768]")
        if not 0.0 <= self.smoothing < 1.0:
            raise ValueError("smoothing must be in [0, 1)")


@dataclass(frozen=True)
class FrequencyFrame:
    """Half-spectrum magnitudes in dB, floored at ``floor_db``."""

    bins: np.ndarray = field(repr=False)
    floor_db: float = -100.0

    def __post_init__(self):
        object.__setattr__(self, "bins", np.asarray(self.bins, dtype=np.float64))
        if not np.all(np.isfinite(self.bins)):
            raise ValueError("bins must be finite")
        if np.any(self.bins < self.floor_db):
            raise ValueError("bins must not lie below floor_db")

    def __len__(self) -> int:
        return len(self.bins)


def compress_curve(x_db, p: CompressorParams = CompressorParams()):
    """Static soft-knee compression curve, in dB.

    Identity below threshold-knee/2, slope 1/ratio above threshold+knee/2,
    quadratic interpolation inside the knee.  Accepts scalars or arrays.
    """
    x = np.asarray(x_db, dtype=np.float64)
    t, k, r = p.threshold_db, p.knee_db, p.ratio
    if k == 0.0:
        y = np.where(x <= t, x, t + (x - t) / r)
    else:
        knee = x + (1.0 / r - 1.0) * (x - t + k / 2.0) ** 2 / (2.0 * k)
        y = np.where(x < t - k / 2.0, x, np.where(x > t + k / 2.0, t + (x - t) / r, knee))
    return float(y) if np.isscalar(x_db) else y


def compress(buf: AudioBuffer, p: CompressorParams = CompressorParams()) -> AudioBuffer:
    """Apply dynamics compression to a buffer.

    Per-sample level detection (|x| -> dB), the static curve, and a
    one-pole envelope on the gain reduction: the attack coefficient is
    used while reduction deepens, the release coefficient while it
    recovers.  Fully deterministic.
    """
    x = buf.samples
    level_db = 20.0 * np.log10(np.maximum(np.abs(x), _LEVEL_EPS))
    desired = compress_curve(level_db, p) - level_db  # reduction in dB, <= 0
    ca = 1.0 if p.attack == 0 else 1.0 - np.exp(-1.0 / (buf.sample_rate * p.attack))
    cr = 1.0 if p.release == 0 else 1.0 - np.exp(-1.0 / (buf.sample_rate * p.release))
    env = 0.0
    envelope = np.empty(len(x))
    i = 0
    for d in desired.tolist():
        env += (ca if d < env else cr) * (d - env)
        envelope[i] = env
        i += 1
    return AudioBuffer(buf.sample_rate, x * 10.0 ** (envelope / 20.0))


def _bit_reverse_indices(n: int) -> np.ndarray:
    rev = np.zeros(n, dtype=np.intp)
    for i in range(1, n):
        rev[i] = rev[i >> 1] >> 1 | ((i & 1) * (n >> 1))
    return rev


def fft(signal) -> np.ndarray:
    """Radix-2 decimation-in-time FFT.

    Input length must be a power of two.  Returns the standard DFT,
    X[k] = sum_n x[n] * exp(-2j*pi*k*n/N).
    """
    x = np.asarray(signal, dtype=np.complex128)
    n = len(x)
    if n == 0 or n & (n - 1):
        raise ValueError(f"length {n} is not a power of two")
    data = x[_bit_reverse_indices(n)]
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / size)
        pairs = data.reshape(-1, size)
        even = pairs[:, :half].copy()
        odd = pairs[:, half:] * twiddle
        pairs[:, :half] = even + odd
        pairs[:, half:] = even - odd
        size *= 2
    return data


def ifft(spectrum) -> np.ndarray:
    """Inverse of :func:`fft` via the conjugation identity."""
    x = np.asarray(spectrum, dtype=np.complex128)
    return np.conj(fft(np.conj(x))) / len(x)


def blackman_window(n: int) -> np.ndarray:
    """Periodic Blackman window (a0=0.42, a1=0.5, a2=0.08)."""
    i = np.arange(n)
    return 0.42 - 0.5 * np.cos(2.0 * np.pi * i / n) + 0.08 * np.cos(4.0 * np.pi * i / n)


def analyse(
    buf: AudioBuffer,
    cfg: AnalyserConfig = AnalyserConfig(),
    frame_offset: int = 0,
    prev: FrequencyFrame | None = None,
) -> FrequencyFrame:
    """One analyser frame: windowed magnitude half-spectrum in dB.

    The fft_size slice at ``frame_offset`` is Blackman-windowed and
    transformed; magnitudes are |X[k]|/fft_size.  When ``prev`` is given
    the magnitudes are exponentially smoothed against the previous
    frame (factor cfg.smoothing, in the linear domain) before the dB
    conversion.  Bins never fall below cfg.min_db.
    """
    n = cfg.fft_size
    if frame_offset < 0 or frame_offset + n > len(buf):
        raise ValueError(
            f"frame [{frame_offset}, {frame_offset + n}) outside buffer of {len(buf)}"
        )
    windowed = buf.samples[frame_offset : frame_offset + n] * blackman_window(n)
    mags = np.abs(fft(windowed)[: n // 2]) / n
    if prev is not None:
        if len(prev) != n // 2:
            raise ValueError("previous frame has a different bin count")
        prev_linear = 10.0 ** (prev.bins / 20.0)
        mags = cfg.smoothing * prev_linear + (1.0 - cfg.smoothing) * mags
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mags)
    return FrequencyFrame(np.maximum(db, cfg.min_db), floor_db=cfg.min_db)

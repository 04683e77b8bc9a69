"""Band-limited waveform synthesis and signal-graph primitives.

Everything a fingerprinting pipeline feeds on starts here: the four
classic oscillator shapes, user-defined periodic waves, gain, channel
merging and AM/FM modulation.  All synthesis is additive (truncated
Fourier series keeping only harmonics strictly below Nyquist), so the
output is deterministic and alias-free by construction.

All functions are pure: same inputs, bit-identical buffers.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

SHAPES = ("sine", "triangle", "square", "sawtooth", "custom")

# harmonics per np.sin chunk; keeps the additive synthesis working set small
_CHUNK = 64


@dataclass(frozen=True)
class PeriodicWaveCoefficients:
    """Harmonic amplitudes of a custom periodic wave.

    ``real[n]`` scales cos(2*pi*n*f*t), ``imag[n]`` scales sin(2*pi*n*f*t).
    Index 0 is the DC term and is ignored during synthesis.
    """

    real: tuple[float, ...]
    imag: tuple[float, ...]
    normalize: bool = True

    def __post_init__(self):
        if len(self.real) != len(self.imag):
            raise ValueError("real and imag must have equal length")
        if len(self.real) < 2:
            raise ValueError("need at least 2 coefficients (index 0 is DC)")


@dataclass(frozen=True)
class OscillatorSpec:
    shape: str
    frequency: float
    custom: PeriodicWaveCoefficients | None = None

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown shape {self.shape!r}")
        if not (self.frequency > 0 and np.isfinite(self.frequency)):
            raise ValueError("frequency must be finite and > 0")
        if (self.custom is not None) != (self.shape == "custom"):
            raise ValueError("custom coefficients present iff shape='custom'")


@dataclass(frozen=True)
class GainSpec:
    gain: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.gain) or self.gain < 0:
            raise ValueError("gain must be finite and >= 0")


@dataclass(frozen=True)
class AudioBuffer:
    """A single-channel sampled signal.

    Samples are dimensionless amplitudes, nominally in [-1, 1]; excursions
    are permitted (modulation products routinely exceed unity).
    """

    sample_rate: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.sample_rate > 0:
            raise ValueError("sample_rate must be > 0")
        object.__setattr__(
            self, "samples", np.asarray(self.samples, dtype=np.float64)
        )
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite (no NaN/inf)")

    def __len__(self) -> int:
        return len(self.samples)


def _num_samples(sample_rate: float, duration: float) -> int:
    if not duration > 0:
        raise ValueError("duration must be > 0")
    return int(round(sample_rate * duration))


def _harmonics(shape: str, frequency: float, nyquist: float):
    """Harmonic orders and sine amplitudes of the ideal shape, band-limited.

    Returns (orders, amplitudes) with every order*frequency strictly below
    the Nyquist frequency.  The series are the textbook ones, phase 0 at
    t=0, ideal peak amplitude 1 for every shape.
    """
    n_max = int(np.ceil(nyquist / frequency)) - 1
    if n_max < 1:
        return np.array([], dtype=np.int64), np.array([])
    if shape == "sine":
        return np.array([1]), np.array([1.0])
    n = np.arange(1, n_max + 1)
    if shape == "sawtooth":
        amp = (2.0 / np.pi) * (-1.0) ** (n + 1) / n
    elif shape == "square":
        amp = np.where(n % 2 == 1, 4.0 / (np.pi * n), 0.0)
    elif shape == "triangle":
        # 8/(pi^2 n^2) on odd harmonics, sign alternating n=1,5,9... vs 3,7,11...
        amp = np.where(n % 2 == 1, 8.0 / (np.pi**2 * n**2), 0.0)
        amp *= np.where(n % 4 == 1, 1.0, -1.0)
    else:
        raise ValueError(f"unknown shape {shape!r}")
    keep = amp != 0.0
    return n[keep], amp[keep]


def _additive(orders, amps, frequency, sample_rate, n_samples):
    t = np.arange(n_samples) / sample_rate
    out = np.zeros(n_samples)
    for i in range(0, len(orders), _CHUNK):
        o = orders[i : i + _CHUNK, None]
        a = amps[i : i + _CHUNK, None]
        out += (a * np.sin(2.0 * np.pi * frequency * o * t[None, :])).sum(axis=0)
    return out


def synth_wave(spec: OscillatorSpec, sample_rate: float, duration: float) -> AudioBuffer:
    """Render an oscillator as a band-limited waveform.

    The output equals the truncated Fourier series of the ideal shape,
    keeping only harmonics strictly below sample_rate/2.  Frequencies at
    or above Nyquist are rejected.
    """
    if spec.shape == "custom":
        return eval_periodic_wave(spec.custom, spec.frequency, sample_rate, duration)
    nyquist = sample_rate / 2.0
    if spec.frequency >= nyquist:
        raise ValueError(
            f"frequency {spec.frequency} Hz is not below Nyquist ({nyquist} Hz)"
        )
    n_samples = _num_samples(sample_rate, duration)
    orders, amps = _harmonics(spec.shape, spec.frequency, nyquist)
    if len(orders) == 0:
        return AudioBuffer(sample_rate, np.zeros(n_samples))
    period = sample_rate / spec.frequency
    if period == int(period) and int(period) < n_samples:
        # integral sample period: render one period, repeat it
        p = int(period)
        one = _additive(orders, amps, spec.frequency, sample_rate, p)
        reps = -(-n_samples // p)
        return AudioBuffer(sample_rate, np.tile(one, reps)[:n_samples])
    return AudioBuffer(
        sample_rate, _additive(orders, amps, spec.frequency, sample_rate, n_samples)
    )


@functools.lru_cache(maxsize=64)
def _peak_amplitude(real: tuple, imag: tuple, k_max: int) -> float:
    """Peak |x| over one period of the truncated harmonic sum.

    Coarse grid scan followed by ternary refinement around every local
    maximum; accurate to machine precision for these short series.
    """

    def ev(tau):
        tau = np.asarray(tau, dtype=np.float64)
        x = np.zeros_like(tau)
        for k in range(1, k_max + 1):
            x = x + real[k] * np.cos(2 * np.pi * k * tau) + imag[k] * np.sin(
                2 * np.pi * k * tau
            )
        return np.abs(x)

    grid_n = 4096
    tau = np.arange(grid_n) / grid_n
    mag = ev(tau)
    peak = float(mag.max())
    at_max = (mag >= np.roll(mag, 1)) & (mag >= np.roll(mag, -1))
    lo = (np.flatnonzero(at_max) - 1) / grid_n
    hi = lo + 2.0 / grid_n
    for _ in range(90):  # all local maxima refined in lockstep
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        first_lower = ev(m1) < ev(m2)
        lo = np.where(first_lower, m1, lo)
        hi = np.where(first_lower, hi, m2)
    if len(lo):
        peak = max(peak, float(ev(0.5 * (lo + hi)).max()))
    return peak


def eval_periodic_wave(
    coeffs: PeriodicWaveCoefficients,
    frequency: float,
    sample_rate: float,
    duration: float,
) -> AudioBuffer:
    """Render a custom periodic wave from its harmonic coefficients.

    x(t) = sum_{n>=1} real[n]*cos(2*pi*n*f*t) + imag[n]*sin(2*pi*n*f*t),
    truncated to harmonics below Nyquist.  With ``normalize`` the buffer is
    scaled so the peak absolute amplitude over one period equals 1.
    """
    if coeffs is None:
        raise ValueError("custom shape requires coefficients")
    nyquist = sample_rate / 2.0
    if frequency >= nyquist:
        raise ValueError(
            f"frequency {frequency} Hz is not below Nyquist ({nyquist} Hz)"
        )
    k_max = min(len(coeffs.real) - 1, int(np.ceil(nyquist / frequency)) - 1)
    n_samples = _num_samples(sample_rate, duration)
    t = np.arange(n_samples) / sample_rate
    x = np.zeros(n_samples)
    for k in range(1, k_max + 1):
        w = 2.0 * np.pi * k * frequency * t
        x += coeffs.real[k] * np.cos(w) + coeffs.imag[k] * np.sin(w)
    if coeffs.normalize:
        peak = _peak_amplitude(tuple(coeffs.real), tuple(coeffs.imag), k_max)
        if peak == 0.0:
            raise ValueError("cannot normalize an all-zero periodic wave")
        x /= peak
    return AudioBuffer(sample_rate, x)


def custom_wave_coefficients(seed: int = 1, n: int = 12) -> PeriodicWaveCoefficients:
    """The custom-signal coefficient set used by the CustomSignal vector.

    ``n`` real values drawn uniformly from [0, 1) by a seeded generator so
    renders are reproducible, imaginary values alternating pi/2 and 0.
    """
    rng = np.random.default_rng(seed)
    real = tuple(float(v) for v in rng.random(n))
    imag = tuple(np.pi / 2 if k % 2 == 0 else 0.0 for k in range(n))
    return PeriodicWaveCoefficients(real=real, imag=imag, normalize=True)


def apply_gain(buf: AudioBuffer, g: GainSpec) -> AudioBuffer:
    """Multiply every sample by the gain."""
    return AudioBuffer(buf.sample_rate, buf.samples * g.gain)


def _check_aligned(buffers) -> None:
    rates = {b.sample_rate for b in buffers}
    lengths = {len(b) for b in buffers}
    if len(rates) > 1:
        raise ValueError(f"sample rates differ: {sorted(rates)}")
    if len(lengths) > 1:
        raise ValueError(f"buffer lengths differ: {sorted(lengths)}")


def merge(buffers: list[AudioBuffer]) -> AudioBuffer:
    """Channel-merge: sample-wise sum, down-mixed to one analysis channel."""
    if not buffers:
        raise ValueError("merge needs at least one buffer")
    _check_aligned(buffers)
    total = np.zeros(len(buffers[0]))
    for b in buffers:
        total += b.samples
    return AudioBuffer(buffers[0].sample_rate, total)


def am_modulate(
    modulators: list[tuple[AudioBuffer, GainSpec]],
    carrier: AudioBuffer,
    carrier_gain: GainSpec = GainSpec(1.0),
) -> AudioBuffer:
    """Amplitude modulation, gain-node-into-gain-parameter wiring.

    out[t] = carrier_gain * (1 + sum_i g_i * mod_i[t]) * carrier[t]
    """
    _check_aligned([m for m, _ in modulators] + [carrier])
    envelope = np.ones(len(carrier))
    for mod, g in modulators:
        envelope += g.gain * mod.samples
    return AudioBuffer(
        carrier.sample_rate, carrier_gain.gain * envelope * carrier.samples
    )


def fm_modulate(
    modulators: list[tuple[AudioBuffer, GainSpec]],
    carrier_freq: float,
    sample_rate: float,
    duration: float,
) -> AudioBuffer:
    """Frequency modulation of a sine carrier.

    out[t] = sin(2*pi*carrier_freq*t + 2*pi*sum_i g_i * I_i(t)) where
    I_i is the running integral of modulator i, realized as a cumulative
    sum scaled by 1/sample_rate.
    """
    n_samples = _num_samples(sample_rate, duration)
    bufs = [m for m, _ in modulators]
    if bufs:
        _check_aligned(bufs)
        if len(bufs[0]) != n_samples or bufs[0].sample_rate != sample_rate:
            raise ValueError("modulators must match the carrier's rate and length")
    t = np.arange(n_samples) / sample_rate
    phase = 2.0 * np.pi * carrier_freq * t
    for mod, g in modulators:
        phase = phase + 2.0 * np.pi * g.gain * np.cumsum(mod.samples) / sample_rate
    return AudioBuffer(sample_rate, np.sin(phase))

"""The seven end-to-end fingerprinting pipelines.

Each vector renders a deterministic signal graph, applies the device
perturbation, and digests the canonical output: the full rendered
buffer for the compressor-only vector, the analyser frame for every
FFT-based vector.

Clean renders depend only on the engine configuration and perturbed
outputs only on (vector, profile, variant), so both are memoized; an
iteration's wall time therefore reflects the incremental work it did.
"""

from __future__ import annotations

import functools
import hashlib
import re
import time
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import simulate
from .dsp import AnalyserConfig, CompressorParams, FrequencyFrame, analyse, compress
from .synth import (
    AudioBuffer,
    GainSpec,
    OscillatorSpec,
    am_modulate,
    custom_wave_coefficients,
    fm_modulate,
    merge,
    synth_wave,
)


class VectorId(Enum):
    DC = "DC"
    FFT = "FFT"
    HYBRID = "Hybrid"
    CUSTOM_SIGNAL = "CustomSignal"
    MERGED_SIGNALS = "MergedSignals"
    AM = "AM"
    FM = "FM"


#: fixed execution/reporting order for all per-vector output
VECTOR_ORDER = (
    VectorId.DC,
    VectorId.FFT,
    VectorId.HYBRID,
    VectorId.CUSTOM_SIGNAL,
    VectorId.MERGED_SIGNALS,
    VectorId.AM,
    VectorId.FM,
)

_HEX32 = re.compile(r"^[0-9a-f]{32}$")


@dataclass(frozen=True)
class EngineConfig:
    """Render parameters shared by all vectors; defaults follow common
    offline-context usage and are recorded alongside every record."""

    sample_rate: float = 44100.0
    duration: float = 1.0
    oscillator_hz: float = 10000.0  # triangle source of DC/FFT/Hybrid
    custom_hz: float = 440.0
    custom_seed: int = 1
    fft_size: int = 2048
    smoothing: float = 0.8
    min_db: float = -100.0
    frame_offset_seconds: float = 0.5
    threshold_db: float = -24.0
    knee_db: float = 30.0
    ratio: float = 12.0
    attack: float = 0.003
    release: float = 0.25

    def compressor(self) -> CompressorParams:
        return CompressorParams(
            self.threshold_db, self.knee_db, self.ratio, self.attack, self.release
        )

    def analyser(self) -> AnalyserConfig:
        return AnalyserConfig(self.fft_size, self.smoothing, self.min_db)

    def frame_offset(self) -> int:
        return int(round(self.frame_offset_seconds * self.sample_rate))


DEFAULT_ENGINE = EngineConfig()


@dataclass(frozen=True)
class ElementaryFingerprint:
    vector: VectorId
    digest: str

    def __post_init__(self):
        if not _HEX32.match(self.digest):
            raise ValueError("digest must be 32 lowercase hex chars")


@dataclass(frozen=True)
class IterationResult:
    fingerprint: ElementaryFingerprint
    elapsed: float

    def __post_init__(self):
        if not (np.isfinite(self.elapsed) and self.elapsed >= 0):
            raise ValueError("elapsed must be finite and >= 0")


def digest_buffer(values) -> str:
    """MD5 over the little-endian float32 encodings of the values.

    Raw sample/bin bytes rather than decimal strings: locale-free and
    bit-exact.
    """
    data = np.asarray(values, dtype="<f4").tobytes()
    return hashlib.md5(data).hexdigest()


def _synth(shape: str, hz: float, engine: EngineConfig) -> AudioBuffer:
    return synth_wave(OscillatorSpec(shape, hz), engine.sample_rate, engine.duration)


def _am_fm_modulators(engine: EngineConfig):
    return [
        (_synth("triangle", 440.0, engine), GainSpec(60.0)),
        (_synth("square", 18.0, engine), GainSpec(30.0)),
    ]


def render_vector(v: VectorId, engine: EngineConfig = DEFAULT_ENGINE):
    """Render one vector's clean signal graph, unmemoized.

    Returns the compressed AudioBuffer for DC and the analyser
    FrequencyFrame for every other vector.
    """
    comp = engine.compressor()
    if v is VectorId.DC:
        return compress(_synth("triangle", engine.oscillator_hz, engine), comp)
    if v is VectorId.FFT:
        source = _synth("triangle", engine.oscillator_hz, engine)
    elif v is VectorId.HYBRID:
        source = compress(_synth("triangle", engine.oscillator_hz, engine), comp)
    elif v is VectorId.CUSTOM_SIGNAL:
        wave = synth_wave(
            OscillatorSpec(
                "custom", engine.custom_hz, custom_wave_coefficients(engine.custom_seed)
            ),
            engine.sample_rate,
            engine.duration,
        )
        source = compress(wave, comp)
    elif v is VectorId.MERGED_SIGNALS:
        merged = merge(
            [
                _synth("sine", 440.0, engine),
                _synth("triangle", 10000.0, engine),
                _synth("square", 1880.0, engine),
                _synth("sawtooth", 22000.0, engine),
            ]
        )
        source = compress(merged, comp)
    elif v is VectorId.AM:
        carrier = _synth("sine", 10000.0, engine)
        source = compress(am_modulate(_am_fm_modulators(engine), carrier), comp)
    elif v is VectorId.FM:
        modulated = fm_modulate(
            _am_fm_modulators(engine), 10000.0, engine.sample_rate, engine.duration
        )
        source = compress(modulated, comp)
    else:
        raise ValueError(f"unknown vector {v}")
    return analyse(source, engine.analyser(), engine.frame_offset())


@functools.lru_cache(maxsize=64)
def _clean_render(v: VectorId, engine: EngineConfig):
    return render_vector(v, engine)


@functools.lru_cache(maxsize=262144)
def _digest(v: VectorId, engine: EngineConfig, profile, variant: int | None) -> str:
    clean = _clean_render(v, engine)
    if v is VectorId.DC:
        return digest_buffer(simulate.perturb_buffer(clean, profile).samples)
    return digest_buffer(simulate.apply_variant(clean, profile, variant).bins)


def clear_caches() -> None:
    """Drop memoized renders and digests (used by timing measurements)."""
    _clean_render.cache_clear()
    _digest.cache_clear()
    simulate.choose_variant.cache_clear()


def run_vector(
    v: VectorId,
    device,
    iteration: int = 0,
    engine: EngineConfig = DEFAULT_ENGINE,
) -> IterationResult:
    """One fingerprinting iteration: render, perturb, digest, time it."""
    start = time.perf_counter()
    if v is VectorId.DC:
        digest = _digest(v, engine, device, None)
    else:
        digest = _digest(v, engine, device, simulate.choose_variant(device, iteration))
    elapsed = time.perf_counter() - start
    return IterationResult(ElementaryFingerprint(v, digest), elapsed)


def run_all(
    device,
    k: int = 30,
    engine: EngineConfig = DEFAULT_ENGINE,
) -> dict[VectorId, list[IterationResult]]:
    """k iterations of every vector, in the fixed vector order."""
    if k < 1:
        raise ValueError("iteration count must be >= 1")
    return {
        v: [run_vector(v, device, i, engine) for i in range(k)] for v in VECTOR_ORDER
    }

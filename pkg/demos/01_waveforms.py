"""Synthesize the source waveforms and look at their spectra.

Every fingerprinting pipeline starts from one of these deterministic,
band-limited signals.  This script renders each shape and shows where
its harmonic energy sits.
"""

import numpy as np

from audiofp import OscillatorSpec, custom_wave_coefficients, synth_wave

FS = 44100.0

for shape, freq in [("sine", 440.0), ("triangle", 441.0), ("square", 441.0), ("sawtooth", 441.0)]:
    buf = synth_wave(OscillatorSpec(shape, freq), FS, 1.0)
    period = int(FS / freq)
    mags = np.abs(np.fft.rfft(buf.samples[:period]))
    top = np.argsort(mags)[-4:][::-1]
    print(f"{shape:9s} {freq:6.0f} Hz  peak {np.abs(buf.samples).max():.3f}  "
          f"strongest harmonics: {sorted(int(k) for k in top)}")

# the custom periodic wave used by the CustomSignal vector: 12 seeded real
# coefficients, imaginary parts alternating pi/2 and 0, normalized to peak 1
coeffs = custom_wave_coefficients(seed=1)
buf = synth_wave(OscillatorSpec("custom", 440.0, coeffs), FS, 1.0)
print(f"\ncustom wave: reals {np.round(coeffs.real, 3)}")
print(f"normalized peak = {np.abs(buf.samples).max():.9f}")

# band-limit check: no energy at or above Nyquist for an 18 Hz square
sq = synth_wave(OscillatorSpec("square", 18.0), FS, 1.0)
spectrum = np.abs(np.fft.rfft(sq.samples[: int(FS / 18)]))
nyq_harmonic = int(np.ceil(FS / 2 / 18))
print(f"\nsquare 18 Hz: {nyq_harmonic - 1} harmonics kept, "
      f"energy at/above Nyquist = {spectrum[nyq_harmonic:].max():.2e}")

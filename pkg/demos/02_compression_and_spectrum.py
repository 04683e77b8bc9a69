"""Walk a signal through the two fingerprinted transformations.

The dynamics compressor reshapes loud material along a soft-knee curve;
the analyser turns the signal into the dB half-spectrum that the
FFT-family vectors digest.
"""

import numpy as np

from audiofp import (
    AnalyserConfig,
    CompressorParams,
    OscillatorSpec,
    analyse,
    compress,
    compress_curve,
    synth_wave,
)

# the static curve at the engine defaults (threshold -24 dB, knee 30, ratio 12)
print("input dB -> output dB")
for x in (-60.0, -39.0, -24.0, -9.0, 0.0):
    print(f"  {x:7.1f} -> {compress_curve(x):9.4f}")

FS = 44100.0
buf = synth_wave(OscillatorSpec("triangle", 10000.0), FS, 1.0)
squashed = compress(buf, CompressorParams())
print(f"\ntriangle 10 kHz peak: {np.abs(buf.samples).max():.3f} -> "
      f"{np.abs(squashed.samples).max():.3f} after compression")

frame = analyse(squashed, AnalyserConfig(), frame_offset=int(0.5 * FS))
peak_bin = int(np.argmax(frame.bins))
print(f"analyser frame: {len(frame.bins)} bins, floor {frame.floor_db} dB")
print(f"peak bin {peak_bin} (~{peak_bin * FS / 2048:.0f} Hz) at {frame.bins[peak_bin]:.2f} dB")
print(f"bins at floor: {(frame.bins == frame.floor_db).sum()}")

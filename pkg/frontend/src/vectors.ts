/**
 * The seven fingerprinting graphs, built against whatever Web Audio
 * implementation the environment provides.  Each vector renders one
 * second offline at 44.1 kHz; compressor-only output digests the full
 * buffer, FFT-based vectors digest the analyser's dB half-spectrum
 * captured at the warm-frame offset.
 */

import type {
  AnalyserLike,
  AudioEnvironment,
  AudioParamLike,
  OfflineContextLike,
  OscillatorLike,
} from "./audio.js";
import { digestValues } from "./digest.js";
import type { VectorName } from "./types.js";

export const SAMPLE_RATE = 44100;
export const DURATION_SECONDS = 1.0;
export const FFT_SIZE = 2048;
/** Which analyser frame gets hashed: 0.5 s into the render. */
export const FRAME_OFFSET_SECONDS = 0.5;

export const COMPRESSOR = {
  threshold: -24,
  knee: 30,
  ratio: 12,
  attack: 0.003,
  release: 0.25,
};

/** Custom-signal harmonics: 12 fixed reals in [0, 1), imaginary parts
 * alternating pi/2 and 0 (matches the engine's seeded coefficient set). */
export const CUSTOM_WAVE_REAL = [
  0.5118216247002567, 0.9504636963259353, 0.14415961271963373,
  0.9486494471372439, 0.31183145201048545, 0.42332644897257565,
  0.8277025938204418, 0.4091991363691613, 0.5495936876730595,
  0.027559113243068367, 0.7535131086748066, 0.5381433132192782,
];

function oscillator(
  ctx: OfflineContextLike,
  type: string,
  frequency: number,
): OscillatorLike {
  const osc = ctx.createOscillator();
  osc.type = type;
  osc.frequency.value = frequency;
  return osc;
}

function compressor(ctx: OfflineContextLike) {
  const comp = ctx.createDynamicsCompressor();
  comp.threshold.value = COMPRESSOR.threshold;
  comp.knee.value = COMPRESSOR.knee;
  comp.ratio.value = COMPRESSOR.ratio;
  comp.attack.value = COMPRESSOR.attack;
  comp.release.value = COMPRESSOR.release;
  return comp;
}

function customWaveOscillator(ctx: OfflineContextLike): OscillatorLike {
  const real = new Float32Array(CUSTOM_WAVE_REAL);
  const imag = new Float32Array(
    CUSTOM_WAVE_REAL.map((_, i) => (i % 2 === 0 ? Math.PI / 2 : 0)),
  );
  const osc = ctx.createOscillator();
  osc.setPeriodicWave(ctx.createPeriodicWave(real, imag));
  osc.frequency.value = 440;
  return osc;
}

interface BuiltGraph {
  /** Analyser to sample mid-render; absent for full-buffer vectors. */
  analyser?: AnalyserLike;
  /** Sources to start at t=0. */
  sources: OscillatorLike[];
}

function muteAndTerminate(ctx: OfflineContextLike, tail: { connect(t: unknown): unknown }) {
  const mute = ctx.createGain();
  mute.gain.value = 0; // silence the rendering path, keep the graph pulled
  tail.connect(mute);
  mute.connect(ctx.destination);
}

function buildGraph(ctx: OfflineContextLike, vector: VectorName): BuiltGraph {
  if (vector === "DC") {
    const osc = oscillator(ctx, "triangle", 10000);
    const comp = compressor(ctx);
    osc.connect(comp);
    comp.connect(ctx.destination);
    return { sources: [osc] };
  }

  const analyser = ctx.createAnalyser();
  analyser.fftSize = FFT_SIZE;
  analyser.smoothingTimeConstant = 0.8;

  if (vector === "FFT") {
    const osc = oscillator(ctx, "triangle", 10000);
    osc.connect(analyser);
    muteAndTerminate(ctx, analyser);
    return { analyser, sources: [osc] };
  }
  if (vector === "Hybrid") {
    const osc = oscillator(ctx, "triangle", 10000);
    const comp = compressor(ctx);
    osc.connect(comp);
    comp.connect(analyser);
    muteAndTerminate(ctx, analyser);
    return { analyser, sources: [osc] };
  }
  if (vector === "CustomSignal") {
    const osc = customWaveOscillator(ctx);
    const comp = compressor(ctx);
    osc.connect(comp);
    comp.connect(analyser);
    muteAndTerminate(ctx, analyser);
    return { analyser, sources: [osc] };
  }
  if (vector === "MergedSignals") {
    const sources = [
      oscillator(ctx, "sine", 440),
      oscillator(ctx, "triangle", 10000),
      oscillator(ctx, "square", 1880),
      oscillator(ctx, "sawtooth", 22000),
    ];
    const merger = ctx.createChannelMerger(sources.length);
    sources.forEach((src) => src.connect(merger));
    const comp = compressor(ctx);
    merger.connect(comp);
    comp.connect(analyser);
    muteAndTerminate(ctx, analyser);
    return { analyser, sources };
  }
  if (vector === "AM" || vector === "FM") {
    const modTriangle = oscillator(ctx, "triangle", 440);
    const modSquare = oscillator(ctx, "square", 18);
    const gainTriangle = ctx.createGain();
    gainTriangle.gain.value = 60;
    const gainSquare = ctx.createGain();
    gainSquare.gain.value = 30;
    modTriangle.connect(gainTriangle);
    modSquare.connect(gainSquare);
    const carrier = oscillator(ctx, "sine", 10000);
    const comp = compressor(ctx);
    if (vector === "AM") {
      const carrierGain = ctx.createGain();
      carrierGain.gain.value = 1;
      gainTriangle.connect(carrierGain.gain as AudioParamLike);
      gainSquare.connect(carrierGain.gain as AudioParamLike);
      carrier.connect(carrierGain);
      carrierGain.connect(comp);
    } else {
      gainTriangle.connect(carrier.frequency as AudioParamLike);
      gainSquare.connect(carrier.frequency as AudioParamLike);
      carrier.connect(comp);
    }
    comp.connect(analyser);
    muteAndTerminate(ctx, analyser);
    return { analyser, sources: [modTriangle, modSquare, carrier] };
  }
  throw new Error(`unknown vector ${vector}`);
}

/** Render one vector once and digest its canonical output. */
export async function runVector(
  env: AudioEnvironment,
  vector: VectorName,
): Promise<string> {
  const length = Math.round(SAMPLE_RATE * DURATION_SECONDS);
  const ctx = env.createOfflineContext(length, SAMPLE_RATE);
  const graph = buildGraph(ctx, vector);

  let frame: Float32Array | null = null;
  let suspendDone: Promise<void> = Promise.resolve();
  if (graph.analyser) {
    const analyser = graph.analyser;
    suspendDone = ctx.suspend(FRAME_OFFSET_SECONDS).then(() => {
      frame = new Float32Array(analyser.frequencyBinCount);
      analyser.getFloatFrequencyData(frame);
      return ctx.resume();
    });
  }
  graph.sources.forEach((src) => src.start(0));
  const rendered = await ctx.startRendering();
  await suspendDone;

  if (graph.analyser) {
    if (frame === null) {
      throw new Error(`analyser frame was never captured for ${vector}`);
    }
    return digestValues(frame);
  }
  return digestValues(rendered.getChannelData(0));
}

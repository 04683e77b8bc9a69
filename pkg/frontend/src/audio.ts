/**
 * Structural slices of the Web Audio interfaces the collector touches,
 * plus the browser-backed environment.  Keeping these structural lets
 * the whole render path run against a deterministic fake in tests.
 */

export interface AudioParamLike {
  value: number;
}

export interface AudioNodeLike {
  connect(target: AudioNodeLike | AudioParamLike): unknown;
}

export interface OscillatorLike extends AudioNodeLike {
  type: string;
  frequency: AudioParamLike;
  setPeriodicWave(wave: unknown): void;
  start(when?: number): void;
}

export interface GainLike extends AudioNodeLike {
  gain: AudioParamLike;
}

export interface CompressorLike extends AudioNodeLike {
  threshold: AudioParamLike;
  knee: AudioParamLike;
  ratio: AudioParamLike;
  attack: AudioParamLike;
  release: AudioParamLike;
}

export interface AnalyserLike extends AudioNodeLike {
  fftSize: number;
  readonly frequencyBinCount: number;
  smoothingTimeConstant: number;
  getFloatFrequencyData(out: Float32Array): void;
}

export interface RenderedBufferLike {
  readonly length: number;
  getChannelData(channel: number): Float32Array;
}

export interface OfflineContextLike {
  readonly sampleRate: number;
  readonly destination: AudioNodeLike;
  createOscillator(): OscillatorLike;
  createGain(): GainLike;
  createDynamicsCompressor(): CompressorLike;
  createAnalyser(): AnalyserLike;
  createChannelMerger(inputs: number): AudioNodeLike;
  createPeriodicWave(
    real: Float32Array,
    imag: Float32Array,
    constraints?: { disableNormalization?: boolean },
  ): unknown;
  /** Offline contexts can pause mid-render; used to grab the warm frame. */
  suspend(time: number): Promise<void>;
  resume(): Promise<void>;
  startRendering(): Promise<RenderedBufferLike>;
}

export interface AudioEnvironment {
  createOfflineContext(length: number, sampleRate: number): OfflineContextLike;
  audioConfig(): { sampleRate: number; maxChannelCount: number; baseLatency: number };
  userAgent(): string;
  canvasSource(): string;
  fontsSource(): string;
  now(): number;
}

const PROBE_FONTS = [
  "Arial", "Verdana", "Times New Roman", "Courier New", "Georgia", "Palatino",
  "Garamond", "Bookman", "Comic Sans MS", "Trebuchet MS", "Impact",
  "Lucida Console", "Tahoma", "Monaco", "Optima", "Candara", "Calibri",
  "Cambria", "Didot", "Futura", "Geneva", "Rockwell", "Segoe UI",
];

function detectFonts(): string {
  const canvas = document.createElement("canvas");
  const ctx = canvas.getContext("2d");
  if (!ctx) return "no-canvas-2d";
  const probe = "mmmmmmmmmmlli";
  const widths: Record<string, number> = {};
  for (const base of ["monospace", "sans-serif", "serif"]) {
    ctx.font = `72px ${base}`;
    widths[base] = ctx.measureText(probe).width;
  }
  const present = PROBE_FONTS.filter((font) =>
    ["monospace", "sans-serif", "serif"].some((base) => {
      ctx.font = `72px "${font}", ${base}`;
      return ctx.measureText(probe).width !== widths[base];
    }),
  );
  return present.join(",");
}

function drawCanvasSample(): string {
  const canvas = document.createElement("canvas");
  canvas.width = 280;
  canvas.height = 60;
  const ctx = canvas.getContext("2d");
  if (!ctx) return "no-canvas-2d";
  ctx.textBaseline = "alphabetic";
  ctx.fillStyle = "#f60";
  ctx.fillRect(125, 1, 62, 20);
  ctx.fillStyle = "#069";
  ctx.font = "11pt sans-serif";
  ctx.fillText("Cwm fjordbank glyphs vext quiz \u{1F600}", 2, 15);
  ctx.fillStyle = "rgba(102, 204, 0, 0.7)";
  ctx.font = "18pt Arial";
  ctx.fillText("Cwm fjordbank glyphs vext quiz", 4, 45);
  return canvas.toDataURL();
}

/** The real thing; only constructible in a browser. */
export function browserEnvironment(): AudioEnvironment {
  const w = window as unknown as Record<string, unknown>;
  const OfflineCtx = (w["OfflineAudioContext"] ??
    w["webkitOfflineAudioContext"]) as new (
    channels: number,
    length: number,
    sampleRate: number,
  ) => OfflineContextLike;
  const RealtimeCtx = (w["AudioContext"] ?? w["webkitAudioContext"]) as new () => {
    sampleRate: number;
    baseLatency?: number;
    destination: { maxChannelCount: number };
    close(): Promise<void>;
  };
  if (!OfflineCtx) {
    throw new Error("Web Audio API is not available");
  }
  return {
    createOfflineContext: (length, sampleRate) =>
      new OfflineCtx(1, length, sampleRate),
    audioConfig: () => {
      const ctx = new RealtimeCtx();
      const info = {
        sampleRate: ctx.sampleRate,
        maxChannelCount: ctx.destination.maxChannelCount,
        baseLatency: ctx.baseLatency ?? 0,
      };
      void ctx.close();
      return info;
    },
    userAgent: () => navigator.userAgent,
    canvasSource: drawCanvasSample,
    fontsSource: detectFonts,
    now: () => performance.now(),
  };
}

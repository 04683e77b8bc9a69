/**
 * Deterministic stand-in for the Web Audio environment.
 *
 * Used by the test suite and the fixture recorder: renders are a pure
 * function of the graph topology (node kinds, parameters, wiring), the
 * device seed, and an optional per-render variant cycle that imitates
 * the fickleness real browsers exhibit.  Never loaded by the page.
 */

import type {
  AnalyserLike,
  AudioEnvironment,
  AudioNodeLike,
  AudioParamLike,
  CompressorLike,
  GainLike,
  OfflineContextLike,
  OscillatorLike,
  RenderedBufferLike,
} from "./audio.js";

function hashString(text: string): number {
  let h = 2166136261 >>> 0; // FNV-1a
  for (let i = 0; i < text.length; i++) {
    h = Math.imul(h ^ text.charCodeAt(i), 16777619) >>> 0;
  }
  return h >>> 0;
}

function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface FakeDeviceOptions {
  seed?: string;
  /** Distinct outputs per vector; 1 renders identically every time. */
  variants?: number;
  /** Fraction of renders that land on a non-primary variant. */
  fickleness?: number;
  userAgent?: string;
}

class FakeParam implements AudioParamLike {
  constructor(
    private readonly owner: FakeNode,
    private readonly name: string,
    public value: number,
  ) {}

  describe(): string {
    return `${this.owner.id}.${this.name}`;
  }
}

class FakeNode implements AudioNodeLike {
  constructor(
    readonly ctx: FakeContext,
    readonly id: string,
    readonly kind: string,
  ) {}

  connect(target: AudioNodeLike | AudioParamLike): unknown {
    const to =
      target instanceof FakeParam
        ? target.describe()
        : (target as FakeNode).id ?? "ext";
    this.ctx.topology.push(`${this.id}->${to}`);
    return target;
  }

  param(name: string, value: number): FakeParam {
    return new FakeParam(this, name, value);
  }
}

class FakeOscillator extends FakeNode implements OscillatorLike {
  type = "sine";
  frequency = this.param("frequency", 440);
  private wave = "";

  setPeriodicWave(wave: unknown): void {
    this.wave = String(wave);
  }

  start(): void {
    this.ctx.topology.push(
      `start:${this.id}:${this.type}:${this.frequency.value}:${this.wave}`,
    );
  }
}

class FakeAnalyser extends FakeNode implements AnalyserLike {
  fftSize = 2048;
  smoothingTimeConstant = 0.8;

  get frequencyBinCount(): number {
    return this.fftSize / 2;
  }

  getFloatFrequencyData(out: Float32Array): void {
    this.ctx.captured = true;
    const rand = this.ctx.renderRng("frame");
    for (let i = 0; i < out.length; i++) {
      out[i] = -100 + 70 * rand();
    }
  }
}

class FakeContext implements OfflineContextLike {
  topology: string[] = [];
  captured = false;
  private suspendResolve: (() => void) | null = null;
  private resumeResolve: (() => void) | null = null;

  constructor(
    readonly device: Required<FakeDeviceOptions>,
    readonly length: number,
    readonly sampleRate: number,
    private readonly renderIndex: number,
  ) {}

  readonly destination: AudioNodeLike = new FakeNode(this, "dest", "destination");
  private counter = 0;

  private next(kind: string): string {
    return `${kind}${this.counter++}`;
  }

  createOscillator(): OscillatorLike {
    return new FakeOscillator(this, this.next("osc"), "oscillator");
  }

  createGain(): GainLike {
    const node = new FakeNode(this, this.next("gain"), "gain") as FakeNode & {
      gain: FakeParam;
    };
    node.gain = node.param("gain", 1);
    return node;
  }

  createDynamicsCompressor(): CompressorLike {
    const node = new FakeNode(this, this.next("comp"), "compressor") as FakeNode &
      Record<"threshold" | "knee" | "ratio" | "attack" | "release", FakeParam>;
    node.threshold = node.param("threshold", -24);
    node.knee = node.param("knee", 30);
    node.ratio = node.param("ratio", 12);
    node.attack = node.param("attack", 0.003);
    node.release = node.param("release", 0.25);
    return node;
  }

  createAnalyser(): AnalyserLike {
    return new FakeAnalyser(this, this.next("an"), "analyser");
  }

  createChannelMerger(): AudioNodeLike {
    return new FakeNode(this, this.next("merge"), "merger");
  }

  createPeriodicWave(real: Float32Array, imag: Float32Array): unknown {
    return `wave(${Array.from(real, (v) => v.toFixed(6)).join(",")};${Array.from(
      imag,
      (v) => v.toFixed(6),
    ).join(",")})`;
  }

  /** Seeded per device, topology and variant; tag separates frame/buffer.
   * Only analyser frames are fickle, matching the field observation that
   * full-buffer compressor output is stable across iterations. */
  renderRng(tag: string): () => number {
    const variant = tag === "frame" ? this.chooseVariant() : 0;
    const key = [
      this.device.seed,
      this.topology.join("|"),
      `v${variant}`,
      tag,
    ].join("#");
    return mulberry32(hashString(key));
  }

  private chooseVariant(): number {
    if (this.device.variants <= 1 || this.device.fickleness <= 0) {
      return 0;
    }
    const roll = mulberry32(
      hashString(`${this.device.seed}#pick#${this.renderIndex}`),
    );
    if (roll() >= this.device.fickleness) {
      return 0;
    }
    return Math.floor(roll() * this.device.variants);
  }

  suspend(): Promise<void> {
    return new Promise((resolve) => {
      this.suspendResolve = resolve;
    });
  }

  resume(): Promise<void> {
    this.resumeResolve?.();
    return Promise.resolve();
  }

  startRendering(): Promise<RenderedBufferLike> {
    const finish = (): RenderedBufferLike => {
      const rand = this.renderRng("buffer");
      const data = new Float32Array(this.length);
      for (let i = 0; i < data.length; i++) {
        data[i] = 2 * rand() - 1;
      }
      return { length: data.length, getChannelData: () => data };
    };
    if (this.suspendResolve) {
      const resumed = new Promise<void>((resolve) => {
        this.resumeResolve = resolve;
      });
      this.suspendResolve();
      return resumed.then(finish);
    }
    return Promise.resolve(finish());
  }
}

export class FakeAudioEnvironment implements AudioEnvironment {
  readonly device: Required<FakeDeviceOptions>;
  renders = 0;
  private clock = 0;

  constructor(options: FakeDeviceOptions = {}) {
    this.device = {
      seed: options.seed ?? "fake-device",
      variants: options.variants ?? 1,
      fickleness: options.fickleness ?? 0,
      userAgent:
        options.userAgent ??
        "Mozilla/5.0 (X11; Linux x86_64) AppleWebKit/537.36 (KHTML, like Gecko) " +
          "Chrome/91.0.4472.0 Safari/537.36",
    };
  }

  createOfflineContext(length: number, sampleRate: number): OfflineContextLike {
    return new FakeContext(this.device, length, sampleRate, this.renders++);
  }

  audioConfig() {
    return { sampleRate: 44100, maxChannelCount: 2, baseLatency: 0.01 };
  }

  userAgent(): string {
    return this.device.userAgent;
  }

  canvasSource(): string {
    return `canvas-bitmap:${this.device.seed}`;
  }

  fontsSource(): string {
    return `Arial,Verdana,Tahoma:${this.device.seed}`;
  }

  now(): number {
    return this.clock++;
  }
}

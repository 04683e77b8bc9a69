/**
 * Capture protocol: after explicit consent, run every vector for k
 * iterations in the fixed vector order, digesting and timing each run.
 * Vectors are executed sequentially (audio contexts serialize badly);
 * a vector that starts failing is left short and the server-side
 * completeness filter prunes the record.
 */

import type { AudioEnvironment } from "./audio.js";
import { md5Text } from "./md5.js";
import {
  DEFAULT_ITERATIONS,
  type IterationEntry,
  type VectorName,
  VECTOR_ORDER,
  type WireRecord,
} from "./types.js";
import { runVector } from "./vectors.js";

export class ConsentRequiredError extends Error {
  constructor() {
    super("capture requires an acknowledged disclosure");
  }
}

export interface CollectOptions {
  iterations?: number;
  /** Must be true; set by the disclosure UI. No consent, no capture. */
  consentGiven: boolean;
  onProgress?: (vector: VectorName, iteration: number) => void;
}

export async function collect(
  env: AudioEnvironment,
  options: CollectOptions,
): Promise<WireRecord> {
  if (!options.consentGiven) {
    throw new ConsentRequiredError();
  }
  const iterations = options.iterations ?? DEFAULT_ITERATIONS;
  if (iterations < 1) {
    throw new Error("iterations must be >= 1");
  }

  const perVector = {} as Record<VectorName, IterationEntry[]>;
  for (const vector of VECTOR_ORDER) {
    const entries: IterationEntry[] = [];
    perVector[vector] = entries;
    for (let i = 0; i < iterations; i++) {
      options.onProgress?.(vector, i);
      const started = env.now();
      try {
        const digest = await runVector(env, vector);
        entries.push({ digest, elapsedMs: env.now() - started });
      } catch {
        break; // leave this vector short; the server prunes incompletes
      }
    }
  }

  return {
    ua: env.userAgent(),
    audioConfig: env.audioConfig(),
    perVector,
    canvas: md5Text(env.canvasSource()),
    fonts: md5Text(env.fontsSource()),
    country: null, // server-side concern; never inferred client-side
    timestamp: Date.now() / 1000,
  };
}

export function totalDigests(record: WireRecord): number {
  return VECTOR_ORDER.reduce((sum, v) => sum + record.perVector[v].length, 0);
}

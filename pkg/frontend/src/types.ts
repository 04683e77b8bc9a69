export type VectorName =
  | "DC"
  | "FFT"
  | "Hybrid"
  | "CustomSignal"
  | "MergedSignals"
  | "AM"
  | "FM";

/** Fixed execution and reporting order. */
export const VECTOR_ORDER: readonly VectorName[] = [
  "DC",
  "FFT",
  "Hybrid",
  "CustomSignal",
  "MergedSignals",
  "AM",
  "FM",
];

export interface IterationEntry {
  digest: string;
  elapsedMs: number;
}

export interface AudioConfigInfo {
  sampleRate: number;
  maxChannelCount: number;
  baseLatency: number;
}

/** One submission in the ingest endpoint's wire format.  `userId` and
 * `ipDigest` are assigned server-side; the client never sees a raw IP. */
export interface WireRecord {
  ua: string;
  audioConfig: AudioConfigInfo;
  perVector: Record<VectorName, IterationEntry[]>;
  canvas: string;
  fonts: string;
  country: string | null;
  timestamp: number;
}

export interface ProbeConfig {
  endpointUrl: string;
  /** Iterations per vector; the study protocol default is 30. */
  iterations?: number;
  /** Shown to the user; capture must not start until acknowledged. */
  disclosure?: string;
  maxRetries?: number;
}

export const DEFAULT_ITERATIONS = 30;

export const DEFAULT_DISCLOSURE =
  "This page measures how your browser's audio stack processes generated " +
  "sound (no microphone access, nothing audible) and derives audio " +
  "fingerprints from it, alongside your user-agent string and canvas/font " +
  "characteristics. The data is uploaded for aggregate analysis. " +
  "Do you agree to participate?";

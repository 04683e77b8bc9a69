/**
 * Upload a capture to the ingest endpoint.
 *
 * Transient failures (network errors, 5xx) retry with exponential
 * backoff, at most three attempts in total; a 4xx is a permanent
 * rejection surfaced to the caller without any retry.
 */

import type { ProbeConfig, WireRecord } from "./types.js";

export interface SubmitSuccess {
  ok: true;
  userId: string;
  duplicate: boolean;
}

export interface SubmitFailure {
  ok: false;
  /** Human-readable reason, including the server's field path on 400s. */
  error: string;
  attempts: number;
}

export type SubmitResult = SubmitSuccess | SubmitFailure;

export interface FetchResponseLike {
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init: { method: string; headers: Record<string, string>; body: string },
) => Promise<FetchResponseLike>;

export type SleepFn = (ms: number) => Promise<void>;

const realSleep: SleepFn = (ms) => new Promise((res) => setTimeout(res, ms));

export const MAX_ATTEMPTS = 3;
export const BACKOFF_BASE_MS = 1000;

export async function submit(
  record: WireRecord,
  config: ProbeConfig,
  fetchImpl: FetchLike = fetch as unknown as FetchLike,
  sleep: SleepFn = realSleep,
): Promise<SubmitResult> {
  const url = config.endpointUrl.replace(/\/$/, "") + "/v1/records";
  const maxAttempts = config.maxRetries ?? MAX_ATTEMPTS;
  let lastError = "";
  for (let attempt = 1; attempt <= maxAttempts; attempt++) {
    try {
      const response = await fetchImpl(url, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(record),
      });
      if (response.status === 200 || response.status === 201) {
        const body = (await response.json()) as {
          userId: string;
          duplicate: boolean;
        };
        return { ok: true, userId: body.userId, duplicate: body.duplicate };
      }
      if (response.status >= 400 && response.status < 500) {
        const body = (await response.json().catch(() => ({}))) as {
          error?: string;
          path?: string;
        };
        const detail = body.path ? `${body.error} at ${body.path}` : body.error;
        return {
          ok: false,
          error: `rejected (${response.status}): ${detail ?? "invalid record"}`,
          attempts: attempt,
        };
      }
      lastError = `server error (${response.status})`;
    } catch (err) {
      lastError = `network failure: ${String(err)}`;
    }
    if (attempt < maxAttempts) {
      await sleep(BACKOFF_BASE_MS * 2 ** (attempt - 1));
    }
  }
  return { ok: false, error: lastError, attempts: maxAttempts };
}

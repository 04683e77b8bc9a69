import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { VECTOR_ORDER, type WireRecord } from "../src/types.js";

const FIXTURE = join(__dirname, "..", "fixtures", "probe-submission.json");

describe("recorded probe submission", () => {
  const record = JSON.parse(readFileSync(FIXTURE, "utf-8")) as WireRecord;

  it("carries exactly 210 digests (30 iterations, 7 vectors)", () => {
    const total = VECTOR_ORDER.reduce(
      (sum, v) => sum + record.perVector[v].length,
      0,
    );
    expect(total).toBe(210);
    for (const vector of VECTOR_ORDER) {
      expect(record.perVector[vector]).toHaveLength(30);
    }
  });

  it("is schema-shaped for the ingest endpoint", () => {
    expect(Object.keys(record.perVector).sort()).toEqual(
      [...VECTOR_ORDER].sort(),
    );
    for (const vector of VECTOR_ORDER) {
      for (const entry of record.perVector[vector]) {
        expect(entry.digest).toMatch(/^[0-9a-f]{32}$/);
        expect(entry.elapsedMs).toBeGreaterThanOrEqual(0);
      }
    }
    expect(typeof record.ua).toBe("string");
    expect(record.audioConfig.sampleRate).toBeGreaterThan(0);
    expect(record.audioConfig.maxChannelCount).toBeGreaterThanOrEqual(0);
    expect(record.audioConfig.baseLatency).toBeGreaterThanOrEqual(0);
    expect(typeof record.canvas).toBe("string");
    expect(typeof record.fonts).toBe("string");
    expect(typeof record.timestamp).toBe("number");
  });

  it("contains no client-side network identity", () => {
    expect("ipDigest" in record).toBe(false);
    expect("userId" in record).toBe(false);
  });

  it("shows the expected stability split", () => {
    const dc = new Set(record.perVector.DC.map((e) => e.digest));
    expect(dc.size).toBe(1); // full-buffer vector is stable
    const fickle = VECTOR_ORDER.filter(
      (v) => new Set(record.perVector[v].map((e) => e.digest)).size > 1,
    );
    expect(fickle.length).toBeGreaterThan(0); // FFT family shows variation
  });
});

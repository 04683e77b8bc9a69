import { describe, expect, it } from "vitest";

import { collect, ConsentRequiredError, totalDigests } from "../src/collect.js";
import { FakeAudioEnvironment } from "../src/fakeAudio.js";
import { VECTOR_ORDER } from "../src/types.js";
import { runVector } from "../src/vectors.js";

const HEX32 = /^[0-9a-f]{32}$/;

describe("collect", () => {
  it("refuses to run without consent", async () => {
    const env = new FakeAudioEnvironment();
    await expect(collect(env, { consentGiven: false })).rejects.toBeInstanceOf(
      ConsentRequiredError,
    );
    expect(env.renders).toBe(0); // nothing was captured at all
  });

  it("captures 210 digests for the default 30 iterations", async () => {
    const env = new FakeAudioEnvironment();
    const record = await collect(env, { consentGiven: true });
    expect(totalDigests(record)).toBe(210);
    for (const vector of VECTOR_ORDER) {
      expect(record.perVector[vector]).toHaveLength(30);
      for (const entry of record.perVector[vector]) {
        expect(entry.digest).toMatch(HEX32);
        expect(entry.elapsedMs).toBeGreaterThanOrEqual(0);
      }
    }
  });

  it("walks vectors in the fixed order", async () => {
    const env = new FakeAudioEnvironment();
    const seen: string[] = [];
    await collect(env, {
      consentGiven: true,
      iterations: 1,
      onProgress: (vector) => seen.push(vector),
    });
    expect(seen).toEqual([...VECTOR_ORDER]);
  });

  it("is stable for a non-fickle device", async () => {
    const env = new FakeAudioEnvironment({ seed: "calm" });
    const record = await collect(env, { consentGiven: true, iterations: 10 });
    for (const vector of VECTOR_ORDER) {
      const digests = new Set(record.perVector[vector].map((e) => e.digest));
      expect(digests.size).toBe(1);
    }
  });

  it("keeps the compressor-only vector stable on a fickle device", async () => {
    const env = new FakeAudioEnvironment({
      seed: "jumpy",
      variants: 6,
      fickleness: 0.8,
    });
    const record = await collect(env, { consentGiven: true, iterations: 20 });
    const dc = new Set(record.perVector.DC.map((e) => e.digest));
    expect(dc.size).toBe(1);
    const am = new Set(record.perVector.AM.map((e) => e.digest));
    expect(am.size).toBeGreaterThan(1);
    expect(am.size).toBeLessThanOrEqual(6);
  });

  it("gives different vectors different digests", async () => {
    const env = new FakeAudioEnvironment();
    const record = await collect(env, { consentGiven: true, iterations: 1 });
    const digests = VECTOR_ORDER.map((v) => record.perVector[v][0].digest);
    expect(new Set(digests).size).toBe(digests.length);
  });

  it("assembles the wire fields without any client-side address", async () => {
    const env = new FakeAudioEnvironment();
    const record = await collect(env, { consentGiven: true, iterations: 1 });
    expect(record.ua).toContain("Mozilla/5.0");
    expect(record.audioConfig).toEqual({
      sampleRate: 44100,
      maxChannelCount: 2,
      baseLatency: 0.01,
    });
    expect(record.canvas).toMatch(HEX32);
    expect(record.fonts).toMatch(HEX32);
    expect(record.country).toBeNull();
    expect(record.timestamp).toBeGreaterThan(0);
    expect("ipDigest" in record).toBe(false);
    expect("userId" in record).toBe(false);
  });

  it("leaves a failing vector short for server-side pruning", async () => {
    const env = new FakeAudioEnvironment();
    let calls = 0;
    const flaky = new Proxy(env, {
      get(target, prop, receiver) {
        if (prop === "createOfflineContext") {
          return (length: number, rate: number) => {
            calls += 1;
            if (calls > 3) {
              throw new Error("audio stack went away");
            }
            return target.createOfflineContext(length, rate);
          };
        }
        return Reflect.get(target, prop, receiver);
      },
    });
    const record = await collect(flaky, { consentGiven: true, iterations: 2 });
    expect(record.perVector.DC).toHaveLength(2);
    expect(record.perVector.FFT).toHaveLength(1); // failed mid-vector
    expect(record.perVector.Hybrid).toHaveLength(0);
    expect(totalDigests(record)).toBe(3);
  });
});

describe("runVector", () => {
  it("renders deterministically per vector", async () => {
    const env = new FakeAudioEnvironment({ seed: "pin" });
    const a = await runVector(env, "Hybrid");
    const env2 = new FakeAudioEnvironment({ seed: "pin" });
    const b = await runVector(env2, "Hybrid");
    expect(a).toBe(b);
  });

  it("differs across device seeds", async () => {
    const a = await runVector(new FakeAudioEnvironment({ seed: "one" }), "FM");
    const b = await runVector(new FakeAudioEnvironment({ seed: "two" }), "FM");
    expect(a).not.toBe(b);
  });
});

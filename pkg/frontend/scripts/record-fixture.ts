/**
 * Record a reference probe submission against the deterministic fake
 * device and write it to fixtures/probe-submission.json.  The engine's
 * ingest contract test replays this file against a live endpoint.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { collect, totalDigests } from "../src/collect.js";
import { FakeAudioEnvironment } from "../src/fakeAudio.js";

const here = dirname(fileURLToPath(import.meta.url));

async function main(): Promise<void> {
  const env = new FakeAudioEnvironment({
    seed: "fixture-device-01",
    variants: 5,
    fickleness: 0.25,
  });
  const record = await collect(env, { consentGiven: true, iterations: 30 });
  record.timestamp = 1620000000.0; // pin for a stable checked-in fixture
  const out = join(here, "..", "..", "fixtures", "probe-submission.json");
  mkdirSync(dirname(out), { recursive: true });
  writeFileSync(out, JSON.stringify(record, null, 2) + "\n");
  console.log(`wrote ${out}: ${totalDigests(record)} digests`);
}

main().catch((err) => {
  console.error(err);
  process.exit(1);
});

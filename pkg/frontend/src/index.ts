/**
 * Minimal page wiring: disclosure gate, capture, upload, status line.
 *
 * Expects three elements: #disclosure (text container), #consent
 * (button) and #status.  Nothing runs, and no network traffic happens,
 * until the consent button is pressed.
 */

import { browserEnvironment } from "./audio.js";
import { collect, totalDigests } from "./collect.js";
import { submit } from "./submit.js";
import { DEFAULT_DISCLOSURE, DEFAULT_ITERATIONS, type ProbeConfig } from "./types.js";

export { browserEnvironment } from "./audio.js";
export { collect, totalDigests, ConsentRequiredError } from "./collect.js";
export { digestValues } from "./digest.js";
export { md5Bytes, md5Text } from "./md5.js";
export { submit } from "./submit.js";
export * from "./types.js";
export { runVector, FRAME_OFFSET_SECONDS } from "./vectors.js";

export function mountProbe(config: ProbeConfig): void {
  const disclosure = document.querySelector("#disclosure");
  const button = document.querySelector<HTMLButtonElement>("#consent");
  const status = document.querySelector("#status");
  if (!disclosure || !button || !status) {
    throw new Error("probe page needs #disclosure, #consent and #status");
  }
  disclosure.textContent = config.disclosure ?? DEFAULT_DISCLOSURE;

  button.addEventListener("click", async () => {
    button.disabled = true;
    const env = browserEnvironment();
    const iterations = config.iterations ?? DEFAULT_ITERATIONS;
    try {
      const record = await collect(env, {
        consentGiven: true,
        iterations,
        onProgress: (vector, i) => {
          status.textContent = `measuring ${vector} (${i + 1}/${iterations})`;
        },
      });
      status.textContent = `uploading ${totalDigests(record)} fingerprints...`;
      const result = await submit(record, config);
      status.textContent = result.ok
        ? `done; participant ${result.userId}${result.duplicate ? " (repeat visit)" : ""}`
        : `upload failed: ${result.error}`;
    } catch (err) {
      status.textContent = `capture failed: ${String(err)}`;
    }
  });
}

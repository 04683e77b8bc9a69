/**
 * The engine's digest convention: MD5 over the little-endian float32
 * encodings of the values, concatenated in order.  Analyser frames and
 * rendered buffers both go through here.
 */

import { md5Bytes } from "./md5.js";

export function digestValues(values: ArrayLike<number>): string {
  const bytes = new Uint8Array(values.length * 4);
  const view = new DataView(bytes.buffer);
  for (let i = 0; i < values.length; i++) {
    view.setFloat32(i * 4, Math.fround(values[i]), true);
  }
  return md5Bytes(bytes);
}

import { describe, expect, it } from "vitest";

import { md5Bytes, md5Text } from "../src/md5.js";

// RFC 1321 appendix A.5 reference values
const RFC_VECTORS: Array<[string, string]> = [
  ["", "d41d8cd98f00b204e9800998ecf8427e"],
  ["a", "0cc175b9c0f1b6a831c399e269772661"],
  ["abc", "900150983cd24fb0d6963f7d28e17f72"],
  ["message digest", "f96b697d7cb7938d525a2f31aaf161d0"],
  ["abcdefghijklmnopqrstuvwxyz", "c3fcd3d76192e4007dfb496cca67e13b"],
  [
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789",
    "d174ab98d277d9f5a5611c2c9f419d9f",
  ],
  [
    "12345678901234567890123456789012345678901234567890123456789012345678901234567890",
    "57edf4a22be3c955ac49da2e2107b67a",
  ],
];

describe("md5", () => {
  it("matches the RFC 1321 test suite", () => {
    for (const [input, expected] of RFC_VECTORS) {
      expect(md5Text(input)).toBe(expected);
    }
  });

  it("hashes multi-block inputs", () => {
    const big = new Uint8Array(1000).fill(0x61);
    expect(md5Bytes(big)).toBe(md5Text("a".repeat(1000)));
  });

  it("emits 32 lowercase hex chars", () => {
    expect(md5Text("anything")).toMatch(/^[0-9a-f]{32}$/);
  });
});

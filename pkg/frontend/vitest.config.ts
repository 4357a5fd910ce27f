import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // the rank determinism test runs a full native train twice
    testTimeout: 300_000,
    hookTimeout: 120_000,
  },
});

import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    environment: "node",
    testTimeout: 30_000,
    // the integration setup generates a corpus and trains a model
    hookTimeout: 300_000,
  },
});

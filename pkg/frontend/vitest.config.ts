import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    globalSetup: "./tests/globalSetup.ts",
    testTimeout: 30_000,
    hookTimeout: 90_000,
    // tests share one served demo store; keep mutation order deterministic
    fileParallelism: false,
  },
});

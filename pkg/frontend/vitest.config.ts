import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    include: ["tests/**/*.test.ts"],
    // the end-to-end suite spawns a real backend server
    testTimeout: 120_000,
    hookTimeout: 120_000,
    fileParallelism: false,
  },
});

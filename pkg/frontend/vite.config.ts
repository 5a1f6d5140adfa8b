/// <reference types="vitest" />
import { defineConfig } from "vite";

export default defineConfig({
  base: "./",
  build: {
    outDir: "dist",
  },
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
  },
});

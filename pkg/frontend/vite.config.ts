import { defineConfig } from "vite";

// base "./" keeps asset URLs relative so the bundle works mounted at /ui
// by the API process or from any static host.
export default defineConfig({
  base: "./",
  build: { outDir: "dist" },
  server: {
    proxy: { "/api": "http://127.0.0.1:8000" },
  },
});

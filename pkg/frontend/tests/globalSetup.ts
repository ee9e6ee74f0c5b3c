// Seeds a demo store and serves it with the real backend for the duration of
// the test run.

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { API_BASE } from "./config.js";

let server: ChildProcess | undefined;

async function waitForReady(url: string, attempts = 100): Promise<void> {
  for (let i = 0; i < attempts; i += 1) {
    try {
      const response = await fetch(url);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error(`backend did not come up at ${url}`);
}

export async function setup(): Promise<void> {
  const storePath = join(mkdtempSync(join(tmpdir(), "metarepo-ui-")), "store.ndjson");
  execFileSync("python3", ["-m", "metarepo", "seed-demo", storePath]);
  const bind = API_BASE.replace("http://", "");
  server = spawn(
    "python3", ["-m", "metarepo", "serve", storePath, "--bind", bind],
    { stdio: "ignore" }
  );
  await waitForReady(`${API_BASE}/nav/methods`);
}

export async function teardown(): Promise<void> {
  server?.kill();
}

/** Builds a demo store with the backend CLI and serves it for the UI tests. */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import type { TestProject } from "vitest/node";

declare module "vitest" {
  export interface ProvidedContext {
    baseUrl: string;
    storePath: string;
  }
}

function run(args: string[]): void {
  const result = spawnSync("genius", args, { encoding: "utf-8" });
  if (result.status !== 0) {
    throw new Error(
      `genius ${args.join(" ")} failed (${result.status}):\n${result.stderr}`,
    );
  }
}

export async function waitForOk(baseUrl: string, timeoutMs = 60_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${baseUrl}/api/status`);
      if (response.ok) {
        const body = (await response.json()) as { state: string };
        if (body.state === "ok") return;
      }
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error(`service at ${baseUrl} did not become ready`);
}

let server: ChildProcess | undefined;
let workDir: string | undefined;

export default async function setup(project: TestProject): Promise<() => void> {
  workDir = mkdtempSync(join(tmpdir(), "genius-ui-"));
  const corpus = join(workDir, "corpus");
  const scenarios = join(workDir, "scenarios");
  const storePath = join(workDir, "store.jsonl");

  run(["demo", "--out", corpus]);
  run(["ingest", "--manifest", join(corpus, "logs", "*.manifest.json"),
       "--window", "30", "--out", scenarios]);
  run(["index", "--scenarios", scenarios, "--rules", join(corpus, "rules.json"),
       "--store", storePath]);

  const port = 8900 + (process.pid % 500);
  const baseUrl = `http://127.0.0.1:${port}`;
  server = spawn(
    "genius",
    ["serve", "--store", storePath, "--host", "127.0.0.1", "--port", String(port)],
    { stdio: "ignore" },
  );
  await waitForOk(baseUrl);

  project.provide("baseUrl", baseUrl);
  project.provide("storePath", storePath);

  return () => {
    server?.kill("SIGKILL");
    if (workDir) rmSync(workDir, { recursive: true, force: true });
  };
}

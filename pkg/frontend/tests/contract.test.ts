/**
 * Contract tests against a live daemon replaying the three-node walkthrough:
 * the instances page must equal the wire payload, and a migrate dispatched
 * from the console must produce exactly one job whose log matches what the
 * command-line client observes for the same scenario.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { createServer } from "node:net";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ConsoleApi } from "../src/api.js";
import { dispatchAction } from "../src/actions.js";
import { instanceListRows } from "../src/views.js";
import type { LogLine } from "../src/types.js";

const repoRoot = join(dirname(fileURLToPath(import.meta.url)), "..", "..");
const TS_PREFIX = /^[A-Z][a-z]{2} [A-Z][a-z]{2} \d{2} \d{2}:\d{2}:\d{2} \d{4} /;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port"));
        return;
      }
      srv.close(() => resolve(address.port));
    });
  });
}

async function startDaemon(stateDir: string): Promise<{ proc: ChildProcess; api: ConsoleApi }> {
  const port = await freePort();
  const addr = `127.0.0.1:${port}`;
  const proc = spawn(
    "python3",
    ["scripts/run_daemon.py", "--walkthrough", "--addr", addr, "--state-dir", stateDir],
    { cwd: repoRoot, stdio: ["ignore", "ignore", "pipe"] },
  );
  const api = new ConsoleApi(`http://${addr}`);
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const info = await api.info();
      if (info.initialized) return { proc, api };
    } catch {
      await new Promise((r) => setTimeout(r, 100));
    }
  }
  proc.kill();
  throw new Error("daemon did not come up");
}

function cliMigrate(addr: string): string[] {
  const run = spawnSync(
    "python3",
    [
      "-c",
      "import sys; from gantry.cli import main_instance; sys.exit(main_instance(sys.argv[1:]))",
      "migrate",
      "--yes",
      "testvm.project.edu",
    ],
    { cwd: repoRoot, env: { ...process.env, GANTRY_ADDR: addr, PYTHONPATH: join(repoRoot, "src") } },
  );
  if (run.status !== 0) {
    throw new Error(`CLI migrate failed: ${run.stderr.toString()}`);
  }
  return run.stdout
    .toString()
    .trimEnd()
    .split("\n")
    .map((line) => line.replace(TS_PREFIX, ""));
}

describe("console contract against a live daemon", () => {
  let ui: { proc: ChildProcess; api: ConsoleApi };
  let cliDaemon: { proc: ChildProcess; api: ConsoleApi };

  beforeAll(async () => {
    ui = await startDaemon("/tmp/gantry-console-ui-state");
    cliDaemon = await startDaemon("/tmp/gantry-console-cli-state");
  }, 30000);

  afterAll(() => {
    ui?.proc.kill();
    cliDaemon?.proc.kill();
  });

  it("instances page rows equal the wire payload", async () => {
    const page = await ui.api.instances();
    expect(instanceListRows(page.instances)).toEqual(page.rows);
    expect(page.rows).toContainEqual([
      "testvm.project.edu",
      "node2.project.edu",
      "node1.project.edu",
      "running",
    ]);
  });

  it("a console-dispatched migrate is exactly one job matching the CLI trace", async () => {
    const before = await ui.api.jobs();

    const result = await dispatchAction(
      ui.api,
      { kind: "migrate", instance: "testvm.project.edu" },
      () => true,
    );
    expect(result).not.toBeNull();
    expect(result!.jobIds).toHaveLength(1);

    const after = await ui.api.jobs();
    const newJobs = after.filter((j) => !before.some((b) => b.id === j.id));
    expect(newJobs).toHaveLength(1);
    expect(newJobs[0]!.id).toBe(result!.jobIds[0]);

    const job = await ui.api.waitJob(result!.jobIds[0]!);
    expect(job.status).toBe("success");
    const prefix = { MESSAGE: "", STEP: "* ", INFO: "- INFO: ", WARNING: "- WARNING: " };
    const uiLines = (job.log ?? []).map((l: LogLine) => `${prefix[l.level]}${l.text}`);

    const cliLines = cliMigrate(`127.0.0.1:${(cliDaemon.api.baseUrl.split(":").pop())}`);
    expect(uiLines).toEqual(cliLines);
    expect(uiLines[uiLines.length - 1]).toBe("* done");
  }, 30000);
});

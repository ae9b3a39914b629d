import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { createHttpClient } from "../src/api.js";
import { SessionStore } from "../src/session.js";

/**
 * Scripted end-to-end session against a live service on a fixture corpus:
 * open a document, roll an entity up to a concept, run the query, drill
 * down twice, undo. Match counts must never increase on drill-down and undo
 * must restore the previous view byte-for-byte.
 */

const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;

let workdir: string;
let server: ChildProcess | null = null;

function runCli(args: string[]): void {
  const result = spawnSync("python3", ["-m", "kgexplore.cli", ...args], {
    encoding: "utf-8",
  });
  if (result.status !== 0) {
    throw new Error(`cli ${args[0]} failed: ${result.stderr || result.stdout}`);
  }
}

async function waitForHealth(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("service did not become healthy in time");
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "kgexplore-e2e-"));
  const data = join(workdir, "data");
  runCli(["gen-synth", "--out", data, "--seed", "23", "--docs", "50"]);
  const nodes = join(data, "nodes.tsv");
  const edges = join(data, "edges.tsv");
  const docs = join(data, "docs.jsonl");
  const index = join(workdir, "fixture.ncex");
  runCli([
    "build-index", "--graph", nodes, edges, "--docs", docs,
    "--out", index, "--seed", "5",
  ]);
  server = spawn(
    "python3",
    [
      "-m", "kgexplore.cli", "serve",
      "--graph", nodes, edges,
      "--docs", docs,
      "--index", index,
      "--port", String(PORT),
    ],
    { stdio: ["ignore", "inherit", "inherit"] },
  );
  await waitForHealth();
}, 120_000);

afterAll(() => {
  if (server) server.kill("SIGTERM");
  if (workdir) rmSync(workdir, { recursive: true, force: true });
});

describe("explorer session against the live service", () => {
  it("narrows on every drill-down and restores exactly on undo", async () => {
    const client = createHttpClient(BASE);
    const store = new SessionStore(client, 10);

    // open a document and inspect its entity chips
    await store.openDocument("d0000");
    const doc = store.state.document;
    expect(doc).not.toBeNull();
    expect(doc!.mentions.length).toBeGreaterThan(0);

    // roll up: pick the first concept from the first entity's menu
    const menu = doc!.mentions[0].concepts;
    expect(menu.length).toBeGreaterThan(0);
    store.addConcept(menu[0].concept);
    expect(store.canRun()).toBe(true);

    // run the concept-pattern query
    await store.runQuery();
    expect(store.state.banner).toBeNull();
    const firstResults = store.state.results!;
    expect(firstResults.match_count).toBeGreaterThan(0);
    expect(firstResults.results.length).toBeGreaterThan(0);
    // every result explains itself with matched entities per concept
    for (const result of firstResults.results) {
      for (const concept of firstResults.concepts) {
        expect(
          result.per_concept[concept].matched_entities.length,
        ).toBeGreaterThan(0);
      }
    }

    // drill down twice through suggested subtopics
    const counts = [firstResults.match_count];
    const snapshots = [JSON.stringify(store.state.results)];
    for (let round = 0; round < 2; round++) {
      const suggestions = store.state.suggestions!.suggestions;
      expect(suggestions.length).toBeGreaterThan(0);
      await store.drillDown(suggestions[0].concept);
      expect(store.state.banner).toBeNull();
      const results = store.state.results!;
      expect(results.match_count).toBeGreaterThan(0);
      expect(results.match_count).toBeLessThanOrEqual(counts[counts.length - 1]);
      counts.push(results.match_count);
      snapshots.push(JSON.stringify(store.state.results));
    }
    expect(store.state.historyDepth).toBe(3);

    // undo restores the previous view byte-for-byte (responses are pure)
    await store.undo();
    expect(JSON.stringify(store.state.results)).toBe(snapshots[1]);
    expect(store.state.results!.match_count).toBe(counts[1]);
    await store.undo();
    expect(JSON.stringify(store.state.results)).toBe(snapshots[0]);
    expect(store.state.query).toEqual([menu[0].concept]);
    expect(store.state.historyDepth).toBe(1);
  }, 60_000);

  it("keeps state unchanged when the service rejects a request", async () => {
    const client = createHttpClient(BASE);
    const store = new SessionStore(client, 10);
    await store.openDocument("no-such-doc");
    expect(store.state.banner).toContain("no-such-doc");
    expect(store.state.document).toBeNull();
  });
});

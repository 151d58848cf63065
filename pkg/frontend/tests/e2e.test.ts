/** End-to-end judging session against a live service.
 *
 * Spawns the Python service on a generated corpus, then drives the same
 * client modules the browser UI uses: open the assigned topic, judge
 * every pooled document, re-judge one, and export the qrels. The export
 * must match this package's independent log-replay byte for byte, no
 * payload may carry document provenance, and served documents must be
 * the cleaner's exact output.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { extractText } from "../src/highlight.js";
import { JudgingSession } from "../src/session.js";
import { assessorQrels, mergedQrels, parseEventLog } from "../src/replay.js";
import { topicListView } from "../src/views.js";

const FORBIDDEN_KEYS = ["provenance", "first_depth", "google", "noise", "pooled"];

const MAKE_CORPUS = `
import sys
from pooleval.synthetic import make_collection, materialize
collection = make_collection(
    topic_count=3,
    noise_topic_count=1,
    pooling_system_count=3,
    scored_system_count=2,
    docs_per_topic=40,
    highly_relevant=8,
    somewhat_relevant=6,
    distractors_per_topic=6,
    run_depth=40,
    k=10,
    k_google=3,
    k_noise=3,
    seed=9,
)
materialize(collection, sys.argv[1])
`;

let workdir = "";
let server: ChildProcess | null = null;
let serverOutput = "";
let baseUrl = "";
let api: ApiClient;
let assessorId = "";
let assignedTopics: string[] = [];

function forbiddenKeysIn(payload: unknown, path = "$"): string[] {
  if (Array.isArray(payload)) {
    return payload.flatMap((item, i) => forbiddenKeysIn(item, `${path}[${i}]`));
  }
  if (payload !== null && typeof payload === "object") {
    return Object.entries(payload as Record<string, unknown>).flatMap(
      ([key, value]) => {
        const hits = FORBIDDEN_KEYS.includes(key.toLowerCase())
          ? [`${path}.${key}`]
          : [];
        return hits.concat(forbiddenKeysIn(value, `${path}.${key}`));
      },
    );
  }
  return [];
}

function python(code: string, ...args: string[]): string {
  const result = spawnSync("python3", ["-c", code, ...args], {
    encoding: "utf-8",
  });
  if (result.status !== 0) {
    throw new Error(`python3 failed: ${result.stderr}`);
  }
  return result.stdout;
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "judge-ui-e2e-"));
  python(MAKE_CORPUS, workdir);

  const assignments = JSON.parse(
    readFileSync(join(workdir, "assignments.json"), "utf-8"),
  ) as { assessors: Array<{ assessor_id: string; token: string; topics: string[] }> };
  const first = assignments.assessors[0]!;
  assessorId = first.assessor_id;
  assignedTopics = first.topics;

  server = spawn(
    "python3",
    ["-m", "pooleval", "serve", "--config", join(workdir, "config.json"), "--port", "0"],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  baseUrl = await new Promise<string>((resolve, reject) => {
    const timer = setTimeout(
      () => reject(new Error(`no banner from service:\n${serverOutput}`)),
      30_000,
    );
    const scan = (chunk: Buffer) => {
      serverOutput += chunk.toString();
      const match = serverOutput.match(/serving on (http:\/\/[0-9.:]+)/);
      if (match) {
        clearTimeout(timer);
        resolve(match[1]!);
      }
    };
    server!.stdout!.on("data", scan);
    server!.stderr!.on("data", scan);
    server!.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`service exited early (${code}):\n${serverOutput}`));
    });
  });
  api = new ApiClient(baseUrl, first.token);
});

afterAll(() => {
  if (server && server.exitCode === null) {
    server.kill("SIGTERM");
  }
  if (workdir) {
    rmSync(workdir, { recursive: true, force: true });
  }
});

describe("judging end to end", () => {
  it("judges a pool, re-judges one doc, and exports matching qrels", async () => {
    const topicId = assignedTopics[0]!;
    const session = new JudgingSession(api);
    await session.openTopic(topicId);

    const queue = [...session.docQueue];
    expect(queue.length).toBeGreaterThanOrEqual(10);

    // The queue must be the stored presentation order for this topic.
    const poolLines = readFileSync(join(workdir, "pools.tsv"), "utf-8")
      .split("\n")
      .filter((line) => line.startsWith(`${topicId}\t`))
      .map((line) => line.split("\t")[1]!);
    expect(queue).toEqual(poolLines);

    // Judge every document in presentation order.
    const cycle = [2, 1, 0, -1];
    for (let i = 0; i < queue.length; i += 1) {
      const acknowledged = await session.judgeDoc(queue[i]!, cycle[i % 4]!);
      expect(acknowledged).toBe(true);
    }
    expect(session.progress()).toEqual({
      judged: queue.length,
      total: queue.length,
    });

    // Second thoughts about the first document.
    const revisited = queue[0]!;
    session.goTo(revisited);
    expect(session.gradeOf(revisited)).toBe(2);
    await session.gradeCurrent(0);
    expect(session.ackCount).toBe(queue.length + 1);

    // A fresh session sees the server's grades, re-judge included.
    const again = new JudgingSession(api);
    await again.openTopic(topicId);
    expect(again.gradeOf(revisited)).toBe(0);
    expect(again.progress()).toEqual({
      judged: queue.length,
      total: queue.length,
    });

    // The export equals an independent replay of the event log.
    const events = parseEventLog(
      readFileSync(join(workdir, "judgments.jsonl"), "utf-8"),
    );
    expect(events.length).toBe(queue.length + 1);
    expect(await api.exportQrels()).toBe(mergedQrels(events));
    expect(await api.exportQrels(assessorId)).toBe(
      assessorQrels(events, assessorId),
    );

    // The topic list (as the UI renders it) now shows the topic complete.
    const topics = await api.topics();
    const html = topicListView(topics);
    expect(html).toContain("complete");
    const row = topics.topics.find((t) => t.topic_id === topicId)!;
    expect(row.judged).toBe(queue.length);
    expect(row.total).toBe(queue.length);
  }, 60_000);

  it("serves no payload with provenance fields", async () => {
    const topicId = assignedTopics[0]!;
    const payloads: unknown[] = [
      await api.topics(),
      await api.pool(topicId),
      await api.judge(topicId, (await api.pool(topicId)).doc_ids[0]!, 1),
    ];
    for (const payload of payloads) {
      expect(forbiddenKeysIn(payload)).toEqual([]);
    }

    // The export is plain qrels lines, nothing more.
    const exported = await api.exportQrels();
    for (const line of exported.split("\n").filter((l) => l.length > 0)) {
      expect(line).toMatch(/^\d{4}-\d{3} 0 \S+ -?\d$/);
    }
  });

  it("serves documents exactly as the cleaner emits them", async () => {
    const topicId = assignedTopics[0]!;
    const pool = await api.pool(topicId);
    const manifest = new Map(
      readFileSync(join(workdir, "manifest.tsv"), "utf-8")
        .split("\n")
        .filter((line) => line.length > 0)
        .map((line) => {
          const [docId, relative] = line.split("\t");
          return [docId!, relative!] as const;
        }),
    );

    for (const docId of pool.doc_ids.slice(0, 5)) {
      const served = await api.docHtml(docId);
      expect(served).not.toMatch(/<\s*(script|style|object)\b/i);
      const direct = python(
        "import pathlib, sys\n" +
          "from pooleval.cleaning import clean_document\n" +
          "sys.stdout.write(clean_document(pathlib.Path(sys.argv[1]).read_bytes()))",
        join(workdir, "docs", manifest.get(docId)!),
      );
      expect(served).toBe(direct);
      expect(extractText(served)).toBe(extractText(direct));
    }
  }, 60_000);
});

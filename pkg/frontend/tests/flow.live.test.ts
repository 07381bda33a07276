/**
 * Scripted browser session against a live service instance.
 *
 * Walks the full annotator flow: pick from the links list, reject into the
 * noun-phrase list, reject again into unlocked manual input, and skip —
 * asserting along the way that manual input stays disabled while any list
 * is active and that a reload resets to the earliest stage.
 */

import { ChildProcess, spawn, spawnSync } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { TaskScreen } from "../src/task.js";

const PORT = 18000 + Math.floor(Math.random() * 20000);
const BASE = `http://127.0.0.1:${PORT}`;

function article(title: string, text: string): string {
  return `<page><title>${title}</title><revision><text>${text}</text></revision></page>`;
}

const DUMP =
  `<?xml version="1.0" encoding="UTF-8"?>\n<mediawiki>` +
  article(
    "Tiamat",
    "{{Infobox deity|home=[[Avernus]]}}\n" +
      "Tiamat was the [[lawful evil]] [[dragon]] goddess of greed and queen of [[evil dragons]].\n"
  ) +
  article(
    "Aarakocra",
    "Aarakocra were a race of bird people who lived on the [[Elemental Plane of Air]].\n"
  ) +
  article("Eilistraee", "Eilistraee was the [[drow]] goddess of song and moonlight.\n") +
  article("Faerûn", "Faerûn was a major [[continent]] of [[Toril]].\n") +
  `</mediawiki>\n`;

let server: ChildProcess;
let client: ApiClient;
let root: HTMLElement;
let screen: TaskScreen;

function sh(args: string[]): string {
  const result = spawnSync("shade", args, { encoding: "utf-8" });
  if (result.status !== 0) {
    throw new Error(`shade ${args.join(" ")} failed: ${result.stderr}${result.stdout}`);
  }
  return result.stdout;
}

async function ready(): Promise<void> {
  for (let attempt = 0; attempt < 60; attempt++) {
    try {
      const response = await fetch(`${BASE}/api/session`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ name: "alice" }),
      });
      if (response.ok) return;
    } catch {
      // server not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "shade-ui-"));
  const dump = join(dir, "dump.xml");
  const db = join(dir, "anno.db");
  writeFileSync(dump, DUMP, "utf-8");

  const summary = sh(["ingest", "--input", dump, "--db", db]);
  expect(summary.trim()).toBe("ingested=4 skipped_redirect=0 skipped_empty=0");
  const added = sh(["annotator", "add", "alice", "--db", db]);
  const token = /token=([0-9a-f]+)/.exec(added)?.[1];
  if (!token) throw new Error(`no token in: ${added}`);

  server = spawn("shade", ["serve", "--db", db, "--addr", `127.0.0.1:${PORT}`], {
    stdio: "ignore",
  });
  await ready();

  client = new ApiClient(BASE);
  await client.login("alice");
  root = document.createElement("div");
  document.body.replaceChildren(root);
  screen = new TaskScreen(root, client);
});

afterAll(() => {
  server?.kill();
});

function q<T extends Element>(selector: string): T {
  const node = root.querySelector<T>(selector);
  if (!node) throw new Error(`missing element: ${selector}`);
  return node;
}

async function untilEntity(name: string): Promise<void> {
  for (let i = 0; i < 40; i++) {
    if (root.querySelector(".entity-name")?.textContent === name) return;
    await new Promise((resolve) => setTimeout(resolve, 50));
  }
  throw new Error(`never reached entity ${name}`);
}

describe("live annotator flow", () => {
  it("task 1: picks a label straight from the links list", async () => {
    await screen.load();
    await untilEntity("Tiamat");
    expect(q(".stage-title").textContent).toContain("linked");
    expect(root.querySelectorAll("input[type=radio]").length).toBe(3);
    expect(q<HTMLInputElement>(".manual-input").disabled).toBe(true);
    expect(q("button.skip")).toBeTruthy();

    root.querySelectorAll<HTMLInputElement>("input[type=radio]")[1]!.click();
    q<HTMLButtonElement>("button.annotate").click();
    await untilEntity("Aarakocra");
  });

  it("task 2: rejects the links list and picks a noun phrase", async () => {
    expect(q(".entity-name").textContent).toBe("Aarakocra");
    q<HTMLButtonElement>("button.reject").click();
    await new Promise((resolve) => setTimeout(resolve, 300));
    expect(q(".stage-title").textContent).toContain("Noun phrases");
    expect(q<HTMLInputElement>(".manual-input").disabled).toBe(true);
    expect(q("button.skip")).toBeTruthy();

    // A reload must land back on the earliest non-empty stage.
    await screen.load();
    expect(q(".stage-title").textContent).toContain("linked");
    q<HTMLButtonElement>("button.reject").click();
    await new Promise((resolve) => setTimeout(resolve, 300));

    const labels = [...root.querySelectorAll(".label-text")].map((n) => n.textContent);
    const index = labels.indexOf("bird people");
    expect(index).toBeGreaterThanOrEqual(0);
    root.querySelectorAll<HTMLInputElement>("input[type=radio]")[index]!.click();
    q<HTMLButtonElement>("button.annotate").click();
    await untilEntity("Eilistraee");
  });

  it("task 3: rejecting both lists unlocks manual entry", async () => {
    expect(q(".entity-name").textContent).toBe("Eilistraee");
    q<HTMLButtonElement>("button.reject").click();
    await new Promise((resolve) => setTimeout(resolve, 300));
    expect(q<HTMLInputElement>(".manual-input").disabled).toBe(true);
    q<HTMLButtonElement>("button.reject").click();
    await new Promise((resolve) => setTimeout(resolve, 300));

    expect(root.querySelector(".label-list")).toBeNull();
    const manual = q<HTMLInputElement>(".manual-input");
    expect(manual.disabled).toBe(false);
    expect(q("button.skip")).toBeTruthy();

    manual.value = "drow goddess";
    manual.dispatchEvent(new Event("input"));
    q<HTMLButtonElement>("button.annotate").click();
    await untilEntity("Faerûn");
  });

  it("task 4: skip stays available and ends the queue", async () => {
    expect(q(".entity-name").textContent).toBe("Faerûn");
    q<HTMLButtonElement>("button.skip").click();
    for (let i = 0; i < 40 && root.querySelector(".all-done") === null; i++) {
      await new Promise((resolve) => setTimeout(resolve, 50));
    }
    expect(q(".all-done").textContent).toContain("All done");
  });

  it("the service recorded one annotation per source and one skip", async () => {
    const stats = await client.stats();
    expect(stats.breakdown).toEqual({ LINKS: 1, NOUN_PHRASES: 1, MANUAL: 1, total: 3 });
    expect(stats.skipped).toBe(1);
  });
});

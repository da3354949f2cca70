/** End to end: a real server, a real DOM, no shortcuts.
 *
 * Spawns `dutiful play --serve` on the hallway problem, then drives the
 * console exactly as a person would: clicking environment moves, offering
 * a doomed room-B pair, offering the file's room-C pair, exercising both
 * rights, and stepping to the stop.  The rendered summary must match the
 * play record the server holds.
 */

import { type ChildProcess, spawn } from "node:child_process";
import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { Window } from "happy-dom";
import { afterAll, beforeAll, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { boot, type Console } from "../src/main.js";

const PORT = 8700 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;
const SPEC_PATH = fileURLToPath(new URL("../../specs/hallway.spec", import.meta.url));

let server: ChildProcess;
let root: HTMLElement;
let ui: Console;

async function until(cond: () => boolean, what: string, ms = 10000): Promise<void> {
  const t0 = Date.now();
  while (!cond()) {
    if (Date.now() - t0 > ms) throw new Error(`timed out waiting for ${what}`);
    await new Promise((r) => setTimeout(r, 20));
  }
}

function text(selector: string): string {
  return root.querySelector(selector)?.textContent ?? "";
}

function click(selector: string): void {
  const b = root.querySelector(selector) as HTMLButtonElement | null;
  if (!b) throw new Error(`nothing to click at ${selector}`);
  b.click();
}

beforeAll(async () => {
  server = spawn("dutiful", ["play", SPEC_PATH, "--serve", `127.0.0.1:${PORT}`], {
    stdio: "ignore",
  });
  await until(() => server.pid !== undefined, "server to spawn", 2000);
  const t0 = Date.now();
  for (;;) {
    try {
      await fetch(`${BASE}/sessions/none`);
      break;
    } catch {
      if (Date.now() - t0 > 15000) throw new Error("server never came up");
      await new Promise((r) => setTimeout(r, 100));
    }
  }
  const dom = new Window();
  (globalThis as any).document = dom.document;
  dom.document.body.innerHTML = '<div id="app"></div>';
  root = dom.document.getElementById("app") as unknown as HTMLElement;
  ui = boot(root, new ApiClient(BASE));
}, 30000);

afterAll(() => {
  server?.kill();
});

it("plays the whole further walkthrough through the page", async () => {
  // create the session from the file text, like pasting it in
  const area = root.querySelector("#spec-text") as HTMLTextAreaElement;
  area.value = readFileSync(SPEC_PATH, "utf-8");
  click("#create");
  await until(() => text("#phase") === "running", "session creation");
  expect(text("#sizes")).toContain("product 55");
  const sessionId = text("#session-id");
  expect(sessionId).not.toBe("");

  // one environment move; the hallway environment is deterministic, so
  // there is exactly one button
  expect(root.querySelectorAll(".env-move")).toHaveLength(1);
  click(".env-move");
  await until(() => text("#round") === "round: 1", "round 1");

  // the room-B pair is impossible from here and must be rejected
  (root.querySelector("#fd") as HTMLInputElement).value = "F (!Dust_B & RobotOut_B)";
  (root.querySelector("#fr") as HTMLInputElement).value = "true";
  click("#inject");
  await until(() => root.querySelectorAll(".rejection").length === 1, "rejection");
  expect(text("#phase")).toBe("running");
  expect(ui.state.view!.rejections[0].round).toBe(1);

  // the file's own pair (room C plus collector) is accepted
  click("#inject-file-pair");
  await until(() => text("#mode") === "mode: further", "accepted injection");
  expect(text("#log")).toContain("further pair accepted");

  click(".env-move");
  await until(() => text("#round") === "round: 2", "round 2");

  click("#exercise-both");
  await until(
    () => text("#committed") === "committed: base yes, further yes",
    "both rights committed",
  );

  // step to the stop; the buttons disappear once the play closes
  for (let i = 0; i < 20 && !root.querySelector("#summary"); i++) {
    click(".env-move");
    await until(
      () => root.querySelector("#summary") !== null || ui.state.error === null,
      "move to settle",
    );
    await new Promise((r) => setTimeout(r, 10));
  }
  await until(() => text("#phase") === "stopped", "the stop");

  const verdict = (label: string) =>
    root.querySelector(`#summary [data-label="${label}"] .value`)!.textContent;
  expect(verdict("duty")).toBe("satisfied");
  expect(verdict("right")).toBe("satisfied");
  expect(verdict("further duty")).toBe("satisfied");
  expect(verdict("further right")).toBe("satisfied");

  // the page must agree with the record the server holds
  const server_view = await ui.api.view(sessionId);
  const rec = server_view.play_record!;
  expect(rec.duty_satisfied && rec.right_satisfied).toBe(true);
  expect(rec.further_duty_satisfied && rec.further_right_satisfied).toBe(true);
  expect(verdict("stopped after round")).toBe(String(rec.stop_round));
  expect(verdict("injected at round")).toBe(String(rec.inject_round));

  // every played row on the page matches the server's history
  const rows = [...root.querySelectorAll("#moves .move")];
  const played = rows.filter((r) => r.querySelector(".agent-cell")!.textContent !== "stop");
  expect(played).toHaveLength(rec.play.length);
  played.forEach((row, i) => {
    const cell = (cls: string) => {
      const got = row.querySelector(cls)!.textContent!;
      return got === "(none)" ? [] : got.split(", ");
    };
    const names = [...cell(".env-cell"), ...cell(".agent-cell")].sort();
    expect(names).toEqual(server_view.history[i]);
  });
}, 60000);

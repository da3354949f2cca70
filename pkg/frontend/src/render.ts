/** DOM rendering.  The whole console re-renders from state on every
 * change; at this size that is simpler than patching. */

import type { ConsoleState } from "./state.js";
import { summaryRows } from "./state.js";

export interface Callbacks {
  onCreate(spec: string): void;
  onEnvMove(letter: string[]): void;
  onExercise(which: "base" | "further" | "both"): void;
  onInject(fd: string, fr: string): void;
  onInjectFilePair(): void;
}

function el(
  tag: string,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElement {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  for (const c of children) {
    node.append(typeof c === "string" ? document.createTextNode(c) : c);
  }
  return node;
}

function names(list: string[]): string {
  return list.length ? list.join(", ") : "(none)";
}

function createPanel(state: ConsoleState, cb: Callbacks): HTMLElement {
  const text = el("textarea", {
    id: "spec-text",
    rows: "10",
    placeholder: "problem file text",
  }) as HTMLTextAreaElement;
  const button = el("button", { id: "create" }, "create session");
  button.addEventListener("click", () => cb.onCreate(text.value));
  return el(
    "section",
    { id: "create-panel" },
    el("h2", {}, "new session"),
    text,
    button,
    state.phase === "creating" ? el("p", {}, "synthesizing...") : "",
  ) as HTMLElement;
}

function statusBar(state: ConsoleState): HTMLElement {
  const v = state.view!;
  const sizes = v.sizes
    ? `env ${v.sizes.env} / product ${v.sizes.product} / region ${v.sizes.region}` +
      (v.sizes.further_product ? ` / further ${v.sizes.further_product}` : "")
    : "";
  return el(
    "section",
    { id: "status" },
    el("span", { id: "session-id" }, state.sessionId ?? ""),
    el("span", { id: "phase" }, v.status),
    el("span", { id: "mode" }, `mode: ${v.mode}`),
    el("span", { id: "round" }, `round: ${v.round}`),
    el(
      "span",
      { id: "committed" },
      `committed: base ${v.committed.base ? "yes" : "no"},` +
        ` further ${v.committed.further ? "yes" : "no"}`,
    ),
    el("span", { id: "sizes" }, sizes),
  );
}

function movesTable(state: ConsoleState): HTMLElement {
  const body = el("tbody", { id: "moves" });
  for (const row of state.moves) {
    body.append(
      el(
        "tr",
        { class: "move" },
        el("td", {}, String(row.round)),
        el("td", { class: "env-cell" }, names(row.env)),
        el(
          "td",
          { class: "agent-cell" },
          row.agent === null ? "stop" : names(row.agent),
        ),
      ),
    );
  }
  return el(
    "table",
    { id: "moves-table" },
    el(
      "thead",
      {},
      el("tr", {}, el("th", {}, "round"), el("th", {}, "environment"), el("th", {}, "agent")),
    ),
    body,
  );
}

function movePanel(state: ConsoleState, cb: Callbacks): HTMLElement {
  const panel = el("section", { id: "env-moves" }, el("h2", {}, "environment move"));
  for (const letter of state.view!.available_env_moves) {
    const b = el("button", { class: "env-move" }, names(letter));
    b.addEventListener("click", () => cb.onEnvMove(letter));
    panel.append(b);
  }
  return panel;
}

function rightsPanel(cb: Callbacks): HTMLElement {
  const panel = el("section", { id: "rights" }, el("h2", {}, "exercise a right"));
  for (const which of ["base", "further", "both"] as const) {
    const b = el("button", { id: `exercise-${which}` }, which);
    b.addEventListener("click", () => cb.onExercise(which));
    panel.append(b);
  }
  return panel;
}

function injectPanel(cb: Callbacks): HTMLElement {
  const fd = el("input", { id: "fd", placeholder: "further duty" }) as HTMLInputElement;
  const fr = el("input", { id: "fr", placeholder: "further right" }) as HTMLInputElement;
  const offer = el("button", { id: "inject" }, "offer pair");
  offer.addEventListener("click", () => cb.onInject(fd.value, fr.value));
  const filePair = el("button", { id: "inject-file-pair" }, "offer the file's pair");
  filePair.addEventListener("click", () => cb.onInjectFilePair());
  return el(
    "section",
    { id: "inject-panel" },
    el("h2", {}, "inject further duty/right"),
    fd,
    fr,
    offer,
    filePair,
  );
}

function rejectionList(state: ConsoleState): HTMLElement {
  const list = el("ul", { id: "rejections" });
  for (const r of state.view!.rejections) {
    list.append(
      el("li", { class: "rejection" }, `round ${r.round}: ${r.reason}`),
    );
  }
  return list;
}

function summaryPanel(state: ConsoleState): HTMLElement {
  const body = el("tbody", {});
  for (const [label, value] of summaryRows(state.view!)) {
    body.append(
      el(
        "tr",
        { class: "verdict", "data-label": label },
        el("td", {}, label),
        el("td", { class: "value" }, value),
      ),
    );
  }
  return el(
    "section",
    { id: "summary" },
    el("h2", {}, "play summary"),
    el("table", {}, body),
  );
}

export function render(root: HTMLElement, state: ConsoleState, cb: Callbacks): void {
  root.textContent = "";
  if (state.error) {
    root.append(el("p", { id: "error" }, state.error));
  }
  if (state.view === null) {
    root.append(createPanel(state, cb));
  } else {
    root.append(statusBar(state), movesTable(state));
    if (state.view.status === "running") {
      root.append(movePanel(state, cb), rightsPanel(cb), injectPanel(cb));
    }
    if (state.view.rejections.length) root.append(rejectionList(state));
    if (state.view.play_record) root.append(summaryPanel(state));
  }
  const log = el("pre", { id: "log" }, state.log.join("\n"));
  root.append(log);
}

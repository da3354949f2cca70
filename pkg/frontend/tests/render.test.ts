// @vitest-environment happy-dom

import { beforeEach, describe, expect, it, vi } from "vitest";

import { render, type Callbacks } from "../src/render.js";
import { initialState, withMove, withSession } from "../src/state.js";
import { someView } from "./fixtures.js";

function callbacks(): Callbacks {
  return {
    onCreate: vi.fn(),
    onEnvMove: vi.fn(),
    onExercise: vi.fn(),
    onInject: vi.fn(),
    onInjectFilePair: vi.fn(),
  };
}

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app")!;
});

describe("idle", () => {
  it("offers only the create form", () => {
    const cb = callbacks();
    render(root, initialState(), cb);
    const text = root.querySelector<HTMLTextAreaElement>("#spec-text")!;
    text.value = "vars env: rain\n";
    (root.querySelector("#create") as HTMLButtonElement).click();
    expect(cb.onCreate).toHaveBeenCalledWith("vars env: rain\n");
    expect(root.querySelector("#env-moves")).toBeNull();
  });
});

describe("running", () => {
  it("renders one button per legal environment move", () => {
    const cb = callbacks();
    const s = withSession(initialState(), "abc", someView());
    render(root, s, cb);
    const buttons = [...root.querySelectorAll<HTMLButtonElement>(".env-move")];
    expect(buttons.map((b) => b.textContent)).toEqual(["(none)", "rain"]);
    buttons[1].click();
    expect(cb.onEnvMove).toHaveBeenCalledWith(["rain"]);
    buttons[0].click();
    expect(cb.onEnvMove).toHaveBeenCalledWith([]);
  });

  it("shows the moves played so far as name lists", () => {
    const cb = callbacks();
    let s = withSession(initialState(), "abc", someView());
    s = withMove(s, ["rain"], ["lamp"], someView({ round: 1 }));
    render(root, s, cb);
    const rows = [...root.querySelectorAll("#moves .move")];
    expect(rows).toHaveLength(1);
    expect(rows[0].querySelector(".env-cell")!.textContent).toBe("rain");
    expect(rows[0].querySelector(".agent-cell")!.textContent).toBe("lamp");
  });

  it("wires the rights and injection panels", () => {
    const cb = callbacks();
    const s = withSession(initialState(), "abc", someView());
    render(root, s, cb);
    (root.querySelector("#exercise-both") as HTMLButtonElement).click();
    expect(cb.onExercise).toHaveBeenCalledWith("both");
    (root.querySelector("#fd") as HTMLInputElement).value = "F x";
    (root.querySelector("#fr") as HTMLInputElement).value = "true";
    (root.querySelector("#inject") as HTMLButtonElement).click();
    expect(cb.onInject).toHaveBeenCalledWith("F x", "true");
    (root.querySelector("#inject-file-pair") as HTMLButtonElement).click();
    expect(cb.onInjectFilePair).toHaveBeenCalled();
  });

  it("lists rejections verbatim", () => {
    const view = someView({
      rejections: [{ round: 1, reason: "the pair cannot be enforced" }],
    });
    render(root, withSession(initialState(), "abc", view), callbacks());
    const items = [...root.querySelectorAll(".rejection")];
    expect(items).toHaveLength(1);
    expect(items[0].textContent).toContain("round 1");
    expect(items[0].textContent).toContain("cannot be enforced");
  });
});

describe("stopped", () => {
  it("drops the action panels and shows the verdicts", () => {
    const view = someView({
      status: "stopped",
      available_env_moves: [],
      play_record: {
        play: [1],
        stop_round: 1,
        duty_satisfied: true,
        right_satisfied: false,
        further_duty_satisfied: null,
        further_right_satisfied: null,
        inject_round: null,
      },
    });
    render(root, withSession(initialState(), "abc", view), callbacks());
    expect(root.querySelector("#env-moves")).toBeNull();
    expect(root.querySelector("#inject-panel")).toBeNull();
    const duty = root.querySelector('#summary [data-label="duty"] .value')!;
    expect(duty.textContent).toBe("satisfied");
    const right = root.querySelector('#summary [data-label="right"] .value')!;
    expect(right.textContent).toBe("violated");
  });
});

/** Wiring: one store, one client, full re-render after every reply. */

import { ApiClient, ApiError } from "./api.js";
import type { ConsoleState } from "./state.js";
import {
  initialState,
  logged,
  withError,
  withMove,
  withSession,
  withView,
} from "./state.js";
import { render, type Callbacks } from "./render.js";

export interface Console {
  readonly state: ConsoleState;
  readonly api: ApiClient;
}

export function boot(root: HTMLElement, api: ApiClient): Console {
  let state = initialState();

  const console_: Console = {
    get state() {
      return state;
    },
    api,
  };

  function update(next: ConsoleState) {
    state = next;
    render(root, state, callbacks);
  }

  function failing(e: unknown) {
    const message = e instanceof ApiError ? e.message : String(e);
    update(withError(state, message));
  }

  const callbacks: Callbacks = {
    async onCreate(spec) {
      update({ ...state, phase: "creating", error: null });
      try {
        const out = await api.createSession(spec);
        if (!out.realizable || out.id === null || !out.view) {
          update(
            withError(
              { ...state, phase: "idle" },
              `not playable: ${out.reason ?? "unrealizable"}`,
            ),
          );
          return;
        }
        update(withSession(state, out.id, out.view));
      } catch (e) {
        state = { ...state, phase: "idle" };
        failing(e);
      }
    },

    async onEnvMove(letter) {
      try {
        const out = await api.envMove(state.sessionId!, letter);
        update(withMove(state, letter, out.agent_move, out.view));
      } catch (e) {
        failing(e);
      }
    },

    async onExercise(which) {
      try {
        const out = await api.exerciseRight(state.sessionId!, which);
        update(logged(withView(state, out.view), `right exercised (${which})`));
      } catch (e) {
        failing(e);
      }
    },

    async onInject(fd, fr) {
      await offer(fd, fr);
    },

    async onInjectFilePair() {
      await offer(undefined, undefined);
    },
  };

  async function offer(fd?: string, fr?: string) {
    try {
      const out = await api.injectFurther(state.sessionId!, fd, fr);
      const said = out.accepted
        ? "further pair accepted"
        : `further pair rejected: ${out.reason}`;
      update(logged(withView(state, out.view), said));
    } catch (e) {
      failing(e);
    }
  }

  render(root, state, callbacks);
  return console_;
}

/** Entry point for the real page; tests call boot directly. */
export function bootFromPage(root: HTMLElement): Console {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("server") ?? "http://127.0.0.1:8700";
  return boot(root, new ApiClient(base));
}

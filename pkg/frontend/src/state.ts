/** Console state: the latest server view plus a human-readable log of
 * everything exchanged so far.  All transitions are pure. */

import type { View } from "./api.js";

export interface MoveRow {
  round: number;
  env: string[];
  agent: string[] | null; // null when the agent answered with a stop
}

export interface ConsoleState {
  phase: "idle" | "creating" | "running" | "stopped" | "rejected";
  sessionId: string | null;
  view: View | null;
  moves: MoveRow[];
  log: string[];
  error: string | null;
}

export function initialState(): ConsoleState {
  return {
    phase: "idle",
    sessionId: null,
    view: null,
    moves: [],
    log: [],
    error: null,
  };
}

export function logged(s: ConsoleState, text: string): ConsoleState {
  return { ...s, log: [...s.log, text] };
}

export function withError(s: ConsoleState, message: string | null): ConsoleState {
  return { ...s, error: message };
}

export function withSession(s: ConsoleState, id: string, view: View): ConsoleState {
  return {
    ...initialState(),
    phase: view.status,
    sessionId: id,
    view,
    log: [...s.log, `session ${id} created`],
  };
}

export function withView(s: ConsoleState, view: View): ConsoleState {
  return { ...s, view, phase: view.status, error: null };
}

export function withMove(
  s: ConsoleState,
  env: string[],
  agent: string[] | null,
  view: View,
): ConsoleState {
  const round = s.moves.length + 1;
  const row: MoveRow = { round, env, agent };
  const said =
    agent === null
      ? `round ${round}: env {${env.join(",")}} / agent stops`
      : `round ${round}: env {${env.join(",")}} / agent {${agent.join(",")}}`;
  return {
    ...withView(s, view),
    moves: [...s.moves, row],
    log: [...s.log, said],
  };
}

/** The verdict rows shown once the play stops, in display order. */
export function summaryRows(view: View): [string, string][] {
  const rec = view.play_record;
  if (!rec) return [];
  const show = (v: boolean | null) =>
    v === null ? "not injected" : v ? "satisfied" : "violated";
  const rows: [string, string][] = [
    ["duty", show(rec.duty_satisfied)],
    ["right", show(rec.right_satisfied)],
    ["further duty", show(rec.further_duty_satisfied)],
    ["further right", show(rec.further_right_satisfied)],
    ["stopped after round", String(rec.stop_round)],
  ];
  if (rec.inject_round !== null) {
    rows.push(["injected at round", String(rec.inject_round)]);
  }
  return rows;
}

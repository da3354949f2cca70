/** Typed client for the dutiful session protocol (wire version 1).
 *
 * Every judgement call lives on the server: the client only ships text
 * back and forth and renders what the server says.
 */

export const WIRE_VERSION = 1;

export interface Sizes {
  env: number;
  product: number;
  region: number;
  further_product?: number;
}

export interface Rejection {
  round: number;
  further_duty?: string;
  further_right?: string;
  reason: string;
}

export interface PlayRecord {
  play: number[];
  stop_round: number;
  duty_satisfied: boolean;
  right_satisfied: boolean;
  further_duty_satisfied: boolean | null;
  further_right_satisfied: boolean | null;
  inject_round: number | null;
}

export interface View {
  status: "running" | "stopped" | "rejected";
  mode: string;
  round: number;
  history: string[][];
  arena_state: number | null;
  layer: number | null;
  available_env_moves: string[][];
  committed: { base: boolean; further: boolean };
  rejections: Rejection[];
  sizes: Sizes;
  play_record: PlayRecord | null;
}

export interface CreateResponse {
  id: string | null;
  realizable: boolean;
  reason?: string;
  sizes: Sizes | null;
  view?: View;
}

export interface EnvMoveResponse {
  agent_move: string[] | null;
  stop: boolean;
  view: View;
}

export interface FurtherResponse {
  accepted: boolean;
  reason: string | null;
  view: View;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly base: string,
    private readonly fetchFn: FetchLike = (...a) => fetch(...a),
  ) {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "Content-Type": "application/json" };
    }
    const resp = await this.fetchFn(this.base + path, init);
    if (resp.status === 204) return undefined as T;
    const text = await resp.text();
    let data: any = null;
    try {
      data = text ? JSON.parse(text) : null;
    } catch {
      throw new ApiError(resp.status, `unparseable reply: ${text.slice(0, 200)}`);
    }
    if (!resp.ok) {
      throw new ApiError(resp.status, data?.error ?? `HTTP ${resp.status}`);
    }
    return data as T;
  }

  createSession(spec: string): Promise<CreateResponse> {
    return this.call("POST", "/sessions", { v: WIRE_VERSION, spec });
  }

  view(id: string): Promise<View> {
    return this.call("GET", `/sessions/${id}`);
  }

  envMove(id: string, letter: string[]): Promise<EnvMoveResponse> {
    return this.call("POST", `/sessions/${id}/env-move`, { v: WIRE_VERSION, letter });
  }

  exerciseRight(id: string, which?: string): Promise<{ view: View }> {
    const body: Record<string, unknown> = { v: WIRE_VERSION };
    if (which !== undefined) body.which = which;
    return this.call("POST", `/sessions/${id}/exercise-right`, body);
  }

  /** Offer a further duty/right pair; omitted formulas fall back to the
   * pair in the problem file the session was created from. */
  injectFurther(id: string, fd?: string, fr?: string): Promise<FurtherResponse> {
    const body: Record<string, unknown> = { v: WIRE_VERSION };
    if (fd !== undefined) body.fd = fd;
    if (fr !== undefined) body.fr = fr;
    return this.call("POST", `/sessions/${id}/further`, body);
  }

  deleteSession(id: string): Promise<void> {
    return this.call("DELETE", `/sessions/${id}`);
  }
}

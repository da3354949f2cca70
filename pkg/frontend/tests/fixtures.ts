import type { View } from "../src/api.js";

export function someView(over: Partial<View> = {}): View {
  return {
    status: "running",
    mode: "duty",
    round: 0,
    history: [],
    arena_state: 0,
    layer: 3,
    available_env_moves: [[], ["rain"]],
    committed: { base: false, further: false },
    rejections: [],
    sizes: { env: 1, product: 4, region: 4 },
    play_record: null,
    ...over,
  };
}

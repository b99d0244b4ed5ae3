/** URL-encodable view state: reloading a deep link restores the selection. */

import type { SessionDraftRow } from "./api.js";

export type ViewName = "overview" | "trend" | "experiments" | "whatif";

export interface ViewState {
  view: ViewName;
  players: string[];
  from: string | null;
  to: string | null;
  feature: string;
  experiments: string[];
  modelId: string | null;
}

export const DEFAULT_STATE: ViewState = {
  view: "overview",
  players: [],
  from: null,
  to: null,
  feature: "acwr",
  experiments: [],
  modelId: null,
};

const VIEWS: ViewName[] = ["overview", "trend", "experiments", "whatif"];

export function encodeState(state: ViewState): string {
  const query = new URLSearchParams();
  if (state.view !== "overview") query.set("view", state.view);
  if (state.players.length) query.set("players", state.players.join(","));
  if (state.from) query.set("from", state.from);
  if (state.to) query.set("to", state.to);
  if (state.feature !== DEFAULT_STATE.feature) query.set("feature", state.feature);
  if (state.experiments.length) query.set("experiments", state.experiments.join(","));
  if (state.modelId) query.set("model", state.modelId);
  return query.toString();
}

export function decodeState(queryString: string): ViewState {
  const query = new URLSearchParams(queryString);
  const view = query.get("view");
  let from = query.get("from");
  let to = query.get("to");
  if (from && to && from > to) {
    [from, to] = [to, from]; // keep the date range non-empty
  }
  const split = (value: string | null) =>
    value ? value.split(",").filter((item) => item.length > 0) : [];
  return {
    view: VIEWS.includes(view as ViewName) ? (view as ViewName) : "overview",
    players: split(query.get("players")),
    from,
    to,
    feature: query.get("feature") ?? DEFAULT_STATE.feature,
    experiments: split(query.get("experiments")),
    modelId: query.get("model"),
  };
}

/** The what-if draft may only be submitted when it holds exactly the model's
 * n_in rows and every cell is a finite number. */
export function canSubmitDraft(draft: SessionDraftRow[], nIn: number): boolean {
  if (draft.length !== nIn) return false;
  return draft.every((row) =>
    Object.values(row).every((value) => typeof value === "number" && Number.isFinite(value)),
  );
}

/** URL-encodable view state: reloading a deep link restores the selection. */
export const DEFAULT_STATE = {
    view: "overview",
    players: [],
    from: null,
    to: null,
    feature: "acwr",
    experiments: [],
    modelId: null,
};
const VIEWS = ["overview", "trend", "experiments", "whatif"];
export function encodeState(state) {
    const query = new URLSearchParams();
    if (state.view !== "overview")
        query.set("view", state.view);
    if (state.players.length)
        query.set("players", state.players.join(","));
    if (state.from)
        query.set("from", state.from);
    if (state.to)
        query.set("to", state.to);
    if (state.feature !== DEFAULT_STATE.feature)
        query.set("feature", state.feature);
    if (state.experiments.length)
        query.set("experiments", state.experiments.join(","));
    if (state.modelId)
        query.set("model", state.modelId);
    return query.toString();
}
export function decodeState(queryString) {
    const query = new URLSearchParams(queryString);
    const view = query.get("view");
    let from = query.get("from");
    let to = query.get("to");
    if (from && to && from > to) {
        [from, to] = [to, from]; // keep the date range non-empty
    }
    const split = (value) => value ? value.split(",").filter((item) => item.length > 0) : [];
    return {
        view: VIEWS.includes(view) ? view : "overview",
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
export function canSubmitDraft(draft, nIn) {
    if (draft.length !== nIn)
        return false;
    return draft.every((row) => Object.values(row).every((value) => typeof value === "number" && Number.isFinite(value)));
}

import assert from "node:assert/strict";
import { test } from "node:test";
import { DEFAULT_STATE, canSubmitDraft, decodeState, encodeState } from "../src/state.js";
test("deep links round-trip through the URL", () => {
    const state = {
        view: "trend",
        players: ["p01", "p03"],
        from: "2021-03-01",
        to: "2021-05-01",
        feature: "weekly_load",
        experiments: ["I-1", "I-4"],
        modelId: "model_logit_abc123",
    };
    const decoded = decodeState(encodeState(state));
    assert.deepEqual(decoded, state);
});
test("empty query decodes to the defaults", () => {
    assert.deepEqual(decodeState(""), DEFAULT_STATE);
});
test("an inverted date range is normalized to keep it non-empty", () => {
    const decoded = decodeState("from=2021-05-01&to=2021-03-01");
    assert.equal(decoded.from, "2021-03-01");
    assert.equal(decoded.to, "2021-05-01");
    assert.ok(decoded.from <= decoded.to);
});
test("unknown view names fall back to overview", () => {
    assert.equal(decodeState("view=admin").view, "overview");
});
test("draft guard blocks at n_in-1 rows and non-numeric cells", () => {
    const row = { rpe: 5, duration_min: 60 };
    assert.equal(canSubmitDraft([row, row, row], 3), true);
    assert.equal(canSubmitDraft([row, row], 3), false); // n_in - 1 rows
    assert.equal(canSubmitDraft([row, row, { rpe: NaN, duration_min: 60 }], 3), false);
    assert.equal(canSubmitDraft([row, row, row, row], 3), false);
});

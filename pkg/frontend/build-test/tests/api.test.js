import assert from "node:assert/strict";
import { test } from "node:test";
import { ApiClient, ApiRequestError } from "../src/api.js";
import { fixture, stubFetch } from "./helpers.js";
test("client returns payloads verbatim (pass-through, no recomputation)", async () => {
    const players = fixture("players");
    const injuries = fixture("injuries");
    const experiments = fixture("experiments");
    const api = new ApiClient("", stubFetch({
        "/players": players,
        "/injuries": injuries,
        "/experiments": experiments,
    }));
    assert.deepEqual(await api.listPlayers(), players);
    assert.deepEqual(await api.listInjuries(), injuries);
    assert.deepEqual(await api.listExperiments(), experiments);
});
test("query parameters are encoded into the request URL", async () => {
    const log = [];
    const api = new ApiClient("", stubFetch({
        "/sessions": [],
        "/features/acwr": fixture("feature_series_numeric"),
    }, log));
    await api.listSessions("p01", "2021-03-01", "2021-04-01");
    await api.featureSeries("acwr", "p01");
    assert.equal(log[0].url, "/sessions?player=p01&from=2021-03-01&to=2021-04-01");
    assert.equal(log[1].url, "/features/acwr?player=p01");
});
test("predict posts the draft body unchanged and returns the score untouched", async () => {
    const request = fixture("predict_request");
    const response = fixture("predict_response");
    const log = [];
    const api = new ApiClient("", stubFetch({ "/predict": response }, log));
    const result = await api.predict(request.model_id, request.sessions);
    assert.deepEqual(result, response);
    assert.equal(log[0].method, "POST");
    assert.deepEqual(log[0].body, request);
});
test("HTTP errors map to ApiRequestError with the server message", async () => {
    const api = new ApiClient("", stubFetch({
        "/players": { __status__: 404, error: "unknown player 'zz'" },
    }));
    await assert.rejects(() => api.listPlayers(), (error) => error instanceof ApiRequestError
        && error.status === 404
        && error.message === "unknown player 'zz'");
});

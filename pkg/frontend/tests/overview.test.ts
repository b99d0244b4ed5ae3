import assert from "node:assert/strict";
import { test } from "node:test";

import type { InjuryRow, SessionRow } from "../src/api.js";
import { DEFAULT_STATE } from "../src/state.js";
import { renderOverview } from "../src/views/overview.js";
import { extractTags, fixture } from "./helpers.js";

const players = fixture<string[]>("players");
const sessions = fixture<SessionRow[]>("sessions");
const injuries = fixture<InjuryRow[]>("injuries");

test("overview renders exactly the /injuries markers", () => {
  const html = renderOverview({ players, sessions, injuries }, { ...DEFAULT_STATE });
  const markers = extractTags(html, "injury-marker");
  assert.equal(markers.length, injuries.length);
  const rendered = markers.map((m) => `${m["data-player"]}|${m["data-date"]}`).sort();
  const expected = injuries.map((i) => `${i.player}|${i.date}`).sort();
  assert.deepEqual(rendered, expected);
});

test("session marks come straight from the /sessions payload", () => {
  const html = renderOverview({ players, sessions, injuries }, { ...DEFAULT_STATE });
  const marks = extractTags(html, "session-mark");
  assert.equal(marks.length, sessions.length);
});

test("filtering to one player leaves one row of cells", () => {
  const onePlayer = players[0];
  const html = renderOverview(
    { players, sessions, injuries },
    { ...DEFAULT_STATE, players: [onePlayer] },
  );
  const rows = html.match(/<tr><th class="player-name">/g) ?? [];
  assert.equal(rows.length, 1);
  const markers = extractTags(html, "injury-marker");
  assert.ok(markers.every((m) => m["data-player"] === onePlayer));
  assert.equal(markers.length, injuries.filter((i) => i.player === onePlayer).length);
});

test("an empty date range shows the empty state", () => {
  const html = renderOverview(
    { players, sessions, injuries },
    { ...DEFAULT_STATE, from: "1999-01-01", to: "1999-01-02" },
  );
  assert.match(html, /empty-state/);
});

test("date-range filter keeps only markers inside the range", () => {
  const dates = injuries.map((i) => i.date).sort();
  const cutoff = dates[Math.floor(dates.length / 2)];
  const html = renderOverview(
    { players, sessions, injuries },
    { ...DEFAULT_STATE, from: null, to: cutoff },
  );
  const markers = extractTags(html, "injury-marker");
  const expected = injuries.filter((i) => i.date <= cutoff);
  assert.equal(markers.length, expected.length);
});

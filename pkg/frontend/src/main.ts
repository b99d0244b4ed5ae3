/** Browser bootstrap: routing, data loading, and event wiring. All rendering
 * goes through the pure view modules so their output stays testable. */

import { ApiClient, ApiRequestError } from "./api.js";
import type {
  ExperimentDetail,
  ExperimentSummary,
  FeatureSeries,
  ModelInfo,
  Prediction,
  SessionDraftRow,
} from "./api.js";
import { DEFAULT_STATE, ViewState, canSubmitDraft, decodeState, encodeState } from "./state.js";
import { renderOverview } from "./views/overview.js";
import { renderTrend } from "./views/trend.js";
import {
  DEFAULT_TABLE,
  MetricKey,
  TableOptions,
  renderExperimentTable,
  renderRocOverlay,
} from "./views/experiments.js";
import { applyEdit, baseFeatures, buildDraft, deleteRow, renderWhatIf } from "./views/whatif.js";

const api = new ApiClient("");

let state: ViewState = { ...DEFAULT_STATE };
let table: TableOptions = { ...DEFAULT_TABLE };
let draft: SessionDraftRow[] = [];
let activeModel: ModelInfo | null = null;
let prediction: Prediction | null = null;
let predictionError: string | null = null;

function appRoot(): HTMLElement {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  return root;
}

function syncUrl(): void {
  const encoded = encodeState(state);
  history.replaceState(null, "", encoded ? `?${encoded}` : location.pathname);
}

function navBar(): string {
  const tabs = (["overview", "trend", "experiments", "whatif"] as const)
    .map(
      (view) =>
        `<button class="tab${state.view === view ? " active" : ""}" data-view="${view}">` +
        `${view}</button>`,
    )
    .join("");
  return `<nav class="tabs">${tabs}</nav>`;
}

function errorBanner(message: string): string {
  return (
    `<div class="error-banner">${message} ` +
    `<button class="retry">retry</button></div>`
  );
}

async function renderCurrentView(): Promise<void> {
  const root = appRoot();
  root.innerHTML = `${navBar()}<div class="view-body">loading…</div>`;
  const body = root.querySelector(".view-body") as HTMLElement;
  try {
    if (state.view === "overview") {
      const [players, sessions, injuries] = await Promise.all([
        api.listPlayers(),
        api.listSessions(undefined, state.from ?? undefined, state.to ?? undefined),
        api.listInjuries(),
      ]);
      const pickers = renderPlayerPicker(players);
      body.innerHTML = pickers + renderOverview({ players, sessions, injuries }, state);
    } else if (state.view === "trend") {
      const players = await api.listPlayers();
      const player = state.players[0] ?? players[0];
      const series = await api.featureSeries(state.feature, player);
      body.innerHTML =
        renderPlayerPicker(players, true) +
        renderFeaturePicker(series.feature) +
        renderTrend(series);
    } else if (state.view === "experiments") {
      const rows = await api.listExperiments();
      const details: ExperimentDetail[] = [];
      for (const id of table.selected) {
        details.push(await api.experimentDetail(id));
      }
      body.innerHTML =
        renderModelFilter(rows) +
        renderExperimentTable(rows, table) +
        (details.length ? renderRocOverlay(details) : "");
    } else {
      body.innerHTML = renderWhatIf(activeModel, draft, prediction, predictionError);
    }
  } catch (error) {
    const message =
      error instanceof ApiRequestError
        ? `${error.status}: ${error.message}`
        : "service unreachable";
    body.innerHTML = errorBanner(message);
  }
}

function renderPlayerPicker(players: string[], single = false): string {
  const selected = state.players;
  const options = players
    .map((p) => {
      const active = selected.includes(p) || (single && selected[0] === p);
      return `<button class="player-chip${active ? " active" : ""}" data-player="${p}">${p}</button>`;
    })
    .join("");
  return `<div class="player-picker">${options}</div>`;
}

function renderFeaturePicker(current: string): string {
  return (
    `<form class="feature-picker"><input name="feature" value="${current}">` +
    `<button type="submit">show</button></form>`
  );
}

function renderModelFilter(rows: ExperimentSummary[]): string {
  const models = Array.from(new Set(rows.map((r) => r.model))).sort();
  const options = ["<option value=\"\">all models</option>"]
    .concat(models.map((m) =>
      `<option value="${m}"${table.modelFilter === m ? " selected" : ""}>${m}</option>`))
    .join("");
  return `<select class="model-filter">${options}</select>`;
}

async function enterWhatIf(detail: ExperimentDetail): Promise<void> {
  activeModel = detail.models[0] ?? null;
  prediction = null;
  predictionError = null;
  draft = [];
  if (activeModel) {
    state.modelId = activeModel.id;
    const player = state.players[0] ?? (await api.listPlayers())[0];
    const seriesByFeature: Record<string, FeatureSeries> = {};
    for (const base of baseFeatures(activeModel)) {
      seriesByFeature[base] = await api.featureSeries(base, player);
    }
    draft = buildDraft(activeModel, seriesByFeature);
  }
  state.view = "whatif";
  syncUrl();
  await renderCurrentView();
}

async function submitDraft(): Promise<void> {
  if (!activeModel || !canSubmitDraft(draft, activeModel.n_in)) return;
  try {
    prediction = await api.predict(activeModel.id, draft);
    predictionError = null;
  } catch (error) {
    prediction = null;
    predictionError =
      error instanceof ApiRequestError ? `${error.status}: ${error.message}` : String(error);
  }
  await renderCurrentView();
}

function wireEvents(): void {
  const root = appRoot();
  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.matches(".tab")) {
      state.view = target.dataset.view as ViewState["view"];
      syncUrl();
      void renderCurrentView();
    } else if (target.matches(".player-chip")) {
      const player = target.dataset.player!;
      if (state.view === "trend") {
        state.players = [player];
      } else {
        state.players = state.players.includes(player)
          ? state.players.filter((p) => p !== player)
          : [...state.players, player];
      }
      syncUrl();
      void renderCurrentView();
    } else if (target.matches(".cell, .session-mark, .injury-marker")) {
      const player = target.dataset.player;
      if (player) {
        state.players = [player];
        state.view = "trend";
        syncUrl();
        void renderCurrentView();
      }
    } else if (target.matches("th.sortable")) {
      const key = target.dataset.sort as MetricKey;
      table = {
        ...table,
        sortBy: key,
        descending: table.sortBy === key ? !table.descending : true,
      };
      void renderCurrentView();
    } else if (target.matches(".select-cell")) {
      const id = target.dataset.id!;
      table = {
        ...table,
        selected: table.selected.includes(id)
          ? table.selected.filter((x) => x !== id)
          : [...table.selected, id],
      };
      state.experiments = table.selected;
      syncUrl();
      void renderCurrentView();
    } else if (target.matches("tr[data-id] td:not(:first-child), tr[data-id] th")) {
      const row = target.closest("tr[data-id]") as HTMLElement | null;
      if (row && state.view === "experiments") {
        void api.experimentDetail(row.dataset.id!).then(enterWhatIf);
      }
    } else if (target.matches(".delete-row")) {
      draft = deleteRow(draft, Number(target.dataset.row));
      void renderCurrentView();
    } else if (target.matches(".submit-draft")) {
      void submitDraft();
    } else if (target.matches(".retry")) {
      void renderCurrentView();
    }
  });
  root.addEventListener("change", (event) => {
    const target = event.target as HTMLInputElement | HTMLSelectElement;
    if (target.matches(".draft-cell")) {
      const input = target as HTMLInputElement;
      draft = applyEdit(draft, Number(input.dataset.row), input.dataset.feature!, input.value);
      void renderCurrentView();
    } else if (target.matches(".model-filter")) {
      table = { ...table, modelFilter: target.value || null };
      void renderCurrentView();
    }
  });
  root.addEventListener("submit", (event) => {
    const form = event.target as HTMLFormElement;
    if (form.matches(".feature-picker")) {
      event.preventDefault();
      const input = form.querySelector("input[name=feature]") as HTMLInputElement;
      state.feature = input.value.trim();
      syncUrl();
      void renderCurrentView();
    }
  });
}

export async function bootstrap(): Promise<void> {
  state = decodeState(location.search);
  table = { ...DEFAULT_TABLE, selected: state.experiments };
  wireEvents();
  if (state.view === "whatif" && state.modelId) {
    // deep link into what-if: restore via the experiments list
    try {
      const rows = await api.listExperiments();
      for (const row of rows) {
        const detail = await api.experimentDetail(row.id);
        const model = detail.models.find((m) => m.id === state.modelId);
        if (model) {
          await enterWhatIf(detail);
          return;
        }
      }
    } catch {
      // fall through to a plain render with the error banner
    }
  }
  await renderCurrentView();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void bootstrap();
}

/** What-if prediction: edit a draft of n_in session rows, submit, read the
 * score back, adjust, repeat. The submit button stays disabled until the
 * draft holds exactly n_in numerically-complete rows. */

import type { FeatureSeries, ModelInfo, Prediction, SessionDraftRow } from "../api.js";
import { canSubmitDraft } from "../state.js";

/** Pre-fill the draft from the player's latest sessions, one series per base
 * feature fetched from the service. */
export function buildDraft(
  model: ModelInfo,
  seriesByFeature: Record<string, FeatureSeries>,
): SessionDraftRow[] {
  const bases = baseFeatures(model);
  const rows: SessionDraftRow[] = [];
  for (let offset = model.n_in; offset >= 1; offset -= 1) {
    const row: SessionDraftRow = {};
    for (const base of bases) {
      const series = seriesByFeature[base];
      const points = series ? series.series : [];
      const point = points[points.length - offset];
      const value = point && typeof point.value === "number" ? point.value : 0;
      row[base] = value;
    }
    rows.push(row);
  }
  return rows;
}

/** Base (per-session) feature names recovered from the flattened training names. */
export function baseFeatures(model: ModelInfo): string[] {
  const bases: string[] = [];
  for (let i = 0; i < model.features.length; i += model.n_in) {
    bases.push(model.features[i].replace(/_\d+$/, ""));
  }
  return bases;
}

export function applyEdit(
  draft: SessionDraftRow[], row: number, feature: string, raw: string,
): SessionDraftRow[] {
  const next = draft.map((r) => ({ ...r }));
  const parsed = Number(raw);
  next[row][feature] = Number.isFinite(parsed) && raw.trim() !== "" ? parsed : NaN;
  return next;
}

export function deleteRow(draft: SessionDraftRow[], row: number): SessionDraftRow[] {
  return draft.filter((_, i) => i !== row);
}

function escapeHtml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderWhatIf(
  model: ModelInfo | null,
  draft: SessionDraftRow[],
  prediction: Prediction | null,
  error: string | null = null,
): string {
  if (!model) {
    return '<div class="empty-state">Train a model and select an experiment first.</div>';
  }
  const bases = baseFeatures(model);
  const header = bases.map((b) => `<th>${escapeHtml(b)}</th>`).join("");
  const body = draft
    .map((row, i) => {
      const cells = bases
        .map((base) => {
          const value = row[base];
          const text = Number.isFinite(value) ? String(value) : "";
          return (
            `<td><input class="draft-cell" data-row="${i}" data-feature="${escapeHtml(base)}"` +
            ` value="${escapeHtml(text)}"></td>`
          );
        })
        .join("");
      return (
        `<tr><th>session ${i + 1}</th>${cells}` +
        `<td><button class="delete-row" data-row="${i}">remove</button></td></tr>`
      );
    })
    .join("");
  const submittable = canSubmitDraft(draft, model.n_in);
  const verdict = prediction
    ? `<div class="prediction-panel" data-score="${prediction.score}">` +
      `<span class="score">score ${prediction.score}</span>` +
      `<span class="verdict ${prediction.class === 1 ? "risk" : "safe"}">` +
      `class ${prediction.class} at threshold ${prediction.threshold}</span></div>`
    : "";
  const problem = error ? `<div class="error-banner">${escapeHtml(error)}</div>` : "";
  return (
    `<div class="whatif" data-model="${escapeHtml(model.id)}">` +
    `<p>${model.kind} expects ${model.n_in} sessions; draft has ${draft.length}.</p>` +
    `<table class="draft-table"><thead><tr><th></th>${header}<th></th></tr></thead>` +
    `<tbody>${body}</tbody></table>` +
    `<button class="submit-draft"${submittable ? "" : " disabled"}>predict</button>` +
    verdict +
    problem +
    "</div>"
  );
}

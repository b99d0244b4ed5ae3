/** Experiment explorer: sortable/filterable cell table plus ROC overlays.
 * Sorting and every displayed number use the API payload values verbatim. */
export const DEFAULT_TABLE = {
    sortBy: "auc",
    descending: true,
    modelFilter: null,
    selected: [],
};
export function sortRows(rows, sortBy, descending) {
    const sorted = [...rows];
    sorted.sort((a, b) => {
        if (sortBy === "id") {
            return a.id.localeCompare(b.id, undefined, { numeric: true });
        }
        return a.mean[sortBy] - b.mean[sortBy];
    });
    if (descending)
        sorted.reverse();
    return sorted;
}
export function filterRows(rows, modelFilter) {
    return modelFilter ? rows.filter((r) => r.model === modelFilter) : rows;
}
const METRIC_COLUMNS = ["precision", "tpr", "f1", "auc"];
export function renderExperimentTable(rows, options) {
    const visible = sortRows(filterRows(rows, options.modelFilter), options.sortBy, options.descending);
    const header = "<tr><th></th><th data-sort=\"id\">ID</th><th>Data</th><th>Event</th>" +
        "<th>Input</th><th>Output</th><th>Features</th><th>Model</th>" +
        METRIC_COLUMNS.map((m) => `<th data-sort="${m}" class="sortable">${m.toUpperCase()}</th>`).join("") +
        "</tr>";
    const body = visible
        .map((row) => {
        const checked = options.selected.includes(row.id) ? " checked" : "";
        const metrics = METRIC_COLUMNS.map((m) => `<td class="metric" data-metric="${m}">${row.mean[m]}</td>`).join("");
        return (`<tr data-id="${row.id}"><td><input type="checkbox" class="select-cell"` +
            ` data-id="${row.id}"${checked}></td>` +
            `<td>${row.id}</td><td>${row.data}</td><td>${row.event}</td>` +
            `<td>${row.input}</td><td>${row.output}</td>` +
            `<td>${row.features.join(",")}</td><td>${row.model}</td>${metrics}</tr>`);
    })
        .join("");
    return `<table class="experiment-table"><thead>${header}</thead><tbody>${body}</tbody></table>`;
}
const ROC_SIZE = 320;
const ROC_PAD = 28;
const STROKES = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed"];
export function renderRocOverlay(details) {
    const scale = (v) => ROC_PAD + v * (ROC_SIZE - 2 * ROC_PAD);
    const flip = (v) => ROC_SIZE - scale(v);
    const curves = details
        .map((detail, k) => {
        const points = detail.mean_roc
            .map(([fpr, tpr]) => `${scale(fpr).toFixed(1)},${flip(tpr).toFixed(1)}`)
            .join(" ");
        return (`<polyline class="roc-curve" data-id="${detail.id}" fill="none" ` +
            `stroke="${STROKES[k % STROKES.length]}" points="${points}" />`);
    })
        .join("");
    const legend = details
        .map((detail, k) => `<li class="legend-item" data-id="${detail.id}">` +
        `<span class="swatch" style="background:${STROKES[k % STROKES.length]}"></span>` +
        `${detail.id} (${detail.config.model}, AUC ${detail.mean.auc})</li>`)
        .join("");
    const diagonal = `<line class="roc-diagonal" x1="${scale(0)}" y1="${flip(0)}" ` +
        `x2="${scale(1)}" y2="${flip(1)}" />`;
    return (`<div class="roc-overlay"><svg viewBox="0 0 ${ROC_SIZE} ${ROC_SIZE}" role="img" ` +
        `aria-label="mean ROC curves">${diagonal}${curves}</svg>` +
        `<ul class="roc-legend">${legend}</ul></div>`);
}

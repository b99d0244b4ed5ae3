/** Per-player feature trend: line chart for numeric features, dot plot for
 * categorical ones, injuries overlaid as vertical markers. The chart kind is
 * dispatched from the catalog `kind` the service reports. */
const WIDTH = 720;
const HEIGHT = 260;
const PAD = 36;
function xPosition(index, count) {
    if (count <= 1)
        return PAD + (WIDTH - 2 * PAD) / 2;
    return PAD + ((WIDTH - 2 * PAD) * index) / (count - 1);
}
function escapeHtml(text) {
    return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}
export function renderTrend(series) {
    const points = series.series;
    if (points.length === 0) {
        return '<div class="empty-state">No sessions for this player.</div>';
    }
    const dateIndex = new Map(points.map((p, i) => [p.date, i]));
    const injuryLines = series.injury_dates
        .map((date) => {
        const index = dateIndex.get(date);
        // rest-day injuries sit between session columns
        const nearest = index ?? points.findIndex((p) => p.date > date) - 0.5;
        const x = xPosition(typeof nearest === "number" && nearest >= 0 ? nearest : points.length - 0.5, points.length);
        return (`<line class="injury-line" data-date="${date}" x1="${x.toFixed(1)}" ` +
            `y1="${PAD / 2}" x2="${x.toFixed(1)}" y2="${HEIGHT - PAD}" />`);
    })
        .join("");
    let plot;
    if (series.kind === "numeric") {
        const values = points.map((p) => (typeof p.value === "number" ? p.value : NaN));
        const finite = values.filter((v) => Number.isFinite(v));
        const low = Math.min(...finite);
        const high = Math.max(...finite);
        const span = high - low || 1;
        const coords = points
            .map((p, i) => {
            const value = values[i];
            if (!Number.isFinite(value))
                return null;
            const x = xPosition(i, points.length);
            const y = HEIGHT - PAD - ((value - low) / span) * (HEIGHT - 2 * PAD);
            return `${x.toFixed(1)},${y.toFixed(1)}`;
        })
            .filter((c) => c !== null);
        plot =
            `<polyline class="trend-line" fill="none" points="${coords.join(" ")}" />` +
                `<text class="axis-label" x="4" y="${PAD}">${high}</text>` +
                `<text class="axis-label" x="4" y="${HEIGHT - PAD}">${low}</text>`;
    }
    else {
        const levels = Array.from(new Set(points.map((p) => String(p.value)))).sort();
        const bandHeight = (HEIGHT - 2 * PAD) / Math.max(levels.length, 1);
        const labels = levels
            .map((level, k) => `<text class="axis-label" x="4" y="${(PAD + bandHeight * (k + 0.5)).toFixed(1)}">` +
            `${escapeHtml(level)}</text>`)
            .join("");
        const dots = points
            .map((p, i) => {
            const level = levels.indexOf(String(p.value));
            const x = xPosition(i, points.length);
            const y = PAD + bandHeight * (level + 0.5);
            return (`<circle class="dot" data-date="${p.date}" data-value="${escapeHtml(String(p.value))}"` +
                ` cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="4" />`);
        })
            .join("");
        plot = labels + dots;
    }
    return (`<svg class="trend-chart" viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" ` +
        `aria-label="${escapeHtml(series.feature)} trend for ${escapeHtml(series.player)}">` +
        plot +
        injuryLines +
        "</svg>");
}

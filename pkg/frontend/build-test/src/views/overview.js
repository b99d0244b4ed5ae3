/** Team overview: players x dates timeline with session marks and injury markers. */
function inRange(date, state) {
    if (state.from && date < state.from)
        return false;
    if (state.to && date > state.to)
        return false;
    return true;
}
function escapeHtml(text) {
    return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}
/** One marker element per /injuries payload row (filtered only by the view's
 * player/date selection); the payload is the single source of truth. */
export function renderOverview(data, state) {
    const players = state.players.length
        ? data.players.filter((p) => state.players.includes(p))
        : data.players;
    const sessions = data.sessions.filter((s) => players.includes(s.player) && inRange(s.date, state));
    const injuries = data.injuries.filter((i) => players.includes(i.player) && inRange(i.date, state));
    const dates = Array.from(new Set([...sessions.map((s) => s.date), ...injuries.map((i) => i.date)])).sort();
    if (dates.length === 0) {
        return '<div class="empty-state">No sessions in the selected range.</div>';
    }
    const sessionByKey = new Map();
    for (const session of sessions) {
        sessionByKey.set(`${session.player}|${session.date}`, session);
    }
    const injuriesByKey = new Map();
    for (const injury of injuries) {
        const key = `${injury.player}|${injury.date}`;
        const bucket = injuriesByKey.get(key) ?? [];
        bucket.push(injury);
        injuriesByKey.set(key, bucket);
    }
    const header = dates
        .map((d) => `<th class="date-col" title="${d}">${d.slice(5)}</th>`)
        .join("");
    const body = players
        .map((player) => {
        const cells = dates
            .map((date) => {
            const key = `${player}|${date}`;
            const session = sessionByKey.get(key);
            const marks = [];
            if (session) {
                const cls = session.session_type === "match" ? "mark-match" : "mark-training";
                marks.push(`<span class="session-mark ${cls}" data-player="${escapeHtml(player)}"` +
                    ` data-date="${date}" title="${session.session_type}">` +
                    `${session.session_type === "match" ? "M" : "T"}</span>`);
            }
            for (const injury of injuriesByKey.get(key) ?? []) {
                marks.push(`<span class="injury-marker${injury.off_session ? " off-session" : ""}"` +
                    ` data-player="${escapeHtml(injury.player)}" data-date="${injury.date}"` +
                    ` title="${escapeHtml(injury.area)} (${escapeHtml(injury.cause)})">⚠</span>`);
            }
            return `<td class="cell" data-player="${escapeHtml(player)}" data-date="${date}">` +
                `${marks.join("")}</td>`;
        })
            .join("");
        return `<tr><th class="player-name">${escapeHtml(player)}</th>${cells}</tr>`;
    })
        .join("");
    return ('<table class="overview-grid"><thead><tr><th></th>' +
        header +
        "</tr></thead><tbody>" +
        body +
        "</tbody></table>");
}

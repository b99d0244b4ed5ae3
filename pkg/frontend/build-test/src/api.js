/** Typed client for the monitoring service. Every method returns the server
 * payload verbatim: the dashboard never recomputes a number it can fetch. */
export class ApiRequestError extends Error {
    status;
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
export class ApiClient {
    baseUrl;
    fetchFn;
    constructor(baseUrl = "", fetchFn = (url, init) => fetch(url, init)) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    async request(path, init) {
        const response = await this.fetchFn(this.baseUrl + path, init);
        const body = await response.json();
        if (!response.ok) {
            const message = body && typeof body.error === "string" ? body.error : "request failed";
            throw new ApiRequestError(response.status, message);
        }
        return body;
    }
    listPlayers() {
        return this.request("/players");
    }
    listSessions(player, from, to) {
        const query = new URLSearchParams();
        if (player)
            query.set("player", player);
        if (from)
            query.set("from", from);
        if (to)
            query.set("to", to);
        const suffix = query.toString() ? `?${query}` : "";
        return this.request(`/sessions${suffix}`);
    }
    listInjuries(player) {
        const suffix = player ? `?player=${encodeURIComponent(player)}` : "";
        return this.request(`/injuries${suffix}`);
    }
    featureSeries(feature, player) {
        return this.request(`/features/${encodeURIComponent(feature)}?player=${encodeURIComponent(player)}`);
    }
    listExperiments() {
        return this.request("/experiments");
    }
    experimentDetail(id) {
        return this.request(`/experiments/${encodeURIComponent(id)}`);
    }
    predict(modelId, sessions) {
        return this.request("/predict", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ model_id: modelId, sessions }),
        });
    }
}

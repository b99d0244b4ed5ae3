/** Typed client for the monitoring service. Every method returns the server
 * payload verbatim: the dashboard never recomputes a number it can fetch. */

export interface SessionRow {
  player: string;
  date: string;
  session_type: string;
  injury: number;
}

export interface InjuryRow {
  player: string;
  date: string;
  cause: string;
  activity: string;
  area: string;
  body_region: string;
  off_session: boolean;
}

export interface SeriesPoint {
  date: string;
  value: number | string | null;
}

export interface FeatureSeries {
  feature: string;
  kind: "numeric" | "categorical";
  player: string;
  series: SeriesPoint[];
  injury_dates: string[];
}

export interface MetricSet {
  precision: number;
  tpr: number;
  tnr: number;
  f1: number;
  auc: number;
}

export interface ExperimentSummary {
  id: string;
  data: string;
  event: number;
  input: number;
  output: number;
  features: string[];
  model: string;
  mean: MetricSet;
  sd: MetricSet;
}

export interface ModelInfo {
  id: string;
  kind: string;
  n_in: number;
  features: string[];
}

export interface ExperimentDetail {
  id: string;
  config: {
    event_proportion: number;
    n_in: number;
    n_out: number;
    features: string[];
    model: string;
    rounds: number;
    seed: number;
    data: string;
    multiplier: number;
  };
  mean: MetricSet;
  sd: MetricSet;
  rounds: (MetricSet & { confusion: { tp: number; fp: number; tn: number; fn: number } })[];
  mean_roc: [number, number][];
  models: ModelInfo[];
}

export interface Prediction {
  score: number;
  class: number;
  threshold: number;
}

export type SessionDraftRow = Record<string, number>;

export class ApiRequestError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    const body = await response.json();
    if (!response.ok) {
      const message = body && typeof body.error === "string" ? body.error : "request failed";
      throw new ApiRequestError(response.status, message);
    }
    return body as T;
  }

  listPlayers(): Promise<string[]> {
    return this.request("/players");
  }

  listSessions(player?: string, from?: string, to?: string): Promise<SessionRow[]> {
    const query = new URLSearchParams();
    if (player) query.set("player", player);
    if (from) query.set("from", from);
    if (to) query.set("to", to);
    const suffix = query.toString() ? `?${query}` : "";
    return this.request(`/sessions${suffix}`);
  }

  listInjuries(player?: string): Promise<InjuryRow[]> {
    const suffix = player ? `?player=${encodeURIComponent(player)}` : "";
    return this.request(`/injuries${suffix}`);
  }

  featureSeries(feature: string, player: string): Promise<FeatureSeries> {
    return this.request(
      `/features/${encodeURIComponent(feature)}?player=${encodeURIComponent(player)}`,
    );
  }

  listExperiments(): Promise<ExperimentSummary[]> {
    return this.request("/experiments");
  }

  experimentDetail(id: string): Promise<ExperimentDetail> {
    return this.request(`/experiments/${encodeURIComponent(id)}`);
  }

  predict(modelId: string, sessions: SessionDraftRow[]): Promise<Prediction> {
    return this.request("/predict", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ model_id: modelId, sessions }),
    });
  }
}

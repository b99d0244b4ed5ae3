"""Read-only HTTP+JSON service for the dashboard: store slices, experiment
results, and on-demand predictions. Built on the stdlib http.server."""

from __future__ import annotations

import datetime as dt
import json
import mimetypes
import re
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

import numpy as np

from .models import ModelError, TrainedModel, classify, load_model, score
from .store import FeatureStore, read_store


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


class ApiState:
    """Everything the endpoints read: the store, grid results, trained models.

    All inputs are loaded read-only at startup; prediction is pure compute."""

    def __init__(
        self,
        store: FeatureStore,
        results_path: Path | None = None,
        models_dir: Path | None = None,
        static_dir: Path | None = None,
    ):
        self.store = store
        self.results = None
        if results_path and Path(results_path).exists():
            with open(results_path, encoding="utf-8") as fh:
                self.results = json.load(fh)
        self.models: dict[str, TrainedModel] = {}
        if models_dir and Path(models_dir).exists():
            for path in sorted(Path(models_dir).glob("model_*.json")):
                self.models[path.stem] = load_model(path)
        self.static_dir = Path(static_dir) if static_dir else None
        self._players = set(store.players())

    # -- store views --------------------------------------------------------

    def players(self) -> list[str]:
        return self.store.players()

    def _check_player(self, player: str) -> None:
        if player not in self._players:
            raise ApiError(404, f"unknown player {player!r}")

    def sessions(self, player: str | None, date_from: str | None, date_to: str | None):
        records = self.store.records
        if player is not None:
            self._check_player(player)
            records = [r for r in records if r.player == player]
        if date_from:
            records = [r for r in records if r.date >= dt.date.fromisoformat(date_from)]
        if date_to:
            records = [r for r in records if r.date <= dt.date.fromisoformat(date_to)]
        return [
            {
                "player": r.player,
                "date": r.date.isoformat(),
                "session_type": r.session_type,
                "injury": r.injury,
            }
            for r in records
        ]

    def injuries(self, player: str | None):
        if player is not None:
            self._check_player(player)
        out = []
        for r in self.store.records:
            if r.injury != 1:
                continue
            if player is not None and r.player != player:
                continue
            out.append(
                {
                    "player": r.player,
                    "date": r.date.isoformat(),
                    "cause": r.categorical.get("cause", "unknown"),
                    "activity": r.categorical.get("activity", "unknown"),
                    "area": r.categorical.get("area", "unknown"),
                    "body_region": r.categorical.get("body_region", "unknown"),
                    "off_session": False,
                }
            )
        for event in self.store.off_session_injuries:
            if player is not None and event.player != player:
                continue
            out.append(
                {
                    "player": event.player,
                    "date": event.date.isoformat(),
                    "cause": event.cause,
                    "activity": event.activity,
                    "area": event.area,
                    "body_region": event.body_region,
                    "off_session": True,
                }
            )
        out.sort(key=lambda e: (e["player"], e["date"]))
        return out

    def feature_series(self, name: str, player: str):
        self._check_player(player)
        catalog_names = set(self.store.catalog.names())
        if name not in catalog_names:
            raise ApiError(404, f"unknown feature {name!r}")
        kind = self.store.catalog.kind_of(name)
        series = []
        for r in self.store.records:
            if r.player != player:
                continue
            value = r.numeric.get(name) if kind == "numeric" else r.categorical.get(name)
            series.append({"date": r.date.isoformat(), "value": value})
        injuries = sorted(d.isoformat() for d in self.store.injury_dates(player))
        return {
            "feature": name,
            "kind": kind,
            "player": player,
            "series": series,
            "injury_dates": injuries,
        }

    # -- experiments --------------------------------------------------------

    def experiments(self):
        if self.results is None:
            return []
        return [
            {
                "id": cell["id"],
                "data": cell["config"]["data"],
                "event": cell["config"]["event_proportion"],
                "input": cell["config"]["n_in"],
                "output": cell["config"]["n_out"],
                "features": cell["config"]["features"],
                "model": cell["config"]["model"],
                "mean": cell["mean"],
                "sd": cell["sd"],
            }
            for cell in self.results["cells"]
        ]

    def experiment_detail(self, cell_id: str):
        if self.results is not None:
            for cell in self.results["cells"]:
                if cell["id"] == cell_id:
                    detail = dict(cell)
                    detail["models"] = [
                        {
                            "id": model_id,
                            "kind": model.kind,
                            "n_in": model.n_in,
                            "features": model.feature_names,
                        }
                        for model_id, model in self.models.items()
                        if model.kind == cell["config"]["model"]
                        and model.n_in == cell["config"]["n_in"]
                    ]
                    return detail
        raise ApiError(404, f"unknown experiment {cell_id!r}")

    # -- prediction ---------------------------------------------------------

    def predict(self, body: dict):
        if not isinstance(body, dict):
            raise ApiError(400, "body must be a JSON object")
        model_id = body.get("model_id")
        if not isinstance(model_id, str):
            raise ApiError(400, "missing or invalid field: model_id")
        model = self.models.get(model_id)
        if model is None:
            raise ApiError(404, f"unknown model {model_id!r}")
        sessions = body.get("sessions")
        if not isinstance(sessions, list):
            raise ApiError(400, "missing or invalid field: sessions")
        if len(sessions) != model.n_in:
            raise ApiError(
                422,
                f"model {model_id} expects {model.n_in} sessions, got {len(sessions)}",
            )
        base_names = base_feature_names(model)
        x = np.empty(len(model.feature_names))
        k = 0
        for name in base_names:
            for t, session in enumerate(sessions):
                if not isinstance(session, dict):
                    raise ApiError(400, f"sessions[{t}] must be an object")
                if name not in session:
                    raise ApiError(400, f"missing field: sessions[{t}].{name}")
                value = session[name]
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    raise ApiError(400, f"non-numeric field: sessions[{t}].{name}")
                x[k] = float(value)
                k += 1
        try:
            probability = float(score(model, x.reshape(1, -1))[0])
            label = int(classify(model, x.reshape(1, -1))[0])
        except ModelError as exc:
            raise ApiError(422, str(exc)) from None
        return {"score": probability, "class": label, "threshold": 0.5}


def base_feature_names(model: TrainedModel) -> list[str]:
    """Recover per-session feature names from the flattened feature-major names."""
    return [
        re.sub(r"_\d+$", "", name)
        for name in model.feature_names[:: model.n_in]
    ]


# ---------------------------------------------------------------------------
# routing
# ---------------------------------------------------------------------------

def route(state: ApiState, method: str, path: str, query: dict, body: dict | None = None):
    """Dispatch one request; returns the JSON-serializable payload.

    Raises ApiError with the proper status for every failure mode."""
    if method == "GET":
        if path == "/players":
            return state.players()
        if path == "/sessions":
            return state.sessions(
                _single(query, "player"), _single(query, "from"), _single(query, "to")
            )
        if path == "/injuries":
            return state.injuries(_single(query, "player"))
        match = re.fullmatch(r"/features/([^/]+)", path)
        if match:
            player = _single(query, "player")
            if player is None:
                raise ApiError(400, "missing query parameter: player")
            return state.feature_series(match.group(1), player)
        if path == "/experiments":
            return state.experiments()
        match = re.fullmatch(r"/experiments/([^/]+)", path)
        if match:
            return state.experiment_detail(match.group(1))
        raise ApiError(404, f"no such endpoint: {path}")
    if method == "POST":
        if path == "/predict":
            return state.predict(body)
        raise ApiError(404, f"no such endpoint: {path}")
    raise ApiError(404, f"unsupported method {method}")


def _single(query: dict, key: str) -> str | None:
    values = query.get(key)
    if not values:
        return None
    return values[0]


class _Handler(BaseHTTPRequestHandler):
    state: ApiState = None  # set by make_server

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send_json(self, status: int, payload) -> None:
        body = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _serve_static(self, path: str) -> bool:
        if self.state.static_dir is None:
            return False
        rel = path.lstrip("/") or "index.html"
        target = (self.state.static_dir / rel).resolve()
        try:
            target.relative_to(self.state.static_dir.resolve())
        except ValueError:
            return False
        if not target.is_file():
            return False
        content = target.read_bytes()
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(content)))
        self.end_headers()
        self.wfile.write(content)
        return True

    def do_GET(self):
        parsed = urlparse(self.path)
        query = parse_qs(parsed.query)
        try:
            payload = route(self.state, "GET", parsed.path, query)
        except ApiError as exc:
            if exc.status == 404 and self._serve_static(parsed.path):
                return
            self._send_json(exc.status, {"error": exc.message})
            return
        except Exception as exc:
            self._send_json(500, {"error": str(exc)})
            return
        self._send_json(200, payload)

    def do_POST(self):
        parsed = urlparse(self.path)
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            body = json.loads(raw) if raw else None
        except json.JSONDecodeError:
            self._send_json(400, {"error": "invalid JSON body"})
            return
        try:
            payload = route(self.state, "POST", parsed.path, parse_qs(parsed.query), body)
        except ApiError as exc:
            self._send_json(exc.status, {"error": exc.message})
            return
        except Exception as exc:
            self._send_json(500, {"error": str(exc)})
            return
        self._send_json(200, payload)


def make_server(
    store_path: str | Path,
    results_path: str | Path | None = None,
    models_dir: str | Path | None = None,
    static_dir: str | Path | None = None,
    host: str = "127.0.0.1",
    port: int = 0,
) -> ThreadingHTTPServer:
    store = read_store(store_path)
    state = ApiState(
        store,
        results_path=Path(results_path) if results_path else None,
        models_dir=Path(models_dir) if models_dir else None,
        static_dir=Path(static_dir) if static_dir else None,
    )
    handler = type("BoundHandler", (_Handler,), {"state": state})
    return ThreadingHTTPServer((host, port), handler)

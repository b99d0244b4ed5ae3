import json
import threading
import urllib.error
import urllib.request
from pathlib import Path

import numpy as np
import pytest

from injurylab import pipeline
from injurylab.cli import main
from injurylab.config import ConfigError, config_from_dict, config_snapshot, load_config
from injurylab.models import load_model
from injurylab.service import ApiError, ApiState, base_feature_names, make_server, route
from injurylab.store import read_store

from conftest import config_for


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def test_default_config_from_empty_dict():
    cfg = config_from_dict({})
    assert cfg.seed == 0
    assert cfg.window.n_in == 5
    assert cfg.plausibility.speed_max_kmh == 40.0


def test_unknown_top_level_key_rejected():
    with pytest.raises(ConfigError, match="unknown key"):
        config_from_dict({"sede": 3})


def test_unknown_nested_key_rejected():
    with pytest.raises(ConfigError, match="plausibility"):
        config_from_dict({"plausibility": {"speed_max": 40}})


def test_unknown_model_kind_rejected():
    with pytest.raises(ConfigError, match="unknown model kind"):
        config_from_dict({"models": {"catboost": {}}})


def test_unknown_model_hyperparameter_rejected():
    with pytest.raises(ConfigError, match="models.logit"):
        config_from_dict({"models": {"logit": {"learning_rate": 0.5}}})


def test_invalid_imputation_rejected():
    with pytest.raises(ConfigError, match="imputation"):
        config_from_dict({"imputation": "mode"})


def test_window_section_round_trips():
    cfg = config_from_dict({"window": {"n_in": 7, "n_out": 3, "features": ["TL", "GPS"]}})
    assert cfg.window.n_in == 7
    assert cfg.window.features == ("TL", "GPS")


def test_config_snapshot_is_json_serializable():
    cfg = config_from_dict({"zones": {"max_hr_bpm": {"p1": 198}}})
    snapshot = config_snapshot(cfg)
    json.dumps(snapshot)
    assert snapshot["zones"]["max_hr_bpm"] == {"p1": 198}


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="does not exist"):
        load_config(tmp_path / "nope.json")


# ---------------------------------------------------------------------------
# CLI stages
# ---------------------------------------------------------------------------

def write_config(cfg, path: Path) -> Path:
    path.write_text(json.dumps(config_snapshot(cfg)), encoding="utf-8")
    return path


def test_cli_exit_codes(tmp_path, raw_corpus):
    root, _ = raw_corpus
    cfg = config_for(root, tmp_path / "out")
    config_path = write_config(cfg, tmp_path / "config.json")

    # stage out of order -> exit 1 naming the prerequisite
    assert main(["build-windows", "--config", str(config_path)]) == 1
    # bad config -> exit 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"nope": 1}')
    assert main(["preprocess", "--config", str(bad)]) == 2
    # happy path
    assert main(["preprocess", "--config", str(config_path)]) == 0
    assert main(["build-windows", "--config", str(config_path)]) == 0
    assert main(["synth", "--config", str(config_path)]) == 0
    assert main(["train", "--config", str(config_path), "--model", "logit"]) == 0
    assert main(["evaluate", "--config", str(config_path), "--model", "logit"]) == 0
    assert main(["grid", "--config", str(config_path), "--cells", "I-1"]) == 0
    results = json.loads((Path(cfg.paths.results_dir) / "results.json").read_text())
    assert [c["id"] for c in results["cells"]] == ["I-1"]


def test_unknown_cell_id_fails(tmp_path, raw_corpus):
    root, _ = raw_corpus
    cfg = config_for(root, tmp_path / "out")
    config_path = write_config(cfg, tmp_path / "config.json")
    assert main(["preprocess", "--config", str(config_path)]) == 0
    assert main(["grid", "--config", str(config_path), "--cells", "I-999"]) == 1


def test_build_windows_rerun_is_byte_identical_with_cache_hit(tmp_path, raw_corpus):
    root, _ = raw_corpus
    cfg = config_for(root, tmp_path / "out")
    pipeline.preprocess(cfg)
    pipeline.build_windows_stage(cfg)
    windows_path = Path(cfg.paths.windows_path)
    first = windows_path.read_bytes()
    manifest_path = windows_path.parent / "manifest_build_windows.json"
    assert json.loads(manifest_path.read_text())["cache_hit"] is False
    pipeline.build_windows_stage(cfg)
    assert windows_path.read_bytes() == first
    assert json.loads(manifest_path.read_text())["cache_hit"] is True


def test_stage_manifests_written(pipeline_outputs):
    cfg, _, _ = pipeline_outputs
    store_manifest = Path(cfg.paths.store_path).parent / "manifest_preprocess.json"
    data = json.loads(store_manifest.read_text())
    assert data["command"] == "preprocess"
    assert set(data["inputs"]) == {
        "subjective_dir", "gps_dir", "match_csv", "injuries_csv", "roster_csv"
    }
    assert all("sha256" in v for v in data["inputs"].values())
    assert "versions" in data and "elapsed_s" in data


# ---------------------------------------------------------------------------
# HTTP service
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def server(pipeline_outputs):
    cfg, info, model_path = pipeline_outputs
    server = make_server(
        cfg.paths.store_path,
        results_path=None,
        models_dir=cfg.paths.models_dir,
        port=0,
    )
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server, cfg, info, model_path
    server.shutdown()


def http_get(server, path):
    base = f"http://127.0.0.1:{server.server_address[1]}"
    try:
        with urllib.request.urlopen(base + path) as response:
            return response.status, json.loads(response.read())
    except urllib.error.HTTPError as error:
        return error.code, json.loads(error.read())


def http_post(server, path, body):
    base = f"http://127.0.0.1:{server.server_address[1]}"
    request = urllib.request.Request(
        base + path, data=json.dumps(body).encode(),
        headers={"Content-Type": "application/json"}, method="POST",
    )
    try:
        with urllib.request.urlopen(request) as response:
            return response.status, json.loads(response.read())
    except urllib.error.HTTPError as error:
        return error.code, json.loads(error.read())


def test_players_endpoint(server):
    srv, cfg, info, _ = server
    status, payload = http_get(srv, "/players")
    assert status == 200
    assert payload == info["players"]


def test_sessions_endpoint_filters(server):
    srv, cfg, info, _ = server
    player = info["players"][0]
    status, payload = http_get(srv, f"/sessions?player={player}")
    assert status == 200
    assert [s["date"] for s in payload] == info["sessions"][player]
    dates = info["sessions"][player]
    status, windowed = http_get(
        srv, f"/sessions?player={player}&from={dates[2]}&to={dates[5]}"
    )
    assert [s["date"] for s in windowed] == dates[2:6]


def test_features_endpoint_matches_store_scan(server):
    srv, cfg, info, _ = server
    player = info["players"][0]
    status, payload = http_get(srv, f"/features/acwr?player={player}")
    assert status == 200
    # direct store-scan oracle
    store = read_store(cfg.paths.store_path)
    expected = [
        {"date": r.date.isoformat(), "value": r.numeric["acwr"]}
        for r in store.records
        if r.player == player
    ]
    assert payload["series"] == expected
    assert payload["kind"] == "numeric"
    assert payload["injury_dates"] == sorted(
        d.isoformat() for d in store.injury_dates(player)
    )


def test_categorical_feature_kind(server):
    srv, cfg, info, _ = server
    player = info["players"][0]
    status, payload = http_get(srv, f"/features/body_region?player={player}")
    assert status == 200
    assert payload["kind"] == "categorical"


def test_injuries_endpoint_team_and_player(server):
    srv, cfg, info, _ = server
    status, team = http_get(srv, "/injuries")
    assert status == 200
    store = read_store(cfg.paths.store_path)
    expected_count = sum(r.injury for r in store.records) + len(store.off_session_injuries)
    assert len(team) == expected_count
    player = info["players"][0]
    status, mine = http_get(srv, f"/injuries?player={player}")
    assert all(e["player"] == player for e in mine)


def test_unknown_player_and_feature_404(server):
    srv, *_ = server
    assert http_get(srv, "/features/acwr?player=zz")[0] == 404
    assert http_get(srv, "/features/nope?player=p01")[0] == 404
    assert http_get(srv, "/nope")[0] == 404


def test_predict_roundtrip_and_errors(server):
    srv, cfg, info, model_path = server
    model = load_model(model_path)
    model_id = model_path.stem
    bases = base_feature_names(model)
    store = read_store(cfg.paths.store_path)
    player = info["players"][0]
    rows = [r for r in store.records if r.player == player][-model.n_in:]
    sessions = [{b: r.numeric[b] for b in bases} for r in rows]

    status, payload = http_post(srv, "/predict", {"model_id": model_id, "sessions": sessions})
    assert status == 200
    assert 0.0 <= payload["score"] <= 1.0
    assert payload["threshold"] == 0.5
    assert payload["class"] == int(payload["score"] > 0.5)

    status, _ = http_post(srv, "/predict", {"model_id": model_id,
                                            "sessions": sessions[:-1]})
    assert status == 422
    status, error = http_post(srv, "/predict", {"model_id": "model_none_000",
                                                "sessions": sessions})
    assert status == 404
    status, error = http_post(srv, "/predict", {"sessions": sessions})
    assert status == 400
    assert "model_id" in error["error"]
    broken = [dict(s) for s in sessions]
    del broken[0][bases[0]]
    status, error = http_post(srv, "/predict", {"model_id": model_id, "sessions": broken})
    assert status == 400
    assert bases[0] in error["error"]


def test_predict_scores_match_direct_model_call(server):
    srv, cfg, info, model_path = server
    from injurylab.models import score

    model = load_model(model_path)
    bases = base_feature_names(model)
    store = read_store(cfg.paths.store_path)
    player = info["players"][1]
    rows = [r for r in store.records if r.player == player][: model.n_in]
    sessions = [{b: r.numeric[b] for b in bases} for r in rows]
    status, payload = http_post(
        srv, "/predict", {"model_id": model_path.stem, "sessions": sessions}
    )
    x = np.array([[r.numeric[b] for r in rows] for b in bases]).reshape(1, -1)
    assert payload["score"] == pytest.approx(float(score(model, x)[0]), abs=1e-12)


def test_experiments_endpoints(pipeline_outputs, tmp_path):
    cfg, info, model_path = pipeline_outputs
    pipeline.grid_stage(cfg, cells=["I-1"])
    state_results = Path(cfg.paths.results_dir) / "results.json"
    state = ApiState(
        read_store(cfg.paths.store_path),
        results_path=state_results,
        models_dir=Path(cfg.paths.models_dir),
    )
    experiments = route(state, "GET", "/experiments", {})
    assert [e["id"] for e in experiments] == ["I-1"]
    assert set(experiments[0]["mean"]) == {"precision", "tpr", "tnr", "f1", "auc"}
    detail = route(state, "GET", "/experiments/I-1", {})
    assert detail["id"] == "I-1"
    assert "mean_roc" in detail and len(detail["rounds"]) == cfg.grid.rounds
    assert all(m["kind"] == detail["config"]["model"] for m in detail["models"])
    with pytest.raises(ApiError) as err:
        route(state, "GET", "/experiments/I-999", {})
    assert err.value.status == 404


def test_golden_payload_shapes(server):
    """Schema stability: exact key sets per endpoint."""
    srv, cfg, info, _ = server
    _, sessions = http_get(srv, f"/sessions?player={info['players'][0]}")
    assert set(sessions[0]) == {"player", "date", "session_type", "injury"}
    _, injuries = http_get(srv, "/injuries")
    assert set(injuries[0]) == {
        "player", "date", "cause", "activity", "area", "body_region", "off_session"
    }
    _, series = http_get(srv, f"/features/acwr?player={info['players'][0]}")
    assert set(series) == {"feature", "kind", "player", "series", "injury_dates"}


def test_service_never_mutates_store(server):
    srv, cfg, info, _ = server
    store_path = Path(cfg.paths.store_path)
    before = store_path.read_bytes()
    http_get(srv, "/players")
    http_get(srv, f"/features/acwr?player={info['players'][0]}")
    assert store_path.read_bytes() == before


def test_static_dir_serving(tmp_path, pipeline_outputs):
    cfg, *_ = pipeline_outputs
    static = tmp_path / "static"
    static.mkdir()
    (static / "index.html").write_text("<html>dash</html>")
    server = make_server(cfg.paths.store_path, static_dir=static, port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        base = f"http://127.0.0.1:{server.server_address[1]}"
        with urllib.request.urlopen(base + "/") as response:
            assert b"dash" in response.read()
    finally:
        server.shutdown()

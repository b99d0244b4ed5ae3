from pathlib import Path

import pytest

from injurylab.config import GlobalConfig, PathsConfig
from injurylab.evaluation import GridSpec
from injurylab.simdata import make_raw_corpus, make_store_fixture
from injurylab.windowing import WindowSpec


@pytest.fixture(scope="session")
def raw_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    info = make_raw_corpus(
        root, n_players=6, sessions_per_player=25, n_injuries=10, seed=5,
        gps_rows_per_session=40,
    )
    return root, info


def config_for(root: Path, out: Path) -> GlobalConfig:
    cfg = GlobalConfig()
    cfg.paths = PathsConfig(
        subjective_dir=str(root / "subjective"),
        gps_dir=str(root / "gps"),
        match_csv=str(root / "match_stats.csv"),
        injuries_csv=str(root / "injuries.csv"),
        roster_csv=str(root / "roster.csv"),
        store_path=str(out / "store.csv"),
        windows_path=str(out / "windows.csv"),
        rounds_dir=str(out / "rounds"),
        results_dir=str(out / "results"),
        models_dir=str(out / "models"),
    )
    cfg.window = WindowSpec(n_in=3, n_out=1, rounds=2, seed=11)
    cfg.grid = GridSpec(inputs=(3,), outputs=(1,), proportions=(0.5,), rounds=2, seed=11)
    return cfg


@pytest.fixture(scope="session")
def pipeline_outputs(raw_corpus, tmp_path_factory):
    """One preprocessed corpus shared by store/window/service tests."""
    from injurylab import pipeline

    root, info = raw_corpus
    out = tmp_path_factory.mktemp("out")
    cfg = config_for(root, out)
    pipeline.preprocess(cfg)
    pipeline.build_windows_stage(cfg)
    pipeline.synth_stage(cfg)
    model_path = pipeline.train_stage(cfg, "logit")
    return cfg, info, model_path


@pytest.fixture(scope="session")
def window_store():
    return make_store_fixture(n_players=8, total_sessions=400, n_injuries=12, seed=77)

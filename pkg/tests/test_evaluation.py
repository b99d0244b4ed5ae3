import itertools
import json

import numpy as np
import pytest

from injurylab.evaluation import (
    ConfusionMatrix,
    EvaluationError,
    ExperimentConfig,
    ExperimentResult,
    GridSpec,
    RocCurve,
    RoundMetrics,
    confusion,
    f1,
    mean_roc,
    percent_change,
    precision,
    render_results_csv,
    roc,
    tnr,
    tpr,
)


# ---------------------------------------------------------------------------
# confusion metrics
# ---------------------------------------------------------------------------

def test_perfect_predictions():
    cm = confusion([0, 1, 1, 0], [0, 1, 1, 0])
    assert (precision(cm), tpr(cm), tnr(cm), f1(cm)) == (1.0, 1.0, 1.0, 1.0)


def test_all_negative_predictions_degenerate_rules():
    cm = confusion([1, 1, 0, 0], [0, 0, 0, 0])
    assert precision(cm) == 0.0  # 0/0 -> 0
    assert tpr(cm) == 0.0
    assert f1(cm) == 0.0
    assert tnr(cm) == 1.0


def test_hand_computed_matrix():
    cm = ConfusionMatrix(tp=6, fp=3, tn=87, fn=4)
    assert precision(cm) == pytest.approx(0.667, abs=1e-3)
    assert tpr(cm) == pytest.approx(0.600, abs=1e-3)
    assert f1(cm) == pytest.approx(0.632, abs=1e-3)


def test_confusion_counts_sum_to_total():
    rng = np.random.default_rng(0)
    y_true = rng.integers(0, 2, 50)
    y_pred = rng.integers(0, 2, 50)
    cm = confusion(y_true, y_pred)
    assert cm.total == 50


def test_length_mismatch_raises():
    with pytest.raises(EvaluationError, match="equal lengths"):
        confusion([1, 0], [1])


def test_f1_swap_invariance_only_when_precision_equals_tpr():
    # fp == fn means precision == tpr, so swapping them cannot change f1
    symmetric = ConfusionMatrix(tp=6, fp=4, tn=80, fn=4)
    assert precision(symmetric) == tpr(symmetric)
    assert f1(symmetric) == pytest.approx(f1(ConfusionMatrix(tp=6, fp=4, tn=80, fn=4)))
    # with fp != fn the swap changes precision and tpr but f1 is the harmonic
    # mean of both, which is symmetric in them: verify via the formula
    asymmetric = ConfusionMatrix(tp=6, fp=2, tn=80, fn=6)
    flipped = ConfusionMatrix(tp=6, fp=6, tn=80, fn=2)
    assert precision(asymmetric) != tpr(asymmetric)
    p1, r1 = precision(asymmetric), tpr(asymmetric)
    p2, r2 = precision(flipped), tpr(flipped)
    assert (p1, r1) == (r2, p2)
    assert f1(asymmetric) == pytest.approx(2 * p1 * r1 / (p1 + r1))
    assert f1(flipped) == pytest.approx(f1(asymmetric))  # harmonic mean is symmetric


def test_percent_change():
    assert percent_change(0.011, 0.021) == pytest.approx(90.9, abs=0.1)


# ---------------------------------------------------------------------------
# ROC / AUC
# ---------------------------------------------------------------------------

def pairwise_auc(y_true, scores):
    """O(n^2) oracle: fraction of (pos, neg) pairs correctly ordered, ties 0.5."""
    pos = [s for s, y in zip(scores, y_true) if y == 1]
    neg = [s for s, y in zip(scores, y_true) if y == 0]
    total = 0.0
    for p, n in itertools.product(pos, neg):
        if p > n:
            total += 1.0
        elif p == n:
            total += 0.5
    return total / (len(pos) * len(neg))


def test_uninformative_scores_give_diagonal():
    curve = roc([0, 1, 0, 1], [0.5, 0.5, 0.5, 0.5])
    assert curve.auc == pytest.approx(0.5)
    assert curve.points.tolist() == [[0.0, 0.0], [1.0, 1.0]]


def test_perfect_separation_auc_one():
    curve = roc([0, 0, 1, 1], [0.1, 0.2, 0.8, 0.9])
    assert curve.auc == pytest.approx(1.0)


def test_trapezoid_equals_pairwise_oracle_with_ties():
    rng = np.random.default_rng(14)
    for _ in range(30):
        n = int(rng.integers(12, 200))
        y = rng.integers(0, 2, n)
        if y.sum() in (0, n):
            y[0] = 1 - y[0]
        scores = np.round(rng.random(n), 2)  # coarse grid forces ties
        curve = roc(y, scores)
        assert curve.auc == pytest.approx(pairwise_auc(y, scores), abs=1e-9)


def test_single_class_raises():
    with pytest.raises(EvaluationError, match="positive and one negative"):
        roc([1, 1], [0.3, 0.6])


def test_roc_endpoints_and_monotone_fpr():
    rng = np.random.default_rng(5)
    y = rng.integers(0, 2, 40)
    y[0], y[1] = 0, 1
    curve = roc(y, rng.random(40))
    assert curve.points[0].tolist() == [0.0, 0.0]
    assert curve.points[-1].tolist() == [1.0, 1.0]
    assert np.all(np.diff(curve.points[:, 0]) >= 0)


def test_mean_roc_single_curve_is_interpolation_only():
    curve = roc([0, 1, 0, 1, 1], [0.2, 0.9, 0.4, 0.7, 0.1])
    averaged = mean_roc([curve])
    from injurylab.evaluation import FPR_GRID, _tpr_at

    assert averaged.points[:, 1] == pytest.approx(_tpr_at(curve, FPR_GRID))


def test_mean_roc_diagonal_plus_perfect():
    diagonal = roc([0, 1], [0.5, 0.5])
    perfect = roc([0, 1], [0.1, 0.9])
    averaged = mean_roc([diagonal, perfect])
    assert averaged.points[0, 1] == pytest.approx(0.5)  # TPR at FPR 0
    assert averaged.points[-1, 1] == pytest.approx(1.0)


def test_mean_roc_identical_curves():
    curve = roc([0, 1, 1, 0], [0.3, 0.8, 0.6, 0.5])
    averaged = mean_roc([curve, curve, curve])
    single = mean_roc([curve])
    assert averaged.points == pytest.approx(single.points)
    assert averaged.auc == pytest.approx(single.auc)


# ---------------------------------------------------------------------------
# rendering and the grid enumeration
# ---------------------------------------------------------------------------

def result_with(cfg_id, means, config=None):
    cfg = config or ExperimentConfig(
        id=cfg_id, event_proportion=0.5, n_in=3, n_out=7,
        features=("TL", "W", "GPS"), model="randomforest", rounds=1, seed=0,
    )
    rounds = [
        RoundMetrics(
            precision=means["precision"], tpr=means["tpr"], tnr=means.get("tnr", 0.9),
            f1=means["f1"], auc=means["auc"],
            confusion=ConfusionMatrix(1, 1, 1, 1),
            roc=RocCurve(points=np.array([[0.0, 0.0], [1.0, 1.0]]), auc=means["auc"]),
        )
    ]
    return ExperimentResult(config=cfg, rounds=rounds,
                            mean_curve=RocCurve(np.array([[0.0, 0.0], [1.0, 1.0]]),
                                                means["auc"]))


def test_results_csv_reproduces_published_row_layout():
    result = result_with(
        "I-58", {"precision": 0.623, "tpr": 0.014, "f1": 0.027, "auc": 0.618}
    )
    text = render_results_csv([result])
    lines = text.splitlines()
    assert lines[0] == "ID,Data,Event,Input,Output,Features,Model,Prec,TPR,F1,AUC"
    assert lines[1] == 'I-58,R+S,0.5,3.0,7.0,"TL,W,GPS",randomforest,0.623,0.014,0.027,0.618'


def test_grid_enumeration_counts():
    grid = GridSpec()
    cells = grid.cells()
    assert len(cells) == 135  # 3 x 3 x 3 x 5
    assert cells[0].id == "I-1"
    assert cells[-1].id == "I-135"
    # 135 cells x 30 rounds = 4050 model instances
    assert sum(c.rounds for c in cells) == 4050


def test_grid_id_pattern_matches_published_table():
    # with the two published proportions the table's IDs must reproduce
    grid = GridSpec(proportions=(0.25, 0.5))
    by_id = {c.id: c for c in grid.cells()}
    i26 = by_id["I-26"]
    assert (i26.event_proportion, i26.n_in, i26.n_out, i26.model) == (0.25, 5, 7, "logit")
    i56 = by_id["I-56"]
    assert (i56.event_proportion, i56.n_in, i56.n_out, i56.model) == (0.5, 3, 7, "logit")
    i57 = by_id["I-57"]
    assert i57.model == "lstm"
    i58 = by_id["I-58"]
    assert i58.model == "randomforest"
    i70 = by_id["I-70"]
    assert (i70.event_proportion, i70.n_in, i70.n_out, i70.model) == (0.5, 5, 3, "xgboost")
    i71 = by_id["I-71"]
    assert (i71.n_in, i71.n_out, i71.model) == (5, 7, "logit")
    i75 = by_id["I-75"]
    assert (i75.n_in, i75.n_out, i75.model) == (5, 7, "xgboost")


def test_mean_within_round_bounds():
    cfg = ExperimentConfig(
        id="I-1", event_proportion=0.5, n_in=3, n_out=1,
        features=("TL",), model="logit", rounds=2, seed=0,
    )
    rounds = [
        RoundMetrics(precision=0.2, tpr=0.4, tnr=0.6, f1=0.3, auc=0.5,
                     confusion=ConfusionMatrix(1, 1, 1, 1),
                     roc=RocCurve(np.array([[0.0, 0.0], [1.0, 1.0]]), 0.5)),
        RoundMetrics(precision=0.6, tpr=0.8, tnr=0.7, f1=0.5, auc=0.9,
                     confusion=ConfusionMatrix(1, 1, 1, 1),
                     roc=RocCurve(np.array([[0.0, 0.0], [1.0, 1.0]]), 0.9)),
    ]
    result = ExperimentResult(config=cfg, rounds=rounds,
                              mean_curve=RocCurve(np.array([[0.0, 0.0], [1.0, 1.0]]), 0.7))
    result.check_bounds()
    for name in ("precision", "tpr", "tnr", "f1", "auc"):
        values = [getattr(r, name) for r in rounds]
        assert min(values) <= result.mean(name) <= max(values)


# ---------------------------------------------------------------------------
# run_round
# ---------------------------------------------------------------------------

def write_round(tmp_path, train_rows, test_rows, names):
    import csv

    round_dir = tmp_path / "round_0"
    round_dir.mkdir(parents=True, exist_ok=True)
    for name, rows in (("train.csv", train_rows), ("test.csv", test_rows)):
        with open(round_dir / name, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(names + ["label", "provenance"])
            writer.writerows(rows)
    return round_dir


def separable_rows(n, label_fn, seed=0):
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(n):
        x = float(rng.uniform(-2, 2))
        rows.append([str(x), str(0.5 * x), str(label_fn(x)), "real"])
    return rows


def test_run_round_perfectly_separable_auc_one(tmp_path):
    from injurylab.evaluation import run_round

    label = lambda x: int(x > 0)
    round_dir = write_round(
        tmp_path,
        separable_rows(120, label, seed=1),
        separable_rows(40, label, seed=2),
        ["a_1", "b_1"],
    )
    metrics = run_round(round_dir, "logit", 1, seed=3, round_index=0)
    assert metrics.auc == pytest.approx(1.0)


def test_run_round_deterministic(tmp_path):
    from injurylab.evaluation import run_round

    label = lambda x: int(x + 0.3 > 0)
    round_dir = write_round(
        tmp_path,
        separable_rows(80, label, seed=5),
        separable_rows(30, label, seed=6),
        ["a_1", "b_1"],
    )
    first = run_round(round_dir, "xgboost", 1, seed=3, round_index=4)
    second = run_round(round_dir, "xgboost", 1, seed=3, round_index=4)
    assert first.auc == second.auc
    assert first.confusion == second.confusion


def test_run_round_single_class_test_error_carries_round_tag(tmp_path):
    from injurylab.evaluation import run_round

    train = separable_rows(60, lambda x: int(x > 0), seed=7)
    test = [[str(v), str(v), "0", "real"] for v in (0.1, 0.2, 0.3)]
    round_dir = write_round(tmp_path, train, test, ["a_1", "b_1"])
    with pytest.raises(EvaluationError, match=r"round 6"):
        run_round(round_dir, "logit", 1, seed=3, round_index=6)


def test_grid_records_failed_cells_and_continues(tmp_path, window_store):
    from injurylab.evaluation import run_grid

    # n_in=40 yields no admissible windows for 50-session players under the
    # span constraints, so those cells fail while the n_in=3 cells succeed
    grid = GridSpec(inputs=(3, 40), outputs=(1,), proportions=(0.5,),
                    models=("logit",), rounds=2, seed=1)
    outcome = run_grid(window_store, grid, tmp_path / "results")
    assert len(outcome.results) == 1
    assert len(outcome.failures) == 1
    assert not outcome.ok
    failed_id = next(iter(outcome.failures))
    report = json.loads((tmp_path / "results" / "results.json").read_text())
    assert failed_id in report["failures"]
    succeeded = {c["id"] for c in report["cells"]}
    assert failed_id not in succeeded and len(succeeded) == 1

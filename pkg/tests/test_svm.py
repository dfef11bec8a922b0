"""SVM training invariants, multiclass wrappers, selection, persistence."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from noisefp.errors import DataFormatError, InvalidArgumentError
from noisefp.kernels import gram, linear, poly, rbf
from noisefp.svm import (DEFAULT_C_GRID, Candidate, OvaModel, OvoModel,
                         SelectionReport, SvmModel, accuracy, decision_function,
                         default_candidates, default_kernels, dual_objective,
                         kkt_violation, load_model, model_select, predict,
                         predict_ova, predict_ovo, save_model, solve,
                         train_binary, train_ova, train_ovo)
from noisefp.svm import _vote

XOR_X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
XOR_Y = np.array([-1.0, -1.0, 1.0, 1.0])


def _blobs(n_per_class, centers, spread=0.3, seed=0):
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=np.float64)
    x = np.concatenate([
        c + spread * rng.normal(size=(n_per_class, centers.shape[1]))
        for c in centers
    ])
    labels = np.repeat(np.arange(len(centers)), n_per_class)
    return x, labels


# ---------------------------------------------------------------------------
# analytic and hand-checkable cases
# ---------------------------------------------------------------------------


def test_two_point_analytic_solution():
    x = np.array([[-1.0], [1.0]])
    y = np.array([-1.0, 1.0])
    model = train_binary(x, y, linear(), c=10.0)
    # maximum margin between -1 and +1: boundary at 0, both points support
    # the margin with alpha = 0.5 each
    assert model.support_vectors.shape == (2, 1)
    assert np.allclose(np.sort(model.dual_coef), [-0.5, 0.5], atol=1e-12)
    assert abs(model.bias) <= 1e-12
    assert model.converged
    assert predict(model, np.array([0.5])) == 1
    assert predict(model, np.array([-0.5])) == -1
    assert predict(model, np.array([0.0])) == 1  # exact zero maps to +1
    assert np.allclose(decision_function(model, np.array([[0.25], [-2.0]])),
                       [0.25, -2.0], atol=1e-9)


def test_xor_rbf_separates():
    model = train_binary(XOR_X, XOR_Y, rbf(1.0), c=10.0)
    assert model.converged
    assert np.array_equal(predict(model, XOR_X), XOR_Y.astype(int))


def test_separable_large_c_has_no_training_errors():
    x, labels = _blobs(20, [[-2.0, 0.0], [2.0, 0.0]], seed=1)
    y = np.where(labels == 0, -1.0, 1.0)
    for kernel in (linear(), poly(3, gamma=0.5, coef0=1.0), rbf(0.5)):
        model = train_binary(x, y, kernel, c=100.0)
        assert accuracy(predict(model, x), y.astype(int)) == 1.0


# ---------------------------------------------------------------------------
# dual-solver invariants
# ---------------------------------------------------------------------------


def _solver_cases():
    rng = np.random.default_rng(42)
    for c in (0.5, 10.0):
        for kernel in (linear(), rbf(1.0), poly(2, gamma=0.5, coef0=1.0)):
            x = rng.normal(size=(24, 3))
            y = np.where(rng.random(24) < 0.5, 1.0, -1.0)
            y[:2] = (1.0, -1.0)  # both classes present
            yield x, y, kernel, c


def test_dual_feasibility_and_kkt():
    tol = 1e-3
    for x, y, kernel, c in _solver_cases():
        g = gram(x, kernel)
        alpha, b, _, converged = solve(g, y, c, tol=tol)
        assert alpha.min() >= 0.0 and alpha.max() <= c
        assert abs(alpha @ y) <= 1e-8
        assert alpha.max() > 0.0
        if converged:
            assert kkt_violation(g, y, alpha, b, c) <= tol + 1e-12
            # the three KKT branches, spelled out
            margins = y * ((alpha * y) @ g + b)
            assert np.all(margins[alpha <= 0.0] >= 1.0 - tol - 1e-12)
            free = (alpha > 0.0) & (alpha < c)
            assert np.all(np.abs(margins[free] - 1.0) <= tol + 1e-12)
            assert np.all(margins[alpha >= c] <= 1.0 + tol + 1e-12)


def test_dual_objective_nondecreasing_over_accepted_updates():
    for x, y, kernel, c in _solver_cases():
        g = gram(x, kernel)
        trace: list = []
        alpha, _, _, _ = solve(g, y, c, trace=trace)
        assert len(trace) > 0
        values = np.array(trace)
        assert np.all(np.diff(values) >= -1e-9 * np.maximum(1.0, np.abs(values[:-1])))
        assert np.isclose(values[-1], dual_objective(g, y, alpha), atol=1e-9)


def test_duplicating_a_training_point_keeps_predictions():
    x, labels = _blobs(15, [[-2.0, -1.0], [2.0, 1.0]], seed=3)
    y = np.where(labels == 0, -1.0, 1.0)
    held_out, _ = _blobs(40, [[-2.0, -1.0], [2.0, 1.0]], seed=99)
    for kernel in (linear(), rbf(0.5)):
        base = train_binary(x, y, kernel, c=10.0)
        for dup in (0, 7, 29):
            x2 = np.vstack([x, x[dup]])
            y2 = np.append(y, y[dup])
            doubled = train_binary(x2, y2, kernel, c=10.0)
            assert np.array_equal(predict(base, held_out), predict(doubled, held_out))


def test_nonconvergence_returns_best_iterate():
    rng = np.random.default_rng(9)
    x = rng.normal(size=(30, 2))  # heavily overlapping classes
    y = np.where(rng.random(30) < 0.5, 1.0, -1.0)
    y[:2] = (1.0, -1.0)
    model = train_binary(x, y, rbf(0.1), c=100.0, max_total_sweeps=2)
    assert not model.converged
    assert model.sweeps <= 2
    assert np.isfinite(model.bias)
    assert np.all(np.isfinite(model.dual_coef))


# ---------------------------------------------------------------------------
# input validation
# ---------------------------------------------------------------------------


def test_single_class_rejected():
    x = np.zeros((4, 2))
    with pytest.raises(InvalidArgumentError):
        train_binary(x, np.ones(4), linear(), c=1.0)
    with pytest.raises(InvalidArgumentError):
        train_ovo(x, np.zeros(4, dtype=int), linear(), c=1.0)
    with pytest.raises(InvalidArgumentError):
        train_ova(x, np.zeros(4, dtype=int), linear(), c=1.0)


def test_label_and_shape_validation():
    x = np.array([[0.0], [1.0]])
    with pytest.raises(InvalidArgumentError):
        train_binary(x, np.array([0.0, 1.0]), linear(), c=1.0)  # not in {-1, +1}
    with pytest.raises(InvalidArgumentError):
        train_binary(x, np.array([1.0, -1.0, 1.0]), linear(), c=1.0)
    with pytest.raises(InvalidArgumentError):
        train_binary(x.ravel(), np.array([1.0, -1.0]), linear(), c=1.0)
    with pytest.raises(InvalidArgumentError):
        train_ovo(x, np.array([0, 2]), linear(), c=1.0)  # gap in class ids
    with pytest.raises(InvalidArgumentError):
        train_binary(x, np.array([1.0, -1.0]), linear(), c=-1.0)


def test_prediction_dimension_mismatch():
    model = train_binary(np.array([[-1.0, 0.0], [1.0, 0.0]]),
                         np.array([-1.0, 1.0]), linear(), c=1.0)
    with pytest.raises(InvalidArgumentError):
        predict(model, np.zeros((3, 5)))


# ---------------------------------------------------------------------------
# multiclass
# ---------------------------------------------------------------------------


def test_ovo_vote_majority_and_ties():
    pairs = ((0, 1), (0, 2), (1, 2))
    # class 0 wins both its pairs: votes (2, 1, 0)
    dec = np.array([[0.8], [0.4], [0.6]])
    assert _vote(dec, pairs, 3)[0] == 0
    # 1-1-1 vote tie: summed |decision| strength picks class 0
    dec = np.array([[0.9], [-0.5], [0.3]])
    assert _vote(dec, pairs, 3)[0] == 0
    # full tie on votes and strength: lowest class id
    dec = np.array([[0.5], [-0.5], [0.5]])
    assert _vote(dec, pairs, 3)[0] == 0


def test_ovo_on_three_blobs():
    x, labels = _blobs(12, [[-3.0, 0.0], [3.0, 0.0], [0.0, 3.0]], seed=5)
    ovo = train_ovo(x, labels, rbf(0.5), c=10.0)
    assert ovo.class_pairs == ((0, 1), (0, 2), (1, 2))
    assert len(ovo.models) == 3
    assert accuracy(predict_ovo(ovo, x), labels) == 1.0
    assert predict_ovo(ovo, x[0]) == 0  # single-example path


def test_ova_on_three_blobs():
    x, labels = _blobs(12, [[-3.0, 0.0], [3.0, 0.0], [0.0, 3.0]], seed=6)
    ova = train_ova(x, labels, rbf(0.5), c=10.0)
    assert len(ova.models) == 3
    assert accuracy(predict_ova(ova, x), labels) == 1.0
    assert predict_ova(ova, x[-1]) == 2


def test_ovo_pair_orientation():
    # for pair (a, b) the +1 side is class a
    x = np.array([[-1.0], [-0.9], [1.0], [0.9]])
    ovo = train_ovo(x, np.array([0, 0, 1, 1]), linear(), c=10.0)
    assert predict(ovo.models[0], np.array([-1.0])) == 1


# ---------------------------------------------------------------------------
# model selection
# ---------------------------------------------------------------------------


def _selection_data(seed=7):
    x, labels = _blobs(16, [[-2.0, 0.0], [2.0, 0.0]], seed=seed)
    rng = np.random.default_rng(seed + 1)
    order = rng.permutation(labels.size)
    x, labels = x[order], labels[order]
    return (x[:16], labels[:16]), (x[16:24], labels[16:24]), (x[24:], labels[24:])


def test_default_candidates_cover_grid():
    cands = default_candidates(8)
    kernels = default_kernels(8)
    assert len(cands) == len(kernels) * len(DEFAULT_C_GRID)
    assert [c.name for c in cands[:4]] == [
        f"linear C={c:g}" for c in DEFAULT_C_GRID
    ]
    assert kernels[0].kind == "linear"
    assert [k.degree for k in kernels[1:4]] == [2, 3, 4]
    assert [k.gamma for k in kernels[4:]] == [1.0 / 8, 1.0, 10.0]
    with pytest.raises(InvalidArgumentError):
        default_candidates(8, c_grid=(0.0,))


def test_model_select_binary():
    train, val, test = _selection_data()
    report = model_select(train, val, test)
    assert report.class_strategy == "binary"
    assert report.n_classes == 2
    assert report.chosen.val_accuracy == max(
        r.val_accuracy for r in report.results if r.val_accuracy is not None
    )
    assert report.test_accuracy >= 0.9
    assert isinstance(report.chosen_model, SvmModel)
    # chosen model reproduces the reported test accuracy
    x_test, l_test = test
    redo = np.where(predict(report.chosen_model, x_test) == 1, 1, 0)
    assert accuracy(redo, l_test) == report.test_accuracy


def test_model_select_tie_goes_to_earlier_candidate():
    train, val, test = _selection_data()
    twin = [Candidate(name="a", kernel=linear(), C=10.0),
            Candidate(name="b", kernel=linear(), C=10.0)]
    report = model_select(train, val, test, candidates=twin)
    assert report.results[0].val_accuracy == report.results[1].val_accuracy
    assert report.chosen_index == 0


@pytest.mark.parametrize("multiclass,model_type", [("ovo", OvoModel), ("ova", OvaModel)])
def test_model_select_multiclass(multiclass, model_type):
    x, labels = _blobs(10, [[-3.0, 0.0], [3.0, 0.0], [0.0, 3.0]], seed=8)
    rng = np.random.default_rng(0)
    order = rng.permutation(labels.size)
    x, labels = x[order], labels[order]
    parts = ((x[:14], labels[:14]), (x[14:22], labels[14:22]), (x[22:], labels[22:]))
    report = model_select(*parts, multiclass=multiclass,
                          candidates=[Candidate("rbf", rbf(0.5), 10.0)])
    assert report.class_strategy == multiclass
    assert report.n_classes == 3
    assert isinstance(report.chosen_model, model_type)


def test_model_select_validation_errors():
    train, val, test = _selection_data()
    with pytest.raises(InvalidArgumentError):
        model_select(train, (val[0][:, :1], val[1]), test)
    bad_labels = val[1].copy()
    bad_labels[0] = 5
    with pytest.raises(InvalidArgumentError):
        model_select(train, (val[0], bad_labels), test)
    x3, l3 = _blobs(4, [[-3.0, 0.0], [3.0, 0.0], [0.0, 3.0]], seed=2)
    with pytest.raises(InvalidArgumentError):
        model_select((x3, l3), (x3, l3), (x3, l3), multiclass="tournament",
                     candidates=[Candidate("x", linear(), 1.0)])
    with pytest.raises(InvalidArgumentError):
        model_select(train, val, test, candidates=[])


def test_selection_report_round_trip():
    train, val, test = _selection_data()
    report = model_select(train, val, test,
                          candidates=default_candidates(2, c_grid=(1.0, 10.0)))
    obj = json.loads(json.dumps(report.to_json_dict()))
    again = SelectionReport.from_json_dict(obj)
    assert again.chosen_index == report.chosen_index
    assert again.test_accuracy == report.test_accuracy
    assert again.chosen.name == report.chosen.name
    assert [r.val_accuracy for r in again.results] == [
        r.val_accuracy for r in report.results
    ]


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def test_binary_model_round_trip(tmp_path):
    model = train_binary(XOR_X, XOR_Y, rbf(1.0), c=10.0)
    path = str(tmp_path / "model.json")
    save_model(model, path)
    again = load_model(path)
    assert isinstance(again, SvmModel)
    assert np.array_equal(again.dual_coef, model.dual_coef)
    assert np.array_equal(again.support_vectors, model.support_vectors)
    assert again.bias == model.bias and again.kernel == model.kernel
    grid = np.random.default_rng(2).random((20, 2))
    assert np.array_equal(predict(again, grid), predict(model, grid))


@pytest.mark.parametrize("trainer,predictor", [
    (train_ovo, predict_ovo), (train_ova, predict_ova),
])
def test_multiclass_model_round_trip(tmp_path, trainer, predictor):
    x, labels = _blobs(8, [[-3.0, 0.0], [3.0, 0.0], [0.0, 3.0]], seed=4)
    model = trainer(x, labels, rbf(0.5), c=10.0)
    path = str(tmp_path / "model.json")
    save_model(model, path)
    again = load_model(path)
    assert type(again) is type(model)
    assert np.array_equal(predictor(again, x), predictor(model, x))


def test_load_model_errors(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(DataFormatError):
        load_model(str(path))
    path.write_text('{"type": "forest"}', encoding="utf-8")
    with pytest.raises(DataFormatError, match="unknown model type"):
        load_model(str(path))
    path.write_text('{"type": "binary", "kernel": {"kind": "linear"}}',
                    encoding="utf-8")
    with pytest.raises(DataFormatError):
        load_model(str(path))
    with pytest.raises(DataFormatError):
        load_model(str(tmp_path / "missing.json"))


# ---------------------------------------------------------------------------
# solver lanes
# ---------------------------------------------------------------------------

_LANE_PROBE = """
import json
import numpy as np
from noisefp.kernels import gram, rbf
from noisefp.svm import IMPLEMENTATION, solve

rng = np.random.default_rng(123)
x = rng.normal(size=(40, 6))
y = np.where(rng.random(40) < 0.5, 1.0, -1.0)
y[:2] = (1.0, -1.0)
alpha, b, sweeps, converged = solve(gram(x, rbf(0.7)), y, 5.0)
print(json.dumps({
    "impl": IMPLEMENTATION,
    "alpha": alpha.tobytes().hex(),
    "b": np.float64(b).tobytes().hex(),
    "sweeps": sweeps,
    "converged": converged,
}))
"""


def _probe_lane(force_python):
    env = os.environ.copy()
    env.pop("NOISEFP_PURE_PYTHON", None)
    if force_python:
        env["NOISEFP_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", _LANE_PROBE], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_lanes_are_bit_identical():
    fast, pure = _probe_lane(False), _probe_lane(True)
    assert pure["impl"] == "python"
    assert fast["alpha"] == pure["alpha"]
    assert fast["b"] == pure["b"]
    assert fast["sweeps"] == pure["sweeps"]
    assert fast["converged"] == pure["converged"]


def test_compiled_lane_is_active():
    # the build ships the compiled sweep kernel; fall back only by request
    fast = _probe_lane(False)
    assert fast["impl"] == "cython"

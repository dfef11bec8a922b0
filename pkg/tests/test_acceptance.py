"""End-to-end acceptance suite: one test (one pass/fail line) per criterion.

Each test pins its thresholds as constants next to the assertion.  The
expensive shared run (the packaged two-device benchmark) is computed once
per module and reused by the criteria that need it.
"""

import time

import numpy as np
import pytest
from test_smo_oracle import FROZEN_SEEDS, KERNELS, make_case
from qp_oracle import dual_objective as oracle_objective
from qp_oracle import kkt_residual, reference_bias, solve_dual_reference

from noisefp.acquisition import Campaign, export_records, import_records, run_campaign
from noisefp.channels import amplitude_damping, depolarizing, phase_damping
from noisefp.circuit import build_testbed, prefix, step_plan
from noisefp.kernels import gram, kernel_matrix, linear
from noisefp.reproduce import load_packaged_config, run_benchmark, write_report
from noisefp.simulator import (NoiseModel, apply_gate, exact_distribution,
                               ideal_distribution, step_distributions, zero_state)
from noisefp.simulator import _apply_gate_noise
from noisefp.svm import kkt_violation, solve, train_binary

EXACTNESS_ATOL = 1e-12
COMPLETENESS_ATOL = 1e-12
PHYSICALITY_EIG_FLOOR = -1e-10
DUAL_GAP_TOL = 1e-6
ORACLE_CERT_TOL = 1e-8
SMO_KKT_TOL = 1e-3

# Hand-derived zero-noise distributions over qubits (2, 3) at the first
# block's cuts; see test_simulator.py for the derivation.
STEP1_EXPECTED = np.array([0.5, 0.0, 0.5, 0.0])
STEP3_EXPECTED = np.array([0.0, 0.25, 0.5, 0.25])


@pytest.fixture(scope="module")
def two_device_run():
    config = load_packaged_config("two-device")
    start = time.perf_counter()
    report = run_benchmark(config)
    return report, time.perf_counter() - start


def test_criterion_1_zero_noise_distributions_are_exact():
    circuit = build_testbed(3)
    plan = step_plan(3)
    start = time.perf_counter()
    stepped = step_distributions(circuit, plan)
    for dist, cut in zip(stepped, plan.cut_points):
        ideal = ideal_distribution(prefix(circuit, cut))
        assert np.max(np.abs(dist - ideal)) <= EXACTNESS_ATOL
        exact = exact_distribution(prefix(circuit, cut))
        assert np.max(np.abs(dist - exact)) <= EXACTNESS_ATOL
    elapsed = time.perf_counter() - start
    assert np.max(np.abs(stepped[0] - STEP1_EXPECTED)) <= EXACTNESS_ATOL
    assert np.max(np.abs(stepped[2] - STEP3_EXPECTED)) <= EXACTNESS_ATOL
    assert elapsed < 1.0


def test_criterion_2_channels_complete_and_states_physical():
    for strength in np.linspace(0.0, 1.0, 21):
        for build in (depolarizing, amplitude_damping, phase_damping):
            kraus = build(float(strength))
            total = sum(k.conj().T @ k for k in kraus)
            assert np.max(np.abs(total - np.eye(2))) <= COMPLETENESS_ATOL

    circuit = build_testbed(3)
    cuts = set(step_plan(3).cut_points)
    rng = np.random.default_rng(2024)
    for _ in range(100):
        noise = NoiseModel(p1=rng.uniform(0, 1), p2=rng.uniform(0, 1),
                           gamma=rng.uniform(0, 1), lam=rng.uniform(0, 1))
        rho = zero_state(circuit.n_qubits)
        for position, gate in enumerate(circuit.gates, start=1):
            rho = apply_gate(rho, gate)
            rho = _apply_gate_noise(rho, gate, noise, 0.0)
            if position in cuts:
                trace = complex(np.trace(rho))
                assert abs(trace - 1.0) <= 1e-12
                assert np.max(np.abs(rho - rho.conj().T)) <= 1e-12
                assert np.linalg.eigvalsh(rho).min() >= PHYSICALITY_EIG_FLOOR


def test_criterion_3_two_device_separation(two_device_run):
    report, elapsed = two_device_run
    summary = report.summary
    assert summary["steps"] == list(range(1, 10))
    assert len(summary["class_counts"]) == 2
    assert min(summary["class_counts"]) >= 500
    assert summary["test_accuracy"] >= 0.99
    assert elapsed < 300.0


def test_criterion_4_four_device_multiclass():
    report = run_benchmark(load_packaged_config("multi-device"))
    summary = report.summary
    assert len(summary["class_counts"]) == 4
    assert summary["class_strategy"] == "ovo"
    assert summary["test_accuracy"] >= 0.95


def test_criterion_5_accuracy_vs_steps_curve():
    report = run_benchmark(load_packaged_config("steps-curve"))
    by_t = {entry["T"]: entry["test_accuracy"] for entry in report.summary["rows"]}
    assert set(by_t) == set(range(1, 10))
    assert by_t[9] >= by_t[1] - 0.02
    assert by_t[9] >= by_t[3] - 0.02


def test_criterion_6_slow_drift_detection():
    report = run_benchmark(load_packaged_config("time-drift"))
    cases = {entry["case"]: entry for entry in report.summary["cases"]}
    assert report.summary["windows"] == 2
    assert cases["drift"]["test_accuracy"] >= 0.90
    control = cases["control"]
    # [0.35, 0.65] must contain the 95% binomial band around chance for the
    # configured test size: 0.5 +- 1.96 / (2 sqrt(n)) stays inside for n >= 43
    assert control["test_size"] >= 43
    assert 0.35 <= control["test_accuracy"] <= 0.65


def test_criterion_7_smo_matches_brute_force_reference():
    # the analytic 2-point problem first
    x2 = np.array([[-1.0], [1.0]])
    y2 = np.array([-1.0, 1.0])
    model = train_binary(x2, y2, linear(), c=10.0)
    assert model.support_vectors.shape[0] == 2
    assert np.allclose(np.sort(model.dual_coef), [-0.5, 0.5], atol=1e-12)
    assert abs(model.bias) <= 1e-12

    covered = set()
    for seed in FROZEN_SEEDS:
        x, y, fresh, kernel, c = make_case(seed)
        covered.add(kernel)
        g = gram(x, kernel)

        ref_alpha, ref_res = solve_dual_reference(g, y, c)
        assert ref_res <= ORACLE_CERT_TOL

        alpha, b, _, converged = solve(g, y, c, tol=SMO_KKT_TOL)
        assert alpha.min() >= 0.0 and alpha.max() <= c
        assert abs(alpha @ y) <= 1e-8
        if converged:
            assert kkt_violation(g, y, alpha, b, c) <= SMO_KKT_TOL + 1e-12

        gap = oracle_objective(g, y, ref_alpha) - oracle_objective(g, y, alpha)
        assert abs(gap) <= DUAL_GAP_TOL

        ref_b = reference_bias(g, y, ref_alpha, c)
        for points in (x, fresh):
            k = kernel_matrix(kernel, x, points)
            got = np.sign((alpha * y) @ k + b)
            want = np.sign((ref_alpha * y) @ k + ref_b)
            assert np.array_equal(got, want)
    assert covered == {kernel for _, kernel in KERNELS}


def test_criterion_8_reruns_and_archives_are_lossless(two_device_run, tmp_path):
    first, _ = two_device_run
    second = run_benchmark(load_packaged_config("two-device"))
    paths_a = write_report(first, str(tmp_path / "a"))
    paths_b = write_report(second, str(tmp_path / "b"))
    for path_a, path_b in zip(paths_a, paths_b):
        with open(path_a, "rb") as fh_a, open(path_b, "rb") as fh_b:
            assert fh_a.read() == fh_b.read()

    device = load_packaged_config("two-device").devices[0]
    records = run_campaign(Campaign(mode="fast", device=device, n_runs=2))
    archive = tmp_path / "records.jsonl"
    export_records(records, str(archive))
    recovered = import_records(str(archive))
    assert recovered == records
    again = tmp_path / "records2.jsonl"
    export_records(recovered, str(again))
    assert archive.read_bytes() == again.read_bytes()

"""End-to-end acceptance suite.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them all).
The synthetic recipes are desk-scaled versions of the benchmark settings:
edge probabilities are multiplied by n_ref/n so expected degrees match the
reference size.
"""

import itertools
import math

import numpy as np
import pytest

from sdpcomm.bounds import grothendieck_check, lemma1_bound, reference_graph
from sdpcomm.experiment import config_from_dict, run_experiment
from sdpcomm.generate import (
    planted_partition_model,
    replicate_seeds,
    sample_mixture,
    sample_sbm,
    simulation_one_model,
)
from sdpcomm.kernels import gaussian_kernel, pca_basis, split_sample_pca, tune_bandwidth
from sdpcomm.model import (
    Labels,
    MixtureParams,
    SbmParams,
    expected_adjacency,
    ground_truth_matrix,
)
from sdpcomm.rounding import RoundingConfig, misclassification_bound, misclassified, nmi, spectral_round
from sdpcomm.solver import SolverConfig, barycenter_start, project_to_feasible, solve_sdp
from sdpcomm.tuning import TuningGrid, eigen_gap, select_lambda

RC = RoundingConfig(seed=0)
FEAS_TOL = 1e-4


def _report(criterion: str, ok: bool, detail: str) -> None:
    print(f"[{criterion}] {'PASS' if ok else 'FAIL'} - {detail}")


def _partition_best(A: np.ndarray) -> np.ndarray:
    """Exhaustive argmax of <A, X(partition)> over all 2-partitions."""
    n = A.shape[0]
    best_val, best_bits = -np.inf, None
    for mask in range(1, 2 ** (n - 1)):
        bits = np.array([(mask >> i) & 1 for i in range(n)])
        if bits.all() or not bits.any():
            continue
        X = ground_truth_matrix(Labels.from_assignments(bits))
        val = float((A * X).sum())
        if val > best_val:
            best_val, best_bits = val, bits
    return best_bits


@pytest.fixture(scope="module")
def feasibility_suite():
    """Criterion 1 instances: 20 seeded solves across n and r."""
    combos = list(itertools.product((50, 120, 240), (2, 3, 4)))
    instances = []
    cfg = SolverConfig()
    for idx in range(20):
        n, r = combos[idx % len(combos)]
        rng = np.random.default_rng(1000 + idx)
        base = n // r
        sizes = [base] * (r - 1) + [n - base * (r - 1)]
        labels = Labels.from_sizes(sizes)
        p_in, p_out = 16.0 / n, 4.0 / n
        B = SbmParams(np.full((r, r), p_out) + np.diag([p_in - p_out] * r))
        A = sample_sbm(B, labels, seed=rng.integers(2**32))
        sol = solve_sdp(A, r, cfg)
        instances.append((n, r, labels, sol))
    return instances


@pytest.fixture(scope="module")
def oracle_suite():
    """Criterion 2 instances: exhaustive-enumeration comparisons at n <= 12.

    These solves run tight (1e-9): near-exact recovery makes them cheap, and
    criterion 3 checks a trace inequality with 1e-8 headroom on every stored
    output.
    """
    out = []
    for idx in range(30):
        n = (8, 10, 12)[idx % 3]
        labels = Labels.from_sizes([n // 2, n - n // 2])
        B = SbmParams(np.array([[0.85, 0.1], [0.1, 0.85]]))  # a-b = 0.75 n
        A = sample_sbm(B, labels, seed=3000 + idx)
        sol = solve_sdp(A, 2, SolverConfig(tol=1e-9, max_iter=60000))
        rounded = spectral_round(sol.X, 2, RC)
        best_bits = _partition_best(A)
        match = misclassified(rounded, Labels.from_assignments(best_bits)) == 0
        out.append((labels, sol, match))
    return out


def test_criterion_1_feasibility(feasibility_suite):
    worst = 0.0
    ok = True
    for n, r, labels, sol in feasibility_suite:
        v = sol.feasibility_violations(r)
        gap = max(
            -v["min_eigenvalue"], -v["min_entry"], v["max_row_sum_error"], v["trace_error"]
        )
        worst = max(worst, gap)
        ok = ok and gap <= FEAS_TOL
    _report("criterion 1: feasibility suite", ok, f"worst violation {worst:.2e} on 20 instances")
    assert ok


def test_criterion_2_oracle_equivalence(oracle_suite):
    hits = sum(1 for _, _, match in oracle_suite if match)
    ok = hits >= 27
    _report("criterion 2: exhaustive-oracle agreement", ok, f"{hits}/30 matches")
    assert ok


def test_criterion_3_frobenius_at_most_trace(feasibility_suite, oracle_suite):
    worst = -np.inf
    rng = np.random.default_rng(42)
    n, r = 12, 3
    for _ in range(1000):
        S = barycenter_start(n, r) + rng.normal(scale=rng.uniform(0.05, 0.6), size=(n, n))
        X = project_to_feasible(0.5 * (S + S.T), r, tol=1e-10)
        worst = max(worst, float(np.linalg.norm(X) ** 2 - np.trace(X)))
    for _, rr, _, sol in feasibility_suite:
        worst = max(worst, float(np.linalg.norm(sol.X) ** 2 - np.trace(sol.X)))
    for _, sol, _ in oracle_suite:
        worst = max(worst, float(np.linalg.norm(sol.X) ** 2 - np.trace(sol.X)))
    ok = worst <= 1e-8
    _report(
        "criterion 3: squared Frobenius bounded by trace",
        ok,
        f"max ||X||_F^2 - trace(X) = {worst:.2e} over 1000 projected + solver outputs",
    )
    assert ok


def test_criterion_4_misclassification_theorem(feasibility_suite, oracle_suite):
    violations = 0
    total = 0
    for _, r, labels, sol in feasibility_suite:
        X0 = ground_truth_matrix(labels)
        bound = misclassification_bound(sol.X, X0, labels.m_max)
        count = misclassified(spectral_round(sol.X, r, RC), labels)
        total += 1
        violations += count > bound + 1e-9
    for labels, sol, _ in oracle_suite:
        X0 = ground_truth_matrix(labels)
        bound = misclassification_bound(sol.X, X0, labels.m_max)
        count = misclassified(spectral_round(sol.X, 2, RC), labels)
        total += 1
        violations += count > bound + 1e-9
    ok = violations == 0
    _report(
        "criterion 4: misclassification bound",
        ok,
        f"{total - violations}/{total} solved instances within 64 m_max ||dX||_F^2",
    )
    assert ok


def test_criterion_5_proof_chain_small_instances():
    lemma_fail = 0
    groth_fail = 0
    for idx in range(30):
        labels = Labels.from_sizes([8, 8])
        B = SbmParams(np.array([[0.8, 0.2], [0.2, 0.7]]))
        A = sample_sbm(B, labels, seed=5000 + idx)
        ub = 1.0 / labels.m_min
        sol = solve_sdp(
            A, 2, SolverConfig(tol=1e-8, max_iter=40000, enforce_upper_bound=True, upper_bound=ub)
        )
        X0 = ground_truth_matrix(labels)
        Q = reference_graph(B.B, labels)
        lhs = float(np.linalg.norm(sol.X - X0) ** 2)
        rhs = lemma1_bound(A, Q, sol.X, X0, labels.m_min)
        lemma_fail += lhs > rhs + 1e-6
        rep = grothendieck_check(A, expected_adjacency(B, labels), sol.X, labels.m_min)
        groth_fail += not rep.holds
    ok = lemma_fail == 0 and groth_fail == 0
    _report(
        "criterion 5: proof-chain inequalities",
        ok,
        f"lemma-1 failures {lemma_fail}/30, Grothendieck failures {groth_fail}/30",
    )
    assert ok


def test_criterion_6_simulation_one_trend():
    labels, sbm, mix = simulation_one_model(240)
    grid = TuningGrid(tuple(np.geomspace(0.01, 100.0, 10)))
    cap = SolverConfig(enforce_upper_bound=True, upper_bound=1.0 / labels.m_min)
    net, cov, comb = [], [], []
    for ss in replicate_seeds(601, 10):
        s_graph, s_cov = ss.spawn(2)
        A = sample_sbm(sbm, labels, s_graph)
        Y = sample_mixture(mix, labels, s_cov)
        Yp = Y @ pca_basis(Y, 2)
        K = gaussian_kernel(Yp, tune_bandwidth(Yp, 2))
        net.append(nmi(spectral_round(solve_sdp(A, 3, cap).X, 3, RC), labels))
        cov.append(nmi(spectral_round(solve_sdp(K, 3, cap).X, 3, RC), labels))
        report = select_lambda(A, K, 3, grid, cap, truth=labels, rounding=RC)
        comb.append(report.best_point().nmi_vs_truth)
    med = lambda v: float(np.median(v))
    ok = med(comb) >= max(med(net), med(cov)) - 0.02
    _report(
        "criterion 6: combined beats single sources (simulation 1)",
        ok,
        f"median NMI comb={med(comb):.3f} net={med(net):.3f} cov={med(cov):.3f}",
    )
    assert ok


def test_criterion_7_eigen_gap_tracks_nmi():
    n = 300
    scale = 1000.0 / n
    B = SbmParams((np.diag([0.004, 0.024, 0.024]) + 0.004) * scale)
    labels = Labels.from_sizes([100, 100, 100])
    side = 1.3
    means = np.zeros((3, 6))
    means[0, :2] = (0.0, side / math.sqrt(3))
    means[1, :2] = (-side / 2, -side / (2 * math.sqrt(3)))
    means[2, :2] = (side / 2, -side / (2 * math.sqrt(3)))
    mix = MixtureParams(means, np.array([1.0, 1.0, 5.0]))
    grid = TuningGrid(tuple(np.geomspace(0.01, 100.0, 10)))
    solver = SolverConfig(enforce_upper_bound=True)  # balanced: cap = r/n
    hits = 0
    details = []
    for ss in replicate_seeds(77, 10):
        s_graph, s_cov = ss.spawn(2)
        A = sample_sbm(B, labels, s_graph)
        Y = sample_mixture(mix, labels, s_cov)
        K = gaussian_kernel(Y, tune_bandwidth(Y, 6))
        report = select_lambda(A, K, 3, grid, solver, truth=labels, rounding=RC)
        sel = report.best_point().nmi_vs_truth
        top = max(p.nmi_vs_truth for p in report.points if p.nmi_vs_truth is not None)
        hits += sel >= 0.9 * top
        details.append(f"{sel:.2f}/{top:.2f}")
    ok = hits >= 8
    _report("criterion 7: eigen-gap selection quality", ok, f"{hits}/10 seeds ({' '.join(details)})")
    assert ok


def test_criterion_8_unknown_r_recovery():
    labels, sbm, mix = planted_partition_model(300, 10, 0.05 * 800 / 300, 0.004 * 800 / 300)
    candidates = (8, 9, 10, 11, 12)
    q = max(candidates) - 1  # intrinsic dimension under the largest candidate
    picks = []
    for ss in replicate_seeds(2026, 10):
        s_graph, s_cov = ss.spawn(2)
        A = sample_sbm(sbm, labels, s_graph)
        Y = sample_mixture(mix, labels, s_cov)
        Yp = Y @ pca_basis(Y, q)
        K = gaussian_kernel(Yp, tune_bandwidth(Yp, q))
        grid = TuningGrid((1000.0,), rs=candidates)
        from sdpcomm.tuning import select_lambda_and_r

        report = select_lambda_and_r(
            A, K, grid, SolverConfig(max_iter=2500, enforce_upper_bound=True)
        )
        picks.append(report.r_star)
    hits = sum(1 for p in picks if p == 10)
    ok = hits >= 7
    _report("criterion 8: unknown-r recovery", ok, f"{hits}/10 seeds picked r=10 ({picks})")
    assert ok


def test_criterion_9_dimension_reduction_preserves_separation():
    d, sigma = 100, 1.0
    side = 10.0 * sigma
    means = np.zeros((3, d))
    means[0, :2] = (0.0, side / math.sqrt(3))
    means[1, :2] = (-side / 2, -side / (2 * math.sqrt(3)))
    means[2, :2] = (side / 2, -side / (2 * math.sqrt(3)))
    mix = MixtureParams(means, np.full(3, sigma))
    labels = Labels.from_sizes([267, 267, 266])
    hits = 0
    for trial in range(100):
        Y = sample_mixture(mix, labels, seed=9000 + trial)
        res = split_sample_pca(Y, r=3, seed=100 + trial)
        proj = means @ res.basis
        dmin_proj = min(
            float(np.linalg.norm(proj[k] - proj[l])) for k in range(3) for l in range(k + 1, 3)
        )
        hits += dmin_proj >= side / 2
    ok = hits >= 95
    _report(
        "criterion 9: split-sample projection keeps half the separation",
        ok,
        f"{hits}/100 trials with projected d_min >= {side / 2}",
    )
    assert ok


def test_criterion_10_byte_determinism(tmp_path):
    base = {
        "mode": "synthetic",
        "seed": 11,
        "replicates": 2,
        "methods": ["sdp-net", "sdp-comb"],
        "model": {
            "sizes": [12, 12],
            "B": [[0.7, 0.1], [0.1, 0.7]],
            "means": [[0.0, 0.0], [4.0, 0.0]],
            "sigmas": [1.0, 1.0],
        },
        "r": 2,
        "lambda_grid": [0.5, 5.0],
        "rounding": {"restarts": 5, "seed": 0},
        "bounds": True,
    }
    out1 = run_experiment(config_from_dict({**base, "out_dir": str(tmp_path / "r1")}))
    out2 = run_experiment(config_from_dict({**base, "out_dir": str(tmp_path / "r2")}))
    names = ["results.csv", "summary.csv", "bounds_rep0.json", "bounds_rep1.json",
             "tuning_rep0.csv", "tuning_rep1.csv"]
    same = all((out1 / f).read_bytes() == (out2 / f).read_bytes() for f in names)
    _report("criterion 10: byte-identical reruns", same, f"{len(names)} files compared")
    assert same

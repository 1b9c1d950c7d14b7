"""End-to-end acceptance suite.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them all)
and enforces its runtime bound.  Oracle values come from the independent
dense implementations in ``oracles.py``.
"""

import math
import time

import numpy as np
import pytest

import oracles
from notrap.apps import build_vibronic, naphthalene, phenanthrene
from notrap.cli import main, run_fig3, run_fig4_left, run_fig4_right, run_fig5
from notrap.estimators import (
    default_tau_grid,
    orthogonalize,
    sd_estimate,
    t_estimate,
    t_reconstruct,
    t_terms,
)
from notrap.pauli import PauliOperator, PauliString, group_terms
from notrap.resources import (
    count_circuits_sd,
    count_circuits_t,
    depth_vqls,
    n_w_sd,
    shots_sd,
    shots_sd_equal_weights,
    shots_vqls,
)
from notrap.simulator import StateVector, sample


def _check(criterion: str, passed: bool, detail: str, started: float, limit: float):
    elapsed = time.perf_counter() - started
    status = "PASS" if passed and elapsed < limit else "FAIL"
    print(f"[{status}] {criterion}: {detail} [{elapsed:.1f}s / limit {limit:.0f}s]")
    assert passed, f"{criterion}: {detail}"
    assert elapsed < limit, f"{criterion} exceeded runtime limit ({elapsed:.1f}s)"


def _package_instance(terms, a_vec, b_vec):
    op = PauliOperator.from_terms(
        [(g, PauliString.from_label(label)) for g, label in terms]
    )
    return StateVector.from_amplitudes(a_vec), StateVector.from_amplitudes(b_vec), op


@pytest.fixture(scope="module")
def instance_suite():
    """Criterion-1 problem set: 50 instances, n_q <= 5, N_P <= 6."""
    return oracles.random_instances(1001, 50)


def test_c01_sd_oracle_equivalence(instance_suite):
    """Infinite-shot short-depth estimates match the dense oracle to 1e-9."""
    started = time.perf_counter()
    worst = 0.0
    for n_q, terms, a_vec, b_vec in instance_suite:
        a, b, op = _package_instance(terms, a_vec, b_vec)
        want = oracles.transition_probability(a_vec, oracles.dense_operator(terms), b_vec)
        worst = max(worst, abs(sd_estimate(a, b, op) - want))
    _check(
        "C1 short-depth oracle equivalence",
        worst < 1e-9,
        f"max |estimate - oracle| = {worst:.3e} over 50 instances",
        started,
        30.0,
    )


def test_c02_orthogonalisation_lemmas():
    """Ancilla construction zeroes <a~|b~> and preserves the matrix element."""
    started = time.perf_counter()
    worst_overlap = 0.0
    worst_element = 0.0
    for n_q, terms, a_vec, b_vec in oracles.random_instances(2002, 100):
        a, b, op = _package_instance(terms, a_vec, b_vec)
        prob = orthogonalize(a, b, op)
        worst_overlap = max(
            worst_overlap, abs(np.vdot(prob.a_dot.amplitudes, prob.b_dot.amplitudes))
        )
        dense_embedded = oracles.dense_operator(
            [(g, s.label) for g, s in prob.op_dot.terms]
        )
        got = np.vdot(prob.a_dot.amplitudes, dense_embedded @ prob.b_dot.amplitudes)
        want = np.vdot(a_vec, oracles.dense_operator(terms) @ b_vec)
        worst_element = max(worst_element, abs(got - want))
    _check(
        "C2 orthogonalisation lemmas",
        worst_overlap == 0.0 and worst_element < 1e-12,
        f"max overlap {worst_overlap:.1e}, max element drift {worst_element:.3e}",
        started,
        10.0,
    )


def _fig3_medians(rows):
    by_ntau = {}
    for row in rows:
        by_ntau.setdefault(int(row["n_tau"]), []).append(float(row["rel_error"]))
    return {n: float(np.median(v)) for n, v in by_ntau.items()}


@pytest.fixture(scope="module")
def fig3_exact():
    results = {}
    results["aloc"] = run_fig3({"family": "aloc", "seed": 0})[1]
    for family in ("nap", "phe"):
        results[family] = run_fig3({"family": family, "seed": 0})[1]
    return results


def test_c03_hd_convergence(fig3_exact):
    """Median error falls strictly with the point count; sub-1% at three points."""
    started = time.perf_counter()
    details = []
    ok = True
    for family, rows in fig3_exact.items():
        medians = _fig3_medians(rows)
        ordered = [medians[n] for n in (2, 3, 4, 5)]
        monotone = all(b < a for a, b in zip(ordered, ordered[1:]))
        ok = ok and monotone and medians[3] < 1e-2
        details.append(f"{family}: medians={['%.2e' % m for m in ordered]}")
    _check("C3 extrapolation convergence", ok, "; ".join(details), started, 300.0)


def test_c04_trotter_indifference(fig3_exact):
    """First-order product formula tracks the exact exponential's accuracy."""
    started = time.perf_counter()
    ok = True
    details = []
    for family in ("aloc", "nap", "phe"):
        exact_rows = fig3_exact[family]
        trotter_rows = run_fig3({"family": family, "seed": 0, "mode": "trotter1"})[1]
        med_exact = _fig3_medians(exact_rows)
        med_trotter = _fig3_medians(trotter_rows)
        for n_tau in (2, 3, 4, 5):
            lo, hi = sorted((med_exact[n_tau], med_trotter[n_tau]))
            if hi > 2.0 * lo:
                ok = False
                details.append(
                    f"{family} n_tau={n_tau}: exact {med_exact[n_tau]:.2e} "
                    f"vs trotter {med_trotter[n_tau]:.2e}"
                )
    _check(
        "C4 first-order Trotter indifference",
        ok,
        "; ".join(details) if details else "median errors within 2x in every cell",
        started,
        300.0,
    )


def test_c05_shot_sweet_spot():
    """Total-shot minimum of the tau sweep sits near the published optimum."""
    started = time.perf_counter()
    _, rows = run_fig4_left({})
    feasible = [row for row in rows if row["feasible"]]
    best = min(feasible, key=lambda row: row["n_total"])
    argmin = float(best["tau1"])
    _check(
        "C5 shot sweet spot",
        abs(argmin - 0.31) <= 0.05,
        f"argmin tau1 = {argmin:.2f} (n_total = {best['n_total']:.3g})",
        started,
        600.0,
    )


def test_c06_shot_crossover():
    """Extrapolation beats the short-depth budget near twenty qubits."""
    started = time.perf_counter()
    _, rows = run_fig4_right({})
    sd_by_nq = {
        int(r["n_q"]): float(r["shots_total"]) for r in rows if r["method"] == "sd"
    }
    crossover = None
    for n_q in sorted(sd_by_nq):
        hd = next(
            r for r in rows
            if r["method"] == "hd" and int(r["n_q"]) == n_q and float(r["tau1"]) == 0.30
        )
        if hd["feasible"] and float(hd["shots_total"]) < sd_by_nq[n_q]:
            crossover = n_q
            break
    _check(
        "C6 shot crossover",
        crossover is not None and abs(crossover - 20) <= 3,
        f"first qubit count with fewer extrapolation shots = {crossover}",
        started,
        900.0,
    )


def test_c07_resource_formulas():
    started = time.perf_counter()
    ok = all(depth_vqls(n_q - 1) == 60 * n_q - 104 for n_q in range(3, 31))
    ok = ok and all(count_circuits_sd(n_p) == n_w_sd(n_p) for n_p in range(1, 201))
    worst_rel = max(
        abs(shots_sd(np.ones(n_p), 0.02) - shots_sd_equal_weights(n_p, 0.02))
        / shots_sd_equal_weights(n_p, 0.02)
        for n_p in range(1, 65)
    )
    ok = ok and worst_rel < 1e-12
    ns = np.arange(8, 65)
    slope_sd = np.polyfit(np.log(ns), np.log([shots_sd(np.ones(n), 1.0) for n in ns]), 1)[0]
    slope_vq = np.polyfit(np.log(ns), np.log([shots_vqls(np.ones(n), 1.0) for n in ns]), 1)[0]
    ok = ok and abs(slope_sd - 5.0) < 0.3 and abs(slope_vq - 4.0) < 0.3
    _check(
        "C7 resource formulas",
        ok,
        f"equal-weight cross-check {worst_rel:.1e}; slopes {slope_sd:.2f}/{slope_vq:.2f}",
        started,
        5.0,
    )


def test_c08_tunable_consistency(instance_suite):
    """Grouped reconstruction: O(tau^2) bias, sub-1% after extrapolation."""
    started = time.perf_counter()
    ratios = {}
    rel_errors = {}
    count_ok = True
    for n_q, terms, a_vec, b_vec in instance_suite:
        a, b, op = _package_instance(terms, a_vec, b_vec)
        dense = oracles.dense_operator(terms)
        want = oracles.transition_probability(a_vec, dense, b_vec)
        norm = float(np.max(np.abs(np.linalg.eigvalsh(dense))))
        if norm < 1e-6:
            continue
        prob = orthogonalize(a, b, op)
        n_p = len(op)
        for n_g in sorted({1, min(2, n_p), max(1, math.ceil(n_p / 2)), n_p}):
            grouping = group_terms(op, n_g)
            tau = 0.2 / norm
            terms_full = t_terms(prob, grouping, tau)
            terms_half = t_terms(prob, grouping, tau / 2)
            count_ok = count_ok and terms_full.n_circuits == count_circuits_t(n_g, 1)
            bias_full = abs(t_reconstruct(terms_full, tau) - want)
            bias_half = abs(t_reconstruct(terms_half, tau / 2) - want)
            if bias_half > 1e-13:
                ratios.setdefault(n_g, []).append(bias_full / bias_half)
            taus = default_tau_grid(3, 0.25 / norm)
            estimate = t_estimate(a, b, op, n_g, taus)
            if want > 1e-12:
                rel_errors.setdefault(n_g, []).append(abs(estimate - want) / want)
    ratio_medians = {n_g: float(np.median(v)) for n_g, v in ratios.items()}
    error_medians = {n_g: float(np.median(v)) for n_g, v in rel_errors.items()}
    ok = (
        count_ok
        and all(3.0 <= r <= 5.0 for r in ratio_medians.values())
        and all(e < 1e-2 for e in error_medians.values())
    )
    _check(
        "C8 tunable-method consistency",
        ok,
        f"median bias ratios {ratio_medians}; median rel errors "
        f"{ {k: '%.1e' % v for k, v in error_medians.items()} }; counts exact: {count_ok}",
        started,
        300.0,
    )


def test_c09_vibronic_sum_rule():
    started = time.perf_counter()
    ok = True
    details = []
    for factory in (naphthalene, phenanthrene):
        problem = build_vibronic(factory())
        psi0 = problem.ground_states[:, 0]
        total = sum(
            problem.transition_probability(n)
            for n in range(problem.excited_states.shape[1])
        )
        want = float(np.real(np.vdot(problem.mu_matrix @ psi0, problem.mu_matrix @ psi0)))
        overlap = abs(np.vdot(psi0, problem.excited_states[:, 0]))
        ok = ok and abs(total - want) < 1e-6 and overlap > 1e-3
        details.append(
            f"{problem.model.name}: sum-rule drift {abs(total - want):.1e}, "
            f"0-0 overlap {overlap:.3f}"
        )
    _check("C9 vibronic sum rule", ok, "; ".join(details), started, 60.0)


def test_c10_linear_algebra_suite():
    """Tensor-train objective: median error falls monotonically with points."""
    started = time.perf_counter()
    _, rows = run_fig5({"seed": 0})
    by_ntau = {}
    for row in rows:
        by_ntau.setdefault(int(row["n_tau"]), []).append(float(row["rel_error"]))
    medians = [float(np.median(by_ntau[n])) for n in (2, 3, 4, 5)]
    ok = all(b < a for a, b in zip(medians, medians[1:]))
    qubit_counts = {int(row["n_q"]) for row in rows}
    ok = ok and max(qubit_counts) <= 8
    _check(
        "C10 linear-algebra suite",
        ok,
        f"medians over n_tau=2..5: {['%.2e' % m for m in medians]}",
        started,
        300.0,
    )


def test_c11_sampling_statistics(tmp_path):
    started = time.perf_counter()
    shots = 10_000
    estimates = np.array(
        [sample(0.5, shots, seed).estimate for seed in range(1000)]
    )
    want = 0.5 * 0.5 / shots
    got = float(np.var(estimates, ddof=1))
    variance_ok = abs(got - want) / want < 0.10

    args = ["estimate", "--method", "hd", "--op", "anonloc", "--nq", "5",
            "--ntau", "3", "--seed", "21", "--instances", "4", "--shots", "2000"]
    out1, out2 = tmp_path / "run1.csv", tmp_path / "run2.csv"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    bytes_ok = out1.read_bytes() == out2.read_bytes()
    _check(
        "C11 sampling statistics",
        variance_ok and bytes_ok,
        f"empirical variance {got:.3e} vs p(1-p)/N {want:.3e}; "
        f"byte-identical reruns: {bytes_ok}",
        started,
        60.0,
    )

"""Command-line experiment drivers with deterministic CSV output.

Subcommands: ``estimate``, ``fig3``, ``fig4``, ``fig5``, ``pareto``,
``resources``.  Every row carries the instance seed, a hash of the resolved
configuration, and the package version, so identical invocations produce
byte-identical files.  Exit codes: 0 success, 2 configuration error,
3 infeasible shot budget.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .apps import (
    BUILTIN_MOLECULES,
    build_a_loc,
    build_a_nonloc,
    build_tensor_train,
    build_vibronic,
    fig4_states,
)
from .estimators import (
    InfeasibleBudgetError,
    centered_tau_grid,
    default_tau_grid,
    dense_transition_probability,
    hd_estimate,
    hd_shot_budget,
    moments_for_grid,
    orthogonalize,
    sd_estimate,
    t_estimate,
)
from .pauli import PauliOperator, read_operator, spectral_norm
from .resources import (
    HADAMARD_TEST_ASYMPTOTICS,
    QUOTED_DEPTHS,
    ResourceReport,
    count_circuits_hd,
    count_circuits_sd,
    count_circuits_t,
    depth_ibe,
    depth_trotter_template,
    depth_vqls,
    n_w_vqls,
    pareto_front,
    relative_error_estimate,
    shots_sd,
    shots_vqls,
)
from .simulator import StateVector, derive_seed

ORACLE_QUBIT_LIMIT = 10
OUTPUT_DIR_ENV = "NOTRAP_OUTPUT_DIR"


class ConfigError(ValueError):
    """Invalid or incompatible configuration values."""


# ---------------------------------------------------------------------------
# Small I/O helpers


def read_state(path) -> StateVector:
    """Amplitude file: one ``<re> <im>`` pair per line."""
    rows = np.loadtxt(path, ndmin=2)
    if rows.shape[1] != 2:
        raise ConfigError(f"state file {path} must have two columns (re, im)")
    amps = rows[:, 0] + 1j * rows[:, 1]
    dim = amps.shape[0]
    if dim & (dim - 1):
        raise ConfigError(f"state file {path} has {dim} amplitudes; need a power of two")
    norm = float(np.linalg.norm(amps))
    if abs(norm - 1.0) > 1e-6:
        raise ConfigError(f"state file {path} is not normalised (norm {norm})")
    return StateVector.from_amplitudes(amps / norm)


def write_state(state: StateVector, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for amp in state.amplitudes:
            fh.write(f"{float(amp.real)!r} {float(amp.imag)!r}\n")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, fieldnames, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_fmt(row.get(name)) for name in fieldnames])


def config_hash(config: dict) -> str:
    canon = json.dumps({k: config[k] for k in sorted(config)}, default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def output_path(out, default_name: str) -> Path:
    if out:
        return Path(out)
    base = os.environ.get(OUTPUT_DIR_ENV, ".")
    return Path(base) / default_name


def load_config_file(path) -> dict:
    """Flat ``key = value`` text; keys mirror the long flag names."""
    values: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _parse_int_list(text: str):
    return tuple(int(tok) for tok in str(text).replace(",", " ").split())


def _parse_float_list(text: str):
    return tuple(float(tok) for tok in str(text).replace(",", " ").split())


# ---------------------------------------------------------------------------
# estimate


def _builtin_operator(name: str, n_qubits: int) -> PauliOperator:
    if name == "aloc":
        return build_a_loc(n_qubits)
    if name == "anonloc":
        return build_a_nonloc(n_qubits)
    raise ConfigError(f"unknown builtin operator {name!r}")


def _estimate_taus(op: PauliOperator, n_tau: int, tau1, tau_grid):
    if tau_grid is not None:
        return tuple(tau_grid)
    if tau1 is not None:
        return default_tau_grid(n_tau, tau1)
    norm = spectral_norm(op)
    return centered_tau_grid(n_tau, 1.0 / norm, 0.1 / norm)


def run_estimate(config: dict):
    """One CSV row per instance for a single (method, operator) setup."""
    method = config.get("method")
    if method not in ("sd", "hd", "t"):
        raise ConfigError(f"--method must be sd, hd, or t (got {method!r})")
    if method != "t" and config.get("n_g") is not None:
        raise ConfigError("--ng applies only to the grouped method")
    if method == "sd" and (
        config.get("tau1") is not None or config.get("tau_grid") is not None
    ):
        raise ConfigError("tau options apply only to the hd/t methods")
    if config.get("op_file"):
        op = read_operator(config["op_file"])
    else:
        if config.get("n_q") is None:
            raise ConfigError("builtin operators need --nq (or provide --op-file)")
        op = _builtin_operator(config.get("op") or "aloc", int(config["n_q"]))
    n_q = op.n_qubits
    op_dot = op.prepend_qubit("X")

    n_tau = int(config.get("n_tau") or 3)
    n_g = int(config["n_g"]) if config.get("n_g") is not None else None
    shots = int(config["shots"]) if config.get("shots") else None
    seed = int(config.get("seed") or 0)
    mode = config.get("mode") or "exact"
    taus = None
    if method in ("hd", "t"):
        taus = _estimate_taus(op, n_tau, config.get("tau1"), config.get("tau_grid"))

    state_a = config.get("state_a")
    state_b = config.get("state_b")
    rows = []
    chash = config_hash(config)
    for index in range(int(config.get("instances") or 1)):
        instance_seed = derive_seed(seed, index)
        if state_a and state_b:
            a, b = read_state(state_a), read_state(state_b)
        elif config.get("states") == "fig4":
            a, b = fig4_states(n_q)
        else:
            a = StateVector.haar_random(n_q, derive_seed(instance_seed, 0))
            b = StateVector.haar_random(n_q, derive_seed(instance_seed, 1))

        if method == "sd":
            estimate = sd_estimate(a, b, op, shots=shots, seed=instance_seed)
            circuit_count = count_circuits_sd(len(op_dot))
            depth = depth_ibe(op_dot.max_weight)
        elif method == "hd":
            estimate = hd_estimate(a, b, op, taus, mode=mode, shots=shots, seed=instance_seed)
            circuit_count = count_circuits_hd(len(taus))
            depth = depth_trotter_template(op_dot)
        else:
            n_g = n_g if n_g is not None else len(op)
            estimate = t_estimate(a, b, op, n_g, taus, shots=shots, seed=instance_seed)
            circuit_count = count_circuits_t(n_g, len(taus))
            depth = depth_trotter_template(op_dot)

        oracle = abs_err = rel_err = None
        if n_q <= ORACLE_QUBIT_LIMIT:
            oracle = dense_transition_probability(a, b, op)
            abs_err = abs(estimate - oracle)
            rel_err = abs_err / abs(oracle) if oracle else None
        rows.append(
            {
                "seed": instance_seed,
                "config_hash": chash,
                "version": __version__,
                "method": method,
                "n_q": n_q,
                "n_p": len(op),
                "n_tau": len(taus) if taus else None,
                "n_g": n_g,
                "tau1": taus[-1] if taus else None,
                "mode": mode if method == "hd" else None,
                "shots": shots,
                "estimate": estimate,
                "oracle": oracle,
                "abs_error": abs_err,
                "rel_error": rel_err,
                "circuit_count": circuit_count,
                "depth": depth,
            }
        )
    fields = [
        "seed", "config_hash", "version", "method", "n_q", "n_p", "n_tau", "n_g",
        "tau1", "mode", "shots", "estimate", "oracle", "abs_error", "rel_error",
        "circuit_count", "depth",
    ]
    return fields, rows


# ---------------------------------------------------------------------------
# fig3: extrapolation error vs number of points


def run_fig3(config: dict):
    """Relative HD error on the arithmetic tau grid centred at 1/||A||."""
    family = config["family"]
    n_tau_values = _parse_int_list(config.get("n_tau_values") or "2 3 4 5")
    seed = int(config.get("seed") or 0)
    mode = config.get("mode") or "exact"
    rows = []
    chash = config_hash(config)

    def add_rows(label, n_q, instance_seed, a, b, op, oracle):
        norm = spectral_norm(op)
        for n_tau in n_tau_values:
            taus = centered_tau_grid(n_tau, 1.0 / norm, 0.1 / norm)
            estimate = hd_estimate(a, b, op, taus, mode=mode)
            rows.append(
                {
                    "seed": instance_seed,
                    "config_hash": chash,
                    "version": __version__,
                    "family": family,
                    "label": label,
                    "n_q": n_q,
                    "n_tau": n_tau,
                    "estimate": estimate,
                    "oracle": oracle,
                    "rel_error": abs(estimate - oracle) / abs(oracle),
                }
            )

    if family == "aloc":
        n_q_values = _parse_int_list(config.get("n_q_values") or "4 6 8 10")
        n_seeds = int(config.get("instances") or 20)
        for n_q in n_q_values:
            op = build_a_loc(n_q)
            a = StateVector.zero_state(n_q)
            for index in range(n_seeds):
                instance_seed = derive_seed(seed, n_q, index)
                b = StateVector.haar_random(n_q, instance_seed)
                oracle = dense_transition_probability(a, b, op)
                add_rows(f"aloc-n{n_q}", n_q, instance_seed, a, b, op, oracle)
    elif family in BUILTIN_MOLECULES:
        problem = build_vibronic(BUILTIN_MOLECULES[family]())
        if config.get("levels"):
            levels = _parse_int_list(config["levels"])
        else:
            levels = problem.brightest_transitions(int(config.get("n_levels") or 6))
        op = problem.mu_operator
        a = problem.ground_state(0)
        for level in levels:
            b = problem.excited_state(level)
            oracle = problem.transition_probability(level)
            add_rows(f"{family}{level}", problem.n_qubits, seed, a, b, op, oracle)
    else:
        raise ConfigError(f"unknown family {family!r}; expected aloc, nap, or phe")

    fields = [
        "seed", "config_hash", "version", "family", "label", "n_q", "n_tau",
        "estimate", "oracle", "rel_error",
    ]
    return fields, rows


# ---------------------------------------------------------------------------
# fig4: shot budgets


#: Exact transition probability of the fig4 state construction.
FIG4_Q = 0.5


def run_fig4_left(config: dict):
    """Shot requirement vs tau1 at fixed qubit count.

    Default convention: per-circuit Bernoulli variances and a relative error
    budget (budget * Q absolute), which places the shot minimum near
    tau1 ~ 0.31 for the 16-qubit nonlocal operator.
    """
    n_q = int(config.get("n_q") or 16)
    budget = float(config.get("budget") or 0.01)
    budget_kind = config.get("budget_kind") or "relative"
    variance_mode = config.get("variance_mode") or "bernoulli"
    start, stop, step = _parse_float_list(config.get("tau1_grid") or "0.10 0.60 0.01")
    op = build_a_nonloc(n_q)
    a, b = fig4_states(n_q)
    prob = orthogonalize(a, b, op)
    moments = moments_for_grid(prob, stop)
    eps_target = budget * FIG4_Q if budget_kind == "relative" else budget
    chash = config_hash(config)
    rows = []
    n_steps = int(round((stop - start) / step))
    for i in range(n_steps + 1):
        tau1 = round(start + i * step, 12)
        row = {
            "seed": 0,
            "config_hash": chash,
            "version": __version__,
            "n_q": n_q,
            "tau1": tau1,
            "eps_target": eps_target,
            "eps_extrap": None,
            "eps_meas": None,
            "n_total": None,
            "feasible": False,
        }
        try:
            bud = hd_shot_budget(
                prob, tau1, eps_target, FIG4_Q, variance_mode=variance_mode, moments=moments
            )
            row.update(
                eps_extrap=bud.eps_extrap,
                eps_meas=bud.eps_meas,
                n_total=bud.n_total,
                feasible=True,
            )
        except InfeasibleBudgetError:
            pass
        rows.append(row)
    fields = [
        "seed", "config_hash", "version", "n_q", "tau1", "eps_target",
        "eps_extrap", "eps_meas", "n_total", "feasible",
    ]
    return fields, rows


def run_fig4_right(config: dict):
    """Shots vs qubit count: short-depth formula against the extrapolation plan.

    Default convention: worst-case variances (matching the analytic
    short-depth formula) and an absolute error budget on both methods.
    """
    n_q_values = _parse_int_list(config.get("n_q_values") or " ".join(str(n) for n in range(10, 22)))
    tau1_values = _parse_float_list(config.get("tau1_values") or "0.25 0.30 0.35")
    budget = float(config.get("budget") or 0.01)
    budget_kind = config.get("budget_kind") or "absolute"
    variance_mode = config.get("variance_mode") or "upper_bound"
    eps_target = budget * FIG4_Q if budget_kind == "relative" else budget
    chash = config_hash(config)
    rows = []
    for n_q in n_q_values:
        op = build_a_nonloc(n_q)
        a, b = fig4_states(n_q)
        prob = orthogonalize(a, b, op)
        moments = moments_for_grid(prob, max(tau1_values))
        rows.append(
            {
                "seed": 0,
                "config_hash": chash,
                "version": __version__,
                "n_q": n_q,
                "method": "sd",
                "tau1": None,
                "eps_extrap": None,
                "shots_total": shots_sd(op.coeffs, eps_target),
                "feasible": True,
            }
        )
        for tau1 in tau1_values:
            row = {
                "seed": 0,
                "config_hash": chash,
                "version": __version__,
                "n_q": n_q,
                "method": "hd",
                "tau1": tau1,
                "eps_extrap": None,
                "shots_total": None,
                "feasible": False,
            }
            try:
                bud = hd_shot_budget(
                    prob, tau1, eps_target, FIG4_Q,
                    variance_mode=variance_mode, moments=moments,
                )
                row.update(eps_extrap=bud.eps_extrap, shots_total=bud.n_total, feasible=True)
            except InfeasibleBudgetError:
                pass
            rows.append(row)
    fields = [
        "seed", "config_hash", "version", "n_q", "method", "tau1",
        "eps_extrap", "shots_total", "feasible",
    ]
    return fields, rows


# ---------------------------------------------------------------------------
# fig5: tensor-train linear algebra


FIG5_TRAINS = {2: (4, 6, 8), 4: (2, 3, 4), 8: (2,)}


def run_fig5(config: dict):
    """HD error on random tensor-train instances, one operator per shape."""
    d_values = _parse_int_list(config.get("d_values") or "2 4 8")
    n_tau_values = _parse_int_list(config.get("n_tau_values") or "2 3 4 5")
    n_seeds = int(config.get("instances") or 20)
    seed = int(config.get("seed") or 0)
    chash = config_hash(config)
    rows = []
    from .estimators import f_parts_from_moments, richardson_solve

    for d_local in d_values:
        for n_train in FIG5_TRAINS[d_local]:
            train, op = build_tensor_train(derive_seed(seed, d_local, n_train), n_train, d_local)
            n_q = op.n_qubits
            norm = spectral_norm(op)
            b = StateVector.zero_state(n_q)
            dense = op.to_dense()
            tau_max = centered_tau_grid(max(n_tau_values), 1.0 / norm, 0.1 / norm)[-1]
            for index in range(n_seeds):
                instance_seed = derive_seed(seed, d_local, n_train, index)
                x = StateVector.haar_random(n_q, instance_seed)
                oracle = float(abs(np.vdot(x.amplitudes, dense @ b.amplitudes)) ** 2)
                prob = orthogonalize(x, b, op)
                moments = moments_for_grid(prob, tau_max, norm_bound=1.01 * norm)
                for n_tau in n_tau_values:
                    taus = centered_tau_grid(n_tau, 1.0 / norm, 0.1 / norm)
                    f_values = [sum(f_parts_from_moments(moments, t)) for t in taus]
                    estimate = richardson_solve(taus, f_values).q_prime
                    rows.append(
                        {
                            "seed": instance_seed,
                            "config_hash": chash,
                            "version": __version__,
                            "d_local": d_local,
                            "n_train": n_train,
                            "n_q": n_q,
                            "n_tau": n_tau,
                            "estimate": estimate,
                            "oracle": oracle,
                            "rel_error": abs(estimate - oracle) / abs(oracle),
                        }
                    )
    fields = [
        "seed", "config_hash", "version", "d_local", "n_train", "n_q", "n_tau",
        "estimate", "oracle", "rel_error",
    ]
    return fields, rows


# ---------------------------------------------------------------------------
# pareto and resources


def run_pareto(config: dict):
    """Depth / circuit-count front per operator, over the embedded terms."""
    op_names = str(config.get("ops") or "aloc anonloc").replace(",", " ").split()
    n_q = int(config.get("n_q") or 8)
    n_tau_values = _parse_int_list(config.get("n_tau_values") or "2 3")
    chash = config_hash(config)
    rows = []
    for name in op_names:
        op_dot = _builtin_operator(name, n_q).prepend_qubit("X")
        for point in pareto_front(op_dot, n_tau_values=n_tau_values):
            rows.append(
                {
                    "seed": 0,
                    "config_hash": chash,
                    "version": __version__,
                    "operator": name,
                    "n_q": n_q,
                    "method": point.method,
                    "n_g": point.n_g,
                    "n_tau": point.n_tau,
                    "depth": point.depth,
                    "circuit_count": point.circuit_count,
                }
            )
    fields = [
        "seed", "config_hash", "version", "operator", "n_q", "method", "n_g",
        "n_tau", "depth", "circuit_count",
    ]
    return fields, rows


NORM_QUBIT_LIMIT = 16


def run_resources(config: dict):
    """Analytic depth/count/shot table for the benchmark operators.

    Formula depths are reported next to the quoted after-cancellation
    constants where those exist; the Hadamard-test row carries asymptotic
    annotations only.
    """
    op_names = str(config.get("ops") or "aloc anonloc").replace(",", " ").split()
    n_q_values = _parse_int_list(config.get("n_q_values") or "4 8 16 24 30")
    eps_q = float(config.get("eps") or 0.01)
    n_tau = int(config.get("n_tau") or 2)
    chash = config_hash(config)
    rows = []
    for name in op_names:
        for n_q in n_q_values:
            op = _builtin_operator(name, n_q)
            op_dot = op.prepend_qubit("X")
            k = op.max_weight
            norm_sq = eta = None
            if n_q <= NORM_QUBIT_LIMIT:
                norm_sq = spectral_norm(op) ** 2
                eta = relative_error_estimate(eps_q, norm_sq)
            quoted_sd = QUOTED_DEPTHS[("sd", name)](n_q)
            quoted_vqls = QUOTED_DEPTHS[("vqls", name)](n_q)
            eta_value = eta if eta is not None else float("nan")
            reports = [
                (
                    ResourceReport(
                        method="sd",
                        depth=depth_ibe(k),
                        circuit_count=count_circuits_sd(len(op)),
                        shots_total=shots_sd(op.coeffs, eps_q),
                        eps_q=eps_q,
                        eta=eta_value,
                    ),
                    quoted_sd,
                ),
                (
                    ResourceReport(
                        method="vqls",
                        depth=depth_vqls(k),
                        circuit_count=n_w_vqls(len(op)),
                        shots_total=shots_vqls(op.coeffs, eps_q),
                        eps_q=eps_q,
                        eta=eta_value,
                    ),
                    quoted_vqls,
                ),
                (
                    ResourceReport(
                        method="hd",
                        depth=depth_trotter_template(op_dot),
                        circuit_count=count_circuits_hd(n_tau),
                        shots_total=0.0,
                        eps_q=eps_q,
                        eta=eta_value,
                    ),
                    None,
                ),
            ]
            common = {
                "seed": 0,
                "config_hash": chash,
                "version": __version__,
                "operator": name,
                "n_q": n_q,
                "n_p": len(op),
                "eps_q": eps_q,
                "norm_sq_measured": norm_sq,
                "eta_estimate": eta,
            }
            for report, quoted in reports:
                rows.append(
                    dict(
                        common,
                        method=report.method,
                        depth_formula=report.depth,
                        depth_quoted=quoted,
                        circuit_count=report.circuit_count,
                        shots_total=report.shots_total or None,
                        annotation=None,
                    )
                )
            rows.append(
                dict(
                    common,
                    method="hadamard_test",
                    depth_formula=None,
                    depth_quoted=None,
                    circuit_count=None,
                    shots_total=None,
                    annotation=(
                        f"{HADAMARD_TEST_ASYMPTOTICS['depth_' + name]}; "
                        f"{HADAMARD_TEST_ASYMPTOTICS['note']}"
                    ),
                )
            )
    fields = [
        "seed", "config_hash", "version", "operator", "n_q", "n_p", "method",
        "depth_formula", "depth_quoted", "circuit_count", "shots_total",
        "eps_q", "norm_sq_measured", "eta_estimate", "annotation",
    ]
    return fields, rows


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser):
    parser.add_argument("--config", help="flat key=value config file (flags override)")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", help="output CSV path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="notrap",
        description="Transition-probability estimators, resource models, and "
        "experiment drivers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="run one estimator on one problem")
    _add_common(p)
    p.add_argument("--method", choices=["sd", "hd", "t"])
    p.add_argument("--op", choices=["aloc", "anonloc"], default=None)
    p.add_argument("--op-file", dest="op_file")
    p.add_argument("--nq", dest="n_q", type=int, default=None)
    p.add_argument("--states", choices=["haar", "fig4"], default=None)
    p.add_argument("--state-a", dest="state_a")
    p.add_argument("--state-b", dest="state_b")
    p.add_argument("--ntau", dest="n_tau", type=int, default=None)
    p.add_argument("--ng", dest="n_g", type=int, default=None)
    p.add_argument("--tau1", type=float, default=None)
    p.add_argument("--tau-grid", dest="tau_grid", type=_parse_float_list, default=None)
    p.add_argument("--mode", choices=["exact", "trotter1"], default=None)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--instances", type=int, default=None)

    p = sub.add_parser("fig3", help="extrapolation error vs point count")
    _add_common(p)
    p.add_argument("--family", required=True, choices=["aloc", "nap", "phe"])
    p.add_argument("--nq-values", dest="n_q_values")
    p.add_argument("--ntau-values", dest="n_tau_values")
    p.add_argument("--instances", type=int, default=None)
    p.add_argument("--levels")
    p.add_argument("--mode", choices=["exact", "trotter1"], default=None)

    p = sub.add_parser("fig4", help="shot budgets: tau sweep and qubit sweep")
    _add_common(p)
    p.add_argument("--panel", choices=["left", "right", "both"], default="both")
    p.add_argument("--nq", dest="n_q", type=int, default=None)
    p.add_argument("--nq-values", dest="n_q_values")
    p.add_argument("--tau1-grid", dest="tau1_grid")
    p.add_argument("--tau1-values", dest="tau1_values")
    p.add_argument("--budget", type=float, default=None)
    p.add_argument("--budget-kind", dest="budget_kind", choices=["relative", "absolute"])
    p.add_argument(
        "--variance-mode", dest="variance_mode", choices=["bernoulli", "upper_bound"]
    )

    p = sub.add_parser("fig5", help="tensor-train linear-algebra suite")
    _add_common(p)
    p.add_argument("--d-values", dest="d_values")
    p.add_argument("--ntau-values", dest="n_tau_values")
    p.add_argument("--instances", type=int, default=None)

    p = sub.add_parser("pareto", help="depth vs circuit-count fronts")
    _add_common(p)
    p.add_argument("--ops")
    p.add_argument("--nq", dest="n_q", type=int, default=None)
    p.add_argument("--ntau-values", dest="n_tau_values")

    p = sub.add_parser("resources", help="analytic resource table")
    _add_common(p)
    p.add_argument("--ops")
    p.add_argument("--nq-values", dest="n_q_values")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--ntau", dest="n_tau", type=int, default=None)

    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge config-file values with flags; flags win."""
    config: dict = {}
    if getattr(args, "config", None):
        config.update(load_config_file(args.config))
    for key, value in vars(args).items():
        if key in ("command", "config", "out"):
            continue
        if value is not None:
            config[key] = value
    return config


DRIVERS = {
    "estimate": (run_estimate, "estimate.csv"),
    "fig3": (run_fig3, "fig3.csv"),
    "fig5": (run_fig5, "fig5.csv"),
    "pareto": (run_pareto, "pareto.csv"),
    "resources": (run_resources, "resources.csv"),
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
        if args.command == "fig4":
            panels = []
            if args.panel in ("left", "both"):
                panels.append((run_fig4_left, "fig4_left.csv"))
            if args.panel in ("right", "both"):
                panels.append((run_fig4_right, "fig4_right.csv"))
            for driver, name in panels:
                fields, rows = driver(config)
                target = output_path(None, name) if args.panel == "both" or not args.out else Path(args.out)
                write_csv(target, fields, rows)
                print(f"wrote {target} ({len(rows)} rows)")
                if not any(row["feasible"] for row in rows):
                    raise InfeasibleBudgetError(
                        "no point in the sweep fits the error budget"
                    )
        else:
            driver, default_name = DRIVERS[args.command]
            fields, rows = driver(config)
            target = output_path(args.out, default_name)
            write_csv(target, fields, rows)
            print(f"wrote {target} ({len(rows)} rows)")
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleBudgetError as exc:
        print(f"infeasible budget: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

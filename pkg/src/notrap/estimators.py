"""Transition-probability estimators.

Three routes to ``|<a|A|b>|^2`` for arbitrary (possibly non-orthogonal)
states:

- short-depth (SD): overlap probabilities of the four W-term families,
  recombined with the operator coefficients;
- high-depth (HD): the even function ``f(tau) = |<a~|exp(-i tau A~)|b~>|^2 +
  |<a~|exp(+i tau A~)|b~>|^2`` evaluated on a small tau grid and Richardson
  extrapolated, ``f(tau) = 2 tau^2 |<a|A|b>|^2 + O(tau^4)``;
- tunable (T): operator terms grouped into N_G blocks whose single and
  pairwise exponentials reconstruct the same quadratic coefficient.

All three require the ancilla orthogonalisation: ``|a~> = |0>|a>``,
``|b~> = |1>|b>``, ``A~ = X (x) A``, which zeroes ``<a~|b~>`` while
preserving the matrix element.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliOperator, TermGrouping, group_terms, subset_operator
from .simulator import (
    StateVector,
    apply_operator_array,
    apply_pauli,
    apply_pauli_exponential,
    derive_seed,
    exact_exponential,
    overlap_probability,
    sample,
    trotter_step,
)

#: Condition-number ceiling beyond which an extrapolation solve is rejected.
CONDITION_LIMIT = 1e14


class InfeasibleBudgetError(RuntimeError):
    """Raised when the extrapolation error alone exhausts an error budget."""


@dataclass(frozen=True)
class OrthogonalizedProblem:
    """Ancilla-extended states and operator with ``<a~|b~> = 0``."""

    a_dot: StateVector
    b_dot: StateVector
    op_dot: PauliOperator


def orthogonalize(a: StateVector, b: StateVector, op: PauliOperator) -> OrthogonalizedProblem:
    """Add one ancilla qubit in opposite basis states and bit-flip the operator.

    The transformed problem satisfies ``<a~|b~> = 0`` and
    ``<a~|A~|b~> = <a|A|b>`` for any inputs, so estimators that need
    orthogonal states become exact for arbitrary ones.
    """
    if not (a.n_qubits == b.n_qubits == op.n_qubits):
        raise ValueError("states and operator must share a qubit count")
    return OrthogonalizedProblem(
        a_dot=a.prepend_ancilla(0),
        b_dot=b.prepend_ancilla(1),
        op_dot=op.prepend_qubit("X"),
    )


def dense_transition_probability(a: StateVector, b: StateVector, op: PauliOperator) -> float:
    """Reference value ``|<a|A|b>|^2`` from the dense matrix (desk scale)."""
    m = op.to_dense()
    return float(abs(np.vdot(a.amplitudes, m @ b.amplitudes)) ** 2)


# ---------------------------------------------------------------------------
# Short-depth estimator


@dataclass(frozen=True)
class SDTermSet:
    """The four overlap-probability families; each value lies in [0, 1].

    ``w1[k] = |<a~|P_k|b~>|^2``; ``w2``/``w3`` insert
    ``(I +- i P_k)(I +- i P_l)/2`` (realised as two pi/4 Pauli-string
    exponentials); ``w4`` inserts the plain product ``P_k P_l``.  Pair keys
    are ``(k, l)`` with ``l < k``.
    """

    w1: dict
    w2: dict
    w3: dict
    w4: dict

    @property
    def n_circuits(self) -> int:
        return len(self.w1) + len(self.w2) + len(self.w3) + len(self.w4)


def sd_w_terms(
    prob: OrthogonalizedProblem, shots: int | None = None, seed: int = 0
) -> SDTermSet:
    """Evaluate every W circuit; with ``shots`` each value is sampled."""
    a_dot, b_dot = prob.a_dot, prob.b_dot
    strings = prob.op_dot.strings
    n = len(strings)

    def finish(value: float, circuit_index: int) -> float:
        if shots is None:
            return value
        return sample(value, shots, derive_seed(seed, circuit_index)).estimate

    w1, w2, w3, w4 = {}, {}, {}, {}
    circuit = 0
    for k in range(n):
        w1[k] = finish(overlap_probability(a_dot, apply_pauli(b_dot, strings[k])), circuit)
        circuit += 1
    for k in range(1, n):
        for l in range(k):
            # (I + iP)/sqrt(2) = exp(+i pi/4 P); rightmost factor acts first.
            plus = apply_pauli_exponential(b_dot, strings[l], -math.pi / 4)
            plus = apply_pauli_exponential(plus, strings[k], -math.pi / 4)
            w2[(k, l)] = finish(overlap_probability(a_dot, plus), circuit)
            circuit += 1
            minus = apply_pauli_exponential(b_dot, strings[l], math.pi / 4)
            minus = apply_pauli_exponential(minus, strings[k], math.pi / 4)
            w3[(k, l)] = finish(overlap_probability(a_dot, minus), circuit)
            circuit += 1
            prod = apply_pauli(apply_pauli(b_dot, strings[l]), strings[k])
            w4[(k, l)] = finish(overlap_probability(a_dot, prod), circuit)
            circuit += 1
    return SDTermSet(w1, w2, w3, w4)


def sd_reconstruct(coeffs, terms: SDTermSet) -> float:
    """Recombine W values into the transition probability.

    ``sum_k g_k^2 W1[k] + sum_{l<k} g_k g_l (2 W2 + 2 W3 - W1[k] - W1[l] - W4)``,
    which is exact at infinite shots for orthogonalised inputs.
    """
    total = sum(g * g * terms.w1[k] for k, g in enumerate(coeffs))
    for (k, l), w2 in terms.w2.items():
        gkgl = coeffs[k] * coeffs[l]
        total += gkgl * (
            2 * w2 + 2 * terms.w3[(k, l)] - terms.w1[k] - terms.w1[l] - terms.w4[(k, l)]
        )
    return float(total)


def sd_estimate(
    a: StateVector,
    b: StateVector,
    op: PauliOperator,
    shots: int | None = None,
    seed: int = 0,
) -> float:
    """Short-depth estimate of ``|<a|A|b>|^2`` (exact at infinite shots)."""
    prob = orthogonalize(a, b, op)
    return sd_reconstruct(prob.op_dot.coeffs, sd_w_terms(prob, shots=shots, seed=seed))


# ---------------------------------------------------------------------------
# High-depth estimator


def _evolved(prob: OrthogonalizedProblem, tau: float, sign: int, mode: str) -> StateVector:
    if mode == "exact":
        return exact_exponential(prob.b_dot, prob.op_dot, tau, sign=sign)
    if mode == "trotter1":
        return trotter_step(prob.b_dot, prob.op_dot, tau, sign=sign)
    raise ValueError(f"unknown mode {mode!r}; expected 'exact' or 'trotter1'")


def hd_f_parts(
    prob: OrthogonalizedProblem,
    tau: float,
    mode: str = "exact",
    shots: int | None = None,
    seed: int = 0,
    tau_index: int = 0,
):
    """The two opposite-sign overlap probabilities whose sum is ``f(tau)``.

    Returns ``(f_plus, f_minus)`` with ``f_minus = |<a~|e^{-i tau A~}|b~>|^2``.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    f_minus = overlap_probability(prob.a_dot, _evolved(prob, tau, +1, mode))
    f_plus = overlap_probability(prob.a_dot, _evolved(prob, tau, -1, mode))
    if shots is not None:
        f_plus = sample(f_plus, shots, derive_seed(seed, tau_index, 0)).estimate
        f_minus = sample(f_minus, shots, derive_seed(seed, tau_index, 1)).estimate
    return f_plus, f_minus


def hd_f(
    prob: OrthogonalizedProblem,
    tau: float,
    mode: str = "exact",
    shots: int | None = None,
    seed: int = 0,
    tau_index: int = 0,
) -> float:
    """``f(tau)``; even in tau because both signs are summed."""
    f_plus, f_minus = hd_f_parts(prob, tau, mode=mode, shots=shots, seed=seed, tau_index=tau_index)
    return f_plus + f_minus


@dataclass(frozen=True)
class ExtrapolationPlan:
    """Solved Richardson system ``T c = f`` with ``T_ij = tau_i^(2(j+1))``."""

    taus: tuple
    n_tau: int
    T: np.ndarray
    V: np.ndarray
    coefficients: np.ndarray  # (K_2, K_4, ..., K_{2 n_tau})
    condition: float

    @property
    def q_prime(self) -> float:
        return float(self.coefficients[0] / 2.0)


def _validated_taus(taus) -> np.ndarray:
    arr = np.asarray(list(taus), dtype=float)
    if arr.size < 2:
        raise ValueError("need at least two extrapolation points")
    if np.any(arr <= 0):
        raise ValueError("extrapolation points must be positive")
    if np.any(np.diff(arr) <= 0):
        raise ValueError("extrapolation points must be strictly increasing")
    return arr


def richardson_solve(taus, f_values) -> ExtrapolationPlan:
    """Fit ``f(tau) = K_2 tau^2 + K_4 tau^4 + ...`` through the given points.

    The estimate of the transition probability is ``K_2 / 2``.  Raises on a
    singular or badly conditioned system, reporting the condition estimate.
    """
    arr = _validated_taus(taus)
    f = np.asarray(list(f_values), dtype=float)
    if f.shape != arr.shape:
        raise ValueError("one f value per tau is required")
    powers = 2 * (np.arange(arr.size) + 1)
    T = arr[:, None] ** powers[None, :]
    condition = float(np.linalg.cond(T))
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise ValueError(
            f"extrapolation system is ill-conditioned (cond ~ {condition:.3g})"
        )
    V = np.linalg.inv(T)
    coefficients = np.linalg.solve(T, f)
    for m in (T, V, coefficients):
        m.setflags(write=False)
    return ExtrapolationPlan(
        taus=tuple(float(t) for t in arr),
        n_tau=arr.size,
        T=T,
        V=V,
        coefficients=coefficients,
        condition=condition,
    )


@dataclass(frozen=True)
class ZeroExtrapolation:
    """Polynomial-in-tau^2 fit ``y(tau) = y0 + c_1 tau^2 + ...`` at tau = 0."""

    taus: tuple
    coefficients: np.ndarray
    condition: float

    @property
    def value(self) -> float:
        return float(self.coefficients[0])


def extrapolate_to_zero(taus, values) -> ZeroExtrapolation:
    """Interpolate even-polynomial data and read off the constant term."""
    arr = _validated_taus(taus)
    y = np.asarray(list(values), dtype=float)
    if y.shape != arr.shape:
        raise ValueError("one value per tau is required")
    powers = 2 * np.arange(arr.size)
    M = arr[:, None] ** powers[None, :]
    condition = float(np.linalg.cond(M))
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise ValueError(
            f"extrapolation system is ill-conditioned (cond ~ {condition:.3g})"
        )
    coefficients = np.linalg.solve(M, y)
    coefficients.setflags(write=False)
    return ZeroExtrapolation(
        taus=tuple(float(t) for t in arr), coefficients=coefficients, condition=condition
    )


def default_tau_grid(n_tau: int, tau1: float):
    """Grid ending at ``tau1``: {tau1/sqrt(2), tau1} for two points
    (the variance-optimal spacing), geometric between tau1/2 and tau1 otherwise."""
    if n_tau < 2:
        raise ValueError("need at least two extrapolation points")
    if tau1 <= 0:
        raise ValueError("tau1 must be positive")
    if n_tau == 2:
        return (tau1 / math.sqrt(2.0), tau1)
    ratio = 0.5 ** (1.0 / (n_tau - 1))
    return tuple(tau1 * ratio ** (n_tau - 1 - i) for i in range(n_tau))


def centered_tau_grid(n_tau: int, center: float, spacing: float):
    """Arithmetic grid of ``n_tau`` points centred on ``center``."""
    if n_tau < 2:
        raise ValueError("need at least two extrapolation points")
    offset = (n_tau - 1) / 2.0
    taus = tuple(center + (i - offset) * spacing for i in range(n_tau))
    if taus[0] <= 0:
        raise ValueError("grid extends to non-positive tau; reduce the spacing")
    return taus


def hd_estimate(
    a: StateVector,
    b: StateVector,
    op: PauliOperator,
    taus,
    mode: str = "exact",
    shots: int | None = None,
    seed: int = 0,
) -> float:
    """High-depth estimate: evaluate ``f`` on the grid and extrapolate.

    Two distinct circuits per grid point (one per exponential sign).
    """
    prob = orthogonalize(a, b, op)
    f_values = [
        hd_f(prob, tau, mode=mode, shots=shots, seed=seed, tau_index=i)
        for i, tau in enumerate(taus)
    ]
    return richardson_solve(taus, f_values).q_prime


# ---------------------------------------------------------------------------
# Moment-based fast path for exact f(tau) sweeps


def taylor_terms_needed(bound: float, tol: float = 1e-15, cap: int = 1000) -> int:
    """Smallest series order whose tail bound (for argument ``bound``) is < tol."""
    term = 1.0
    for m in range(1, cap + 1):
        term *= bound / m
        if m > bound:
            ratio = bound / (m + 1)
            if term * ratio / (1.0 - ratio) < tol:
                return m
    raise RuntimeError(f"series for bound {bound} needs more than {cap} terms")


def transition_moments(prob: OrthogonalizedProblem, n_moments: int) -> np.ndarray:
    """Moments ``mu_m = <a~|A~^m|b~>`` for m = 0..n_moments.

    One operator application per order; lets a whole tau sweep of exact
    ``f`` values be evaluated from a single pass.
    """
    mu = np.empty(n_moments + 1, dtype=complex)
    v = prob.b_dot.amplitudes
    a = prob.a_dot.amplitudes
    mu[0] = np.vdot(a, v)
    for m in range(1, n_moments + 1):
        v = apply_operator_array(v, prob.op_dot)
        mu[m] = np.vdot(a, v)
    return mu


def f_parts_from_moments(moments: np.ndarray, tau: float):
    """Exact-mode ``(f_plus, f_minus)`` reconstructed from operator moments."""
    m = np.arange(moments.size)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.maximum(m[1:], 1)))))
    weights = np.exp(m * math.log(tau) - log_fact) if tau > 0 else (m == 0).astype(float)
    minus = np.sum(weights * (-1j) ** (m % 4) * moments)
    plus = np.sum(weights * (1j) ** (m % 4) * moments)
    f_minus = float(min(max(abs(minus) ** 2, 0.0), 1.0))
    f_plus = float(min(max(abs(plus) ** 2, 0.0), 1.0))
    return f_plus, f_minus


def moments_for_grid(
    prob: OrthogonalizedProblem,
    tau_max: float,
    tol: float = 1e-15,
    norm_bound: float | None = None,
) -> np.ndarray:
    """Moments sized so every tau <= tau_max is series-converged below tol.

    ``norm_bound`` may supply a tighter operator-norm bound than the default
    coefficient sum (|mu_m| <= ||A||^m makes the tail bound rigorous).
    """
    bound = prob.op_dot.coeff_norm if norm_bound is None else norm_bound
    return transition_moments(prob, taylor_terms_needed(tau_max * bound, tol))


# ---------------------------------------------------------------------------
# Shot budgeting for the high-depth estimator


@dataclass(frozen=True)
class HDShotBudget:
    """Shot plan meeting ``eps_extrap + eps_meas <= eps_target``.

    Allocations are proportional to the squared extrapolation weights
    ``V_{0i}^2`` (rounded up, at least one shot per circuit); keys are
    ``(tau_index, sign)`` with sign +1/-1 for the two exponential signs.
    """

    tau1: float
    tau0: float
    taus: tuple
    eps_target: float
    eps_extrap: float
    eps_meas: float
    allocations: dict
    n_total: int
    variance_mode: str
    q_prime: float


def hd_shot_budget(
    prob: OrthogonalizedProblem,
    tau1: float,
    eps_target: float,
    q_exact: float,
    n_tau: int = 2,
    variance_mode: str = "bernoulli",
    moments: np.ndarray | None = None,
) -> HDShotBudget:
    """Size the per-circuit shot counts for a target total error.

    The extrapolation error is computed explicitly from the infinite-shot
    estimate against ``q_exact``; the remaining budget is assigned to
    measurement uncertainty through the weighted-variance propagation of the
    extrapolation solve.  ``variance_mode`` selects the per-circuit variance
    model: ``"bernoulli"`` uses p(1-p) at the infinite-shot probabilities,
    ``"upper_bound"`` uses the worst-case value 1.

    Raises :class:`InfeasibleBudgetError` when the extrapolation error alone
    meets or exceeds the budget.
    """
    if variance_mode not in ("bernoulli", "upper_bound"):
        raise ValueError(f"unknown variance mode {variance_mode!r}")
    taus = default_tau_grid(n_tau, tau1)
    if moments is None:
        moments = moments_for_grid(prob, max(taus))
    parts = [f_parts_from_moments(moments, i_tau) for i_tau in taus]
    plan = richardson_solve(taus, [fp + fm for fp, fm in parts])
    eps_extrap = abs(q_exact - plan.q_prime)
    if eps_extrap >= eps_target:
        raise InfeasibleBudgetError(
            f"extrapolation error {eps_extrap:.4g} exhausts the budget "
            f"{eps_target:.4g} at tau1={tau1:.4g}"
        )
    eps_meas = eps_target - eps_extrap
    if variance_mode == "bernoulli":
        variances = [(fp * (1 - fp), fm * (1 - fm)) for fp, fm in parts]
    else:
        variances = [(1.0, 1.0) for _ in parts]
    v0 = plan.V[0, :]
    scale = sum(vp + vm for vp, vm in variances) / (4.0 * eps_meas**2)
    allocations = {}
    for i in range(len(taus)):
        n_i = max(1, math.ceil(scale * v0[i] ** 2))
        allocations[(i, +1)] = n_i
        allocations[(i, -1)] = n_i
    return HDShotBudget(
        tau1=float(tau1),
        tau0=float(taus[0]),
        taus=tuple(float(t) for t in taus),
        eps_target=float(eps_target),
        eps_extrap=float(eps_extrap),
        eps_meas=float(eps_meas),
        allocations=allocations,
        n_total=int(sum(allocations.values())),
        variance_mode=variance_mode,
        q_prime=plan.q_prime,
    )


# ---------------------------------------------------------------------------
# Tunable estimator


@dataclass(frozen=True)
class TTermSet:
    """Grouped-exponential overlap probabilities at a single tau.

    ``s_minus``/``s_plus`` hold the single-group values for the e^{-i tau G}
    and e^{+i tau G} circuits; the pair dicts (keys ``(u, v)`` with v < u)
    hold the composed two-group circuits.  Only the +/- sums enter the
    reconstruction, so each family's residual odd orders cancel.
    """

    s_plus: dict
    s_minus: dict
    s_plus_pairs: dict
    s_minus_pairs: dict

    @property
    def n_circuits(self) -> int:
        return (
            len(self.s_plus)
            + len(self.s_minus)
            + len(self.s_plus_pairs)
            + len(self.s_minus_pairs)
        )


def t_terms(
    prob: OrthogonalizedProblem,
    grouping: TermGrouping,
    tau: float,
    shots: int | None = None,
    seed: int = 0,
    tau_index: int = 0,
) -> TTermSet:
    """Evaluate all single- and pair-group circuits at one tau.

    Group exponentials are first-order Trotterised over the group's stored
    terms; for a pair ``(u, v)`` the v-group factor acts on the state first.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    subs = [subset_operator(prob.op_dot, g) for g in grouping.groups]
    n_g = grouping.n_groups

    def finish(value: float, circuit_index: int) -> float:
        if shots is None:
            return value
        return sample(value, shots, derive_seed(seed, tau_index, circuit_index)).estimate

    evolved_minus = [trotter_step(prob.b_dot, sub, tau, sign=+1) for sub in subs]
    evolved_plus = [trotter_step(prob.b_dot, sub, tau, sign=-1) for sub in subs]

    s_plus, s_minus, s_plus_pairs, s_minus_pairs = {}, {}, {}, {}
    circuit = 0
    for u in range(n_g):
        s_minus[u] = finish(overlap_probability(prob.a_dot, evolved_minus[u]), circuit)
        circuit += 1
        s_plus[u] = finish(overlap_probability(prob.a_dot, evolved_plus[u]), circuit)
        circuit += 1
    for u in range(1, n_g):
        for v in range(u):
            minus = trotter_step(evolved_minus[v], subs[u], tau, sign=+1)
            s_minus_pairs[(u, v)] = finish(overlap_probability(prob.a_dot, minus), circuit)
            circuit += 1
            plus = trotter_step(evolved_plus[v], subs[u], tau, sign=-1)
            s_plus_pairs[(u, v)] = finish(overlap_probability(prob.a_dot, plus), circuit)
            circuit += 1
    return TTermSet(s_plus, s_minus, s_plus_pairs, s_minus_pairs)


def t_reconstruct(terms: TTermSet, tau: float) -> float:
    """Recombine grouped terms into ``Q(tau) = |<a|A|b>|^2 + O(tau^2)``.

    ``sum_{v<u} (S+^{uv} + S-^{uv})/(2 tau^2)
    - (N_G - 2) sum_u (S+^u + S-^u)/(2 tau^2)``.
    """
    n_g = len(terms.s_plus)
    pair_sum = sum(
        terms.s_plus_pairs[key] + terms.s_minus_pairs[key] for key in terms.s_plus_pairs
    )
    single_sum = sum(terms.s_plus[u] + terms.s_minus[u] for u in terms.s_plus)
    return float((pair_sum - (n_g - 2) * single_sum) / (2.0 * tau * tau))


def t_estimate(
    a: StateVector,
    b: StateVector,
    op: PauliOperator,
    n_groups: int,
    taus,
    shots: int | None = None,
    seed: int = 0,
) -> float:
    """Tunable estimate: grouped reconstruction per tau, then extrapolation.

    ``Q(tau)`` carries an O(tau^2) residual, removed by the even-polynomial
    fit; ``n_tau (N_G^2 + N_G)`` distinct circuits in total.
    """
    prob = orthogonalize(a, b, op)
    grouping = group_terms(op, n_groups)
    q_values = [
        t_reconstruct(
            t_terms(prob, grouping, tau, shots=shots, seed=seed, tau_index=i), tau
        )
        for i, tau in enumerate(taus)
    ]
    return extrapolate_to_zero(taus, q_values).value

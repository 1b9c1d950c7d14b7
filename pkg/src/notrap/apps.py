"""Problem generators: spin operators, vibronic models, and tensor trains.

Three families of benchmark instances:

- the transverse-field test operators ``A_loc = sum_i X_i / sqrt(n)`` and
  ``A_nonloc`` (its product with ``X^(x)n``, so every term has weight n-1),
  plus a state pair with transition probability exactly 1/2;
- two-mode harmonic vibronic models related by a Duschinsky rotation, with
  16 levels per mode binary-encoded onto 4 qubits each;
- random Hermitian tensor-train matrices for the linear-solver objective.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .estimators import (
    centered_tau_grid,
    hd_estimate,
    sd_estimate,
    t_estimate,
)
from .pauli import PauliOperator, PauliString, spectral_norm
from .simulator import StateVector


class TruncationLeakageWarning(UserWarning):
    """A vibronic eigenstate has significant weight in the top ladder levels."""


def build_a_loc(n_qubits: int) -> PauliOperator:
    """Total transverse magnetisation ``sum_i X_i / sqrt(n)``."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    g = 1.0 / math.sqrt(n_qubits)
    terms = [
        (g, PauliString(n_qubits, 1 << (n_qubits - 1 - i), 0)) for i in range(n_qubits)
    ]
    return PauliOperator.from_terms(terms, n_qubits=n_qubits)


def build_a_nonloc(n_qubits: int) -> PauliOperator:
    """Maximally delocalised variant: X on every qubit except one, per term."""
    if n_qubits < 2:
        raise ValueError("need at least two qubits")
    g = 1.0 / math.sqrt(n_qubits)
    full = (1 << n_qubits) - 1
    terms = [
        (g, PauliString(n_qubits, full ^ (1 << (n_qubits - 1 - i)), 0))
        for i in range(n_qubits)
    ]
    return PauliOperator.from_terms(terms, n_qubits=n_qubits)


def fig4_states(n_qubits: int):
    """State pair with ``|<a|A_nonloc|b>|^2 = 0.5`` exactly and ``<a|b> != 0``.

    ``a`` is the all-zeros state and ``b = (|0...0> + A_nonloc|0...0>)/sqrt(2)``;
    the image ``A_nonloc|0...0>`` is a unit-norm superposition of n basis
    states orthogonal to ``|0...0>``, which makes the overlap exact.
    """
    if n_qubits < 3:
        raise ValueError("construction defined for three or more qubits")
    a = StateVector.zero_state(n_qubits)
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[0] = 1.0 / math.sqrt(2.0)
    full = (1 << n_qubits) - 1
    w = 1.0 / math.sqrt(2.0 * n_qubits)
    for i in range(n_qubits):
        amps[full ^ (1 << (n_qubits - 1 - i))] = w
    return a, StateVector(n_qubits, amps)


# ---------------------------------------------------------------------------
# Vibronic models


@dataclass(frozen=True)
class DuschinskyModel:
    """Two-mode harmonic surfaces related by ``q' = S q + d``.

    Frequencies are in cm^-1 (only ratios matter for the eigenstates); the
    displacement is dimensionless in the excited-surface coordinates.  The
    transition operator is ``mu = c_I + c_0 q_0 + c_1 q_1`` in ground-surface
    dimensionless coordinates.
    """

    name: str
    s_matrix: np.ndarray
    omega_ground: np.ndarray
    omega_excited: np.ndarray
    displacement: np.ndarray
    mu_coeffs: tuple
    n_levels: int = 16

    def __post_init__(self) -> None:
        s = np.asarray(self.s_matrix, dtype=float)
        og = np.asarray(self.omega_ground, dtype=float)
        oe = np.asarray(self.omega_excited, dtype=float)
        d = np.asarray(self.displacement, dtype=float)
        if s.shape != (2, 2) or og.shape != (2,) or oe.shape != (2,) or d.shape != (2,):
            raise ValueError("expected a two-mode model")
        if np.max(np.abs(s.T @ s - np.eye(2))) > 1e-10:
            raise ValueError("rotation matrix is not orthogonal")
        if np.any(og <= 0) or np.any(oe <= 0):
            raise ValueError("frequencies must be positive")
        if len(self.mu_coeffs) != 3:
            raise ValueError("mu coefficients are (c_I, c_0, c_1)")
        if self.n_levels < 2 or self.n_levels & (self.n_levels - 1):
            raise ValueError("levels per mode must be a power of two")
        for name, arr in (("s_matrix", s), ("omega_ground", og),
                          ("omega_excited", oe), ("displacement", d)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "mu_coeffs", tuple(float(c) for c in self.mu_coeffs))

    @property
    def n_modes(self) -> int:
        return 2

    @property
    def qubits_per_mode(self) -> int:
        return self.n_levels.bit_length() - 1

    @property
    def n_qubits(self) -> int:
        return 2 * self.qubits_per_mode


def naphthalene() -> DuschinskyModel:
    return DuschinskyModel(
        name="naphthalene",
        s_matrix=np.array([[0.98, -0.20], [0.20, 0.98]]) / math.hypot(0.98, 0.20),
        omega_ground=np.array([509.0, 938.0]),
        omega_excited=np.array([438.0, 912.0]),
        displacement=np.array([0.0, 0.0]),
        mu_coeffs=(1.0, 1.0, -1.0),
    )


def phenanthrene() -> DuschinskyModel:
    return DuschinskyModel(
        name="phenanthrene",
        s_matrix=np.array([[0.9055, -0.4240], [0.4240, 0.9055]])
        / math.hypot(0.9055, 0.4240),
        omega_ground=np.array([700.0, 800.0]),
        omega_excited=np.array([679.0, 796.0]),
        displacement=np.array([0.1650, 0.0780]),
        mu_coeffs=(1.0, 1.5, -0.5),
    )


BUILTIN_MOLECULES = {"nap": naphthalene, "phe": phenanthrene}


def load_duschinsky(path) -> DuschinskyModel:
    """Read a model parameter file (``key = values`` lines).

    Keys: ``s`` (row-major 2x2), ``omega_g``, ``omega_e``, ``d``, ``mu``
    (c_I c_0 c_1); optional ``name`` and ``n_levels``.
    """
    fields: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            fields[key.strip().lower()] = value.strip()
    try:
        s = np.array([float(v) for v in fields["s"].split()]).reshape(2, 2)
        # Printed rotation constants are usually rounded; renormalise the
        # columns when they are close to unit length, reject otherwise.
        norms = np.linalg.norm(s, axis=0)
        if np.max(np.abs(norms - 1.0)) > 1e-3:
            raise ValueError(f"rotation columns have norms {norms}; not a rotation")
        return DuschinskyModel(
            name=fields.get("name", "custom"),
            s_matrix=s / norms,
            omega_ground=np.array([float(v) for v in fields["omega_g"].split()]),
            omega_excited=np.array([float(v) for v in fields["omega_e"].split()]),
            displacement=np.array([float(v) for v in fields["d"].split()]),
            mu_coeffs=tuple(float(v) for v in fields["mu"].split()),
            n_levels=int(fields.get("n_levels", "16")),
        )
    except KeyError as exc:
        raise ValueError(f"model file is missing field {exc.args[0]!r}") from None


def _ladder(n_levels: int) -> np.ndarray:
    a = np.zeros((n_levels, n_levels))
    for i in range(n_levels - 1):
        a[i, i + 1] = math.sqrt(i + 1)
    return a


def _mode_operator(op: np.ndarray, mode: int, n_levels: int) -> np.ndarray:
    eye = np.eye(n_levels)
    return np.kron(op, eye) if mode == 0 else np.kron(eye, op)


@dataclass(frozen=True)
class VibronicProblem:
    """Diagonalised ground/excited surfaces plus the transition operator."""

    model: DuschinskyModel
    ground_energies: np.ndarray
    ground_states: np.ndarray  # columns, ascending energy
    excited_energies: np.ndarray
    excited_states: np.ndarray
    mu_matrix: np.ndarray
    mu_operator: PauliOperator

    @property
    def n_qubits(self) -> int:
        return self.model.n_qubits

    def _leakage(self, column: np.ndarray) -> float:
        n = self.model.n_levels
        grid = np.abs(column.reshape(n, n)) ** 2
        return float(grid[n - 2 :, :].sum() + grid[:, n - 2 :].sum())

    def _as_state(self, column: np.ndarray, label: str) -> StateVector:
        leak = self._leakage(column)
        if leak > 1e-4:
            warnings.warn(
                f"{label} carries weight {leak:.2e} in the top two ladder levels; "
                "the 16-level truncation may be unreliable",
                TruncationLeakageWarning,
                stacklevel=3,
            )
        return StateVector(self.model.n_qubits, column)

    def ground_state(self, n: int = 0) -> StateVector:
        return self._as_state(self.ground_states[:, n], f"ground eigenstate {n}")

    def excited_state(self, n: int) -> StateVector:
        return self._as_state(self.excited_states[:, n], f"excited eigenstate {n}")

    def transition_probability(self, n_excited: int, n_ground: int = 0) -> float:
        """Dense-diagonalisation value of ``|<psi_g,n| mu |psi'_N>|^2``."""
        bra = self.ground_states[:, n_ground]
        ket = self.excited_states[:, n_excited]
        return float(abs(np.vdot(bra, self.mu_matrix @ ket)) ** 2)

    def brightest_transitions(self, count: int, n_ground: int = 0):
        """Excited-level indices of the strongest transitions, descending."""
        intensities = [
            self.transition_probability(n, n_ground)
            for n in range(self.excited_states.shape[1])
        ]
        order = sorted(range(len(intensities)), key=lambda n: (-intensities[n], n))
        return tuple(order[:count])


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    out = vectors.astype(complex)
    for j in range(out.shape[1]):
        k = int(np.argmax(np.abs(out[:, j])))
        pivot = out[k, j]
        if abs(pivot) > 0:
            out[:, j] *= abs(pivot) / pivot
    return out


def build_vibronic(model: DuschinskyModel) -> VibronicProblem:
    """Diagonalise both surfaces in the ground-mode basis and encode ``mu``.

    Ground dimensionless coordinates use each ground frequency; the excited
    surface is expressed through the mass-weighted relation
    ``Q'_i = sum_j S_ij Q_j + d_i / sqrt(omega_e,i)`` with
    ``Q_j = q_j / sqrt(omega_g,j)`` and ``P'_i = sum_j S_ij P_j``, then
    ``H_e = (1/2) sum_i (P'_i^2 + omega_e,i^2 Q'_i^2)``.
    """
    n = model.n_levels
    dim = n * n
    ladder = _ladder(n)
    q1 = (ladder + ladder.T) / math.sqrt(2.0)
    p1 = 1j * (ladder.T - ladder) / math.sqrt(2.0)
    number = ladder.T @ ladder

    q = [_mode_operator(q1, m, n) for m in range(2)]
    p = [_mode_operator(p1, m, n) for m in range(2)]
    num = [_mode_operator(number, m, n) for m in range(2)]

    og = model.omega_ground
    oe = model.omega_excited
    s = model.s_matrix
    d = model.displacement

    h_ground = sum(og[m] * (num[m] + 0.5 * np.eye(dim)) for m in range(2))

    big_q = [q[m] / math.sqrt(og[m]) for m in range(2)]
    big_p = [math.sqrt(og[m]) * p[m] for m in range(2)]
    h_excited = np.zeros((dim, dim), dtype=complex)
    for i in range(2):
        qp = s[i, 0] * big_q[0] + s[i, 1] * big_q[1] + (d[i] / math.sqrt(oe[i])) * np.eye(dim)
        pp = s[i, 0] * big_p[0] + s[i, 1] * big_p[1]
        h_excited += 0.5 * (pp @ pp + oe[i] ** 2 * (qp @ qp))

    ge, gv = np.linalg.eigh(h_ground)
    ee, ev = np.linalg.eigh(h_excited)
    gv = _fix_phases(gv)
    ev = _fix_phases(ev)

    c_i, c_0, c_1 = model.mu_coeffs
    mu = c_i * np.eye(dim) + c_0 * q[0] + c_1 * q[1]
    mu_operator = encode_dlevel(mu)

    for arr in (ge, gv, ee, ev, mu):
        arr.setflags(write=False)
    return VibronicProblem(
        model=model,
        ground_energies=ge,
        ground_states=gv.astype(complex),
        excited_energies=ee,
        excited_states=ev.astype(complex),
        mu_matrix=mu.astype(complex),
        mu_operator=mu_operator,
    )


def encode_dlevel(matrix: np.ndarray, tol: float = 1e-12) -> PauliOperator:
    """Binary-encode a d-level Hermitian operator onto ceil(log2 d) qubits.

    The matrix is zero-padded to the next power of two and projected exactly
    onto the Pauli basis, so ``to_dense`` round-trips to the padded input.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    d = m.shape[0]
    n_qubits = max(1, (d - 1).bit_length())
    full = 1 << n_qubits
    if full != d:
        padded = np.zeros((full, full), dtype=complex)
        padded[:d, :d] = m
        m = padded
    return PauliOperator.from_dense(m, tol=tol)


# ---------------------------------------------------------------------------
# Tensor trains


@dataclass(frozen=True)
class TensorTrainMatrix:
    """Sum of neighbouring two-site products ``R^(i) (x) R^(i')`` on a chain."""

    n_train: int
    d_local: int
    seed: int
    factors: tuple  # ((R_i, R_i'), ...) for sites (i, i+1)

    @property
    def dimension(self) -> int:
        return self.d_local**self.n_train

    @property
    def n_qubits(self) -> int:
        return self.n_train * (self.d_local.bit_length() - 1)

    def assemble(self) -> np.ndarray:
        """Dense raw sum (identities implicit on untouched sites)."""
        dim = self.dimension
        out = np.zeros((dim, dim))
        for i, (left, right) in enumerate(self.factors):
            ops = [np.eye(self.d_local)] * self.n_train
            ops[i] = left
            ops[i + 1] = right
            term = ops[0]
            for op in ops[1:]:
                term = np.kron(term, op)
            out += term
        return out

    def hermitian_part(self) -> np.ndarray:
        a = self.assemble()
        return (a + a.T) / 2.0


def build_tensor_train(seed: int, n_train: int, d_local: int):
    """Random tensor-train matrix plus its symmetrised Pauli form.

    Factor entries are iid standard normal; the assembled matrix is
    symmetrised to ``(A + A^T)/2`` before encoding.
    """
    if d_local not in (2, 4, 8):
        raise ValueError("local dimension must be 2, 4, or 8")
    if n_train < 2:
        raise ValueError("need at least two sites")
    n_qubits = n_train * (d_local.bit_length() - 1)
    if n_qubits > 12:
        raise ValueError("dense assembly limited to 12 qubits")
    rng = np.random.default_rng(seed)
    factors = tuple(
        (rng.standard_normal((d_local, d_local)), rng.standard_normal((d_local, d_local)))
        for _ in range(n_train - 1)
    )
    train = TensorTrainMatrix(n_train=n_train, d_local=d_local, seed=int(seed), factors=factors)
    op = PauliOperator.from_dense(train.hermitian_part().astype(complex))
    return train, op


def vqls_objective(
    x: StateVector,
    op: PauliOperator,
    b: StateVector | None = None,
    method: str = "hd",
    taus=None,
    n_tau: int = 3,
    n_groups: int | None = None,
    shots: int | None = None,
    seed: int = 0,
) -> float:
    """Linear-solver objective ``|<x|A|b>|^2`` via a chosen estimator.

    ``b`` defaults to the all-zeros basis state.  The default tau grid is
    centred on ``1/||A||`` with spacing ``0.1/||A||``.
    """
    if b is None:
        b = StateVector.zero_state(op.n_qubits)
    if method == "sd":
        return sd_estimate(x, b, op, shots=shots, seed=seed)
    if taus is None:
        norm = spectral_norm(op)
        taus = centered_tau_grid(n_tau, 1.0 / norm, 0.1 / norm)
    if method == "hd":
        return hd_estimate(x, b, op, taus, shots=shots, seed=seed)
    if method == "t":
        if n_groups is None:
            raise ValueError("the grouped method requires n_groups")
        return t_estimate(x, b, op, n_groups, taus, shots=shots, seed=seed)
    raise ValueError(f"unknown method {method!r}")

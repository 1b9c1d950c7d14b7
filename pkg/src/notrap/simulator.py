"""Matrix-free statevector engine.

States are immutable; every operation returns a fresh vector.  Pauli strings
act by index permutation (x_mask) and sign flips (z_mask), so no 2^n x 2^n
matrix is ever formed and registers in the low-twenties of qubits stay
tractable.  Exponentials of full operators use a truncated Taylor series
with a coefficient-norm tail bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .pauli import PauliOperator, PauliString

NORM_TOL = 1e-10


@dataclass(frozen=True)
class StateVector:
    """Normalised complex amplitudes over the 2^n computational basis.

    Index bit ``n - 1 - j`` holds qubit ``j`` (qubit 0 is the most
    significant bit), matching the mask convention in :mod:`notrap.pauli`.
    """

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"expected {1 << self.n_qubits} amplitudes, got {amps.shape}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {NORM_TOL}")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero_state(cls, n_qubits: int) -> "StateVector":
        return cls.basis_state(n_qubits, 0)

    @classmethod
    def basis_state(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex)
        n = amps.shape[0].bit_length() - 1
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    @classmethod
    def haar_random(cls, n_qubits: int, seed) -> "StateVector":
        """Haar-distributed pure state (normalised complex Gaussian vector)."""
        rng = np.random.default_rng(seed)
        amps = rng.standard_normal(1 << n_qubits) + 1j * rng.standard_normal(
            1 << n_qubits
        )
        return cls(n_qubits, amps / np.linalg.norm(amps))

    def prepend_ancilla(self, value: int) -> "StateVector":
        """Tensor ``|value>`` onto a new leading (most significant) qubit."""
        dim = 1 << self.n_qubits
        amps = np.zeros(2 * dim, dtype=complex)
        if value == 0:
            amps[:dim] = self.amplitudes
        elif value == 1:
            amps[dim:] = self.amplitudes
        else:
            raise ValueError("ancilla value must be 0 or 1")
        return StateVector(self.n_qubits + 1, amps)


@lru_cache(maxsize=8)
def _index_array(n_qubits: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    idx.setflags(write=False)
    return idx


def _parity_signs_uncached(n_qubits: int, z_mask: int) -> np.ndarray:
    v = (_index_array(n_qubits) & z_mask).copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> shift
    return 1.0 - 2.0 * (v & 1)


@lru_cache(maxsize=128)
def _parity_signs_cached(n_qubits: int, z_mask: int) -> np.ndarray:
    signs = _parity_signs_uncached(n_qubits, z_mask)
    signs.setflags(write=False)
    return signs


def _parity_signs(n_qubits: int, z_mask: int) -> np.ndarray:
    # Cache only desk-scale registers; a 2^22 float array is 33 MB.
    if n_qubits <= 16:
        return _parity_signs_cached(n_qubits, z_mask)
    return _parity_signs_uncached(n_qubits, z_mask)


def apply_string_array(amplitudes: np.ndarray, p: PauliString) -> np.ndarray:
    """Raw-kernel form of :func:`apply_pauli` acting on a bare array."""
    n = p.n_qubits
    phase = 1j ** p.phase_exp * (-1j) ** ((p.x_mask & p.z_mask).bit_count() % 4)
    out = amplitudes[_index_array(n) ^ p.x_mask] if p.x_mask else amplitudes.copy()
    if p.z_mask:
        out = out * _parity_signs(n, p.z_mask)
    if phase != 1:
        out = out * phase
    return out


def apply_operator_array(amplitudes: np.ndarray, a: PauliOperator) -> np.ndarray:
    """``sum_k g_k sigma(P_k) |amplitudes>`` without forming a dense matrix."""
    out = np.zeros_like(amplitudes)
    for g, s in zip(a.coeffs, a.strings):
        out += g * apply_string_array(amplitudes, s)
    return out


def apply_pauli(state: StateVector, p: PauliString) -> StateVector:
    """Apply a single Pauli string; exactly norm preserving."""
    if p.n_qubits != state.n_qubits:
        raise ValueError(
            f"qubit count mismatch: state {state.n_qubits}, string {p.n_qubits}"
        )
    return StateVector(state.n_qubits, apply_string_array(state.amplitudes, p))


def apply_pauli_exponential(state: StateVector, p: PauliString, theta: float) -> StateVector:
    """Apply ``exp(-i theta P) = cos(theta) I - i sin(theta) P``.

    Uses the involution ``P^2 = I``, which requires a phase-free string.
    """
    if p.n_qubits != state.n_qubits:
        raise ValueError(
            f"qubit count mismatch: state {state.n_qubits}, string {p.n_qubits}"
        )
    if p.phase_exp != 0:
        raise ValueError("exponential requires a phase-free Pauli string")
    amps = np.cos(theta) * state.amplitudes - 1j * np.sin(theta) * apply_string_array(
        state.amplitudes, p
    )
    return StateVector(state.n_qubits, amps)


def trotter_step(
    state: StateVector, a: PauliOperator, tau: float, sign: int = 1
) -> StateVector:
    """One first-order product-formula step for ``exp(-i sign tau A)``.

    Factors ``exp(-i sign tau g_k P_k)`` are applied in stored term order
    (term 0 hits the state first).
    """
    if a.n_qubits != state.n_qubits:
        raise ValueError(
            f"qubit count mismatch: state {state.n_qubits}, operator {a.n_qubits}"
        )
    amps = state.amplitudes
    for g, s in zip(a.coeffs, a.strings):
        theta = sign * tau * g
        amps = np.cos(theta) * amps - 1j * np.sin(theta) * apply_string_array(amps, s)
    return StateVector(state.n_qubits, amps)


def exact_exponential(
    state: StateVector,
    a: PauliOperator,
    tau: float,
    sign: int = 1,
    tol: float = 1e-12,
    max_terms: int | None = None,
) -> StateVector:
    """Apply ``exp(-i sign tau A)`` via a truncated Taylor series.

    The series is extended until the bound on the remaining tail (from the
    coefficient norm ``sum |g_k| >= ||A||``) drops below ``tol``; raises
    ``RuntimeError`` if the term cap is reached first.
    """
    if a.n_qubits != state.n_qubits:
        raise ValueError(
            f"qubit count mismatch: state {state.n_qubits}, operator {a.n_qubits}"
        )
    bound = abs(tau) * a.coeff_norm
    cap = max_terms if max_terms is not None else max(64, int(4 * bound) + 32)
    acc = state.amplitudes.astype(complex)
    term = acc
    scale = -1j * sign * tau
    for m in range(1, cap + 1):
        term = (scale / m) * apply_operator_array(term, a)
        acc = acc + term
        if m >= bound:
            ratio = bound / (m + 1)
            tail = float(np.linalg.norm(term)) * ratio / (1.0 - ratio)
            if tail < tol:
                return StateVector(state.n_qubits, acc)
    raise RuntimeError(
        f"Taylor series for the exponential did not reach tol={tol} "
        f"within {cap} terms (tau*sum|g| = {bound:.3g})"
    )


def overlap_probability(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|^2``, clipped to [0, 1] against float dust."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(
            f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}"
        )
    value = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(max(value, 0.0), 1.0))


@dataclass(frozen=True)
class ShotSample:
    """Finite-shot binomial estimate of an outcome probability."""

    probability_true: float
    shots: int
    seed: int
    successes: int
    estimate: float


def sample(p: float, shots: int, seed: int) -> ShotSample:
    """Draw ``binomial(shots, p) / shots``; deterministic for a given seed."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if -1e-9 <= p < 0.0:
        p = 0.0
    elif 1.0 < p <= 1.0 + 1e-9:
        p = 1.0
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    rng = np.random.default_rng(np.random.PCG64(seed))
    successes = int(rng.binomial(shots, p))
    return ShotSample(p, shots, int(seed), successes, successes / shots)


def derive_seed(root_seed: int, *path: int) -> int:
    """Stable per-circuit seed from an experiment seed and an index path.

    Built on ``numpy.random.SeedSequence`` so results do not depend on
    evaluation order, thread count, or the process hash seed.
    """
    ss = np.random.SeedSequence(entropy=int(root_seed), spawn_key=tuple(int(i) for i in path))
    return int(ss.generate_state(1, np.uint64)[0])

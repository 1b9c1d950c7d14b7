"""Independent dense reference implementations for cross-checking.

Everything is built from literal 2x2 matrices, ``np.kron``, and scipy's
dense linear algebra; none of the package's mask-based kernels are reused,
so agreement between the two routes is a genuine check.
"""

import numpy as np
from scipy.linalg import expm

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_string(label):
    """Tensor product of single-qubit matrices, leftmost character first."""
    m = np.array([[1.0 + 0j]])
    for ch in label:
        m = np.kron(m, PAULI_1Q[ch])
    return m


def dense_operator(terms):
    """``sum g * kron(label)`` over ``(g, label)`` pairs."""
    terms = list(terms)
    dim = 2 ** len(terms[0][1])
    m = np.zeros((dim, dim), dtype=complex)
    for g, label in terms:
        m += g * dense_string(label)
    return m


def transition_probability(a_vec, matrix, b_vec):
    return float(abs(np.vdot(a_vec, matrix @ b_vec)) ** 2)


def evolve(matrix, tau, vec, sign=1):
    """``exp(-i sign tau M) @ vec`` through scipy's dense expm."""
    return expm(-1j * sign * tau * matrix) @ vec


def haar_vector(n_qubits, rng):
    v = rng.standard_normal(2**n_qubits) + 1j * rng.standard_normal(2**n_qubits)
    return v / np.linalg.norm(v)


def random_labels(rng, n_qubits, n_terms):
    """Distinct random Pauli labels on the given register."""
    labels = set()
    while len(labels) < n_terms:
        labels.add("".join(rng.choice(list("IXYZ")) for _ in range(n_qubits)))
    return sorted(labels)


def random_instances(seed, count, max_qubits=5, max_terms=6, equal_state_every=5):
    """Deterministic random-problem stream: ``(n_q, [(g, label)], a, b)``.

    Every ``equal_state_every``-th instance uses a = b; the rest are
    independent Haar states (generically non-orthogonal).
    """
    rng = np.random.default_rng(seed)
    out = []
    for index in range(count):
        n_q = int(rng.integers(2, max_qubits + 1))
        n_terms = int(rng.integers(1, max_terms + 1))
        labels = random_labels(rng, n_q, n_terms)
        terms = [(float(rng.uniform(-1.0, 1.0)), label) for label in labels]
        a = haar_vector(n_q, rng)
        b = a if index % equal_state_every == 0 else haar_vector(n_q, rng)
        out.append((n_q, terms, a, b))
    return out

"""Pauli-string algebra on a symplectic (x_mask, z_mask) bit representation.

Conventions used throughout the package:

- Qubit ``j`` of an ``n``-qubit register is stored in bit ``n - 1 - j`` of
  each mask, so the binary literal of a mask reads left-to-right like the
  label string ("XZI" -> x_mask 0b100, z_mask 0b010).  The same ordering is
  used for statevector indices: qubit 0 is the most significant bit.
- A string's matrix is ``i**phase_exp`` times the tensor product of
  {I, X, Y, Z} factors, with Y on qubits where both masks are set.
- Operators are real linear combinations of phase-free strings; real
  coefficients plus zero stored phases make Hermiticity automatic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

_LABEL_TO_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_TO_LABEL = {v: k for k, v in _LABEL_TO_XZ.items()}

#: Largest register for which dense 2^n x 2^n matrices are constructed.
DENSE_QUBIT_LIMIT = 12


@dataclass(frozen=True)
class PauliString:
    """A single Pauli string ``i**phase_exp * P_0 (x) ... (x) P_{n-1}``."""

    n_qubits: int
    x_mask: int
    z_mask: int
    phase_exp: int = 0

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        full = (1 << self.n_qubits) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask has bits outside the register")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def from_label(cls, label: str, phase_exp: int = 0) -> "PauliString":
        """Build from a label such as ``"XZI"`` (leftmost character = qubit 0)."""
        label = label.strip().upper()
        x = z = 0
        for ch in label:
            try:
                xb, zb = _LABEL_TO_XZ[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli character {ch!r}") from None
            x = (x << 1) | xb
            z = (z << 1) | zb
        return cls(len(label), x, z, phase_exp)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @property
    def label(self) -> str:
        chars = []
        for j in range(self.n_qubits):
            bit = self.n_qubits - 1 - j
            chars.append(_XZ_TO_LABEL[((self.x_mask >> bit) & 1, (self.z_mask >> bit) & 1)])
        return "".join(chars)

    @property
    def weight(self) -> int:
        """Number of non-identity qubit slots."""
        return (self.x_mask | self.z_mask).bit_count()

    @property
    def phase(self) -> complex:
        return 1j ** self.phase_exp

    def prepend_qubit(self, kind: str) -> "PauliString":
        """Return the string ``kind (x) self`` acting on one extra leading qubit."""
        xb, zb = _LABEL_TO_XZ[kind.upper()]
        bit = 1 << self.n_qubits
        return PauliString(
            self.n_qubits + 1,
            self.x_mask | (bit if xb else 0),
            self.z_mask | (bit if zb else 0),
            self.phase_exp,
        )

    def to_matrix(self) -> np.ndarray:
        """Dense matrix representation (guarded by :data:`DENSE_QUBIT_LIMIT`)."""
        if self.n_qubits > DENSE_QUBIT_LIMIT:
            raise ValueError(
                f"dense matrices limited to {DENSE_QUBIT_LIMIT} qubits, got {self.n_qubits}"
            )
        dim = 1 << self.n_qubits
        cols = np.arange(dim)
        rows = cols ^ self.x_mask
        # sigma|i> = i**(phase_exp + |x&z|) * (-1)**parity(i & z) |i ^ x>
        entry = 1j ** ((self.phase_exp + (self.x_mask & self.z_mask).bit_count()) % 4)
        signs = 1.0 - 2.0 * _bit_parity(cols & self.z_mask)
        m = np.zeros((dim, dim), dtype=complex)
        m[rows, cols] = entry * signs
        return m

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        pre = {0: "", 1: "i*", 2: "-", 3: "-i*"}[self.phase_exp]
        return f"PauliString({pre}{self.label})"


def _bit_parity(values: np.ndarray) -> np.ndarray:
    """Parity of the set bits of each entry (vectorised popcount mod 2)."""
    v = values.astype(np.int64, copy=True)
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> shift
    return (v & 1).astype(np.float64)


def multiply(p: PauliString, q: PauliString) -> PauliString:
    """Exact Pauli group product: ``sigma(result) = sigma(p) @ sigma(q)``.

    Phases are tracked mod 4 with integer arithmetic, so products are exact.
    """
    if p.n_qubits != q.n_qubits:
        raise ValueError(f"qubit count mismatch: {p.n_qubits} vs {q.n_qubits}")
    x = p.x_mask ^ q.x_mask
    z = p.z_mask ^ q.z_mask
    # Each factor is i**(x.z) X^x Z^z; commuting Z^z past X^x costs (-1)**(z.x).
    k = (
        p.phase_exp
        + q.phase_exp
        + (p.x_mask & p.z_mask).bit_count()
        + (q.x_mask & q.z_mask).bit_count()
        + 2 * (p.z_mask & q.x_mask).bit_count()
        - (x & z).bit_count()
    )
    return PauliString(p.n_qubits, x, z, k % 4)


def weight(p: PauliString) -> int:
    """Locality of a string: its number of non-identity slots."""
    return p.weight


@dataclass(frozen=True)
class PauliOperator:
    """Real linear combination ``sum_k g_k P_k`` of distinct, phase-free strings.

    Term order is preserved from construction; grouping and Trotter products
    rely on it.
    """

    n_qubits: int
    coeffs: tuple = ()
    strings: tuple = ()

    def __post_init__(self) -> None:
        if len(self.coeffs) != len(self.strings):
            raise ValueError("coefficient/string length mismatch")
        seen = set()
        for g, s in zip(self.coeffs, self.strings):
            if s.n_qubits != self.n_qubits:
                raise ValueError("all strings must share the operator qubit count")
            if s.phase_exp != 0:
                raise ValueError("operator strings must carry no phase")
            if g == 0.0:
                raise ValueError("zero coefficients are not stored")
            key = (s.x_mask, s.z_mask)
            if key in seen:
                raise ValueError(f"duplicate string {s.label}")
            seen.add(key)

    @classmethod
    def from_terms(
        cls,
        terms: Iterable,
        n_qubits: int | None = None,
        tol: float = 0.0,
    ) -> "PauliOperator":
        """Canonicalise ``(coefficient, string)`` pairs.

        Stored phases are folded into the coefficients (which must end up
        real), duplicate strings are merged into the first occurrence, and
        coefficients with ``|g| <= tol`` are dropped.
        """
        order: list = []
        acc: dict = {}
        for g, s in terms:
            if n_qubits is None:
                n_qubits = s.n_qubits
            value = complex(g) * s.phase
            if abs(value.imag) > 1e-12 * max(1.0, abs(value.real)):
                raise ValueError(f"non-real coefficient {value} for {s.label}")
            key = (s.x_mask, s.z_mask)
            if key not in acc:
                order.append(key)
                acc[key] = [0.0, PauliString(s.n_qubits, s.x_mask, s.z_mask)]
            acc[key][0] += value.real
        if n_qubits is None:
            raise ValueError("cannot infer qubit count from an empty term list")
        coeffs, strings = [], []
        for key in order:
            g, s = acc[key]
            if abs(g) > tol:
                coeffs.append(float(g))
                strings.append(s)
        return cls(n_qubits, tuple(coeffs), tuple(strings))

    @classmethod
    def from_dense(cls, matrix: np.ndarray, tol: float = 1e-12) -> "PauliOperator":
        """Exact Pauli-basis projection of a Hermitian matrix.

        Coefficients are ``Tr(P_k M) / 2**n``; entries below ``tol`` are
        dropped.  Raises if the projection yields non-real coefficients
        (i.e. the input is not Hermitian).
        """
        terms = pauli_decompose(np.asarray(matrix, dtype=complex), tol=tol)
        out = []
        scale = max(1.0, float(np.max(np.abs(matrix))) if matrix.size else 1.0)
        for g, s in terms:
            if abs(g.imag) > 1e-10 * scale:
                raise ValueError("matrix is not Hermitian: complex Pauli coefficients")
            out.append((g.real, s))
        return cls.from_terms(out, n_qubits=terms[0][1].n_qubits if terms else None)

    @property
    def n_terms(self) -> int:
        return len(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    @property
    def terms(self) -> tuple:
        return tuple(zip(self.coeffs, self.strings))

    @property
    def max_weight(self) -> int:
        return max((s.weight for s in self.strings), default=0)

    @property
    def coeff_norm(self) -> float:
        """Sum of |g_k|, an upper bound on the spectral norm."""
        return float(sum(abs(g) for g in self.coeffs))

    def to_dense(self) -> np.ndarray:
        """Dense Hermitian matrix ``sum_k g_k sigma(P_k)`` (desk scale only)."""
        if self.n_qubits > DENSE_QUBIT_LIMIT:
            raise ValueError(
                f"dense matrices limited to {DENSE_QUBIT_LIMIT} qubits, got {self.n_qubits}"
            )
        dim = 1 << self.n_qubits
        m = np.zeros((dim, dim), dtype=complex)
        for g, s in zip(self.coeffs, self.strings):
            m += g * s.to_matrix()
        return m

    def scaled(self, factor: float) -> "PauliOperator":
        return PauliOperator(
            self.n_qubits, tuple(float(factor) * g for g in self.coeffs), self.strings
        )

    def prepend_qubit(self, kind: str) -> "PauliOperator":
        """Tensor ``kind`` onto a new leading qubit of every term."""
        return PauliOperator(
            self.n_qubits + 1,
            self.coeffs,
            tuple(s.prepend_qubit(kind) for s in self.strings),
        )

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        body = " + ".join(f"{g:g}*{s.label}" for g, s in self.terms[:4])
        more = "" if len(self) <= 4 else f" + ... ({len(self)} terms)"
        return f"PauliOperator({body}{more})"


def spectral_norm(
    a: PauliOperator,
    tol: float = 1e-8,
    max_iterations: int = 10_000,
    seed: int = 0,
) -> float:
    """Largest singular value of the operator.

    Dense eigensolve up to :data:`DENSE_QUBIT_LIMIT` qubits; matrix-free
    power iteration on larger registers (raises ``RuntimeError`` with the
    iteration cap if the estimate has not settled).
    """
    if a.n_qubits <= DENSE_QUBIT_LIMIT:
        return float(np.max(np.abs(np.linalg.eigvalsh(a.to_dense()))))

    from . import simulator  # deferred: simulator imports this module's types

    dim = 1 << a.n_qubits
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(max_iterations):
        w = simulator.apply_operator_array(v, a)
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        if abs(norm - estimate) <= 0.01 * tol * max(norm, 1e-300):
            return norm
        estimate = norm
        v = w / norm
    raise RuntimeError(
        f"power iteration did not converge within {max_iterations} iterations"
    )


def pauli_decompose(matrix: np.ndarray, tol: float = 1e-12):
    """Expand a matrix in the Pauli basis: ``M = sum_k c_k sigma(P_k)``.

    Returns ``(complex coefficient, PauliString)`` pairs with ``|c| > tol``.
    Runs in O(4^n) by recursive block splitting; branches whose entries all
    fall below ``tol`` are pruned (children coefficients are bounded by the
    parent block's max entry).
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("expected a square matrix")
    dim = matrix.shape[0]
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValueError(f"matrix dimension {dim} is not a power of two")
    if n == 0:
        raise ValueError("need at least a 2x2 matrix")

    results: list = []

    def split(block: np.ndarray, qubit: int, x_acc: int, z_acc: int) -> None:
        if np.max(np.abs(block)) <= tol:
            return
        if qubit == n:
            results.append((complex(block[0, 0]), PauliString(n, x_acc, z_acc)))
            return
        h = block.shape[0] // 2
        a, b = block[:h, :h], block[:h, h:]
        c, d = block[h:, :h], block[h:, h:]
        bit = 1 << (n - 1 - qubit)
        split((a + d) / 2, qubit + 1, x_acc, z_acc)                # I
        split((b + c) / 2, qubit + 1, x_acc | bit, z_acc)          # X
        split(1j * (b - c) / 2, qubit + 1, x_acc | bit, z_acc | bit)  # Y
        split((a - d) / 2, qubit + 1, x_acc, z_acc | bit)          # Z

    split(matrix, 0, 0, 0)
    return results


MatrixLike = Union[np.ndarray, PauliOperator, "tuple"]


def hermitian_embed(m: MatrixLike, tol: float = 1e-12) -> PauliOperator:
    """Embed a (possibly non-Hermitian) matrix as a Hermitian operator.

    With ``A = A_H + A_AH`` split into Hermitian and anti-Hermitian parts,
    the output on one extra leading qubit is ``X (x) A_H + Y (x) (-i A_AH)``,
    whose off-diagonal blocks are exactly ``A`` (lower-left) and ``A^dagger``
    (upper-right).  Transition magnitudes through the off-diagonal blocks
    therefore reproduce ``|<x|A|b>|``.

    Accepts a dense square matrix (power-of-two dimension), a
    :class:`PauliOperator` (already Hermitian), or a pair
    ``(hermitian_part, minus_i_antihermitian_part)`` of operators.
    """
    if isinstance(m, PauliOperator):
        return m.prepend_qubit("X")
    if isinstance(m, tuple):
        h_part, ah_part = m
        if h_part.n_qubits != ah_part.n_qubits:
            raise ValueError("operator pair must share a qubit count")
        return PauliOperator.from_terms(
            list(h_part.prepend_qubit("X").terms) + list(ah_part.prepend_qubit("Y").terms),
            n_qubits=h_part.n_qubits + 1,
        )
    matrix = np.asarray(m, dtype=complex)
    a_h = (matrix + matrix.conj().T) / 2
    b = -1j * (matrix - matrix.conj().T) / 2
    terms = []
    for part, prefix in ((a_h, "X"), (b, "Y")):
        for g, s in pauli_decompose(part, tol=tol):
            terms.append((g.real, s.prepend_qubit(prefix)))
    if not terms:
        raise ValueError("cannot embed an all-zero matrix")
    n = matrix.shape[0].bit_length() - 1
    return PauliOperator.from_terms(terms, n_qubits=n + 1)


@dataclass(frozen=True)
class TermGrouping:
    """Disjoint index sets covering all terms of an operator."""

    groups: tuple

    def __post_init__(self) -> None:
        flat = [i for g in self.groups for i in g]
        if not self.groups or any(len(g) == 0 for g in self.groups):
            raise ValueError("groups must be nonempty")
        if sorted(flat) != list(range(len(flat))):
            raise ValueError("groups must partition the term indices 0..N_P-1")

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def n_terms(self) -> int:
        return sum(len(g) for g in self.groups)


def group_terms(a: PauliOperator, n_groups: int, strategy: str = "contiguous") -> TermGrouping:
    """Partition term indices into ``n_groups`` sets.

    The contiguous strategy balances sizes to within one, in stored term
    order; no commutation structure is required of the members.
    """
    if not 1 <= n_groups <= len(a):
        raise ValueError(f"group count must be in [1, {len(a)}], got {n_groups}")
    if strategy != "contiguous":
        raise ValueError(f"unknown grouping strategy {strategy!r}")
    chunks = np.array_split(np.arange(len(a)), n_groups)
    return TermGrouping(tuple(tuple(int(i) for i in chunk) for chunk in chunks))


def subset_operator(a: PauliOperator, indices: Sequence[int]) -> PauliOperator:
    """Operator restricted to the given term indices (order preserved)."""
    return PauliOperator(
        a.n_qubits,
        tuple(a.coeffs[i] for i in indices),
        tuple(a.strings[i] for i in indices),
    )


def format_operator(a: PauliOperator) -> str:
    """Serialise to the textual format: one ``<coeff> <label>`` line per term."""
    return "\n".join(f"{g!r} {s.label}" for g, s in a.terms) + "\n"


def parse_operator(text: str) -> PauliOperator:
    """Parse the textual operator format.

    Lines are ``<coeff> <label>``; blank lines and ``#`` comments are
    skipped.  Non-real coefficients are rejected.
    """
    terms = []
    n_qubits = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '<coeff> <string>', got {raw!r}")
        try:
            g = float(parts[0])
        except ValueError:
            raise ValueError(
                f"line {lineno}: coefficient must be a real number, got {parts[0]!r}"
            ) from None
        s = PauliString.from_label(parts[1])
        if n_qubits is None:
            n_qubits = s.n_qubits
        elif s.n_qubits != n_qubits:
            raise ValueError(f"line {lineno}: inconsistent string length")
        terms.append((g, s))
    if not terms:
        raise ValueError("no operator terms found")
    return PauliOperator.from_terms(terms, n_qubits=n_qubits)


def read_operator(path) -> PauliOperator:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_operator(fh.read())


def write_operator(a: PauliOperator, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_operator(a))

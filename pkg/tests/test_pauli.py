"""Pauli-string algebra: products, weights, embeddings, grouping, parsing."""

import math

import numpy as np
import pytest

import oracles
from notrap.pauli import (
    PauliOperator,
    PauliString,
    TermGrouping,
    format_operator,
    group_terms,
    hermitian_embed,
    multiply,
    parse_operator,
    pauli_decompose,
    spectral_norm,
    subset_operator,
    weight,
)


def op_from_labels(terms, n_qubits=None):
    return PauliOperator.from_terms(
        [(g, PauliString.from_label(label)) for g, label in terms], n_qubits=n_qubits
    )


class TestMultiply:
    @pytest.mark.parametrize(
        "left, right, label, phase_exp",
        [
            ("X", "X", "I", 0),
            ("X", "Z", "Y", 3),  # XZ = -iY
            ("XZ", "YI", "ZZ", 1),  # XY = iZ on qubit 0
        ],
    )
    def test_examples(self, left, right, label, phase_exp):
        result = multiply(PauliString.from_label(left), PauliString.from_label(right))
        assert result.label == label
        assert result.phase_exp == phase_exp

    def test_matches_dense_product(self):
        """Product phases are exact against the kron-built matrices."""
        rng = np.random.default_rng(42)
        for _ in range(200):
            n = int(rng.integers(1, 7))
            p = PauliString(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)),
                            int(rng.integers(0, 4)))
            q = PauliString(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)),
                            int(rng.integers(0, 4)))
            r = multiply(p, q)
            want = (p.phase * oracles.dense_string(p.label)) @ (
                q.phase * oracles.dense_string(q.label)
            )
            got = r.phase * oracles.dense_string(r.label)
            assert np.array_equal(want, got)

    def test_associativity_with_dense(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(1, 5))
            strings = [
                PauliString(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)))
                for _ in range(3)
            ]
            left = multiply(multiply(strings[0], strings[1]), strings[2])
            right = multiply(strings[0], multiply(strings[1], strings[2]))
            assert (left.x_mask, left.z_mask, left.phase_exp) == (
                right.x_mask, right.z_mask, right.phase_exp
            )

    def test_size_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            multiply(PauliString.from_label("X"), PauliString.from_label("XX"))


class TestWeight:
    @pytest.mark.parametrize(
        "label, expected", [("II", 0), ("XIY", 2), ("I", 0), ("ZZZZ", 4)]
    )
    def test_examples(self, label, expected):
        assert weight(PauliString.from_label(label)) == expected

    def test_nonloc_terms(self):
        from notrap.apps import build_a_nonloc

        op = build_a_nonloc(5)
        assert all(s.weight == 4 for s in op.strings)


class TestToDense:
    def test_single_z(self):
        op = op_from_labels([(1.0, "Z")])
        assert np.allclose(op.to_dense(), np.diag([1.0, -1.0]))

    def test_hadamard_shaped(self):
        op = op_from_labels([(1 / math.sqrt(2), "X"), (1 / math.sqrt(2), "Z")])
        eigenvalues = np.linalg.eigvalsh(op.to_dense())
        assert np.allclose(sorted(eigenvalues), [-1.0, 1.0])

    def test_aloc_two_qubits_norm(self):
        from notrap.apps import build_a_loc

        dense = build_a_loc(2).to_dense()
        assert abs(np.max(np.abs(np.linalg.eigvalsh(dense))) - math.sqrt(2)) < 1e-12

    def test_random_matches_oracle(self):
        rng = np.random.default_rng(11)
        labels = oracles.random_labels(rng, 3, 5)
        terms = [(float(rng.uniform(-1, 1)), label) for label in labels]
        assert np.allclose(op_from_labels(terms).to_dense(), oracles.dense_operator(terms))

    def test_guard(self):
        op = op_from_labels([(1.0, "X" * 13)])
        with pytest.raises(ValueError, match="12"):
            op.to_dense()


class TestSpectralNorm:
    def test_single_z(self):
        assert spectral_norm(op_from_labels([(1.0, "Z")])) == pytest.approx(1.0)

    def test_scaling(self):
        assert spectral_norm(op_from_labels([(2.5, "X")])) == pytest.approx(2.5)

    @pytest.mark.parametrize("n_q", [2, 5, 10])
    def test_aloc_sqrt_n(self, n_q):
        """Eigenvalues of the local operator are sums of +-1/sqrt(n)."""
        from notrap.apps import build_a_loc

        op = build_a_loc(n_q)
        got = spectral_norm(op)
        dense_value = np.max(np.abs(np.linalg.eigvalsh(oracles.dense_operator(
            [(g, s.label) for g, s in op.terms]))))
        assert got == pytest.approx(dense_value, rel=1e-12)
        assert got == pytest.approx(math.sqrt(n_q), rel=1e-12)

    def test_power_iteration_path(self):
        """Above the dense guard the matrix-free route hits the same value."""
        from notrap.apps import build_a_loc

        assert spectral_norm(build_a_loc(13)) == pytest.approx(math.sqrt(13), rel=1e-7)

    def test_power_iteration_cap(self):
        from notrap.apps import build_a_loc

        with pytest.raises(RuntimeError, match="iterations"):
            spectral_norm(build_a_loc(13), max_iterations=2)


class TestHermitianEmbed:
    def test_hermitian_input_stays(self):
        embedded = hermitian_embed(op_from_labels([(1.0, "Z")]))
        assert [(g, s.label) for g, s in embedded.terms] == [(1.0, "XZ")]

    def test_sigma_minus(self):
        """(X + iY)/2 embeds to (XX + YY)/2."""
        matrix = (oracles.PAULI_1Q["X"] + 1j * oracles.PAULI_1Q["Y"]) / 2
        embedded = hermitian_embed(matrix)
        assert sorted((s.label, g) for g, s in embedded.terms) == [("XX", 0.5), ("YY", 0.5)]

    def test_anti_hermitian_input(self):
        embedded = hermitian_embed(1j * oracles.PAULI_1Q["Y"])
        assert [(g, s.label) for g, s in embedded.terms] == [(1.0, "YY")]

    def test_blocks_reproduce_input(self):
        """Off-diagonal blocks of the embedding are A and A^dagger exactly."""
        rng = np.random.default_rng(5)
        for _ in range(10):
            n = int(rng.integers(1, 4))
            dim = 1 << n
            matrix = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            dense = hermitian_embed(matrix).to_dense()
            assert np.allclose(dense, dense.conj().T, atol=1e-12)
            assert np.allclose(dense[dim:, :dim], matrix, atol=1e-12)
            assert np.allclose(dense[:dim, dim:], matrix.conj().T, atol=1e-12)
            assert np.allclose(dense[:dim, :dim], 0.0)
            assert np.allclose(dense[dim:, dim:], 0.0)

    def test_pair_form(self):
        h = op_from_labels([(0.5, "X")])
        ah = op_from_labels([(0.5, "Y")])
        embedded = hermitian_embed((h, ah))
        assert sorted((s.label, g) for g, s in embedded.terms) == [("XX", 0.5), ("YY", 0.5)]

    def test_non_power_of_two(self):
        with pytest.raises(ValueError, match="power of two"):
            hermitian_embed(np.zeros((3, 3)))


class TestGroupTerms:
    @pytest.fixture
    def op4(self):
        return op_from_labels([(1.0, "XI"), (1.0, "IX"), (1.0, "ZI"), (1.0, "IZ")])

    def test_two_groups(self, op4):
        assert group_terms(op4, 2).groups == ((0, 1), (2, 3))

    def test_singletons(self, op4):
        assert group_terms(op4, 4).groups == ((0,), (1,), (2,), (3,))

    def test_single_group(self, op4):
        assert group_terms(op4, 1).groups == ((0, 1, 2, 3),)

    @pytest.mark.parametrize("bad", [0, 5])
    def test_out_of_range(self, op4, bad):
        with pytest.raises(ValueError, match="group count"):
            group_terms(op4, bad)

    def test_partition_property(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            n_terms = int(rng.integers(1, 12))
            labels = oracles.random_labels(rng, 4, n_terms)
            op = op_from_labels([(1.0, label) for label in labels])
            n_g = int(rng.integers(1, n_terms + 1))
            grouping = group_terms(op, n_g)
            flat = [i for g in grouping.groups for i in g]
            assert sorted(flat) == list(range(n_terms))
            assert flat == sorted(flat)  # contiguous in input order
            sizes = [len(g) for g in grouping.groups]
            assert max(sizes) - min(sizes) <= 1

    def test_invalid_grouping_rejected(self):
        with pytest.raises(ValueError, match="partition"):
            TermGrouping(((0, 1), (1, 2)))

    def test_subset_operator(self, op4):
        sub = subset_operator(op4, (2, 0))
        assert [s.label for s in sub.strings] == ["ZI", "XI"]


class TestOperatorCanonicalisation:
    def test_phase_folding(self):
        # -P stored as phase_exp 2 folds into a negative coefficient.
        op = PauliOperator.from_terms([(2.0, PauliString(1, 1, 0, 2))])
        assert op.terms[0][0] == -2.0
        assert op.terms[0][1].phase_exp == 0

    def test_duplicate_merge(self):
        op = op_from_labels([(1.0, "XZ"), (0.5, "XZ"), (1.0, "ZZ")])
        assert len(op) == 2
        assert op.coeffs[0] == 1.5

    def test_imaginary_coefficient_rejected(self):
        with pytest.raises(ValueError, match="non-real"):
            PauliOperator.from_terms([(1j, PauliString.from_label("X"))])

    def test_decompose_roundtrip(self):
        rng = np.random.default_rng(17)
        matrix = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        matrix = matrix + matrix.conj().T
        op = PauliOperator.from_dense(matrix)
        assert np.allclose(op.to_dense(), matrix, atol=1e-12)
        for g, s in pauli_decompose(matrix):
            assert abs(g.imag) < 1e-12


class TestTextFormat:
    def test_roundtrip(self):
        op = op_from_labels([(0.5, "XZI"), (-0.25, "YYI")])
        assert parse_operator(format_operator(op)).terms == op.terms

    def test_parse_example(self):
        op = parse_operator("0.5 XZI\n")
        assert op.terms[0][0] == 0.5
        assert op.terms[0][1].label == "XZI"

    @pytest.mark.parametrize("text", ["1+2j XZ", "1j X", "(1+0j) X"])
    def test_rejects_non_real(self, text):
        with pytest.raises(ValueError, match="real"):
            parse_operator(text)

    def test_rejects_bad_character(self):
        with pytest.raises(ValueError, match="invalid Pauli"):
            parse_operator("1.0 XQ")

    def test_rejects_inconsistent_length(self):
        with pytest.raises(ValueError, match="length"):
            parse_operator("1.0 XX\n1.0 X")

    def test_comments_and_blanks(self):
        op = parse_operator("# header\n\n1.0 XX\n")
        assert len(op) == 1

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metroscale import qcore
from metroscale.errors import DimensionMismatch, DimensionTooLarge, NonHermitian, NonUnitary

from conftest import random_hermitian, random_state

X = np.array([[0, 1], [1, 0]], dtype=complex)


def charpoly_roots(h):
    """Eigenvalues from det(H - x I) = 0: Faddeev-LeVerrier coefficients,
    roots by mpmath at 30 digits."""
    n = h.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(h)
    for k in range(1, n + 1):
        m = h @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(h @ m) / k)
    with mpmath.workdps(30):
        roots = mpmath.polyroots([mpmath.mpc(c.real, c.imag) for c in coeffs], maxsteps=200, extraprec=60)
    return np.sort([float(mpmath.re(r)) for r in roots])


def taylor_exp(a, terms=30):
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms + 1):
        term = term @ a / k
        out = out + term
    return out


class TestEigensystem:
    def test_diagonal_qubit(self):
        es = qcore.eigensystem(np.diag([-0.5, 0.5]))
        np.testing.assert_allclose(es.eigenvalues, [-0.5, 0.5])
        np.testing.assert_allclose(np.abs(es.eigenvectors), np.eye(2))

    def test_pauli_x(self):
        np.testing.assert_allclose(qcore.eigensystem(X).eigenvalues, [-1, 1], atol=1e-14)

    def test_random_hermitian_matches_charpoly_roots(self):
        h = random_hermitian(4, seed=2024)
        np.testing.assert_allclose(qcore.eigensystem(h).eigenvalues, charpoly_roots(h), atol=1e-8)

    @pytest.mark.parametrize("dim", [2, 3, 5, 8])
    def test_reconstruction_and_orthonormality(self, dim):
        h = random_hermitian(dim, seed=dim)
        es = qcore.eigensystem(h)
        assert np.linalg.norm(es.reconstruct() - h) / np.linalg.norm(h) < 1e-9
        v = es.eigenvectors
        assert np.max(np.abs(v.conj().T @ v - np.eye(dim))) < 1e-10
        assert np.all(np.diff(es.eigenvalues) >= 0)

    def test_non_hermitian_rejected(self):
        with pytest.raises(NonHermitian):
            qcore.eigensystem(np.array([[0, 1], [0, 0]]))

    def test_non_square_rejected(self):
        with pytest.raises(DimensionMismatch):
            qcore.eigensystem(np.zeros((2, 3)))

    def test_result_is_read_only(self):
        es = qcore.eigensystem(X)
        with pytest.raises(ValueError):
            es.eigenvalues[0] = 3.0


class TestPhaseUnitary:
    def test_zero_phase_is_identity(self):
        np.testing.assert_allclose(qcore.phase_unitary(random_hermitian(3, 1), 0.0), np.eye(3), atol=1e-14)

    def test_diagonal_exponential(self):
        u = qcore.phase_unitary(np.diag([-0.5, 0.5]), math.pi)
        np.testing.assert_allclose(u, np.diag([np.exp(1j * math.pi / 2), np.exp(-1j * math.pi / 2)]), atol=1e-14)

    def test_matches_taylor_series(self):
        h = random_hermitian(4, seed=7)
        phi = 0.3
        np.testing.assert_allclose(qcore.phase_unitary(h, phi), taylor_exp(-1j * phi * h), atol=1e-9)

    def test_accepts_eigensystem(self):
        h = random_hermitian(3, seed=3)
        np.testing.assert_allclose(qcore.phase_unitary(qcore.eigensystem(h), 0.7), qcore.phase_unitary(h, 0.7))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 6), st.floats(-5, 5), st.floats(-5, 5))
    def test_group_law_and_inverse(self, seed, dim, a, b):
        h = random_hermitian(dim, seed)
        ua = qcore.phase_unitary(h, a)
        assert np.max(np.abs(ua @ qcore.phase_unitary(h, -a) - np.eye(dim))) < 1e-9
        assert np.max(np.abs(ua @ qcore.phase_unitary(h, b) - qcore.phase_unitary(h, a + b))) < 1e-9
        assert qcore.is_unitary(ua, 1e-10)


class TestApply:
    def test_identity(self):
        psi = random_state(4, 1)
        np.testing.assert_array_equal(qcore.apply(np.eye(4), psi), psi)

    def test_pauli_x(self):
        np.testing.assert_allclose(qcore.apply(X, [1, 0]), [0, 1])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000), st.integers(1, 16))
    def test_norm_preserved(self, seed, dim):
        u = qcore.phase_unitary(random_hermitian(dim, seed), 1.3)
        out = qcore.apply(u, random_state(dim, seed + 1))
        assert abs(np.linalg.norm(out) - 1) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            qcore.apply(np.eye(2), random_state(3, 0))

    def test_non_unitary(self):
        with pytest.raises(NonUnitary):
            qcore.apply(np.diag([1.0, 0.5]), [1, 0])

    def test_unnormalized_state(self):
        with pytest.raises(ValueError):
            qcore.apply(np.eye(2), [1, 1])


class TestTensor:
    def test_basis_states(self):
        np.testing.assert_array_equal(qcore.tensor([1, 0], [1, 0]), [1, 0, 0, 0])

    def test_identities(self):
        np.testing.assert_array_equal(qcore.tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_index_arithmetic(self):
        a, b = random_state(2, 10), random_state(2, 11)
        out = qcore.tensor(a, b)
        for i in range(2):
            for j in range(2):
                assert out[2 * i + j] == a[i] * b[j]

    def test_mixed_kinds_rejected(self):
        with pytest.raises(DimensionMismatch):
            qcore.tensor(np.eye(2), [1, 0])

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))
    def test_associative(self, seed, da, db, dc):
        a, b, c = random_state(da, seed), random_state(db, seed + 1), random_state(dc, seed + 2)
        left = qcore.tensor(qcore.tensor(a, b), c)
        right = qcore.tensor(a, qcore.tensor(b, c))
        # complex multiplication is not associative in floating point
        np.testing.assert_allclose(left, right, rtol=1e-14, atol=0)

    def test_operator_associativity_exact_on_reals(self):
        a, b, c = (np.arange(4.0).reshape(2, 2) + k for k in range(3))
        assert np.array_equal(qcore.tensor(qcore.tensor(a, b), c), qcore.tensor(a, qcore.tensor(b, c)))


class TestMeasurement:
    def test_basis_state_all_on_index_zero(self):
        counts = qcore.measure_projective([1, 0, 0], np.eye(3), 1000, seed=1)
        assert counts.tolist() == [1000, 0, 0]

    def test_balanced_superposition_binomial(self):
        shots = 10**6
        counts = qcore.measure_projective(np.array([1, 1]) / math.sqrt(2), np.eye(2), shots, seed=5)
        assert counts.sum() == shots
        assert abs(counts[0] / shots - 0.5) < 3 * math.sqrt(0.25 / shots)

    def test_deterministic_per_seed(self):
        psi = random_state(5, 2)
        a = qcore.measure_projective(psi, np.eye(5), 5000, seed=9)
        b = qcore.measure_projective(psi, np.eye(5), 5000, seed=9)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, qcore.measure_projective(psi, np.eye(5), 5000, seed=10))

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_frequencies_converge(self, seed):
        shots = 10**6
        psi = random_state(6, 100 + seed)
        basis = qcore.eigensystem(random_hermitian(6, 200 + seed))
        p = qcore.projective_probabilities(psi, basis)
        counts = qcore.measure_projective(psi, basis, shots, seed)
        assert np.all(np.abs(counts / shots - p) < 5 * np.sqrt(p * (1 - p) / shots) + 1e-12)

    def test_local_x_on_basis_state(self):
        xb = qcore.eigensystem(X)
        probs = qcore.local_probabilities([1, 0, 0, 0], xb, 2)
        np.testing.assert_allclose(probs, np.full((2, 2), 0.25), atol=1e-15)
        counts = qcore.measure_local([1, 0, 0, 0], xb, 2, 40_000, seed=4)
        for axis in (0, 1):
            marginal = counts.sum(axis=axis) / 40_000
            assert np.all(np.abs(marginal - 0.5) < 5 * math.sqrt(0.25 / 40_000))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            qcore.measure_projective([1, 0], np.eye(3), 10, seed=0)

    def test_shots_must_be_positive(self):
        with pytest.raises(ValueError):
            qcore.measure_projective([1, 0], np.eye(2), 0, seed=0)


class TestLocalOperators:
    def test_apply_local_matches_kron(self):
        psi = random_state(8, 3)
        op = qcore.phase_unitary(random_hermitian(2, 4), 0.4)
        for site in range(3):
            ops = [np.eye(2)] * 3
            ops[site] = op
            full = qcore.tensor(qcore.tensor(ops[0], ops[1]), ops[2])
            np.testing.assert_allclose(qcore.apply_local(op, psi, site, 3), full @ psi, atol=1e-14)

    def test_apply_sum_local_matches_dense_sum(self):
        psi = random_state(27, 5)
        h = random_hermitian(3, 6)
        dense = sum(
            qcore.tensor(qcore.tensor(*([h if k == s else np.eye(3) for k in range(2)])), h if s == 2 else np.eye(3))
            for s in range(3)
        )
        np.testing.assert_allclose(qcore.apply_sum_local(h, psi, 3), dense @ psi, atol=1e-12)


class TestSeeds:
    def test_child_streams_independent_of_order(self):
        a = [qcore.make_rng(5, k).random() for k in range(4)]
        b = [qcore.make_rng(5, k).random() for k in reversed(range(4))][::-1]
        assert a == b
        assert len(set(a)) == 4

    def test_derive_seed_stable(self):
        assert qcore.derive_seed(1, 2, 3) == qcore.derive_seed(1, 2, 3)
        assert qcore.derive_seed(1, 2, 3) != qcore.derive_seed(1, 3, 2)
        assert 0 <= qcore.derive_seed(7, 1) < 2**63

    def test_register_cap(self):
        assert qcore.check_register(2, 20) == 2**20
        with pytest.raises(DimensionTooLarge):
            qcore.check_register(2, 21)
        with pytest.raises(DimensionTooLarge):
            qcore.check_register(3, 13)

import numpy as np
import pytest

from signpca.errors import InvalidInputError, NotConvergedError
from signpca.numerics import (
    EigenPair,
    as_symmetric,
    canonical_sign,
    frobenius_norm,
    max_norm,
    power_leading,
    spectral_norm,
    sym_eigen,
)


def random_symmetric(rng, d):
    a = rng.standard_normal((d, d))
    return (a + a.T) / 2.0


def random_psd(rng, d):
    g = rng.standard_normal((d, d))
    return g @ g.T / d


def sin_between(u, v):
    c = min(1.0, abs(float(u @ v)))
    return np.sqrt(max(0.0, 1.0 - c * c))


class TestSymEigen:
    def test_diagonal(self):
        pairs = sym_eigen(np.diag([3.0, 2.0, 1.0]))
        assert [p.value for p in pairs] == [3.0, 2.0, 1.0]
        for j, p in enumerate(pairs):
            expected = np.zeros(3)
            expected[j] = 1.0
            assert np.allclose(p.vector, expected)

    def test_identity_degenerate(self):
        pairs = sym_eigen(np.eye(3))
        assert all(p.value == 1.0 for p in pairs)
        vecs = np.column_stack([p.vector for p in pairs])
        assert np.allclose(vecs.T @ vecs, np.eye(3), atol=1e-12)
        for p in pairs:
            nz = np.nonzero(p.vector)[0]
            assert p.vector[nz[0]] > 0  # canonical signs

    def test_reconstruction_random(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            m = random_symmetric(rng, 6)
            pairs = sym_eigen(m)
            recon = sum(p.value * np.outer(p.vector, p.vector) for p in pairs)
            assert np.linalg.norm(recon - m, "fro") <= 1e-8 * np.linalg.norm(m, "fro")

    def test_eigen_equations_and_orthonormality(self):
        rng = np.random.default_rng(1)
        m = random_symmetric(rng, 8)
        pairs = sym_eigen(m)
        scale = np.linalg.norm(m, "fro")
        vecs = np.column_stack([p.vector for p in pairs])
        assert np.abs(vecs.T @ vecs - np.eye(8)).max() <= 1e-8
        for p in pairs:
            assert np.linalg.norm(m @ p.vector - p.value * p.vector) <= 1e-8 * scale
        vals = [p.value for p in pairs]
        assert vals == sorted(vals, reverse=True)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(2)
        m = random_symmetric(rng, 7)
        perm = rng.permutation(7)
        mp = m[np.ix_(perm, perm)]
        vals = [p.value for p in sym_eigen(m)]
        vals_p = [p.value for p in sym_eigen(mp)]
        assert np.allclose(vals, vals_p, atol=1e-10)
        # eigenvectors permute along
        top = sym_eigen(m)[0].vector
        top_p = sym_eigen(mp)[0].vector
        assert sin_between(top[perm], top_p) <= 1e-8

    def test_invalid_inputs(self):
        with pytest.raises(InvalidInputError):
            sym_eigen(np.array([[1.0, np.nan], [np.nan, 1.0]]))
        with pytest.raises(InvalidInputError):
            sym_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))
        with pytest.raises(InvalidInputError):
            sym_eigen(np.ones((2, 3)))


class TestPowerLeading:
    def test_diagonal(self):
        pair = power_leading(np.diag([5.0, 3.0, 1.0]))
        assert abs(pair.value - 5.0) <= 1e-8
        assert sin_between(pair.vector, np.array([1.0, 0.0, 0.0])) <= 1e-8

    def test_rank_one(self):
        u = canonical_sign(np.array([2.0, -1.0, 2.0]) / 3.0)
        pair = power_leading(np.outer(u, u))
        assert abs(pair.value - 1.0) <= 1e-8
        assert np.allclose(pair.vector, u, atol=1e-7)

    def test_matches_full_eigensolver(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            m = random_psd(rng, 8)
            lead = sym_eigen(m)[0]
            pair = power_leading(m, tol=1e-12, max_iter=100000)
            assert sin_between(pair.vector, lead.vector) <= 1e-6
            assert abs(pair.value - lead.value) <= 1e-6 * max(1.0, lead.value)

    def test_scaling_invariance(self):
        rng = np.random.default_rng(4)
        m = random_psd(rng, 6)
        a = power_leading(m, tol=1e-12, max_iter=100000)
        b = power_leading(4.0 * m, tol=1e-12, max_iter=100000)
        assert np.array_equal(a.vector, b.vector)  # power-of-two scale is exact

    def test_restart_when_start_orthogonal(self):
        # dominant direction orthogonal to the all-ones start
        u = np.array([1.0, -1.0]) / np.sqrt(2.0)
        m = 5.0 * np.outer(u, u) + 1.0 * (np.eye(2) - np.outer(u, u))
        pair = power_leading(m, tol=1e-10, max_iter=10000)
        assert sin_between(pair.vector, u) <= 1e-6

    def test_not_converged_carries_iterate(self):
        m = np.diag([1.0, -1.0])  # oscillates forever
        with pytest.raises(NotConvergedError) as err:
            power_leading(m, tol=1e-12, max_iter=60)
        assert isinstance(err.value.result, EigenPair)
        assert err.value.result.vector.shape == (2,)

    def test_zero_matrix(self):
        pair = power_leading(np.zeros((3, 3)))
        assert pair.value == 0.0
        assert abs(np.linalg.norm(pair.vector) - 1.0) <= 1e-12


class TestNorms:
    def test_diag_example(self):
        m = np.diag([3.0, -4.0])
        assert spectral_norm(m) == pytest.approx(4.0, abs=1e-12)
        assert frobenius_norm(m) == pytest.approx(5.0, abs=1e-12)
        assert max_norm(m) == pytest.approx(4.0, abs=1e-12)

    def test_zero(self):
        z = np.zeros((4, 4))
        assert spectral_norm(z) == 0.0
        assert frobenius_norm(z) == 0.0
        assert max_norm(z) == 0.0

    def test_spectral_equals_max_abs_eigenvalue(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            m = random_symmetric(rng, 5)
            by_pairs = max(abs(p.value) for p in sym_eigen(m))
            assert spectral_norm(m) == pytest.approx(by_pairs, abs=1e-12)
            # independent route: largest singular value
            assert spectral_norm(m) == pytest.approx(
                float(np.linalg.norm(m, 2)), abs=1e-10
            )


def test_as_symmetric_exact():
    rng = np.random.default_rng(6)
    m = rng.standard_normal((5, 5))
    m = m + m.T + 1e-12 * rng.standard_normal((5, 5))
    out = as_symmetric(m)
    assert np.array_equal(out, out.T)


def test_canonical_sign():
    assert np.array_equal(canonical_sign(np.array([0.0, -2.0, 1.0])), [0.0, 2.0, -1.0])
    assert np.array_equal(canonical_sign(np.array([1.0, -2.0])), [1.0, -2.0])
    assert np.array_equal(canonical_sign(np.zeros(3)), np.zeros(3))

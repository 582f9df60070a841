from itertools import combinations

import numpy as np
import pytest

from oracles import brute_force_sparse_value
from signpca.errors import DegenerateIterateError, InvalidInputError, TooLargeError
from signpca.location import spatial_median
from signpca.metrics import sin_angle
from signpca.numerics import power_leading, sym_eigen
from signpca.sampler import EllipticalModel, SpikedCovarianceSpec, build_spiked_sigma, sample
from signpca.scatter import sscm
from signpca.sparse_pca import (
    SparsePCConfig,
    best_sparse_quadratic,
    combinatoric_sparse_pc,
    deflate,
    top_k_indices,
    top_m_sparse_pcs,
    trc,
    truncated_power,
)


def random_symmetric(rng, d):
    a = rng.standard_normal((d, d))
    return (a + a.T) / 2.0


def random_psd(rng, d):
    g = rng.standard_normal((d, d))
    return g @ g.T / d


class TestTrc:
    def test_basic(self):
        v = np.array([1.0, 2.0, 3.0])
        assert np.array_equal(trc(v, [0, 2]), [1.0, 0.0, 3.0])

    def test_empty(self):
        assert np.array_equal(trc(np.array([1.0, 2.0]), []), [0.0, 0.0])

    def test_full_identity(self):
        v = np.array([1.0, -2.0, 3.0])
        assert np.array_equal(trc(v, range(3)), v)

    def test_out_of_range(self):
        with pytest.raises(InvalidInputError):
            trc(np.array([1.0, 2.0]), [3])


def test_top_k_ties_go_to_lower_index():
    w = np.array([1.0, -1.0, 1.0, 0.5])
    assert np.array_equal(top_k_indices(w, 2), [0, 1])


class TestTruncatedPower:
    def test_diagonal_k1(self):
        cfg = SparsePCConfig(k=1, init=np.ones(3) / np.sqrt(3.0))
        res = truncated_power(np.diag([3.0, 2.0, 1.0]), cfg)
        assert np.array_equal(res.vector, [1.0, 0.0, 0.0])
        assert res.rayleigh == pytest.approx(3.0, abs=1e-12)
        assert res.converged

    def test_k_equals_d_reduces_to_power_iteration(self):
        rng = np.random.default_rng(40)
        for _ in range(5):
            m = random_psd(rng, 8)
            res = truncated_power(m, SparsePCConfig(k=8, eps=1e-12, max_iter=50000))
            lead = power_leading(m, tol=1e-12, max_iter=50000)
            assert sin_angle(res.vector, lead.vector) <= 1e-6

    def test_matches_combinatoric_on_spiked_scatter(self):
        spec = SpikedCovarianceSpec(d=10, spikes=((5.0, 2),), omega_tail=1.0)
        model = EllipticalModel(family="gaussian", spec=spec, seed=88)
        x = sample(model, 4000)
        s = sscm(x, spatial_median(x)).matrix
        exact = combinatoric_sparse_pc(s, 2)
        iterative = truncated_power(s, SparsePCConfig(k=2, eps=1e-10, max_iter=10000))
        assert np.array_equal(iterative.support, exact.support)
        assert sin_angle(iterative.vector, exact.vector) <= 1e-6

    def test_degenerate_iterate_error(self):
        s = np.diag([0.0, 0.0, 1.0])
        cfg = SparsePCConfig(k=1, init=np.array([1.0, 0.0, 0.0]))
        with pytest.raises(DegenerateIterateError) as err:
            truncated_power(s, cfg)
        assert err.value.iteration == 1

    def test_max_iter_reports_not_converged(self):
        s = np.diag([1.0, -1.0])  # iterate oscillates in sign
        cfg = SparsePCConfig(k=2, eps=1e-9, max_iter=25, init=np.array([0.6, 0.8]))
        res = truncated_power(s, cfg)
        assert not res.converged
        assert res.iterations == 25

    def test_sparsity_and_unit_norm_invariants(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            m = random_symmetric(rng, 9)
            k = int(rng.integers(1, 10))
            res = truncated_power(m, SparsePCConfig(k=k, max_iter=200))
            assert np.count_nonzero(res.vector) <= k
            assert np.linalg.norm(res.vector) == pytest.approx(1.0, abs=1e-10)
            assert np.array_equal(res.support, np.nonzero(res.vector)[0])

    def test_scale_invariance_power_of_two_exact(self):
        rng = np.random.default_rng(42)
        m = random_psd(rng, 7)
        a = truncated_power(m, SparsePCConfig(k=3))
        b = truncated_power(4.0 * m, SparsePCConfig(k=3))
        assert np.array_equal(a.vector, b.vector)
        assert a.iterations == b.iterations

    def test_scale_invariance_general(self):
        rng = np.random.default_rng(43)
        m = random_psd(rng, 7)
        a = truncated_power(m, SparsePCConfig(k=3, eps=1e-10))
        b = truncated_power(2.9 * m, SparsePCConfig(k=3, eps=1e-10))
        assert sin_angle(a.vector, b.vector) <= 1e-8

    def test_rayleigh_monotone_for_psd(self):
        rng = np.random.default_rng(44)
        for _ in range(10):
            m = random_psd(rng, 10)
            res = truncated_power(m, SparsePCConfig(k=4, eps=1e-12, max_iter=500))
            diffs = np.diff(res.rayleigh_trace)
            assert np.all(diffs >= -1e-12)

    def test_oracle_equivalence_over_all_sparse_inits(self):
        # from every size-s submatrix eigenvector start, the best final
        # value matches the exact combinatoric maximum
        rng = np.random.default_rng(45)
        for d, s in ((6, 1), (6, 2), (8, 3)):
            m = random_symmetric(rng, d)
            target = abs(combinatoric_sparse_pc(m, s).rayleigh)
            best = -np.inf
            for supp in combinations(range(d), s):
                idx = np.asarray(supp)
                sub_vals, sub_vecs = np.linalg.eigh(m[np.ix_(idx, idx)])
                j = int(np.argmax(np.abs(sub_vals)))
                v0 = np.zeros(d)
                v0[idx] = sub_vecs[:, j]
                res = truncated_power(
                    m, SparsePCConfig(k=s, eps=1e-12, max_iter=5000, init=v0)
                )
                best = max(best, abs(res.rayleigh))
            assert best >= target - 1e-8


class TestCombinatoric:
    def test_diag_absolute_value_governs(self):
        res = combinatoric_sparse_pc(np.diag([1.0, -5.0, 2.0]), 1)
        assert np.array_equal(res.vector, [0.0, 1.0, 0.0])
        assert res.rayleigh == pytest.approx(-5.0, abs=1e-12)

    def test_s_equals_d_extreme_eigenvector(self):
        rng = np.random.default_rng(46)
        m = random_symmetric(rng, 6)
        res = combinatoric_sparse_pc(m, 6)
        pairs = sym_eigen(m)
        extreme = max(pairs, key=lambda p: abs(p.value))
        assert abs(res.rayleigh) == pytest.approx(abs(extreme.value), abs=1e-10)
        assert sin_angle(res.vector, extreme.vector) <= 1e-8

    def test_matches_independent_brute_force(self):
        rng = np.random.default_rng(47)
        for _ in range(20):
            m = random_symmetric(rng, 6)
            res = combinatoric_sparse_pc(m, 2)
            assert abs(res.rayleigh) == pytest.approx(
                brute_force_sparse_value(m, 2), abs=1e-8
            )

    def test_value_stable_under_submatrix_rotation(self):
        rng = np.random.default_rng(48)
        m = random_symmetric(rng, 6)
        value, idx, _ = best_sparse_quadratic(m, 3)
        sub = m[np.ix_(idx, idx)]
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        rotated = np.abs(np.linalg.eigvalsh(q.T @ sub @ q)).max()
        assert abs(value) == pytest.approx(rotated, abs=1e-10)

    def test_dimension_guard(self):
        with pytest.raises(TooLargeError):
            combinatoric_sparse_pc(np.eye(26), 2)


class TestDeflate:
    def test_exact_eigenvector(self):
        out = deflate(np.diag([3.0, 2.0, 1.0]), np.array([1.0, 0.0, 0.0]))
        assert np.allclose(out, np.diag([0.0, 2.0, 1.0]), atol=1e-15)

    def test_preserves_other_eigenpairs(self):
        rng = np.random.default_rng(49)
        m = random_psd(rng, 6)
        pairs = sym_eigen(m)
        out = deflate(m, pairs[0].vector)
        for p in pairs[1:]:
            assert np.linalg.norm(out @ p.vector - p.value * p.vector) <= 1e-10

    def test_annihilation_and_interlacing(self):
        rng = np.random.default_rng(50)
        for _ in range(10):
            m = random_psd(rng, 7)
            v = rng.standard_normal(7)
            v /= np.linalg.norm(v)
            out = deflate(m, v)
            spectral = np.abs(np.linalg.eigvalsh(m)).max()
            assert np.linalg.norm(out @ v) <= 1e-8 * spectral
            assert abs(float(v @ out @ v)) <= 1e-10 * max(1.0, spectral)
            before = np.sort(np.linalg.eigvalsh(m))
            after = np.sort(np.linalg.eigvalsh(out))
            assert np.all(after <= before + 1e-10)

    def test_unit_norm_guard(self):
        with pytest.raises(InvalidInputError):
            deflate(np.eye(3), np.array([1.0, 1.0, 0.0]))


class TestTopM:
    def test_diagonal_sequence(self):
        res = top_m_sparse_pcs(np.diag([4.0, 3.0, 2.0, 1.0]), [SparsePCConfig(k=1)] * 2)
        assert np.array_equal(res.components[0].vector, [1.0, 0.0, 0.0, 0.0])
        assert np.array_equal(res.components[1].vector, [0.0, 1.0, 0.0, 0.0])
        assert len(res.inputs) == 2

    def test_single_component_equals_truncated_power(self):
        rng = np.random.default_rng(51)
        m = random_psd(rng, 6)
        cfg = SparsePCConfig(k=3)
        assert np.array_equal(
            top_m_sparse_pcs(m, [cfg]).components[0].vector,
            truncated_power(m, cfg).vector,
        )

    def test_orthogonality_with_exact_eigenvectors(self):
        res = top_m_sparse_pcs(np.diag([4.0, 3.0, 2.0, 1.0]), [SparsePCConfig(k=1)] * 3)
        basis = res.vectors()
        assert np.abs(basis.T @ basis - np.eye(3)).max() <= 1e-6

    def test_scaled_spiked_model_converges(self):
        spec = SpikedCovarianceSpec(
            d=30, spikes=((10.1, 5), (6.2, 5), (3.3, 4), (1.4, 4)), omega_tail=0.5
        )
        _, v_true = build_spiked_sigma(spec)
        model = EllipticalModel(family="gaussian", spec=spec, seed=2718)
        angles = []
        for rep in range(3):
            x = sample(model, 5000, stream=rep)
            s = sscm(x, spatial_median(x)).matrix
            sub = top_m_sparse_pcs(s, [SparsePCConfig(k=k) for k in (5, 5, 4, 4)])
            angles.append(
                np.mean(
                    [
                        sin_angle(res.vector, v_true[:, j])
                        for j, res in enumerate(sub.components)
                    ]
                )
            )
        assert np.mean(angles) <= 0.1

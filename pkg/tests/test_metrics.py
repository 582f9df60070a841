import numpy as np
import pytest

from oracles import brute_force_sparse_value, hat_diagonal
from signpca.errors import InvalidInputError, TooLargeError
from signpca.location import spatial_median
from signpca.metrics import (
    MetricRecord,
    effective_rank,
    flag_leverage,
    leverage_influence,
    restricted_spectral_norm,
    sin_angle,
    subspace_distance,
)
from signpca.numerics import spectral_norm, sym_eigen
from signpca.sampler import EllipticalModel, SpikedCovarianceSpec, sample
from signpca.scatter import sscm
from signpca.sparse_pca import combinatoric_sparse_pc


class TestSinAngle:
    def test_sign_invariance(self):
        v = np.array([0.6, 0.8])
        assert sin_angle(v, v) == 0.0
        assert sin_angle(v, -v) == 0.0

    def test_orthogonal(self):
        assert sin_angle(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 1.0

    def test_pythagorean(self):
        v1 = np.array([1.0, 0.0])
        v2 = np.array([0.6, 0.8])
        assert sin_angle(v1, v2) == pytest.approx(0.8, abs=1e-12)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(70)
        v1 = rng.standard_normal(5)
        v1 /= np.linalg.norm(v1)
        v2 = rng.standard_normal(5)
        v2 /= np.linalg.norm(v2)
        q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
        assert sin_angle(q @ v1, q @ v2) == pytest.approx(sin_angle(v1, v2), abs=1e-12)

    def test_non_unit_rejected(self):
        with pytest.raises(InvalidInputError):
            sin_angle(np.array([1.0, 1.0]), np.array([1.0, 0.0]))


class TestSubspaceDistance:
    def test_identical(self):
        u = np.eye(4)[:, :2]
        assert subspace_distance(u, u) == 0.0

    def test_disjoint_lines(self):
        e1 = np.array([[1.0], [0.0]])
        e2 = np.array([[0.0], [1.0]])
        assert subspace_distance(e1, e2) == pytest.approx(np.sqrt(2.0), abs=1e-12)

    def test_matches_projector_oracle(self):
        rng = np.random.default_rng(71)
        for _ in range(10):
            a, _ = np.linalg.qr(rng.standard_normal((6, 2)))
            b, _ = np.linalg.qr(rng.standard_normal((6, 2)))
            direct = np.linalg.norm(a @ a.T - b @ b.T, "fro")
            assert subspace_distance(a, b) == pytest.approx(direct, abs=1e-10)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(72)
        a, _ = np.linalg.qr(rng.standard_normal((6, 3)))
        b, _ = np.linalg.qr(rng.standard_normal((6, 3)))
        r, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        assert subspace_distance(a @ r, b) == pytest.approx(
            subspace_distance(a, b), abs=1e-10
        )

    def test_rejects_bad_bases(self):
        with pytest.raises(InvalidInputError):
            subspace_distance(np.ones((4, 2)), np.eye(4)[:, :2])


class TestRestrictedSpectralNorm:
    def test_full_sparsity_equals_spectral(self):
        rng = np.random.default_rng(73)
        for _ in range(5):
            m = rng.standard_normal((6, 6))
            m = (m + m.T) / 2.0
            assert restricted_spectral_norm(m, 6) == pytest.approx(
                spectral_norm(m), abs=1e-10
            )

    def test_diag_s1(self):
        assert restricted_spectral_norm(np.diag([1.0, -5.0, 2.0]), 1) == pytest.approx(
            5.0, abs=1e-12
        )

    def test_shared_oracle_with_combinatoric(self):
        rng = np.random.default_rng(74)
        m = rng.standard_normal((6, 6))
        m = (m + m.T) / 2.0
        assert restricted_spectral_norm(m, 2) == pytest.approx(
            abs(combinatoric_sparse_pc(m, 2).rayleigh), abs=1e-12
        )
        assert restricted_spectral_norm(m, 2) == pytest.approx(
            brute_force_sparse_value(m, 2), abs=1e-8
        )

    def test_monotone_in_s(self):
        rng = np.random.default_rng(75)
        m = rng.standard_normal((7, 7))
        m = (m + m.T) / 2.0
        values = [restricted_spectral_norm(m, s) for s in range(1, 8)]
        assert np.all(np.diff(values) >= -1e-12)

    def test_guard(self):
        with pytest.raises(TooLargeError):
            restricted_spectral_norm(np.eye(30), 2)


class TestEffectiveRank:
    def test_identity(self):
        assert effective_rank(np.eye(9)) == pytest.approx(9.0, abs=1e-12)

    def test_rank_one_projector(self):
        v = np.array([0.6, 0.8])
        assert effective_rank(np.outer(v, v)) == pytest.approx(1.0, abs=1e-12)

    def test_trace_one_scatter_identity(self):
        spec = SpikedCovarianceSpec(d=10, spikes=((5.0, 3),), omega_tail=1.0)
        model = EllipticalModel(family="gaussian", spec=spec, seed=77)
        x = sample(model, 500)
        s = sscm(x, spatial_median(x)).matrix
        top = sym_eigen(s)[0].value
        assert effective_rank(s) == pytest.approx(1.0 / top, abs=1e-12)

    def test_zero_matrix_rejected(self):
        with pytest.raises(InvalidInputError):
            effective_rank(np.zeros((3, 3)))

    def test_indefinite_rejected(self):
        with pytest.raises(InvalidInputError):
            effective_rank(np.diag([1.0, -1.0]))


class TestLeverage:
    def test_saturated_two_points(self):
        h = leverage_influence(np.array([1.0, 2.0]), np.array([0.0, 1.0]))
        assert np.allclose(h, [1.0, 1.0], atol=1e-12)

    def test_equally_spaced_five(self):
        x = np.arange(1.0, 6.0)
        y = x**2
        h = leverage_influence(y, x)
        assert np.allclose(h, [0.6, 0.3, 0.2, 0.3, 0.6], atol=1e-12)
        assert np.allclose(h, hat_diagonal(x), atol=1e-10)

    def test_sums_to_two(self):
        rng = np.random.default_rng(76)
        for _ in range(10):
            n = int(rng.integers(3, 40))
            h = leverage_influence(rng.standard_normal(n), rng.standard_normal(n))
            assert h.sum() == pytest.approx(2.0, abs=1e-10)

    def test_constant_regressor_rejected(self):
        with pytest.raises(InvalidInputError):
            leverage_influence(np.array([1.0, 2.0, 3.0]), np.ones(3))

    def test_flagging(self):
        h = np.array([0.01, 0.06, 0.3, 0.04])
        assert np.array_equal(flag_leverage(h, 0.05), [1, 2])
        assert np.array_equal(flag_leverage(h, 0.02), [1, 2, 3])


def test_metric_record_rejects_non_finite():
    with pytest.raises(InvalidInputError):
        MetricRecord(name="bad", value=float("nan"))
    rec = MetricRecord(name="ok", value=1.5, context={"n": 3})
    assert rec.context["n"] == 3

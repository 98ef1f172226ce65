"""Databases, generators, normalization, and the Voigt convention."""

import numpy as np
import pytest

from ddmech import laws
from ddmech.phasespace import (MaterialDatabase, PhasePoint, VoigtConvention,
                               default_incomplete_removal, gen_bar_incomplete,
                               gen_bar_tanh, gen_heat_tanh, gen_planestrain,
                               gen_sqrt_toy, normalize)


class TestGenerators:
    def test_bar_midpoint_is_origin(self):
        db = gen_bar_tanh(41, (-0.03, 0.03))
        np.testing.assert_allclose(db.eps[20], 0.0, atol=1e-15)
        np.testing.assert_allclose(db.sig[20], 0.0, atol=1e-12)

    def test_bar_end_stress_matches_tip_force(self):
        # stress at eps = 0.02 equals the applied end traction over 1 mm^2
        db = gen_bar_tanh()
        sig = 1000.0 * np.tanh(60.0 * 0.02)
        assert abs(sig - 833.6546) < 1e-4
        i = np.argmin(np.abs(db.eps[:, 0] - 0.02))
        np.testing.assert_allclose(db.sig[i, 0], sig, rtol=1e-12)

    def test_bar_two_points(self):
        db = gen_bar_tanh(2, (0.0, 0.01))
        np.testing.assert_allclose(db.eps[:, 0], [0.0, 0.01])

    def test_bar_formula_everywhere(self):
        db = gen_bar_tanh()
        np.testing.assert_allclose(db.sig, 1000.0 * np.tanh(60.0 * db.eps),
                                   rtol=0, atol=1e-12)

    def test_incomplete_empty_removal_is_complete(self):
        db = gen_bar_incomplete(removal=np.array([], dtype=int))
        full = gen_bar_tanh()
        np.testing.assert_array_equal(db.eps, full.eps)

    def test_incomplete_default_subset(self):
        db = gen_bar_incomplete()
        full = gen_bar_tanh()
        assert db.n_points < full.n_points
        assert np.any(np.all(db.eps == 0.0, axis=1))  # origin retained
        # every retained point appears in the complete database
        for k in range(db.n_points):
            hit = np.isclose(full.eps[:, 0], db.eps[k, 0], atol=1e-15)
            assert hit.any()

    def test_removal_set_in_knee_band(self):
        eps = np.linspace(-0.03, 0.03, 41)
        rem = default_incomplete_removal()
        assert len(rem) > 0
        assert np.all(np.abs(eps[rem]) >= 0.0105 - 1e-12)

    def test_sqrt_toy(self):
        db = gen_sqrt_toy(20)
        assert db.n_points == 20
        assert np.all(np.diff(db.eps[:, 0]) > 0)
        np.testing.assert_allclose(db.sig[-1, 0], 1.0)  # eps=1 -> sig=1
        i = np.argmin(np.abs(db.eps[:, 0] - 0.25))
        np.testing.assert_allclose(db.sig[i, 0], 0.5)  # eps=0.25 -> sig=0.5
        np.testing.assert_allclose(db.sig, np.sqrt(db.eps), atol=1e-15)

    def test_heat_grid(self):
        db = gen_heat_tanh(20)
        assert db.n_points == 400 and db.m == 2
        np.testing.assert_allclose(db.sig, np.tanh(db.eps), atol=1e-15)
        # (0,0) -> (0,0) and (1,1) -> (tanh 1, tanh 1) are on the grid
        i0 = np.where(np.all(db.eps == 0.0, axis=1))[0]
        assert len(i0) == 1
        i1 = np.where(np.all(db.eps == 1.0, axis=1))[0]
        np.testing.assert_allclose(db.sig[i1[0]], np.tanh(1.0))

    def test_planestrain_count_and_origin_free(self):
        db = gen_planestrain((10, 10, 10))
        assert db.n_points == 1000 and db.m == 3
        law = laws.PlaneStrainLaw()
        np.testing.assert_allclose(db.sig, law.stress(db.eps), atol=1e-14)

    def test_planestrain_zero_strain_zero_stress(self):
        law = laws.PlaneStrainLaw()
        np.testing.assert_allclose(law.stress(np.zeros(3)), np.zeros(3), atol=1e-15)

    def test_planestrain_stress_matches_energy_gradient(self):
        # central finite differences of the energy (independent oracle)
        law = laws.PlaneStrainLaw()
        rng = np.random.default_rng(1)
        h = 1e-5
        for _ in range(20):
            e = np.array([rng.uniform(-0.3, 0.015), rng.uniform(0.12, 1.0),
                          rng.uniform(-0.06, 0.06)])
            grad = np.zeros(3)
            for k in range(3):
                dp, dm = e.copy(), e.copy()
                dp[k] += h
                dm[k] -= h
                grad[k] = (law.energy(dp) - law.energy(dm)) / (2 * h)
            assert np.abs(law.stress(e) - grad).max() <= 1e-6

    def test_planestrain_domain_error(self):
        law = laws.PlaneStrainLaw()
        with pytest.raises(laws.DomainError):
            law.stress(np.array([-0.6, -0.5, 0.0]))

    def test_metric_is_energy_hessian(self):
        # frozen from the finite-difference oracle on the analytic stress
        law = laws.PlaneStrainLaw()
        h = 1e-6
        hess = np.zeros((3, 3))
        for k in range(3):
            dp, dm = np.zeros(3), np.zeros(3)
            dp[k] += h
            dm[k] -= h
            hess[:, k] = (law.stress(dp) - law.stress(dm)) / (2 * h)
        np.testing.assert_allclose(laws.planestrain_metric(), hess, atol=1e-8)


class TestNormalization:
    def test_endpoints(self):
        db = MaterialDatabase(np.array([[-1.0], [1.0]]), np.array([[-1.0], [1.0]]))
        dbn = normalize(db)
        np.testing.assert_allclose(dbn.eps[:, 0], [1e-3, 1.0])
        np.testing.assert_allclose(dbn.sig[:, 0], [1e-3, 1.0])

    def test_range_covered(self):
        for db in (gen_bar_tanh(), gen_heat_tanh(10), gen_planestrain((5, 5, 5))):
            dbn = normalize(db)
            for arr in (dbn.eps, dbn.sig):
                assert arr.min() >= 1e-3 - 1e-15
                assert arr.max() <= 1.0 + 1e-15

    def test_roundtrip(self):
        db = gen_planestrain((4, 4, 4))
        dbn = normalize(db)
        eps, sig = dbn.norm.invert(dbn.eps, dbn.sig)
        np.testing.assert_allclose(eps, db.eps, atol=1e-12)
        np.testing.assert_allclose(sig, db.sig, atol=1e-12)

    def test_constant_component_maps_to_one(self):
        db = MaterialDatabase(np.array([[0.5], [0.5]]), np.array([[1.0], [2.0]]))
        dbn = normalize(db)
        np.testing.assert_allclose(dbn.eps[:, 0], 1.0)
        eps, _ = dbn.norm.invert(dbn.eps, dbn.sig)
        np.testing.assert_allclose(eps[:, 0], 0.5)

    def test_monotone_order_preserving(self):
        db = gen_bar_tanh()
        dbn = normalize(db)
        assert np.all(np.diff(dbn.eps[:, 0]) > 0)
        assert np.all(np.diff(dbn.sig[:, 0]) > 0)

    def test_empty_rejected(self):
        db = gen_bar_tanh()
        with pytest.raises(ValueError):
            normalize(db.subset(np.array([], dtype=int)))


class TestDatabase:
    def test_s_is_inverse_of_c(self):
        db = gen_planestrain((4, 4, 4))
        np.testing.assert_allclose(db.S @ db.C, np.eye(3), atol=1e-10)

    def test_mismatched_s_rejected(self):
        with pytest.raises(ValueError):
            MaterialDatabase(np.zeros((2, 1)), np.zeros((2, 1)),
                             C=np.array([[2.0]]), S=np.array([[2.0]]))

    def test_csv_roundtrip(self, tmp_path):
        db = gen_heat_tanh(5)
        path = tmp_path / "db.csv"
        db.to_csv(path)
        back = MaterialDatabase.from_csv(path, C=db.C)
        np.testing.assert_array_equal(back.eps, db.eps)
        np.testing.assert_array_equal(back.sig, db.sig)
        header = path.read_text().splitlines()[0]
        assert header == "eps_1,eps_2,sig_1,sig_2"

    def test_phase_point(self):
        z = PhasePoint(np.array([1.0, 2.0]), np.array([3.0, 4.0]))
        assert z.m == 2
        np.testing.assert_array_equal(z.as_vector(), [1.0, 2.0, 3.0, 4.0])
        with pytest.raises(ValueError):
            PhasePoint(np.array([1.0]), np.array([1.0, 2.0]))


class TestVoigt:
    def test_m_counts(self):
        assert VoigtConvention(1).m == 1
        assert VoigtConvention(2).m == 3
        assert VoigtConvention(3).m == 6

    def test_contraction_matches_tensor(self):
        rng = np.random.default_rng(0)
        for dim in (2, 3):
            conv = VoigtConvention(dim)
            for _ in range(10):
                a = rng.standard_normal((dim, dim))
                e_t = 0.5 * (a + a.T)
                b = rng.standard_normal((dim, dim))
                s_t = 0.5 * (b + b.T)
                tensor = np.tensordot(e_t, s_t)
                voigt = conv.strain_to_voigt(e_t) @ conv.stress_to_voigt(s_t)
                np.testing.assert_allclose(voigt, tensor, rtol=1e-12)

    def test_strain_roundtrip(self):
        conv = VoigtConvention(2)
        e = np.array([[0.1, 0.02], [0.02, -0.3]])
        np.testing.assert_allclose(conv.strain_from_voigt(conv.strain_to_voigt(e)), e)

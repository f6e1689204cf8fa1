"""Constitutive-law tests: EOS inversions, stress, characteristic speeds."""

import numpy as np
import pytest

import multimat as mm
from multimat.errors import (DegenerateDeformation, HyperbolicityLoss,
                             NonPhysicalState)
from multimat.materials import (DefGrad, MaterialParams,
                                eps_vol_from_rho_kappa_k,
                                kappa_from_rho_eps_k, p_from_rho_kappa_k)

from oracles import (AIR, COPPER, MG_FLUID, VDW, WATER, ZOO, SCALES,
                     fd_sound_speed_sq, random_admissible,
                     stress_from_energy_gradient,
                     stress_from_invariant_formula)

I2 = DefGrad.identity()


class TestPressureEnergy:
    def test_perfect_gas_pressure(self):
        # rho=1, eps=2500, gamma=1.4: p = (gamma-1)*rho*eps = 1000
        assert mm.pressure_from_rho_eps(AIR, 1.0, 2500.0) == pytest.approx(1000.0, rel=1e-13)

    def test_perfect_gas_energy(self):
        assert mm.eps_from_rho_p(AIR, 1.0, 1000.0) == pytest.approx(2500.0, rel=1e-13)

    def test_stiffened_gas_energy(self):
        # eps = (p + gamma*p_inf)/((gamma-1)*rho) at the high-pressure water state
        eps = mm.eps_from_rho_p(WATER, 1000.0, 1e9)
        assert eps == pytest.approx((1e9 + 4.4 * 6.8e8) / (3.4 * 1000.0), rel=1e-13)
        assert mm.pressure_from_rho_eps(WATER, 1000.0, eps) == pytest.approx(1e9, rel=1e-12)

    @pytest.mark.parametrize("mat", ZOO, ids=lambda m: m.name)
    def test_forward_eval_round_trip(self, mat):
        # pressure_from_rho_eps inverts the kappa-explicit forward forms
        rng = np.random.default_rng(11)
        row = mat.row
        for _ in range(200):
            rho, _, _, _, ev = random_admissible(rng, mat, shear=False)
            kap = kappa_from_rho_eps_k(row, rho, ev)
            p_fwd = p_from_rho_kappa_k(row, rho, kap)
            assert mm.pressure_from_rho_eps(mat, rho, ev) == pytest.approx(p_fwd, rel=1e-12)
            ev_fwd = eps_vol_from_rho_kappa_k(row, rho, kap)
            assert ev_fwd == pytest.approx(ev, rel=1e-12)

    def test_round_trip_property(self):
        # p -> eps -> p identity at 1e-12 relative on 1e4 random states
        rng = np.random.default_rng(42)
        for _ in range(10_000):
            mat = ZOO[rng.integers(len(ZOO))]
            rho_s, p_s, _ = SCALES[mat.name]
            rho = rho_s * 10.0 ** rng.uniform(-0.25, 0.25)
            p = p_s * 10.0 ** rng.uniform(-1.0, 1.0)
            try:
                eps = mm.eps_from_rho_p(mat, rho, p)
            except NonPhysicalState:
                continue
            assert mm.pressure_from_rho_eps(mat, rho, eps) == pytest.approx(p, rel=1e-12)

    def test_rejects_covolume_violation(self):
        with pytest.raises(NonPhysicalState):
            mm.eps_from_rho_p(VDW, 1.0 / VDW.b, 1e5)

    def test_rejects_negative_kappa(self):
        with pytest.raises(NonPhysicalState):
            mm.pressure_from_rho_eps(WATER, 1000.0, -1e9)


class TestElasticEnergy:
    def test_identity_deformation_is_unstrained(self):
        assert mm.elastic_energy(COPPER, I2) == 0.0

    def test_fluid_has_no_shear_energy(self):
        assert mm.elastic_energy(AIR, DefGrad(2.0, 0.3, -0.1, 0.5)) == 0.0

    def test_diagonal_stretch(self):
        # g = diag(2, 0.5): Bbar = diag(1/4, 4), Tr = 4.25
        g = DefGrad(2.0, 0.0, 0.0, 0.5)
        expect = 5e10 / 8900.0 * (4.25 - 2.0)
        assert mm.elastic_energy(COPPER, g) == pytest.approx(expect, rel=1e-14)

    def test_nonnegative(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            _, _, _, g, _ = random_admissible(rng, COPPER)
            e = mm.elastic_energy(COPPER, DefGrad(g[0, 0], g[0, 1], g[1, 0], g[1, 1]))
            assert e >= 0.0

    def test_degenerate_deformation_raises(self):
        with pytest.raises(DegenerateDeformation):
            mm.elastic_energy(COPPER, DefGrad(1.0, 0.0, 0.0, -1.0))


class TestCauchyStress:
    def test_fluid_limit_is_isotropic(self):
        s = mm.cauchy_stress(AIR, 1.0, 1000.0, DefGrad(1.3, 0.2, -0.4, 0.9))
        assert s.s11 == s.s22 == -1000.0
        assert s.s21 == 0.0

    def test_identity_deformation_is_pressure_only(self):
        s = mm.cauchy_stress(COPPER, 8900.0, 1e5, I2)
        assert s.s11 == -1e5 and s.s22 == -1e5 and s.s21 == 0.0

    def test_simple_shear_values(self):
        # g = [[1, 0.1], [0, 1]], chi = 5e10, p = 1e5: frozen from a direct
        # dense-matrix evaluation of the invariant formula
        s = mm.cauchy_stress(COPPER, 8900.0, 1e5, DefGrad(1.0, 0.1, 0.0, 1.0))
        assert s.s11 == pytest.approx(4.999e8, rel=1e-14)
        assert s.s21 == pytest.approx(-1e10, rel=1e-14)
        assert s.s22 == pytest.approx(-5.001e8, rel=1e-14)

    def test_symmetric_and_deviator_traceless(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            rho, _, _, g, ev = random_admissible(rng, COPPER)
            p = mm.pressure_from_rho_eps(COPPER, rho, ev)
            s = mm.cauchy_stress(COPPER, rho, p, DefGrad(g[0, 0], g[0, 1], g[1, 0], g[1, 1]))
            assert s.s12 == s.s21
            assert s.s11 + s.s22 == pytest.approx(-2.0 * p, rel=1e-12)

    @pytest.mark.parametrize("mat", ZOO, ids=lambda m: m.name)
    def test_invariant_formula_gradient_check(self, mat):
        # closed form vs the generic isotropic-energy formula with
        # finite-differenced energy derivatives
        rng = np.random.default_rng(17)
        for _ in range(100):
            rho, _, _, g, ev = random_admissible(rng, mat)
            p = mm.pressure_from_rho_eps(mat, rho, ev)
            s = mm.cauchy_stress(mat, rho, p, DefGrad(g[0, 0], g[0, 1], g[1, 0], g[1, 1]))
            closed = np.array([[s.s11, s.s12], [s.s21, s.s22]])
            oracle = stress_from_invariant_formula(mat, rho, ev, g)
            scale = np.max(np.abs(closed))
            assert np.max(np.abs(oracle - closed)) <= 1e-5 * scale

    def test_first_principles_piola_gradient(self):
        # on mass-compatible states (rho = rho0 * det grad Y) the stress is
        # the deformation gradient of the energy: sigma = rho deps/dF F^T
        rng = np.random.default_rng(23)
        checked = 0
        while checked < 100:
            _, _, _, g, _ = random_admissible(rng, COPPER)
            rho = COPPER.rho0 * np.linalg.det(g)
            try:
                ev = mm.eps_from_rho_p(COPPER, rho, 1e9)
            except NonPhysicalState:
                continue
            p = mm.pressure_from_rho_eps(COPPER, rho, ev)
            s = mm.cauchy_stress(COPPER, rho, p, DefGrad(g[0, 0], g[0, 1], g[1, 0], g[1, 1]))
            closed = np.array([[s.s11, s.s12], [s.s21, s.s22]])
            oracle = stress_from_energy_gradient(COPPER, rho, ev, g)
            assert np.max(np.abs(oracle - closed)) <= 1e-5 * np.max(np.abs(closed))
            checked += 1


class TestSoundSpeed:
    def test_perfect_gas(self):
        eps = mm.eps_from_rho_p(AIR, 1.0, 1000.0)
        assert mm.sound_speed_sq(AIR, 1.0, eps) == pytest.approx(1400.0, rel=1e-13)

    def test_stiffened_gas(self):
        eps = mm.eps_from_rho_p(WATER, 1000.0, 1e9)
        assert mm.sound_speed_sq(WATER, 1000.0, eps) == pytest.approx(7.392e6, rel=1e-13)

    @pytest.mark.parametrize("mat", ZOO, ids=lambda m: m.name)
    def test_finite_difference_oracle(self, mat):
        rng = np.random.default_rng(31)
        for _ in range(100):
            rho, _, _, _, ev = random_admissible(rng, mat, shear=False)
            csq = mm.sound_speed_sq(mat, rho, ev)
            assert csq == pytest.approx(fd_sound_speed_sq(mat, rho, ev), rel=1e-7)

    def test_van_der_waals_loss_detected(self):
        # a cold enough VdW state loses hyperbolicity: c^2 <= 0
        row = VDW.row
        rho = 500.0
        # pick kappa such that the attraction term dominates
        ev = eps_vol_from_rho_kappa_k(row, rho, 1e-12)
        with pytest.raises((HyperbolicityLoss, NonPhysicalState)):
            mm.sound_speed_sq(VDW, rho, ev)


class TestWaveSpeeds:
    def test_fluid_collapse(self):
        # chi = 0: the slow branch collapses onto the contact, leaving the
        # distinct speeds of a general gas {u, u - c, u + c}.  (u1 has
        # multiplicity four; confirmed against the quasi-linear matrix.)
        eps = mm.eps_from_rho_p(AIR, 1.0, 1000.0)
        c = np.sqrt(1400.0)
        u1 = 17.0
        g = DefGrad(1.1, 0.2, -0.3, 0.8)
        lmin, lmax, speeds = mm.wave_speeds(AIR, 1.0, u1, eps, g)
        assert np.allclose(sorted(set(np.round(speeds, 10))),
                           [u1 - c, u1, u1 + c], rtol=1e-9)
        assert lmin == pytest.approx(u1 - c, rel=1e-12)
        assert lmax == pytest.approx(u1 + c, rel=1e-12)
        from oracles import quasilinear_matrix
        m = quasilinear_matrix(AIR, 1.0, u1, 3.0,
                               np.array([[1.1, 0.2], [-0.3, 0.8]]), eps)
        num = np.sort(np.linalg.eigvals(m).real)
        assert np.allclose(num, np.sort(speeds), rtol=1e-7)

    def test_identity_deformation_split(self):
        eps = mm.eps_from_rho_p(COPPER, 8900.0, 1e5)
        csq = mm.sound_speed_sq(COPPER, 8900.0, eps)
        lmin, lmax, speeds = mm.wave_speeds(COPPER, 8900.0, 0.0, eps, I2)
        fast = np.sqrt(csq + 2.0 * COPPER.chi / 8900.0)
        slow = np.sqrt(2.0 * COPPER.chi / 8900.0)
        assert lmax == pytest.approx(fast, rel=1e-13)
        assert sorted(speeds)[4] == pytest.approx(slow, rel=1e-13)
        assert slow == pytest.approx(3352.0, rel=1e-4)  # copper at rest

    def test_galilean_shift(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            rho, u1, _, g, ev = random_admissible(rng, COPPER)
            gd = DefGrad(g[0, 0], g[0, 1], g[1, 0], g[1, 1])
            _, _, s0 = mm.wave_speeds(COPPER, rho, u1, ev, gd)
            _, _, s1 = mm.wave_speeds(COPPER, rho, u1 + 137.0, ev, gd)
            assert np.allclose(np.array(s1) - np.array(s0), 137.0, rtol=0, atol=1e-9)

    def test_hyperbolicity_ordering(self):
        # A1 >= sqrt(A2) >= 0 whenever c^2 > 0, so all speeds are real
        from multimat.materials import acoustic_terms_k, csq_from_rho_eps_k
        rng = np.random.default_rng(13)
        for _ in range(1000):
            mat = ZOO[rng.integers(len(ZOO))]
            rho, _, _, g, ev = random_admissible(rng, mat)
            csq = csq_from_rho_eps_k(mat.row, rho, ev)
            a1, sq2 = acoustic_terms_k(mat.row, rho, csq, g[0, 0], g[0, 1], g[1, 0], g[1, 1])
            assert sq2 >= 0.0
            assert a1 >= sq2 * (1.0 - 1e-13)


class TestValidation:
    def test_gamma_must_exceed_one(self):
        with pytest.raises(ValueError):
            MaterialParams(gamma=1.0)

    def test_mie_gruneisen_requires_zero_shear(self):
        with pytest.raises(ValueError):
            MaterialParams(kind=mm.MaterialKind.MieGruneisen, gamma=2.0,
                           chi=1e9, rho_ref=1000.0, E1=2.0, E2=3.0)

    def test_mie_gruneisen_exponent_guard(self):
        with pytest.raises(ValueError):
            MaterialParams.mie_gruneisen(2.0, 1000.0, 1e9, 1e9, 1.0, 2.0)

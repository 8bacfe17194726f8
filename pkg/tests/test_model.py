import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from udw_harvest.errors import InvalidRadius, OnLightCone, UnsupportedScenario
from udw_harvest.model import (CorrelatorKernel, Detector, ModeFamily, Scenario,
                               anticommutator_pointlike, commutator_lightcone,
                               minkowski_mode_family, wightman_from_modes, wightman_pointlike)
from udw_harvest.quad import Tolerance, integrate_1d

TIGHT = Tolerance(1e-14, 1e-12)


def gaussian(centre=0.0, width=1.0):
    return lambda x: np.exp(-((np.asarray(x) - centre) / width) ** 2)


def cone_points(r, eps):
    return sorted({s * r + k * eps for s in (-1, 1) for k in (-100, -10, -1, 0, 1, 10, 100)})


def paired_wightman(g, r, eps, span=25.0):
    f = lambda x: 2 * wightman_pointlike(x, r, eps) * g(x)
    return integrate_1d(f, -span, span, TIGHT, points=cone_points(r, eps)).value


def principal_value_anticommutator(g, r, span=25.0):
    # C+ = -1/(2 pi^2) (1/(2r)) (1/(x - r) - 1/(x + r)), each term a Cauchy principal value.
    f = lambda x: float(g(x))
    kw = dict(weight="cauchy", epsabs=1e-14, epsrel=1e-13, limit=400)
    a = integrate.quad(f, -span, span, wvar=r, **kw)[0]
    b = integrate.quad(f, -span, span, wvar=-r, **kw)[0]
    return -(a - b) / (4 * math.pi ** 2 * r)


class TestDetectorScenario:
    def test_detector_validation(self):
        with pytest.raises(ValueError):
            Detector(1.0, switch_width=0.0)
        with pytest.raises(ValueError):
            Detector(1.0, smearing=-1.0)
        with pytest.raises(ValueError):
            Detector(1.0, position=(0, 0))
        assert Detector(1.0).pointlike

    def test_switching_transform(self):
        d = Detector(0.0, switch_center=0.7, switch_width=1.3)
        w = 0.9
        num = integrate_1d(lambda t: d.switching(t) * np.exp(-1j * w * t), -15, 15, TIGHT).value
        assert abs(num - d.switching_ft(w)) < 1e-12

    def test_dimensionless_parameters(self):
        s = Scenario.from_dimensionless(1.5, 4.0, -2.0, 0.25, switch_width=2.0, midpoint=0.5)
        assert s.alpha_a == pytest.approx(1.5)
        assert s.beta == pytest.approx(4.0)
        assert s.gamma == pytest.approx(-2.0)
        assert s.delta_a == pytest.approx(0.25)
        assert s.detector_a.switch_center + s.detector_b.switch_center == pytest.approx(2.0)
        assert s.regulator == pytest.approx(2e-3)
        assert s.equal_gaps and not s.pointlike

    def test_unequal_switch_widths_rejected(self):
        with pytest.raises(UnsupportedScenario):
            Scenario(Detector(1.0, switch_width=1.0), Detector(1.0, switch_width=2.0))

    def test_swap_and_couplings(self):
        s = Scenario.from_dimensionless(1.0, 2.0, 3.0, alpha_b=2.0)
        t = s.swapped()
        assert t.alpha_a == s.alpha_b and t.gamma == -s.gamma and t.beta == s.beta
        u = s.with_couplings(0.1, 0.2)
        assert (u.detector_a.coupling, u.detector_b.coupling) == (0.1, 0.2)
        with pytest.raises(ValueError):
            s.detector("c")

    def test_negative_beta_rejected(self):
        with pytest.raises(ValueError):
            Scenario.from_dimensionless(1.0, -1.0, 0.0)


class TestWightman:
    def test_conjugate_symmetry_example(self):
        assert wightman_pointlike(1.0, 2.0, 1e-3) == pytest.approx(
            np.conj(wightman_pointlike(-1.0, 2.0, 1e-3)), rel=1e-15)

    @given(st.floats(-50, 50), st.floats(0, 50), st.floats(1e-6, 1.0))
    def test_conjugate_symmetry(self, dt, r, eps):
        a, b = wightman_pointlike(dt, r, eps), np.conj(wightman_pointlike(-dt, r, eps))
        assert abs(a - b) <= 1e-12 * abs(a)

    def test_spacelike_realness(self):
        assert abs(wightman_pointlike(0.0, 1.0, 1e-4).imag) < 1e-6

    def test_equal_time_value(self):
        assert wightman_pointlike(0.0, 1.0, 1e-9).real == pytest.approx(1 / (4 * math.pi ** 2),
                                                                        rel=1e-12)

    def test_requires_positive_regulator(self):
        with pytest.raises(ValueError):
            wightman_pointlike(0.0, 1.0, 0.0)

    def test_vectorised(self):
        out = wightman_pointlike(np.linspace(-1, 1, 5), 2.0, 1e-3)
        assert out.shape == (5,)


class TestAnticommutator:
    def test_even(self):
        assert anticommutator_pointlike(0.7, 2.0) == anticommutator_pointlike(-0.7, 2.0)

    def test_value(self):
        assert anticommutator_pointlike(0.0, 1.0) == pytest.approx(1 / (2 * math.pi ** 2))

    def test_regulated_limit(self):
        assert abs(2 * wightman_pointlike(3.0, 1.0, 1e-5).real
                   - anticommutator_pointlike(3.0, 1.0)) < 1e-6

    def test_on_cone(self):
        with pytest.raises(OnLightCone):
            anticommutator_pointlike(2.0, 2.0)
        with pytest.raises(OnLightCone):
            anticommutator_pointlike(np.array([0.0, -1.0]), 1.0)

    def test_kernel_object(self):
        k = CorrelatorKernel("anticommutator")
        assert k(0.0, 1.0) == anticommutator_pointlike(0.0, 1.0)
        assert CorrelatorKernel("wightman", epsilon=1e-3)(1.0, 2.0) == wightman_pointlike(1.0, 2.0, 1e-3)
        assert isinstance(CorrelatorKernel("commutator")(None, 2.0).coefficient, float)
        with pytest.raises(ValueError):
            CorrelatorKernel("retarded")
        with pytest.raises(UnsupportedScenario):
            CorrelatorKernel("wightman", mass=1.0)


class TestCommutator:
    def test_even_test_function_gives_zero(self):
        assert commutator_lightcone(2.0).pair(gaussian()) == 0.0

    def test_pairing(self):
        g = gaussian(0.4)
        expected = (g(-2.0) - g(2.0)) / (8 * math.pi)
        assert commutator_lightcone(2.0).pair(g) == pytest.approx(expected, rel=1e-15)
        c = commutator_lightcone(2.0)
        assert (c.advanced_support, c.retarded_support) == (-2.0, 2.0)

    def test_invalid_radius(self):
        with pytest.raises(InvalidRadius):
            commutator_lightcone(0.0)

    def test_regulated_imaginary_part(self):
        g = gaussian(0.3)
        got = paired_wightman(g, 1.0, 1e-4).imag
        assert abs(got - commutator_lightcone(1.0).pair(g)) < 1e-4

    def test_odd_in_time(self):
        # Pairing with g(-t) flips the sign.
        g = gaussian(0.3)
        h = lambda t: g(-np.asarray(t))
        c = commutator_lightcone(1.5)
        assert c.pair(h) == pytest.approx(-c.pair(g), rel=1e-15)


class TestSplitIdentity:
    @pytest.mark.parametrize("centre,width", [(0.0, 2.0), (0.5, 2.0), (0.0, 3.0)])
    def test_pairing_at_small_regulator(self, centre, width):
        g = gaussian(centre, width)
        r = 1.0
        lhs = paired_wightman(g, r, 1e-4)
        rhs = principal_value_anticommutator(g, r) + 1j * commutator_lightcone(r).pair(g)
        assert abs(lhs - rhs) < 1e-5

    def test_unit_gaussian_bias_is_linear(self):
        # A unit-width Gaussian carries a first-order bias of ~1.2e-5 at eps = 1e-4;
        # it halves with eps and extrapolates away.
        g = gaussian()
        r = 1.0
        rhs = principal_value_anticommutator(g, r) + 1j * commutator_lightcone(r).pair(g)
        d1 = paired_wightman(g, r, 1e-4) - rhs
        d2 = paired_wightman(g, r, 2e-4) - rhs
        assert abs(d2 / d1 - 2.0) < 0.01
        assert abs(2 * d1 - d2) < 1e-7

    def test_parities(self):
        g = gaussian(0.3)
        h = lambda t: g(-np.asarray(t))
        r = 1.0
        assert principal_value_anticommutator(h, r) == pytest.approx(
            principal_value_anticommutator(g, r), rel=1e-9)


class TestModeFamily:
    def test_massless(self):
        fam = minkowski_mode_family()
        k = np.linspace(0.1, 3, 7)
        assert np.array_equal(fam.energy(k), k)
        assert fam.continuum and fam.redshift("a") == 1.0

    def test_massive_energy(self):
        fam = minkowski_mode_family(2.0)
        assert fam.energy(1.5) == pytest.approx(2.5)
        with pytest.raises(ValueError):
            minkowski_mode_family(-1.0)

    def test_coincidence_limit(self):
        fam = minkowski_mode_family()
        k = np.array([0.3, 1.0, 4.0])
        assert np.allclose(fam.pair_density(k, 1e-9), fam.pair_density(k, 0.0), rtol=1e-12)
        assert np.allclose(fam.pair_density(k, 0.0), k * k / (2 * math.pi ** 2))

    def test_reconstruction_example(self):
        # Light-cone frequencies 0.5 and 1.5 both alternate on 2 pi segments.
        fam = minkowski_mode_family()
        res = wightman_from_modes(fam, 0.5, 1.0, 1e-4, osc_wavelength=4 * math.pi)
        assert abs(res.value - wightman_pointlike(0.5, 1.0, 1e-4)) < 1e-6

    def test_desk_grid(self):
        fam = minkowski_mode_family()
        rng = np.random.default_rng(0)
        for dt, r in rng.uniform(0.1, 3.0, (20, 2)):
            exact = wightman_pointlike(dt, r, 0.05)
            got = wightman_from_modes(fam, dt, r, 0.05).value
            assert abs(got - exact) <= 1e-8 * abs(exact)

    def test_discrete_family_rejected(self):
        fam = ModeFamily(lambda k: k, lambda k, L: k, modes=np.arange(1, 4.0))
        with pytest.raises(ValueError):
            wightman_from_modes(fam, 0.1, 1.0, 0.1)

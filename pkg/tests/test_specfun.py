import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from udw_harvest import mpref
from udw_harvest.errors import OverflowRange
from udw_harvest.specfun import (ERFI_MAX_ARG, dawson, erf_complex, erfc_complex, erfi_real,
                                  faddeeva_w, gauss_erfi)

# Frozen from the arbitrary-precision series oracle (udw_harvest.mpref).
ERF_1 = 0.8427007929497148693412
ERFI_1 = 1.650425758797542876025
DAWSON_1 = 0.5380795069127684191364
W_1_2I = complex(0.2184926152748906968224, 0.0929978093926018660475)

finite = st.floats(-10, 10, allow_nan=False)


def rel(a, b):
    return abs(a - b) / abs(b)


class TestFaddeeva:
    def test_origin(self):
        assert faddeeva_w(0j) == 1.0

    def test_imaginary_axis_asymptotics(self):
        # w(iy) = 1/(y sqrt(pi)) * (1 - 1/(2y^2) + ...); the leading ratio alone is off by 2e-4 at y=50
        y = 50.0
        ratio = complex(faddeeva_w(1j * y)).real * y * math.sqrt(math.pi)
        assert abs(ratio - (1.0 - 1.0 / (2.0 * y * y))) < 1e-6
        assert abs(ratio - 1.0) < 1e-3

    def test_reflection(self):
        z = 1 + 2j
        assert faddeeva_w(-np.conj(z)) == pytest.approx(np.conj(faddeeva_w(z)), rel=1e-13)

    def test_frozen_value(self):
        assert rel(faddeeva_w(1 + 2j), W_1_2I) < 1e-13

    def test_large_argument_range(self):
        z = np.array([30j, 30 + 0.1j, -20 + 5j, 25 - 1j])
        w = faddeeva_w(z)
        assert np.all(np.isfinite(w))
        for zi, wi in zip(z, w):
            assert rel(wi, complex(mpref.mp_faddeeva(zi))) < 1e-12

    @given(finite, finite)
    def test_reflection_property(self, x, y):
        z = complex(x, y)
        a, b = faddeeva_w(-z.conjugate()), np.conj(faddeeva_w(z))
        assert abs(a - b) <= 1e-13 * abs(b) + 1e-300


class TestErf:
    def test_zero(self):
        assert erf_complex(0j) == 0

    def test_one(self):
        assert rel(erf_complex(1.0 + 0j).real, ERF_1) < 1e-15

    def test_odd(self):
        z = 2 + 1j
        assert erf_complex(-z) == pytest.approx(-erf_complex(z), rel=1e-15)

    def test_complement_on_grid(self):
        g = np.linspace(-10, 10, 41)
        z = g[:, None] + 1j * g[None, :]
        s = erf_complex(z) + erfc_complex(z)
        big = np.abs(erf_complex(z))
        # erf is huge off the real-dominated sector; compare relative to the summands there.
        assert np.all(np.abs(s - 1) <= 1e-13 * np.maximum(1.0, big))

    def test_vectorised_shape(self):
        assert erf_complex(np.zeros((3, 2), dtype=complex)).shape == (3, 2)


class TestErfi:
    def test_zero_and_odd(self):
        assert erfi_real(0.0) == 0
        assert erfi_real(-1.5) == -erfi_real(1.5)

    def test_one(self):
        assert rel(erfi_real(1.0), ERFI_1) < 1e-14

    def test_overflow_guard(self):
        assert np.isfinite(erfi_real(ERFI_MAX_ARG))
        with pytest.raises(OverflowRange):
            erfi_real(26.5)
        with pytest.raises(OverflowRange):
            erfi_real(np.array([1.0, -30.0]))

    def test_matches_erf_of_imaginary(self):
        x = 0.7
        assert erfi_real(x) == pytest.approx((-1j * erf_complex(1j * x)).real, rel=1e-14)


class TestDawson:
    def test_zero(self):
        assert dawson(0.0) == 0

    def test_one(self):
        assert rel(dawson(1.0), DAWSON_1) < 1e-15

    def test_large_x(self):
        assert abs(2 * 100 * dawson(100.0) - 1) < 1e-4

    def test_erfi_identity(self):
        x = np.linspace(-5, 5, 101)
        lhs = dawson(x) * (2 / math.sqrt(math.pi)) * np.exp(x * x)
        assert np.allclose(lhs, erfi_real(x), rtol=1e-11, atol=0)

    def test_gauss_erfi_is_scaled_product(self):
        u = np.linspace(-4, 4, 33)
        assert np.allclose(gauss_erfi(u), np.exp(-u * u) * erfi_real(u), rtol=1e-12, atol=1e-300)
        assert np.isfinite(gauss_erfi(1e3))

    @given(st.floats(-1e3, 1e3, allow_nan=False))
    def test_odd_property(self, x):
        assert dawson(-x) == -dawson(x)
        if abs(x) <= ERFI_MAX_ARG:
            assert erfi_real(-x) == -erfi_real(x)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-20, 20, allow_nan=False))
    def test_against_oracle(self, x):
        ref = float(mpref.mp_dawson(x))
        assert abs(dawson(x) - ref) <= 1e-12 * abs(ref) + 1e-300


class TestOracleIndependence:
    """The series oracle itself agrees with mpmath's own implementations."""

    @pytest.mark.parametrize("z", [0.3, 1 + 1j, -2.5 + 0.5j, 3j])
    def test_erf(self, z):
        import mpmath as mp

        with mp.workdps(40):
            assert abs(mpref.mp_erf(z) - mp.erf(z)) < mp.mpf(10) ** -28 * max(1, abs(mp.erf(z)))

    @pytest.mark.parametrize("z", [0.5 + 0.5j, 10 + 3j, -4 + 9j, 2 - 1j])
    def test_faddeeva(self, z):
        import mpmath as mp

        with mp.workdps(40):
            ref = mp.exp(-mp.mpc(z) ** 2) * mp.erfc(-1j * mp.mpc(z))
            assert abs(mpref.mp_faddeeva(z) - ref) < mp.mpf(10) ** -28 * abs(ref)

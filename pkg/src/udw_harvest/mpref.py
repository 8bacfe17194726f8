"""Arbitrary-precision reference values for the error-function family.

Deliberately independent of :mod:`udw_harvest.specfun`: only elementary
mpmath arithmetic (``mpf``/``mpc``, ``exp``, ``sqrt``, ``pi``) is used, with
a Maclaurin series at a working precision raised to absorb the ``exp(|z|^2)``
cancellation, and the Laplace continued fraction for ``w(z)`` well inside the
upper half plane.  Results are returned as mpmath numbers; convert with
``complex()``/``float()`` at the call site.
"""

import math

import mpmath as mp

__all__ = ["mp_erf", "mp_erfc", "mp_erfi", "mp_dawson", "mp_faddeeva", "DIGITS"]

#: Significant digits guaranteed by every routine here.
DIGITS = 30


def _working_dps(absz):
    return DIGITS + 15 + int(absz * absz / math.log(10.0))


def _erf_series(z):
    # 2/sqrt(pi) * sum_n (-1)^n z^(2n+1) / (n! (2n+1)); caller sets precision.
    z2 = -z * z
    term = z
    total = z
    n = 0
    eps = mp.mpf(10) ** (-mp.mp.dps)
    while True:
        n += 1
        term = term * z2 / n
        contrib = term / (2 * n + 1)
        total += contrib
        if abs(contrib) <= eps * abs(total) and n > abs(z2):
            break
    return 2 / mp.sqrt(mp.pi) * total


def mp_erf(z):
    z = mp.mpmathify(z)
    with mp.workdps(_working_dps(float(abs(z)))):
        value = _erf_series(z)
    return +value


def mp_erfc(z):
    z = mp.mpmathify(z)
    with mp.workdps(_working_dps(float(abs(z)))):
        value = 1 - _erf_series(z)
    return +value


def mp_erfi(x):
    """erfi for real x; the series has no cancellation so modest precision suffices."""
    x = mp.mpf(x)
    with mp.workdps(DIGITS + 15):
        value = _erf_series(mp.mpc(0, x))
    return +value.imag


def mp_dawson(x):
    x = mp.mpf(x)
    with mp.workdps(DIGITS + 15):
        value = mp.sqrt(mp.pi) / 2 * mp.exp(-x * x) * _erf_series(mp.mpc(0, x)).imag
    return +value


def _faddeeva_cf(z):
    # Laplace continued fraction, w(z) = i/sqrt(pi) / (z - (1/2)/(z - 1/(z - (3/2)/(z - ...)))),
    # evaluated backwards at increasing depth until two depths agree.
    def evaluate(depth):
        tail = z
        for k in range(depth, 0, -1):
            tail = z - (mp.mpf(k) / 2) / tail
        return mp.mpc(0, 1) / mp.sqrt(mp.pi) / tail

    eps = mp.mpf(10) ** (-(DIGITS + 5))
    depth = 40
    previous = evaluate(depth)
    while True:
        depth *= 2
        current = evaluate(depth)
        if abs(current - previous) <= eps * abs(current):
            return current
        previous = current


def mp_faddeeva(z):
    """``w(z) = exp(-z^2) erfc(-i z)``."""
    z = mp.mpc(z)
    if z.imag < 0:
        with mp.workdps(_working_dps(float(abs(z)))):
            value = 2 * mp.exp(-z * z) - mp_faddeeva(-z)
        return +value
    if z.imag >= 2 and abs(z) >= 8:
        with mp.workdps(DIGITS + 15):
            value = _faddeeva_cf(z)
        return +value
    with mp.workdps(_working_dps(float(abs(z)))):
        value = mp.exp(-z * z) * (1 - _erf_series(mp.mpc(0, -1) * z))
    return +value

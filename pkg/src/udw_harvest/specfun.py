"""Complex error-function family.

Thin, vectorised wrappers over :mod:`scipy.special` (the Faddeeva package
underneath) with the range policy this package needs: every closed form that
would otherwise multiply a huge ``erfi`` by a tiny Gaussian goes through
:func:`dawson` instead.
"""

import numpy as np
from scipy import special

from .errors import OverflowRange

__all__ = [
    "faddeeva_w",
    "erf_complex",
    "erfc_complex",
    "erfi_real",
    "dawson",
    "gauss_erfi",
    "ERFI_MAX_ARG",
]

#: Largest |x| for which erfi(x) is comfortably inside double range.
ERFI_MAX_ARG = 26.0

_TWO_OVER_SQRT_PI = 2.0 / np.sqrt(np.pi)


def _out(value):
    return value[()] if isinstance(value, np.ndarray) and value.ndim == 0 else value


def faddeeva_w(z):
    """Faddeeva function ``w(z) = exp(-z**2) * erfc(-i z)``."""
    return _out(special.wofz(np.asarray(z, dtype=complex)))


def erf_complex(z):
    return _out(special.erf(np.asarray(z, dtype=complex)))


def erfc_complex(z):
    return _out(special.erfc(np.asarray(z, dtype=complex)))


def erfi_real(x):
    """Imaginary error function ``erfi(x) = -i erf(i x)`` for real ``x``.

    Raises
    ------
    OverflowRange
        If any ``|x| > 26``; use :func:`dawson` for the scaled product there.
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > ERFI_MAX_ARG):
        raise OverflowRange(f"erfi argument beyond +/-{ERFI_MAX_ARG}; use dawson()")
    return _out(special.erfi(x))


def dawson(x):
    """Dawson integral ``F(x) = sqrt(pi)/2 * exp(-x**2) * erfi(x)``."""
    return _out(special.dawsn(np.asarray(x, dtype=float)))


def gauss_erfi(u):
    """Overflow-safe ``exp(-u**2) * erfi(u)``, i.e. ``2/sqrt(pi) * F(u)``."""
    return _out(_TWO_OVER_SQRT_PI * special.dawsn(np.asarray(u, dtype=float)))

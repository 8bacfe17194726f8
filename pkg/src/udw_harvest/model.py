"""Detectors, scenarios and the massless Minkowski vacuum correlators.

Units: c = hbar = 1.  Times and lengths share one unit; gaps and masses are in
its inverse.  Switching is Gaussian, ``chi(t) = exp(-(t - t_c)**2 / T**2)``, with
Fourier transform ``chi_hat(w) = int chi(t) exp(-i w t) dt`` (no 2 pi factors).
Smearing is ``F(x) = exp(-|x|**2 / sigma**2) / (pi**1.5 sigma**3)``, whose
transform is ``exp(-k**2 sigma**2 / 4)``, so a detector pair contributes the
combined factor ``exp(-k**2 (sigma_A**2 + sigma_B**2) / 4)``.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import InvalidRadius, OnLightCone, UnsupportedScenario
from .quad import integrate_semi_infinite_oscillatory

__all__ = [
    "Detector",
    "Scenario",
    "CorrelatorKernel",
    "LightConeDistribution",
    "ModeFamily",
    "wightman_pointlike",
    "anticommutator_pointlike",
    "commutator_lightcone",
    "minkowski_mode_family",
    "wightman_from_modes",
    "TRUNCATION_WIDTHS",
]

#: Gaussian switching is cut at centre +/- this many widths (tail below e^-64).
TRUNCATION_WIDTHS = 8.0

_FOUR_PI2 = 4.0 * math.pi ** 2


@dataclass(frozen=True)
class Detector:
    """A static two-level Unruh-DeWitt detector with Gaussian switching."""

    gap: float
    coupling: float = 1.0
    position: tuple = (0.0, 0.0, 0.0)
    switch_center: float = 0.0
    switch_width: float = 1.0
    smearing: float = 0.0

    def __post_init__(self):
        pos = tuple(float(c) for c in np.ravel(self.position))
        if len(pos) != 3:
            raise ValueError("position must be a 3-vector")
        object.__setattr__(self, "position", pos)
        if not self.switch_width > 0:
            raise ValueError("switch_width must be positive")
        if not self.smearing >= 0:
            raise ValueError("smearing must be non-negative")
        for name in ("gap", "coupling", "switch_center", "switch_width", "smearing"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def pointlike(self):
        return self.smearing == 0.0

    def switching(self, t):
        return np.exp(-((np.asarray(t) - self.switch_center) / self.switch_width) ** 2)

    def switching_ft(self, w):
        T = self.switch_width
        w = np.asarray(w)
        return math.sqrt(math.pi) * T * np.exp(-0.25 * (w * T) ** 2 - 1j * w * self.switch_center)

    def smearing_ft(self, k):
        return np.exp(-0.25 * (np.asarray(k) * self.smearing) ** 2)


@dataclass(frozen=True)
class Scenario:
    """Two detectors coupled to a free scalar field in the Minkowski vacuum.

    ``epsilon`` is the base i-epsilon regulator used only by the brute-force
    oracles; it defaults to ``1e-3 * T``.
    """

    detector_a: Detector
    detector_b: Detector
    mass: float = 0.0
    epsilon: Optional[float] = None

    def __post_init__(self):
        Ta, Tb = self.detector_a.switch_width, self.detector_b.switch_width
        if not math.isclose(Ta, Tb, rel_tol=1e-12):
            raise UnsupportedScenario(f"detectors must share the switching width (got {Ta} and {Tb})")
        if not self.mass >= 0:
            raise ValueError("mass must be non-negative")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    @classmethod
    def from_dimensionless(cls, alpha, beta, gamma, delta=0.0, *, alpha_b=None, delta_b=None,
                           coupling=1.0, coupling_b=None, switch_width=1.0, mass=0.0,
                           epsilon=None, midpoint=0.0):
        """Build a scenario from ``alpha = Omega T``, ``beta = L / T``, ``gamma = (t_B - t_A) / T``.

        Detector A sits at the origin and switches at ``(midpoint - gamma / 2) T``;
        B sits at ``(beta T, 0, 0)`` and switches at ``(midpoint + gamma / 2) T``.
        """
        T = float(switch_width)
        if beta < 0:
            raise ValueError("beta must be non-negative")
        a = Detector(alpha / T, coupling, (0.0, 0.0, 0.0), (midpoint - 0.5 * gamma) * T, T,
                     delta * T)
        b = Detector((alpha if alpha_b is None else alpha_b) / T,
                     coupling if coupling_b is None else coupling_b,
                     (beta * T, 0.0, 0.0), (midpoint + 0.5 * gamma) * T, T,
                     (delta if delta_b is None else delta_b) * T)
        return cls(a, b, mass, epsilon)

    def detector(self, which):
        if which in ("a", "A"):
            return self.detector_a
        if which in ("b", "B"):
            return self.detector_b
        raise ValueError(f"detector id must be 'a' or 'b', got {which!r}")

    def swapped(self):
        return replace(self, detector_a=self.detector_b, detector_b=self.detector_a)

    def with_couplings(self, coupling_a, coupling_b):
        return replace(self, detector_a=replace(self.detector_a, coupling=coupling_a),
                       detector_b=replace(self.detector_b, coupling=coupling_b))

    @property
    def switch_width(self):
        return self.detector_a.switch_width

    @property
    def distance(self):
        return float(np.linalg.norm(np.subtract(self.detector_b.position, self.detector_a.position)))

    @property
    def regulator(self):
        return 1e-3 * self.switch_width if self.epsilon is None else self.epsilon

    @property
    def alpha_a(self):
        return self.detector_a.gap * self.switch_width

    @property
    def alpha_b(self):
        return self.detector_b.gap * self.switch_width

    @property
    def beta(self):
        return self.distance / self.switch_width

    @property
    def gamma(self):
        return (self.detector_b.switch_center - self.detector_a.switch_center) / self.switch_width

    @property
    def delta_a(self):
        return self.detector_a.smearing / self.switch_width

    @property
    def delta_b(self):
        return self.detector_b.smearing / self.switch_width

    @property
    def pointlike(self):
        return self.detector_a.pointlike and self.detector_b.pointlike

    @property
    def equal_gaps(self):
        return math.isclose(self.detector_a.gap, self.detector_b.gap, rel_tol=1e-12, abs_tol=0.0)


def wightman_pointlike(dt, r, eps):
    """Massless vacuum Wightman function ``-1 / (4 pi^2 ((dt - i eps)^2 - r^2))``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    dt = np.asarray(dt, dtype=float)
    r = np.asarray(r, dtype=float)
    z = dt - 1j * eps
    out = -1.0 / (_FOUR_PI2 * (z * z - r * r))
    return out[()] if out.ndim == 0 else out


def anticommutator_pointlike(dt, r):
    """``C+ = 2 Re W`` off the light cone: ``-1 / (2 pi^2 (dt^2 - r^2))``.

    Raises
    ------
    OnLightCone
        If any ``|dt| == r`` to floating tolerance; the kernel is a principal
        value there and must be integrated cone-aware.
    """
    dt = np.asarray(dt, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(np.isclose(np.abs(dt), r, rtol=1e-12, atol=1e-300)):
        raise OnLightCone("anticommutator requested on the light cone")
    out = -1.0 / (2.0 * math.pi ** 2 * (dt * dt - r * r))
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class LightConeDistribution:
    """``C-(dt) = coefficient * (delta(dt + r) - delta(dt - r))`` with ``coefficient = 1/(4 pi r)``.

    The field commutator is ``i C-``.
    """

    radius: float
    coefficient: float

    @property
    def advanced_support(self):
        return -self.radius

    @property
    def retarded_support(self):
        return self.radius

    def pair(self, g):
        """Pair the distribution with a test function of ``dt``."""
        return self.coefficient * (g(-self.radius) - g(self.radius))


def commutator_lightcone(r):
    if not r > 0:
        raise InvalidRadius(f"light-cone commutator needs r > 0, got {r}")
    return LightConeDistribution(float(r), 1.0 / (4.0 * math.pi * r))


@dataclass(frozen=True)
class CorrelatorKernel:
    """Evaluable massless vacuum kernel of a given ``kind``."""

    kind: str
    mass: float = 0.0
    epsilon: float = 1e-3

    def __post_init__(self):
        if self.kind not in ("wightman", "anticommutator", "commutator"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.mass != 0.0:
            raise UnsupportedScenario("closed-form kernels are massless; use a ModeFamily")

    def __call__(self, dt, r):
        if self.kind == "wightman":
            return wightman_pointlike(dt, r, self.epsilon)
        if self.kind == "anticommutator":
            return anticommutator_pointlike(dt, r)
        return commutator_lightcone(r)


@dataclass(frozen=True)
class ModeFamily:
    """Angular-reduced mode data for static detectors.

    ``pair_density(k, L)`` is the mode sum of ``phi(x_J) conj(phi(x_I))`` per
    unit ``k`` for detectors a distance ``L`` apart, so that
    ``W(dt, L) = sum_modes pair_density / (2 omega) * exp(-i omega dt)``.
    ``modes`` is ``None`` for a continuum on ``k in [0, inf)``; otherwise an
    array of mode labels with ``weights`` replacing ``dk``.
    """

    energy: Callable
    pair_density: Callable
    mass: float = 0.0
    modes: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    redshift_a: float = 1.0
    redshift_b: float = 1.0
    name: str = field(default="custom", compare=False)

    @property
    def continuum(self):
        return self.modes is None

    def redshift(self, which):
        return self.redshift_a if which in ("a", "A") else self.redshift_b


def _sin_over(k, L):
    if L == 0.0:
        return k
    return np.sin(k * L) / L


def minkowski_mode_family(m=0.0):
    """Plane-wave continuum of a free scalar of mass ``m`` after angular integration."""
    if not m >= 0:
        raise ValueError("mass must be non-negative")

    def energy(k):
        k = np.asarray(k, dtype=float)
        return k if m == 0.0 else np.sqrt(k * k + m * m)

    def pair_density(k, L):
        k = np.asarray(k, dtype=float)
        return k * _sin_over(k, float(L)) / (2.0 * math.pi ** 2)

    return ModeFamily(energy, pair_density, mass=float(m), name=f"minkowski(m={m})")


def wightman_from_modes(family, dt, r, eps, tol=None, osc_wavelength=None):
    """Rebuild ``W(dt, r)`` from a continuum family with ``exp(-eps omega)`` damping.

    Returns the :class:`~udw_harvest.quad.QuadratureResult`.  The default
    segment scale is the finest pair of frequencies ``r +/- dt``.  The tail
    carries both frequencies, so for weak damping pass an ``osc_wavelength``
    on which both alternate (e.g. ``4 pi`` for frequencies 0.5 and 1.5).
    """
    if not family.continuum:
        raise ValueError("wightman_from_modes integrates continuum families only")

    def integrand(k):
        w = family.energy(k)
        return family.pair_density(k, r) / (2.0 * w) * np.exp(-1j * w * (dt - 1j * eps))

    if osc_wavelength is None:
        top = abs(r) + abs(dt)
        osc_wavelength = 2.0 * math.pi / top if top > 0 else math.inf
    return integrate_semi_infinite_oscillatory(integrand, osc_wavelength, tol)

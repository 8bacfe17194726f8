"""Leading-order two-detector density matrix and its entangling term.

Conventions (all derived, then pinned by the brute-force oracles here):

* ``L_IJ = lam_I lam_J int dt int dt' chi_I(t) chi_J(t') exp(i Om_I t - i Om_J t') W(x_J t'; x_I t)``,
  with the mode form ``int dk rho(k, L) / (2 w) conj(chi_I^(w + Om_I)) chi_J^(w + Om_J)``.
* ``M = -lam_A lam_B int dt int_{t' < t} dt' [chi_A(t) chi_B(t') e^{i(Om_A t + Om_B t')} + (A <-> B)] W(t - t', L)``.
* ``M = M+ + M-`` splits ``W`` into its real part (anticommutator) and its
  imaginary part (commutator, supported on the light cone), and
  ``M+ = -(L_AB[Om_A, -Om_B] + L_BA[Om_B, -Om_A]) / 2``.

Dimensionless inputs are ``alpha = Om T``, ``beta = L / T``,
``gamma = (t_B - t_A) / T`` and ``delta = sigma / T``.  Integral paths return a
:class:`~udw_harvest.quad.QuadratureResult`; closed forms return ``complex``.
"""

import json
import math
import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import (BudgetExhausted, ExtrapolationUnstable, HarvestError,
                     PerturbativityWarning, UnsupportedScenario)
from .model import TRUNCATION_WIDTHS, minkowski_mode_family
from .quad import (QuadratureResult, Tolerance, integrate_1d, integrate_2d_ordered,
                   integrate_semi_infinite_oscillatory)
from .specfun import dawson, faddeeva_w

__all__ = [
    "HARVEST_TOLERANCE",
    "ORACLE_TOLERANCE",
    "EPSILON_LADDER",
    "OracleResult",
    "l_ij_mode",
    "l_ij_oracle",
    "m_plus_identity",
    "m_plus_closed",
    "m_minus_closed",
    "m_minus_integral",
    "m_oracle",
    "e_integral_reference",
    "figure_scale",
    "scaled_m",
    "DensityMatrixBlocks",
    "compute_blocks",
    "TwoDetectorState",
    "assemble_rho",
    "negativity",
    "ComparisonEntry",
    "ComparisonReport",
    "compare_methods",
]

HARVEST_TOLERANCE = Tolerance(abs_tol=1e-18, rel_tol=1e-11)
ORACLE_TOLERANCE = Tolerance(abs_tol=1e-14, rel_tol=1e-6, max_evaluations=50_000_000)

#: Multiples of the base regulator used for the oracle extrapolation.
EPSILON_LADDER = (4.0, 2.0, 1.0)

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_FOUR_PI2 = 4.0 * math.pi ** 2
_W = TRUNCATION_WIDTHS
# Below this reduced distance the difference of Dawson values is Taylor-expanded.
_SMALL_B = 1e-3
_PERTURBATIVE_LIMIT = 0.1


def _gaps(scenario, i, j, gap_i, gap_j):
    di, dj = scenario.detector(i), scenario.detector(j)
    return (di.gap if gap_i is None else float(gap_i)), (dj.gap if gap_j is None else float(gap_j))


def _require_massless(scenario, what):
    if scenario.mass != 0.0:
        raise UnsupportedScenario(f"{what} is massless only; use the mode-sum path")


# ---------------------------------------------------------------------------
# Mutual-information term


def l_ij_mode(scenario, i, j, gap_i=None, gap_j=None, tol=None, family=None):
    """``L_IJ`` as a single integral over mode wavenumber.

    ``gap_i``/``gap_j`` override the detectors' gaps, which is how the flipped-gap
    values ``L_AB[Om_A, -Om_B]`` entering ``M+`` are evaluated.  ``family``
    defaults to the Minkowski continuum of ``scenario.mass``; discrete families
    are summed directly.
    """
    tol = tol or HARVEST_TOLERANCE
    family = family or minkowski_mode_family(scenario.mass)
    di, dj = scenario.detector(i), scenario.detector(j)
    om_i, om_j = _gaps(scenario, i, j, gap_i, gap_j)
    L = float(np.linalg.norm(np.subtract(dj.position, di.position)))
    T = scenario.switch_width
    prefactor = di.coupling * dj.coupling * family.redshift(i) * family.redshift(j)

    def per_k(k):
        w = family.energy(k)
        amp = family.pair_density(k, L) / (2.0 * w)
        return (amp * np.conj(di.switching_ft(w + om_i)) * dj.switching_ft(w + om_j)
                * di.smearing_ft(k) * dj.smearing_ft(k))

    if not family.continuum:
        modes = np.asarray(family.modes, dtype=float)
        weights = np.ones_like(modes) if family.weights is None else np.asarray(family.weights)
        values = weights * per_k(modes)
        value = math.fsum(values.real) + 1j * math.fsum(values.imag)
        return QuadratureResult(prefactor * value, 0.0, modes.size)

    # Work in kappa = k T; the Gaussian envelope peaks where w T ~ -(alpha_i + alpha_j) / 2.
    def f(kappa):
        return per_k(kappa / T) / T

    peak = max(0.0, -0.5 * (om_i + om_j) * T)
    if family.mass > 0.0:
        peak = math.sqrt(max(peak * peak - (family.mass * T) ** 2, 0.0))
    freq = (L + abs(di.switch_center - dj.switch_center)) / T
    wavelength = 2.0 * math.pi / freq if freq > 0 else math.inf
    head = integrate_1d(f, 0.0, peak, tol) if peak > 0 else QuadratureResult(0j, 0.0, 0)
    tail_tol = Tolerance(tol.abs_tol, tol.rel_tol, max(tol.max_evaluations - head.evaluations, 1))
    try:
        tail = integrate_semi_infinite_oscillatory(f, wavelength, tail_tol, start=peak)
    except BudgetExhausted as exc:
        raise BudgetExhausted(str(exc), (head + exc.result).scale(prefactor)) from None
    return (head + tail).scale(prefactor)


def _richardson(values):
    """Linear extrapolation in epsilon from the ladder (4e, 2e, e)."""
    m4, m2, m1 = values
    best = 2.0 * m1 - m2
    check = 2.0 * m2 - m4
    denom = m2 - m1
    ratio = complex((m4 - m2) / denom) if denom != 0 else complex("nan")
    return best, check, ratio


@dataclass
class OracleResult:
    """Epsilon-extrapolated brute-force value with its ladder."""

    value: complex
    error_estimate: float
    evaluations: int
    epsilons: tuple
    raw: tuple
    extrapolants: tuple
    ratio: complex
    quad_error: float

    def __complex__(self):
        return complex(self.value)


def _extrapolate(run, epsilons, what):
    results = [run(e) for e in epsilons]
    raw = tuple(complex(r.value) for r in results)
    best, check, ratio = _richardson(raw)
    quad_err = sum(r.error_estimate for r in results)
    spread = abs(best - check)
    evaluations = sum(r.evaluations for r in results)
    out = OracleResult(best, spread / 3.0 + 3.0 * quad_err, evaluations, tuple(epsilons), raw,
                       (best, check), ratio, quad_err)
    if spread > max(1e-2 * abs(best), 10.0 * quad_err):
        raise ExtrapolationUnstable(
            f"{what}: extrapolants {best!r} and {check!r} disagree (ladder {raw!r})")
    return out


def _ladder(scenario, epsilon):
    base = scenario.regulator if epsilon is None else float(epsilon)
    return tuple(k * base / scenario.switch_width for k in EPSILON_LADDER)


def _wightman_scaled(dt, r, eps):
    z = dt - 1j * eps
    return -1.0 / (_FOUR_PI2 * (z * z - r * r))


def _band_points(centres, eps):
    pts = []
    for c in centres:
        for k in (0.0, 1.0, 10.0, 100.0):
            pts.extend((c - k * eps, c + k * eps))
    return sorted(set(pts))


def l_ij_oracle(scenario, i, j, gap_i=None, gap_j=None, tol=None, epsilon=None):
    """``L_IJ`` by direct double time integration of the regulated Wightman kernel.

    Pointlike, massless only.  The kernel ``W(t' - t - i eps, L)`` is integrated
    over the truncated switching box for each rung of the epsilon ladder and
    extrapolated linearly to ``eps = 0``.
    """
    tol = tol or ORACLE_TOLERANCE
    _require_massless(scenario, "l_ij_oracle")
    if not scenario.pointlike:
        raise UnsupportedScenario("l_ij_oracle needs pointlike detectors")
    di, dj = scenario.detector(i), scenario.detector(j)
    om_i, om_j = _gaps(scenario, i, j, gap_i, gap_j)
    T = scenario.switch_width
    a_i, a_j = om_i * T, om_j * T
    c_i, c_j = di.switch_center / T, dj.switch_center / T
    beta = float(np.linalg.norm(np.subtract(dj.position, di.position))) / T
    box = ((c_i - _W, c_i + _W), (c_j - _W, c_j + _W))
    lam = di.coupling * dj.coupling

    def run(eps):
        def f(t, tp):
            return (np.exp(-(t - c_i) ** 2 - (tp - c_j) ** 2 + 1j * (a_i * t - a_j * tp))
                    * _wightman_scaled(tp - t, beta, eps))

        return integrate_2d_ordered(f, box, ordered=False, tol=tol,
                                    s_points=_band_points((-beta, beta), eps))

    out = _extrapolate(run, _ladder(scenario, epsilon), "l_ij_oracle")
    out.value *= lam
    out.raw = tuple(lam * v for v in out.raw)
    out.extrapolants = tuple(lam * v for v in out.extrapolants)
    out.error_estimate *= abs(lam)
    out.quad_error *= abs(lam)
    return out


# ---------------------------------------------------------------------------
# Entangling term


def m_plus_identity(scenario, tol=None, family=None):
    """``M+`` from two flipped-gap mutual-information integrals."""
    oa, ob = scenario.detector_a.gap, scenario.detector_b.gap
    ab = l_ij_mode(scenario, "a", "b", oa, -ob, tol, family)
    ba = l_ij_mode(scenario, "b", "a", ob, -oa, tol, family)
    return (ab + ba).scale(-0.5)


def figure_scale(scenario):
    """``lam_A lam_B exp(-alpha^2 / 2) / (8 sqrt(2 pi) beta)``, the common factor of the closed forms."""
    if scenario.beta == 0.0:
        raise UnsupportedScenario("the figure normalisation is singular at beta = 0")
    lam = scenario.detector_a.coupling * scenario.detector_b.coupling
    return lam * math.exp(-0.5 * scenario.alpha_a ** 2) / (8.0 * _SQRT_2PI * scenario.beta)


def scaled_m(scenario, value):
    """Divide ``value`` by :func:`figure_scale`."""
    return complex(value) / figure_scale(scenario)


def _closed_form_guard(scenario, what):
    _require_massless(scenario, what)
    if not scenario.equal_gaps:
        raise UnsupportedScenario(f"{what} needs equal gaps")


def _sum_phase(scenario):
    # Equal gaps: M carries exp(i alpha (tau_A + tau_B)); unity for symmetric switching times.
    T = scenario.switch_width
    tau_sum = (scenario.detector_a.switch_center + scenario.detector_b.switch_center) / T
    return complex(np.exp(1j * scenario.alpha_a * tau_sum))


def m_plus_closed(scenario):
    """Closed form of ``M+`` for equal gaps, any Gaussian smearing.

    Unequal smearing widths enter only through ``(delta_A^2 + delta_B^2) / 2``.
    """
    _closed_form_guard(scenario, "m_plus_closed")
    alpha, beta, gamma = scenario.alpha_a, scenario.beta, scenario.gamma
    a = 1.0 + 0.5 * (scenario.delta_a ** 2 + scenario.delta_b ** 2)
    lam = scenario.detector_a.coupling * scenario.detector_b.coupling
    root = math.sqrt(2.0 * a)
    x = gamma / root
    b = beta / root
    if b < _SMALL_B:
        # (F(x + b) - F(x - b)) / b to O(b^2); exact limit at beta = 0.
        F = float(dawson(x))
        d1 = 1.0 - 2.0 * x * F
        d2 = -2.0 * F - 2.0 * x * d1
        d3 = -4.0 * d1 - 2.0 * x * d2
        diff_over_b = 2.0 * d1 + b * b * d3 / 3.0
        value = -lam * math.exp(-0.5 * alpha ** 2) / (4.0 * math.pi * a) * 0.5 * diff_over_b
    else:
        K = lam * math.exp(-0.5 * alpha ** 2) / (8.0 * _SQRT_2PI * beta)
        g = _TWO_OVER_SQRT_PI * (float(dawson((beta - gamma) / root))
                                 + float(dawson((beta + gamma) / root)))
        value = -K / math.sqrt(a) * g
    return value * _sum_phase(scenario)


def m_minus_closed(scenario):
    """Closed form of ``M-`` for pointlike detectors with equal gaps at ``beta > 0``."""
    _closed_form_guard(scenario, "m_minus_closed")
    if not scenario.pointlike:
        raise UnsupportedScenario("m_minus_closed needs pointlike detectors; use m_minus_integral")
    beta, gamma = scenario.beta, scenario.gamma
    if beta == 0.0:
        raise UnsupportedScenario("M- of coincident pointlike detectors diverges")
    K = figure_scale(scenario)
    return 1j * K * (math.exp(-0.5 * (beta + gamma) ** 2)
                     + math.exp(-0.5 * (beta - gamma) ** 2)) * _sum_phase(scenario)


def _switching_terms(scenario):
    """Both summands of the symmetrised switching product as (centre, centre', gap, gap')."""
    T = scenario.switch_width
    ca, cb = scenario.detector_a.switch_center / T, scenario.detector_b.switch_center / T
    aa, ab = scenario.alpha_a, scenario.alpha_b
    return ((ca, cb, aa, ab), (cb, ca, ab, aa))


def m_minus_integral(scenario, tol=None):
    """``M-`` by integrating the commutator's light-cone support.

    Pointlike: the delta functions fix ``t - t' = L`` and leave one Gaussian time
    integral per switching summand.  Smeared: both smearing integrals reduce to
    a radial weight ``w(u)`` on the lag ``u = t - t'``, leaving a time-ordered
    double integral.
    """
    tol = tol or HARVEST_TOLERANCE
    _require_massless(scenario, "m_minus_integral")
    beta = scenario.beta
    lam = scenario.detector_a.coupling * scenario.detector_b.coupling
    s2 = 0.5 * (scenario.delta_a ** 2 + scenario.delta_b ** 2)
    terms = _switching_terms(scenario)
    if s2 == 0.0:
        if beta == 0.0:
            raise UnsupportedScenario("M- of coincident pointlike detectors diverges")
        total = QuadratureResult(0j, 0.0, 0)
        for c1, c2, a1, a2 in terms:
            # chi(tau) chi'(tau - beta) exp(i(a1 tau + a2 (tau - beta)))
            c2s = c2 + beta
            lo, hi = max(c1, c2s) - _W, min(c1, c2s) + _W
            if hi <= lo:
                continue

            def f(t, c1=c1, c2s=c2s, a1=a1, a2=a2):
                return np.exp(-(t - c1) ** 2 - (t - c2s) ** 2 + 1j * (a1 * t + a2 * (t - beta)))

            total = total + integrate_1d(f, lo, hi, tol)
        return total.scale(1j * lam / (8.0 * math.pi * beta))

    s = math.sqrt(s2)

    def weight(u):
        if beta == 0.0:
            return 2.0 * u * np.exp(-0.5 * u * u / s2) / (s ** 3 * _SQRT_2PI)
        return (np.exp(-0.5 * (u - beta) ** 2 / s2) * -np.expm1(-2.0 * u * beta / s2)
                / (beta * s * _SQRT_2PI))

    centres = [c for term in terms for c in term[:2]]
    lo, hi = min(centres) - _W, max(centres) + _W
    u_hi = beta + _W * s

    def f(t, tp):
        u = t - tp
        val = 0j
        for c1, c2, a1, a2 in terms:
            val = val + np.exp(-(t - c1) ** 2 - (tp - c2) ** 2 + 1j * (a1 * t + a2 * tp))
        return np.where(u <= u_hi, weight(u) * val, 0.0)

    res = integrate_2d_ordered(f, ((lo, hi), (lo, hi)), ordered=True, tol=tol,
                               s_points=[max(0.0, beta - _W * s), beta, u_hi])
    return res.scale(1j * lam / (8.0 * math.pi))


def m_oracle(scenario, tol=None, epsilon=None):
    """``M`` by brute-force time-ordered double integration of the regulated kernel.

    Pointlike, massless only.  Each rung of the epsilon ladder is integrated with
    the light-cone lag ``t - t' = beta`` as a panel edge and bands of
    ``1, 10, 100`` regulators around it; the ladder is extrapolated linearly.

    Raises
    ------
    ExtrapolationUnstable
        If the two linear extrapolants disagree beyond 1% or ten quadrature errors.
    """
    tol = tol or ORACLE_TOLERANCE
    _require_massless(scenario, "m_oracle")
    if not scenario.pointlike:
        raise UnsupportedScenario("m_oracle needs pointlike detectors")
    beta = scenario.beta
    lam = scenario.detector_a.coupling * scenario.detector_b.coupling
    terms = _switching_terms(scenario)
    centres = [c for term in terms for c in term[:2]]
    box = ((min(centres) - _W, max(centres) + _W),) * 2

    def run(eps):
        def f(t, tp):
            val = 0j
            for c1, c2, a1, a2 in terms:
                val = val + np.exp(-(t - c1) ** 2 - (tp - c2) ** 2 + 1j * (a1 * t + a2 * tp))
            return -val * _wightman_scaled(t - tp, beta, eps)

        return integrate_2d_ordered(f, box, ordered=True, tol=tol,
                                    s_points=_band_points((beta,), eps))

    out = _extrapolate(run, _ladder(scenario, epsilon), "m_oracle")
    out.value *= lam
    out.raw = tuple(lam * v for v in out.raw)
    out.extrapolants = tuple(lam * v for v in out.extrapolants)
    out.error_estimate *= abs(lam)
    out.quad_error *= abs(lam)
    return out


def _e_scaled(kappa, gamma):
    # exp(-kappa^2/2) exp(i gamma kappa) erfc((gamma + i kappa)/sqrt 2), via w(z) in the upper half plane.
    r2 = math.sqrt(2.0)
    if gamma >= 0.0:
        return math.exp(-0.5 * gamma * gamma) * faddeeva_w((-kappa + 1j * gamma) / r2)
    return (2.0 * np.exp(1j * gamma * kappa - 0.5 * kappa * kappa)
            - math.exp(-0.5 * gamma * gamma) * faddeeva_w((kappa - 1j * gamma) / r2))


def e_integral_reference(beta, gamma, tol=None):
    """``sqrt(2/pi) int_0^inf sin(beta k) e^{-k^2/2} (E(k, gamma) + E(k, -gamma)) dk``.

    ``E(k, gamma) = exp(i gamma k) erfc((gamma + i k) / sqrt 2)``.  This is the
    independent reference for the bracket ``-M / figure_scale`` of pointlike
    detectors.  The complex value is returned.
    """
    tol = tol or Tolerance(abs_tol=1e-12, rel_tol=1e-9)
    if not beta > 0:
        raise ValueError("beta must be positive")
    gamma = float(gamma)

    def f(kappa):
        return np.sin(beta * kappa) * (_e_scaled(kappa, gamma) + _e_scaled(kappa, -gamma))

    res = integrate_semi_infinite_oscillatory(f, 2.0 * math.pi / beta, tol)
    return res.scale(math.sqrt(2.0 / math.pi))


# ---------------------------------------------------------------------------
# Density matrix


@dataclass
class DensityMatrixBlocks:
    """Blocks of the leading-order density matrix per unit coupling.

    ``l_aa``/``l_bb`` are per ``lam_I^2``; ``l_ab`` and the ``m_*`` entries per
    ``lam_A lam_B``.  ``m_plus``/``m_minus`` are ``None`` when only the total was
    computed (oracle).  ``errors``, ``methods`` and ``evaluations`` are keyed by
    field name.
    """

    l_aa: complex
    l_bb: complex
    l_ab: complex
    m_total: complex
    m_plus: Optional[complex] = None
    m_minus: Optional[complex] = None
    errors: dict = field(default_factory=dict)
    methods: dict = field(default_factory=dict)
    evaluations: dict = field(default_factory=dict)

    @classmethod
    def from_split(cls, l_aa, l_bb, l_ab, m_plus, m_minus, **kw):
        return cls(l_aa, l_bb, l_ab, m_plus + m_minus, m_plus, m_minus, **kw)

    @property
    def l_ba(self):
        return complex(self.l_ab).conjugate()

    @property
    def max_block(self):
        return max(abs(self.l_aa), abs(self.l_bb), abs(self.l_ab), abs(self.m_total))


def _value_and_meta(res):
    if isinstance(res, (QuadratureResult, OracleResult)):
        return complex(res.value), float(res.error_estimate), int(res.evaluations)
    return complex(res), 0.0, 0


def compute_blocks(scenario, method="closed", tol=None):
    """Evaluate every block for ``scenario`` with couplings set to one.

    ``method`` is ``"closed"`` (closed forms, falling back to the integral paths
    outside their domain), ``"identity"`` (``M+`` from flipped-gap ``L_AB`` and
    ``M-`` from the light-cone integral) or ``"oracle"`` (brute-force double
    integrals).  ``L_IJ`` always comes from the mode integral except for the oracle.
    """
    if method not in ("closed", "identity", "oracle"):
        raise ValueError(f"unknown method {method!r}")
    unit = scenario.with_couplings(1.0, 1.0)
    values, errors, methods, evals = {}, {}, {}, {}

    def put(name, tag, fn):
        v, e, n = _value_and_meta(fn())
        values[name], errors[name], methods[name], evals[name] = v, e, tag, n

    if method == "oracle":
        put("l_aa", "oracle", lambda: l_ij_oracle(unit, "a", "a", tol=tol))
        put("l_bb", "oracle", lambda: l_ij_oracle(unit, "b", "b", tol=tol))
        put("l_ab", "oracle", lambda: l_ij_oracle(unit, "a", "b", tol=tol))
        put("m_total", "oracle", lambda: m_oracle(unit, tol=tol))
        return DensityMatrixBlocks(values["l_aa"], values["l_bb"], values["l_ab"],
                                   values["m_total"], errors=errors, methods=methods,
                                   evaluations=evals)

    put("l_aa", "mode", lambda: l_ij_mode(unit, "a", "a", tol=tol))
    put("l_bb", "mode", lambda: l_ij_mode(unit, "b", "b", tol=tol))
    put("l_ab", "mode", lambda: l_ij_mode(unit, "a", "b", tol=tol))
    if method == "closed":
        try:
            put("m_plus", "closed", lambda: m_plus_closed(unit))
        except UnsupportedScenario:
            put("m_plus", "identity", lambda: m_plus_identity(unit, tol=tol))
        try:
            put("m_minus", "closed", lambda: m_minus_closed(unit))
        except UnsupportedScenario:
            put("m_minus", "lightcone", lambda: m_minus_integral(unit, tol=tol))
    else:
        put("m_plus", "identity", lambda: m_plus_identity(unit, tol=tol))
        put("m_minus", "lightcone", lambda: m_minus_integral(unit, tol=tol))
    errors["m_total"] = errors["m_plus"] + errors["m_minus"]
    methods["m_total"] = "sum"
    evals["m_total"] = evals["m_plus"] + evals["m_minus"]
    return DensityMatrixBlocks.from_split(values["l_aa"], values["l_bb"], values["l_ab"],
                                          values["m_plus"], values["m_minus"], errors=errors,
                                          methods=methods, evaluations=evals)


@dataclass(frozen=True)
class TwoDetectorState:
    """4x4 density matrix in the basis ``|gg>, |eg>, |ge>, |ee>`` (A first)."""

    matrix: np.ndarray

    @property
    def trace(self):
        return complex(np.trace(self.matrix))

    def partial_transpose_b(self):
        # Basis index n = a + 2 b, so the reshaped axes are (b, a, b', a').
        r = self.matrix.reshape(2, 2, 2, 2)
        return r.transpose(2, 1, 0, 3).reshape(4, 4)


def _on_unit_grid(x):
    # Round to a multiple of 2**-53 (a shift below the ulp of 1) so that
    # 1 - L_AA - L_BB and the trace are exact for populations in [0, 1].
    return math.ldexp(round(math.ldexp(x, 53)), -53)


def assemble_rho(blocks, coupling_a=1.0, coupling_b=1.0):
    """Fill the leading-order density matrix from per-unit-coupling blocks.

    The populations are rounded to the absolute grid of the ground-state entry
    so the trace is exactly one.  Warns with :class:`PerturbativityWarning` if
    any scaled block exceeds 0.1.
    """
    la2, lb2, lab = coupling_a ** 2, coupling_b ** 2, coupling_a * coupling_b
    l_aa = _on_unit_grid(la2 * complex(blocks.l_aa).real)
    l_bb = _on_unit_grid(lb2 * complex(blocks.l_bb).real)
    l_ab = lab * complex(blocks.l_ab)
    m = lab * complex(blocks.m_total)
    biggest = max(abs(l_aa), abs(l_bb), abs(l_ab), abs(m))
    if biggest > _PERTURBATIVE_LIMIT:
        warnings.warn(f"density-matrix block of size {biggest:.3g} exceeds {_PERTURBATIVE_LIMIT}; "
                      "fourth-order corrections are not negligible", PerturbativityWarning,
                      stacklevel=2)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0 - l_aa - l_bb
    rho[1, 1] = l_aa
    rho[2, 2] = l_bb
    rho[1, 2] = l_ab
    rho[2, 1] = l_ab.conjugate()
    rho[3, 0] = m
    rho[0, 3] = m.conjugate()
    return TwoDetectorState(rho)


def negativity(state):
    """Sum of the magnitudes of the negative eigenvalues of the partial transpose over B."""
    m = state.matrix if isinstance(state, TwoDetectorState) else np.asarray(state)
    pt = TwoDetectorState(np.asarray(m, dtype=complex)).partial_transpose_b()
    eig = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(-eig[eig < 0].sum())


# ---------------------------------------------------------------------------
# Fast path against oracle


@dataclass
class ComparisonEntry:
    name: str
    fast: Optional[complex]
    oracle: Optional[complex]
    evaluations_fast: int = 0
    evaluations_oracle: int = 0
    wall_fast: float = 0.0
    wall_oracle: float = 0.0
    error: Optional[str] = None

    @property
    def abs_deviation(self):
        if self.fast is None or self.oracle is None:
            return None
        return abs(self.fast - self.oracle)

    @property
    def rel_deviation(self):
        d = self.abs_deviation
        if d is None:
            return None
        scale = abs(self.oracle)
        return d / scale if scale > 0 else math.inf if d > 0 else 0.0

    @property
    def evaluation_ratio(self):
        if self.evaluations_fast <= 0:
            return None
        return self.evaluations_oracle / self.evaluations_fast

    @property
    def speedup(self):
        if self.wall_fast <= 0:
            return None
        return self.wall_oracle / self.wall_fast


def _pack_complex(z):
    return None if z is None else [z.real, z.imag]


def _unpack_complex(v):
    return None if v is None else complex(v[0], v[1])


@dataclass
class ComparisonReport:
    """Fast-path and oracle values side by side, with their costs."""

    parameters: dict
    target: float
    entries: list
    epsilons: tuple = ()
    ladder: tuple = ()
    ladder_ratio: Optional[complex] = None

    def entry(self, name):
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def evaluations_fast(self):
        return sum(e.evaluations_fast for e in self.entries)

    @property
    def evaluations_oracle(self):
        return sum(e.evaluations_oracle for e in self.entries)

    def to_json(self):
        entries = []
        for e in self.entries:
            d = asdict(e)
            d["fast"], d["oracle"] = _pack_complex(e.fast), _pack_complex(e.oracle)
            entries.append(d)
        payload = {
            "parameters": self.parameters,
            "target": self.target,
            "entries": entries,
            "epsilons": list(self.epsilons),
            "ladder": [_pack_complex(z) for z in self.ladder],
            "ladder_ratio": _pack_complex(self.ladder_ratio),
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        entries = []
        for e in d["entries"]:
            e["fast"], e["oracle"] = _unpack_complex(e["fast"]), _unpack_complex(e["oracle"])
            entries.append(ComparisonEntry(**e))
        return cls(d["parameters"], d["target"], entries, tuple(d["epsilons"]),
                   tuple(_unpack_complex(z) for z in d["ladder"]),
                   _unpack_complex(d["ladder_ratio"]))

    def summary(self):
        lines = [f"target relative accuracy {self.target:g}"]
        for e in self.entries:
            if e.error:
                lines.append(f"{e.name}: error: {e.error}")
                continue
            lines.append(
                f"{e.name}: fast {e.fast:.10g} oracle {e.oracle:.10g} rel dev {e.rel_deviation:.3g} "
                f"evals {e.evaluations_fast}/{e.evaluations_oracle} "
                f"time {e.wall_fast:.3g}s/{e.wall_oracle:.3g}s")
        m = [e for e in self.entries if e.name == "m_total"]
        if m and m[0].evaluation_ratio is not None:
            lines.append(f"m_total evaluation ratio {m[0].evaluation_ratio:.1f}, "
                         f"speedup {m[0].speedup:.1f}")
        return "\n".join(lines)


def _timed(fn):
    start = time.perf_counter()
    res = fn()
    return res, time.perf_counter() - start


def compare_methods(scenario, tol=1e-3, epsilon=None, quantities=("l_aa", "l_ab", "m_total")):
    """Run the fast paths and the oracles for ``scenario`` at relative accuracy ``tol``.

    Both sides integrate at ``tol / 10`` so the comparison is at matched target
    accuracy.  Failures are recorded on the entry instead of aborting.
    """
    if not scenario.pointlike:
        raise UnsupportedScenario("the oracle needs pointlike detectors")
    unit = scenario.with_couplings(1.0, 1.0)
    fast_tol = Tolerance(abs_tol=1e-18, rel_tol=0.1 * tol)
    oracle_tol = Tolerance(abs_tol=1e-16, rel_tol=0.1 * tol,
                           max_evaluations=ORACLE_TOLERANCE.max_evaluations)

    def fast_m():
        return m_plus_identity(unit, fast_tol) + m_minus_integral(unit, fast_tol)

    paths = {
        "l_aa": (lambda: l_ij_mode(unit, "a", "a", tol=fast_tol),
                 lambda: l_ij_oracle(unit, "a", "a", tol=oracle_tol, epsilon=epsilon)),
        "l_bb": (lambda: l_ij_mode(unit, "b", "b", tol=fast_tol),
                 lambda: l_ij_oracle(unit, "b", "b", tol=oracle_tol, epsilon=epsilon)),
        "l_ab": (lambda: l_ij_mode(unit, "a", "b", tol=fast_tol),
                 lambda: l_ij_oracle(unit, "a", "b", tol=oracle_tol, epsilon=epsilon)),
        "m_total": (fast_m, lambda: m_oracle(unit, tol=oracle_tol, epsilon=epsilon)),
    }
    entries = []
    epsilons, ladder, ratio = (), (), None
    for name in quantities:
        fast_fn, oracle_fn = paths[name]
        entry = ComparisonEntry(name, None, None)
        try:
            res, entry.wall_fast = _timed(fast_fn)
            entry.fast, _, entry.evaluations_fast = _value_and_meta(res)
            res, entry.wall_oracle = _timed(oracle_fn)
            entry.oracle, _, entry.evaluations_oracle = _value_and_meta(res)
            if name == "m_total":
                epsilons, ladder, ratio = res.epsilons, res.raw, res.ratio
        except HarvestError as exc:
            entry.error = f"{type(exc).__name__}: {exc}"
        entries.append(entry)
    params = {"alpha_a": scenario.alpha_a, "alpha_b": scenario.alpha_b, "beta": scenario.beta,
              "gamma": scenario.gamma, "switch_width": scenario.switch_width}
    return ComparisonReport(params, float(tol), entries, tuple(epsilons), tuple(ladder), ratio)

"""Adaptive quadrature with evaluation accounting.

Three engines share one globally adaptive Gauss-Kronrod (7/15) core:

* :func:`integrate_1d` for finite intervals,
* :func:`integrate_semi_infinite_oscillatory` for decaying oscillatory tails on
  ``[start, inf)``, integrated half-wavelength by half-wavelength with iterated
  averaging of the partial sums,
* :func:`integrate_2d_ordered` for rectangles and their time-ordered halves,
  nested as an adaptive outer integral over the lag ``s = t - t'`` and a
  vectorised composite inner integral over ``t``.

All integrands are called with numpy arrays and must return arrays of the same
shape (real or complex).  Subdivision is deterministic, so evaluation counts are
reproducible run to run.
"""

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExhausted, NonDecayingIntegrand

__all__ = [
    "Tolerance",
    "QuadratureResult",
    "integrate_1d",
    "integrate_semi_infinite_oscillatory",
    "integrate_2d_ordered",
]

# Kronrod 15-point nodes (non-negative half) and weights, with the embedded
# Gauss 7-point weights on the odd Kronrod nodes (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])          # 15 nodes, ascending
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[1:15:2] = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Tolerance:
    """Accuracy target ``|err| <= max(abs_tol, rel_tol * |value|)``."""

    abs_tol: float = 1e-13
    rel_tol: float = 1e-10
    max_evaluations: int = 5_000_000

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and positive, got {v!r}")
        if self.max_evaluations <= 0:
            raise ValueError("max_evaluations must be positive")

    def target(self, value):
        return max(self.abs_tol, self.rel_tol * abs(value))

    def scaled(self, factor):
        return Tolerance(self.abs_tol * factor, self.rel_tol * factor, self.max_evaluations)


DEFAULT_TOLERANCE = Tolerance()


@dataclass
class QuadratureResult:
    value: complex
    error_estimate: float
    evaluations: int
    converged: bool = True

    def __complex__(self):
        return complex(self.value)

    def __add__(self, other):
        if not isinstance(other, QuadratureResult):
            return NotImplemented
        return QuadratureResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.evaluations + other.evaluations,
            self.converged and other.converged,
        )

    def scale(self, factor):
        return QuadratureResult(self.value * factor, self.error_estimate * abs(factor),
                                self.evaluations, self.converged)


class _Counter:
    __slots__ = ("n",)

    def __init__(self):
        self.n = 0


def _gk15_batch(values, half):
    """Kronrod estimate and QUADPACK-style error for panels along the last axis."""
    resk = values @ _KWEIGHTS
    resg = values @ _GWEIGHTS
    mean = 0.5 * resk
    resabs = np.abs(values) @ _KWEIGHTS
    resasc = np.abs(values - mean[..., None]) @ _KWEIGHTS
    err = np.abs(resk - resg) * half
    resasc = resasc * half
    resabs = resabs * half
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(resasc > 0, np.minimum(1.0, (200.0 * err / resasc) ** 1.5), 1.0)
    err = np.where((resasc > 0) & (err > 0), resasc * ratio, err)
    err = np.maximum(err, 50.0 * _EPS * resabs)
    return resk * half, err, resabs


def _eval_panels(g, lo, hi):
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    y = np.asarray(g(x))
    y = np.broadcast_to(y, x.shape)
    return _gk15_batch(y, half)


def _adaptive(g, edges, tol, counter, evals_per_panel):
    """Globally adaptive bisection on the panels delimited by ``edges``."""
    lo = np.asarray(edges[:-1], dtype=float)
    hi = np.asarray(edges[1:], dtype=float)
    vals, errs, abss = _eval_panels(g, lo, hi)
    heap = []
    panels = {}
    serial = 0
    total = complex(np.sum(vals))
    total_err = float(np.sum(errs))
    total_abs = float(np.sum(abss))
    for a, b, v, e, r in zip(lo, hi, vals, errs, abss):
        panels[serial] = (a, b, complex(v), float(e), float(r))
        heapq.heappush(heap, (-float(e), serial))
        serial += 1

    converged = True
    while True:
        target = max(tol.target(total), 50.0 * _EPS * total_abs)
        if total_err <= target:
            break
        if counter.n + 2 * evals_per_panel > tol.max_evaluations:
            converged = False
            break
        if not heap:
            break
        _, key = heapq.heappop(heap)
        a, b, v, e, r = panels.pop(key)
        mid = 0.5 * (a + b)
        if not (a < mid < b) or (b - a) <= 8 * _EPS * max(abs(a), abs(b), 1.0):
            # Panel cannot be split further; freeze it at its current estimate.
            panels[key] = (a, b, v, 0.0, r)
            total_err -= e
            continue
        nv, ne, nr = _eval_panels(g, [a, mid], [mid, b])
        total += complex(nv[0] + nv[1]) - v
        total_err += float(ne[0] + ne[1]) - e
        total_abs += float(nr[0] + nr[1]) - r
        for aa, bb, vv, ee, rr in ((a, mid, nv[0], ne[0], nr[0]), (mid, b, nv[1], ne[1], nr[1])):
            panels[serial] = (aa, bb, complex(vv), float(ee), float(rr))
            heapq.heappush(heap, (-float(ee), serial))
            serial += 1

    ordered = sorted(panels.values(), key=lambda p: p[0])
    value = math.fsum(p[2].real for p in ordered) + 1j * math.fsum(p[2].imag for p in ordered)
    err = math.fsum(p[3] for p in ordered)
    return value, err, converged


def _as_result(value, err, evaluations, converged):
    value = complex(value)
    return QuadratureResult(value, float(err), int(evaluations), converged)


def _check_budget(result, what):
    if not result.converged:
        raise BudgetExhausted(
            f"{what}: evaluation budget exhausted (estimate {result.value!r}, "
            f"error {result.error_estimate:.3g} after {result.evaluations} evaluations)",
            result,
        )
    return result


def integrate_1d(f, a, b, tol=None, points=None):
    """Integrate ``f`` over ``[a, b]`` to ``tol``.

    Parameters
    ----------
    f : callable
        Vectorised integrand, ``f(x_array) -> array``.
    a, b : float
        Finite limits with ``a <= b``.
    tol : Tolerance, optional
    points : sequence of float, optional
        Interior breakpoints (kinks, near-singularities) used as initial panel edges.

    Raises
    ------
    BudgetExhausted
        With the best estimate attached as ``.result``.
    """
    tol = tol or DEFAULT_TOLERANCE
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integrate_1d needs finite limits")
    if b < a:
        raise ValueError(f"need a <= b, got a={a}, b={b}")
    if a == b:
        return QuadratureResult(0j, 0.0, 0)
    edges = [a] + sorted({float(p) for p in (points or ()) if a < p < b}) + [b]
    counter = _Counter()

    def g(x):
        counter.n += x.size
        return f(x)

    value, err, ok = _adaptive(g, edges, tol, counter, 15)
    return _check_budget(_as_result(value, err, counter.n, ok), "integrate_1d")


def _iterated_average(partials):
    s = np.array(partials, dtype=complex)
    while s.size > 1:
        s = 0.5 * (s[1:] + s[:-1])
    return complex(s[0])


def integrate_semi_infinite_oscillatory(f, osc_wavelength, tol=None, start=0.0,
                                        max_segments=20000, window=12):
    """Integrate a decaying, possibly oscillatory ``f`` over ``[start, inf)``.

    The half-line is cut into segments of length ``osc_wavelength / 2``, each
    integrated adaptively.  The running partial sums are accelerated by iterated
    pairwise averaging over the last ``window`` sums, which cancels the
    alternating tail of a half-wavelength decomposition.  Integration stops once
    either the raw segments or two consecutive accelerated estimates fall below
    the target.

    Parameters
    ----------
    osc_wavelength : float
        Finest oscillation period of the integrand; ``math.inf`` for none, in
        which case unit segments are used.

    Raises
    ------
    NonDecayingIntegrand
        If the largest segment contribution over the last 10 segments is no
        smaller than every earlier one (checked from segment 20 on).
    BudgetExhausted
    """
    tol = tol or DEFAULT_TOLERANCE
    if not osc_wavelength > 0:
        raise ValueError("osc_wavelength must be positive")
    h = 1.0 if math.isinf(osc_wavelength) else 0.5 * float(osc_wavelength)
    seg_tol = tol.scaled(0.1)
    partials = []
    seg_sizes = []
    tails = []
    accelerated = []
    total = 0j
    total_err = 0.0
    evaluations = 0
    a = float(start)
    for n in range(max_segments):
        remaining = tol.max_evaluations - evaluations
        if remaining < 30:
            break
        local = Tolerance(max(seg_tol.abs_tol, seg_tol.rel_tol * abs(total)), seg_tol.rel_tol,
                          remaining)
        try:
            seg = integrate_1d(f, a, a + h, local)
        except BudgetExhausted as exc:
            seg = exc.result
            evaluations += seg.evaluations
            break
        a += h
        evaluations += seg.evaluations
        total += seg.value
        total_err += seg.error_estimate
        partials.append(total)
        seg_sizes.append(abs(seg.value))
        accelerated.append(_iterated_average(partials[-window:]))

        if n < 2:
            continue
        target = tol.target(total)
        if max(seg_sizes[-3:]) <= 0.1 * target:
            return QuadratureResult(total, total_err + sum(seg_sizes[-3:]), evaluations)
        d1 = abs(accelerated[-1] - accelerated[-2])
        d2 = abs(accelerated[-2] - accelerated[-3])
        tail = max(d1, d2)
        tails.append(tail)
        decaying = seg_sizes[-1] < seg_sizes[-3] * (1.0 - 1e-9)
        if d1 <= target and d2 <= target and len(partials) >= 4 and decaying:
            return QuadratureResult(accelerated[-1], total_err + tail, evaluations)
        if n >= 20:
            envelope = max(seg_sizes[-10:])
            if envelope >= max(seg_sizes[:-10]):
                raise NonDecayingIntegrand(
                    f"segment contributions stopped shrinking (envelope {envelope:.3g} "
                    f"after {n + 1} segments)",
                    QuadratureResult(accelerated[-1], total_err + tail, evaluations, False),
                )
    value = accelerated[-1] if accelerated else total
    err = total_err + (tails[-1] if tails else abs(total))
    raise BudgetExhausted(
        "semi-infinite integral did not converge within budget",
        QuadratureResult(value, err, evaluations, False),
    )


def _inner_composite(f, s, t_lo, t_hi, tol, counter, max_panels):
    """Vectorised composite GK15 over ``t`` for each lag in ``s``; panels double until met."""
    s = np.asarray(s, dtype=float)
    shape = s.shape
    s = s.ravel()
    lo = np.asarray(t_lo, dtype=float).ravel()
    hi = np.asarray(t_hi, dtype=float).ravel()
    width = np.maximum(hi - lo, 0.0)
    n = 4
    while True:
        edges = lo[:, None] + width[:, None] * (np.arange(n + 1)[None, :] / n)
        plo = edges[:, :-1]
        phi = edges[:, 1:]
        half = 0.5 * (phi - plo)
        centre = 0.5 * (phi + plo)
        t = centre[..., None] + half[..., None] * _NODES
        values = np.broadcast_to(np.asarray(f(t, t - s[:, None, None])), t.shape)
        counter.n += int(np.count_nonzero(width)) * n * 15
        val, err, _ = _gk15_batch(values, half)
        total = val.sum(axis=1)
        total_err = err.sum(axis=1)
        target = np.maximum(tol.abs_tol, tol.rel_tol * np.abs(total))
        if np.all(total_err <= target) or n >= max_panels:
            ok = bool(np.all(total_err <= target))
            total = np.where(width > 0, total, 0.0)
            return total.reshape(shape), ok
        n *= 2


def integrate_2d_ordered(f, box, ordered=False, tol=None, s_points=None, max_inner_panels=1024):
    """Integrate ``f(t, t_prime)`` over a rectangle or its ``t_prime < t`` part.

    The domain is parametrised by the lag ``s = t - t_prime`` (outer, adaptive)
    and ``t`` (inner), so the ordering edge ``t_prime = t`` becomes the panel
    boundary ``s = 0`` and never cuts through a cell.

    Parameters
    ----------
    f : callable
        ``f(t, t_prime)`` on broadcastable arrays.
    box : ((t_lo, t_hi), (tp_lo, tp_hi))
    ordered : bool
        Restrict to ``t_prime < t``.
    s_points : sequence of float, optional
        Lags where the integrand is sharp (e.g. light-cone bands).

    Raises
    ------
    BudgetExhausted
    """
    tol = tol or DEFAULT_TOLERANCE
    (t_lo, t_hi), (tp_lo, tp_hi) = box
    if not (t_lo < t_hi and tp_lo < tp_hi):
        raise ValueError("box must have positive extent in both directions")
    s_lo = t_lo - tp_hi
    s_hi = t_hi - tp_lo
    if ordered:
        s_lo = max(s_lo, 0.0)
    if s_hi <= s_lo:
        return QuadratureResult(0j, 0.0, 0)
    edges = [s_lo] + sorted({float(p) for p in (s_points or ()) if s_lo < p < s_hi}) + [s_hi]
    if ordered or s_lo < 0.0 < s_hi:
        edges = sorted(set(edges) | ({0.0} if s_lo < 0.0 < s_hi else set()))
    counter = _Counter()
    inner_tol = tol.scaled(0.1)
    inner_ok = [True]

    def g(s):
        lo = np.maximum(t_lo, tp_lo + s)
        hi = np.minimum(t_hi, tp_hi + s)
        out, ok = _inner_composite(f, s, lo, hi, inner_tol, counter, max_inner_panels)
        inner_ok[0] &= ok
        return out

    value, err, ok = _adaptive(g, edges, tol, counter, 15 * 60)
    result = _as_result(value, err, counter.n, ok and inner_ok[0])
    return _check_budget(result, "integrate_2d_ordered")

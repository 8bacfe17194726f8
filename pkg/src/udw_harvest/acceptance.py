"""Acceptance criteria A1-A10 as plain functions.

Each ``run_aN`` returns a :class:`CriterionResult` with the measured figure of
merit, so the pytest suite and ``udw-harvest selftest`` share one
implementation.  Harvest routines are looked up on the module at call time,
which lets tests inject faults with ``monkeypatch``.
"""

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from . import harvest as hv
from . import mpref, specfun
from .model import Scenario

__all__ = ["CriterionResult", "CRITERIA", "run_criteria", "format_result"]


@dataclass
class CriterionResult:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""
    seconds: float = 0.0


def format_result(r):
    status = "PASS" if r.passed else "FAIL"
    return (f"{status} {r.name}: measured {r.measured:.3g} (threshold {r.threshold:.3g}) "
            f"{r.detail} [{r.seconds:.1f}s]").rstrip()


def _rel(a, b):
    a, b = complex(a), complex(b)
    if a == b:
        return 0.0
    return abs(a - b) / abs(b) if b != 0 else math.inf


# ---------------------------------------------------------------------------


def run_a1(n=1000, seed=7):
    """Special functions against the arbitrary-precision series oracle."""
    sob = qmc.Halton(d=2, scramble=True, seed=seed).random(n)
    worst = {}
    # Domains actually visited by the closed forms and the reference integrand.
    x_dawson = -25.0 + 50.0 * sob[:, 0]
    x_erfi = -5.0 + 10.0 * sob[:, 0]
    z_erf = (-4.0 + 8.0 * sob[:, 0]) + 1j * (-4.0 + 8.0 * sob[:, 1])
    z_w = (-30.0 + 60.0 * sob[:, 0]) + 1j * (15.0 * sob[:, 1])
    cases = {
        "faddeeva_w": (specfun.faddeeva_w, mpref.mp_faddeeva, z_w),
        "erf_complex": (specfun.erf_complex, mpref.mp_erf, z_erf),
        "erfc_complex": (specfun.erfc_complex, mpref.mp_erfc, z_erf),
        "erfi_real": (specfun.erfi_real, mpref.mp_erfi, x_erfi),
        "dawson": (specfun.dawson, mpref.mp_dawson, x_dawson),
    }
    for name, (fast, oracle, pts) in cases.items():
        got = np.asarray(fast(pts))
        worst[name] = max(_rel(g, complex(oracle(p))) for g, p in zip(got, pts))
    measured = max(worst.values())
    detail = " ".join(f"{k}={v:.1e}" for k, v in worst.items())
    return CriterionResult("A1 special functions", measured <= 1e-12, measured, 1e-12,
                           f"({n} points each: {detail})")


def run_a2():
    """Central identity: flipped-gap mutual information against the closed form of M+."""
    worst, where = 0.0, None
    count = 0
    for alpha in (0, 1, 2, 4):
        for beta in (1, 5, 10):
            for gamma in range(21):
                for delta in (0, 1):
                    s = Scenario.from_dimensionless(alpha, beta, gamma, delta)
                    rel = _rel(hv.m_plus_identity(s).value, hv.m_plus_closed(s))
                    count += 1
                    if rel > worst:
                        worst, where = rel, (alpha, beta, gamma, delta)
    return CriterionResult("A2 central identity", worst <= 1e-8, worst, 1e-8,
                           f"({count} points, worst at alpha,beta,gamma,delta={where})")


#: (alpha, beta, gamma), i, j, gap overrides in units of 1/T (None keeps the detector gap).
A3_POINTS = (
    ((1, 5, 0), "a", "a", None, None),
    ((1, 5, 0), "a", "b", None, None),
    ((1, 5, 3), "a", "b", None, None),
    ((1, 5, 3), "a", "b", 1.0, -1.0),
    ((2, 1, 2), "b", "a", 2.0, -2.0),
    ((-1, 2, 1), "a", "b", None, None),
)


def run_a3():
    """Mode-sum mutual information against the regulated double time integral."""
    worst = 0.0
    parts = []
    for (alpha, beta, gamma), i, j, gi, gj in A3_POINTS:
        s = Scenario.from_dimensionless(alpha, beta, gamma)
        fast = hv.l_ij_mode(s, i, j, gi, gj).value
        oracle = hv.l_ij_oracle(s, i, j, gi, gj).value
        rel = _rel(fast, oracle)
        worst = max(worst, rel)
        flip = "" if gi is None else "[flipped]"
        parts.append(f"L_{i.upper()}{j.upper()}{flip}({alpha},{beta},{gamma})={rel:.1e}")
    return CriterionResult("A3 convention pinning", worst <= 1e-4, worst, 1e-4,
                           "(" + " ".join(parts) + ")")


A4_POINTS = ((1, 5, 0), (1, 5, 5), (1, 5, 10), (0, 1, 3), (2, 10, 0))


def run_a4():
    """Brute-force time-ordered M against closed-form M+ plus closed-form M-."""
    worst = 0.0
    parts = []
    for alpha, beta, gamma in A4_POINTS:
        s = Scenario.from_dimensionless(alpha, beta, gamma)
        split = hv.m_plus_closed(s) + hv.m_minus_closed(s)
        oracle = hv.m_oracle(s)
        rel = _rel(split, oracle.value)
        worst = max(worst, rel)
        parts.append(f"({alpha},{beta},{gamma})={rel:.1e}/ratio {oracle.ratio.real:.2f}")
    return CriterionResult("A4 decomposition", worst <= 1e-3, worst, 1e-3,
                           "(" + " ".join(parts) + ")")


def figure_curves(beta, n=201, gamma_max=20.0):
    """Scaled closed-form M and the negated reference integral over a gamma grid."""
    gammas = np.linspace(0.0, gamma_max, n)
    closed = np.empty(n, dtype=complex)
    ref = np.empty(n, dtype=complex)
    for k, g in enumerate(gammas):
        s = Scenario.from_dimensionless(0.0, beta, g)
        closed[k] = hv.scaled_m(s, hv.m_plus_closed(s) + hv.m_minus_closed(s))
        ref[k] = -hv.e_integral_reference(beta, g).value
    return gammas, closed, ref


def run_a5():
    """Scaled closed form against the reference integral for beta = 1, 5, 10."""
    worst = 0.0
    parts = []
    for beta in (1, 5, 10):
        _, closed, ref = figure_curves(beta)
        dev = np.max(np.abs(closed - ref)) / np.max(np.abs(closed))
        worst = max(worst, dev)
        parts.append(f"beta={beta}: {dev:.1e}")
    return CriterionResult("A5 reference curves", worst <= 1e-3, worst, 1e-3,
                           "(max |dev| / max |curve|, " + ", ".join(parts) + ")")


def run_a6(beta=5.0):
    """Light-cone structure of M+ and M- and positivity of Im M."""
    gammas = np.linspace(0.0, 20.0, 201)
    mp = np.empty(gammas.size)
    mm = np.empty(gammas.size)
    im_total = np.empty(gammas.size)
    for k, g in enumerate(gammas):
        s = Scenario.from_dimensionless(1.0, beta, g)
        p, m = hv.m_plus_closed(s), hv.m_minus_closed(s)
        mp[k], mm[k], im_total[k] = abs(p), abs(m), (p + m).imag
    g_min = gammas[np.argmin(mp)]
    g_max = gammas[np.argmax(mm)]
    ok = 4.5 <= g_min <= 5.5 and 4.5 <= g_max <= 5.5 and bool(np.all(im_total > 0))
    measured = max(abs(g_min - beta), abs(g_max - beta))
    return CriterionResult("A6 light-cone structure", ok, measured, 0.5,
                           f"(argmin|M+|={g_min:.2f}, argmax|M-|={g_max:.2f}, "
                           f"min Im M={im_total.min():.3g})")


def run_a7():
    """Swap, parity and conjugation symmetries; exact trace and Hermiticity."""
    swap, parity, conj = 0.0, 0.0, 0.0
    points = ((1, 5, 3), (0, 1, 0.5), (2, 10, 12))
    paths = (
        lambda s: hv.m_plus_identity(s).value,
        hv.m_plus_closed,
        hv.m_minus_closed,
        lambda s: hv.m_minus_integral(s).value,
    )
    for alpha, beta, gamma in points:
        s = Scenario.from_dimensionless(alpha, beta, gamma)
        s_neg = Scenario.from_dimensionless(alpha, beta, -gamma)
        for path in paths:
            v = path(s)
            swap = max(swap, _rel(path(s.swapped()), v))
            parity = max(parity, _rel(path(s_neg), v))
        conj = max(conj, _rel(hv.l_ij_mode(s, "b", "a").value,
                              hv.l_ij_mode(s, "a", "b").value.conjugate()))
    s = Scenario.from_dimensionless(1, 5, 3)
    oracle = hv.m_oracle(s).value
    swap = max(swap, _rel(hv.m_oracle(s.swapped()).value, oracle))
    parity = max(parity, _rel(hv.m_oracle(Scenario.from_dimensionless(1, 5, -3)).value, oracle))
    s_smeared = Scenario.from_dimensionless(1, 5, 3, 0.5, delta_b=0.3)
    v = hv.m_minus_integral(s_smeared).value
    swap = max(swap, _rel(hv.m_minus_integral(s_smeared.swapped()).value, v))

    rng = np.random.default_rng(11)
    trace_err, herm_err = 0.0, 0.0
    for _ in range(50):
        l_aa, l_bb = rng.uniform(0, 0.05, 2)
        blocks = hv.DensityMatrixBlocks(l_aa, l_bb, complex(*rng.normal(0, 0.01, 2)),
                                        complex(*rng.normal(0, 0.01, 2)))
        rho = hv.assemble_rho(blocks, *rng.uniform(0.1, 1.0, 2)).matrix
        trace_err = max(trace_err, abs(np.trace(rho) - 1.0))
        herm_err = max(herm_err, float(np.max(np.abs(rho - rho.conj().T))))
    ok = swap <= 1e-10 and parity <= 1e-10 and conj <= 1e-12 and trace_err == 0 and herm_err == 0
    return CriterionResult("A7 symmetries", ok, max(swap, parity), 1e-10,
                           f"(swap {swap:.1e}, parity {parity:.1e}, L_BA vs conj L_AB {conj:.1e}, "
                           f"|tr-1| {trace_err:.1e}, |rho-rho^H| {herm_err:.1e})")


def run_a8():
    """Commutator part is negligible off the light cone; smeared path is continuous at delta -> 0."""
    ratios = []
    for beta, gamma in ((10, 0), (1, 10)):
        s = Scenario.from_dimensionless(1.0, beta, gamma)
        ratios.append(abs(hv.m_minus_closed(s)) / abs(hv.m_plus_closed(s)))
    smeared = hv.m_minus_integral(Scenario.from_dimensionless(0.0, 5, 5, 1e-3)).value
    cont = _rel(smeared, hv.m_minus_closed(Scenario.from_dimensionless(0.0, 5, 5)))
    ok = max(ratios) < 1e-3 and cont <= 1e-4
    return CriterionResult("A8 light-cone support", ok, max(ratios), 1e-3,
                           f"(|M-|/|M+| at (10,0) {ratios[0]:.1e}, at (1,10) {ratios[1]:.1e}; "
                           f"delta=1e-3 continuity {cont:.1e} <= 1e-4)")


def run_a9():
    """Evaluation-count reduction of the fast path at matched 1e-3 accuracy."""
    s = Scenario.from_dimensionless(1, 5, 0)
    report = hv.compare_methods(s, 1e-3, quantities=("m_total",))
    e = report.entry("m_total")
    if e.error:
        return CriterionResult("A9 complexity reduction", False, 0.0, 100.0, f"({e.error})")
    ratio = e.evaluation_ratio
    ok = ratio >= 100 and e.rel_deviation <= 1e-3
    return CriterionResult("A9 complexity reduction", ok, ratio, 100.0,
                           f"(evaluations {e.evaluations_fast} vs {e.evaluations_oracle}, "
                           f"rel dev {e.rel_deviation:.1e}, wall {e.wall_fast:.3g}s vs "
                           f"{e.wall_oracle:.3g}s)")


def run_a10(n=50, seed=3):
    """Partial-transpose negativity against |M| - L_AA for identical detectors."""
    rng = np.random.default_rng(seed)
    worst_ratio = 0.0
    for _ in range(n):
        scale = 10.0 ** rng.uniform(-5, -2)
        l_aa = scale * rng.uniform(0.1, 1.0)
        l_ab = l_aa * rng.uniform(0, 1) * np.exp(2j * np.pi * rng.uniform())
        m = scale * rng.uniform(0, 2) * np.exp(2j * np.pi * rng.uniform())
        blocks = hv.DensityMatrixBlocks(l_aa, l_aa, l_ab, m)
        biggest = blocks.max_block
        dev = abs(hv.negativity(hv.assemble_rho(blocks)) - max(0.0, abs(m) - l_aa))
        worst_ratio = max(worst_ratio, dev / biggest ** 2)
    return CriterionResult("A10 negativity", worst_ratio <= 10.0, worst_ratio, 10.0,
                           f"(max |N - max(0,|M|-L_AA)| / (max block)^2 over {n} states)")


CRITERIA = {
    "A1": run_a1,
    "A2": run_a2,
    "A3": run_a3,
    "A4": run_a4,
    "A5": run_a5,
    "A6": run_a6,
    "A7": run_a7,
    "A8": run_a8,
    "A9": run_a9,
    "A10": run_a10,
}


def run_criteria(names=None, echo=None):
    """Run the selected criteria in order; exceptions count as failures."""
    out = []
    for name in names or CRITERIA:
        start = time.perf_counter()
        try:
            r = CRITERIA[name]()
        except Exception as exc:  # a crash is a failed criterion, reported with its cause
            r = CriterionResult(name, False, math.nan, math.nan, f"({type(exc).__name__}: {exc})")
        r.seconds = time.perf_counter() - start
        out.append(r)
        if echo is not None:
            echo(format_result(r))
    return out

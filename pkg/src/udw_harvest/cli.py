"""Command-line front end: ``udw-harvest {compute,sweep,figures,compare,selftest}``.

Configuration is a flat ``key=value`` file (``#`` starts a comment) overridden
by repeatable ``--set key=value`` flags.  Exit codes: 0 success, 1 failed
self-test, 2 configuration error, 3 quadrature budget exhausted or oracle
extrapolation failure.
"""

import argparse
import io
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from . import acceptance
from . import harvest as hv
from .errors import (BudgetExhausted, ConfigError, ExtrapolationUnstable, HarvestError,
                     PerturbativityWarning, UnsupportedScenario)
from .model import Scenario
from .quad import Tolerance

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3

METHODS = ("closed", "identity", "oracle", "all")
AXES = ("gamma", "beta", "alpha", "delta")


@dataclass(frozen=True)
class RunConfig:
    """Every key accepted in a config file or by ``--set``.

    Physical inputs are dimensionless: ``alpha = Omega T``, ``beta = L / T``,
    ``gamma = (t_B - t_A) / T``, ``delta = sigma / T``; ``midpoint`` is
    ``(t_A + t_B) / (2 T)``.  ``alpha_b``/``delta_b``/``coupling_b`` default to
    the detector-A values.
    """

    alpha: float = 1.0
    alpha_b: float = math.nan
    beta: float = 5.0
    gamma: float = 0.0
    midpoint: float = 0.0
    delta: float = 0.0
    delta_b: float = math.nan
    coupling: float = 1.0
    coupling_b: float = math.nan
    switch_width: float = 1.0
    mass: float = 0.0
    epsilon: float = math.nan
    method: str = "closed"
    axis: str = "gamma"
    start: float = 0.0
    stop: float = 20.0
    count: int = 201
    tol: float = math.nan
    workers: int = 4
    seed: int = 0

    def scenario(self, **override):
        c = replace(self, **override) if override else self

        def opt(v):
            return None if math.isnan(v) else v

        return Scenario.from_dimensionless(
            c.alpha, c.beta, c.gamma, c.delta, alpha_b=opt(c.alpha_b), delta_b=opt(c.delta_b),
            coupling=c.coupling, coupling_b=opt(c.coupling_b), switch_width=c.switch_width,
            mass=c.mass, epsilon=opt(c.epsilon), midpoint=c.midpoint)

    @property
    def couplings(self):
        return self.coupling, (self.coupling if math.isnan(self.coupling_b) else self.coupling_b)

    @property
    def tolerance(self):
        if math.isnan(self.tol):
            return None
        return Tolerance(abs_tol=1e-18, rel_tol=self.tol)

    def axis_values(self):
        return np.linspace(self.start, self.stop, self.count)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key, text):
    kind = _FIELD_TYPES[key]
    try:
        if kind in (float, "float"):
            return float(text)
        if kind in (int, "int"):
            return int(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as {kind}") from None
    if key == "method" and text not in METHODS:
        raise ConfigError(f"method must be one of {', '.join(METHODS)}, got {text!r}")
    if key == "axis" and text not in AXES:
        raise ConfigError(f"axis must be one of {', '.join(AXES)}, got {text!r}")
    return text


def parse_assignments(lines, source):
    out = {}
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{source}:{n}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def load_config(path=None, sets=()):
    """Merge a config file and ``--set`` overrides; unknown keys raise :class:`ConfigError`."""
    values = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                values.update(parse_assignments(fh, path))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    values.update(parse_assignments(sets, "--set"))
    cfg = RunConfig(**values)
    if cfg.count < 1 or cfg.workers < 1:
        raise ConfigError("count and workers must be positive")
    try:
        cfg.scenario()
    except ValueError as exc:
        raise ConfigError(f"invalid scenario: {exc}") from None
    return cfg


# ---------------------------------------------------------------------------
# Formatting


def fmt(x):
    return format(float(x), ".17g")


def write_csv(header, rows, out):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    _emit(buf.getvalue(), out)


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cplx(z):
    return f"{z.real:.12g}{z.imag:+.12g}j"


BLOCK_NAMES = ("l_aa", "l_bb", "l_ab", "m_plus", "m_minus", "m_total")


def format_blocks(blocks, title):
    lines = [f"[{title}]"]
    for name in BLOCK_NAMES:
        v = getattr(blocks, name)
        if v is None:
            continue
        lines.append(f"  {name:8s} = {_cplx(complex(v))}  err {blocks.errors.get(name, 0.0):.2e}  "
                     f"method {blocks.methods.get(name, '-')}  evals {blocks.evaluations.get(name, 0)}")
    return lines


def _state(blocks, cfg):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", PerturbativityWarning)
        state = hv.assemble_rho(blocks, *cfg.couplings)
    return state, [str(w.message) for w in caught]


# ---------------------------------------------------------------------------
# Commands


def cmd_compute(cfg, out=None):
    scenario = cfg.scenario()
    methods = ("closed", "identity", "oracle") if cfg.method == "all" else (cfg.method,)
    results = {}
    lines = [f"alpha={cfg.alpha:g} beta={cfg.beta:g} gamma={cfg.gamma:g} delta={cfg.delta:g} "
             f"(blocks per unit coupling)"]
    for m in methods:
        try:
            results[m] = hv.compute_blocks(scenario, m, cfg.tolerance)
        except (BudgetExhausted, ExtrapolationUnstable):
            raise
        except HarvestError as exc:
            if cfg.method != "all":
                raise
            lines.append(f"[{m}] unavailable: {exc}")
            continue
        lines.extend(format_blocks(results[m], m))
    if not results:
        raise HarvestError("no method could evaluate this scenario")
    primary = results[methods[0]] if methods[0] in results else next(iter(results.values()))
    if len(results) > 1:
        lines.append("[deviations from closed]")
        ref = results.get("closed", primary)
        for m, b in results.items():
            if b is ref:
                continue
            for name in ("l_aa", "l_bb", "l_ab", "m_total"):
                a, r = complex(getattr(b, name)), complex(getattr(ref, name))
                rel = abs(a - r) / abs(r) if r else math.inf
                lines.append(f"  {m:8s} {name:8s} abs {abs(a - r):.3e} rel {rel:.3e}")
    state, warns = _state(primary, cfg)
    lines.append("[rho] basis |gg>, |eg>, |ge>, |ee>")
    for row in state.matrix:
        lines.append("  " + "  ".join(_cplx(z) for z in row))
    lines.append(f"negativity = {hv.negativity(state):.12g}")
    if scenario.beta > 0:
        lam = scenario.detector_a.coupling * scenario.detector_b.coupling
        lines.append(f"scaled M = {_cplx(hv.scaled_m(scenario, lam * primary.m_total))}")
    lines.extend(f"warning: {w}" for w in warns)
    _emit("\n".join(lines) + "\n", out)
    return EXIT_OK


SWEEP_HEADER = ["value"] + [f"{p}_{n}" for n in BLOCK_NAMES for p in ("re", "im")] + [
    "re_m_scaled", "im_m_scaled", "negativity"] + [f"err_{n}" for n in BLOCK_NAMES] + [
    "evaluations", "error"]


def _sweep_point(cfg, value):
    try:
        scenario = cfg.scenario(**{cfg.axis: float(value)})
        blocks = hv.compute_blocks(scenario, cfg.method, cfg.tolerance)
        state, _ = _state(blocks, cfg)
        row = [value]
        for n in BLOCK_NAMES:
            v = getattr(blocks, n)
            v = complex("nan") if v is None else complex(v)
            row += [v.real, v.imag]
        lam = scenario.detector_a.coupling * scenario.detector_b.coupling
        scaled = hv.scaled_m(scenario, lam * blocks.m_total) if scenario.beta > 0 else complex("nan")
        row += [scaled.real, scaled.imag, hv.negativity(state)]
        row += [blocks.errors.get(n, math.nan) for n in BLOCK_NAMES]
        row += [sum(blocks.evaluations.get(n, 0) for n in ("l_aa", "l_bb", "l_ab", "m_total")), ""]
        return row
    except (HarvestError, ValueError) as exc:
        return [value] + [math.nan] * (len(SWEEP_HEADER) - 3) + [0, _csv_text(exc)]


def _csv_text(exc):
    return f"{type(exc).__name__}: {exc}".replace(",", ";").replace("\n", " ")


def run_indexed(fn, items, workers):
    """Map ``fn`` over ``items`` concurrently; results come back in input order."""
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def cmd_sweep(cfg, out=None):
    if cfg.method == "all":
        raise ConfigError("sweep needs a single method (closed, identity or oracle)")
    rows = run_indexed(lambda v: _sweep_point(cfg, v), list(cfg.axis_values()), cfg.workers)
    header = [cfg.axis] + SWEEP_HEADER[1:]
    write_csv(header, rows, out)
    return EXIT_OK


FIGURE_BETA = {"fig1": 1.0, "fig2": 5.0, "fig3": 10.0, "fig4": 5.0}
FIGURE_HEADER = ["gamma", "re_m_scaled", "im_m_scaled", "re_reference", "im_reference"]
FIG4_HEADER = ["gamma", "re_m_plus", "im_m_plus", "re_m_minus_over_i", "im_m_minus_over_i"]


def cmd_figures(which, cfg, out=None):
    """fig1-3: scaled closed-form M and the reference integral; fig4: M+ and M-/i at beta = 5."""
    beta = FIGURE_BETA[which]
    gammas = np.linspace(0.0, 20.0, 201)

    def point(g):
        s = cfg.scenario(beta=beta, gamma=float(g), delta=0.0, delta_b=math.nan)
        if which == "fig4":
            p, m = hv.m_plus_closed(s), hv.m_minus_closed(s) / 1j
            return [g, p.real, p.imag, m.real, m.imag]
        scaled = hv.scaled_m(s, hv.m_plus_closed(s) + hv.m_minus_closed(s))
        ref = -hv.e_integral_reference(beta, float(g)).value
        return [g, scaled.real, scaled.imag, ref.real, ref.imag]

    rows = run_indexed(point, list(gammas), cfg.workers)
    write_csv(FIG4_HEADER if which == "fig4" else FIGURE_HEADER, rows, out)
    return EXIT_OK


def cmd_compare(cfg, out=None):
    target = 1e-3 if math.isnan(cfg.tol) else cfg.tol
    epsilon = None if math.isnan(cfg.epsilon) else cfg.epsilon
    report = hv.compare_methods(cfg.scenario(), target, epsilon,
                                quantities=("l_aa", "l_bb", "l_ab", "m_total"))
    lines = [report.summary()]
    if report.epsilons:
        lines.append("epsilon ladder: " + ", ".join(
            f"eps={e:.3g}: {_cplx(v)}" for e, v in zip(report.epsilons, report.ladder)))
        lines.append(f"successive-difference ratio {_cplx(report.ladder_ratio)} (2 for linear bias)")
    sys.stdout.write("\n".join(lines) + "\n")
    if out:
        _emit(report.to_json() + "\n", out)
    failed = [e for e in report.entries if e.error]
    return EXIT_BUDGET if failed else EXIT_OK


def cmd_selftest(names=None):
    results = acceptance.run_criteria(names, echo=lambda line: print(line, flush=True))
    failed = [r.name for r in results if not r.passed]
    if failed:
        print("FAILED: " + ", ".join(failed))
        return EXIT_FAIL
    print(f"all {len(results)} criteria passed")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--tol", type=float, help="target relative accuracy")

    parser = argparse.ArgumentParser(prog="udw-harvest", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="blocks, density matrix and negativity")
    sub.add_parser("sweep", parents=[common], help="CSV over one parameter axis")
    fig = sub.add_parser("figures", parents=[common], help="reference-curve datasets")
    fig.add_argument("which", choices=sorted(FIGURE_BETA))
    sub.add_parser("compare", parents=[common], help="fast paths against the oracles")
    st = sub.add_parser("selftest", help="run the acceptance criteria")
    st.add_argument("--criteria", help="comma-separated subset, e.g. A1,A4")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            names = None
            if args.criteria:
                names = [n.strip().upper() for n in args.criteria.split(",")]
                unknown = [n for n in names if n not in acceptance.CRITERIA]
                if unknown:
                    raise ConfigError(f"unknown criteria {', '.join(unknown)}")
            return cmd_selftest(names)
        sets = list(args.set) + ([f"tol={args.tol}"] if args.tol is not None else [])
        cfg = load_config(args.config, sets)
        if args.command == "compute":
            return cmd_compute(cfg, args.out)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.out)
        if args.command == "figures":
            return cmd_figures(args.which, cfg, args.out)
        return cmd_compare(cfg, args.out)
    except (ConfigError, UnsupportedScenario) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BudgetExhausted, ExtrapolationUnstable) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except HarvestError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Every subcommand produces a table (CSV or JSON) and a list of checks; the
exit status is 0 when all checks pass, 1 when a check fails and 2 on errors.
With ``--out`` a PNG figure is written next to the table.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import spectral, star
from .core import ModelParams, deriv_z
from .errors import MoyalGeoError, UnsupportedPair
from .quantum_length import coherent_params, d_L, d_L2, d_L_mod, lambda_inv2
from .reports import REPORT_COLUMNS, fmt, rows_to_csv, rows_to_json, write_text
from .solver import (SolverConfig, candidate_elements, geodesic_residual, optimal_element_l0,
                     seminorm, solve_distance)
from .states import Coherent, Eigenstate, parse_state
from .tensor import spectrum_L

ENV_TRUNCATION = "MOYALGEO_TRUNCATION"
EXIT_OK, EXIT_CHECK_FAILED, EXIT_ERROR = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    command: str
    lambda_p: float = 1.0
    truncation: int | None = None
    schedule: tuple[int, ...] | None = None
    tol: float = 1e-8
    format: str = "csv"
    out: Path | None = None
    figures: bool = True

    def default_truncation(self, fallback: int) -> int:
        if self.truncation is not None:
            return self.truncation
        env = os.environ.get(ENV_TRUNCATION)
        return int(env) if env else fallback


@dataclass
class Check:
    name: str
    value: float
    bound: float
    relation: str                        # "<=" or ">="

    @property
    def passed(self) -> bool:
        if self.value is None or not math.isfinite(self.value):
            return False
        return self.value <= self.bound if self.relation == "<=" else self.value >= self.bound

    def as_dict(self) -> dict:
        return dict(name=self.name, value=self.value, relation=self.relation, bound=self.bound,
                    passed=self.passed)


@dataclass
class Outcome:
    rows: list[dict]
    columns: list[str]
    checks: list[Check] = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    figure: callable = None              # figure(path) -> None

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)


# -- helpers ----------------------------------------------------------------------

def _pair(text: str) -> tuple[float, float]:
    a, b = (float(v) for v in text.split(","))
    return a, b


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(","))


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(","))


def _truncation_kw(cfg: RunConfig) -> dict:
    if cfg.schedule:
        return {"schedule": list(cfg.schedule)}
    n = cfg.default_truncation(0)
    return {"truncation": n} if n else {}


# -- subcommands ------------------------------------------------------------------

def cmd_spectrum(cfg: RunConfig, levels: int) -> Outcome:
    n = cfg.default_truncation(40)
    spec = spectrum_L(n, cfg.lambda_p, levels)
    rows = []
    for r in spec.as_rows():
        r["eigenvalue_in_lp"] = r["eigenvalue"] / cfg.lambda_p
        rows.append(r)
    checks = [Check(f"level {r['level']} gap", r["gap"], max(cfg.tol, 1e-12) * max(1, r["analytic"]),
                    "<=") for r in rows]
    cols = ["level", "analytic", "eigenvalue", "eigenvalue_in_lp", "multiplicity", "gap", "N"]
    from . import plotting
    return Outcome(rows, cols, checks, {"N": n, "unreliable": spec.unreliable},
                   (lambda p: plotting.plot_spectrum(rows, p)) if rows else None)


def _row(rep, unit_power, lam, **extra):
    row = dict(quantity=rep.quantity, value=rep.value, method=rep.method, N=rep.truncation,
               analytic=rep.analytic, operator=rep.operator, residual=rep.residual,
               converged=rep.converged)
    row["value_in_lp"] = None if rep.value is None else rep.value / lam**unit_power
    row.update(extra)
    return row


class _Value:
    def __init__(self, quantity, value, method, **kw):
        self.quantity, self.value, self.method = quantity, value, method
        self.truncation = kw.get("truncation")
        self.analytic = kw.get("analytic")
        self.operator = kw.get("operator")
        self.residual = kw.get("residual")
        self.converged = kw.get("converged", True)


def cmd_compare(cfg: RunConfig, s1: str, s2: str, solver: str) -> Outcome:
    spec1, spec2 = parse_state(s1), parse_state(s2)
    lam = cfg.lambda_p
    kw = dict(_truncation_kw(cfg), tol=cfg.tol)
    rows, checks = [], []

    r2 = d_L2(spec1, spec2, lam, **kw)
    rows.append(_row(r2, 2, lam))
    if r2.analytic is not None:
        checks.append(Check("d_L2 analytic vs operator", r2.residual,
                            cfg.tol * max(1.0, r2.analytic), "<="))
    r1 = d_L(spec1, spec2, lam, **kw)
    rows.append(_row(r1, 1, lam))
    checks.append(Check("d_L <= sqrt(d_L2)", r1.extras["bound_gap"], -cfg.tol, ">="))
    rm = d_L_mod(spec1, spec2, lam, **kw)
    rows.append(_row(rm, 1, lam))

    # spectral distance: closed form, bracket, or solver
    d_D = None
    try:
        d_D = spectral.spectral_distance_analytic(spec1, spec2, lam)
        rows.append(_row(_Value("d_D", d_D, "analytic", analytic=d_D), 1, lam))
    except UnsupportedPair:
        c1, c2 = coherent_params(spec1), coherent_params(spec2)
        if c1 and c2:
            (m, k1), (n, k2) = sorted([c1, c2])
            b = spectral.dist_bounds(m, n, k1, k2, lam)
            rows.append(_row(_Value("d_D", None, "bounds-only"), 1, lam, lower=b.lower,
                             upper=b.upper))
        elif solver == "auto":
            solver = "projected-ascent"
    both_eigen = isinstance(spec1, Eigenstate) and isinstance(spec2, Eigenstate)
    if solver == "auto":
        solver = "diagonal-lp" if both_eigen else "none"
    if solver != "none":
        sc = SolverConfig(schedule=cfg.schedule, method=solver,
                          tol=cfg.tol if solver != "projected-ascent" else max(cfg.tol, 1e-6))
        rs = solve_distance(spec1, spec2, sc, lam)
        tag = "solver" if d_D is not None else "solver-only"
        res = None if d_D is None else abs(rs.value - d_D)
        rows.append(_row(_Value("d_D", rs.value, f"{tag}:{solver}", truncation=rs.truncation,
                                operator=rs.value, residual=res, converged=rs.converged), 1, lam))
        if res is not None:
            bound = 1e-4 if solver == "projected-ascent" else max(cfg.tol, 1e-6)
            checks.append(Check(f"solver ({solver}) vs analytic d_D", res, bound, "<="))
        if d_D is None:
            d_D = rs.value

    if d_D is not None and rm.value > 0:
        rows.append(_row(_Value("d_D/d_L_mod", d_D / rm.value, "ratio"), 0, lam))
    if d_D is not None:
        inv2 = lambda_inv2(spec1, spec2, lam, **kw)
        params = spectral.DoubledTripleParams(1 / math.sqrt(inv2))
        cross = spectral.doubled_distance(spec1, spec2, params, 1, 2, lam, d_D=d_D)
        extra = {}
        c1, c2 = coherent_params(spec1), coherent_params(spec2)
        if c1 and c2 and c1[0] == c2[0]:
            gap = abs(cross**2 - r2.value)
            extra["residual"] = gap
            checks.append(Check("doubled^2 = d_L2", gap, cfg.tol * max(1.0, r2.value), "<="))
        row = _row(_Value("d_D_doubled_cross", cross, "analytic"), 1, lam)
        row.update(extra)
        rows.append(row)

    cols = REPORT_COLUMNS + ["value_in_lp", "lower", "upper"]
    from . import plotting

    def fig(path):
        labs = [r["quantity"] + ("" if "solver" not in r["method"] else " (solver)") for r in rows
                if r["value"] is not None]
        vals = [r["value"] for r in rows if r["value"] is not None]
        plotting.plot_bars(labs, vals, path, "value")

    return Outcome(rows, cols, checks, {"state1": spec1.text(), "state2": spec2.text()}, fig)


def cmd_ratio(cfg: RunConfig, m: int, n_max: int, kappa, kappa_t, sphere_z) -> Outcome:
    lam = cfg.lambda_p
    from . import plotting
    if sphere_z is not None:
        seq, limit = spectral.sphere_ratio_limit(m, sphere_z, n_max, lam)
        rows = [dict(n=n, ratio=r, limit=limit, gap=abs(r - limit),
                     variant_limit=spectral.sphere_limit_variant(sphere_z)) for n, r in seq]
        return Outcome(rows, ["n", "ratio", "limit", "gap", "variant_limit"], [],
                       {"m": m, "z": sphere_z},
                       lambda p: plotting.plot_series([r["n"] for r in rows],
                                                      [r["gap"] for r in rows], p, "n",
                                                      "|ratio - limit|"))
    pts = spectral.ratio_convergence(m, n_max, kappa, kappa_t, lam)
    rows = [dict(n=p.n, d_prime=p.d_prime, d_prime_in_lp=p.d_prime / lam, d_lower=p.d_lower,
                 d_upper=p.d_upper, ratio_lower=p.ratio_lower, ratio_upper=p.ratio_upper,
                 ratio=p.ratio, envelope=p.envelope) for p in pts]
    cols = ["n", "d_prime", "d_prime_in_lp", "d_lower", "d_upper", "ratio_lower", "ratio_upper",
            "ratio", "envelope"]
    return Outcome(rows, cols, [], {"m": m, "kappa": list(kappa), "kappa_t": list(kappa_t)},
                   lambda p: plotting.plot_ratio(rows, p))


def cmd_geodesic(cfg: RunConfig) -> Outcome:
    n, lam = cfg.default_truncation(32), cfg.lambda_p
    l0 = optimal_element_l0(n, lam)
    elements = [("l0", l0)] + [(f"l{i}", e) for i, e in enumerate(candidate_elements(n, lam), 1)]
    rows, checks = [], []
    for name, e in elements:
        r = geodesic_residual(e)
        rows.append(dict(element=name, geodesic_residual=r, seminorm=seminorm(e), N=n))
        if name == "l0":
            checks.append(Check("l0 geodesic residual", r, 1e-10, "<="))
        else:
            checks.append(Check(f"{name} geodesic residual", r, 0.01, ">="))
    sub = np.diag(deriv_z(l0).entries, -1)
    shift = float(np.max(np.abs(sub - 1 / math.sqrt(2))))
    rows.append(dict(element="l0 shift", geodesic_residual=shift, seminorm=None, N=n))
    checks.append(Check("d_z l0 subdiagonal = 1/sqrt2", shift, 1e-12, "<="))
    from . import plotting
    return Outcome(rows, ["element", "geodesic_residual", "seminorm", "N"], checks, {"N": n},
                   lambda p: plotting.plot_bars([r["element"] for r in rows[:4]],
                                                [r["geodesic_residual"] for r in rows[:4]], p,
                                                "geodesic residual", log=True, threshold=0.01))


DOUBLE_PAIRS = [((0.0, 0.0), (1.0, 0.0)), ((1.0, 2.0), (-0.5, 0.3)), ((3.0, -1.0), (0.0, 2.0)),
                ((0.0, 0.0), (0.0, 0.0))]


def cmd_double(cfg: RunConfig, m: int) -> Outcome:
    lam = cfg.lambda_p
    params = spectral.fix_lambda(m, lam)
    rows = [dict(pair="Lambda", kappa="", kappa_t="", same_sheet=None, cross_sheet=None,
                 d_L2=None, residual=None, value=params.lambda_cap)]
    checks = []
    for k1, k2 in DOUBLE_PAIRS:
        s1, s2 = Coherent(m, k1), Coherent(m, k2)
        same = spectral.doubled_distance(s1, s2, params, 1, 1, lam)
        cross = spectral.doubled_distance(s1, s2, params, 1, 2, lam)
        dl2 = d_L2(s1, s2, lam).analytic
        res = abs(cross**2 - dl2)
        rows.append(dict(pair=f"{s1.text()} | {s2.text()}", kappa=f"{k1[0]},{k1[1]}",
                         kappa_t=f"{k2[0]},{k2[1]}", same_sheet=same, cross_sheet=cross, d_L2=dl2,
                         residual=res, value=None))
        checks.append(Check(f"doubled^2 = d_L2 for {s1.text()}, {s2.text()}", res,
                            max(cfg.tol, 1e-10) * max(1.0, dl2), "<="))
    cols = ["pair", "kappa", "kappa_t", "same_sheet", "cross_sheet", "d_L2", "residual", "value"]
    from . import plotting
    return Outcome(rows, cols, checks, {"m": m, "Lambda": params.lambda_cap},
                   lambda p: plotting.plot_bars([f"pair {i}" for i in range(1, len(rows))],
                                                [r["residual"] for r in rows[1:]], p,
                                                "|d^2 - d_L2|", log=True))


def cmd_star(cfg: RunConfig, op: str, f: str, g: str, h: str, extent: float | None,
             resolution: int, theta: float, thetas, grid_out: Path | None) -> Outcome:
    ext = extent if extent is not None else 12 * math.sqrt(theta)
    make = lambda name, e=ext: star.test_function(name, e, resolution, theta)
    rows, checks, product = [], [], None
    ops = ["product", "assoc", "projector", "commutator", "limit"] if op == "all" else [op]
    for o in ops:
        if o == "product":
            product = star.star(make(f), make(g))
            pw = make(f).samples * make(g).samples
            rows.append(dict(check=f"{f}*{g} vs pointwise", value=star.window_norm(
                product.samples - pw, product), bound=None, passed=None))
        elif o == "assoc":
            r = star.associativity_check(make(f), make(g), make(h))
            rows.append(dict(check=f"associativity ({f},{g},{h})", value=r, bound=1e-6))
        elif o == "projector":
            r = star.projector_residual(make("ground"))
            rows.append(dict(check="ground projector", value=r, bound=1e-6))
        elif o == "commutator":
            # flat-top coordinate surrogates need room for the plateau: double the extent
            e2 = max(2 * ext, 24 * math.sqrt(theta))
            x1, x2 = make("x1", e2), make("x2", e2)
            c = star.star(x1, x2) - star.star(x2, x1)
            r = star.window_norm(c.samples - 1j * theta, c)
            rows.append(dict(check="x1*x2 - x2*x1 - i theta", value=r, bound=1e-6))
        elif o == "limit":
            devs = star.commutative_limit(make(f), make(g), thetas)
            for t, d in zip(thetas, devs):
                rows.append(dict(check=f"commutative limit theta={fmt(t)}", value=d, bound=None))
            dec = all(b < a for a, b in zip(devs, devs[1:]))
            checks.append(Check("commutative limit strictly decreasing", float(dec), 1.0, ">="))
            rows.append(dict(check="commutative limit strictly decreasing", value=None,
                             bound=None, passed=dec))
        else:
            raise MoyalGeoError(f"unknown star operation {o!r}")
    for r in rows:
        if r.get("bound") is not None:
            c = Check(r["check"], r["value"], r["bound"], "<=")
            checks.append(c)
            r["passed"] = c.passed
    if grid_out is not None:
        grid = product if product is not None else star.star(make(f), make(g))
        if str(grid_out).endswith(".bin"):
            star.write_binary(grid, grid_out)
        else:
            star.write_csv(grid, grid_out)
    from . import plotting

    def fig(path):
        grid = product if product is not None else star.star(make(f), make(g))
        plotting.plot_grid(grid, path, f"|{f} * {g}|")

    meta = dict(extent=ext, resolution=resolution, theta=theta)
    return Outcome(rows, ["check", "value", "bound", "passed"], checks, meta, fig)


# -- argument parsing ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda-p", type=float, default=1.0, help="Planck length (default 1)")
    common.add_argument("--truncation", type=int, default=None,
                        help=f"number-basis truncation N (default per command, or ${ENV_TRUNCATION})")
    common.add_argument("--schedule", type=_ints, default=None,
                        help="comma-separated increasing truncations, e.g. 32,64")
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    common.add_argument("--no-figures", action="store_true",
                        help="do not write the PNG figure next to --out")

    p = argparse.ArgumentParser(prog="moyalgeo",
                                description="Quantum lengths and spectral distances on the Moyal plane.",
                                epilog="exit status: 0 all checks pass, 1 a check failed, 2 error")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("spectrum", parents=[common], help="lowest eigenvalues of L")
    s.add_argument("--levels", type=int, default=4)
    s = sub.add_parser("compare", parents=[common], help="all metrics for a pair of states")
    s.add_argument("state1")
    s.add_argument("state2")
    s.add_argument("--solver", default="auto",
                   choices=("auto", "none", "diagonal-lp", "projected-ascent", "interior-point"))
    s = sub.add_parser("ratio", parents=[common], help="relative gap d_D vs d'_L along n")
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--kappa", type=_pair, default=(0.0, 0.0))
    s.add_argument("--kappa-t", type=_pair, default=(0.0, 0.0))
    s.add_argument("--sphere-z", type=float, default=None,
                   help="use sphere pairs (z, -z) instead of translated eigenstates")
    sub.add_parser("geodesic", parents=[common], help="optimal elements and geodesic residuals")
    s = sub.add_parser("double", parents=[common], help="doubled-triple identity checks")
    s.add_argument("--m", type=int, default=0)
    s = sub.add_parser("star", parents=[common], help="grid Moyal product checks")
    s.add_argument("--op", default="all",
                   choices=("all", "product", "assoc", "projector", "commutator", "limit"))
    s.add_argument("--f", default="gauss-a")
    s.add_argument("--g", default="gauss-b")
    s.add_argument("--h", default="gauss-c")
    s.add_argument("--extent", type=float, default=None, help="half-width (default 12 sqrt(theta))")
    s.add_argument("--resolution", type=int, default=256)
    s.add_argument("--theta", type=float, default=1.0)
    s.add_argument("--thetas", type=_floats, default=(1.0, 0.5, 0.25, 0.125))
    s.add_argument("--grid-out", type=Path, default=None,
                   help="write f*g as CSV (or binary if the name ends in .bin)")
    return p


def run(args) -> Outcome:
    cfg = RunConfig(args.command, args.lambda_p, args.truncation, args.schedule, args.tol,
                    args.format, args.out, not args.no_figures)
    ModelParams(cfg.lambda_p, cfg.default_truncation(32), cfg.tol)   # validates the flags
    for n in cfg.schedule or ():
        ModelParams(cfg.lambda_p, n, cfg.tol)
    if args.command == "spectrum":
        return cmd_spectrum(cfg, args.levels)
    if args.command == "compare":
        return cmd_compare(cfg, args.state1, args.state2, args.solver)
    if args.command == "ratio":
        return cmd_ratio(cfg, args.m, args.n_max, args.kappa, args.kappa_t, args.sphere_z)
    if args.command == "geodesic":
        return cmd_geodesic(cfg)
    if args.command == "double":
        return cmd_double(cfg, args.m)
    return cmd_star(cfg, args.op, args.f, args.g, args.h, args.extent, args.resolution,
                    args.theta, args.thetas, args.grid_out)


def render(outcome: Outcome, args) -> str:
    if args.format == "json":
        return rows_to_json(outcome.rows, command=args.command, params=outcome.meta,
                            checks=[c.as_dict() for c in outcome.checks], ok=outcome.ok)
    return rows_to_csv(outcome.rows, outcome.columns)


def render_error(exc: Exception, fmt_: str, command: str | None) -> str:
    rec = {"error": type(exc).__name__, "message": str(exc)}
    if fmt_ == "json":
        return rows_to_json([], command=command, **rec, ok=False)
    return rows_to_csv([rec], ["error", "message"])


def emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        write_text(out, text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        outcome = run(args)
    except (MoyalGeoError, ValueError, ArithmeticError) as exc:
        emit(render_error(exc, args.format, args.command), args.out)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    emit(render(outcome, args), args.out)
    if args.out is not None and not args.no_figures and outcome.figure is not None:
        outcome.figure(args.out.with_suffix(".png"))
    for c in outcome.checks:
        print(f"check {'pass' if c.passed else 'FAIL'}: {c.name}: {fmt(c.value)} {c.relation} "
              f"{fmt(c.bound)}", file=sys.stderr)
    return EXIT_OK if outcome.ok else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())

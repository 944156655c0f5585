"""Command-line front end.

Seven subcommands drive the library end to end and persist their results as
CSV/JSON artifacts plus a ``manifest.json`` carrying the config hash, package
versions, and wall time — enough to reproduce any output file exactly.

    ground-state        shoot the radial cross-section profile
    eigen               transverse spectrum of the t-independent branch
    solve-strip         minimize the quotient at a single strip width
    sweep               bifurcation diagram over a schedule of widths
    pitchfork           quantitative symmetry-breaking expansion at the transition
    critical-constants  best-constant table and small-eps expansion fits
    validate            run the acceptance criteria, one pass/fail line each

All floating-point CSV output is written with 17 significant digits so a rerun
with the same config and seed is byte-identical.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path

from .acceptance import AcceptanceContext, run_all
from .bifurcation import (
    SweepOpts,
    grid_critical_length,
    pitchfork_expansion,
    sweep,
    validate_pitchfork,
)
from .config import RunConfig, load_config, template
from .critical import DivergentMass, fit_expansion, sobolev_constants
from .errors import BadConfig, StripminError
from .grids import ProblemParams, RadialGrid, StripGrid
from .radial import extend_trivial_to_strip, shoot_ground_state
from .reporting import format_value, write_csv, write_json, write_manifest
from .spectral import (
    critical_length,
    linearized_spectrum,
    principal_eigenvalue,
    transverse_second_eigenvalue,
)
from .strip import SolveOptions, multistart_minimize

__all__ = ["build_parser", "main", "run_subcommand"]

SUBCOMMANDS = ("ground-state", "eigen", "solve-strip", "sweep", "pitchfork",
               "critical-constants", "validate")


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stripmin",
        description="Quotient minimization on a strip: ground states, "
                    "bifurcation diagrams, and critical-exponent constants.",
    )
    parser.add_argument("--template", metavar="PATH",
                        help="write a documented config template to PATH and exit")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    help_lines = {
        "ground-state": "shoot the radial cross-section ground state",
        "eigen": "transverse spectrum of the t-independent branch",
        "solve-strip": "minimize the quotient at the configured width",
        "sweep": "bifurcation diagram over the width schedule",
        "pitchfork": "symmetry-breaking expansion at the transition",
        "critical-constants": "best-constant table and expansion fits",
        "validate": "run the acceptance criteria",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=help_lines[name])
        p.add_argument("--config", metavar="PATH",
                       help="config file (.toml or .json); defaults apply if omitted")
        p.add_argument("--out", metavar="DIR",
                       help="output directory (overrides config output_dir)")
        p.add_argument("--workers", type=int, metavar="K",
                       help="process-pool size for the sweep (overrides config)")
        p.add_argument("--seed", type=int, metavar="S",
                       help="seed for random test fields (overrides config)")
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    overrides: dict = {}
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.workers is not None:
        if args.workers < 1:
            raise BadConfig(f"workers: must be >= 1, got {args.workers}")
        overrides["workers"] = args.workers
    if args.seed is not None:
        if args.seed < 0:
            raise BadConfig(f"seed: must be >= 0, got {args.seed}")
        overrides["seed"] = args.seed
    return dataclasses.replace(config, **overrides) if overrides else config


def _strip_grid(config: RunConfig) -> StripGrid:
    d = config.problem.N - 1
    return StripGrid(radial=RadialGrid(d=d, r_max=config.grid.r_max,
                                       h=config.grid.h), m=config.grid.m)


def _shoot_grid(config: RunConfig) -> RadialGrid:
    return RadialGrid(d=config.problem.N - 1, r_max=config.grid.r_max,
                      h=config.grid.shoot_h)


def _solve_options(config: RunConfig) -> SolveOptions:
    s = config.solver
    return SolveOptions(tol=s.tol, max_iter=s.max_iter,
                        accelerate=s.accelerate, rearrange=s.rearrange)


def _params(config: RunConfig) -> ProblemParams:
    return ProblemParams(N=config.problem.N, p=config.problem.p,
                         L=config.problem.L)


# ---------------------------------------------------------------------------
# subcommand bodies: each returns (exit_status, artifact names)
# ---------------------------------------------------------------------------

def _cmd_ground_state(config: RunConfig, out: Path) -> tuple[int, list[str]]:
    grid = _shoot_grid(config)
    w = shoot_ground_state(grid.d, config.problem.p, grid)
    write_csv(out / "ground_state.csv", ["r", "w"],
              [(r, v) for r, v in zip(grid.r, w.values)])
    write_json(out / "ground_state.json", {
        "d": grid.d, "p": config.problem.p, "r_max": grid.r_max, "h": grid.h,
        "amplitude": w.amplitude,
        "mass": w.integrate_power(2.0),
        "action_integral": w.integrate_power(config.problem.p + 1.0),
    })
    return 0, ["ground_state.csv", "ground_state.json"]


def _cmd_eigen(config: RunConfig, out: Path) -> tuple[int, list[str]]:
    p = config.problem.p
    grid = _shoot_grid(config)
    w0 = shoot_ground_state(grid.d, p, grid)
    lam1 = principal_eigenvalue(w0, p).eigenvalue
    report = critical_length(lam1, p=p if grid.d == 1 else None)

    table = []
    for L in config.eigen_L_values:
        params = ProblemParams(N=config.problem.N, p=p, L=L)
        r_max = min(config.grid.r_max / min(1.0, L), 60.0)
        sgrid = StripGrid(radial=RadialGrid(d=grid.d, r_max=r_max,
                                            h=min(config.grid.h, 0.02)),
                          m=max(config.grid.m, 128))
        u = extend_trivial_to_strip(w0, params, sgrid)
        eigs = linearized_spectrum(u, params, 2)
        law = transverse_second_eigenvalue(lam1, L)
        table.append({
            "L": L,
            "first_eigenvalue": eigs[0].eigenvalue,
            "second_eigenvalue": eigs[1].eigenvalue,
            "second_eigenvalue_law": law,
            "abs_err": abs(eigs[1].eigenvalue - law),
        })

    write_json(out / "eigen.json", {
        "N": config.problem.N, "p": p,
        "lambda1": lam1,
        "L_star": report.L_star_predicted,
        "L_star_closed_form": (report.closed_form_value if
                               report.closed_form_available else None),
        "second_eigenvalues": table,
    })
    return 0, ["eigen.json"]


def _cmd_solve_strip(config: RunConfig, out: Path) -> tuple[int, list[str]]:
    params = _params(config)
    grid = _strip_grid(config)
    w0 = shoot_ground_state(grid.radial.d, params.p, _shoot_grid(config))
    field, bd = multistart_minimize(params, grid, w0, _solve_options(config))
    (out / "solution.csv").write_text(field.to_csv(), encoding="utf-8",
                                      newline="\n")
    write_json(out / "solution.json", {
        "N": params.N, "p": params.p, "L": params.L,
        "quotient": bd.quotient,
        "grad_term": bd.grad_term, "mass_term": bd.mass_term,
        "denom": bd.denom, "mu": bd.mu, "el_residual": bd.el_residual,
        "transverse_derivative_norm": field.transverse_derivative_norm(),
    })
    return 0, ["solution.csv", "solution.json"]


def _cmd_sweep(config: RunConfig, out: Path) -> tuple[int, list[str]]:
    if not config.L_schedule:
        raise BadConfig("L_schedule: must not be empty for the sweep subcommand")
    params = _params(config)
    opts = SweepOpts(solve=_solve_options(config), workers=config.workers)
    diagram = sweep(params, list(config.L_schedule), _strip_grid(config), opts)
    write_csv(out / "diagram.csv",
              ["L", "c", "cstar", "delta", "s", "classification", "attained",
               "note"],
              [(q.L, q.c, q.cstar, q.delta, q.s, q.classification, q.attained,
                q.note) for q in diagram.points])
    write_json(out / "diagram.json", diagram.to_json_record())
    return 0, ["diagram.csv", "diagram.json"]


def _cmd_pitchfork(config: RunConfig, out: Path) -> tuple[int, list[str]]:
    params = _params(config)
    grid = _strip_grid(config)
    w0 = shoot_ground_state(grid.radial.d, params.p, _shoot_grid(config))
    L_star = grid_critical_length(w0, params, grid.radial)
    params_star = ProblemParams(N=params.N, p=params.p, L=L_star)
    w_star = extend_trivial_to_strip(w0, params_star, grid)
    expansion = pitchfork_expansion(params_star, grid, w_star)

    opts = SweepOpts(solve=_solve_options(config), workers=config.workers)
    near = sweep(params, [L_star * f for f in (1.01, 1.02, 1.05)], grid, opts)
    report = validate_pitchfork(expansion, near)
    write_json(out / "pitchfork.json", {
        "L_star": L_star,
        "mu": expansion.mu,
        "kappa_terms": list(expansion.kappa_terms),
        "solvability_residual": expansion.solvability_residual(w_star),
        "validation": report.to_json_record(),
        "near_transition_points": [q.to_json_record() for q in near.points],
    })
    return 0, ["pitchfork.json"]


def _cmd_critical_constants(config: RunConfig, out: Path) -> tuple[int, list[str]]:
    records = {}
    rows = []
    for N in config.critical_N:
        cc = sobolev_constants(N)
        records[str(N)] = cc.to_json_record()
        try:
            c0 = format_value(cc.C0)
        except DivergentMass:
            c0 = "divergent"
        rows.append((N, format_value(cc.cN), format_value(cc.S),
                     format_value(cc.S_half), format_value(cc.A0),
                     format_value(cc.B0), c0, format_value(cc.D0)))
    write_json(out / "constants.json", records)
    write_csv(out / "constants.csv",
              ["N", "cN", "S", "S_half", "A0", "B0", "C0", "D0"], rows)

    fits = {str(N): fit_expansion(list(config.eps_values), config.problem.L, N)
            for N in config.critical_N}
    write_json(out / "expansion.json", fits)
    return 0, ["constants.json", "constants.csv", "expansion.json"]


def _cmd_validate(config: RunConfig, out: Path) -> tuple[int, list[str]]:
    ctx = AcceptanceContext(seed=config.seed, workers=config.workers)
    results = run_all(ctx, echo=print)
    all_passed = all(r.passed for r in results)
    write_json(out / "validate.json", {
        "passed": all_passed,
        "results": [r.to_json_record() for r in results],
    })
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return (0 if all_passed else 1), ["validate.json"]


_BODIES = {
    "ground-state": _cmd_ground_state,
    "eigen": _cmd_eigen,
    "solve-strip": _cmd_solve_strip,
    "sweep": _cmd_sweep,
    "pitchfork": _cmd_pitchfork,
    "critical-constants": _cmd_critical_constants,
    "validate": _cmd_validate,
}


def run_subcommand(name: str, config: RunConfig) -> int:
    """Run one subcommand against a resolved config; writes artifacts plus a
    manifest into ``config.output_dir`` and returns the exit status."""
    if name not in _BODIES:
        raise BadConfig(f"unknown subcommand {name!r}; "
                        f"expected one of {', '.join(SUBCOMMANDS)}")
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    status, artifacts = _BODIES[name](config, out)
    write_manifest(out, config, name, artifacts,
                   walltime_s=time.perf_counter() - start)
    return status


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.template:
        Path(args.template).write_text(template(), encoding="utf-8")
        print(f"wrote config template to {args.template}")
        return 0
    if not args.subcommand:
        parser.print_help()
        return 2
    try:
        config = _resolve_config(args)
        return run_subcommand(args.subcommand, config)
    except BadConfig as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except StripminError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

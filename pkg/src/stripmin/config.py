"""Run configuration: one human-editable nested key-value file.

A config is TOML (preferred) or JSON with four sections — ``problem``,
``grid``, ``solver``, ``run`` — all optional, all keys defaulted. Validation
is strict: unknown keys and type mismatches raise :class:`BadConfig` naming
the exact field path, because a silently ignored typo in ``solver.tol`` is a
wrong paper figure three plots later. ``template()`` emits a TOML template
with every default spelled out and documented inline; a config must
round-trip losslessly through ``to_file_dict``/``config_from_dict``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BadConfig

__all__ = [
    "GridConfig",
    "ProblemConfig",
    "RunConfig",
    "SolverConfig",
    "config_from_dict",
    "load_config",
    "resolve_schedule",
    "template",
    "to_file_dict",
]


@dataclass(frozen=True)
class ProblemConfig:
    N: int = 2
    p: float = 3.0
    L: float = 1.0


@dataclass(frozen=True)
class GridConfig:
    r_max: float = 25.0
    h: float = 0.05
    m: int = 64
    shoot_h: float = 0.01       # fine radial step for shooting oracles


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-8
    max_iter: int = 2000
    accelerate: bool = True
    rearrange: bool = False


@dataclass(frozen=True)
class RunConfig:
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    L_schedule: tuple[float, ...] = (1.0, 1.5, 1.75, 1.9, 2.5, 3.0)
    eigen_L_values: tuple[float, ...] = (0.5, 1.0, 1.5)
    eps_values: tuple[float, ...] = (0.02, 0.01, 0.005)
    critical_N: tuple[int, ...] = (4, 5)
    seed: int = 0
    workers: int = 1
    output_dir: str = "runs"


# ---------------------------------------------------------------------------
# schema walking
# ---------------------------------------------------------------------------

def _want_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise BadConfig(f"{path}: expected an integer, got {value!r}")
    return value


def _want_float(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise BadConfig(f"{path}: expected a number, got {value!r}")
    out = float(value)
    if not math.isfinite(out):
        raise BadConfig(f"{path}: must be finite, got {value!r}")
    return out


def _want_bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise BadConfig(f"{path}: expected true/false, got {value!r}")
    return value


def _want_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise BadConfig(f"{path}: expected a string, got {value!r}")
    return value


def _want_table(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise BadConfig(f"{path}: expected a table/object, got {value!r}")
    return value


def _want_number_list(value, path: str) -> tuple[float, ...]:
    if not isinstance(value, (list, tuple)):
        raise BadConfig(f"{path}: expected a list of numbers, got {value!r}")
    return tuple(_want_float(v, f"{path}[{i}]") for i, v in enumerate(value))


def _positive(value: float, path: str) -> float:
    if not value > 0.0:
        raise BadConfig(f"{path}: must be strictly positive, got {value!r}")
    return value


def _reject_unknown(table: dict, known: set[str], path: str) -> None:
    for key in table:
        if key not in known:
            raise BadConfig(f"{path}{key}: unknown key")


def resolve_schedule(value, path: str = "L_schedule") -> tuple[float, ...]:
    """An L schedule is an explicit list of widths or a {min, max, count}
    table; both resolve to an explicit, strictly positive, increasing
    tuple."""
    if isinstance(value, dict):
        _reject_unknown(value, {"min", "max", "count"}, f"{path}.")
        for key in ("min", "max", "count"):
            if key not in value:
                raise BadConfig(f"{path}.{key}: required for a range schedule")
        lo = _positive(_want_float(value["min"], f"{path}.min"), f"{path}.min")
        hi = _want_float(value["max"], f"{path}.max")
        count = _want_int(value["count"], f"{path}.count")
        if count < 1:
            raise BadConfig(f"{path}.count: must be >= 1, got {count}")
        if hi < lo:
            raise BadConfig(f"{path}.max: must be >= min, got {hi} < {lo}")
        if count == 1:
            return (lo,)
        step = (hi - lo) / (count - 1)
        return tuple(lo + i * step for i in range(count))
    values = _want_number_list(value, path)
    for i, v in enumerate(values):
        _positive(v, f"{path}[{i}]")
        if i and v <= values[i - 1]:
            raise BadConfig(f"{path}[{i}]: schedule must be strictly "
                            f"increasing, got {v} after {values[i - 1]}")
    return values


def config_from_dict(raw: dict, source: str = "<dict>") -> RunConfig:
    raw = _want_table(raw, source)
    _reject_unknown(raw, {"problem", "grid", "solver", "run"}, "")

    problem_raw = _want_table(raw.get("problem", {}), "problem")
    _reject_unknown(problem_raw, {"N", "p", "L"}, "problem.")
    problem = ProblemConfig(
        N=_want_int(problem_raw.get("N", 2), "problem.N"),
        p=_want_float(problem_raw.get("p", 3.0), "problem.p"),
        L=_want_float(problem_raw.get("L", 1.0), "problem.L"),
    )
    if problem.N < 2:
        raise BadConfig(f"problem.N: strip dimension must be >= 2, got {problem.N}")
    if not problem.p > 1.0:
        raise BadConfig(f"problem.p: exponent must exceed 1, got {problem.p}")
    _positive(problem.L, "problem.L")

    grid_raw = _want_table(raw.get("grid", {}), "grid")
    _reject_unknown(grid_raw, {"r_max", "h", "m", "shoot_h"}, "grid.")
    grid = GridConfig(
        r_max=_positive(_want_float(grid_raw.get("r_max", 25.0), "grid.r_max"),
                        "grid.r_max"),
        h=_positive(_want_float(grid_raw.get("h", 0.05), "grid.h"), "grid.h"),
        m=_want_int(grid_raw.get("m", 64), "grid.m"),
        shoot_h=_positive(_want_float(grid_raw.get("shoot_h", 0.01),
                                      "grid.shoot_h"), "grid.shoot_h"),
    )
    if grid.m < 2:
        raise BadConfig(f"grid.m: need at least 2 transverse nodes, got {grid.m}")
    if grid.h >= grid.r_max:
        raise BadConfig(f"grid.h: step {grid.h} does not fit in r_max {grid.r_max}")

    solver_raw = _want_table(raw.get("solver", {}), "solver")
    _reject_unknown(solver_raw, {"tol", "max_iter", "accelerate", "rearrange"},
                    "solver.")
    solver = SolverConfig(
        tol=_positive(_want_float(solver_raw.get("tol", 1e-8), "solver.tol"),
                      "solver.tol"),
        max_iter=_want_int(solver_raw.get("max_iter", 2000), "solver.max_iter"),
        accelerate=_want_bool(solver_raw.get("accelerate", True),
                              "solver.accelerate"),
        rearrange=_want_bool(solver_raw.get("rearrange", False),
                             "solver.rearrange"),
    )
    if solver.max_iter < 1:
        raise BadConfig(f"solver.max_iter: must be >= 1, got {solver.max_iter}")

    run_raw = _want_table(raw.get("run", {}), "run")
    _reject_unknown(run_raw, {"L_schedule", "eigen_L_values", "eps_values",
                              "critical_N", "seed", "workers", "output_dir"},
                    "run.")
    defaults = RunConfig()
    schedule = (resolve_schedule(run_raw["L_schedule"], "run.L_schedule")
                if "L_schedule" in run_raw else defaults.L_schedule)
    eigen_L = (_want_number_list(run_raw["eigen_L_values"], "run.eigen_L_values")
               if "eigen_L_values" in run_raw else defaults.eigen_L_values)
    for i, v in enumerate(eigen_L):
        _positive(v, f"run.eigen_L_values[{i}]")
    eps_values = (_want_number_list(run_raw["eps_values"], "run.eps_values")
                  if "eps_values" in run_raw else defaults.eps_values)
    for i, v in enumerate(eps_values):
        _positive(v, f"run.eps_values[{i}]")
    if "critical_N" in run_raw:
        critical_N = tuple(
            _want_int(v, f"run.critical_N[{i}]")
            for i, v in enumerate(run_raw["critical_N"])) \
            if isinstance(run_raw["critical_N"], (list, tuple)) \
            else _want_number_list(run_raw["critical_N"], "run.critical_N")
        for i, v in enumerate(critical_N):
            if v < 3:
                raise BadConfig(f"run.critical_N[{i}]: constants need N >= 3, "
                                f"got {v}")
    else:
        critical_N = defaults.critical_N
    seed = _want_int(run_raw.get("seed", 0), "run.seed")
    if seed < 0:
        raise BadConfig(f"run.seed: must be >= 0, got {seed}")
    workers = _want_int(run_raw.get("workers", 1), "run.workers")
    if workers < 1:
        raise BadConfig(f"run.workers: must be >= 1, got {workers}")
    output_dir = _want_str(run_raw.get("output_dir", "runs"), "run.output_dir")

    return RunConfig(problem=problem, grid=grid, solver=solver,
                     L_schedule=schedule, eigen_L_values=eigen_L,
                     eps_values=eps_values, critical_N=critical_N,
                     seed=seed, workers=workers, output_dir=output_dir)


def to_file_dict(config: RunConfig) -> dict:
    """The nested plain-dict form (JSON- and TOML-expressible) that
    ``config_from_dict`` maps back to an equal RunConfig."""
    return {
        "problem": {"N": config.problem.N, "p": config.problem.p,
                    "L": config.problem.L},
        "grid": {"r_max": config.grid.r_max, "h": config.grid.h,
                 "m": config.grid.m, "shoot_h": config.grid.shoot_h},
        "solver": {"tol": config.solver.tol,
                   "max_iter": config.solver.max_iter,
                   "accelerate": config.solver.accelerate,
                   "rearrange": config.solver.rearrange},
        "run": {"L_schedule": list(config.L_schedule),
                "eigen_L_values": list(config.eigen_L_values),
                "eps_values": list(config.eps_values),
                "critical_N": list(config.critical_N),
                "seed": config.seed, "workers": config.workers,
                "output_dir": config.output_dir},
    }


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise BadConfig(f"cannot read config {path}: {err}") from err
    suffix = path.suffix.lower()
    if suffix == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as err:
            raise BadConfig(f"{path}: invalid JSON: {err}") from err
    elif suffix == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:                         # Python < 3.11
            import tomli as tomllib
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as err:
            raise BadConfig(f"{path}: invalid TOML: {err}") from err
    else:
        raise BadConfig(f"{path}: unsupported config format {suffix!r} "
                        f"(use .toml or .json)")
    return config_from_dict(raw, source=str(path))


def template() -> str:
    """A TOML template carrying every default, documented inline."""
    return """\
# Run configuration. Every key is optional; the values below are the
# defaults. L schedules may also be written as a range table:
#   [run.L_schedule]
#   min = 1.0
#   max = 3.0
#   count = 9

[problem]
N = 2        # ambient dimension; the strip is R^{N-1} x (0, 1)
p = 3.0      # nonlinearity exponent (must exceed 1)
L = 1.0      # strip width used by solve-strip

[grid]
r_max = 25.0   # radial truncation of the computational domain
h = 0.05       # radial step of the strip grid
m = 64         # transverse nodes across the strip
shoot_h = 0.01 # fine radial step for the shooting/eigenvalue oracles

[solver]
tol = 1e-8        # normalized Euler-Lagrange residual target
max_iter = 2000   # descent iteration cap
accelerate = true # safeguarded Aitken extrapolation
rearrange = false # monotone rearrangement between descent steps

[run]
L_schedule = [1.0, 1.5, 1.75, 1.9, 2.5, 3.0]  # widths swept by `sweep`
eigen_L_values = [0.5, 1.0, 1.5]  # widths tabulated by `eigen`
eps_values = [0.02, 0.01, 0.005]  # instanton scales for `critical-constants`
critical_N = [4, 5]               # dimensions tabulated by `critical-constants`
seed = 0          # PRNG seed for random test fields
workers = 1       # process count for sweep points
output_dir = "runs"  # artifact directory (overridden by --out)
"""

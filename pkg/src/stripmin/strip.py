"""Rayleigh-quotient minimization on the strip and field utilities.

The minimization iterates

    solve (-Lap + L^2) v = u_k^p,   then normalize  int v^{p+1} = 1,

which is monotone: with A = -Lap + L^2 self-adjoint positive w.r.t. the cell
measure and P(u) = int u^{p+1}, the solve step satisfies <A v, w> = <u^p, w>
for all w, and Hoelder plus Cauchy-Schwarz give

    <u^p, v> <= P(u)^{p/(p+1)} P(v)^{1/(p+1)},
    <A u, u> <A v, v> >= <A u, v>^2 = <u^p, v>^2,

so the quotient Q(u) = <A u, u> / P(u)^{2/(p+1)} never increases along the
iteration (exactly, in exact arithmetic — the discrete operators and
quadrature share weights, which is what makes the chain airtight). Descent is
also the safety harness for the optional Aitken extrapolation: an accelerated
candidate is accepted only when its quotient does not exceed the plain
iterate's, so acceleration can never break the invariant.

Convergence is declared on the Euler-Lagrange residual of the candidate in
*solution normalization* (the returned field): u is rescaled so that
-Lap u + L^2 u = u^p holds with coefficient one, making fields at different L
directly comparable and the second-variation stability form nonnegative at
the returned iterate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import (
    GridMismatch,
    NonConvergedLinearSolve,
    QuadratureTailLoss,
    RangeMismatch,
    Stalled,
)
from .fields import EnergyBreakdown, RadialProfile, StripField
from .grids import ProblemParams, RadialGrid, StripGrid
from .operators import HelmholtzSolver, dirichlet_energy, neg_laplacian

__all__ = [
    "SolveOptions",
    "minimize_quotient",
    "multistart_minimize",
    "default_seeds",
    "el_residual",
    "energy_breakdown",
    "symmetry_breaking_measure",
    "rearrange_monotone",
    "rescale_between_formulations",
    "large_L_asymptote",
]


@dataclass
class SolveOptions:
    """Tuning for :func:`minimize_quotient`.

    ``tol`` is on the Euler-Lagrange residual in solution normalization;
    ``plateau_window``/``plateau_factor`` declare a stall when the best
    residual fails to improve by the factor within the window. A caller may
    pass a list as ``history_sink`` to record the quotient per accepted
    iterate (diagnostics and descent tests).
    """

    tol: float = 1e-8
    max_iter: int = 2000
    accelerate: bool = True
    rearrange: bool = False
    plateau_window: int = 50
    plateau_factor: float = 1e-3
    history_sink: list | None = None


def _mu_and_residual(grid: StripGrid, values: np.ndarray, p: float,
                     Au: np.ndarray) -> tuple[float, float]:
    """Optimal multiplier mu* = <Au, u^p>/<u^p, u^p> and ||Au - mu* u^p||."""
    up = values ** p
    denom = grid.inner(up, up)
    mu = grid.inner(Au, up) / denom
    res = grid.norm(Au - mu * up)
    return mu, res


def el_residual(u: StripField, params: ProblemParams) -> float:
    """Weighted L2 norm of ``Lap u - L^2 u + mu u^p`` with the norm-optimal mu.

    Zero exactly when u solves the discrete Euler-Lagrange system at some
    normalization; large for generic fields.
    """
    Au = neg_laplacian(u.values, u.grid) + params.L ** 2 * u.values
    _, res = _mu_and_residual(u.grid, u.values, params.p, Au)
    return res


def energy_breakdown(u: StripField, params: ProblemParams) -> EnergyBreakdown:
    """All quotient bookkeeping for a field, by the shared quadrature."""
    g = u.grid
    p, L = params.p, params.L
    grad = dirichlet_energy(u.values, g)
    mass = L ** 2 * g.integrate(u.values ** 2)
    denom = g.integrate(u.values ** (p + 1.0))
    Au = neg_laplacian(u.values, g) + L ** 2 * u.values
    mu, res = _mu_and_residual(g, u.values, p, Au)
    return EnergyBreakdown(
        grad_term=grad, mass_term=mass, denom=denom,
        quotient=(grad + mass) / denom ** (2.0 / (p + 1.0)),
        el_residual=res, mu=mu,
    )


def minimize_quotient(params: ProblemParams, grid: StripGrid, init: StripField,
                      opts: SolveOptions | None = None
                      ) -> tuple[StripField, EnergyBreakdown]:
    """Minimize the quotient from ``init``; returns the solution-normalized
    minimizer and its energy breakdown.

    Raises Stalled (with the best iterate attached) when the residual
    plateaus above tolerance or the iteration cap runs out, and
    NonConvergedLinearSolve if an inner solve produces non-finite values.
    """
    opts = opts or SolveOptions()
    if not grid.compatible(init.grid):
        raise GridMismatch("init field does not live on the minimization grid")
    p, L = params.p, params.L

    u = np.array(init.values, dtype=float)
    if np.any(u < 0.0):
        warnings.warn("negative init values clamped to zero", RuntimeWarning)
        u = np.maximum(u, 0.0)
    P = grid.integrate(u ** (p + 1.0))
    if not (P > 0.0):
        raise ValueError("init is identically zero (or vanishes after clamping)")
    u /= P ** (1.0 / (p + 1.0))

    solver = HelmholtzSolver(grid, shift=L ** 2)
    exponent_scale = 1.0 / (p - 1.0)
    u_prev: np.ndarray | None = None
    best_res = math.inf
    best_u = u
    best_iter = 0
    history = opts.history_sink

    for k in range(opts.max_iter):
        Au = neg_laplacian(u, grid) + L ** 2 * u
        energy = grid.inner(Au, u)          # == quotient while int u^{p+1} = 1
        if history is not None:
            history.append(energy)
        mu, res_int = _mu_and_residual(grid, u, p, Au)
        res = mu ** exponent_scale * res_int if mu > 0.0 else math.inf
        if res < best_res:
            best_res, best_u, best_iter = res, u, k
        if res < opts.tol:
            break
        if k - best_iter >= opts.plateau_window and \
                best_res > (1.0 - opts.plateau_factor) * res:
            raise _stalled(grid, params, best_u, best_res, k)

        v = solver.solve(u ** p)
        if not np.all(np.isfinite(v)):
            raise NonConvergedLinearSolve(
                f"inner Helmholtz solve returned non-finite values at iteration {k}"
            )
        v = np.maximum(v, 0.0)
        if opts.rearrange:
            v = _rearranged_values(v, grid)
        v /= grid.integrate(v ** (p + 1.0)) ** (1.0 / (p + 1.0))

        if opts.accelerate and u_prev is not None:
            d1 = u - u_prev
            d2 = v - u
            n1 = grid.inner(d1, d1)
            if n1 > 0.0:
                rho = grid.inner(d2, d1) / n1
                if 0.0 < rho < 0.999:
                    acc = np.maximum(v + (rho / (1.0 - rho)) * d2, 0.0)
                    Pa = grid.integrate(acc ** (p + 1.0))
                    if Pa > 0.0:
                        acc /= Pa ** (1.0 / (p + 1.0))
                        e_acc = dirichlet_energy(acc, grid) \
                            + L ** 2 * grid.integrate(acc * acc)
                        e_v = dirichlet_energy(v, grid) \
                            + L ** 2 * grid.integrate(v * v)
                        if e_acc <= e_v:       # descent safeguard
                            u_prev, u = v, acc
                            continue
        u_prev, u = u, v
    else:
        raise _stalled(grid, params, best_u, best_res, opts.max_iter)

    out = StripField(grid=grid, values=best_u * _solution_scale(grid, params, best_u))
    return out, energy_breakdown(out, params)


def _solution_scale(grid: StripGrid, params: ProblemParams, values: np.ndarray) -> float:
    Au = neg_laplacian(values, grid) + params.L ** 2 * values
    mu, _ = _mu_and_residual(grid, values, params.p, Au)
    return mu ** (1.0 / (params.p - 1.0))


def _stalled(grid, params, best_u, best_res, k) -> Stalled:
    field = StripField(grid=grid,
                       values=best_u * _solution_scale(grid, params, best_u))
    return Stalled(
        f"residual plateau at {best_res:.3e} after {k} iterations",
        field=field, breakdown=energy_breakdown(field, params),
    )


def default_seeds(w0: RadialProfile, params: ProblemParams,
                  grid: StripGrid) -> list[StripField]:
    """The three-start policy: trivial, transversely tilted trivial, corner bump."""
    from .radial import extend_trivial_to_strip

    trivial = extend_trivial_to_strip(w0, params, grid)
    phase = grid.t / grid.t_extent
    tilt = StripField(
        grid=grid,
        values=trivial.values * (1.0 + 0.3 * np.cos(np.pi * phase))[None, :],
    )
    r = grid.radial.r[:, None]
    t = grid.t[None, :]
    bump = np.exp(-params.L * np.sqrt(r ** 2 + (t - grid.t_extent) ** 2))
    corner = StripField(grid=grid, values=np.broadcast_to(
        bump, (grid.radial.n, grid.m)).copy())
    return [trivial, tilt, corner]


def multistart_minimize(params: ProblemParams, grid: StripGrid,
                        w0: RadialProfile, opts: SolveOptions | None = None
                        ) -> tuple[StripField, EnergyBreakdown]:
    """Run :func:`minimize_quotient` from the three default seeds, keep the
    lowest quotient. A seed that stalls is skipped unless all do."""
    best: tuple[StripField, EnergyBreakdown] | None = None
    failures: list[Stalled] = []
    for seed in default_seeds(w0, params, grid):
        try:
            field, bd = minimize_quotient(params, grid, seed, opts)
        except Stalled as exc:
            failures.append(exc)
            continue
        if best is None or bd.quotient < best[1].quotient:
            best = (field, bd)
    if best is None:
        raise failures[-1]
    return best


def symmetry_breaking_measure(u: StripField, trivial: StripField,
                              phi0: StripField) -> tuple[float, float]:
    """(delta, s): the projection of u - trivial on the unit mode phi0, and
    the transverse-derivative norm of u."""
    if not (u.grid.compatible(trivial.grid) and u.grid.compatible(phi0.grid)):
        raise GridMismatch("u, trivial and phi0 must share one strip grid")
    delta = u.grid.inner(u.values - trivial.values, phi0.values)
    return delta, u.transverse_derivative_norm()


# ---------------------------------------------------------------------------
# rearrangement
# ---------------------------------------------------------------------------

def _decreasing_by_measure(line: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Decreasing rearrangement of a sampled line against its own cell
    measures: values are ranked and reassigned front-to-back so that the
    weighted distribution function is preserved up to cell granularity.

    When the cell pattern is symmetric (interior cells equal, half cells at
    both ends — the transverse direction, and the radial one for d = 1) a
    line that is a reversal of a decreasing one maps back to it exactly, and
    a decreasing line is a fixed point: the cumulative-measure profile of the
    ranked values then matches the target cells one-to-one."""
    order = np.argsort(line)[::-1]
    sorted_vals = line[order]
    cum = np.concatenate(([0.0], np.cumsum(weights[order])))
    targets = np.cumsum(weights)
    mids = targets - 0.5 * weights
    idx = np.searchsorted(cum[1:], mids, side="left")
    return sorted_vals[np.minimum(idx, line.size - 1)]


def _rearranged_values(values: np.ndarray, grid: StripGrid) -> np.ndarray:
    tw = grid.t_weights
    out = np.empty_like(values)
    for i in range(values.shape[0]):
        out[i] = _decreasing_by_measure(values[i], tw)
    w = grid.radial.weights
    for j in range(out.shape[1]):
        out[:, j] = _decreasing_by_measure(out[:, j], w)
    return out


def rearrange_monotone(u: StripField) -> StripField:
    """Monotone rearrangement: Steiner-type decreasing rearrangement in t
    (canonical orientation: maximum on the t = 0 face) followed by the
    Schwarz-type one in r, each against the direction's own quadrature
    measure, one line at a time. Every line keeps its weighted distribution
    function, so the integral terms survive up to quadrature tolerance, and
    aligning all lines in one direction does not increase the discrete
    gradient energy (rearrangement inequality; checked, not proven, for the
    half-weight end cells)."""
    if np.any(u.values < 0.0):
        raise ValueError("rearrangement requires a nonnegative field")
    return StripField(grid=u.grid, values=_rearranged_values(u.values, u.grid))


# ---------------------------------------------------------------------------
# formulation scaling and the large-L limit
# ---------------------------------------------------------------------------

def rescale_between_formulations(u: StripField, params: ProblemParams,
                                 direction: Literal["to_physical", "to_unit"]
                                 ) -> StripField:
    """Map between the unit-strip problem (parameter L in the equation) and
    the physical strip of width L (parameter in the domain).

    ``to_physical``: v(y) = L^{-2/(p-1)} u(y/L) on R^{N-1} x (0, L); the grid
    is relabeled (h -> L h, t_extent -> L), values only rescaled, so the round
    trip is exact.
    """
    L, p = params.L, params.p
    amp = L ** (-2.0 / (p - 1.0))
    rad = u.grid.radial
    if direction == "to_physical":
        if abs(u.grid.t_extent - 1.0) > 1e-12:
            raise RangeMismatch("field is not on the unit strip")
        new_grid = StripGrid(
            radial=RadialGrid(d=rad.d, r_max=L * rad.r_max, h=L * rad.h),
            m=u.grid.m, t_extent=L,
        )
        return StripField(grid=new_grid, values=amp * u.values)
    if direction == "to_unit":
        if abs(u.grid.t_extent - L) > 1e-12 * max(1.0, L):
            raise RangeMismatch("field is not on the width-L strip")
        new_grid = StripGrid(
            radial=RadialGrid(d=rad.d, r_max=rad.r_max / L, h=rad.h / L),
            m=u.grid.m, t_extent=1.0,
        )
        return StripField(grid=new_grid, values=u.values / amp)
    raise ValueError(f"unknown direction {direction!r}")


def large_L_asymptote(params: ProblemParams, wN: RadialProfile, *,
                      tail_rel_tol: float = 1e-9) -> float:
    """Predicted limit of c(L) L^{-(2 - N(p-1)/(p+1))} as L grows:
    ``(1/2 int_{R^N} w^{p+1})^{(p-1)/(p+1)}`` — the minimizer concentrates as
    half a free ground state centered on one boundary face."""
    p = params.p
    if wN.grid.d != params.N:
        raise RangeMismatch(
            f"asymptote needs the d = N = {params.N} ground state, got d = {wN.grid.d}"
        )
    integral = wN.integrate_power(p + 1.0)
    tail = wN.tail_estimate_power(p + 1.0)
    if not (tail <= tail_rel_tol * integral):
        raise QuadratureTailLoss(
            f"estimated tail contribution {tail:.3e} exceeds "
            f"{tail_rel_tol:.1e} of the integral {integral:.6e}"
        )
    return (0.5 * integral) ** ((p - 1.0) / (p + 1.0))

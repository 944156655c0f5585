"""Bifurcation diagram of the strip problem: sweep, transition, pitchfork.

The transverse symmetry breaks at L* in a pitchfork. Near L* the minimizer
expands as u = w + delta*Phi0 + delta^2*Phi1 + O(delta^3) around the trivial
branch w at L*, with Phi0 = phi0(r) cos(pi t) spanning the kernel of
L0 = Lap - L*^2 + p w^{p-1}. Orders delta^0 and delta^1 hold by construction;
the delta^2 equation L0 Phi1 = -mu w - (p(p-1)/2) w^{p-2} Phi0^2 (with
mu = (L*^2 - L^2)/delta^2) splits as Phi1 = mu PsiA + PsiB because mu enters
linearly, and its solvability against Phi0 is automatic (odd cosine moments).
mu is pinned by the delta^3 solvability identity

    mu * int Phi0^2 + p(p-1) int w^{p-2} Phi0^2 Phi1
        + (p(p-1)(p-2)/6) int w^{p-3} Phi0^4 = 0,

linear in mu once Phi1 is split. All transverse integrals reduce to cosine
moments (int cos^2 = 1/2, int cos^4 = 3/8, int cos^2 cos2 = 1/4), so the
module solves radial tridiagonal systems only: mode 0 carries B_r and mode 2
carries B_r + 4 pi^2, where B_r = -Lap_r + L*^2 - p w^{p-1}. B_r is
invertible on even radial functions (its only negative eigenvalue is -pi^2 at
L*, the rest sits above L*^2; the translation zero modes are odd and excluded
by axisymmetry), so no projection is needed beyond input-consistency checks.

L* at grid level is the root of bottom(B_r(w_L)) + pi^2 = 0 in L, which makes
the discrete kernel relation exact and keeps the expansion self-consistent on
the same radial grid the sweep uses.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal, solve_banded
from scipy.optimize import brentq

from .errors import (
    InsufficientPoints,
    NegativeRadicandBothSides,
    NoBracket,
    NonConvergedLinearSolve,
    SingularProjection,
    SolverFailure,
    Stalled,
)
from .fields import RadialProfile, StripField
from .grids import ProblemParams, RadialGrid, StripGrid
from .operators import radial_tridiagonal, symmetrized_tridiagonal
from .radial import extend_trivial_to_strip, shoot_ground_state
from .spectral import critical_length, principal_eigenvalue
from .strip import (
    SolveOptions,
    energy_breakdown,
    multistart_minimize,
    symmetry_breaking_measure,
)

__all__ = [
    "BifurcationPoint",
    "BifurcationDiagram",
    "PitchforkExpansion",
    "PitchforkReport",
    "SweepOpts",
    "sweep",
    "locate_transition",
    "transition_mode",
    "pitchfork_expansion",
    "validate_pitchfork",
]

TRIVIAL = "Trivial"
NONTRIVIAL = "Nontrivial"


@dataclass(frozen=True)
class BifurcationPoint:
    L: float
    c: float
    cstar: float
    delta: float
    s: float
    classification: str
    attained: bool
    note: str = ""

    def to_json_record(self) -> dict:
        return {
            "L": self.L, "c": self.c, "cstar": self.cstar,
            "delta": self.delta, "s": self.s,
            "classification": self.classification, "attained": self.attained,
            "note": self.note,
        }


@dataclass
class BifurcationDiagram:
    points: list[BifurcationPoint]
    L_star_measured: float
    L_star_predicted: float
    L_double_star: float | None = None
    anomalies: list[str] = field(default_factory=list)

    def trivial_points(self) -> list[BifurcationPoint]:
        return [q for q in self.points if q.classification == TRIVIAL]

    def nontrivial_points(self) -> list[BifurcationPoint]:
        return [q for q in self.points if q.classification == NONTRIVIAL]

    def to_json_record(self) -> dict:
        return {
            "points": [q.to_json_record() for q in self.points],
            "L_star_measured": self.L_star_measured,
            "L_star_predicted": self.L_star_predicted,
            "L_double_star": self.L_double_star,
            "anomalies": list(self.anomalies),
        }


@dataclass
class SweepOpts:
    """Sweep policy: solver options, classification thresholds (an order of
    magnitude above solver tolerance), bisection width, worker count."""

    solve: SolveOptions = field(default_factory=SolveOptions)
    s_rel_threshold: float = 1e-4
    c_rel_threshold: float = 1e-4
    L_tol: float = 0.02
    workers: int = 1


# ---------------------------------------------------------------------------
# the radial kernel mode and grid-level L*
# ---------------------------------------------------------------------------

def _trivial_radial_values(w0: RadialProfile, params: ProblemParams, L: float,
                           rgrid: RadialGrid) -> np.ndarray:
    return L ** (2.0 / (params.p - 1.0)) * w0(L * rgrid.r)


def _bottom_radial_pair(w_vals: np.ndarray, L: float, p: float,
                        rgrid: RadialGrid) -> tuple[float, np.ndarray]:
    """Bottom eigenpair of B_r = -Lap_r + L^2 - p w^{p-1}, W-orthonormal."""
    diag, off = symmetrized_tridiagonal(rgrid, L ** 2 - p * w_vals ** (p - 1.0))
    vals, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))
    phi = vecs[:, 0] / np.sqrt(rgrid.weights)
    if phi[0] < 0.0:
        phi = -phi
    return float(vals[0]), phi


def grid_critical_length(w0: RadialProfile, params: ProblemParams,
                         rgrid: RadialGrid, bracket: tuple[float, float] | None = None
                         ) -> float:
    """Root of bottom(B_r(w_L)) + pi^2 in L: the width at which the discrete
    radial linearization about the trivial branch crosses the first
    transverse mode. Converges to pi/sqrt(lambda1) at second order in h."""
    lam1 = principal_eigenvalue(w0, params.p).eigenvalue
    center = critical_length(lam1).L_star_predicted
    lo, hi = bracket if bracket else (0.8 * center, 1.2 * center)

    def gap(L: float) -> float:
        w = _trivial_radial_values(w0, params, L, rgrid)
        bottom, _ = _bottom_radial_pair(w, L, params.p, rgrid)
        return bottom + math.pi ** 2

    return float(brentq(gap, lo, hi, xtol=1e-12, rtol=1e-14))


def transition_mode(w0: RadialProfile, params: ProblemParams, grid: StripGrid,
                    L_star: float | None = None) -> tuple[float, StripField]:
    """Grid-level L* and the unit-normalized kernel mode
    Phi0 = phi0(r) cos(pi t) on ``grid`` (int_Sigma Phi0^2 = 1)."""
    rgrid = grid.radial
    if L_star is None:
        L_star = grid_critical_length(w0, params, rgrid)
    w = _trivial_radial_values(w0, params, L_star, rgrid)
    _, phi = _bottom_radial_pair(w, L_star, params.p, rgrid)
    phi = phi / math.sqrt(0.5 * rgrid.integrate(phi ** 2))
    vals = phi[:, None] * np.cos(np.pi * grid.t / grid.t_extent)[None, :]
    return L_star, StripField(grid=grid, values=vals)


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _classify(c: float, cstar: float, s: float, u_norm: float,
              opts: SweepOpts) -> str:
    near_branch = abs(c - cstar) < opts.c_rel_threshold * cstar
    flat = s < opts.s_rel_threshold * u_norm
    return TRIVIAL if (flat and near_branch) else NONTRIVIAL


def _non_attainment_note(params: ProblemParams, quotient: float,
                         stalled: StripField, trivial: StripField) -> str:
    """Diagnostic for stalled descents at the critical exponent: flags a
    stalled energy approaching the half-space Sobolev threshold together
    with a concentrating max-norm. Never a certified statement — at the
    critical exponent the infimum may simply not be attained, and the only
    honest output is an indicator string."""
    if params.N < 3 or abs(params.p * (params.N - 2.0) - (params.N + 2.0)) > 1e-9:
        return ""
    from .critical import sobolev_constants

    s_half = sobolev_constants(params.N).S_half
    peak = float(np.max(np.abs(stalled.values)))
    trivial_peak = float(np.max(np.abs(trivial.values)))
    if quotient >= 0.85 * s_half and peak > 3.0 * trivial_peak:
        return (f"non-attainment indicator: stalled at quotient "
                f"{quotient:.6g} near the half-space threshold {s_half:.6g} "
                f"with max-norm {peak:.3g} vs trivial {trivial_peak:.3g}; "
                f"diagnostic only, not a certified result")
    return ""


def _sweep_point(args) -> BifurcationPoint:
    params_base, L, grid, w0, phi0_vals, opts = args
    params = ProblemParams(N=params_base.N, p=params_base.p, L=L)
    phi0 = StripField(grid=grid, values=phi0_vals)
    trivial = extend_trivial_to_strip(w0, params, grid)
    cstar = energy_breakdown(trivial, params).quotient
    note = ""
    try:
        u, bd = multistart_minimize(params, grid, w0, opts.solve)
        attained = True
    except Stalled as exc:
        u, bd = exc.field, exc.breakdown
        attained = False
        note = _non_attainment_note(params, bd.quotient, u, trivial)
    except (SolverFailure, NonConvergedLinearSolve):
        return BifurcationPoint(L=L, c=math.nan, cstar=cstar, delta=math.nan,
                                s=math.nan, classification=NONTRIVIAL,
                                attained=False)
    delta, s = symmetry_breaking_measure(u, trivial, phi0)
    cls = _classify(bd.quotient, cstar, s, u.norm(), opts)
    return BifurcationPoint(L=L, c=bd.quotient, cstar=cstar, delta=delta,
                            s=s, classification=cls, attained=attained,
                            note=note)


def _check_anomalies(points: list[BifurcationPoint], opts: SweepOpts) -> list[str]:
    notes = []
    labels = [q.classification for q in points]
    if NONTRIVIAL in labels and TRIVIAL in labels[labels.index(NONTRIVIAL):]:
        notes.append("partition violated: Trivial point after a Nontrivial one")
    attained = [q for q in points if q.attained]
    for a, b in zip(attained, attained[1:]):
        if not (b.c > a.c * (1.0 + 1e-6)):
            notes.append(f"c not strictly increasing between L={a.L} and L={b.L}")
    for q in points:
        if not q.attained or math.isnan(q.s):
            continue
        u_scale = max(abs(q.c), 1.0)        # delta and s live on u's scale
        flat_s = q.s < opts.s_rel_threshold * u_scale
        flat_d = abs(q.delta) < opts.s_rel_threshold * u_scale
        if flat_s != flat_d:
            notes.append(f"delta/s mismatch at L={q.L}: s={q.s:.3e} delta={q.delta:.3e}")
    return notes


def sweep(params_base: ProblemParams, L_values: list[float], grid: StripGrid,
          opts: SweepOpts | None = None) -> BifurcationDiagram:
    """One multistart-minimized BifurcationPoint per L; failures are recorded
    per point (attained=False), never raised. Points are independent jobs;
    with ``opts.workers > 1`` they run in a process pool and the diagram is
    assembled after a deterministic sort by L."""
    opts = opts or SweepOpts()
    fine = RadialGrid(d=params_base.d, r_max=25.0, h=0.01)
    w0 = shoot_ground_state(params_base.d, params_base.p, fine)
    lam1 = principal_eigenvalue(w0, params_base.p).eigenvalue
    predicted = critical_length(lam1, p=None).L_star_predicted
    _, phi0 = transition_mode(w0, params_base, grid)

    jobs = [(params_base, float(L), grid, w0, phi0.values, opts)
            for L in sorted(L_values)]
    if opts.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=opts.workers) as pool:
            points = list(pool.map(_sweep_point, jobs))
    else:
        points = [_sweep_point(job) for job in jobs]
    points.sort(key=lambda q: q.L)

    measured = math.nan
    labels = [q.classification for q in points]
    if TRIVIAL in labels and NONTRIVIAL in labels:
        last_trivial = max(i for i, s in enumerate(labels) if s == TRIVIAL)
        first_nontrivial = min(i for i, s in enumerate(labels) if s == NONTRIVIAL)
        if first_nontrivial == last_trivial + 1:
            measured = 0.5 * (points[last_trivial].L + points[first_nontrivial].L)

    return BifurcationDiagram(
        points=points, L_star_measured=measured, L_star_predicted=predicted,
        anomalies=(_check_anomalies(points, opts)
                   + [f"L={q.L}: {q.note}" for q in points if q.note]),
    )


def locate_transition(params_base: ProblemParams, grid: StripGrid,
                      bracket: tuple[float, float],
                      opts: SweepOpts | None = None) -> float:
    """Bisection on the classification to width ``opts.L_tol``."""
    opts = opts or SweepOpts()
    fine = RadialGrid(d=params_base.d, r_max=25.0, h=0.01)
    w0 = shoot_ground_state(params_base.d, params_base.p, fine)
    _, phi0 = transition_mode(w0, params_base, grid)

    def classify(L: float) -> str:
        return _sweep_point((params_base, L, grid, w0, phi0.values, opts)).classification

    lo, hi = float(bracket[0]), float(bracket[1])
    cls_lo, cls_hi = classify(lo), classify(hi)
    if cls_lo == cls_hi:
        raise NoBracket(
            f"classification is {cls_lo} at both bracket ends ({lo}, {hi})"
        )
    while hi - lo > opts.L_tol:
        mid = 0.5 * (lo + hi)
        if classify(mid) == cls_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# pitchfork expansion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PitchforkExpansion:
    phi0: StripField
    psiA: StripField
    psiB: StripField
    mu: float
    kappa_terms: tuple[float, float, float]
    L_star: float
    p: float

    def predicted_delta(self, L: float) -> float:
        """sqrt((L*^2 - L^2)/mu) on the side where the radicand is positive,
        NaN on the other side."""
        radicand = (self.L_star ** 2 - L ** 2) / self.mu
        return math.sqrt(radicand) if radicand > 0.0 else math.nan

    def solvability_residual(self, w_star: StripField) -> float:
        """The delta^3 identity re-evaluated by full 2-D strip quadrature
        with the assembled Phi1 = mu PsiA + PsiB — an independent route from
        the cosine-moment algebra that produced mu."""
        g = self.phi0.grid
        p = self.p
        w = w_star.values
        phi1 = self.mu * self.psiA.values + self.psiB.values
        with np.errstate(divide="ignore", invalid="ignore"):
            wm2 = np.where(w > 0.0, w ** (p - 2.0), 0.0)
            wm3 = np.where(w > 0.0, w ** (p - 3.0), 0.0)
        return float(
            self.mu * g.integrate(self.phi0.values ** 2)
            + p * (p - 1.0) * g.integrate(wm2 * self.phi0.values ** 2 * phi1)
            + (p * (p - 1.0) * (p - 2.0) / 6.0)
            * g.integrate(wm3 * self.phi0.values ** 4)
        )


def _solve_radial(rgrid: RadialGrid, potential: np.ndarray,
                  rhs: np.ndarray) -> np.ndarray:
    dl, diag, du = radial_tridiagonal(rgrid, potential)
    n = rgrid.n
    ab = np.zeros((3, n))
    ab[0, 1:] = du
    ab[1] = diag
    ab[2, :-1] = dl
    return solve_banded((1, 1), ab, rhs)


def pitchfork_expansion(params: ProblemParams, grid: StripGrid,
                        w_star: StripField) -> PitchforkExpansion:
    """Appendix-style expansion at the transition; ``params.L`` must be the
    (grid-level) L* and ``w_star`` the trivial branch there.

    Raises SingularProjection when the inputs are inconsistent (w_star not
    t-independent, or the kernel relation bottom(B_r) = -pi^2 fails), and
    refuses p < 2, where the w^{p-2}, w^{p-3} integrands diverge at infinity.
    """
    p, L_star = params.p, params.L
    if p < 2.0:
        raise ValueError(
            f"pitchfork expansion needs p >= 2 (w^(p-3) tails diverge); got p={p}"
        )
    rgrid = grid.radial
    vals = w_star.values
    if np.ptp(vals, axis=1).max() > 1e-10 * vals.max():
        raise SingularProjection("w_star is not a trivial (t-independent) field")
    w = vals[:, 0].astype(float)

    bottom, phi = _bottom_radial_pair(w, L_star, p, rgrid)
    if abs(bottom + math.pi ** 2) > 0.05 * math.pi ** 2:
        raise SingularProjection(
            f"bottom(B_r) = {bottom:.6f} is far from -pi^2: w_star is not the "
            f"trivial branch at a consistent L*"
        )
    phi = phi / math.sqrt(0.5 * rgrid.integrate(phi ** 2))   # int_Sigma Phi0^2 = 1

    potential = L_star ** 2 - p * w ** (p - 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        wm2 = np.where(w > 0.0, w ** (p - 2.0), 0.0)
        wm3 = np.where(w > 0.0, w ** (p - 3.0), 0.0)
    rhs_b = (p * (p - 1.0) / 4.0) * wm2 * phi ** 2

    # Both right-hand sides must be orthogonal to the kernel mode in the
    # full strip quadrature (cosine moments make this automatic for
    # consistent inputs; trapezoid sums of cos and cos^3 vanish exactly).
    cos_t = np.cos(np.pi * grid.t / grid.t_extent)[None, :]
    phi0_vals = phi[:, None] * cos_t
    for label, rhs_field in (("w_star", w[:, None] * np.ones((1, grid.m))),
                             ("Phi0^2 forcing", 2.0 * rhs_b[:, None] * cos_t ** 2)):
        proj = grid.inner(rhs_field, phi0_vals)
        scale = grid.norm(rhs_field)
        if abs(proj) > 1e-10 * max(scale, 1.0):
            raise SingularProjection(
                f"{label} has a kernel component ({proj:.3e}) above tolerance"
            )

    psi_a = _solve_radial(rgrid, potential, w)
    psi_b0 = _solve_radial(rgrid, potential, rhs_b)
    psi_b2 = _solve_radial(rgrid, potential + 4.0 * math.pi ** 2, rhs_b)

    kappa_a = (p * (p - 1.0) / 2.0) * rgrid.integrate(wm2 * phi ** 2 * psi_a)
    kappa_b = p * (p - 1.0) * rgrid.integrate(
        wm2 * phi ** 2 * (0.5 * psi_b0 + 0.25 * psi_b2))
    kappa_c = (p * (p - 1.0) * (p - 2.0) / 16.0) * rgrid.integrate(wm3 * phi ** 4)
    mu = -(kappa_b + kappa_c) / (1.0 + kappa_a)

    cos2 = np.cos(2.0 * np.pi * grid.t / grid.t_extent)[None, :]
    ones = np.ones((1, grid.m))
    return PitchforkExpansion(
        phi0=StripField(grid=grid, values=phi0_vals),
        psiA=StripField(grid=grid, values=psi_a[:, None] * ones),
        psiB=StripField(grid=grid,
                        values=psi_b0[:, None] * ones + psi_b2[:, None] * cos2),
        mu=float(mu), kappa_terms=(float(kappa_a), float(kappa_b), float(kappa_c)),
        L_star=float(L_star), p=float(p),
    )


# ---------------------------------------------------------------------------
# validation against a sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PitchforkReport:
    rows: list[dict]            # per point: L, measured, predicted, rel_err
    slope: float                # log|delta| vs log(L - L*)
    fitted_inverse_mu: float    # least-squares delta^2 / (L^2 - L*^2)
    mu: float

    def to_json_record(self) -> dict:
        return {
            "rows": self.rows, "slope": self.slope,
            "fitted_inverse_mu": self.fitted_inverse_mu, "mu": self.mu,
        }


def validate_pitchfork(expansion: PitchforkExpansion,
                       diagram: BifurcationDiagram) -> PitchforkReport:
    """Per-point predicted vs measured delta near the transition, the
    square-root-law exponent, and the fitted 1/|mu|."""
    L_star = expansion.L_star
    close = [q for q in diagram.nontrivial_points()
             if q.attained and q.L / L_star <= 1.05 + 1e-12]
    if len(close) < 3:
        raise InsufficientPoints(
            f"need >= 3 attained nontrivial points with L/L* <= 1.05, have {len(close)}"
        )
    predictions = [expansion.predicted_delta(q.L) for q in close]
    if all(math.isnan(d) for d in predictions):
        raise NegativeRadicandBothSides(
            f"mu = {expansion.mu:.6f} puts every diagram point on the "
            f"negative-radicand side; not a pitchfork around L* = {L_star:.4f}"
        )

    rows = []
    for q, pred in zip(close, predictions):
        measured = abs(q.delta)
        rel = abs(measured - pred) / pred if pred == pred and pred > 0 else math.nan
        rows.append({"L": q.L, "delta_measured": measured,
                     "delta_predicted": pred, "rel_err": rel})

    xs = np.log([q.L - L_star for q in close])
    ys = np.log([abs(q.delta) for q in close])
    slope = float(np.polyfit(xs, ys, 1)[0])
    gaps = np.array([q.L ** 2 - L_star ** 2 for q in close])
    d2 = np.array([q.delta ** 2 for q in close])
    fitted = float(np.dot(gaps, d2) / np.dot(gaps, gaps))
    return PitchforkReport(rows=rows, slope=slope, fitted_inverse_mu=fitted,
                           mu=expansion.mu)

"""Go/no-go acceptance checks for the whole package.

Ten independent criteria, each returning a :class:`CriterionResult` with a
pass/fail verdict, the measured numbers, and its wall time.  They are the
release gate: :func:`run_all` drives them for the ``validate`` CLI subcommand,
and ``tests/test_acceptance.py`` asserts each one individually so the suite
prints one pass/fail line per criterion.

Expensive artifacts (ground states, the phase-diagram sweep, minimizers) are
shared through :class:`AcceptanceContext`'s cached properties, so the first
criterion that touches one pays its wall time.  The two criteria with explicit
runtime budgets (closed-form eigenvalues under 5 s, the 1-D profile under 1 s)
recompute their inputs fresh inside the criterion and time exactly that work.

A criterion that raises is reported as failed with the exception text rather
than aborting the run: the gate must always produce all ten verdicts.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .bifurcation import (
    NONTRIVIAL,
    TRIVIAL,
    SweepOpts,
    grid_critical_length,
    locate_transition,
    pitchfork_expansion,
    sweep,
    validate_pitchfork,
)
from .critical import fit_expansion, instanton_residual, sobolev_constants
from .critical import test_function_quotient as _strip_quotient
from .fields import StripField
from .grids import ProblemParams, RadialGrid, StripGrid
from .operators import dirichlet_energy
from .radial import closed_form_1d, extend_trivial_to_strip, shoot_ground_state
from .spectral import (
    linearized_spectrum,
    principal_eigenvalue,
    stability_form,
    transverse_second_eigenvalue,
)
from .strip import SolveOptions, large_L_asymptote, multistart_minimize

__all__ = [
    "AcceptanceContext",
    "CriterionResult",
    "run_all",
]

_PHASE_SCHEDULE = (1.0, 1.5, 1.75, 1.9, 2.5, 3.0)
_NEAR_FACTORS = (1.01, 1.02, 1.05)


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  criterion {self.index:2d}  {self.name}: {self.detail}  [{self.seconds:.1f}s]"

    def to_json_record(self) -> dict:
        return {
            "index": self.index, "name": self.name, "passed": self.passed,
            "detail": self.detail, "seconds": self.seconds,
        }


class AcceptanceContext:
    """Shared, lazily computed artifacts for the criteria.

    ``seed`` feeds the random fields of the stability criterion; ``workers``
    fans the sweep points out over a process pool.  Everything else is fixed:
    the criteria pin their own grids and tolerances.
    """

    def __init__(self, *, seed: int = 0, workers: int = 1):
        self.seed = int(seed)
        self.workers = int(workers)

    # -- shared building blocks --------------------------------------------

    @cached_property
    def params_base(self) -> ProblemParams:
        return ProblemParams(N=2, p=3.0, L=1.0)

    @cached_property
    def fine_1d(self) -> RadialGrid:
        return RadialGrid(d=1, r_max=25.0, h=0.01)

    @cached_property
    def w0_p3(self):
        return shoot_ground_state(1, 3.0, self.fine_1d)

    @cached_property
    def sweep_grid(self) -> StripGrid:
        return StripGrid(radial=RadialGrid(d=1, r_max=25.0, h=0.05), m=64)

    @cached_property
    def sweep_opts(self) -> SweepOpts:
        return SweepOpts(workers=self.workers)

    @cached_property
    def diagram(self):
        return sweep(self.params_base, list(_PHASE_SCHEDULE), self.sweep_grid,
                     self.sweep_opts)

    def point(self, L: float):
        matches = [q for q in self.diagram.points if math.isclose(q.L, L)]
        if not matches:
            raise KeyError(f"no sweep point at L = {L}")
        return matches[0]

    @cached_property
    def L_star_grid(self) -> float:
        """Zero of the discrete transition eigenvalue on the sweep radial grid."""
        return grid_critical_length(self.w0_p3, self.params_base,
                                    self.sweep_grid.radial)

    @cached_property
    def L_star_fine(self) -> float:
        return grid_critical_length(self.w0_p3, self.params_base, self.fine_1d)

    @cached_property
    def expansion(self):
        params_star = ProblemParams(N=2, p=3.0, L=self.L_star_grid)
        w_star = extend_trivial_to_strip(self.w0_p3, params_star, self.sweep_grid)
        return pitchfork_expansion(params_star, self.sweep_grid, w_star)

    @cached_property
    def near_diagram(self):
        schedule = [self.L_star_grid * f for f in _NEAR_FACTORS]
        return sweep(self.params_base, schedule, self.sweep_grid, self.sweep_opts)

    def _minimizer(self, L: float):
        params = ProblemParams(N=2, p=3.0, L=L)
        field, bd = multistart_minimize(params, self.sweep_grid, self.w0_p3,
                                        SolveOptions())
        return params, field, bd

    @cached_property
    def minimizer_L1(self):
        return self._minimizer(1.0)

    @cached_property
    def minimizer_L25(self):
        return self._minimizer(2.5)


def _smooth_random_field(grid: StripGrid, rng, n_modes: int = 3) -> np.ndarray:
    r = grid.radial.r[:, None] / grid.radial.r_max
    t = grid.t[None, :] / grid.t_extent
    vals = np.zeros((grid.radial.n, grid.m))
    for a in range(n_modes):
        for b in range(n_modes):
            vals += rng.normal() * np.cos(a * np.pi * r) * np.cos(b * np.pi * t)
    return vals


# ---------------------------------------------------------------------------
# the ten criteria
# ---------------------------------------------------------------------------

def criterion_1(ctx: AcceptanceContext) -> tuple[bool, str]:
    """Principal eigenvalue matches (p-1)(p+3)/4 for p in {2, 3, 4}."""
    start = time.perf_counter()
    rel_errs = {}
    for p in (2.0, 3.0, 4.0):
        w = shoot_ground_state(1, p, ctx.fine_1d)
        measured = principal_eigenvalue(w, p).eigenvalue
        exact = (p - 1.0) * (p + 3.0) / 4.0
        rel_errs[p] = abs(measured - exact) / exact
    elapsed = time.perf_counter() - start
    worst = max(rel_errs.values())
    passed = worst <= 1e-3 and elapsed < 5.0
    detail = (f"rel errors {{2: {rel_errs[2.0]:.1e}, 3: {rel_errs[3.0]:.1e}, "
              f"4: {rel_errs[4.0]:.1e}}} vs 1e-3; computed in {elapsed:.2f}s "
              f"(budget 5s)")
    return passed, detail


def criterion_2(ctx: AcceptanceContext) -> tuple[bool, str]:
    """1-D ground state matches the sech closed form to 1e-6 in max norm."""
    start = time.perf_counter()
    w = shoot_ground_state(1, 3.0, ctx.fine_1d)
    elapsed = time.perf_counter() - start
    err = float(np.max(np.abs(w.values - closed_form_1d(3.0, ctx.fine_1d.r))))
    passed = err < 1e-6 and elapsed < 1.0
    detail = (f"max-norm error {err:.1e} vs 1e-6 at h = 0.01; "
              f"computed in {elapsed:.2f}s (budget 1s)")
    return passed, detail


def criterion_3(ctx: AcceptanceContext) -> tuple[bool, str]:
    """Transition length in (1.76, 1.87); phases classified on both sides."""
    want = {1.0: TRIVIAL, 1.5: TRIVIAL, 1.75: TRIVIAL,
            1.9: NONTRIVIAL, 2.5: NONTRIVIAL, 3.0: NONTRIVIAL}
    got = {L: ctx.point(L).classification for L in want}
    phases_ok = got == want
    measured = locate_transition(ctx.params_base, ctx.sweep_grid, (1.75, 1.9),
                                 ctx.sweep_opts)
    in_window = 1.76 < measured < 1.87
    passed = phases_ok and in_window
    mismatches = {L: got[L] for L in want if got[L] != want[L]}
    detail = (f"transition at L = {measured:.4f} (window (1.76, 1.87), "
              f"pi/sqrt(3) = {math.pi / math.sqrt(3.0):.4f}); "
              + ("all six phases classified as expected"
                 if phases_ok else f"misclassified: {mismatches}"))
    return passed, detail


def criterion_4(ctx: AcceptanceContext) -> tuple[bool, str]:
    """Below the transition the minimum sits on the trivial branch; above it
    the attained value drops strictly below the trivial-branch value."""
    q15, q25 = ctx.point(1.5), ctx.point(2.5)
    gap_25 = (q25.cstar - q25.c) / q25.cstar
    agree_15 = abs(q15.c - q15.cstar) / q15.cstar
    passed = (q25.attained and gap_25 > 1e-3) and agree_15 < 1e-4
    detail = (f"L = 2.5: relative gap c* - c = {gap_25:.2e} (> 1e-3); "
              f"L = 1.5: |c - c*|/c* = {agree_15:.1e} (< 1e-4)")
    return passed, detail


def criterion_5(ctx: AcceptanceContext) -> tuple[bool, str]:
    """Second linearized eigenvalue matches pi^2 - L^2 lambda1 on the trivial
    branch, and its sign change pins the transition length."""
    errs = {}
    for L in (0.5, 1.0, 1.5):
        params = ProblemParams(N=2, p=3.0, L=L)
        sgrid = StripGrid(radial=RadialGrid(d=1, r_max=min(25.0 / min(1.0, L), 60.0),
                                            h=0.02), m=128)
        u = extend_trivial_to_strip(ctx.w0_p3, params, sgrid)
        eigs = linearized_spectrum(u, params, 2)
        errs[L] = abs(eigs[1].eigenvalue - transverse_second_eigenvalue(3.0, L))
    law_ok = max(errs.values()) < 5e-3
    sign_gap = abs(ctx.L_star_fine - math.pi / math.sqrt(3.0))
    passed = law_ok and sign_gap < 0.02
    detail = (f"law errors {{0.5: {errs[0.5]:.1e}, 1.0: {errs[1.0]:.1e}, "
              f"1.5: {errs[1.5]:.1e}}} vs 5e-3; sign change within "
              f"{sign_gap:.1e} of pi/sqrt(lambda1) (< 0.02)")
    return passed, detail


def criterion_6(ctx: AcceptanceContext) -> tuple[bool, str]:
    """Second-variation form nonnegative on random directions at minimizers,
    and the second linearized eigenvalue there is nonnegative."""
    rng = np.random.default_rng(ctx.seed)
    worst_form = math.inf
    worst_eig = math.inf
    for params, field, _bd in (ctx.minimizer_L1, ctx.minimizer_L25):
        for _ in range(20):
            phi = StripField(grid=ctx.sweep_grid,
                             values=_smooth_random_field(ctx.sweep_grid, rng))
            scale = dirichlet_energy(phi.values, ctx.sweep_grid) \
                + ctx.sweep_grid.integrate(phi.values ** 2)
            worst_form = min(worst_form,
                             stability_form(field, phi, params) / scale)
        eig2 = linearized_spectrum(field, params, 2)[1].eigenvalue
        worst_eig = min(worst_eig, eig2)
    passed = worst_form >= -1e-6 and worst_eig >= -1e-6
    detail = (f"worst normalized second-variation value {worst_form:.2e} and "
              f"worst second eigenvalue {worst_eig:.2e} over minimizers at "
              f"L in {{1.0, 2.5}}, 20 seeded directions each (>= -1e-6)")
    return passed, detail


def criterion_7(ctx: AcceptanceContext) -> tuple[bool, str]:
    """At L = 12 the attained level matches the one-face concentration limit
    (1/2 int w_2D^{p+1})^{(p-1)/(p+1)} * L to within 3 percent."""
    params = ProblemParams(N=2, p=3.0, L=12.0)
    w2d = shoot_ground_state(2, 3.0, RadialGrid(d=2, r_max=25.0, h=0.01))
    asymptote = large_L_asymptote(params, w2d)
    grid = StripGrid(radial=RadialGrid(d=1, r_max=3.0, h=0.005), m=128)
    _field, bd = multistart_minimize(params, grid, ctx.w0_p3, SolveOptions())
    ratio = bd.quotient / (12.0 * asymptote)
    passed = abs(ratio - 1.0) < 0.03
    detail = (f"c(12)/(12 * asymptote) = {ratio:.5f} "
              f"(within 3% of 1; asymptote = {asymptote:.6f})")
    return passed, detail


def criterion_8(ctx: AcceptanceContext) -> tuple[bool, str]:
    """Square-root law just past the transition: delta^2/(L^2 - L*^2) fits
    1/|mu| within 10 percent and the log-log slope is near 1/2."""
    report = validate_pitchfork(ctx.expansion, ctx.near_diagram)
    fitted_rel = abs(report.fitted_inverse_mu * abs(report.mu) - 1.0)
    slope_ok = 0.4 <= report.slope <= 0.6
    passed = fitted_rel <= 0.10 and slope_ok
    detail = (f"fitted 1/|mu| off by {fitted_rel:.1%} (<= 10%); "
              f"log-log slope {report.slope:.3f} in [0.4, 0.6]; "
              f"mu = {report.mu:.4f} over {len(report.rows)} points")
    return passed, detail


def criterion_9(ctx: AcceptanceContext) -> tuple[bool, str]:
    """Critical-exponent constants: half-space constant identity, pointwise
    instanton residual, strip test-function comparison, and the N = 4
    logarithmic mass coefficient."""
    checks = []

    identity_errs = {}
    for N in (4, 5):
        cc = sobolev_constants(N)
        identity_errs[N] = abs(cc.S_half - 2.0 ** (-2.0 / N) * cc.S) / cc.S
    identity_ok = max(identity_errs.values()) < 1e-14
    checks.append((identity_ok,
                   f"S_half = 2^(-2/N) S to {max(identity_errs.values()):.1e}"))

    residuals = {N: float(np.max(instanton_residual(N))) for N in (4, 5)}
    residual_ok = max(residuals.values()) < 1e-8
    checks.append((residual_ok,
                   f"max instanton residual {max(residuals.values()):.1e} (< 1e-8)"))

    quotient, _rec = _strip_quotient(0.01, 0.1, 5)
    s_half_5 = sobolev_constants(5).S_half
    below_ok = quotient < s_half_5
    gap = (quotient - s_half_5) / s_half_5
    checks.append((below_ok,
                   f"quotient(eps=0.01, L=0.1, N=5) - S_half = {gap:+.2e} "
                   f"relative (required < 0; at eps below the crossover "
                   f"eps* ~ L^2 C0/((N-2) B0) ~ 1.6e-2 the L^2 mass term "
                   f"outweighs the gradient deficit, so the quotient sits "
                   f"above S_half)"))

    fit = fit_expansion([0.02, 0.01, 0.005], 0.1, 4)
    coefs = np.asarray(fit["per_eps_mass_coefficient"], dtype=float)
    spread = float((coefs.max() - coefs.min()) / coefs.mean())
    spread_ok = spread <= 0.15
    checks.append((spread_ok,
                   f"N = 4 mass coefficient spread {spread:.1%} (<= 15%)"))

    passed = all(ok for ok, _ in checks)
    detail = "; ".join(("ok: " if ok else "FAILED: ") + text
                       for ok, text in checks)
    return passed, detail


def criterion_10(ctx: AcceptanceContext) -> tuple[bool, str]:
    """Across completed sweeps the attained level is strictly increasing in L
    and never exceeds the trivial-branch value."""
    ordered = True
    bounded = True
    n_points = 0
    for diagram in (ctx.diagram, ctx.near_diagram):
        attained = [q for q in diagram.points if q.attained]
        n_points += len(attained)
        cs = [q.c for q in attained]
        ordered = ordered and all(b > a for a, b in zip(cs, cs[1:]))
        bounded = bounded and all(q.c <= q.cstar * (1.0 + 1e-9) for q in attained)
    passed = ordered and bounded
    detail = (f"{n_points} attained points over two sweeps: "
              f"strictly increasing in L: {ordered}; c <= c*: {bounded}")
    return passed, detail


_CRITERIA = [
    (1, "closed-form principal eigenvalues", criterion_1),
    (2, "1-D ground-state profile", criterion_2),
    (3, "transition length and phase classification", criterion_3),
    (4, "energy ordering across the transition", criterion_4),
    (5, "transverse second-eigenvalue law", criterion_5),
    (6, "second-variation stability at minimizers", criterion_6),
    (7, "large-L one-face concentration", criterion_7),
    (8, "pitchfork square-root law", criterion_8),
    (9, "critical-exponent constants", criterion_9),
    (10, "sweep monotonicity and trivial bound", criterion_10),
]


def run_criterion(index: int, ctx: AcceptanceContext) -> CriterionResult:
    """Run one criterion by 1-based index."""
    for idx, name, fn in _CRITERIA:
        if idx == index:
            start = time.perf_counter()
            try:
                passed, detail = fn(ctx)
            except Exception as exc:  # the gate must report, not crash
                passed, detail = False, f"raised {type(exc).__name__}: {exc}"
            return CriterionResult(index=idx, name=name, passed=passed,
                                   detail=detail,
                                   seconds=time.perf_counter() - start)
    raise ValueError(f"no criterion with index {index}")


def run_all(ctx: AcceptanceContext | None = None, *, echo=None) -> list[CriterionResult]:
    """Run all ten criteria in order; ``echo`` (e.g. ``print``) receives each
    result line as it completes."""
    ctx = ctx or AcceptanceContext()
    results = []
    for idx, _name, _fn in _CRITERIA:
        result = run_criterion(idx, ctx)
        results.append(result)
        if echo is not None:
            echo(result.line())
    return results

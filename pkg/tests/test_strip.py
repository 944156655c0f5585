"""Quotient minimization on the strip: descent, symmetry breaking, field ops."""

import numpy as np
import pytest
import warnings
from hypothesis import given, settings, strategies as st

from stripmin.errors import GridMismatch, QuadratureTailLoss, RangeMismatch, Stalled
from stripmin.fields import StripField
from stripmin.grids import ProblemParams, RadialGrid, StripGrid
from stripmin.operators import dirichlet_energy
from stripmin.radial import (
    extend_trivial_to_strip,
    shoot_ground_state,
    trivial_branch_energy,
)
from stripmin.spectral import stability_form
from stripmin.strip import (
    SolveOptions,
    default_seeds,
    el_residual,
    energy_breakdown,
    large_L_asymptote,
    minimize_quotient,
    multistart_minimize,
    rearrange_monotone,
    rescale_between_formulations,
    symmetry_breaking_measure,
)

P3 = ProblemParams(N=2, p=3.0, L=1.0)


@pytest.fixture(scope="module")
def strip_grid():
    return StripGrid(radial=RadialGrid(d=1, r_max=25.0, h=0.05), m=64)


@pytest.fixture(scope="module")
def minimizer_L1(w1_p3, strip_grid):
    params = ProblemParams(N=2, p=3.0, L=1.0)
    init = extend_trivial_to_strip(w1_p3, params, strip_grid)
    hist = []
    field, bd = minimize_quotient(params, strip_grid, init,
                                  SolveOptions(history_sink=hist))
    return field, bd, hist


@pytest.fixture(scope="module")
def minimizer_L25(w1_p3, strip_grid):
    params = ProblemParams(N=2, p=3.0, L=2.5)
    return multistart_minimize(params, strip_grid, w1_p3)


def smooth_random_field(grid, rng, n_modes=3):
    r = grid.radial.r[:, None] / grid.radial.r_max
    t = grid.t[None, :] / grid.t_extent
    vals = np.zeros((grid.radial.n, grid.m))
    for a in range(n_modes):
        for b in range(n_modes):
            vals += rng.normal() * np.cos(a * np.pi * r) * np.cos(b * np.pi * t)
    return np.abs(vals) + 0.1


# ---------------------------------------------------------------------------
# minimize_quotient
# ---------------------------------------------------------------------------

def test_trivial_init_recovers_trivial_branch(minimizer_L1, w1_p3):
    field, bd, _ = minimizer_L1
    cstar = trivial_branch_energy(P3, w1_p3).cstar_at(1.0)
    assert abs(bd.quotient - cstar) < 1e-3 * cstar
    assert field.transverse_derivative_norm() < 1e-6
    assert abs(bd.mu - 1.0) < 1e-6          # solution normalization
    assert bd.el_residual < 1e-8


def test_descent_is_monotone(minimizer_L1):
    _, _, hist = minimizer_L1
    steps = np.diff(hist)
    assert steps.max() <= 1e-12 * max(abs(h) for h in hist)


def test_descent_is_monotone_from_corner_seed(w1_p3, strip_grid):
    params = ProblemParams(N=2, p=3.0, L=2.5)
    seeds = default_seeds(w1_p3, params, strip_grid)
    hist = []
    minimize_quotient(params, strip_grid, seeds[2], SolveOptions(history_sink=hist))
    assert len(hist) > 3
    assert np.diff(hist).max() <= 1e-12 * max(abs(h) for h in hist)


def test_warm_restart_converges_immediately(minimizer_L1, strip_grid):
    field, _, _ = minimizer_L1
    hist = []
    _, bd = minimize_quotient(ProblemParams(N=2, p=3.0, L=1.0), strip_grid,
                              field, SolveOptions(history_sink=hist))
    assert len(hist) <= 5
    assert bd.el_residual < 1e-8


def test_symmetry_breaking_above_transition(minimizer_L25, w1_p3):
    field, bd = minimizer_L25
    params = ProblemParams(N=2, p=3.0, L=2.5)
    cstar = trivial_branch_energy(params, w1_p3).cstar_at(2.5)
    assert bd.quotient < cstar * (1.0 - 1e-3)
    assert field.transverse_derivative_norm() > 0.1
    assert bd.el_residual < 1e-8


def test_minimum_never_exceeds_trivial_branch(w1_p3, strip_grid):
    # the trivial extension is admissible, so its same-grid quotient is an
    # upper bound for the minimum on every grid
    for L in (1.0, 1.75, 2.5):
        params = ProblemParams(N=2, p=3.0, L=L)
        triv = extend_trivial_to_strip(w1_p3, params, strip_grid)
        c_grid = energy_breakdown(triv, params).quotient
        _, bd = multistart_minimize(params, strip_grid, w1_p3)
        assert bd.quotient <= c_grid * (1.0 + 1e-10)


def test_multistart_below_transition_stays_trivial(w1_p3, strip_grid):
    params = ProblemParams(N=2, p=3.0, L=1.5)
    field, bd = multistart_minimize(params, strip_grid, w1_p3)
    triv = extend_trivial_to_strip(w1_p3, params, strip_grid)
    c_grid = energy_breakdown(triv, params).quotient
    # the extension is interpolated from the fine radial grid, so it is not
    # exactly the discrete fixed point; the minimizer relaxes slightly below
    assert abs(bd.quotient - c_grid) < 1e-5 * c_grid
    assert field.transverse_derivative_norm() < 1e-5


def test_quotient_refines_at_second_order(w1_p3):
    # trivial regime: the minimizer is t-constant, so the discretization
    # error in the quotient is purely radial, O(h^2)
    cstar = trivial_branch_energy(P3, w1_p3).cstar_at(1.0)
    errs = []
    for h in (0.1, 0.05):
        grid = StripGrid(radial=RadialGrid(d=1, r_max=25.0, h=h), m=17)
        init = extend_trivial_to_strip(w1_p3, P3, grid)
        _, bd = minimize_quotient(P3, grid, init)
        errs.append(abs(bd.quotient - cstar))
    assert 3.0 < errs[0] / errs[1] < 5.0


def test_converged_minimizer_satisfies_discrete_neumann(minimizer_L25):
    field, _ = minimizer_L25
    dt = field.grid.dt
    u = field.values
    scale = np.max(np.abs(u))
    for edge in ((u[:, 1] - u[:, 0]), (u[:, -1] - u[:, -2])):
        assert np.max(np.abs(edge)) < 20.0 * dt ** 2 * scale
    # radial far edge is exponentially small instead
    assert np.max(np.abs(u[-1])) < 1e-6 * scale


def test_el_residual_large_for_generic_field(strip_grid):
    rng = np.random.default_rng(3)
    u = StripField(grid=strip_grid,
                   values=np.abs(rng.normal(1.0, 0.2, (strip_grid.radial.n, strip_grid.m))))
    assert el_residual(u, ProblemParams(N=2, p=3.0, L=2.5)) > 1.0


def test_zero_init_rejected(strip_grid):
    zero = StripField(grid=strip_grid,
                      values=np.zeros((strip_grid.radial.n, strip_grid.m)))
    with pytest.raises(ValueError):
        minimize_quotient(P3, strip_grid, zero)


def test_negative_init_clamped_with_warning(w1_p3, strip_grid):
    init = extend_trivial_to_strip(w1_p3, P3, strip_grid)
    vals = init.values.copy()
    vals[5, 5] = -0.3
    with pytest.warns(RuntimeWarning):
        _, bd = minimize_quotient(P3, strip_grid, StripField(grid=strip_grid, values=vals))
    assert bd.el_residual < 1e-8


def test_stall_reports_best_iterate(w1_p3, strip_grid):
    init = extend_trivial_to_strip(w1_p3, P3, strip_grid)
    with pytest.raises(Stalled) as exc_info:
        minimize_quotient(P3, strip_grid, init, SolveOptions(max_iter=3))
    err = exc_info.value
    assert err.field is not None
    assert err.breakdown.el_residual > 1e-8
    assert abs(err.breakdown.quotient - 2.3094) < 0.01


def test_init_on_wrong_grid_rejected(w1_p3, strip_grid):
    other = StripGrid(radial=RadialGrid(d=1, r_max=25.0, h=0.05), m=32)
    init = extend_trivial_to_strip(w1_p3, P3, other)
    with pytest.raises(GridMismatch):
        minimize_quotient(P3, strip_grid, init)


# ---------------------------------------------------------------------------
# stability form at minimizers
# ---------------------------------------------------------------------------

def test_stability_form_nonnegative_at_minimizers(minimizer_L1, minimizer_L25, strip_grid):
    rng = np.random.default_rng(11)
    for field, bd in (minimizer_L1[:2], minimizer_L25):
        L = 1.0 if field is minimizer_L1[0] else 2.5
        params = ProblemParams(N=2, p=3.0, L=L)
        for _ in range(20):
            phi = StripField(grid=strip_grid,
                             values=smooth_random_field(strip_grid, rng) - 0.1)
            scale = dirichlet_energy(phi.values, strip_grid) \
                + strip_grid.integrate(phi.values ** 2)
            assert stability_form(field, phi, params) >= -1e-6 * scale


# ---------------------------------------------------------------------------
# symmetry-breaking measure
# ---------------------------------------------------------------------------

def test_symmetry_measure_vanishes_on_trivial(w1_p3, strip_grid):
    params = ProblemParams(N=2, p=3.0, L=1.0)
    triv = extend_trivial_to_strip(w1_p3, params, strip_grid)
    mode = StripField(grid=strip_grid, values=np.broadcast_to(
        np.cos(np.pi * strip_grid.t)[None, :] * np.exp(-strip_grid.radial.r[:, None]),
        triv.values.shape).copy())
    delta, s = symmetry_breaking_measure(triv, triv, mode)
    assert delta == 0.0
    assert s == 0.0


def test_symmetry_measure_sees_broken_state(minimizer_L25, w1_p3, strip_grid):
    field, _ = minimizer_L25
    params = ProblemParams(N=2, p=3.0, L=2.5)
    triv = extend_trivial_to_strip(w1_p3, params, strip_grid)
    mode_vals = np.cos(np.pi * strip_grid.t)[None, :] \
        * np.exp(-strip_grid.radial.r[:, None]) * np.ones_like(field.values)
    mode_vals /= strip_grid.norm(mode_vals)
    delta, s = symmetry_breaking_measure(field, triv, StripField(grid=strip_grid, values=mode_vals))
    assert abs(delta) > 1e-2
    assert s > 0.1


def test_symmetry_measure_grid_mismatch(minimizer_L25, w1_p3):
    field, _ = minimizer_L25
    other = StripGrid(radial=RadialGrid(d=1, r_max=25.0, h=0.05), m=32)
    params = ProblemParams(N=2, p=3.0, L=2.5)
    triv = extend_trivial_to_strip(w1_p3, params, other)
    with pytest.raises(GridMismatch):
        symmetry_breaking_measure(field, triv, triv)


# ---------------------------------------------------------------------------
# rearrangement
# ---------------------------------------------------------------------------

@pytest.fixture()
def small_grid():
    return StripGrid(radial=RadialGrid(d=1, r_max=10.0, h=0.05), m=32)


def test_rearrange_fixes_monotone_field(small_grid):
    vals = np.exp(-small_grid.radial.r[:, None]) * (2.0 - small_grid.t[None, :])
    u = StripField(grid=small_grid, values=vals)
    assert np.array_equal(rearrange_monotone(u).values, vals)


def test_rearrange_flips_reversed_profile(small_grid):
    vals = np.exp(-small_grid.radial.r[:, None]) * (2.0 - small_grid.t[None, :])
    rev = StripField(grid=small_grid, values=vals[:, ::-1].copy())
    out = rearrange_monotone(rev)
    assert np.array_equal(out.values, vals)
    # measure preservation in t makes the flip energy-exact
    params = ProblemParams(N=2, p=3.0, L=1.3)
    a = energy_breakdown(rev, params)
    b = energy_breakdown(out, params)
    assert abs(a.denom - b.denom) < 1e-12 * a.denom
    assert abs(a.mass_term - b.mass_term) < 1e-12 * a.mass_term
    assert abs(a.grad_term - b.grad_term) < 1e-12 * a.grad_term


def test_rearrange_never_raises_quotient(small_grid):
    params = ProblemParams(N=2, p=3.0, L=1.3)
    rng = np.random.default_rng(7)
    for _ in range(10):
        u = StripField(grid=small_grid, values=smooth_random_field(small_grid, rng))
        q0 = energy_breakdown(u, params).quotient
        q1 = energy_breakdown(rearrange_monotone(u), params).quotient
        assert q1 <= q0 * (1.0 + 1e-12)


def test_rearrange_output_is_bimonotone(small_grid):
    rng = np.random.default_rng(19)
    u = StripField(grid=small_grid, values=smooth_random_field(small_grid, rng))
    out = rearrange_monotone(u).values
    assert np.all(np.diff(out, axis=0) <= 1e-14)
    assert np.all(np.diff(out, axis=1) <= 1e-14)


def test_rearrange_rejects_negative_field(small_grid):
    vals = -np.ones((small_grid.radial.n, small_grid.m))
    with pytest.raises(ValueError):
        rearrange_monotone(StripField(grid=small_grid, values=vals))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-2.0, 2.0), min_size=4, max_size=4),
       st.integers(0, 2 ** 31 - 1))
def test_rearrange_is_idempotent(coeffs, seed):
    grid = StripGrid(radial=RadialGrid(d=1, r_max=5.0, h=0.25), m=9)
    r = grid.radial.r[:, None] / grid.radial.r_max
    t = grid.t[None, :]
    vals = np.abs(coeffs[0] + coeffs[1] * np.cos(np.pi * r)
                  + coeffs[2] * np.cos(np.pi * t)
                  + coeffs[3] * np.cos(np.pi * r) * np.cos(2 * np.pi * t)) + 0.01
    once = rearrange_monotone(StripField(grid=grid, values=vals))
    twice = rearrange_monotone(once)
    assert np.array_equal(once.values, twice.values)


# ---------------------------------------------------------------------------
# formulation rescaling
# ---------------------------------------------------------------------------

def test_rescale_round_trip_is_exact(small_grid):
    rng = np.random.default_rng(5)
    u = StripField(grid=small_grid, values=smooth_random_field(small_grid, rng))
    params = ProblemParams(N=2, p=3.0, L=2.2)
    v = rescale_between_formulations(u, params, "to_physical")
    assert abs(v.grid.t_extent - params.L) < 1e-14
    w = rescale_between_formulations(v, params, "to_unit")
    assert w.grid.compatible(u.grid)
    assert np.max(np.abs(w.values - u.values)) < 1e-10


def test_rescale_residual_bookkeeping(small_grid):
    # pointwise the two residuals are proportional with the exact factor
    # L^(-2/(p-1)) * L^(N/2) / L^2 coming from amplitude and volume scaling
    rng = np.random.default_rng(6)
    u = StripField(grid=small_grid, values=smooth_random_field(small_grid, rng))
    params = ProblemParams(N=2, p=3.0, L=2.2)
    v = rescale_between_formulations(u, params, "to_physical")
    r_unit = el_residual(u, params)
    r_phys = el_residual(v, ProblemParams(N=2, p=3.0, L=1.0))
    factor = params.L ** (-2.0 / (params.p - 1.0) + params.N / 2.0 - 2.0)
    assert abs(r_phys - factor * r_unit) < 1e-10 * r_unit


def test_rescale_direction_validation(small_grid):
    rng = np.random.default_rng(8)
    u = StripField(grid=small_grid, values=smooth_random_field(small_grid, rng))
    params = ProblemParams(N=2, p=3.0, L=2.2)
    with pytest.raises(ValueError):
        rescale_between_formulations(u, params, "sideways")
    with pytest.raises(RangeMismatch):
        rescale_between_formulations(u, params, "to_unit")
    v = rescale_between_formulations(u, params, "to_physical")
    with pytest.raises(RangeMismatch):
        rescale_between_formulations(v, params, "to_physical")


# ---------------------------------------------------------------------------
# large-L asymptote
# ---------------------------------------------------------------------------

def test_large_L_asymptote_matches_two_resolutions(w2_p3):
    params = ProblemParams(N=2, p=3.0, L=12.0)
    a = large_L_asymptote(params, w2_p3)
    # step halving: quadrature error is O(h^2), so 0.02 agrees to ~4e-5
    coarse = shoot_ground_state(2, 3.0, RadialGrid(d=2, r_max=25.0, h=0.02))
    assert abs(a - large_L_asymptote(params, coarse)) < 1e-3 * a
    # domain truncation is absorbed by the tail patch almost exactly
    short = shoot_ground_state(2, 3.0, RadialGrid(d=2, r_max=8.0, h=0.01))
    assert abs(a - large_L_asymptote(params, short)) < 1e-6 * a


def test_large_L_asymptote_flags_short_grid():
    w = shoot_ground_state(2, 3.0, RadialGrid(d=2, r_max=4.0, h=0.01))
    with pytest.raises(QuadratureTailLoss):
        large_L_asymptote(ProblemParams(N=2, p=3.0, L=12.0), w)


def test_large_L_asymptote_needs_full_dimension(w1_p3):
    with pytest.raises(RangeMismatch):
        large_L_asymptote(ProblemParams(N=2, p=3.0, L=12.0), w1_p3)

"""Ground-state shooting, the 1-D closed form, and the trivial branch.

The closed form is the anchor: it is verified *symbolically* against the ODE
(the one place sympy earns its keep), and everything numerical is then held
against it. Quadrature oracles use scipy.quad so the trapezoid/cell-weight
path in the package is checked by an independent integrator.
"""

import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.integrate import quad

from stripmin import (
    GridTooCoarse,
    ProblemParams,
    QuadratureTailLoss,
    RadialGrid,
    RangeMismatch,
    StripGrid,
    Supercritical,
    closed_form_1d,
    extend_trivial_to_strip,
    shoot_ground_state,
    shooting_classification,
    trivial_branch_energy,
)
from stripmin.operators import dirichlet_energy


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 4, sympy.Rational(7, 2)])
def test_closed_form_satisfies_ode_symbolically(p):
    x = sympy.symbols("x", real=True)
    w = ((p + 1) / sympy.Integer(2)) ** (sympy.Integer(1) / (p - 1)) \
        * sympy.cosh((p - 1) * x / 2) ** (-sympy.Integer(2) / (p - 1))
    residual = sympy.diff(w, x, 2) - w + w ** p
    assert sympy.simplify(residual) == 0


@pytest.mark.parametrize("p,expected", [(2.0, 1.5), (3.0, math.sqrt(2.0)),
                                        (4.0, 2.5 ** (1.0 / 3.0))])
def test_closed_form_amplitude(p, expected):
    assert_allclose(closed_form_1d(p, 0.0), expected, rtol=1e-15)


def test_quadrature_oracle_p3():
    # int_R ((sqrt2 sech x)^4) dx = 16/3; both quad and the closed form agree
    val, err = quad(lambda x: closed_form_1d(3.0, x) ** 4, -40, 40)
    assert err < 1e-6
    assert_allclose(val, 16.0 / 3.0, rtol=1e-10)


# ---------------------------------------------------------------------------
# shooting
# ---------------------------------------------------------------------------

def test_amplitude_p3_matches_closed_form(w1_p3):
    assert_allclose(w1_p3.amplitude, math.sqrt(2.0), atol=1e-6)


def test_amplitude_p2_is_three_halves(w1_p2):
    assert_allclose(w1_p2.amplitude, 1.5, atol=1e-6)


def test_profile_matches_closed_form_supnorm(w1_p3):
    exact = closed_form_1d(3.0, w1_p3.grid.r)
    assert np.max(np.abs(w1_p3.values - exact)) < 1e-6


def test_profile_invariants(w1_p3):
    w = w1_p3.values
    assert np.all(w > 0.0)
    live = w > 1e-10
    assert np.all(np.diff(w)[live[:-1]] < 0.0)
    # Neumann at the axis: first difference is O(h^2)
    assert abs(w[1] - w[0]) < 5.0 * w1_p3.grid.h ** 2
    assert w1_p3.decay_ok


def test_shooting_amplitude_is_monotone_separating(w1_p3, radial_grid_1d):
    a = w1_p3.amplitude
    for k in range(1, 6):
        assert shooting_classification(1, 3.0, a + k * 1e-3, radial_grid_1d) == 1
        assert shooting_classification(1, 3.0, a - k * 1e-3, radial_grid_1d) == -1


def test_amplitude_converges_at_least_second_order():
    # halving h shrinks successive amplitude changes by at least 4 (the RK4
    # march is actually fourth order, ratios ~16; the bound asserts the
    # worst order any downstream tolerance relies on)
    amps = [shoot_ground_state(1, 3.0, RadialGrid(d=1, r_max=25.0, h=h)).amplitude
            for h in (0.08, 0.04, 0.02, 0.01)]
    d1, d2, d3 = (abs(amps[k] - amps[k + 1]) for k in range(3))
    assert d1 / d2 > 3.5
    assert d2 / d3 > 3.5


def test_two_dimensional_amplitude(w2_p3):
    # two-resolution agreement pins the d=2, p=3 amplitude near 2.206
    finer = shoot_ground_state(2, 3.0, RadialGrid(d=2, r_max=25.0, h=0.005))
    assert abs(w2_p3.amplitude - finer.amplitude) < 1e-4
    assert_allclose(w2_p3.amplitude, 2.206, atol=2e-3)


def test_supercritical_rejected():
    with pytest.raises(Supercritical):
        shoot_ground_state(3, 6.0, RadialGrid(d=3, r_max=25.0, h=0.01))
    with pytest.raises(Supercritical):  # equality is also out
        shoot_ground_state(3, 5.0, RadialGrid(d=3, r_max=25.0, h=0.01))


def test_grid_too_coarse():
    with pytest.raises(GridTooCoarse):
        shoot_ground_state(1, 3.0, RadialGrid(d=1, r_max=25.0, h=0.5))


def test_interpolation_and_tail_extrapolation(w1_p3):
    # inside the grid: linear interpolation error O(h^2)
    r_mid = np.array([0.005, 1.234, 7.7777])
    assert_allclose(w1_p3(r_mid), closed_form_1d(3.0, r_mid), atol=1e-4)
    # beyond r_max the exponential tail takes over; relative accuracy there is
    # absolute integration error (~1e-8) divided by the patch value (~1e-5)
    assert_allclose(w1_p3(30.0), closed_form_1d(3.0, 30.0), rtol=1e-3)


# ---------------------------------------------------------------------------
# trivial branch
# ---------------------------------------------------------------------------

def test_gamma0_n2_p3(w1_p3):
    branch = trivial_branch_energy(ProblemParams(N=2, p=3.0, L=1.0), w1_p3)
    assert_allclose(branch.gamma0, math.sqrt(16.0 / 3.0), rtol=1e-8)
    assert branch.exponent == 1.5


def test_gamma0_against_quad_oracle(w1_p2):
    val, _ = quad(lambda x: closed_form_1d(2.0, x) ** 3, -40, 40)
    branch = trivial_branch_energy(ProblemParams(N=2, p=2.0, L=1.0), w1_p2)
    assert_allclose(branch.gamma0, val ** (1.0 / 3.0), rtol=1e-7)


def test_cstar_reproduces_pair_exactly(w1_p3):
    branch = trivial_branch_energy(ProblemParams(N=2, p=3.0, L=1.0), w1_p3)
    rng = np.random.default_rng(7)
    for L in rng.uniform(0.1, 10.0, size=10):
        assert branch.cstar_at(L) == branch.gamma0 * L ** branch.exponent


@given(L=st.floats(min_value=0.05, max_value=20.0))
@settings(max_examples=25, deadline=None)
def test_cstar_power_law_scaling(L):
    # fixed synthetic branch: the law itself, not the quadrature
    from stripmin.radial import TrivialBranch
    branch = TrivialBranch(gamma0=2.3094010767585034, exponent=1.5)
    assert math.isclose(branch.cstar_at(2.0 * L) / branch.cstar_at(L),
                        2.0 ** branch.exponent, rel_tol=1e-12)


def test_tail_loss_detected():
    w_short = shoot_ground_state(1, 3.0, RadialGrid(d=1, r_max=5.0, h=0.01))
    with pytest.raises(QuadratureTailLoss):
        trivial_branch_energy(ProblemParams(N=2, p=3.0, L=1.0), w_short)


# ---------------------------------------------------------------------------
# extension to the strip
# ---------------------------------------------------------------------------

def test_extension_at_unit_l_is_identity(w1_p3):
    params = ProblemParams(N=2, p=3.0, L=1.0)
    sgrid = StripGrid(radial=w1_p3.grid, m=16)
    field = extend_trivial_to_strip(w1_p3, params, sgrid)
    for j in range(sgrid.m):
        assert_allclose(field.values[:, j], w1_p3.values, rtol=0, atol=0)


def test_extension_is_transverse_constant(w1_p3):
    params = ProblemParams(N=2, p=3.0, L=1.5)
    sgrid = StripGrid(radial=RadialGrid(d=1, r_max=16.0, h=0.05), m=24)
    field = extend_trivial_to_strip(w1_p3, params, sgrid)
    assert field.transverse_derivative_norm() == 0.0


def test_extension_quotient_matches_cstar(w1_p3):
    # Rayleigh quotient of the extended trivial field reproduces gamma0 L^e
    params = ProblemParams(N=2, p=3.0, L=1.25)
    branch = trivial_branch_energy(params, w1_p3)
    sgrid = StripGrid(radial=RadialGrid(d=1, r_max=20.0, h=0.02), m=32)
    u = extend_trivial_to_strip(w1_p3, params, sgrid).values
    num = dirichlet_energy(u, sgrid) + params.L ** 2 * sgrid.integrate(u * u)
    den = sgrid.integrate(u ** (params.p + 1.0)) ** (2.0 / (params.p + 1.0))
    assert_allclose(num / den, branch.cstar_at(params.L), rtol=2e-4)


def test_extension_range_checks(w1_p3):
    # far beyond the tail-extrapolation range
    with pytest.raises(RangeMismatch):
        extend_trivial_to_strip(w1_p3, ProblemParams(N=2, p=3.0, L=12.0),
                                StripGrid(radial=RadialGrid(d=1, r_max=25.0, h=0.05), m=16))
    # unconverged tail and a grid that needs it
    w_short = shoot_ground_state(1, 3.0, RadialGrid(d=1, r_max=5.0, h=0.01))
    with pytest.raises(RangeMismatch):
        extend_trivial_to_strip(w_short, ProblemParams(N=2, p=3.0, L=1.5),
                                StripGrid(radial=RadialGrid(d=1, r_max=25.0, h=0.05), m=16))


# ---------------------------------------------------------------------------
# closed-form properties
# ---------------------------------------------------------------------------

@given(x=st.floats(min_value=-50.0, max_value=50.0),
       p=st.sampled_from([2.0, 2.5, 3.0, 4.0]))
@settings(max_examples=60, deadline=None)
def test_closed_form_even_and_peaked(x, p):
    amp = ((p + 1.0) / 2.0) ** (1.0 / (p - 1.0))
    assert math.isclose(closed_form_1d(p, x), closed_form_1d(p, -x), rel_tol=1e-13)
    assert closed_form_1d(p, x) <= amp + 1e-15


def test_closed_form_decay_rate():
    # w(x) e^{x} -> 2 sqrt(2) as x -> inf for p = 3
    for x in (18.0, 24.0, 30.0):
        assert_allclose(closed_form_1d(3.0, x) * math.exp(x), 2.0 * math.sqrt(2.0),
                        rtol=1e-12)

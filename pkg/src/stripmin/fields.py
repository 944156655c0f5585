"""Value containers: radial profiles, strip fields, energy breakdowns."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import GridMismatch
from .grids import RadialGrid, StripGrid

__all__ = ["RadialProfile", "StripField", "EnergyBreakdown"]


@dataclass(frozen=True)
class RadialProfile:
    """A function of the radial variable on a :class:`RadialGrid`.

    Ground states store the shooting solution of ``w'' + (d-1)/r w' - w + w^p = 0``;
    the same container also carries radial eigenfunctions, which do not satisfy
    the ground-state monotonicity invariants (``validated`` is False for them).

    Attributes
    ----------
    grid : RadialGrid
    values : ndarray, shape (grid.n,)
    amplitude : float
        Value at r = 0.
    decay_ok : bool
        True when the stored tail is below the tail tolerance it was built with.
    p : float or None
        Nonlinearity exponent the profile was computed for (ground states).
    """

    grid: RadialGrid
    values: np.ndarray
    amplitude: float
    decay_ok: bool
    p: float | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise GridMismatch(
                f"profile has {v.shape} values for a grid of {self.grid.n} nodes"
            )
        object.__setattr__(self, "values", v)

    def __call__(self, r):
        """Evaluate at arbitrary radii: linear interpolation inside the grid,
        asymptotic tail ``w(r_max) (r/r_max)^{-(d-1)/2} e^{-(r - r_max)}`` beyond."""
        r = np.asarray(r, dtype=float)
        inside = np.interp(r, self.grid.r, self.values)
        r_end = self.grid.r_max
        w_end = self.values[-1]
        with np.errstate(over="ignore"):
            tail = w_end * (np.maximum(r, r_end) / r_end) ** (-(self.grid.d - 1) / 2.0) \
                * np.exp(-(np.maximum(r, r_end) - r_end))
        return np.where(r <= r_end, inside, tail)

    def integrate_power(self, q: float) -> float:
        """``int_{R^d} w^q`` by the grid's finite-volume quadrature."""
        return self.grid.integrate(self.values ** q)

    def tail_estimate_power(self, q: float) -> float:
        """Estimated contribution of ``int w^q`` beyond r_max (exponential tail)."""
        w_end = float(self.values[-1])
        if w_end <= 0.0:
            return 0.0
        # w ~ w_end * e^{-(r - r_max)} up to algebraic factors; integrate r^{d-1} e^{-q s}
        return self.grid.omega * (w_end ** q) * self.grid.r_max ** (self.grid.d - 1) / q

    def to_json_record(self) -> dict:
        return {
            "d": self.grid.d,
            "p": self.p,
            "h": self.grid.h,
            "r_max": self.grid.r_max,
            "amplitude": self.amplitude,
            "decay_ok": self.decay_ok,
            "values": self.values.tolist(),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("r,w\n")
        for r, w in zip(self.grid.r, self.values):
            buf.write(f"{r:.17g},{w:.17g}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class StripField:
    """A discretized axisymmetric function ``u(r_i, t_j)`` on a :class:`StripGrid`."""

    grid: StripGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.radial.n, self.grid.m):
            raise GridMismatch(
                f"field shape {v.shape} does not match grid "
                f"({self.grid.radial.n}, {self.grid.m})"
            )
        object.__setattr__(self, "values", v)

    @property
    def nonnegative(self) -> bool:
        return bool(np.all(self.values >= 0.0))

    def norm(self) -> float:
        return self.grid.norm(self.values)

    def transverse_derivative_norm(self) -> float:
        """Discrete L2 norm of du/dt (edge-sum quadrature, consistent with the
        Dirichlet energy used everywhere else)."""
        g = self.grid
        du = np.diff(self.values, axis=1) / g.dt
        w_r = g.radial.omega * g.radial.weights
        return math.sqrt(max(float(np.einsum("i,ij->", w_r, du * du) * g.dt), 0.0))

    def to_csv(self) -> str:
        g = self.grid
        buf = io.StringIO()
        buf.write("r,t,u\n")
        r, t = g.radial.r, g.t
        for i in range(g.radial.n):
            for j in range(g.m):
                buf.write(f"{r[i]:.17g},{t[j]:.17g},{self.values[i, j]:.17g}\n")
        return buf.getvalue()

    def to_json_record(self) -> dict:
        g = self.grid
        return {
            "d": g.radial.d,
            "h": g.radial.h,
            "r_max": g.radial.r_max,
            "m": g.m,
            "t_extent": g.t_extent,
            "values": self.values.tolist(),
        }


@dataclass(frozen=True)
class EnergyBreakdown:
    """Rayleigh-quotient bookkeeping for a strip field.

    quotient = (grad_term + mass_term) / denom^{2/(p+1)} exactly as computed;
    ``mu`` is the Euler-Lagrange multiplier fitted to minimize the residual
    ``|Delta u - L^2 u + mu u^p|`` (equals 1 for a solution-normalized field),
    ``el_residual`` that minimal residual norm.
    """

    grad_term: float
    mass_term: float
    denom: float
    quotient: float
    el_residual: float
    mu: float

    def __post_init__(self):
        if not (self.quotient > 0.0):
            raise ValueError(f"quotient must be positive, got {self.quotient!r}")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

"""Problem parameters and discretization grids.

The computational domain is the axisymmetric reduction of the strip
``R^{N-1} x (0, 1)``: a radial coordinate ``r >= 0`` (dimension ``d = N - 1``)
times a transverse coordinate ``t in [0, 1]``. All integrals over ``R^d``
carry the surface-measure weight ``omega_d * r^{d-1}``, discretized with
finite-volume cell weights so that the discrete Laplacians defined in
:mod:`stripmin.operators` are exactly self-adjoint with respect to the same
discrete measure used for quadrature. That exactness is load-bearing: the
monotone-descent proof for the quotient iteration and the sign guarantees of
the stability form both rely on operator/quadrature consistency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadConfig

__all__ = [
    "ProblemParams",
    "RadialGrid",
    "StripGrid",
    "surface_area",
]


def surface_area(d: int) -> float:
    """Surface area of the unit sphere in ``R^d`` (omega_1 = 2, omega_2 = 2*pi...)."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


@dataclass(frozen=True)
class ProblemParams:
    """Dimension, nonlinearity exponent and strip parameter.

    Parameters
    ----------
    N : int
        Space dimension of the strip problem, ``N >= 2``.
    p : float
        Nonlinearity exponent, ``p > 1``. For ``N >= 3`` the subcritical
        range is ``p < (N+2)/(N-2)``; equality flags the critical regime.
    L : float
        Strip parameter, ``L > 0``.
    """

    N: int
    p: float
    L: float

    def __post_init__(self):
        if not (isinstance(self.N, (int, np.integer)) and self.N >= 2):
            raise BadConfig(f"problem.N: integer >= 2 required, got {self.N!r}")
        if not (self.p > 1.0):
            raise BadConfig(f"problem.p: exponent > 1 required, got {self.p!r}")
        if not (self.L > 0.0):
            raise BadConfig(f"problem.L: positive strip parameter required, got {self.L!r}")
        if self.N >= 3 and self.p > (self.N + 2.0) / (self.N - 2.0) + 1e-12:
            raise BadConfig(
                f"problem.p: p = {self.p} exceeds the critical exponent "
                f"(N+2)/(N-2) = {(self.N + 2.0) / (self.N - 2.0)} for N = {self.N}"
            )

    @property
    def d(self) -> int:
        """Radial dimension of the cross-section, ``d = N - 1``."""
        return self.N - 1

    @property
    def critical(self) -> bool:
        """True when p equals the critical exponent (N >= 3 only)."""
        if self.N < 3:
            return False
        return abs(self.p - (self.N + 2.0) / (self.N - 2.0)) <= 1e-12


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid ``r_i = i*h`` on ``[0, r_max]`` in dimension d.

    ``weights`` are finite-volume cell measures ``(r_{i+1/2}^d - r_{i-1/2}^d)/d``
    (without the ``omega_d`` factor); for ``d = 1`` they reduce to trapezoid
    weights. ``face_areas[i] = r_{i+1/2}^{d-1}`` are the conductances of the
    cell faces between nodes ``i`` and ``i+1``.
    """

    d: int
    r_max: float
    h: float
    n: int = field(default=0)

    def __post_init__(self):
        if self.d < 1:
            raise BadConfig(f"radial.d: dimension >= 1 required, got {self.d!r}")
        if not (self.h > 0.0 and self.r_max > 0.0):
            raise BadConfig("radial grid: h and r_max must be positive")
        n = int(round(self.r_max / self.h)) + 1
        if n < 4:
            raise BadConfig("radial grid: fewer than 4 nodes")
        object.__setattr__(self, "n", n)
        # keep r_max = (n-1)*h exactly
        object.__setattr__(self, "r_max", (n - 1) * self.h)

    @property
    def r(self) -> np.ndarray:
        return np.arange(self.n) * self.h

    @property
    def weights(self) -> np.ndarray:
        half = (np.arange(self.n + 1) - 0.5) * self.h
        half[0] = 0.0
        half[-1] = self.r_max
        return (half[1:] ** self.d - half[:-1] ** self.d) / self.d

    @property
    def face_areas(self) -> np.ndarray:
        return ((np.arange(self.n - 1) + 0.5) * self.h) ** (self.d - 1)

    @property
    def omega(self) -> float:
        return surface_area(self.d)

    def integrate(self, values: np.ndarray) -> float:
        """Integral of a radial function over ``R^d`` (surface factor included)."""
        return float(self.omega * np.dot(self.weights, values))


@dataclass(frozen=True)
class StripGrid:
    """Tensor grid for axisymmetric strip fields ``u(r_i, t_j)``.

    ``t_j = j/(m-1)`` spans ``[0, 1]``. ``t_extent`` rescales the transverse
    interval to ``(0, t_extent)`` and exists only so the two formulations of
    the problem (unit strip with parameter L, physical strip of width L) can
    share one grid type; it is 1.0 everywhere except in fields produced by
    ``rescale_between_formulations``.
    """

    radial: RadialGrid
    m: int
    t_extent: float = 1.0

    def __post_init__(self):
        if self.m < 8:
            raise BadConfig(f"strip.m: at least 8 transverse nodes required, got {self.m!r}")
        if not (self.t_extent > 0.0):
            raise BadConfig("strip.t_extent must be positive")

    @property
    def dt(self) -> float:
        return self.t_extent / (self.m - 1)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, self.t_extent, self.m)

    @property
    def t_weights(self) -> np.ndarray:
        tau = np.full(self.m, self.dt)
        tau[0] = tau[-1] = 0.5 * self.dt
        return tau

    @property
    def cell_weights(self) -> np.ndarray:
        """Full 2-D quadrature weights, ``omega_d * W_i * tau_j``."""
        return self.radial.omega * np.outer(self.radial.weights, self.t_weights)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(self.cell_weights * values))

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.sum(self.cell_weights * a * b))

    def norm(self, values: np.ndarray) -> float:
        return math.sqrt(max(self.inner(values, values), 0.0))

    def compatible(self, other: "StripGrid") -> bool:
        return (
            self.radial.d == other.radial.d
            and self.radial.n == other.radial.n
            and abs(self.radial.h - other.radial.h) < 1e-14 * max(1.0, self.radial.h)
            and self.m == other.m
            and abs(self.t_extent - other.t_extent) < 1e-14
        )


def default_strip_grid(params: ProblemParams, h: float = 0.05, m: int = 64,
                       r_max: float | None = None) -> StripGrid:
    """Default strip grid policy: ``r_max = 25/min(1, L)`` capped at 60.

    The radial extent follows the decay scale of the trivial branch
    (``e^{-L r}``); for L >= 1 the default 25 keeps the stored tail below
    1e-10, for small L the domain grows accordingly.
    """
    if r_max is None:
        r_max = min(25.0 / min(1.0, params.L), 60.0)
    return StripGrid(radial=RadialGrid(d=params.d, r_max=r_max, h=h), m=m)

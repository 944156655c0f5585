"""Discrete operators on radial and strip grids.

Everything here is built around one consistency requirement: the discrete
negative Laplacian must satisfy the exact summation-by-parts identity

    <-Lap u, v>_Omega = sum over faces of conductance * (jump u)(jump v)

with respect to the *same* quadrature weights used for integrals. The radial
part is a finite-volume stencil with face conductances ``a_{i+1/2} = r_{i+1/2}^{d-1}``
(no-flux at the axis and at ``r_max``); the transverse part is the standard
three-point stencil with mirror (Neumann) ghosts at ``t = 0, 1``. Mirror
ghosts make the transverse operator exactly diagonal in the DCT-I basis
``cos(pi k t_j)``, which is what the fast Helmholtz solver exploits.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.fft
from scipy.linalg import lapack, solve_banded

from .errors import SolverFailure
from .grids import RadialGrid, StripGrid

__all__ = [
    "radial_tridiagonal",
    "symmetrized_tridiagonal",
    "radial_apply",
    "radial_solve",
    "transverse_eigenvalues",
    "neg_laplacian",
    "dirichlet_energy",
    "TridiagonalFactorization",
    "HelmholtzSolver",
]


# ---------------------------------------------------------------------------
# radial operator, one dimension
# ---------------------------------------------------------------------------

def _couplings(grid: RadialGrid) -> np.ndarray:
    """Face conductances beta_i = a_{i+1/2}/h coupling nodes i and i+1.

    With cell weights W the stencil ``(beta_{i-1}(u_i - u_{i-1}) -
    beta_i(u_{i+1} - u_i))/W_i`` is the finite-volume ``-Lap_r`` and satisfies
    ``<-Lap_r u, v>_W = sum_i beta_i (u_{i+1}-u_i)(v_{i+1}-v_i)`` exactly.
    """
    return grid.face_areas / grid.h


def radial_tridiagonal(grid: RadialGrid, potential) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rows of ``A = -Lap_r + diag(potential)`` as (dl, d, du).

    ``dl[i] = A[i+1, i]``, ``du[i] = A[i, i+1]`` (length n-1), ``d`` the diagonal.
    A is self-adjoint w.r.t. the cell weights W, not symmetric as a matrix;
    use :func:`symmetrized_tridiagonal` for symmetric eigensolvers.
    """
    beta = _couplings(grid)
    W = grid.weights
    n = grid.n
    diag = np.zeros(n)
    diag[:-1] += beta / W[:-1]
    diag[1:] += beta / W[1:]
    diag += np.broadcast_to(np.asarray(potential, dtype=float), (n,))
    du = -beta / W[:-1]
    dl = -beta / W[1:]
    return dl, diag, du


def symmetrized_tridiagonal(grid: RadialGrid, potential) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric form ``D^{1/2} A D^{-1/2}`` of the same operator, D = diag(W).

    Returns (diagonal, off-diagonal) for ``scipy.linalg.eigh_tridiagonal``.
    Eigenvectors v_sym map back to W-orthonormal node values via
    ``v = v_sym / sqrt(W)``.
    """
    beta = _couplings(grid)
    W = grid.weights
    _, diag, _ = radial_tridiagonal(grid, potential)
    off = -beta / np.sqrt(W[:-1] * W[1:])
    return diag, off


def radial_apply(dl: np.ndarray, diag: np.ndarray, du: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Tridiagonal matrix-vector product; v may be (n,) or (n, k)."""
    out = diag.reshape(-1, *([1] * (v.ndim - 1))) * v
    out[:-1] += du.reshape(-1, *([1] * (v.ndim - 1))) * v[1:]
    out[1:] += dl.reshape(-1, *([1] * (v.ndim - 1))) * v[:-1]
    return out


def radial_solve(dl: np.ndarray, diag: np.ndarray, du: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """One-shot tridiagonal solve (LAPACK banded storage under the hood)."""
    n = diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = du
    ab[1] = diag
    ab[2, :-1] = dl
    return solve_banded((1, 1), ab, rhs)


class TridiagonalFactorization:
    """Prefactored LU of a tridiagonal matrix (LAPACK gttrf/gttrs)."""

    def __init__(self, dl: np.ndarray, diag: np.ndarray, du: np.ndarray):
        dl_f, d_f, du_f, du2, ipiv, info = lapack.dgttrf(dl, diag, du)
        if info != 0:
            raise SolverFailure(f"tridiagonal factorization failed (info={info})")
        self._parts = (dl_f, d_f, du_f, du2, ipiv)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        x, info = lapack.dgttrs(*self._parts, rhs)
        if info != 0:
            raise SolverFailure(f"tridiagonal solve failed (info={info})")
        return x


# ---------------------------------------------------------------------------
# transverse operator and the full strip Laplacian
# ---------------------------------------------------------------------------

def transverse_eigenvalues(grid: StripGrid) -> np.ndarray:
    """Eigenvalues q_k >= 0 of the negative mirror-Neumann second difference.

    The DCT-I modes ``cos(pi k j/(m-1))`` satisfy ``-D2 c_k = q_k c_k`` with
    ``q_k = (2 - 2 cos(pi k/(m-1))) / dt^2``; q_1 approximates pi^2 from below.
    """
    m = grid.m
    k = np.arange(m)
    return (2.0 - 2.0 * np.cos(np.pi * k / (m - 1))) / grid.dt ** 2


def _transverse_second_difference(u: np.ndarray, dt: float) -> np.ndarray:
    """u_tt with mirror ghosts, along axis 1."""
    out = np.empty_like(u)
    out[:, 1:-1] = u[:, 2:] - 2.0 * u[:, 1:-1] + u[:, :-2]
    out[:, 0] = 2.0 * (u[:, 1] - u[:, 0])
    out[:, -1] = 2.0 * (u[:, -2] - u[:, -1])
    return out / dt ** 2


def neg_laplacian(u: np.ndarray, grid: StripGrid) -> np.ndarray:
    """Apply ``-Lap_h`` (radial + transverse) to a strip field's values."""
    beta = _couplings(grid.radial)
    W = grid.radial.weights
    out = np.zeros_like(u)
    flux = beta[:, None] * (u[1:] - u[:-1])
    out[:-1] -= flux
    out[1:] += flux
    out /= W[:, None]
    out -= _transverse_second_difference(u, grid.dt)
    return out


def dirichlet_energy(u: np.ndarray, grid: StripGrid) -> float:
    """``int |grad u|^2`` by the edge sum exactly equal to ``<-Lap u, u>_Omega``."""
    g = grid
    beta = _couplings(g.radial)
    tau = g.t_weights
    w_r = g.radial.weights
    dr = u[1:] - u[:-1]
    radial_part = float(np.einsum("i,ij,j->", beta, dr * dr, tau))
    dt_ = u[:, 1:] - u[:, :-1]
    transverse_part = float(np.einsum("i,ij->", w_r, dt_ * dt_)) / g.dt
    return g.radial.omega * (radial_part + transverse_part)


# ---------------------------------------------------------------------------
# fast direct solver for (-Lap + shift) u = f
# ---------------------------------------------------------------------------

class HelmholtzSolver:
    """Direct solver for ``(-Lap_h + shift) u = f`` on a strip grid.

    DCT-I along t decouples the transverse modes exactly; each mode k then
    requires one radial tridiagonal solve with diagonal shift ``shift + q_k``.
    All m factorizations are computed once at construction, so repeated
    solves (the inner step of the quotient-descent iteration) cost one DCT
    pair plus m short back-substitutions.
    """

    def __init__(self, grid: StripGrid, shift: float):
        if shift <= 0.0:
            raise SolverFailure(f"Helmholtz shift must be positive, got {shift}")
        self.grid = grid
        self.shift = float(shift)
        dl, diag, du = radial_tridiagonal(grid.radial, 0.0)
        self._factors = [
            TridiagonalFactorization(dl, diag + (self.shift + qk), du)
            for qk in transverse_eigenvalues(grid)
        ]

    def solve(self, f: np.ndarray) -> np.ndarray:
        fh = scipy.fft.dct(f, type=1, axis=1)
        uh = np.empty_like(fh)
        for k, fact in enumerate(self._factors):
            uh[:, k] = fact.solve(np.ascontiguousarray(fh[:, k]))
        return scipy.fft.idct(uh, type=1, axis=1)

    def apply(self, u: np.ndarray) -> np.ndarray:
        """The forward operator (for residual checks)."""
        return neg_laplacian(u, self.grid) + self.shift * u

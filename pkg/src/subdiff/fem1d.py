"""Piecewise-linear finite elements on uniform meshes of [0, 1].

Homogeneous Dirichlet boundaries are imposed by elimination: all
operators act on the interior degrees of freedom only, so a mesh with
``n`` elements carries ``n - 1`` unknowns.  Mass and stiffness matrices
are symmetric tridiagonal; element integrals use 3-point Gauss-Legendre
quadrature, which is exact for the polynomial degrees that appear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

__all__ = [
    "Mesh1D",
    "FEFunction",
    "TriDiagonalOperator",
    "AssemblyError",
    "NotSPDError",
    "make_mesh",
    "assemble_mass",
    "assemble_stiffness",
    "assemble_load",
    "solve_tridiag",
    "l2_project",
    "ritz_project",
    "fe_error_norms",
    "fe_error_vs_function",
]


class AssemblyError(ValueError):
    """A sampled coefficient or source value was not finite."""


class NotSPDError(np.linalg.LinAlgError):
    """Tridiagonal system is not symmetric positive definite."""


# 3-point Gauss-Legendre rule on the reference interval [0, 1].
_GX, _GW = np.polynomial.legendre.leggauss(3)
_GX = 0.5 * (_GX + 1.0)
_GW = 0.5 * _GW


@dataclass(frozen=True)
class Mesh1D:
    """Uniform mesh of [0, 1] with at least two elements."""

    n_elements: int
    nodes: np.ndarray
    h: float

    def __post_init__(self):
        if self.n_elements < 2:
            raise ValueError(
                f"mesh needs at least 2 elements, got {self.n_elements}"
            )

    @property
    def n_interior(self) -> int:
        return self.n_elements - 1

    def quad_points(self) -> np.ndarray:
        """Physical quadrature points, shape (n_elements, 3)."""
        return self.nodes[:-1, None] + self.h * _GX[None, :]

    def quad_weights(self) -> np.ndarray:
        """Physical quadrature weights, shape (3,)."""
        return self.h * _GW


def make_mesh(n_elements: int) -> Mesh1D:
    """Uniform mesh with ``n_elements`` elements on [0, 1]."""
    if n_elements < 2:
        raise ValueError(f"mesh needs at least 2 elements, got {n_elements}")
    nodes = np.linspace(0.0, 1.0, n_elements + 1)
    return Mesh1D(n_elements=n_elements, nodes=nodes, h=1.0 / n_elements)


@dataclass(frozen=True)
class FEFunction:
    """FE function given by its interior nodal coefficients.

    Boundary values are identically zero; ``coeffs`` has length
    ``mesh.n_elements - 1``.
    """

    mesh: Mesh1D
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (self.mesh.n_interior,):
            raise ValueError(
                f"expected {self.mesh.n_interior} interior coefficients, "
                f"got shape {self.coeffs.shape}"
            )

    def padded(self) -> np.ndarray:
        """Nodal values including the zero boundary nodes."""
        out = np.zeros(self.mesh.n_elements + 1)
        out[1:-1] = self.coeffs
        return out

    def __call__(self, x) -> np.ndarray:
        """Pointwise evaluation by linear interpolation."""
        return np.interp(x, self.mesh.nodes, self.padded())


@dataclass(frozen=True)
class TriDiagonalOperator:
    """Symmetric tridiagonal operator (main diagonal plus one band)."""

    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        if self.off.shape != (max(self.diag.shape[0] - 1, 0),):
            raise ValueError(
                f"off-diagonal length {self.off.shape[0]} does not match "
                f"dimension {self.diag.shape[0]}"
            )

    @property
    def dim(self) -> int:
        return self.diag.shape[0]

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        if self.dim > 1:
            y[:-1] += self.off * x[1:]
            y[1:] += self.off * x[:-1]
        return y

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        if self.dim > 1:
            a += np.diag(self.off, 1) + np.diag(self.off, -1)
        return a

    def norm_inf(self) -> float:
        return float(np.abs(self.to_dense()).sum(axis=1).max())


def _sample(func, x: np.ndarray, what: str) -> np.ndarray:
    """Evaluate a scalar function on an array, tolerating non-vectorized
    callables, and verify the samples are finite."""
    try:
        vals = np.asarray(func(x), dtype=float)
        if vals.shape != x.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.array([func(float(p)) for p in x.ravel()], dtype=float)
        vals = vals.reshape(x.shape)
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.isfinite(vals))[0]
        elem = int(bad[0]) if vals.ndim == 2 else int(bad[0])
        raise AssemblyError(
            f"non-finite {what} sample in element {elem} "
            f"(x={x[tuple(bad)]:.6g})"
        )
    return vals


def assemble_mass(mesh: Mesh1D) -> TriDiagonalOperator:
    """Interior mass matrix: diagonal 2h/3, off-diagonal h/6."""
    m = mesh.n_interior
    return TriDiagonalOperator(
        diag=np.full(m, 2.0 * mesh.h / 3.0),
        off=np.full(max(m - 1, 0), mesh.h / 6.0),
    )


def _element_diffusivity(mesh: Mesh1D, diffusivity, t: float) -> np.ndarray:
    """Integral of D(x, t) over each element by 3-point Gauss."""
    xq = mesh.quad_points()
    dq = _sample(lambda x: diffusivity(x, t), xq, "diffusivity")
    return dq @ mesh.quad_weights()


def assemble_stiffness(mesh: Mesh1D, diffusivity, t: float) -> TriDiagonalOperator:
    """Interior stiffness matrix for the form (D(., t) u', v').

    With hat-function gradients +-1/h, the entries reduce to element
    integrals of D: diag_i = (s_{i-1} + s_i)/h^2 and off_i = -s_i/h^2,
    where s_e is the 3-point Gauss integral of D over element e.  For
    D = 1 this gives the classical 2/h and -1/h entries exactly.
    """
    s = _element_diffusivity(mesh, diffusivity, t)
    h2 = mesh.h * mesh.h
    return TriDiagonalOperator(diag=(s[:-1] + s[1:]) / h2, off=-s[1:-1] / h2)


def _fold_load(mesh: Mesh1D, gq: np.ndarray) -> np.ndarray:
    """Reduce per-quadrature-point samples of g to (g, phi_i) for the
    interior hats; gq has shape (n_elements, 3)."""
    wq = mesh.quad_weights()
    left = gq @ (wq * (1.0 - _GX))
    right = gq @ (wq * _GX)
    return right[:-1] + left[1:]


def assemble_load(mesh: Mesh1D, source) -> np.ndarray:
    """Load vector (g, phi_i) over the interior hat functions."""
    gq = _sample(source, mesh.quad_points(), "source")
    return _fold_load(mesh, gq)


def solve_tridiag(op: TriDiagonalOperator, rhs: np.ndarray) -> np.ndarray:
    """Solve the SPD tridiagonal system op @ x = rhs.

    Backed by LAPACK's banded Cholesky; a zero or negative pivot raises
    NotSPDError.  The residual satisfies
    ||op x - rhs||_inf <= 1e-12 (||op||_inf ||x||_inf + ||rhs||_inf).
    """
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (op.dim,):
        raise ValueError(f"rhs shape {rhs.shape} does not match dim {op.dim}")
    if op.dim == 1:
        if op.diag[0] <= 0.0:
            raise NotSPDError(f"non-positive pivot {op.diag[0]}")
        return rhs / op.diag[0]
    ab = np.empty((2, op.dim))
    ab[0, 0] = 0.0
    ab[0, 1:] = op.off
    ab[1] = op.diag
    try:
        return solveh_banded(ab, rhs, lower=False)
    except np.linalg.LinAlgError as exc:
        raise NotSPDError(f"tridiagonal system is not SPD: {exc}") from exc


def l2_project(mesh: Mesh1D, v) -> FEFunction:
    """L2-orthogonal projection of v onto the interior FE space."""
    mass = assemble_mass(mesh)
    coeffs = solve_tridiag(mass, assemble_load(mesh, v))
    return FEFunction(mesh=mesh, coeffs=coeffs)


def ritz_project(mesh: Mesh1D, diffusivity, t: float, v, dv) -> FEFunction:
    """Ritz projection of v with respect to the form (D(., t) u', w').

    ``dv`` must evaluate v'; the projection satisfies the Galerkin
    orthogonality (D (v - R_h v)', chi') = 0 for every hat chi.
    """
    xq = mesh.quad_points()
    dq = _sample(lambda x: diffusivity(x, t), xq, "diffusivity")
    dvq = _sample(dv, xq, "derivative")
    flux = (dq * dvq) @ mesh.quad_weights()
    rhs = (flux[:-1] - flux[1:]) / mesh.h
    stiff = assemble_stiffness(mesh, diffusivity, t)
    return FEFunction(mesh=mesh, coeffs=solve_tridiag(stiff, rhs))


def _check_nested(coarse: Mesh1D, fine: Mesh1D) -> int:
    ratio, rem = divmod(fine.n_elements, coarse.n_elements)
    if rem or ratio < 1:
        raise ValueError(
            f"meshes are not nested: {fine.n_elements} elements is not a "
            f"multiple of {coarse.n_elements}"
        )
    return ratio


def fe_error_norms(f_coarse: FEFunction, f_fine: FEFunction) -> tuple[float, float]:
    """(L2, H1-seminorm) of the difference of two nested FE functions.

    Both are evaluated at the 3-point Gauss nodes of the finer mesh,
    where the integrands are piecewise quadratic and hence integrated
    exactly.
    """
    coarse, fine = f_coarse.mesh, f_fine.mesh
    ratio = _check_nested(coarse, fine)
    wq = fine.quad_weights()
    fine_pad = f_fine.padded()
    coarse_pad = f_coarse.padded()

    fine_vals = fine_pad[:-1, None] * (1.0 - _GX) + fine_pad[1:, None] * _GX
    fine_elem = np.arange(fine.n_elements)
    coarse_elem = fine_elem // ratio
    # local coordinate within the coarse element, formed from integer
    # indices so identical inputs subtract to exactly zero
    xi = ((fine_elem % ratio)[:, None] + _GX[None, :]) / ratio
    coarse_vals = (
        coarse_pad[coarse_elem][:, None] * (1.0 - xi)
        + coarse_pad[coarse_elem + 1][:, None] * xi
    )
    diff = coarse_vals - fine_vals
    l2 = math.sqrt(float(((diff * diff) @ wq).sum()))

    fine_slope = np.diff(fine_pad) / fine.h
    coarse_slope = (np.diff(coarse_pad) / coarse.h)[coarse_elem]
    dslope = coarse_slope - fine_slope
    h1 = math.sqrt(float((dslope * dslope).sum() * fine.h))
    return l2, h1


def fe_error_vs_function(f: FEFunction, exact, subdiv: int = 4) -> float:
    """L2 distance between an FE function and a scalar function, using
    ``subdiv`` Gauss panels per element."""
    mesh = f.mesh
    edges = np.linspace(0.0, 1.0, mesh.n_elements * subdiv + 1)
    hsub = edges[1] - edges[0]
    xq = edges[:-1, None] + hsub * _GX[None, :]
    vals = _sample(exact, xq, "reference")
    diff = vals - f(xq)
    return math.sqrt(float(((diff * diff) @ (_GW * hsub)).sum()))


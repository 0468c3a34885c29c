"""Fully discrete marching for the semilinear subdiffusion equation.

Time is discretized by the L1 scheme for the Caputo derivative on a
uniform grid, space by the P1 elements of :mod:`subdiff.fem1d`.  The
diffusion term is implicit and reassembled every step (the diffusivity
may depend on time, kinks included); the source is evaluated at a
linearly extrapolated state, so each step costs one SPD tridiagonal
solve and no Newton iteration.

The L1 memory term couples every step to the full history.  The
marcher keeps all frames and evaluates the history sums in blocks: the
contribution of frames older than the current block is a rectangular
Toeplitz matrix product, computed by FFT, while the few frames inside
the block enter by direct summation.  This is an exact reorganization
of the O(N^2) sum, not an approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import matmul_toeplitz

from .fem1d import (
    FEFunction,
    Mesh1D,
    TriDiagonalOperator,
    assemble_load,
    assemble_mass,
    assemble_stiffness,
    l2_project,
    solve_tridiag,
)
from .fraccalc import FracOrder, l1_weights

__all__ = [
    "MAX_STEPS",
    "STATE_BAND",
    "DivergenceError",
    "TimeGrid",
    "SolutionHistory",
    "ProblemSpec",
    "make_time_grid",
    "extrapolate_state",
    "march",
]

# Hard cap on the step count.  The full-history L1 sum is quadratic in
# the number of steps, and the step-selection rule dt ~ h^(2/alpha)
# shrinks brutally for small alpha; the cap turns a runaway grid into
# an explicit error instead of an unbounded computation.
MAX_STEPS = 2_000_000

# Validity band for the registered Lipschitz constants: |u| <= 4 covers
# every benchmark solution with a wide margin, and the march aborts if
# the state ever leaves it (a reliable symptom of divergence for the
# logistic source, whose Lipschitz constant only holds locally).
STATE_BAND = 4.0

# Steps per history block.  Within a block the memory sum is a short
# direct product; across completed blocks it is one FFT-backed Toeplitz
# product per block.  The value balances the two costs.
_CONV_BLOCK = 4096

# Column chunk for the Toeplitz product, bounding the FFT workspace to
# a few hundred megabytes even for long marches on fine meshes.
_TOEPLITZ_COLS = 128


class DivergenceError(RuntimeError):
    """The marching state became non-finite or left the validity band."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid with tau * n_steps = t_final.

    The product must reproduce the horizon to 1e-12 relative; use
    :func:`make_time_grid` to build a grid from a target step size.
    """

    tau: float
    n_steps: int
    t_final: float

    def __post_init__(self):
        if not (isinstance(self.tau, float) and math.isfinite(self.tau)) or self.tau <= 0.0:
            raise ValueError(f"tau must be a positive finite real, got {self.tau!r}")
        if self.n_steps < 1:
            raise ValueError(f"need at least one step, got {self.n_steps}")
        if self.n_steps > MAX_STEPS:
            raise ValueError(
                f"{self.n_steps} steps exceeds the cap of {MAX_STEPS}; "
                "enlarge the time step (larger alpha or a coarser mesh in "
                "the step rule) or shorten the horizon"
            )
        span = self.tau * self.n_steps
        if abs(span - self.t_final) > 1e-12 * max(abs(self.t_final), span):
            raise ValueError(
                f"tau * n_steps = {span!r} does not reproduce t_final = "
                f"{self.t_final!r}"
            )

    def times(self) -> np.ndarray:
        """Grid points t_0 = 0 ... t_N = t_final."""
        t = self.tau * np.arange(self.n_steps + 1)
        t[-1] = self.t_final
        return t


def make_time_grid(t_final: float, dt: float) -> TimeGrid:
    """Build the uniform grid covering (0, t_final] with steps of at
    most ``dt`` (the step is shrunk to divide the horizon exactly)."""
    if t_final <= 0.0 or not math.isfinite(t_final):
        raise ValueError(f"horizon must be a positive finite real, got {t_final}")
    if dt <= 0.0 or not math.isfinite(dt):
        raise ValueError(f"step must be a positive finite real, got {dt}")
    n = max(1, math.ceil(t_final / dt - 1e-9))
    return TimeGrid(tau=t_final / n, n_steps=n, t_final=t_final)


@dataclass(frozen=True)
class ProblemSpec:
    """One benchmark problem: data, bounds, and nominal smoothness.

    ``diffusivity(x, t)`` and ``source(x, t, u)`` take scalar or array
    x; ``initial`` is the Dirichlet datum phi; ``exact(x, t)``, when
    present, is the closed-form solution.  ``p_nominal`` grades the
    smoothness of phi on the Dirichlet-spectral scale and drives the
    scaled error column of time studies.  ``lipschitz_bound`` bounds
    |source(x, t, u) - source(x, t, v)| / |u - v| for |u|, |v| up to
    STATE_BAND.  The diffusivity box [d_lower, d_upper] is spot-checked
    on a 21 x 21 grid of (x, t) in [0, 1]^2 at construction.
    """

    name: str
    diffusivity: Callable
    source: Callable
    initial: Callable
    p_nominal: float
    lipschitz_bound: float
    d_lower: float
    d_upper: float
    exact: Optional[Callable] = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("problem name must be nonempty")
        if not 0.0 <= self.p_nominal <= 2.0:
            raise ValueError(f"p_nominal must lie in [0, 2], got {self.p_nominal}")
        if not (math.isfinite(self.lipschitz_bound) and self.lipschitz_bound >= 0.0):
            raise ValueError(
                f"lipschitz_bound must be a finite nonnegative real, got "
                f"{self.lipschitz_bound}"
            )
        if not 0.0 < self.d_lower <= self.d_upper:
            raise ValueError(
                f"need 0 < d_lower <= d_upper, got [{self.d_lower}, {self.d_upper}]"
            )
        for x in np.linspace(0.0, 1.0, 21):
            for t in np.linspace(0.0, 1.0, 21):
                val = float(self.diffusivity(float(x), float(t)))
                if not (self.d_lower - 1e-9 <= val <= self.d_upper + 1e-9):
                    raise ValueError(
                        f"diffusivity {val:.6g} at (x={x:.3g}, t={t:.3g}) "
                        f"leaves the declared box [{self.d_lower}, "
                        f"{self.d_upper}]"
                    )


@dataclass(frozen=True)
class SolutionHistory:
    """All frames of one march; frame 0 is the L2 projection of phi."""

    grid: TimeGrid
    mesh: Mesh1D
    frames: np.ndarray

    def __post_init__(self):
        expected = (self.grid.n_steps + 1, self.mesh.n_interior)
        if self.frames.shape != expected:
            raise ValueError(
                f"frame array shape {self.frames.shape} does not match "
                f"{expected} (n_steps + 1, interior nodes)"
            )

    def frame(self, n: int) -> FEFunction:
        """The FE function at step n (0 <= n <= n_steps)."""
        return FEFunction(mesh=self.mesh, coeffs=self.frames[n])


def extrapolate_state(frames: np.ndarray, n: int) -> np.ndarray:
    """State at which the source is evaluated when solving for step n.

    Linear extrapolation 2 u^{n-1} - u^{n-2} from the two previous
    frames; the first step has only u^0 and uses it directly.
    """
    if n < 1:
        raise ValueError(f"extrapolation starts at step 1, got n={n}")
    if n == 1:
        return np.array(frames[0], dtype=float)
    return 2.0 * np.asarray(frames[n - 1], dtype=float) - np.asarray(
        frames[n - 2], dtype=float
    )


def _far_history(dd: np.ndarray, frames: np.ndarray, s: int, hi: int) -> np.ndarray:
    """Old-frame part of the history sums for the block of steps
    s+1 ... hi: row i holds sum_{k<=s} dd[s+i-k] u^k.

    The matrix dd[s+i-k] is rectangular Toeplitz, so the whole block is
    one FFT product per column chunk; chunking keeps the workspace
    bounded regardless of the mesh size.
    """
    col = dd[s:hi]
    row = dd[1 : s + 1][::-1]
    past = frames[1 : s + 1]
    out = np.empty((hi - s, past.shape[1]))
    for c0 in range(0, past.shape[1], _TOEPLITZ_COLS):
        c1 = min(c0 + _TOEPLITZ_COLS, past.shape[1])
        out[:, c0:c1] = matmul_toeplitz((col, row), past[:, c0:c1])
    return out


def _check_state(u: np.ndarray, n: int, t: float) -> None:
    if not np.all(np.isfinite(u)):
        raise DivergenceError(f"non-finite state at step {n} (t = {t:.6g})")
    peak = float(np.max(np.abs(u), initial=0.0))
    if peak > STATE_BAND:
        raise DivergenceError(
            f"state reached |u| = {peak:.4g} at step {n} (t = {t:.6g}), "
            f"outside the band |u| <= {STATE_BAND} where the registered "
            "Lipschitz bounds hold"
        )


def march(
    prob: ProblemSpec, mesh: Mesh1D, grid: TimeGrid, alpha: FracOrder
) -> SolutionHistory:
    """March the L1 / P1 scheme over the whole grid.

    Step n solves

        (beta M + A(t_n)) u^n = beta M (b_{n-1} u^0
            + sum_{k=1}^{n-1} (b_{n-1-k} - b_{n-k}) u^k)
            + (source(., t_n, ubar^n), phi_i),

    with beta = tau^(-alpha) / gamma(2 - alpha), M the mass matrix,
    A(t_n) the stiffness matrix reassembled at t_n, b the L1 weights,
    and ubar^n the extrapolated state.  The source integrand evaluates
    ubar^n at quadrature points by P1 interpolation of its nodal
    values.  beta M + A is SPD for every step, so the solve cannot
    break down on valid data.

    Raises
    ------
    DivergenceError
        If a computed state is non-finite or leaves STATE_BAND.
    NotSPDError
        If the tridiagonal solve fails (never on finite assembly).
    """
    n_steps = grid.n_steps
    weights = l1_weights(alpha, n_steps)
    b = weights.b
    beta = weights.scale(grid.tau)

    # dd[j] = b_{j-1} - b_j for j >= 1: the coefficient of u^{n-j} in
    # the history sum.  dd[0] is never read.  The within-block sums
    # consume the kernel in descending index order; ddrev keeps that
    # order contiguous so the dot product stays on the BLAS fast path
    # (a negative-stride view is an order of magnitude slower there).
    dd = np.zeros(n_steps)
    if n_steps > 1:
        dd[1:] = b[:-1] - b[1:]
    ddrev = np.ascontiguousarray(dd[::-1])

    mass = assemble_mass(mesh)
    u0 = l2_project(mesh, prob.initial).coeffs
    _check_state(u0, 0, 0.0)

    frames = np.empty((n_steps + 1, mesh.n_interior))
    frames[0] = u0

    for s in range(0, n_steps, _CONV_BLOCK):
        hi = min(s + _CONV_BLOCK, n_steps)
        far = _far_history(dd, frames, s, hi) if s > 0 else None
        for n in range(s + 1, hi + 1):
            t = n * grid.tau
            hist = b[n - 1] * u0
            if far is not None:
                hist = hist + far[n - s - 1]
            if n - s > 1:
                # ddrev[n_steps - n + s : n_steps - 1] is dd[n-k] for
                # k = s+1 ... n-1 in ascending k.
                hist = hist + ddrev[n_steps - n + s : n_steps - 1] @ frames[s + 1 : n]

            ubar = FEFunction(mesh=mesh, coeffs=extrapolate_state(frames, n))
            load = assemble_load(mesh, lambda x: prob.source(x, t, ubar(x)))
            stiff = assemble_stiffness(mesh, prob.diffusivity, t)
            op = TriDiagonalOperator(
                diag=beta * mass.diag + stiff.diag,
                off=beta * mass.off + stiff.off,
            )
            u = solve_tridiag(op, beta * mass.matvec(hist) + load)
            _check_state(u, n, t)
            frames[n] = u

    return SolutionHistory(grid=grid, mesh=mesh, frames=frames)

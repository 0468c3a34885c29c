"""Experiment drivers: convergence orders, error-in-time studies,
power-law fits, and CSV report emission.

The two measurements mirror the verification protocol for the scheme:
Aitken order estimation compares marches on nested meshes under one
time grid, and the time-error study tracks the L2 distance to a
spatially refined reference at every step, scaled by the power of t
that theory predicts for the given data smoothness.
"""

from __future__ import annotations

import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .fem1d import assemble_mass, fe_error_norms, make_mesh
from .fraccalc import FracOrder
from .timestepper import ProblemSpec, SolutionHistory, make_time_grid, march

__all__ = [
    "OrderStudyResult",
    "TimeErrorSeries",
    "PowerLawFit",
    "dt_rule",
    "aitken_p",
    "aitken_order",
    "time_error_study",
    "fit_power_law",
    "emit_report",
    "worker_count",
]

# Norm differences below this are round-off, not convergence data; the
# Aitken estimate built from them is flagged unreliable.
_NOISE_FLOOR = 1e-12

# Frames per chunk in the vectorized L2 difference, bounding the
# temporary arrays for long marches on fine meshes.
_ERR_CHUNK = 16384


def worker_count(jobs: int) -> int:
    """Worker count for concurrent marches, capped by SUBDIFF_THREADS.

    An unset or zero-valued variable means auto (one worker per CPU);
    a positive integer caps the pool; anything else is rejected.
    """
    raw = os.environ.get("SUBDIFF_THREADS", "0").strip()
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"SUBDIFF_THREADS must be an integer, got {raw!r}") from None
    if cap < 0:
        raise ValueError(f"SUBDIFF_THREADS must be >= 0, got {cap}")
    if cap == 0:
        cap = os.cpu_count() or 1
    return max(1, min(jobs, cap))


def dt_rule(h: float, alpha, gamma: float = 0.1, dt_floor: float = 1e-7) -> float:
    """Time step max(gamma * h^(2/alpha), dt_floor).

    The h^(2/alpha) scaling keeps the temporal error of the L1 scheme
    below the spatial error being measured; the floor stops the rule
    from demanding absurdly small steps as alpha decreases.  ``alpha``
    may be a FracOrder or a plain float in (0, 1]; the value 1.0 is
    accepted so the classical-diffusion limit h^2 can be probed even
    though marching orders are strictly fractional.
    """
    a = alpha.alpha if isinstance(alpha, FracOrder) else float(alpha)
    if not 0.0 < a <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {a}")
    if not 0.0 < h < 1.0:
        raise ValueError(f"mesh size must lie in (0, 1), got {h}")
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    if dt_floor <= 0.0:
        raise ValueError(f"dt_floor must be positive, got {dt_floor}")
    return max(gamma * h ** (2.0 / a), dt_floor)


def aitken_p(norm_coarse_mid: float, norm_mid_fine: float) -> float:
    """Aitken order log2(||u_{h/2} - u_h|| / ||u_{h/4} - u_{h/2}||)."""
    return math.log2(norm_coarse_mid / norm_mid_fine)


@dataclass(frozen=True)
class OrderStudyResult:
    """One Aitken convergence measurement.

    ``reliable`` is False when either difference norm sits at the
    round-off floor, where the ratio measures noise instead of order.
    """

    problem: str
    alpha: float
    h: float
    dt: float
    t_final: float
    norm_coarse_mid: float
    norm_mid_fine: float
    p_estimate: float
    reliable: bool = True

    def __post_init__(self):
        if self.norm_coarse_mid < 0.0 or self.norm_mid_fine < 0.0:
            raise ValueError("difference norms cannot be negative")
        if self.norm_coarse_mid > 0.0 and self.norm_mid_fine > 0.0:
            stated = aitken_p(self.norm_coarse_mid, self.norm_mid_fine)
            if not (self.p_estimate == stated or (math.isnan(self.p_estimate) and math.isnan(stated))):
                raise ValueError(
                    f"p_estimate {self.p_estimate!r} is not the Aitken ratio "
                    f"{stated!r} of the stored norms"
                )


@dataclass(frozen=True)
class TimeErrorSeries:
    """Per-step L2 error against a spatially refined reference.

    The series starts at t_1 (the initial frame has no time-stepping
    error and its logarithm is useless for fitting).  ``scaled`` holds
    t^(alpha (2 - p)/2) * err, which theory predicts to be flat in t
    for data of smoothness p.
    """

    problem: str
    alpha: float
    p_nominal: float
    t: np.ndarray
    err: np.ndarray
    scaled: np.ndarray

    def __post_init__(self):
        if not (len(self.t) == len(self.err) == len(self.scaled)):
            raise ValueError("t, err, scaled must have equal lengths")
        if len(self.t) == 0:
            raise ValueError("a time-error series cannot be empty")
        if self.t[0] <= 0.0 or np.any(np.diff(self.t) <= 0.0):
            raise ValueError("times must be positive and strictly increasing")
        if np.any(self.err < 0.0):
            raise ValueError("error norms cannot be negative")


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit of err ~ a t^(-s) in log-log coordinates."""

    a: float
    s: float
    n_points: int
    residual_rms: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise ValueError(f"amplitude must be positive, got {self.a}")
        if self.n_points < 2:
            raise ValueError(f"a fit needs at least 2 points, got {self.n_points}")
        if self.residual_rms < 0.0:
            raise ValueError("residual rms cannot be negative")


def aitken_order(
    prob: ProblemSpec, alpha: FracOrder, h: float, dt: float, t_final: float
) -> OrderStudyResult:
    """Estimate the spatial order by marches at h, h/2, h/4.

    All three marches share one TimeGrid, so the temporal error
    cancels from the difference quotients; they run concurrently when
    the worker cap allows.  The L2 differences are taken at t_final on
    the nested meshes.
    """
    base = 1.0 / h
    n0 = round(base)
    if abs(base - n0) > 1e-9 * base or n0 < 2:
        raise ValueError(f"1/h must be an integer element count >= 2, got {base}")
    grid = make_time_grid(t_final, dt)
    counts = (n0, 2 * n0, 4 * n0)

    def run(n: int) -> SolutionHistory:
        return march(prob, make_mesh(n), grid, alpha)

    with ThreadPoolExecutor(max_workers=worker_count(3)) as pool:
        coarse, mid, fine = pool.map(run, counts)

    last = grid.n_steps
    norm_cm = fe_error_norms(coarse.frame(last), mid.frame(last))[0]
    norm_mf = fe_error_norms(mid.frame(last), fine.frame(last))[0]
    if norm_cm > 0.0 and norm_mf > 0.0:
        p = aitken_p(norm_cm, norm_mf)
    else:
        p = math.nan
    return OrderStudyResult(
        problem=prob.name,
        alpha=alpha.alpha,
        h=h,
        dt=grid.tau,
        t_final=t_final,
        norm_coarse_mid=norm_cm,
        norm_mid_fine=norm_mf,
        p_estimate=p,
        reliable=bool(norm_cm >= _NOISE_FLOOR and norm_mf >= _NOISE_FLOOR),
    )


def _l2_differences(coarse: SolutionHistory, fine: SolutionHistory) -> np.ndarray:
    """L2 norms of (coarse - fine) at frames 1 ... N, vectorized.

    The coarse frame is interpolated to the fine nodes (exact for
    nested P1 spaces), and the difference is measured with the fine
    mass matrix, which integrates V_h functions exactly; the result
    matches fe_error_norms frame by frame to round-off.
    """
    ratio, rem = divmod(fine.mesh.n_elements, coarse.mesh.n_elements)
    if rem != 0 or ratio < 1:
        raise ValueError(
            f"meshes are not nested: {fine.mesh.n_elements} fine vs "
            f"{coarse.mesh.n_elements} coarse elements"
        )
    mass = assemble_mass(fine.mesh)
    nodes = np.arange(1, fine.mesh.n_elements)
    left, part = divmod(nodes, ratio)
    w = part / ratio

    n_frames = coarse.grid.n_steps
    out = np.empty(n_frames)
    for lo in range(1, n_frames + 1, _ERR_CHUNK):
        hi = min(lo + _ERR_CHUNK, n_frames + 1)
        cpad = np.zeros((hi - lo, coarse.mesh.n_elements + 1))
        cpad[:, 1:-1] = coarse.frames[lo:hi]
        diff = cpad[:, left] * (1.0 - w) + cpad[:, left + 1] * w
        diff -= fine.frames[lo:hi]
        quad = (diff * diff) @ mass.diag
        quad += 2.0 * np.einsum("ij,ij,j->i", diff[:, :-1], diff[:, 1:], mass.off)
        out[lo - 1 : hi - 1] = np.sqrt(np.maximum(quad, 0.0))
    return out


def time_error_study(
    prob: ProblemSpec,
    alpha: FracOrder,
    h: float,
    t_final: float,
    ref_refine: int,
    gamma: float = 0.1,
    dt_floor: float = 1e-7,
) -> TimeErrorSeries:
    """Error-versus-time study against a spatially refined reference.

    Marches the problem on the target mesh and on a mesh refined by
    ``ref_refine``, both under the TimeGrid from :func:`dt_rule`, and
    records the L2 difference at every step from t_1 on.  Refining in
    space only (same time grid) isolates the spatial error, whose
    predicted blow-up rate t^(-alpha (2 - p)/2) the scaled column
    divides out.
    """
    if ref_refine not in (2, 4, 8):
        raise ValueError(f"ref_refine must be 2, 4, or 8, got {ref_refine}")
    base = 1.0 / h
    n0 = round(base)
    if abs(base - n0) > 1e-9 * base or n0 < 2:
        raise ValueError(f"1/h must be an integer element count >= 2, got {base}")
    dt = dt_rule(h, alpha, gamma, dt_floor)
    grid = make_time_grid(t_final, dt)

    coarse = march(prob, make_mesh(n0), grid, alpha)
    fine = march(prob, make_mesh(ref_refine * n0), grid, alpha)

    err = _l2_differences(coarse, fine)
    t = grid.times()[1:]
    exponent = alpha.alpha * (2.0 - prob.p_nominal) / 2.0
    return TimeErrorSeries(
        problem=prob.name,
        alpha=alpha.alpha,
        p_nominal=prob.p_nominal,
        t=t,
        err=err,
        scaled=t**exponent * err,
    )


def fit_power_law(series: TimeErrorSeries, n_points: int) -> PowerLawFit:
    """Fit err ~ a t^(-s) over the first n_points of the series.

    Ordinary least squares of log(err) on log(t); s is minus the
    slope, a the exponential of the intercept, residual_rms the rms of
    the log residuals (zero for exact power-law data).
    """
    if n_points < 2:
        raise ValueError(f"a fit needs at least 2 points, got {n_points}")
    if n_points > len(series.t):
        raise ValueError(
            f"fit window of {n_points} exceeds the series length {len(series.t)}"
        )
    err = series.err[:n_points]
    if np.any(err <= 0.0):
        bad = int(np.argmax(err <= 0.0))
        raise ValueError(
            f"error at t={series.t[bad]:.6g} (point {bad + 1}) is not positive; "
            f"shrink the fit window below {bad + 1} points"
        )
    log_t = np.log(series.t[:n_points])
    log_e = np.log(err)
    slope, intercept = np.polyfit(log_t, log_e, 1)
    resid = log_e - (slope * log_t + intercept)
    return PowerLawFit(
        a=math.exp(intercept),
        s=-slope,
        n_points=n_points,
        residual_rms=math.sqrt(float(resid @ resid) / n_points),
    )


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _write_atomic(path: str, text: str) -> None:
    """Write the report through a temp file in the target directory so
    a failure never leaves a partial CSV at the destination."""
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(
        dir=os.path.dirname(target), prefix=".report-", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_report(result, path: str, fit: PowerLawFit | None = None) -> None:
    """Write a result as CSV: deterministic order, 12 significant digits.

    Order studies produce one header and one data row.  Time series
    produce one row per point plus a footer comment carrying the
    power-law fit, which must therefore be supplied alongside them.
    """
    if isinstance(result, OrderStudyResult):
        if fit is not None:
            raise ValueError("order studies carry no power-law fit")
        lines = [
            "problem,alpha,h,dt,T,norm_h_h2,norm_h2_h4,p_estimate",
            ",".join(
                [
                    result.problem,
                    _fmt(result.alpha),
                    _fmt(result.h),
                    _fmt(result.dt),
                    _fmt(result.t_final),
                    _fmt(result.norm_coarse_mid),
                    _fmt(result.norm_mid_fine),
                    _fmt(result.p_estimate),
                ]
            ),
        ]
    elif isinstance(result, TimeErrorSeries):
        if fit is None:
            raise ValueError("time series reports need the power-law fit footer")
        lines = ["t,error,scaled_error"]
        lines.extend(
            f"{_fmt(t)},{_fmt(e)},{_fmt(s)}"
            for t, e, s in zip(result.t, result.err, result.scaled)
        )
        lines.append(
            f"# fit a={_fmt(fit.a)} s={_fmt(fit.s)} n={fit.n_points} "
            f"rms={_fmt(fit.residual_rms)}"
        )
    else:
        raise TypeError(f"cannot report a {type(result).__name__}")
    _write_atomic(path, "\n".join(lines) + "\n")

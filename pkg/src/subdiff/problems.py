"""Registry of the benchmark problems driven by the test harness.

Eight problems are registered.  Three exercise spatial convergence
(one manufactured with a closed-form solution, two with a kinked-in-
time diffusivity and a logistic source), four share that semilinear
setup but vary the smoothness of the initial datum from C-infinity
down to a jump, and one is the linear relaxation problem whose exact
solution is a single decaying eigenmode, used as an analytic oracle.
"""

from __future__ import annotations

import math

import numpy as np

from .fraccalc import FracOrder, caputo_monomial, gamma, mittag_leffler
from .timestepper import STATE_BAND, ProblemSpec

__all__ = ["PROBLEM_NAMES", "get_problem", "verify_manufactured"]


def _parabola(x):
    x = np.asarray(x, dtype=float)
    return x * (1.0 - x)


def _tent(x):
    return 1.0 - np.abs(2.0 * np.asarray(x, dtype=float) - 1.0)


def _sqrt_arch(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(x * (1.0 - x))


def _step(x):
    return np.where(np.asarray(x, dtype=float) >= 0.5, 1.0, 0.0)


def _kinked_diffusivity(x, t):
    """1 + cos(2 pi x)/2 + sqrt|t - 1/2|: bounded away from zero, with
    a time derivative that is integrable but unbounded at t = 1/2."""
    x = np.asarray(x, dtype=float)
    return 1.0 + 0.5 * np.cos(2.0 * np.pi * x) + math.sqrt(abs(t - 0.5))


def _logistic(x, t, u):
    u = np.asarray(u, dtype=float)
    return u * (1.0 - u)


def _unit_diffusivity(x, t):
    return np.ones_like(np.asarray(x, dtype=float))


def _zero_source(x, t, u):
    return np.zeros_like(np.asarray(u, dtype=float))


def _manufactured_exact(x, t):
    x = np.asarray(x, dtype=float)
    return (1.0 + t * t) * x * (1.0 - x)


def _manufactured_diffusivity(x, t):
    return 1.0 + np.asarray(x, dtype=float) + t


def _manufactured_source(alpha: FracOrder):
    """Source balancing the manufactured solution (1 + t^2) x (1 - x).

    The drive term cancels the diffusion flux divergence and the
    u-proportional term reproduces the Caputo derivative, whose order
    enters through the gamma factor.
    """
    g = gamma(3.0 - alpha.alpha)
    exponent = 2.0 - alpha.alpha

    def source(x, t, u):
        x = np.asarray(x, dtype=float)
        drive = (1.0 + t * t) * (1.0 + 2.0 * t + 4.0 * x)
        return drive + (2.0 * t**exponent / ((1.0 + t * t) * g)) * np.asarray(
            u, dtype=float
        )

    return source


def _build_manufactured(alpha: FracOrder) -> ProblemSpec:
    # The sup of 2 t^(2-a) / (1 + t^2) over t in [0, 1] is 1, attained
    # at t = 1, so the source is Lipschitz in u with constant
    # 1/gamma(3 - a) on the unit time horizon.
    return ProblemSpec(
        name="order1",
        diffusivity=_manufactured_diffusivity,
        source=_manufactured_source(alpha),
        initial=_parabola,
        p_nominal=2.0,
        lipschitz_bound=1.0 / gamma(3.0 - alpha.alpha),
        d_lower=1.0,
        d_upper=3.0,
        exact=_manufactured_exact,
    )


def _build_semilinear(name: str, initial, p_nominal: float) -> ProblemSpec:
    # |u(1-u) - v(1-v)| = |u - v| |1 - u - v|, so the logistic source
    # is Lipschitz with constant 1 + 2 * STATE_BAND inside the band.
    return ProblemSpec(
        name=name,
        diffusivity=_kinked_diffusivity,
        source=_logistic,
        initial=initial,
        p_nominal=p_nominal,
        lipschitz_bound=1.0 + 2.0 * STATE_BAND,
        d_lower=0.5,
        d_upper=1.5 + math.sqrt(0.5),
    )


def _build_ml_relaxation(alpha: FracOrder) -> ProblemSpec:
    a = alpha.alpha

    def exact(x, t):
        x = np.asarray(x, dtype=float)
        factor = mittag_leffler(a, 1.0, -math.pi**2 * t**a)
        return factor * math.sqrt(2.0) * np.sin(math.pi * x)

    return ProblemSpec(
        name="ml_relaxation",
        diffusivity=_unit_diffusivity,
        source=_zero_source,
        initial=lambda x: math.sqrt(2.0) * np.sin(math.pi * np.asarray(x, dtype=float)),
        p_nominal=2.0,
        lipschitz_bound=0.0,
        d_lower=1.0,
        d_upper=1.0,
        exact=exact,
    )


_REGISTRY = {
    "order1": _build_manufactured,
    "order2": lambda alpha: _build_semilinear("order2", _parabola, 2.0),
    "order3": lambda alpha: _build_semilinear("order3", _step, 0.5),
    "errtime1": lambda alpha: _build_semilinear("errtime1", _parabola, 2.0),
    "errtime2": lambda alpha: _build_semilinear("errtime2", _tent, 1.5),
    "errtime3": lambda alpha: _build_semilinear("errtime3", _sqrt_arch, 1.0),
    "errtime4": lambda alpha: _build_semilinear("errtime4", _step, 0.5),
    "ml_relaxation": _build_ml_relaxation,
}

PROBLEM_NAMES = tuple(_REGISTRY)


def get_problem(name: str, alpha) -> ProblemSpec:
    """Build the named problem for differentiation order alpha.

    ``alpha`` may be a FracOrder or a plain float in (0, 1); only the
    manufactured source and the relaxation oracle actually depend on
    it.  Unknown names raise ValueError listing the vocabulary.
    """
    if not isinstance(alpha, FracOrder):
        alpha = FracOrder(float(alpha))
    try:
        build = _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown problem {name!r}; registered: {', '.join(_REGISTRY)}"
        ) from None
    return build(alpha)


def _manufactured_caputo(x, t, alpha: FracOrder) -> float:
    """Caputo derivative of the manufactured solution: the constant
    part of 1 + t^2 drops and the monomial maps in closed form."""
    x = float(x)
    return x * (1.0 - x) * caputo_monomial(alpha, 2.0, t)


def _manufactured_flux_div(x, t) -> float:
    """d/dx (D du/dx) for the manufactured pair, expanded by hand."""
    return -(1.0 + t * t) * (1.0 + 2.0 * t + 4.0 * float(x))


_ANALYTIC_PIECES = {
    "order1": (_manufactured_caputo, _manufactured_flux_div),
}


def verify_manufactured(prob: ProblemSpec, alpha, sample_points) -> float:
    """Max PDE residual of the problem's closed-form solution.

    Evaluates |d^alpha_t u - d/dx(D du/dx) - source(x, t, u)| at each
    sample with every piece analytic: the Caputo derivative comes from
    the closed-form monomial rule, the flux divergence from hand
    differentiation, and the source from the registered callable, so a
    corrupted source shows up as an O(1) residual.  Samples need t > 0;
    the Caputo term is singular at the origin.

    Raises
    ------
    ValueError
        If the problem carries no closed-form solution.
    """
    if not isinstance(alpha, FracOrder):
        alpha = FracOrder(float(alpha))
    if prob.exact is None or prob.name not in _ANALYTIC_PIECES:
        raise ValueError(
            f"problem {prob.name!r} has no manufactured solution to verify"
        )
    caputo_part, flux_div = _ANALYTIC_PIECES[prob.name]
    worst = 0.0
    for x, t in sample_points:
        u = float(prob.exact(x, t))
        residual = (
            caputo_part(x, t, alpha)
            - flux_div(x, t)
            - float(prob.source(x, t, u))
        )
        worst = max(worst, abs(residual))
    return worst

"""Command line front end.

One binary, four subcommands:

``solve``
    March a registered problem and write the final frame as ``x,u``
    rows (boundary nodes included).  With ``--frames k`` the full
    history is dumped instead, every k-th frame, as ``t,x,u`` rows.
``order``
    Aitken order study on meshes h, h/2, h/4 under one time grid.
``timeerr``
    Error-versus-time study against a spatially refined reference,
    with a power-law fit in the CSV footer.
``selftest``
    Run the built-in oracle suites and report pass/fail per suite.

Flags override config-file values, which override defaults.  The
config file is flat ``key = value`` text, one entry per line, ``#``
comments allowed; ``render_config`` writes that form and
``parse_config`` reads it back verbatim.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import fem1d, fraccalc, spectral
from .fraccalc import FracOrder
from .harness import (
    _fmt,
    _write_atomic,
    aitken_order,
    dt_rule,
    emit_report,
    fit_power_law,
    time_error_study,
)
from .problems import get_problem
from .timestepper import make_time_grid, march

__all__ = [
    "ConfigError",
    "RunConfig",
    "parse_config",
    "render_config",
    "run",
    "main",
]

COMMANDS = ("solve", "order", "timeerr", "selftest")

_DEFAULTS = {
    "problem": "order1",
    "alpha": 0.75,
    "nx": 100,
    "dt": None,
    "gamma": 0.1,
    "t_final": 1.0,
    "ref_refine": 4,
    "out_path": "report.csv",
    "fit_points": 100,
    "frames": None,
}

# Config-file key for each field; T matches the flag spelling.
_FILE_KEYS = {
    "command": "command",
    "problem": "problem",
    "alpha": "alpha",
    "nx": "nx",
    "dt": "dt",
    "gamma": "gamma",
    "t_final": "T",
    "ref_refine": "ref_refine",
    "out_path": "out",
    "fit_points": "fit_points",
    "frames": "frames",
}
_FIELD_FOR_KEY = {v: k for k, v in _FILE_KEYS.items()}


class ConfigError(ValueError):
    """Configuration that cannot be turned into a valid run."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved description of one CLI invocation."""

    command: str
    problem: str = _DEFAULTS["problem"]
    alpha: float = _DEFAULTS["alpha"]
    nx: int = _DEFAULTS["nx"]
    dt: float | None = _DEFAULTS["dt"]
    gamma: float = _DEFAULTS["gamma"]
    t_final: float = _DEFAULTS["t_final"]
    ref_refine: int = _DEFAULTS["ref_refine"]
    out_path: str = _DEFAULTS["out_path"]
    fit_points: int = _DEFAULTS["fit_points"]
    frames: int | None = _DEFAULTS["frames"]

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(
                f"command must be one of {', '.join(COMMANDS)}, got {self.command!r}"
            )
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.nx < 2:
            raise ConfigError(f"nx must be at least 2, got {self.nx}")
        if self.dt is not None and not (
            math.isfinite(self.dt) and self.dt > 0.0
        ):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not (math.isfinite(self.t_final) and self.t_final > 0.0):
            raise ConfigError(f"T must be positive, got {self.t_final}")
        if self.fit_points < 2:
            raise ConfigError(f"fit_points must be at least 2, got {self.fit_points}")
        if self.frames is not None and self.frames < 1:
            raise ConfigError(f"frames stride must be at least 1, got {self.frames}")
        if not self.out_path:
            raise ConfigError("out must be a nonempty path")


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so errors stay one line."""

    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="subdiff", add_help=False)
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name, add_help=False)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--problem", type=str, default=None)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--nx", type=int, default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--T", dest="t_final", type=float, default=None)
        p.add_argument("--ref-refine", dest="ref_refine", type=int, default=None)
        p.add_argument("--out", dest="out_path", type=str, default=None)
        p.add_argument("--fit-points", dest="fit_points", type=int, default=None)
        if name == "solve":
            p.add_argument("--frames", type=int, default=None)
    return parser


def _parse_value(field: str, raw: str):
    if field in ("command", "problem", "out_path"):
        return raw
    try:
        if field in ("nx", "ref_refine", "fit_points", "frames"):
            return int(raw)
        return float(raw)
    except ValueError:
        raise ConfigError(
            f"{_FILE_KEYS[field]} must be a number, got {raw!r}"
        ) from None


def _read_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {body!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _FIELD_FOR_KEY:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        field = _FIELD_FOR_KEY[key]
        values[field] = _parse_value(field, raw)
    return values


def parse_config(argv, file: str | None = None) -> RunConfig:
    """Resolve argv and an optional config file into a RunConfig.

    Precedence is flags over file values over defaults.  The command
    may come from either source but must come from somewhere.
    """
    argv = list(argv)
    flag_values: dict = {}
    if argv:
        if argv[0] not in COMMANDS:
            raise ConfigError(
                f"unknown command {argv[0]!r}; expected one of {', '.join(COMMANDS)}"
            )
        namespace = _build_parser().parse_args(argv)
        flag_values = {
            key: val for key, val in vars(namespace).items() if val is not None
        }
        file = flag_values.pop("config", file)

    resolved = dict(_DEFAULTS)
    resolved["command"] = None
    if file is not None:
        resolved.update(_read_config_file(file))
    resolved.update(flag_values)

    if resolved["command"] is None:
        raise ConfigError(
            f"usage: subdiff {{{','.join(COMMANDS)}}} [--flag value ...]; "
            "a command is required"
        )
    return RunConfig(**resolved)


def render_config(config: RunConfig) -> str:
    """Write a config in the flat key = value file form.

    parse_config of the result reproduces the config exactly: floats
    are rendered with repr, which round-trips in binary."""
    lines = []
    for field, key in _FILE_KEYS.items():
        value = getattr(config, field)
        if value is None:
            continue
        rendered = value if isinstance(value, str) else repr(value)
        lines.append(f"{key} = {rendered}")
    return "\n".join(lines) + "\n"


def _solve_csv(config: RunConfig, hist) -> str:
    nodes = hist.mesh.nodes
    if config.frames is None:
        rows = ["x,u"]
        values = hist.frame(hist.grid.n_steps).padded()
        rows.extend(f"{_fmt(x)},{_fmt(u)}" for x, u in zip(nodes, values))
        return "\n".join(rows) + "\n"
    rows = ["t,x,u"]
    times = hist.grid.times()
    indices = list(range(0, hist.grid.n_steps + 1, config.frames))
    if indices[-1] != hist.grid.n_steps:
        indices.append(hist.grid.n_steps)
    for n in indices:
        values = hist.frame(n).padded()
        t = times[n]
        rows.extend(f"{_fmt(t)},{_fmt(x)},{_fmt(u)}" for x, u in zip(nodes, values))
    return "\n".join(rows) + "\n"


def _run_solve(config: RunConfig) -> None:
    alpha = FracOrder(config.alpha)
    prob = get_problem(config.problem, alpha)
    h = 1.0 / config.nx
    dt = config.dt if config.dt is not None else dt_rule(h, alpha, config.gamma)
    grid = make_time_grid(config.t_final, dt)
    hist = march(prob, fem1d.make_mesh(config.nx), grid, alpha)
    _write_atomic(config.out_path, _solve_csv(config, hist))


def _run_order(config: RunConfig) -> None:
    alpha = FracOrder(config.alpha)
    prob = get_problem(config.problem, alpha)
    h = 1.0 / config.nx
    dt = config.dt if config.dt is not None else dt_rule(h, alpha, config.gamma)
    result = aitken_order(prob, alpha, h, dt, config.t_final)
    emit_report(result, config.out_path)


def _run_timeerr(config: RunConfig) -> None:
    alpha = FracOrder(config.alpha)
    prob = get_problem(config.problem, alpha)
    series = time_error_study(
        prob,
        alpha,
        1.0 / config.nx,
        config.t_final,
        config.ref_refine,
        gamma=config.gamma,
    )
    fit = fit_power_law(series, config.fit_points)
    emit_report(series, config.out_path, fit)


def _suite_weight_identities():
    w = fraccalc.l1_weights(FracOrder(0.3), 400)
    assert w.b[0] == 1.0
    assert np.all(np.diff(w.b) < 0.0)
    assert np.all(w.b > 0.0)


def _suite_caputo_linear_exactness():
    alpha = FracOrder(0.6)
    w = fraccalc.l1_weights(alpha, 64)
    t = np.linspace(0.0, 1.0, 65)
    y = 2.0 * t + 1.0
    for k in (1, 5, 17, 64):
        got = fraccalc.caputo_l1_apply(w, t[1] - t[0], y[: k + 1])
        want = 2.0 * fraccalc.caputo_monomial(alpha, 1.0, float(t[k]))
        assert abs(got - want) <= 1e-12


def _suite_caputo_quadratic_convergence():
    alpha = FracOrder(0.5)
    want = fraccalc.caputo_monomial(alpha, 2.0, 1.0)
    errs = []
    for n in (64, 128):
        w = fraccalc.l1_weights(alpha, n)
        t = np.linspace(0.0, 1.0, n + 1)
        got = fraccalc.caputo_l1_apply(w, t[1] - t[0], t**2)
        errs.append(abs(got - want))
    assert errs[1] < errs[0]


def _suite_integral_inverts_derivative():
    alpha = 0.4
    n = 128
    t = np.linspace(0.0, 1.0, n + 1)
    f = np.sin(2.0 * t)
    w = fraccalc.l1_weights(FracOrder(alpha), n)
    tau = float(t[1] - t[0])
    deriv = [0.0]
    deriv.extend(
        fraccalc.caputo_l1_apply(w, tau, f[: k + 1]) for k in range(1, n + 1)
    )
    back = fraccalc.frac_integral_apply(alpha, tau, deriv)
    assert abs(back - (f[-1] - f[0])) <= 0.05


def _suite_mittag_leffler_classical():
    for z in (-2.0, -0.5, 0.0, 0.5, 2.0):
        assert abs(fraccalc.mittag_leffler(1.0, 1.0, z) - math.exp(z)) <= 1e-12


def _suite_mittag_leffler_relaxation():
    vals = [
        fraccalc.mittag_leffler(0.5, 1.0, -math.pi**2 * t**0.5)
        for t in (0.01, 0.1, 1.0, 10.0)
    ]
    assert all(1.0 > a > b > 0.0 for a, b in zip(vals, vals[1:]))


def _suite_mass_matrix_row_sums():
    mesh = fem1d.make_mesh(32)
    mass = fem1d.assemble_mass(mesh)
    rows = mass.matvec(np.ones(mesh.n_interior))
    assert np.max(np.abs(rows[1:-1] - mesh.h)) <= 1e-14


def _suite_stiffness_annihilates_linears():
    mesh = fem1d.make_mesh(32)
    stiff = fem1d.assemble_stiffness(mesh, lambda x, t: np.ones_like(x), 0.0)
    rows = stiff.matvec(mesh.nodes[1:-1])
    assert np.max(np.abs(rows[1:-1])) <= 1e-12


def _suite_tridiagonal_solver():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(2, 40))
        off = rng.uniform(-1.0, 1.0, size=n - 1)
        diag = 2.5 + rng.uniform(0.0, 1.0, size=n)
        op = fem1d.TriDiagonalOperator(diag=diag, off=off)
        rhs = rng.standard_normal(n)
        got = fem1d.solve_tridiag(op, rhs)
        assert np.max(np.abs(op.matvec(got) - rhs)) <= 1e-10


def _suite_l2_projection_orthogonality():
    mesh = fem1d.make_mesh(24)
    proj = fem1d.l2_project(mesh, lambda x: np.sin(3.0 * x))
    mass = fem1d.assemble_mass(mesh)
    load = fem1d.assemble_load(mesh, lambda x: np.sin(3.0 * x))
    assert np.max(np.abs(mass.matvec(proj.coeffs) - load)) <= 1e-12


def _suite_ritz_projection_reproduces_linears():
    mesh = fem1d.make_mesh(24)
    proj = fem1d.ritz_project(
        mesh,
        lambda x, t: 1.0 + x,
        0.0,
        lambda x: x * (1.0 - x),
        lambda x: 1.0 - 2.0 * x,
    )
    err = fem1d.fe_error_vs_function(proj, lambda x: x * (1.0 - x))
    assert err <= 1e-3


def _suite_projection_order():
    errs = []
    for n in (16, 32):
        mesh = fem1d.make_mesh(n)
        proj = fem1d.l2_project(mesh, lambda x: np.sin(math.pi * x))
        errs.append(fem1d.fe_error_vs_function(proj, lambda x: np.sin(math.pi * x)))
    order = math.log2(errs[0] / errs[1])
    assert abs(order - 2.0) <= 0.2


def _suite_sine_coefficients_closed_form():
    exp = spectral.sine_coeffs(lambda x: np.where(x >= 0.5, 1.0, 0.0), 256)
    n = np.arange(1, 257)
    want = math.sqrt(2.0) * (np.cos(n * math.pi / 2.0) - np.cos(n * math.pi)) / (
        n * math.pi
    )
    assert np.max(np.abs(exp.coeffs - want)) <= 1e-10


def _suite_parseval_identity():
    exp = spectral.sine_coeffs(lambda x: x * (1.0 - x), 1024)
    assert abs(float(exp.coeffs @ exp.coeffs) - 1.0 / 30.0) <= 1e-10


def _suite_smoothness_classification():
    tent = spectral.estimate_smoothness(lambda x: 1.0 - np.abs(2.0 * x - 1.0), 1024)
    step = spectral.estimate_smoothness(
        lambda x: np.where(x >= 0.5, 1.0, 0.0), 1024
    )
    assert abs(tent - 1.5) <= 0.25
    assert abs(step - 0.5) <= 0.25


_SELFTEST_SUITES = (
    ("weight-identities", _suite_weight_identities),
    ("caputo-linear-exactness", _suite_caputo_linear_exactness),
    ("caputo-quadratic-convergence", _suite_caputo_quadratic_convergence),
    ("integral-inverts-derivative", _suite_integral_inverts_derivative),
    ("mittag-leffler-classical", _suite_mittag_leffler_classical),
    ("mittag-leffler-relaxation", _suite_mittag_leffler_relaxation),
    ("mass-matrix-row-sums", _suite_mass_matrix_row_sums),
    ("stiffness-annihilates-linears", _suite_stiffness_annihilates_linears),
    ("tridiagonal-solver", _suite_tridiagonal_solver),
    ("l2-projection-orthogonality", _suite_l2_projection_orthogonality),
    ("ritz-projection-linears", _suite_ritz_projection_reproduces_linears),
    ("projection-order", _suite_projection_order),
    ("sine-coefficients-closed-form", _suite_sine_coefficients_closed_form),
    ("parseval-identity", _suite_parseval_identity),
    ("smoothness-classification", _suite_smoothness_classification),
)


def _run_selftest() -> int:
    failures = 0
    for name, suite in _SELFTEST_SUITES:
        try:
            suite()
        except Exception as exc:
            failures += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"ok   {name}")
    total = len(_SELFTEST_SUITES)
    print(f"{total - failures}/{total} suites passed")
    return 0 if failures == 0 else 1


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit status.

    Any error from the numeric modules is reported as a single line on
    stderr and a nonzero status; report files appear only on success.
    """
    try:
        if config.command == "selftest":
            return _run_selftest()
        if config.command == "solve":
            _run_solve(config)
        elif config.command == "order":
            _run_order(config)
        else:
            _run_timeerr(config)
        return 0
    except (ValueError, ArithmeticError, RuntimeError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    args = sys.argv[1:] if argv is None else list(argv)
    try:
        config = parse_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())

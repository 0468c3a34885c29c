"""Tests for the sine-eigenbasis smoothness machinery.

Covers:
- coefficient computation against closed-form Fourier integrals
- quadrature orthonormality (Gram matrix of the first 16 modes)
- Bessel/Parseval consistency
- fractional Sobolev norms: closed-form values, monotonicity in the
  order, truncation stability under mode doubling
- smoothness-index estimation for the four benchmark data classes
"""

import math

import numpy as np
import pytest

from subdiff.spectral import (
    SineExpansion,
    estimate_smoothness,
    hdot_norm,
    sine_coeffs,
)


def step(x):
    """Unit jump at the midpoint, the roughest benchmark datum."""
    return np.where(np.asarray(x, dtype=float) >= 0.5, 1.0, 0.0)


def tent(x):
    return 1.0 - np.abs(2.0 * np.asarray(x, dtype=float) - 1.0)


def sqrt_arch(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(x * (1.0 - x))


def parabola(x):
    x = np.asarray(x, dtype=float)
    return x * (1.0 - x)


class TestSineCoeffs:
    def test_first_eigenmode_is_unit_vector(self):
        """Expanding phi_1 itself gives coefficients (1, 0, 0, ...)."""
        c = sine_coeffs(lambda x: math.sqrt(2.0) * np.sin(np.pi * x), 64).coeffs
        assert abs(c[0] - 1.0) < 1e-12
        assert np.max(np.abs(c[1:])) < 1e-10

    def test_step_against_closed_form(self):
        """The midpoint jump has c_n = sqrt(2)(cos(n pi/2) - cos(n pi))/(n pi)."""
        exp = sine_coeffs(step, 512)
        n = np.arange(1, 513)
        oracle = math.sqrt(2.0) * (np.cos(n * np.pi / 2) - np.cos(n * np.pi)) / (n * np.pi)
        assert np.max(np.abs(exp.coeffs - oracle)) < 1e-12

    def test_sqrt_arch_decay_rate(self):
        """Coefficients of sqrt(x(1-x)) decay like n^(-3/2).

        The odd-mode amplitudes follow a Bessel J1 envelope of size
        about 0.32 after the n^(3/2) rescaling; even modes vanish by
        symmetry.  Boundedness of the rescaled tail is the point.
        """
        c = sine_coeffs(sqrt_arch, 512).coeffs
        n = np.arange(1, 513)
        window = (n >= 50) & (n <= 500)
        assert np.max(np.abs(c[window]) * n[window] ** 1.5) < 0.5

    def test_even_modes_of_symmetric_data_vanish(self):
        """Data symmetric about 1/2 has no antisymmetric content."""
        c = sine_coeffs(parabola, 64).coeffs
        assert np.max(np.abs(c[1::2])) < 1e-15

    def test_parseval_for_parabola(self):
        """sum c_n^2 approaches ||x(1-x)||^2 = 1/30 from below."""
        c = sine_coeffs(parabola, 256).coeffs
        total = float(c @ c)
        assert total <= 1.0 / 30.0 + 1e-8
        assert abs(total - 1.0 / 30.0) < 1e-10

    def test_gram_matrix_is_identity(self):
        """The quadrature reproduces orthonormality of the first 16 modes."""
        worst = 0.0
        for m in range(1, 17):
            c = sine_coeffs(
                lambda x, m=m: math.sqrt(2.0) * np.sin(m * np.pi * x), 16
            ).coeffs
            unit = np.zeros(16)
            unit[m - 1] = 1.0
            worst = max(worst, float(np.max(np.abs(c - unit))))
        assert worst < 1e-10

    def test_scalar_only_callable(self):
        """Functions that only accept floats are sampled pointwise."""
        exp = sine_coeffs(lambda x: x * (1.0 - x), 32)
        oracle = sine_coeffs(parabola, 32)
        assert np.array_equal(exp.coeffs, oracle.coeffs)

    def test_rejects_zero_modes(self):
        with pytest.raises(ValueError, match="mode"):
            sine_coeffs(parabola, 0)

    def test_rejects_non_finite_sample(self):
        with pytest.raises(ValueError, match="non-finite"):
            sine_coeffs(lambda x: np.where(np.asarray(x) > 0.5, np.nan, 1.0), 16)

    def test_expansion_shape_validated(self):
        with pytest.raises(ValueError, match="shape"):
            SineExpansion(coeffs=np.zeros(3), n_modes=4)


class TestHdotNorm:
    def test_order_zero_is_l2_norm(self):
        exp = sine_coeffs(lambda x: math.sqrt(2.0) * np.sin(np.pi * x), 32)
        assert abs(hdot_norm(exp, 0.0) - 1.0) < 1e-12

    def test_order_one_on_first_mode(self):
        """lambda_1 = pi^2, so the H1 norm of phi_1 is pi."""
        exp = sine_coeffs(lambda x: math.sqrt(2.0) * np.sin(np.pi * x), 32)
        assert abs(hdot_norm(exp, 1.0) - np.pi) < 1e-12

    def test_order_two_closed_form(self):
        """c = (1, 1) at s = 2 gives sqrt(pi^4 + 16 pi^4) = pi^2 sqrt(17)."""
        exp = SineExpansion(coeffs=np.array([1.0, 1.0]), n_modes=2)
        assert abs(hdot_norm(exp, 2.0) - np.pi**2 * math.sqrt(17.0)) < 1e-12

    def test_nondecreasing_in_order(self):
        """Every eigenvalue exceeds 1, so the norm grows with s."""
        rng = np.random.default_rng(20240817)
        orders = np.linspace(0.0, 2.0, 21)
        for _ in range(50):
            exp = SineExpansion(coeffs=rng.standard_normal(40), n_modes=40)
            norms = [hdot_norm(exp, s) for s in orders]
            assert all(b >= a for a, b in zip(norms, norms[1:]))

    def test_truncation_stability_for_smooth_data(self):
        """Doubling the mode count moves the norm of x(1-x) by under 1%."""
        for s in (0.0, 0.5, 1.0, 1.5, 2.0):
            coarse = hdot_norm(sine_coeffs(parabola, 1024), s)
            fine = hdot_norm(sine_coeffs(parabola, 2048), s)
            assert abs(fine - coarse) <= 0.01 * coarse

    def test_rejects_order_outside_range(self):
        exp = SineExpansion(coeffs=np.array([1.0]), n_modes=1)
        with pytest.raises(ValueError, match="0, 2"):
            hdot_norm(exp, -0.5)
        with pytest.raises(ValueError, match="0, 2"):
            hdot_norm(exp, 2.5)


class TestEstimateSmoothness:
    def test_step_is_half(self):
        """c_n ~ 1/n puts the jump just below the H^(1/2) threshold."""
        assert 0.4 <= estimate_smoothness(step, 1024) <= 0.6

    def test_tent_is_three_halves(self):
        """c_n ~ 1/n^2 for the kinked tent."""
        assert 1.35 <= estimate_smoothness(tent, 1024) <= 1.65

    def test_sqrt_arch_is_one(self):
        """c_n ~ n^(-3/2) despite the Bessel oscillation on top."""
        assert 0.85 <= estimate_smoothness(sqrt_arch, 1024) <= 1.15

    def test_smooth_data_capped_at_two(self):
        """x(1-x) decays faster than the fit ceiling and clips to 2."""
        assert estimate_smoothness(parabola, 1024) == 2.0

    def test_pure_eigenmode_is_degenerate(self):
        """A single low mode leaves nothing in the fit window."""
        with pytest.raises(ValueError, match="degenerate"):
            estimate_smoothness(lambda x: np.sin(np.pi * x), 256)

    def test_rejects_short_expansion(self):
        with pytest.raises(ValueError, match="64"):
            estimate_smoothness(step, 32)

"""Test suite for the closed-form, quadrature and Monte Carlo backends."""
import math
import time

import numpy as np
import pytest

from src.core.config import MonteCarloConfig, QuadratureConfig
from src.core.exceptions import DomainError, UnsupportedConfigurationError
from src.core.mathcore import ball_volume, sphere_area
from src.domain.functions import TestFunction
from src.domain.models import Ellipsoid, MixedExponent, NormMethod, Parallelepiped, ProductSet
from src.infrastructure.integration.backends.closed_form_backend import ClosedFormBackend
from src.infrastructure.integration.backends.monte_carlo_backend import MonteCarloBackend
from src.infrastructure.integration.backends.quadrature_backend import (
    QuadratureBackend,
    gauss_legendre,
    power_spread,
)
from src.services.fundamental import theta_scaled, theta_unit


@pytest.fixture
def closed_form():
    return ClosedFormBackend()


@pytest.fixture
def quadrature():
    return QuadratureBackend(QuadratureConfig())


@pytest.fixture
def monte_carlo():
    return MonteCarloBackend(MonteCarloConfig(samples=200_000), seed=11)


class TestClosedForm:
    """Test cases for ClosedFormBackend."""

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_gaussian(self, closed_form, d):
        """Test integral of exp(-p |x|^2) = (pi / p)^(d/2)."""
        p = 2.5
        f = TestFunction.gaussian([1.0] * d)
        estimate = closed_form.power_integral(f, p, 0.0, "euclidean")
        assert estimate.value == pytest.approx((math.pi / p) ** (d / 2.0), rel=1e-13)
        assert estimate.method is NormMethod.CLOSED_FORM

    def test_anisotropic_gaussian(self, closed_form):
        """Test that det(S)^(-1/2) enters the integral."""
        f = TestFunction.gaussian([1.0, 4.0])
        estimate = closed_form.power_integral(f, 1.0, 0.0, "euclidean")
        assert estimate.value == pytest.approx(math.pi / 2.0, rel=1e-13)

    def test_weighted_ball(self, closed_form):
        """Test integral over the unit ball of |x|^alpha = |S^(d-1)| / (d + alpha)."""
        f = TestFunction.unit_ball(3)
        estimate = closed_form.power_integral(f, 2.0, 1.5, "euclidean")
        assert estimate.value == pytest.approx(sphere_area(3) / 4.5, rel=1e-13)

    def test_box_and_triangle(self, closed_form):
        """Test the measures of a box and the triangle."""
        box = TestFunction.box([0.0, 0.0], [2.0, 3.0], amplitude=2.0)
        assert closed_form.power_integral(box, 2.0, 0.0, "euclidean").value == pytest.approx(24.0)
        assert closed_form.power_integral(TestFunction.triangle(2.0), 3.0, 0.0, "euclidean").value == pytest.approx(2.0)

    def test_unsupported(self, closed_form):
        """Test that a weighted non-centered Gaussian is declined."""
        f = TestFunction.gaussian([1.0, 2.0], center=[1.0, 0.0])
        assert not closed_form.supports_power_integral(f, 1.0, "euclidean")
        with pytest.raises(UnsupportedConfigurationError):
            closed_form.power_integral(f, 2.0, 1.0, "euclidean")

    def test_mixed_ellipsoid(self, closed_form):
        """Test that the ellipsoid mixed norm equals the recurrence."""
        f = TestFunction.unit_ball(2)
        estimate = closed_form.mixed_norm(f, MixedExponent.per_coordinate([1.5, 4.0]))
        assert estimate.value == pytest.approx(theta_unit([1.5, 4.0]), rel=1e-14)

    def test_mixed_box(self, closed_form):
        """Test that the box mixed norm is prod side^(1/p)."""
        f = TestFunction.box([0.0, 0.0, 0.0], [4.0, 9.0, 8.0])
        estimate = closed_form.mixed_norm(f, MixedExponent((2.0, 3.0), (2, 1)))
        assert estimate.value == pytest.approx(6.0 * 2.0, rel=1e-14)


class TestQuadrature:
    """Test cases for QuadratureBackend."""

    def test_gauss_legendre_polynomial(self):
        """Test that the tensor rule integrates x^2 y^4 exactly on [0, 1]^2."""
        value = gauss_legendre(lambda x: x[:, 0] ** 2 * x[:, 1] ** 4, np.zeros(2), np.ones(2), 8)
        assert value == pytest.approx(1.0 / 15.0, rel=1e-14)

    @pytest.mark.parametrize("d,gamma,p", [(1, 0.25, 2.0), (2, 0.5, 3.0), (3, 1.0, 2.0)])
    def test_power_decay_radial(self, quadrature, d, gamma, p):
        """Test integral over the unit ball of |x|^(-gamma p) = |S^(d-1)| / (d - gamma p)."""
        f = TestFunction.power_decay(d, gamma)
        estimate = quadrature.power_integral(f, p, 0.0, "euclidean")
        assert estimate.value == pytest.approx(sphere_area(d) / (d - gamma * p), rel=1e-9)

    def test_weighted_gaussian_matches_closed_form(self, quadrature, closed_form):
        """Test that polar quadrature agrees with the closed form for a weighted Gaussian."""
        f = TestFunction.gaussian([2.0, 2.0])
        numeric = quadrature.power_integral(f, 3.0, 1.0, "euclidean")
        exact = closed_form.power_integral(f, 3.0, 1.0, "euclidean")
        assert numeric.value == pytest.approx(exact.value, rel=1e-8)

    def test_anisotropic_weight(self, quadrature):
        """Test integral over [-2, 2] of |x| = 4."""
        f = TestFunction.ellipsoid([2.0])
        estimate = quadrature.power_integral(f, 2.0, 1.0, "euclidean")
        assert estimate.value == pytest.approx(4.0, rel=1e-10)

    def test_weighted_box(self, quadrature):
        """Test integral over [0, 1]^2 of |x| = (sqrt 2 + asinh 1) / 3."""
        f = TestFunction.box([0.0, 0.0], [1.0, 1.0])
        estimate = quadrature.power_integral(f, 2.0, 1.0, "euclidean")
        assert estimate.value == pytest.approx((math.sqrt(2.0) + math.asinh(1.0)) / 3.0, rel=1e-6)

    @pytest.mark.parametrize("p,expected", [((1.0, 3.0), 4.0 ** (-1.0 / 3.0)), ((3.0, 1.0), 0.75)])
    def test_triangle_mixed(self, quadrature, p, expected):
        """Test the order-dependent mixed norms of the triangle."""
        estimate = quadrature.mixed_norm(TestFunction.triangle(), MixedExponent.per_coordinate(p))
        assert estimate.value == pytest.approx(expected, rel=1e-6)

    @pytest.mark.parametrize("p,expected", [((1.0, 3.0), 4.0 ** (-1.0 / 3.0)), ((3.0, 1.0), 0.75)])
    def test_triangle_error_bound(self, quadrature, p, expected):
        """Test that the reported error covers the true error and stays small."""
        started = time.perf_counter()
        estimate = quadrature.mixed_norm(TestFunction.triangle(), MixedExponent.per_coordinate(p))
        assert time.perf_counter() - started < 30.0
        assert abs(estimate.value - expected) <= estimate.abs_error + 1e-12
        assert estimate.abs_error <= 1e-6 * expected
        assert estimate.method is NormMethod.QUADRATURE

    def test_scaled_triangle_mixed(self, quadrature):
        """Test a composed triangle: |V_A f| = |det A_1|^(-1/p_1) |det A_2|^(-1/p_2) |f| for diagonal A."""
        pm = MixedExponent.per_coordinate((3.0, 1.0))
        f = TestFunction.triangle().compose(np.diag([2.0, 3.0]))
        estimate = quadrature.mixed_norm(f, pm)
        assert estimate.value == pytest.approx(0.75 * 2.0 ** (-1.0 / 3.0) / 3.0, rel=1e-6)

    def test_power_spread(self):
        """Test the worst-case change of v^r over [v - e, v + e]."""
        assert power_spread(8.0, 0.0, 1.0 / 3.0) == 0.0
        assert power_spread(9.0, 7.0, 0.5) == pytest.approx(3.0 - math.sqrt(2.0), rel=1e-14)
        assert power_spread(2.0, 1.0, 2.0) == pytest.approx(5.0, rel=1e-14)
        assert power_spread(8.0, 19.0, 1.0 / 3.0) == pytest.approx(2.0, rel=1e-14)

    def test_mixed_needs_scalar_blocks(self, quadrature):
        """Test that multi-dimensional blocks are declined."""
        with pytest.raises(UnsupportedConfigurationError):
            quadrature.mixed_norm(TestFunction.unit_ball(3), MixedExponent((2.0, 3.0), (2, 1)))


class TestMonteCarlo:
    """Test cases for MonteCarloBackend."""

    def test_gaussian_integral(self, monte_carlo):
        """Test that the estimate lies within its error bound of (pi / 2)."""
        estimate = monte_carlo.power_integral(TestFunction.gaussian([1.0, 1.0]), 2.0, 0.0, "euclidean")
        assert abs(estimate.value - math.pi / 2.0) <= 2.0 * estimate.abs_error
        assert estimate.samples_or_nodes > 0

    def test_seed_is_deterministic(self):
        """Test that two backends with the same seed give identical estimates."""
        f = TestFunction.unit_ball(2)
        first = MonteCarloBackend(MonteCarloConfig(samples=20_000), seed=5).power_integral(f, 1.0, 0.0, "euclidean")
        second = MonteCarloBackend(MonteCarloConfig(samples=20_000), seed=5).power_integral(f, 1.0, 0.0, "euclidean")
        assert first.value == second.value

    def test_estimates_do_not_depend_on_call_order(self):
        """Test that each request draws from its own generator, so earlier calls leave it unchanged."""
        ball, gaussian = TestFunction.unit_ball(2), TestFunction.gaussian([1.0, 2.0])
        pm = MixedExponent.per_coordinate([1.0, 2.0])
        first = MonteCarloBackend(MonteCarloConfig(samples=20_000), seed=5)
        second = MonteCarloBackend(MonteCarloConfig(samples=20_000), seed=5)
        a = (first.power_integral(ball, 1.0, 0.0, "euclidean"), first.mixed_norm(gaussian, pm))
        b = (second.mixed_norm(gaussian, pm), second.power_integral(ball, 1.0, 0.0, "euclidean"))
        assert a[0].value == b[1].value
        assert a[1].value == b[0].value

    def test_repeated_requests_agree(self, monte_carlo):
        """Test that one request repeated on one backend gives the same estimate."""
        f = TestFunction.gaussian([1.0, 1.0])
        first = monte_carlo.power_integral(f, 2.0, 0.0, "euclidean")
        assert monte_carlo.power_integral(f, 2.0, 0.0, "euclidean").value == first.value

    def test_error_shrinks_with_samples(self, monte_carlo):
        """Test that doubling n shrinks the mean error by about sqrt(2) over ten seeds."""
        disc, pm = Ellipsoid((1.0, 1.0)), MixedExponent.per_coordinate([1.0, 2.0])
        coarse = np.mean([monte_carlo.region_norm(disc, pm, 20_000, seed).abs_error for seed in range(10)])
        fine = np.mean([monte_carlo.region_norm(disc, pm, 40_000, seed).abs_error for seed in range(10)])
        assert 1.2 <= coarse / fine <= 1.7

    def test_region_two_blocks(self, monte_carlo):
        """Test the disc with exponents (1, 2) against the recurrence."""
        estimate = monte_carlo.region_norm(Ellipsoid((1.0, 1.0)), MixedExponent.per_coordinate([1.0, 2.0]), seed=3)
        exact = theta_unit([1.0, 2.0])
        assert exact == pytest.approx(math.sqrt(16.0 / 3.0), rel=1e-12)
        assert abs(estimate.value - exact) <= 2.0 * estimate.abs_error + 1e-12

    def test_region_three_blocks(self, monte_carlo):
        """Test an ellipsoid in d = 3 with one million samples against the closed form."""
        p = (1.5, 3.0, 2.0)
        estimate = monte_carlo.region_norm(Ellipsoid((1.0, 2.0, 0.5)), MixedExponent.per_coordinate(p), 10 ** 6, seed=8)
        assert abs(estimate.value - theta_scaled(p, (1.0, 2.0, 0.5))) <= estimate.abs_error
        assert estimate.abs_error < 1e-2 * estimate.value

    def test_region_box_is_exact(self, monte_carlo):
        """Test that a box has constant sections, so the estimate carries no noise."""
        estimate = monte_carlo.region_norm(Parallelepiped((0.0, 0.0), (4.0, 9.0)),
                                           MixedExponent.per_coordinate([2.0, 2.5]), seed=1)
        assert estimate.value == pytest.approx(2.0 * 9.0 ** 0.4, rel=1e-12)
        assert estimate.abs_error == pytest.approx(0.0, abs=1e-12)

    def test_region_uniform_exponent(self, monte_carlo):
        """Test hit-or-miss for a uniform exponent on the unit ball."""
        estimate = monte_carlo.region_norm(Ellipsoid((1.0, 1.0, 1.0)), MixedExponent.uniform(2.0, [1, 1, 1]), seed=2)
        assert abs(estimate.value - ball_volume(3) ** 0.5) <= 2.0 * estimate.abs_error

    def test_region_product_set(self, monte_carlo):
        """Test a product set whose inner block is an ellipse."""
        D = ProductSet((Ellipsoid((1.0, 2.0)), Parallelepiped((0.0,), (3.0,))))
        estimate = monte_carlo.region_norm(D, MixedExponent((2.0, 4.0), (2, 1)), seed=4)
        assert estimate.value == pytest.approx((2.0 * math.pi) ** 0.5 * 3.0 ** 0.25, rel=1e-12)

    def test_too_few_samples(self, monte_carlo):
        """Test that fewer than min_samples raises DomainError."""
        with pytest.raises(DomainError):
            monte_carlo.region_norm(Ellipsoid((1.0, 1.0)), MixedExponent.per_coordinate([1.0, 2.0]), n=100)

    def test_dimension_mismatch(self, monte_carlo):
        """Test that exponent blocks must cover the region."""
        with pytest.raises(DomainError):
            monte_carlo.region_norm(Ellipsoid((1.0, 1.0)), MixedExponent.per_coordinate([1.0, 2.0, 3.0]))

    def test_four_blocks_unsupported(self, monte_carlo):
        """Test that more than three exponent blocks are declined."""
        with pytest.raises(UnsupportedConfigurationError):
            monte_carlo.region_norm(Parallelepiped.cube(1.0, 4), MixedExponent.per_coordinate([1.0, 2.0, 3.0, 4.0]))

    def test_mixed_three_blocks_unsupported(self, monte_carlo):
        """Test that the generic nested estimator handles at most two blocks."""
        with pytest.raises(UnsupportedConfigurationError):
            monte_carlo.mixed_norm(TestFunction.gaussian([1.0, 1.0, 1.0]), MixedExponent.per_coordinate([1.0, 2.0, 3.0]))

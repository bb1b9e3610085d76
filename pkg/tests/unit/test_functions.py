"""Test suite for test functions: evaluation, structure and transformations."""
import math

import numpy as np
import pytest

from src.core.exceptions import DomainError
from src.domain.functions import FunctionKind, TestFunction


class TestConstruction:
    """Test cases for the constructors."""

    def test_gaussian_values(self):
        """Test exp(-c x^2) at a few points."""
        f = TestFunction.gaussian([1.0, 2.0])
        values = f.evaluate(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
        np.testing.assert_allclose(values, [1.0, math.exp(-1.0), math.exp(-2.0)], rtol=1e-14)

    def test_ellipsoid_membership(self):
        """Test membership in the ellipse with semi-axes (2, 0.5)."""
        f = TestFunction.ellipsoid([2.0, 0.5])
        values = f.evaluate(np.array([[1.9, 0.0], [0.0, 0.6], [1.0, 0.4]]))
        np.testing.assert_array_equal(values, [1.0, 0.0, 1.0])

    def test_box_membership(self):
        """Test membership in the box [1, 3] x [0, 2]."""
        f = TestFunction.box([1.0, 0.0], [2.0, 2.0])
        values = f.evaluate(np.array([[1.5, 1.0], [0.5, 1.0], [3.0, 2.0]]))
        np.testing.assert_array_equal(values, [1.0, 0.0, 1.0])

    def test_triangle_membership(self):
        """Test membership in {0 <= x2 <= x1 <= 1}."""
        f = TestFunction.triangle()
        values = f.evaluate(np.array([[0.5, 0.25], [0.25, 0.5], [1.5, 0.0]]))
        np.testing.assert_array_equal(values, [1.0, 0.0, 0.0])

    def test_power_decay_truncated(self):
        """Test |x|^(-gamma) inside the ball and 0 outside."""
        f = TestFunction.power_decay(2, 0.5, radius=2.0)
        values = f.evaluate(np.array([[1.0, 0.0], [0.0, 0.25], [3.0, 0.0]]))
        np.testing.assert_allclose(values, [1.0, 2.0, 0.0], rtol=1e-14)

    @pytest.mark.parametrize("build", [
        lambda: TestFunction.gaussian([1.0, -1.0]),
        lambda: TestFunction.ellipsoid([0.0]),
        lambda: TestFunction.box([0.0], [0.0]),
        lambda: TestFunction.triangle(-1.0),
        lambda: TestFunction.gaussian([1.0], amplitude=0.0),
        lambda: TestFunction.gaussian_quadratic(np.array([[1.0, 2.0], [2.0, 1.0]])),
        lambda: TestFunction.parallelotope([0.0, 0.0], np.array([[1.0, 2.0], [1.0, 2.0]])),
    ])
    def test_invalid_parameters(self, build):
        """Test that invalid parameters raise DomainError."""
        with pytest.raises(DomainError):
            build()

    def test_product_flattens(self):
        """Test that nested products are flattened."""
        g = TestFunction.gaussian([1.0])
        f = TestFunction.product(TestFunction.product(g, g), g)
        assert f.kind is FunctionKind.PRODUCT
        assert f.factor_dims == (1, 1, 1)
        assert f.dim == 3

    def test_dimension_mismatch(self):
        """Test that points of the wrong dimension raise DomainError."""
        with pytest.raises(DomainError):
            TestFunction.unit_ball(3).evaluate(np.zeros((2, 2)))


class TestIntegrability:
    """Test cases for max_exponent and check_exponent."""

    def test_power_decay_limit(self):
        """Test p < (d + alpha) / gamma."""
        f = TestFunction.power_decay(2, 0.5)
        assert f.max_exponent() == pytest.approx(4.0)
        assert f.max_exponent(2.0) == pytest.approx(8.0)
        f.check_exponent(3.9)
        with pytest.raises(DomainError):
            f.check_exponent(4.0)

    def test_bounded_function(self):
        """Test that bounded compactly supported functions allow every p."""
        assert TestFunction.box([0.0], [1.0]).max_exponent() == math.inf

    def test_below_one(self):
        """Test that exponents below 1 are rejected."""
        with pytest.raises(DomainError):
            TestFunction.unit_ball(2).check_exponent(0.5)


class TestFactorize:
    """Test cases for factorize."""

    def test_diagonal_gaussian(self):
        """Test that a diagonal Gaussian splits into its coordinate factors."""
        f = TestFunction.gaussian([1.0, 2.0, 3.0], amplitude=2.0)
        parts = f.factorize([1, 2])
        assert [g.dim for g in parts] == [1, 2]
        x = np.array([[0.3, -0.2, 0.7]])
        product = parts[0].evaluate(x[:, :1]) * parts[1].evaluate(x[:, 1:])
        np.testing.assert_allclose(product, f.evaluate(x), rtol=1e-14)

    def test_coupled_gaussian(self):
        """Test that a coupled Gaussian does not factor."""
        f = TestFunction.gaussian_quadratic(np.array([[2.0, 0.5], [0.5, 1.0]]))
        assert f.factorize([1, 1]) is None

    def test_triangle(self):
        """Test that the triangle does not factor."""
        assert TestFunction.triangle().factorize([1, 1]) is None

    def test_product_regroups(self):
        """Test that a product regroups its factors along coarser blocks."""
        f = TestFunction.product(TestFunction.gaussian([1.0]), TestFunction.box([0.0, 0.0], [1.0, 2.0]))
        parts = f.factorize([2, 1])
        assert [g.dim for g in parts] == [2, 1]

    def test_bad_blocks(self):
        """Test that blocks not summing to the dimension raise DomainError."""
        with pytest.raises(DomainError):
            TestFunction.gaussian([1.0, 1.0]).factorize([1, 2])


class TestTransformations:
    """Test cases for scaled and compose."""

    def test_scaled(self):
        """Test that scaling multiplies the values."""
        f = TestFunction.gaussian([1.0]).scaled(3.0)
        assert f.evaluate(np.array([[0.0]]))[0] == pytest.approx(3.0)

    def test_compose_matches_pointwise(self):
        """Test (V_A f)(x) = f(A x) for every kind."""
        A = np.array([[2.0, 1.0], [0.0, 0.5]])
        rng = np.random.default_rng(0)
        x = rng.uniform(-1.0, 1.0, size=(200, 2))
        functions = [
            TestFunction.gaussian([1.0, 2.0], center=[0.1, -0.2]),
            TestFunction.ellipsoid([1.0, 0.5]),
            TestFunction.box([-0.5, -0.5], [1.0, 1.0]),
            TestFunction.triangle(),
        ]
        for f in functions:
            np.testing.assert_allclose(f.compose(A).evaluate(x), f.evaluate(x @ A.T), atol=1e-12)

    def test_compose_block_diagonal_product(self):
        """Test that a block-diagonal matrix keeps a product factorable."""
        f = TestFunction.product(TestFunction.gaussian([1.0]), TestFunction.gaussian([2.0]))
        g = f.compose(np.diag([2.0, 3.0]))
        assert g.kind is FunctionKind.PRODUCT

    def test_compose_wrong_shape(self):
        """Test that a matrix of the wrong size raises DomainError."""
        with pytest.raises(DomainError):
            TestFunction.gaussian([1.0]).compose(np.eye(2))


class TestDescriptors:
    """Test cases for from_descriptor and describe."""

    def test_box(self):
        """Test box:sides=4;9."""
        f = TestFunction.from_descriptor("box:sides=4;9")
        assert f.is_axis_aligned_box
        assert f.describe()["edges"] == [[4.0, 0.0], [0.0, 9.0]]

    def test_power(self):
        """Test the power descriptor."""
        f = TestFunction.from_descriptor("power:dim=3,gamma=0.5,radius=2")
        assert f.kind is FunctionKind.POWER_DECAY
        assert f.describe()["gamma"] == 0.5

    def test_unknown_kind(self):
        """Test that an unknown kind raises DomainError."""
        with pytest.raises(DomainError):
            TestFunction.from_descriptor("sinc:width=1")

    def test_bad_number(self):
        """Test that a malformed number raises DomainError."""
        with pytest.raises(DomainError):
            TestFunction.from_descriptor("gaussian:scales=one")


class TestBreakPoints:
    """Test cases for line_breaks and section_breaks."""

    def test_triangle_sections(self):
        """Test the edges met by axis lines through the triangle."""
        f = TestFunction.triangle()
        assert f.section_breaks(0, [0.5, 0.3], -1.0, 2.0) == pytest.approx([0.3, 1.0])
        assert f.section_breaks(1, [0.6, 0.5], -1.0, 2.0) == pytest.approx([0.0, 0.6])

    def test_composed_triangle(self):
        """Test that a composed indicator maps its edges back through the matrix."""
        f = TestFunction.triangle().compose(np.diag([2.0, 1.0]))
        assert f.kind is FunctionKind.COMPOSED
        assert f.section_breaks(0, [0.5, 0.3], -1.0, 2.0) == pytest.approx([0.15, 0.5])

    def test_disc(self):
        """Test that a chord of the unit disc at height 0.6 ends at +-0.8."""
        f = TestFunction.unit_ball(2)
        assert f.section_breaks(0, [0.0, 0.6], -1.0, 1.0) == pytest.approx([-0.8, 0.8])

    def test_window_clips(self):
        """Test that only breaks strictly inside the window are kept."""
        f = TestFunction.triangle()
        assert f.section_breaks(0, [0.5, 0.3], 0.3, 1.0) == []

    def test_gaussian_is_smooth(self):
        """Test that Gaussians report no breaks."""
        assert TestFunction.gaussian([1.0, 2.0]).line_breaks(np.zeros(2), np.array([1.0, 0.0])) == []

    def test_zero_direction(self):
        """Test that a zero direction has no breaks."""
        assert TestFunction.triangle().line_breaks(np.array([0.5, 0.2]), np.zeros(2)) == []

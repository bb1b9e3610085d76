"""Test suite for the special functions and the monotone root finder."""
import math

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from src.core.exceptions import BracketError, DomainError
from src.core.mathcore import (
    ball_volume,
    beta,
    find_root_increasing,
    log_beta,
    log_gamma,
    require_positive,
    sphere_area,
)


class TestLogGamma:
    """Test cases for log_gamma and the Beta function."""

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=1e-3, max_value=170.0))
    def test_matches_lgamma(self, x):
        """Test agreement with math.lgamma on (0, 170]."""
        assert log_gamma(x) == pytest.approx(math.lgamma(x), rel=1e-12, abs=1e-12)

    def test_integer_arguments(self):
        """Test Gamma(n) = (n - 1)!."""
        for n in range(1, 12):
            assert math.exp(log_gamma(n)) == pytest.approx(math.factorial(n - 1), rel=1e-12)

    def test_half(self):
        """Test Gamma(1/2) = sqrt(pi) and Gamma(1/4) on the reflection branch."""
        assert math.exp(log_gamma(0.5)) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
        assert math.exp(log_gamma(0.25)) == pytest.approx(math.gamma(0.25), rel=1e-13)

    @pytest.mark.parametrize("x", [0.0, -1.0, math.inf, math.nan])
    def test_rejects_non_positive(self, x):
        """Test that non-positive and non-finite arguments raise DomainError."""
        with pytest.raises(DomainError):
            log_gamma(x)

    def test_beta_values(self):
        """Test B(1, 1) = 1, B(1/2, 1/2) = pi and B(a, b) = B(b, a)."""
        assert beta(1.0, 1.0) == pytest.approx(1.0, rel=1e-14)
        assert beta(0.5, 0.5) == pytest.approx(math.pi, rel=1e-13)
        assert log_beta(2.5, 7.0) == pytest.approx(log_beta(7.0, 2.5), rel=1e-14)

    def test_beta_recurrence(self):
        """Test B(a + 1, b) = B(a, b) a / (a + b)."""
        a, b = 1.7, 3.2
        assert beta(a + 1.0, b) == pytest.approx(beta(a, b) * a / (a + b), rel=1e-13)


class TestBallVolume:
    """Test cases for ball_volume and sphere_area."""

    def test_low_dimensions(self):
        """Test the familiar values 2, pi, 4 pi / 3."""
        assert ball_volume(1) == pytest.approx(2.0, rel=1e-14)
        assert ball_volume(2) == pytest.approx(math.pi, rel=1e-14)
        assert ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-14)

    def test_dimension_recurrence(self):
        """Test V_d = 2 pi / d V_(d-2)."""
        for d in range(3, 12):
            assert ball_volume(d) == pytest.approx(2.0 * math.pi / d * ball_volume(d - 2), rel=1e-13)

    def test_sphere_area(self):
        """Test |S^1| = 2 pi and |S^2| = 4 pi."""
        assert sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-14)
        assert sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-14)

    @pytest.mark.parametrize("d", [0, -2, 1.5, True])
    def test_invalid_dimension(self, d):
        """Test that non-positive or non-integer dimensions raise DomainError."""
        with pytest.raises(DomainError):
            ball_volume(d)


class TestRootFinding:
    """Test cases for find_root_increasing."""

    def test_square_root(self):
        """Test the root of x^2 - 2 on [0, 2]."""
        root = find_root_increasing(lambda x: x * x - 2.0, 0.0, 2.0)
        assert root == pytest.approx(math.sqrt(2.0), abs=1e-13)

    def test_decreasing_function(self):
        """Test that a decreasing function is handled as well."""
        root = find_root_increasing(lambda x: 1.0 - x ** 3, 0.0, 3.0)
        assert root == pytest.approx(1.0, abs=1e-13)

    def test_root_at_endpoint(self):
        """Test that an exact zero at an end is returned directly."""
        assert find_root_increasing(lambda x: x - 1.0, 1.0, 5.0) == 1.0

    def test_no_sign_change(self):
        """Test that a bracket without sign change raises BracketError."""
        with pytest.raises(BracketError):
            find_root_increasing(lambda x: x * x + 1.0, -1.0, 1.0)

    def test_invalid_bracket(self):
        """Test that an empty bracket raises BracketError."""
        with pytest.raises(BracketError):
            find_root_increasing(lambda x: x, 2.0, 1.0)


class TestRequirePositive:
    """Test cases for require_positive."""

    def test_returns_float(self):
        """Test that valid input is returned as float."""
        assert require_positive(3) == 3.0

    @pytest.mark.parametrize("x", [0, -1e-300, "abc", None, math.inf])
    def test_rejects(self, x):
        """Test that invalid input raises DomainError."""
        with pytest.raises(DomainError):
            require_positive(x)

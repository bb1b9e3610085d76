"""Test suite for suprema over exponent intervals and boxes."""
import math

import numpy as np
import pytest

from src.core.config import SupremumConfig
from src.services.supremum import SupremumSearch, exponent_grid, golden_section_max


@pytest.fixture
def search():
    return SupremumSearch(SupremumConfig())


class TestExponentGrid:
    """Test cases for exponent_grid."""

    def test_finite_interval_is_interior(self):
        """Test that all points lie strictly inside a finite interval."""
        grid = exponent_grid(1.0, 10.0, 64)
        assert len(grid) == 64
        assert np.all(grid > 1.0) and np.all(grid < 10.0)

    def test_dense_near_ends(self):
        """Test that the grid reaches within 1e-5 of both ends."""
        grid = exponent_grid(2.0, 3.0, 128)
        assert grid.min() - 2.0 < 1e-5
        assert 3.0 - grid.max() < 1e-5

    def test_infinite_interval(self):
        """Test that an infinite interval is covered up to 1e8 times its start."""
        grid = exponent_grid(1.0, math.inf, 100)
        assert np.all(grid > 1.0)
        assert grid.max() > 1e7


class TestGoldenSection:
    """Test cases for golden_section_max."""

    def test_parabola(self):
        """Test the maximum of -(x - 2)^2 on [0, 5]."""
        x, value, _ = golden_section_max(lambda x: -(x - 2.0) ** 2, 0.0, 5.0, 1e-12)
        assert x == pytest.approx(2.0, abs=1e-8)
        assert value == pytest.approx(0.0, abs=1e-14)

    def test_nan_is_minus_infinity(self):
        """Test that NaN values never win."""
        x, value, _ = golden_section_max(lambda x: math.nan if x > 3.0 else x, 0.0, 4.0, 1e-10)
        assert value <= 3.0
        assert x <= 3.0


class TestMaximize:
    """Test cases for SupremumSearch.maximize."""

    def test_interior_maximum(self, search):
        """Test sup of delta^(1/p) / p for delta < 1, attained at p = -ln(delta)."""
        delta = math.exp(-4.0)
        result = search.maximize(lambda p: delta ** (1.0 / p) / p, 1.0, math.inf)
        assert result.value == pytest.approx(1.0 / (4.0 * math.e), rel=1e-10)
        assert result.argmax[0] == pytest.approx(4.0, rel=1e-4)
        assert not result.at_boundary

    def test_boundary_supremum(self, search):
        """Test that a supremum approached at the left end is found as a limit."""
        result = search.maximize(lambda p: 1.0 / p, 1.0, 10.0)
        assert result.value == pytest.approx(1.0, rel=1e-9)
        assert result.at_boundary
        assert result.argmax[0] == 1.0

    def test_limit_at_infinity(self, search):
        """Test that the limit 1 of delta^(1/p) for delta < 1 is approached at infinity."""
        result = search.maximize(lambda p: 0.5 ** (1.0 / p), 1.0, math.inf)
        assert result.value == pytest.approx(1.0, rel=1e-8)

    def test_unbounded(self, search):
        """Test that an objective that is +inf somewhere gives +inf."""
        result = search.maximize(lambda p: math.inf if p > 5.0 else 1.0, 1.0, 10.0)
        assert result.value == math.inf

    def test_grid_override(self, search):
        """Test that a coarser grid still refines to the same value."""
        delta = math.exp(-3.0)
        fine = search.maximize(lambda p: delta ** (1.0 / p) / p, 1.0, math.inf)
        coarse = search.maximize(lambda p: delta ** (1.0 / p) / p, 1.0, math.inf, grid_points=16)
        assert coarse.value == pytest.approx(fine.value, rel=1e-8)


class TestMaximizeBox:
    """Test cases for SupremumSearch.maximize_box."""

    def test_separable_concave(self, search):
        """Test a concave objective with its maximum inside the box."""
        result = search.maximize_box(lambda p: -(p[0] - 2.0) ** 2 - (p[1] - 3.0) ** 2, [(1.0, 5.0), (1.0, 5.0)])
        assert result.value == pytest.approx(0.0, abs=1e-10)
        assert result.argmax[0] == pytest.approx(2.0, abs=1e-4)
        assert result.argmax[1] == pytest.approx(3.0, abs=1e-4)

    def test_corner_maximum(self, search):
        """Test that a maximum at a corner of the box is approached closely."""
        result = search.maximize_box(lambda p: 1.0 / (p[0] * p[1]), [(1.0, 4.0), (2.0, 4.0)])
        assert result.value == pytest.approx(0.5, rel=1e-7)

"""Suprema over open exponent intervals and boxes.

One-dimensional search: log-spaced grid scan, golden-section refinement
around the best grid bracket, and boundary limits estimated from a
geometrically shrinking offset with one Richardson step. Multi-dimensional
search: tensor grid plus coordinate-wise golden-section sweeps.
"""
import itertools
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from src.core.config import SupremumConfig
from src.core.logging import get_logger

logger = get_logger(__name__)

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_GRID_OFFSET_DECADES = 6


def exponent_grid(lower: float, upper: float, n: int) -> np.ndarray:
    """
    Interior points of (lower, upper), dense near both ends.

    Finite intervals use offsets log-spaced from 1e-6 of the width up to the
    midpoint from each side; infinite ones use offsets log-spaced over
    [1e-6, 1e8] times max(1, lower).
    """
    if math.isinf(upper):
        scale = max(1.0, lower)
        return lower + scale * np.logspace(-_GRID_OFFSET_DECADES, 8, n)
    width = upper - lower
    half = n // 2
    left = np.logspace(-_GRID_OFFSET_DECADES, math.log10(0.5), n - half, endpoint=False)
    right = np.logspace(-_GRID_OFFSET_DECADES, math.log10(0.5), half, endpoint=False)[::-1]
    return np.concatenate([lower + width * left, upper - width * right])


@dataclass
class SupremumResult:
    """Best value found and where."""
    value: float
    argmax: Tuple[float, ...]
    evaluations: int
    at_boundary: bool = False


def _safe(objective: Callable, x) -> float:
    value = objective(x)
    if value is None or math.isnan(value):
        return -math.inf
    return float(value)


def golden_section_max(objective: Callable[[float], float], lo: float, hi: float,
                       tol: float) -> Tuple[float, float, int]:
    """
    Maximize a unimodal function on [lo, hi] by golden-section search.

    Returns:
        (argmax, value, evaluations)
    """
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc = _safe(objective, c)
    fd = _safe(objective, d)
    evaluations = 2
    while abs(hi - lo) > tol * max(1.0, abs(lo)):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = _safe(objective, c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = _safe(objective, d)
        evaluations += 1
        if evaluations > 400:
            break
    if fc >= fd:
        return c, fc, evaluations
    return d, fd, evaluations


class SupremumSearch:
    """Grid-plus-refinement suprema with configurable resolution."""

    def __init__(self, config: SupremumConfig):
        self.config = config

    def boundary_limit(self, objective: Callable[[float], float], lower: float, upper: float,
                       side: str) -> Tuple[float, float, int]:
        """
        Limit of the objective at one end of (lower, upper).

        Offsets shrink geometrically from 1e-3 by factors of 10; the limit is
        extrapolated linearly in the offset from the last two finite values.

        Returns:
            (limit, point of the last evaluation, evaluations)
        """
        if side == "upper" and math.isinf(upper):
            scale = max(1.0, lower)
            points = [scale * 10.0 ** (3 + k) for k in range(self.config.boundary_steps)]
            offsets = [1.0 / p for p in points]
        else:
            width = (upper - lower) if math.isfinite(upper) else max(1.0, lower)
            offsets = [width * 10.0 ** (-3 - k) for k in range(self.config.boundary_steps)]
            if side == "lower":
                points = [lower + e for e in offsets]
            else:
                points = [upper - e for e in offsets]

        finite: List[Tuple[float, float, float]] = []
        for eps, p in zip(offsets, points):
            if not lower < p < upper:
                continue
            value = _safe(objective, p)
            if math.isfinite(value):
                finite.append((eps, p, value))
            elif value == math.inf:
                return math.inf, p, len(offsets)
        if not finite:
            return -math.inf, points[-1], len(offsets)
        if len(finite) == 1:
            return finite[0][2], finite[0][1], len(offsets)
        (e1, _, v1), (e2, p2, v2) = finite[-2], finite[-1]
        limit = v2 + (v2 - v1) * e2 / (e1 - e2)
        return limit, p2, len(offsets)

    def maximize(self, objective: Callable[[float], float], lower: float, upper: float,
                 grid_points: Optional[int] = None) -> SupremumResult:
        """
        Supremum of ``objective`` over the open interval (lower, upper).

        Args:
            objective: Function of the exponent p; NaN counts as -inf
            lower: Left end of the interval (finite)
            upper: Right end of the interval (may be inf)
            grid_points: Override of the configured grid size

        Returns:
            SupremumResult; value +inf if the objective is unbounded on the grid
        """
        n = grid_points or self.config.grid_points
        grid = exponent_grid(lower, upper, n)
        values = np.array([_safe(objective, p) for p in grid])
        evaluations = len(grid)

        if np.any(values == math.inf):
            i = int(np.argmax(values == math.inf))
            logger.debug(f"Objective unbounded at p={grid[i]:.6g}")
            return SupremumResult(math.inf, (float(grid[i]),), evaluations)

        i = int(np.argmax(values))
        best_p, best_v = float(grid[i]), float(values[i])
        lo = grid[i - 1] if i > 0 else lower + 0.5 * (grid[0] - lower)
        hi = grid[i + 1] if i + 1 < len(grid) else (
            grid[-1] * 2.0 if math.isinf(upper) else grid[-1] + 0.5 * (upper - grid[-1]))
        p_ref, v_ref, used = golden_section_max(objective, float(lo), float(hi), self.config.golden_tol)
        evaluations += used
        if v_ref > best_v:
            best_p, best_v = p_ref, v_ref

        at_boundary = False
        for side in ("lower", "upper"):
            limit, point, used = self.boundary_limit(objective, lower, upper, side)
            evaluations += used
            if limit == math.inf:
                return SupremumResult(math.inf, (point,), evaluations, True)
            if limit > best_v:
                best_p, best_v, at_boundary = (lower if side == "lower" else upper), limit, True

        return SupremumResult(best_v, (best_p,), evaluations, at_boundary)

    def maximize_box(self, objective: Callable[[Sequence[float]], float],
                     bounds: Sequence[Tuple[float, float]],
                     grid_points: Optional[int] = None) -> SupremumResult:
        """
        Supremum over a box of exponent vectors.

        The per-coordinate grid also contains points 1e-9 (relative) from
        each finite end, so boundary optima are approached closely.
        """
        n = grid_points or self.config.agls_grid_points
        axes = []
        for lo, hi in bounds:
            axis = exponent_grid(lo, hi, n)
            extra = [lo + 1e-9 * (hi - lo if math.isfinite(hi) else max(1.0, lo))]
            if math.isfinite(hi):
                extra.append(hi - 1e-9 * (hi - lo))
            axes.append(np.unique(np.concatenate([axis, extra])))

        best_v, best_idx = -math.inf, None
        evaluations = 0
        for idx in itertools.product(*(range(len(a)) for a in axes)):
            point = [float(axes[k][j]) for k, j in enumerate(idx)]
            value = _safe(objective, point)
            evaluations += 1
            if value == math.inf:
                return SupremumResult(math.inf, tuple(point), evaluations)
            if value > best_v:
                best_v, best_idx = value, idx

        if best_idx is None:
            return SupremumResult(-math.inf, tuple(), evaluations)
        best_point = [float(axes[k][j]) for k, j in enumerate(best_idx)]

        for _ in range(2):
            for k, j in enumerate(best_idx):
                axis = axes[k]
                lo = axis[j - 1] if j > 0 else bounds[k][0] + 0.5 * (axis[0] - bounds[k][0])
                hi = axis[j + 1] if j + 1 < len(axis) else axis[-1]

                def along(x: float, k: int = k) -> float:
                    trial = list(best_point)
                    trial[k] = x
                    return objective(trial)

                x, value, used = golden_section_max(along, float(lo), float(hi), self.config.golden_tol)
                evaluations += used
                if value > best_v:
                    best_v = value
                    best_point[k] = x

        return SupremumResult(best_v, tuple(best_point), evaluations)

"""Seeded stratified Monte Carlo estimates of integrals and mixed norms."""
import json
import math
import zlib
from typing import Any, Callable, Optional, Tuple, Union

import numpy as np

from src.api.norm_backend import NormBackend, weight_values
from src.core.config import MonteCarloConfig
from src.core.exceptions import DomainError, UnsupportedConfigurationError
from src.core.logging import get_logger
from src.core.mathcore import ball_volume
from src.domain.functions import TestFunction
from src.domain.models import (
    Ellipsoid,
    MixedExponent,
    NormEstimate,
    NormMethod,
    Parallelepiped,
    ProductSet,
    jsonable,
)
from src.services.fundamental import region_volume

logger = get_logger(__name__)

Region = Union[Ellipsoid, Parallelepiped, ProductSet]
Integrand = Callable[[np.ndarray], np.ndarray]


def _region_box(region: Region) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(region, ProductSet):
        boxes = [b.bounding_box() for b in region.blocks]
        return np.concatenate([b[0] for b in boxes]), np.concatenate([b[1] for b in boxes])
    lo, hi = region.bounding_box()
    return np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)


def _region_indicator(region: Region, points: np.ndarray) -> np.ndarray:
    if isinstance(region, ProductSet):
        values = np.ones(points.shape[0])
        start = 0
        for block in region.blocks:
            values *= block.contains(points[:, start:start + block.dim])
            start += block.dim
        return values
    return region.contains(points)


def _section_measure(region: Region, m1: int, rest: np.ndarray) -> np.ndarray:
    """
    Measure of {x_1 in R^m1 : (x_1, rest) in region} at each row of ``rest``.

    Exact for all supported regions, so the innermost block carries no
    sampling noise.
    """
    if isinstance(region, Ellipsoid):
        axes = np.asarray(region.axes)
        z = (rest - np.asarray(region.center)[m1:]) / axes[m1:]
        rho2 = 1.0 - np.sum(z * z, axis=-1)
        scale = ball_volume(m1) * float(np.prod(axes[:m1]))
        return np.where(rho2 > 0, scale * np.clip(rho2, 0.0, None) ** (0.5 * m1), 0.0)
    if isinstance(region, Parallelepiped):
        lo = np.asarray(region.origin)[m1:]
        hi = lo + np.asarray(region.delta)[m1:]
        inside = np.all((rest >= lo) & (rest <= hi), axis=-1)
        return float(np.prod(region.delta[:m1])) * inside.astype(float)
    first = region.blocks[0]
    if first.dim != m1:
        raise UnsupportedConfigurationError(
            f"Innermost exponent block of dimension {m1} does not match the first set block ({first.dim})"
        )
    rest_set = ProductSet(region.blocks[1:])
    return region_volume(first) * _region_indicator(rest_set, rest.reshape(-1, rest.shape[-1])).reshape(
        rest.shape[:-1])


class MonteCarloBackend(NormBackend):
    """
    Stratified Monte Carlo over the bounding box of a function or region.

    The box is cut into ``strata`` slabs along its first coordinate with an
    equal number of uniform samples in each; the standard error comes from
    the within-slab variances. Nested integrals sample the inner block
    separately for every outer point (one jittered sample per inner slab).
    Reported errors are ``sigma`` standard errors, pushed through the
    final p-th root by the delta method.
    """

    method = NormMethod.MONTE_CARLO

    def __init__(self, config: MonteCarloConfig, seed: int = 0):
        self.config = config
        self.seed = seed

    def task_rng(self, *key: Any) -> np.random.Generator:
        """Generator for one request, seeded from the backend seed and the request itself."""
        digest = zlib.crc32(json.dumps(jsonable(key), sort_keys=True).encode())
        return np.random.default_rng([self.seed, digest])

    # ------------------------------------------------------------------
    # Sampling primitives
    # ------------------------------------------------------------------
    def _stratified_points(self, rng: np.random.Generator, lo: np.ndarray, hi: np.ndarray,
                           n: int) -> Tuple[np.ndarray, int, int]:
        strata = max(1, min(self.config.strata, n // 2))
        per = max(2, n // strata)
        u = rng.random((strata, per, len(lo)))
        u[..., 0] = (np.arange(strata)[:, np.newaxis] + u[..., 0]) / strata
        return (lo + u.reshape(-1, len(lo)) * (hi - lo)), strata, per

    @staticmethod
    def _stratified_estimate(values: np.ndarray, strata: int, per: int, volume: float) -> Tuple[float, float]:
        vals = values.reshape(strata, per)
        slab = volume / strata
        estimate = slab * float(np.sum(vals.mean(axis=1)))
        variance = slab * slab * float(np.sum(vals.var(axis=1, ddof=1))) / per
        return estimate, math.sqrt(max(variance, 0.0))

    def stratified_integral(self, integrand: Integrand, lo: np.ndarray, hi: np.ndarray, n: int,
                            rng: Optional[np.random.Generator] = None) -> Tuple[float, float, int]:
        """
        Integral of a vectorized integrand over the box [lo, hi].

        Returns:
            (estimate, standard error, samples used)
        """
        rng = self.task_rng("integral", lo, hi, n) if rng is None else rng
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        points, strata, per = self._stratified_points(rng, lo, hi, n)
        estimate, se = self._stratified_estimate(integrand(points), strata, per, float(np.prod(hi - lo)))
        return estimate, se, strata * per

    @staticmethod
    def _inner_integrals(rng: np.random.Generator, integrand: Integrand, lo_in: np.ndarray,
                         hi_in: np.ndarray, outer: np.ndarray, n_in: int) -> np.ndarray:
        """Integral over the inner box for each outer point, inner coordinates first."""
        count, m_in = outer.shape[0], len(lo_in)
        u = rng.random((count, n_in, m_in))
        u[..., 0] = (np.arange(n_in)[np.newaxis, :] + u[..., 0]) / n_in
        x_in = lo_in + u * (hi_in - lo_in)
        x_out = np.broadcast_to(outer[:, np.newaxis, :], (count, n_in, outer.shape[1]))
        points = np.concatenate([x_in, x_out], axis=2).reshape(count * n_in, -1)
        values = integrand(points).reshape(count, n_in)
        return float(np.prod(hi_in - lo_in)) * values.mean(axis=1)

    def _nested(self, rng: np.random.Generator, inner: Integrand, split: int, lo: np.ndarray,
                hi: np.ndarray, ratio: float, n: int) -> Tuple[float, float, int]:
        """
        Outer integral of (inner integral)^ratio; coordinates [:split] are inner.

        Returns:
            (estimate, standard error, integrand evaluations)
        """
        n_in = max(2, int(math.isqrt(n)))
        n_out = max(2 * self.config.strata, n // n_in)
        outer, strata, per = self._stratified_points(rng, lo[split:], hi[split:], n_out)
        J = self._inner_integrals(rng, inner, lo[:split], hi[:split], outer, n_in)
        values = np.clip(J, 0.0, None) ** ratio
        estimate, se = self._stratified_estimate(values, strata, per, float(np.prod(hi[split:] - lo[split:])))
        return estimate, se, strata * per * n_in

    def _root(self, integral: float, se: float, p: float, used: int) -> NormEstimate:
        if integral <= 0:
            return NormEstimate(0.0, self.config.sigma * se, self.method, used)
        value = integral ** (1.0 / p)
        error = self.config.sigma * value * se / (p * integral)
        return NormEstimate(value, error, self.method, used)

    # ------------------------------------------------------------------
    # NormBackend
    # ------------------------------------------------------------------
    def supports_power_integral(self, f: TestFunction, alpha: float, weight_norm: str) -> bool:
        return True

    def power_integral(self, f: TestFunction, p: float, alpha: float, weight_norm: str) -> NormEstimate:
        lo, hi = f.bounding_box()

        def integrand(x: np.ndarray) -> np.ndarray:
            return np.abs(f.evaluate(x)) ** p * weight_values(x, alpha, weight_norm)

        rng = self.task_rng("power", f.describe(), p, alpha, weight_norm)
        estimate, se, used = self.stratified_integral(integrand, lo, hi, self.config.samples, rng)
        return NormEstimate(estimate, self.config.sigma * se, self.method, used)

    def supports_mixed(self, f: TestFunction, pm: MixedExponent) -> bool:
        return pm.l <= 2

    def mixed_norm(self, f: TestFunction, pm: MixedExponent) -> NormEstimate:
        """
        Nested sampling for one or two blocks.

        The inner integral enters through a nonlinear power, so the estimate
        carries a small bias that shrinks with the number of inner samples.
        """
        if not self.supports_mixed(f, pm):
            raise UnsupportedConfigurationError(f"Nested Monte Carlo supports at most 2 blocks, got {pm.l}")
        lo, hi = f.bounding_box()
        p = pm.p
        if pm.l == 1 or pm.is_uniform():
            integral = self.power_integral(f, p[0], 0.0, "euclidean")
            return self._root(integral.value, integral.abs_error / self.config.sigma, p[0],
                              integral.samples_or_nodes)

        def inner(x: np.ndarray) -> np.ndarray:
            return np.abs(f.evaluate(x)) ** p[0]

        rng = self.task_rng("mixed", f.describe(), pm.p, pm.m)
        integral, se, used = self._nested(rng, inner, pm.m[0], lo, hi, p[1] / p[0], self.config.samples)
        return self._root(integral, se, p[1], used)

    # ------------------------------------------------------------------
    # Region indicators
    # ------------------------------------------------------------------
    def region_norm(self, region: Region, pm: MixedExponent, n: Optional[int] = None,
                    seed: Optional[int] = None) -> NormEstimate:
        """
        Mixed norm of the indicator of a box, an ellipsoid or a product set.

        Args:
            region: The set
            pm: Exponents and block dimensions, summing to the set dimension
            n: Sample count (at least ``min_samples``)
            seed: Seed of a generator owned by this call

        Returns:
            NormEstimate with a ``sigma``-standard-error bound

        Raises:
            DomainError: too few samples, dimension mismatch or empty region
            UnsupportedConfigurationError: more than three exponent blocks
        """
        n = self.config.samples if n is None else int(n)
        if n < self.config.min_samples:
            raise DomainError(f"Monte Carlo needs at least {self.config.min_samples} samples, got {n}")
        dim = region.dim
        if pm.d != dim:
            raise DomainError(f"Exponent blocks cover dimension {pm.d}, region has dimension {dim}")
        if not region_volume_positive(region):
            raise DomainError("Degenerate region (zero measure)")
        rng = np.random.default_rng(self.seed if seed is None else seed)
        lo, hi = _region_box(region)
        p, m = pm.p, pm.m

        if pm.is_uniform():
            volume, se, used = self.stratified_integral(
                lambda x: _region_indicator(region, x), lo, hi, n, rng
            )
            return self._root(volume, se, p[0], used)

        m1 = m[0]
        ratio1 = p[1] / p[0]
        if pm.l == 2:
            estimate, se, used = self.stratified_integral(
                lambda rest: _section_measure(region, m1, rest) ** ratio1, lo[m1:], hi[m1:], n, rng
            )
            return self._root(estimate, se, p[1], used)
        if pm.l == 3:
            def inner(rest: np.ndarray) -> np.ndarray:
                return _section_measure(region, m1, rest) ** ratio1

            estimate, se, used = self._nested(rng, inner, m[1], lo[m1:], hi[m1:], p[2] / p[1], n)
            return self._root(estimate, se, p[2], used)
        raise UnsupportedConfigurationError(f"Region Monte Carlo supports at most 3 exponent blocks, got {pm.l}")


def region_volume_positive(region: Region) -> bool:
    if isinstance(region, ProductSet):
        return all(region_volume_positive(b) for b in region.blocks)
    return region_volume(region) > 0

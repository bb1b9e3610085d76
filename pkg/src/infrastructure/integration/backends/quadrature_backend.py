"""Deterministic quadrature: radial/angular splitting, tensor Gauss-Legendre rules, nested adaptive integrals."""
import math
import warnings
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from src.api.norm_backend import NormBackend, weight_values
from src.core.config import QuadratureConfig
from src.core.exceptions import IntegrationError, UnsupportedConfigurationError
from src.core.logging import get_logger
from src.core.mathcore import sphere_area
from src.domain.functions import FunctionKind, TestFunction
from src.domain.models import MixedExponent, NormEstimate, NormMethod

logger = get_logger(__name__)

_CHUNK = 1 << 20
_MAX_TENSOR_DIM = 3
_INNER_EPSABS, _INNER_EPSREL = 1e-15, 1e-12
_OUTER_EPSABS, _OUTER_EPSREL = 1e-15, 1e-10


@lru_cache(maxsize=64)
def _legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(integrand: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray,
                   n: int) -> float:
    """Tensor Gauss-Legendre rule with n nodes per axis on the box [lo, hi]."""
    x, w = _legendre(n)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    axes = [mid[k] + half[k] * x for k in range(len(lo))]
    weights = [half[k] * w for k in range(len(lo))]
    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    wgrid = np.ones(1)
    for wk in weights:
        wgrid = np.multiply.outer(wgrid, wk).ravel()
    total = 0.0
    for start in range(0, grid.shape[0], _CHUNK):
        stop = start + _CHUNK
        total += float(np.dot(integrand(grid[start:stop]), wgrid[start:stop]))
    return total


class QuadratureBackend(NormBackend):
    """
    Adaptive deterministic integration for d <= 3.

    Quadric functions centered at the origin are integrated in polar form:
    a one-dimensional radial integral (``scipy.integrate.quad``, with an
    algebraic weight for the power-law singularity) times an angular
    integral of |S^(-1/2) w|^alpha over the unit sphere. Parallelotopes are
    pulled back to the unit cube. Everything else uses a tensor
    Gauss-Legendre rule on the bounding box, doubling the nodes until two
    successive values agree to ``rel_tol``.
    """

    method = NormMethod.QUADRATURE

    def __init__(self, config: QuadratureConfig):
        self.config = config

    # ------------------------------------------------------------------
    # Tensor rule with node doubling
    # ------------------------------------------------------------------
    def tensor_integrate(self, integrand: Callable[[np.ndarray], np.ndarray],
                         lo: Sequence[float], hi: Sequence[float]) -> NormEstimate:
        """Integrate a vectorized integrand over a box with successive node doubling."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        d = len(lo)
        max_per_axis = max(self.config.min_nodes, int(round(self.config.max_total_nodes ** (1.0 / d))))
        n = self.config.min_nodes
        previous = gauss_legendre(integrand, lo, hi, n)
        while True:
            if 2 * n > max_per_axis:
                logger.warning(
                    f"Tensor quadrature stopped at {n} nodes per axis before reaching rel_tol={self.config.rel_tol:g}"
                )
                error = abs(previous) * 1e-2 if previous else 0.0
                return NormEstimate(previous, error, self.method, n ** d)
            n *= 2
            value = gauss_legendre(integrand, lo, hi, n)
            error = abs(value - previous)
            if error <= self.config.rel_tol * abs(value) or value == previous:
                return NormEstimate(value, error, self.method, n ** d)
            previous = value

    # ------------------------------------------------------------------
    # Power integrals
    # ------------------------------------------------------------------
    @staticmethod
    def _polar(f: TestFunction, alpha: float) -> bool:
        return f.is_quadric and (alpha == 0 or (f.is_centered and f.dim <= _MAX_TENSOR_DIM))

    def supports_power_integral(self, f: TestFunction, alpha: float, weight_norm: str) -> bool:
        return self._polar(f, alpha) or f.dim <= _MAX_TENSOR_DIM

    def power_integral(self, f: TestFunction, p: float, alpha: float, weight_norm: str) -> NormEstimate:
        if not self.supports_power_integral(f, alpha, weight_norm):
            raise UnsupportedConfigurationError(f"Quadrature cannot handle {f.kind.value} in d={f.dim}")
        if self._polar(f, alpha):
            return self._quadric_integral(f, p, alpha, weight_norm)
        if f.kind is FunctionKind.BOX_INDICATOR:
            return self._parallelotope_integral(f, p, alpha, weight_norm)

        lo, hi = f.bounding_box(self.config.tail_tol)

        def integrand(x: np.ndarray) -> np.ndarray:
            return np.abs(f.evaluate(x)) ** p * weight_values(x, alpha, weight_norm)

        return self.tensor_integrate(integrand, lo, hi)

    def radial_integral(self, f: TestFunction, p: float, alpha: float) -> Tuple[float, float]:
        """Integral over r >= 0 of r^(d-1+alpha) h(r^2)^p for the profile h of a quadric."""
        k = f.dim + alpha
        limit = self.config.quad_limit
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            if f.kind is FunctionKind.POWER_DECAY:
                exponent = k - 1.0 - f.gamma * p
                value, error = integrate.quad(lambda r: 1.0, 0.0, f.radius, weight="alg",
                                              wvar=(exponent, 0.0), limit=limit)
            elif f.kind is FunctionKind.ELLIPSOID_INDICATOR:
                value, error = integrate.quad(lambda r: r ** (k - 1.0), 0.0, 1.0,
                                              epsabs=0.0, epsrel=1e-13, limit=limit)
            else:
                value, error = integrate.quad(lambda r: r ** (k - 1.0) * math.exp(-p * r * r), 0.0, math.inf,
                                              epsabs=0.0, epsrel=1e-12, limit=limit)
        return value, error

    def angular_integral(self, S: np.ndarray, alpha: float, weight_norm: str) -> NormEstimate:
        """Integral over the unit sphere of |S^(-1/2) w|^alpha."""
        d = S.shape[0]
        if alpha == 0:
            return NormEstimate(sphere_area(d), 0.0, self.method)
        w, V = np.linalg.eigh(S)
        root_inv = (V * w ** -0.5) @ V.T

        if d == 1:
            value = 2.0 * abs(root_inv[0, 0]) ** alpha
            return NormEstimate(value, 0.0, self.method, 2)

        if d == 2:
            def integrand(theta: np.ndarray) -> np.ndarray:
                t = theta[:, 0]
                omega = np.stack([np.cos(t), np.sin(t)], axis=1)
                return weight_values(omega @ root_inv.T, alpha, weight_norm)

            return self.tensor_integrate(integrand, [0.0], [2.0 * math.pi])

        def integrand3(angles: np.ndarray) -> np.ndarray:
            t, phi = angles[:, 0], angles[:, 1]
            s = np.sin(phi)
            omega = np.stack([s * np.cos(t), s * np.sin(t), np.cos(phi)], axis=1)
            return weight_values(omega @ root_inv.T, alpha, weight_norm) * s

        return self.tensor_integrate(integrand3, [0.0, 0.0], [2.0 * math.pi, math.pi])

    def _quadric_integral(self, f: TestFunction, p: float, alpha: float, weight_norm: str) -> NormEstimate:
        radial, radial_err = self.radial_integral(f, p, alpha)
        angular = self.angular_integral(f.shape, alpha, weight_norm)
        log_det = float(np.linalg.slogdet(f.shape)[1])
        scale = f.amplitude ** p * math.exp(-0.5 * log_det)
        value = scale * radial * angular.value
        rel = (radial_err / radial if radial else 0.0) + angular.rel_error
        return NormEstimate(value, abs(value) * rel, self.method, angular.samples_or_nodes)

    def _parallelotope_integral(self, f: TestFunction, p: float, alpha: float, weight_norm: str) -> NormEstimate:
        volume = abs(float(np.linalg.det(f.shape)))
        scale = f.amplitude ** p * volume
        if alpha == 0:
            return NormEstimate(scale, 0.0, self.method)
        origin, edges = f.center, f.shape

        def integrand(u: np.ndarray) -> np.ndarray:
            return weight_values(origin + u @ edges.T, alpha, weight_norm)

        cube = self.tensor_integrate(integrand, np.zeros(f.dim), np.ones(f.dim))
        return NormEstimate(scale * cube.value, scale * cube.abs_error, self.method, cube.samples_or_nodes)

    # ------------------------------------------------------------------
    # Iterated mixed norms
    # ------------------------------------------------------------------
    def supports_mixed(self, f: TestFunction, pm: MixedExponent) -> bool:
        return f.dim <= _MAX_TENSOR_DIM and all(m == 1 for m in pm.m)

    def mixed_norm(self, f: TestFunction, pm: MixedExponent) -> NormEstimate:
        """
        Nested adaptive quadrature, x_1 with exponent p_1 innermost.

        Every level splits its interval at the break points of f along its
        axis, so indicator edges never fall inside a panel. A level returns
        its value and an absolute error: its own quadrature error plus the
        inner errors pushed through the power p_{k+1}/p_k. Outer levels
        integrate the pair (value, propagated error) with ``quad_vec``.

        Raises:
            UnsupportedConfigurationError: blocks are not one-dimensional or d > 3
            IntegrationError: a level misses its tolerance
        """
        if not self.supports_mixed(f, pm):
            raise UnsupportedConfigurationError(
                f"Iterated quadrature needs one-dimensional blocks and d <= {_MAX_TENSOR_DIM}"
            )
        p = pm.p
        lo, hi = f.bounding_box(self.config.tail_tol)
        mid = 0.5 * (lo + hi)
        limit = self.config.quad_limit
        calls = [0]

        def breaks(k: int, tail: List[float]) -> Optional[List[float]]:
            points = f.section_breaks(k, np.concatenate([mid[:k + 1], tail]), lo[k], hi[k])
            return points or None

        def innermost(tail: List[float]) -> Tuple[float, float]:
            def g(x: float) -> float:
                calls[0] += 1
                return abs(float(f.evaluate(np.array([[x, *tail]]))[0])) ** p[0]

            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("error", integrate.IntegrationWarning)
                    value, error = integrate.quad(g, lo[0], hi[0], points=breaks(0, tail), limit=limit,
                                                  epsabs=_INNER_EPSABS, epsrel=_INNER_EPSREL)
            except integrate.IntegrationWarning as e:
                raise IntegrationError(f"Innermost integral at {tail} did not converge: {e}") from e
            return max(value, 0.0), error

        def level(k: int, tail: List[float]) -> Tuple[float, float]:
            if k == 0:
                return innermost(tail)
            ratio = p[k] / p[k - 1]

            def g(x: float) -> np.ndarray:
                value, error = level(k - 1, [x, *tail])
                return np.array([value ** ratio, power_spread(value, error, ratio)])

            result, error, info = integrate.quad_vec(
                g, lo[k], hi[k], epsabs=_OUTER_EPSABS, epsrel=_OUTER_EPSREL, norm="max",
                limit=limit, points=breaks(k, tail), full_output=True,
            )
            if not info.success:
                raise IntegrationError(f"Level {k + 1} of {len(p)} did not converge: {info.message}")
            return max(float(result[0]), 0.0), float(result[1]) + float(error)

        total, total_err = level(len(p) - 1, [])
        if total <= 0:
            return NormEstimate(0.0, 0.0, self.method, calls[0])
        norm = total ** (1.0 / p[-1])
        return NormEstimate(norm, power_spread(total, total_err, 1.0 / p[-1]), self.method, calls[0])


def power_spread(value: float, error: float, r: float) -> float:
    """Largest change of v**r over v in [value - error, value + error], v >= 0."""
    if error <= 0:
        return 0.0
    high = (value + error) ** r - value ** r
    low = value ** r - max(value - error, 0.0) ** r
    return max(high, low)

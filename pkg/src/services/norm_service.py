"""Norm service - picks an integration backend per request and evaluates all norm types."""
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.api.norm_backend import NormBackend
from src.core.config import AppConfig
from src.core.exceptions import DomainError, IntegrationError, UnsupportedConfigurationError
from src.core.logging import get_logger
from src.domain.functions import FunctionKind, TestFunction
from src.domain.models import (
    AnisotropicPsi,
    MixedExponent,
    NormEstimate,
    NormMethod,
    PsiFunction,
)
from src.infrastructure.integration.backends.closed_form_backend import ClosedFormBackend
from src.infrastructure.integration.backends.monte_carlo_backend import MonteCarloBackend, Region
from src.infrastructure.integration.backends.quadrature_backend import QuadratureBackend
from src.services.psi_registry import natural_psi
from src.services.supremum import SupremumSearch

logger = get_logger(__name__)

_METHOD_RANK = {NormMethod.CLOSED_FORM: 0, NormMethod.QUADRATURE: 1, NormMethod.MONTE_CARLO: 2}
_REFINEMENT_RTOL = 1e-6


def _weakest(methods: Sequence[NormMethod]) -> NormMethod:
    return max(methods, key=_METHOD_RANK.__getitem__)


def combine_product(estimates: Sequence[NormEstimate]) -> NormEstimate:
    """Product of independent estimates; relative errors add."""
    value = math.prod(e.value for e in estimates)
    rel = math.fsum(e.rel_error for e in estimates if e.value)
    return NormEstimate(
        value,
        abs(value) * rel,
        _weakest([e.method for e in estimates]),
        sum(e.samples_or_nodes for e in estimates),
    )


class NormService:
    """
    L_p, weighted, mixed, GLS and AGLS norms of test functions.

    Backends are tried in priority order (closed form, quadrature, Monte
    Carlo); the first that accepts a request evaluates it.
    """

    def __init__(self, config: AppConfig, seed: int = 0):
        """
        Initialize the service and its backends.

        Args:
            config: Application configuration
            seed: Seed of the Monte Carlo generator
        """
        self.config = config
        self.search = SupremumSearch(config.supremum)
        self.closed_form = ClosedFormBackend()
        self.quadrature = QuadratureBackend(config.quadrature)
        self.monte_carlo = MonteCarloBackend(config.monte_carlo, seed)
        self.backends: List[NormBackend] = [self.closed_form, self.quadrature, self.monte_carlo]

    # ------------------------------------------------------------------
    # Integrals and L_p-type norms
    # ------------------------------------------------------------------
    def _power_backend(self, f: TestFunction, alpha: float, weight_norm: str) -> NormBackend:
        for backend in self.backends:
            if backend.supports_power_integral(f, alpha, weight_norm):
                return backend
        raise UnsupportedConfigurationError(f"No backend integrates {f.kind.value} in d={f.dim}")

    def power_integral(self, f: TestFunction, p: float, alpha: float = 0.0,
                       weight_norm: Optional[str] = None) -> NormEstimate:
        """Integral of |f|^p |x|^alpha over R^d."""
        weight_norm = weight_norm or self.config.quadrature.weight_norm
        backend = self._power_backend(f, alpha, weight_norm)
        logger.debug(f"{f.kind.value} d={f.dim} p={p:g} alpha={alpha:g} -> {backend.method.value}")
        return backend.power_integral(f, p, alpha, weight_norm)

    def _root(self, integral: NormEstimate, p: float) -> NormEstimate:
        if integral.value <= 0:
            return NormEstimate(0.0, integral.abs_error, integral.method, integral.samples_or_nodes)
        value = integral.value ** (1.0 / p)
        return NormEstimate(value, value * integral.rel_error / p, integral.method, integral.samples_or_nodes)

    def lp_norm(self, f: TestFunction, p: float) -> NormEstimate:
        """
        |f|_p.

        Raises:
            DomainError: p outside [1, max_exponent) of f
        """
        f.check_exponent(p)
        if f.kind is FunctionKind.PRODUCT:
            return combine_product([self.lp_norm(g, p) for g in f.factors])
        return self._root(self.power_integral(f, p), p)

    def weighted_norm(self, f: TestFunction, p: float, alpha: float,
                      weight_norm: Optional[str] = None) -> NormEstimate:
        """(integral of |f|^p |x|^alpha)^(1/p); alpha = 0 gives lp_norm."""
        if not (alpha >= 0 and math.isfinite(alpha)):
            raise DomainError(f"Weight exponent must be >= 0, got {alpha}")
        if alpha == 0:
            return self.lp_norm(f, p)
        f.check_exponent(p, alpha)
        return self._root(self.power_integral(f, p, alpha, weight_norm), p)

    def mixed_norm(self, f: TestFunction, pm: MixedExponent) -> NormEstimate:
        """
        Nested mixed norm, innermost block first.

        Factorable inputs are split into block factors whose L_{p_j} norms
        multiply; equal exponents reduce to lp_norm; otherwise closed form,
        iterated quadrature (one-dimensional blocks, d <= 3) or nested
        Monte Carlo (at most two blocks) is used.

        Raises:
            DomainError: block dimensions do not sum to f.dim
            UnsupportedConfigurationError: non-factorable input no backend handles
        """
        if pm.d != f.dim:
            raise DomainError(f"Exponent blocks {pm.m} do not cover dimension {f.dim}")
        if pm.l == 1:
            return self.lp_norm(f, pm.p[0])
        factors = f.factorize(pm.m)
        if factors is not None:
            return combine_product([self.lp_norm(g, pj) for g, pj in zip(factors, pm.p)])
        if pm.is_uniform():
            return self.lp_norm(f, pm.p[0])
        failure: Optional[IntegrationError] = None
        for backend in self.backends:
            if backend.supports_mixed(f, pm):
                logger.debug(f"mixed norm of {f.kind.value} p={pm.p} m={pm.m} -> {backend.method.value}")
                try:
                    return backend.mixed_norm(f, pm)
                except IntegrationError as e:
                    logger.warning(f"{backend.method.value} mixed norm failed, trying the next backend: {e}")
                    failure = e
        if failure is not None:
            raise failure
        raise UnsupportedConfigurationError(
            f"Non-factorable {f.kind.value} with {pm.l} blocks in d={f.dim} needs factorable input"
        )

    def mc_region_norm(self, region: Region, pm: MixedExponent, n: Optional[int] = None,
                       seed: Optional[int] = None) -> NormEstimate:
        """Monte Carlo mixed norm of a region indicator."""
        return self.monte_carlo.region_norm(region, pm, n, seed)

    # ------------------------------------------------------------------
    # Sup-type norms
    # ------------------------------------------------------------------
    def _refined_sup(self, maximize, grid_points: int) -> Tuple[float, Tuple[float, ...], float]:
        result = maximize(grid_points)
        best, argmax, change = result.value, result.argmax, math.inf
        for _ in range(self.config.supremum.max_doublings):
            if not math.isfinite(best):
                break
            grid_points *= 2
            result = maximize(grid_points)
            change = abs(result.value - best)
            if result.value > best:
                best, argmax = result.value, result.argmax
            if change <= _REFINEMENT_RTOL * abs(best):
                break
        return best, argmax, change

    def gls_norm(self, f: TestFunction, psi: PsiFunction) -> NormEstimate:
        """
        sup over p of |f|_p / psi(p), taken over the support of psi
        intersected with the integrability range of f.

        The grid is doubled until the value changes by less than 1e-6
        relative (or ``max_doublings`` is reached); the reported value is
        the best found, a lower bound of the supremum.

        Raises:
            DomainError: the intersection is empty
        """
        lower = max(psi.lower, 1.0)
        upper = min(psi.upper, f.max_exponent())
        if not lower < upper:
            raise DomainError(
                f"Support ({psi.lower}, {psi.upper}) misses the integrability range of {f.kind.value}"
            )
        cache: Dict[float, NormEstimate] = {}

        def norm_at(p: float) -> NormEstimate:
            if p not in cache:
                cache[p] = self.lp_norm(f, p)
            return cache[p]

        def objective(p: float) -> float:
            try:
                return norm_at(p).value / psi(p)
            except DomainError:
                return math.nan

        best, argmax, change = self._refined_sup(
            lambda n: self.search.maximize(objective, lower, upper, n), self.config.supremum.grid_points
        )
        p_star = argmax[0]
        error = 0.0 if not math.isfinite(change) else change
        if lower < p_star < upper and p_star in cache:
            error += cache[p_star].abs_error / psi(p_star)
        methods = [e.method for e in cache.values()] or [NormMethod.CLOSED_FORM]
        return NormEstimate(best, error, _weakest(methods), len(cache), lower_bound=True, argmax=(p_star,))

    def agls_norm(self, f: TestFunction, psi: AnisotropicPsi, blocks: Optional[Sequence[int]] = None,
                  Q: Optional[Sequence[Tuple[float, float]]] = None) -> NormEstimate:
        """
        sup over p in the interior of Q of |f|_p / psi(p) for exponent vectors p.

        Args:
            f: Test function
            psi: Function of the exponent vector
            blocks: Block dimensions m (default: one coordinate per exponent)
            Q: Exponent box, intersected with the domain of psi (default: that domain)

        Returns:
            NormEstimate flagged as a lower bound
        """
        if blocks is None:
            if psi.dim == f.dim:
                blocks = (1,) * f.dim
            elif psi.dim == 1:
                blocks = (f.dim,)
            else:
                raise DomainError(f"Cannot infer blocks for {psi.dim} exponents in d={f.dim}")
        blocks = tuple(int(m) for m in blocks)
        if len(blocks) != psi.dim or sum(blocks) != f.dim:
            raise DomainError(f"Blocks {blocks} do not match {psi.dim} exponents in d={f.dim}")

        bounds = list(psi.bounds)
        if Q is not None:
            if len(Q) != psi.dim:
                raise DomainError(f"Exponent box has {len(Q)} intervals, expected {psi.dim}")
            bounds = [(max(a, qa), min(b, qb)) for (a, b), (qa, qb) in zip(bounds, Q)]
            if any(not a < b for a, b in bounds):
                raise DomainError(f"Exponent box {Q} misses the domain {psi.bounds}")

        factors = f.factorize(blocks)
        if factors is not None and psi.is_factorable():
            parts = [
                self.gls_norm(g, PsiFunction(a, b, factor.func, factor.label))
                for g, factor, (a, b) in zip(factors, psi.factors, bounds)
            ]
            product = combine_product(parts)
            product.lower_bound = True
            product.argmax = tuple(part.argmax[0] for part in parts)
            return product

        if psi.dim > self.config.supremum.agls_max_blocks:
            raise UnsupportedConfigurationError(
                f"Grid search over {psi.dim} exponents exceeds the limit of {self.config.supremum.agls_max_blocks}"
            )
        cache: Dict[Tuple[float, ...], NormEstimate] = {}

        def objective(pvec: Sequence[float]) -> float:
            key = tuple(pvec)
            if not all(a < p < b for p, (a, b) in zip(key, bounds)):
                return -math.inf
            try:
                if key not in cache:
                    cache[key] = self.mixed_norm(f, MixedExponent(key, blocks))
                return cache[key].value / psi(key)
            except DomainError:
                return math.nan

        best, argmax, change = self._refined_sup(
            lambda n: self.search.maximize_box(objective, bounds, n), self.config.supremum.agls_grid_points
        )
        error = 0.0 if not math.isfinite(change) else change
        methods = [e.method for e in cache.values()] or [NormMethod.CLOSED_FORM]
        return NormEstimate(best, error, _weakest(methods), len(cache), lower_bound=True, argmax=tuple(argmax))

    # ------------------------------------------------------------------
    # Natural functions
    # ------------------------------------------------------------------
    def sample_natural_psi(self, f: TestFunction, lower: float, upper: float, count: int = 48) -> PsiFunction:
        """
        Natural function p -> |f|_p on (lower, upper) from ``count`` samples
        equally spaced in 1/p, both ends included.
        """
        if not (1.0 <= lower < upper and math.isfinite(upper)):
            raise DomainError(f"Natural function needs a finite interval 1 <= a < b, got ({lower}, {upper})")
        if count < 2:
            raise DomainError(f"At least two samples are required, got {count}")
        ps = np.sort(1.0 / np.linspace(1.0 / lower, 1.0 / upper, count))
        ps[0], ps[-1] = lower, upper
        samples = [(float(p), self.lp_norm(f, float(p)).value) for p in ps]
        return natural_psi(samples, label=f"natural({f.kind.value})")

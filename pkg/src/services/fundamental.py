"""Fundamental functions of L_p, of Grand Lebesgue Spaces and of their anisotropic versions."""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from src.core.config import SupremumConfig
from src.core.exceptions import DomainError, UnsupportedConfigurationError
from src.core.logging import get_logger
from src.core.mathcore import ball_volume, log_beta
from src.domain.models import (
    AnisotropicPsi,
    Ellipsoid,
    Parallelepiped,
    ProductSet,
    PsiFunction,
    PsiTilde,
)
from src.services.supremum import SupremumSearch

logger = get_logger(__name__)

Region = Union[Ellipsoid, Parallelepiped]


def _exponents(pvec: Sequence[float]) -> Tuple[float, ...]:
    p = tuple(float(v) for v in np.atleast_1d(pvec))
    if not p:
        raise DomainError("Exponent vector must not be empty")
    if any(not (v >= 1.0 and math.isfinite(v)) for v in p):
        raise DomainError(f"Exponents must be finite and >= 1, got {p}")
    return p


def fundamental_lp(delta: float, p: float) -> float:
    """delta^(1/p), the L_p norm of an indicator of measure delta."""
    if not delta >= 0:
        raise DomainError(f"Measure must be >= 0, got {delta}")
    if not p >= 1:
        raise DomainError(f"Exponent must be >= 1, got {p}")
    if delta == 0:
        return 0.0
    return delta ** (1.0 / p)


def _log_theta_factors(pvec: Sequence[float]) -> List[float]:
    p = _exponents(pvec)
    logs = []
    inv_sum = 0.0
    for k, pk in enumerate(p):
        if k == 0:
            logs.append(math.log(2.0) / pk)
        else:
            logs.append(log_beta(0.5, 1.0 + 0.5 * pk * inv_sum) / pk)
        inv_sum += 1.0 / pk
    return logs


def theta_factor(pvec: Sequence[float]) -> float:
    """Last recurrence factor Z_d(p_1..p_d); Z_1 = 2^(1/p_1)."""
    return math.exp(_log_theta_factors(pvec)[-1])


def theta_unit(pvec: Sequence[float]) -> float:
    """Mixed norm of the unit-ball indicator, prod_k Z_k, innermost coordinate first."""
    return math.exp(math.fsum(_log_theta_factors(pvec)))


def theta_scaled(pvec: Sequence[float], a: Sequence[float], R: float = 1.0) -> float:
    """Mixed norm of the ellipsoid indicator with semi-axes R * a_i."""
    p = _exponents(pvec)
    axes = np.atleast_1d(np.asarray(a, dtype=float))
    if axes.shape[0] != len(p):
        raise DomainError(f"{len(axes)} semi-axes given for {len(p)} exponents")
    if np.any(~(axes > 0)) or not R > 0:
        raise DomainError(f"Semi-axes and radius must be positive, got a={axes.tolist()}, R={R}")
    log_value = math.fsum(_log_theta_factors(p))
    log_value += math.fsum(math.log(ai) / pi for ai, pi in zip(axes, p))
    log_value += math.log(R) * math.fsum(1.0 / pi for pi in p)
    return math.exp(log_value)


def fundamental_box(pvec_full: Sequence[float], delta: Sequence[float]) -> float:
    """prod_j delta_j^(1/p_j); independent of the box origin."""
    p = _exponents(pvec_full)
    sides = np.atleast_1d(np.asarray(delta, dtype=float))
    if sides.shape[0] != len(p):
        raise DomainError(f"{len(sides)} sides given for {len(p)} exponents")
    if np.any(~(sides > 0)):
        raise DomainError(f"Box sides must be positive, got {sides.tolist()}")
    return math.prod(float(s) ** (1.0 / pj) for s, pj in zip(sides, p))


def fundamental_product_set(block_values: Sequence[float]) -> float:
    """Fundamental value of a Cartesian product from its per-block values."""
    values = [float(v) for v in block_values]
    if any(not v >= 0 for v in values):
        raise DomainError(f"Block values must be >= 0, got {values}")
    return math.prod(values)


def region_volume(region: Region) -> float:
    """Lebesgue measure of a box or an ellipsoid."""
    if isinstance(region, Parallelepiped):
        return region.volume
    return ball_volume(region.dim) * math.prod(region.axes)


def region_fundamental(region: Region, exponents: Union[float, Sequence[float]]) -> float:
    """
    Mixed norm of the indicator of one block.

    A scalar exponent measures the block isotropically (volume^(1/p));
    a vector assigns one exponent per coordinate.
    """
    if np.ndim(exponents) == 0:
        return fundamental_lp(region_volume(region), float(exponents))
    p = _exponents(exponents)
    if isinstance(region, Parallelepiped):
        return fundamental_box(p, region.delta)
    return theta_scaled(p, region.a, region.R)


def product_set_fundamental(D: ProductSet, pvec: Sequence[float]) -> float:
    """phi_p(D) for one exponent per block of D."""
    p = _exponents(pvec)
    if len(p) != len(D.blocks):
        raise DomainError(f"{len(p)} exponents given for {len(D.blocks)} blocks")
    return fundamental_product_set(region_fundamental(b, pj) for b, pj in zip(D.blocks, p))


@dataclass
class AsymptoticRow:
    """Computed psi-tilde fundamental value against candidate asymptotes."""
    delta: float
    regime: str
    phi: float
    candidates: Dict[str, float] = field(default_factory=dict)

    def ratios(self) -> Dict[str, float]:
        return {name: self.phi / value for name, value in self.candidates.items()}


class FundamentalService:
    """Sup-type fundamental functions evaluated with a configurable search."""

    def __init__(self, config: SupremumConfig):
        self.config = config
        self.search = SupremumSearch(config)

    def fundamental_gls(self, tau: PsiFunction, delta: float) -> float:
        """
        sup over p in (a, b) of delta^(1/p) / tau(p).

        Args:
            tau: Psi function with support (a, b)
            delta: Measure of the set, >= 0

        Returns:
            The supremum, or +inf if the objective is unbounded on the grid
        """
        if not delta >= 0:
            raise DomainError(f"Measure must be >= 0, got {delta}")
        if delta == 0:
            return 0.0

        def objective(p: float) -> float:
            return delta ** (1.0 / p) / tau(p)

        result = self.search.maximize(objective, tau.lower, tau.upper)
        logger.debug(
            f"phi(G{tau.label}, {delta:g}) = {result.value:.12g} at p={result.argmax[0]:.6g}"
            f"{' (boundary)' if result.at_boundary else ''}"
        )
        return result.value

    def fundamental_agls(self, psi: AnisotropicPsi, D: ProductSet, decompose: bool = True) -> float:
        """
        sup over p in the interior of Q of phi_p(D) / psi(p).

        Factorable psi decomposes into one-dimensional problems, one per
        block of D; otherwise a tensor grid is searched (at most
        ``agls_max_blocks`` blocks).
        """
        if psi.dim != len(D.blocks):
            raise DomainError(f"Exponent domain of dimension {psi.dim} for {len(D.blocks)} blocks")
        if decompose and psi.is_factorable():
            return math.prod(
                self.fundamental_gls(factor, region_volume(block))
                for factor, block in zip(psi.factors, D.blocks)
            )
        if psi.dim > self.config.agls_max_blocks:
            raise UnsupportedConfigurationError(
                f"Grid search over {psi.dim} exponents exceeds the limit of {self.config.agls_max_blocks};"
                f" use a factorable psi"
            )

        def objective(pvec: Sequence[float]) -> float:
            return product_set_fundamental(D, pvec) / psi(pvec)

        return self.search.maximize_box(objective, psi.bounds).value

    def tilde_phi_asymptotic_check(
        self,
        tilde: PsiTilde,
        small_deltas: Sequence[float] = (1e-4, 1e-8, 1e-12),
        large_deltas: Sequence[float] = (1e4, 1e8, 1e12),
    ) -> List[AsymptoticRow]:
        """
        Ratios of phi(G psi-tilde, delta) to candidate asymptotes.

        Small delta: beta^beta |ln delta|^-beta and the Laplace constant
        (beta/e)^beta |ln delta|^-beta of the power branch. Large delta:
        (a^2 alpha/e)^alpha (ln delta)^-alpha times delta^(1/alpha) or
        delta^(1/a).
        """
        psi = tilde.as_psi()
        a, alpha, beta = tilde.a, tilde.alpha, tilde.beta
        rows = []
        for delta in small_deltas:
            log_term = abs(math.log(delta))
            rows.append(AsymptoticRow(delta, "small", self.fundamental_gls(psi, delta), {
                "beta_beta": beta ** beta * log_term ** (-beta),
                "laplace": (beta / math.e) ** beta * log_term ** (-beta),
            }))
        front = (a * a * alpha / math.e) ** alpha
        for delta in large_deltas:
            log_term = math.log(delta)
            rows.append(AsymptoticRow(delta, "large", self.fundamental_gls(psi, delta), {
                "exponent_inv_alpha": front * delta ** (1.0 / alpha) * log_term ** (-alpha),
                "exponent_inv_a": front * delta ** (1.0 / a) * log_term ** (-alpha),
            }))
        return rows

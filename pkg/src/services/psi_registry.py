"""Psi functions: built-in families, algebra, natural functions and the order psi1 << psi2."""
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.config import PrecedenceConfig
from src.core.exceptions import (
    BracketError,
    ConstructionError,
    DomainError,
    RelationUndefinedError,
)
from src.core.logging import get_logger
from src.core.mathcore import find_root_increasing, require_positive
from src.domain.models import Precedence, PsiFunction, PsiTilde
from src.services.supremum import exponent_grid

logger = get_logger(__name__)

_POSITIVITY_GRID = 1024


def _intersect(first: PsiFunction, second: PsiFunction) -> Tuple[float, float]:
    lower = max(first.lower, second.lower)
    upper = min(first.upper, second.upper)
    if not lower < upper:
        raise DomainError(
            f"Supports ({first.lower}, {first.upper}) and ({second.lower}, {second.upper}) do not intersect"
        )
    return lower, upper


def psi_power(lam: float, a: float = 1.0, b: float = math.inf) -> PsiFunction:
    """p^(1/lambda) on (a, b)."""
    lam = require_positive(lam, "lambda")
    exponent = 1.0 / lam
    return PsiFunction(a, b, lambda p: p ** exponent, f"power(lambda={lam:g})")


def psi_constant(c: float = 1.0, a: float = 1.0, b: float = math.inf) -> PsiFunction:
    """The constant function c on (a, b)."""
    c = require_positive(c, "c")
    return PsiFunction(a, b, lambda p: c, f"const({c:g})")


def psi_tilde(a: float, alpha: float, beta: float) -> PsiTilde:
    """
    Build (p - a)^(-alpha) on (a, h), p^beta on [h, inf).

    The crossover h solves (h - a)^(-alpha) = h^beta; the left side falls
    from +inf and the right side grows, so the root is unique.

    Raises:
        ConstructionError: no bracket for h could be found
    """
    if not a >= 1.0:
        raise DomainError(f"a must be >= 1, got {a}")
    alpha = require_positive(alpha, "alpha")
    beta = require_positive(beta, "beta")

    def gap(h: float) -> float:
        return (h - a) ** (-alpha) - h ** beta

    scale = max(1.0, a)
    hi_offset = scale
    while gap(a + hi_offset) > 0:
        hi_offset *= 2.0
        if hi_offset > 1e12 * scale:
            raise ConstructionError(f"No upper bracket for the crossover of psi-tilde(a={a}, alpha={alpha}, beta={beta})")
    lo_offset = min(hi_offset, scale) * 1e-3
    try:
        while gap(a + lo_offset) <= 0:
            lo_offset *= 1e-3
            if lo_offset < 1e-300:
                raise ConstructionError(
                    f"No lower bracket for the crossover of psi-tilde(a={a}, alpha={alpha}, beta={beta})"
                )
    except OverflowError:
        pass
    try:
        h = find_root_increasing(gap, a + lo_offset, a + hi_offset, tol=1e-15 * scale)
    except BracketError as e:
        raise ConstructionError(f"Crossover root not bracketed: {e}") from e
    logger.debug(f"psi-tilde(a={a}, alpha={alpha}, beta={beta}) crossover h={h:.15g}")
    return PsiTilde(float(a), alpha, beta, h)


def psi_product(psi: PsiFunction, zeta: PsiFunction) -> PsiFunction:
    """nu(p) = psi(p) * zeta(p) on the common support."""
    lower, upper = _intersect(psi, zeta)
    f, g = psi.func, zeta.func
    return PsiFunction(lower, upper, lambda p: f(p) * g(p), f"({psi.label})*({zeta.label})")


def psi_quotient(nu: PsiFunction, zeta: PsiFunction) -> PsiFunction:
    """psi(p) = nu(p) / zeta(p) on the common support; warns if the infimum looks non-positive."""
    lower, upper = _intersect(nu, zeta)
    f, g = nu.func, zeta.func
    result = PsiFunction(lower, upper, lambda p: f(p) / g(p), f"({nu.label})/({zeta.label})")
    grid = exponent_grid(lower, upper, _POSITIVITY_GRID)
    smallest = min(result(p) for p in grid)
    if not smallest > 0:
        logger.warning(f"Quotient {result.label} has non-positive infimum {smallest:g} on its support")
    return result


def natural_psi(samples: Sequence[Tuple[float, float]], label: str = "natural") -> PsiFunction:
    """
    Natural function p -> |f|_p from sampled norms.

    ln(value) is interpolated linearly in 1/p, which reproduces
    delta^(1/p) exactly, so indicator functions are represented without
    interpolation error. The support is the open interval spanned by the
    samples.
    """
    if len(samples) < 2:
        raise DomainError("A natural function needs at least two samples")
    ps = np.array([float(p) for p, _ in samples])
    values = np.array([float(v) for _, v in samples])
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise DomainError(f"Natural-function samples must be positive and finite, got {values.tolist()}")
    if np.any(np.diff(ps) <= 0):
        raise DomainError("Sample exponents must be strictly increasing")
    inv_p = (1.0 / ps)[::-1]
    log_v = np.log(values)[::-1]

    def func(p: float) -> float:
        return float(math.exp(np.interp(1.0 / p, inv_p, log_v)))

    return PsiFunction(float(ps[0]), float(ps[-1]), func, label)


class PsiRegistry:
    """Named psi families and the numerical order psi1 << psi2."""

    FAMILIES = ("power", "constant", "identity", "tilde")

    def __init__(self, config: PrecedenceConfig):
        self.config = config

    def build(self, kind: str, **params: float) -> PsiFunction:
        """
        Build a family member by name.

        Args:
            kind: One of ``FAMILIES``
            **params: lambda/c/alpha/beta plus the support a, b

        Returns:
            PsiFunction
        """
        a = float(params.get("a", 1.0))
        b = float(params.get("b", math.inf))
        kind = kind.lower()
        if kind == "power":
            return psi_power(float(params.get("lambda", 1.0)), a, b)
        if kind == "constant":
            return psi_constant(float(params.get("c", 1.0)), a, b)
        if kind == "identity":
            return psi_power(1.0, a, b)
        if kind == "tilde":
            tilde = psi_tilde(a, float(params.get("alpha", 1.0)), float(params.get("beta", 1.0)))
            return tilde.as_psi()
        raise DomainError(f"Unknown psi family {kind!r}; expected one of {', '.join(self.FAMILIES)}")

    def from_descriptor(self, text: str) -> PsiFunction:
        """Parse ``kind:key=value,...``, e.g. ``power:lambda=2,a=1,b=inf``."""
        kind, _, rest = text.partition(":")
        params: Dict[str, float] = {}
        for item in filter(None, rest.split(",")):
            key, sep, value = item.partition("=")
            if not sep:
                raise DomainError(f"Malformed psi parameter {item!r} in {text!r}")
            try:
                params[key.strip()] = float(value)
            except ValueError as e:
                raise DomainError(f"Psi parameter {key} is not a number: {value!r}") from e
        return self.build(kind.strip(), **params)

    def precedes(self, psi1: PsiFunction, psi2: PsiFunction, probe: Sequence[float]) -> Precedence:
        """
        Numerical verdict on psi1 << psi2 (psi1/psi2 -> 0 where psi2 -> inf).

        TRUE when the last ratio is below the threshold and the last
        ``window`` ratios decrease strictly; FALSE when the tail stays above the
        threshold and is either non-decreasing or within ``stable_fraction`` of
        its own maximum; INCONCLUSIVE otherwise.

        Raises:
            DomainError: probe too short or outside the common support
            RelationUndefinedError: psi2 does not grow along the probe
        """
        probe = [float(p) for p in probe]
        k = self.config.window
        if len(probe) < k:
            raise DomainError(f"Probe needs at least {k} points, got {len(probe)}")
        diffs = np.diff(probe)
        if not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise DomainError("Probe sequence must be strictly monotone")
        lower, upper = _intersect(psi1, psi2)
        if any(not lower < p < upper for p in probe):
            raise DomainError(f"Probe leaves the common support ({lower}, {upper})")

        v1 = np.array([psi1(p) for p in probe])
        v2 = np.array([psi2(p) for p in probe])
        tail2 = v2[-k:]
        if not (np.all(np.diff(tail2) >= 0) and tail2[-1] >= self.config.growth_factor * v2[0]):
            raise RelationUndefinedError(
                f"{psi2.label} stays bounded along the probe ({v2[0]:g} -> {v2[-1]:g})"
            )

        ratios = v1 / v2
        tail = ratios[-k:]
        if tail[-1] < self.config.threshold and np.all(np.diff(tail) < 0):
            return Precedence.TRUE
        if np.min(tail) >= self.config.threshold and (
            tail[-1] >= tail[0] or np.min(tail) >= self.config.stable_fraction * np.max(tail)
        ):
            return Precedence.FALSE
        logger.warning(
            f"precedes({psi1.label}, {psi2.label}) inconclusive: last ratio {tail[-1]:g}"
        )
        return Precedence.INCONCLUSIVE

    @staticmethod
    def power_probe(count: int = 40, base: float = 2.0) -> List[float]:
        """The probe base^k, k = 1..count."""
        return [base ** k for k in range(1, count + 1)]

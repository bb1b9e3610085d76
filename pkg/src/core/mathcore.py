"""Special functions and root finding used by the fundamental-function formulas.

log_gamma uses the Lanczos approximation (g=7, nine coefficients) with the
reflection formula below 1/2. Beta is evaluated in log space.
"""
import math
from typing import Callable

from src.core.exceptions import BracketError, DomainError

_LANCZOS_G = 7
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def require_positive(x: float, name: str = "x") -> float:
    """Return ``x`` as float, raising DomainError unless it is finite and > 0."""
    try:
        value = float(x)
    except (TypeError, ValueError) as e:
        raise DomainError(f"{name} must be a real number, got {x!r}") from e
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be finite and > 0, got {x!r}")
    return value


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    x = require_positive(x)
    if x < 0.5:
        # Gamma(x) Gamma(1-x) = pi / sin(pi x), sin(pi x) > 0 on (0, 1/2)
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    z = x - 1.0
    series = _LANCZOS_COEFFS[0]
    for i in range(1, _LANCZOS_G + 2):
        series += _LANCZOS_COEFFS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (z + 0.5) * math.log(t) - t + math.log(series)


def log_beta(a: float, b: float) -> float:
    """ln B(a, b)."""
    a = require_positive(a, "a")
    b = require_positive(b, "b")
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def beta(a: float, b: float) -> float:
    """Euler Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    return math.exp(log_beta(a, b))


def ball_volume(d: int) -> float:
    """Volume of the Euclidean unit ball in R^d."""
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise DomainError(f"Dimension must be a positive integer, got {d!r}")
    return math.exp(0.5 * d * math.log(math.pi) - log_gamma(0.5 * d + 1.0))


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^(d-1) in R^d, equal to d times the ball volume."""
    return d * ball_volume(d)


def find_root_increasing(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-14,
    max_iter: int = 500,
) -> float:
    """
    Bisection root finder for a continuous monotone function.

    Works for increasing and decreasing ``g`` alike; only a sign change on
    [lo, hi] is required.

    Args:
        g: Continuous, strictly monotone function on [lo, hi]
        lo: Left end of the bracket
        hi: Right end of the bracket
        tol: Target bracket width
        max_iter: Safety cap on bisection steps

    Returns:
        Midpoint of the final bracket

    Raises:
        BracketError: g(lo) and g(hi) do not differ in sign
    """
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise BracketError(f"Invalid bracket [{lo}, {hi}]")
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol}")

    g_lo = g(lo)
    g_hi = g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if math.isnan(g_lo) or math.isnan(g_hi) or (g_lo > 0) == (g_hi > 0):
        raise BracketError(f"No sign change on [{lo}, {hi}]: g(lo)={g_lo}, g(hi)={g_hi}")

    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        g_mid = g(mid)
        if g_mid == 0.0:
            return mid
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)

"""Integration backend interface - abstract base for all norm evaluation engines."""
from abc import ABC, abstractmethod

import numpy as np

from src.domain.functions import TestFunction
from src.domain.models import MixedExponent, NormEstimate, NormMethod


def weight_values(points: np.ndarray, alpha: float, weight_norm: str) -> np.ndarray:
    """|x|^alpha at each row, with the Euclidean or the max norm."""
    if alpha == 0:
        return np.ones(points.shape[0])
    if weight_norm == "max":
        radius = np.max(np.abs(points), axis=1)
    else:
        radius = np.sqrt(np.sum(points * points, axis=1))
    return radius ** alpha


class NormBackend(ABC):
    """
    Abstract base class for norm evaluation engines.

    A backend reports which requests it can serve; the norm service asks
    the backends in priority order and uses the first that accepts.
    """

    method: NormMethod

    @abstractmethod
    def supports_power_integral(self, f: TestFunction, alpha: float, weight_norm: str) -> bool:
        """
        Check whether the integral of |f|^p |x|^alpha can be evaluated here.

        Args:
            f: Test function
            alpha: Weight exponent (0 for the plain L_p integral)
            weight_norm: "euclidean" or "max"

        Returns:
            True if ``power_integral`` accepts this request
        """
        pass

    @abstractmethod
    def power_integral(self, f: TestFunction, p: float, alpha: float, weight_norm: str) -> NormEstimate:
        """
        Evaluate the integral of |f(x)|^p |x|^alpha over R^d.

        Args:
            f: Test function
            p: Exponent, already checked against the integrability range
            alpha: Weight exponent
            weight_norm: "euclidean" or "max"

        Returns:
            NormEstimate of the integral itself (not its p-th root)
        """
        pass

    @abstractmethod
    def supports_mixed(self, f: TestFunction, pm: MixedExponent) -> bool:
        """
        Check whether the mixed norm of a (non-factored) function is available.

        Args:
            f: Test function
            pm: Exponent vector with block dimensions

        Returns:
            True if ``mixed_norm`` accepts this request
        """
        pass

    @abstractmethod
    def mixed_norm(self, f: TestFunction, pm: MixedExponent) -> NormEstimate:
        """
        Evaluate the nested mixed norm, innermost block first.

        Args:
            f: Test function
            pm: Exponent vector with block dimensions

        Returns:
            NormEstimate of the norm
        """
        pass

"""Closed-form norms of Gaussians and indicator functions."""
import math

import numpy as np

from src.api.norm_backend import NormBackend
from src.core.exceptions import UnsupportedConfigurationError
from src.core.mathcore import log_gamma, sphere_area
from src.domain.functions import FunctionKind, TestFunction
from src.domain.models import MixedExponent, NormEstimate, NormMethod
from src.services.fundamental import fundamental_box, theta_scaled


def is_scalar_form(S: np.ndarray) -> bool:
    """True when S is a multiple of the identity."""
    s = S[0, 0]
    return bool(np.allclose(S, s * np.eye(S.shape[0]), rtol=1e-14, atol=0.0))


def is_diagonal(S: np.ndarray) -> bool:
    return bool(np.count_nonzero(S - np.diag(np.diag(S))) == 0)


class ClosedFormBackend(NormBackend):
    """
    Exact formulas.

    For a quadric c h((x - x0)^T S (x - x0)) the integral of |f|^p |x|^alpha
    splits, when x0 = 0 and S = sI (or alpha = 0), into
    c^p det(S)^(-1/2) s^(-alpha/2) |S^(d-1)| times a radial integral that is
    Gamma((d+alpha)/2) / (2 p^((d+alpha)/2)) for Gaussians and 1/(d+alpha)
    for ellipsoid indicators.
    """

    method = NormMethod.CLOSED_FORM

    def supports_power_integral(self, f: TestFunction, alpha: float, weight_norm: str) -> bool:
        if f.kind in (FunctionKind.GAUSSIAN, FunctionKind.ELLIPSOID_INDICATOR):
            return alpha == 0 or (
                weight_norm == "euclidean" and f.is_centered and is_scalar_form(f.shape)
            )
        if f.kind in (FunctionKind.BOX_INDICATOR, FunctionKind.TRIANGLE_INDICATOR):
            return alpha == 0
        return False

    def power_integral(self, f: TestFunction, p: float, alpha: float, weight_norm: str) -> NormEstimate:
        if not self.supports_power_integral(f, alpha, weight_norm):
            raise UnsupportedConfigurationError(f"No closed form for {f.kind.value} with alpha={alpha}")
        amp = f.amplitude ** p
        if f.kind is FunctionKind.BOX_INDICATOR:
            return NormEstimate(amp * abs(float(np.linalg.det(f.shape))), 0.0, self.method)
        if f.kind is FunctionKind.TRIANGLE_INDICATOR:
            return NormEstimate(amp * 0.5 * f.side ** 2, 0.0, self.method)

        d = f.dim
        k = d + alpha
        log_det = float(np.linalg.slogdet(f.shape)[1])
        if f.kind is FunctionKind.GAUSSIAN:
            log_radial = log_gamma(0.5 * k) - math.log(2.0) - 0.5 * k * math.log(p)
        else:
            log_radial = -math.log(k)
        log_angular = math.log(sphere_area(d))
        if alpha:
            log_angular -= 0.5 * alpha * math.log(f.shape[0, 0])
        value = amp * math.exp(log_radial + log_angular - 0.5 * log_det)
        return NormEstimate(value, 0.0, self.method)

    def supports_mixed(self, f: TestFunction, pm: MixedExponent) -> bool:
        if f.kind is FunctionKind.ELLIPSOID_INDICATOR:
            return all(m == 1 for m in pm.m) and is_diagonal(f.shape)
        return f.is_axis_aligned_box

    def mixed_norm(self, f: TestFunction, pm: MixedExponent) -> NormEstimate:
        if not self.supports_mixed(f, pm):
            raise UnsupportedConfigurationError(f"No closed-form mixed norm for {f.kind.value}")
        if f.kind is FunctionKind.ELLIPSOID_INDICATOR:
            axes = np.diag(f.shape) ** -0.5
            return NormEstimate(f.amplitude * theta_scaled(pm.p, axes, 1.0), 0.0, self.method)
        sides = np.abs(np.diag(f.shape))
        return NormEstimate(f.amplitude * fundamental_box(pm.expanded(), sides), 0.0, self.method)

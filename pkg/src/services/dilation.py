"""Dilation operators V_A f(x) = f(Ax) and their predicted operator norms."""
import math
import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy import linalg

from src.core.config import DilationConfig
from src.core.exceptions import DomainError, SingularMatrixError
from src.core.logging import get_logger
from src.domain.functions import TestFunction
from src.domain.models import (
    AnisotropicPsi,
    Dilation,
    MixedExponent,
    Parallelepiped,
    ProductSet,
    PsiFunction,
    TensorDilation,
    WeightedBound,
)
from src.services.fundamental import FundamentalService

logger = get_logger(__name__)

MatrixLike = Union[np.ndarray, Sequence[Sequence[float]], float]


@dataclass(frozen=True)
class WeightedGLSBound:
    """Both candidate factors of the weighted GLS dilation bound."""
    printed: float
    derivation: float


def _is_scalar_matrix(A: np.ndarray) -> bool:
    return bool(np.allclose(A, A[0, 0] * np.eye(A.shape[0]), rtol=0.0, atol=1e-15 * abs(A[0, 0])))


class DilationService:
    """Builds dilations and evaluates the bounds they satisfy on L_p, GLS and AGLS spaces."""

    def __init__(self, config: DilationConfig, fundamental: FundamentalService):
        self.config = config
        self.fundamental = fundamental

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------
    def largest_eigenvalue(self, M: np.ndarray) -> float:
        """
        Largest eigenvalue of a symmetric positive semidefinite matrix by
        power iteration from the all-ones and the alternating-sign vectors.
        """
        n = M.shape[0]
        starts = [np.ones(n)]
        if n > 1:
            starts.append(np.array([(-1.0) ** i for i in range(n)]))
        best = 0.0
        for v in starts:
            v = v / np.linalg.norm(v)
            previous = 0.0
            converged = False
            for _ in range(self.config.power_max_iter):
                w = M @ v
                estimate = float(v @ w)
                size = float(np.linalg.norm(w))
                if size == 0.0:
                    estimate, converged = 0.0, True
                    break
                v = w / size
                if abs(estimate - previous) <= self.config.power_tol * abs(estimate):
                    converged = True
                    break
                previous = estimate
            if not converged:
                logger.warning(f"Power iteration hit the cap of {self.config.power_max_iter} iterations")
            best = max(best, estimate)
        return best

    def make_dilation(self, A: MatrixLike) -> Dilation:
        """
        Factor A and cache det, inverse and spectral norms.

        Raises:
            DomainError: A is not a finite square matrix
            SingularMatrixError: |det A| is negligible against the product of row norms
        """
        A = np.atleast_2d(np.asarray(A, dtype=float))
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DomainError(f"Dilation matrix must be square, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise DomainError("Dilation matrix must be finite")
        n = A.shape[0]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", linalg.LinAlgWarning)
            lu, piv = linalg.lu_factor(A, check_finite=False)
        swaps = int(np.count_nonzero(piv != np.arange(n)))
        det = float(np.prod(np.diag(lu))) * (-1.0) ** swaps
        scale = float(np.prod(np.linalg.norm(A, axis=1)))
        if scale == 0.0 or abs(det) < self.config.singular_rtol * scale:
            raise SingularMatrixError(
                f"Matrix is singular (|det|={abs(det):.3g}, scale {scale:.3g}); "
                f"det(A) != 0 is essential: a degenerate A maps L_p outside L_p"
            )
        inverse = linalg.lu_solve((lu, piv), np.eye(n), check_finite=False)
        op_norm = math.sqrt(self.largest_eigenvalue(A.T @ A))
        inv_op_norm = math.sqrt(self.largest_eigenvalue(inverse.T @ inverse))
        logger.debug(f"Dilation d={n}: det={det:.6g}, |A|={op_norm:.6g}, |A^-1|={inv_op_norm:.6g}")
        return Dilation(A, det, inverse, op_norm, inv_op_norm)

    def make_tensor(self, blocks: Sequence[Union[Dilation, MatrixLike]]) -> TensorDilation:
        """Tensor dilation from per-block matrices (or ready Dilation values)."""
        return TensorDilation(tuple(
            b if isinstance(b, Dilation) else self.make_dilation(b) for b in blocks
        ))

    def apply(self, V: Union[Dilation, TensorDilation], f: TestFunction) -> TestFunction:
        """The test function x -> f(Ax)."""
        if isinstance(V, TensorDilation):
            if V.dim != f.dim:
                raise DomainError(f"Tensor dilation on R^{V.dim} applied to a function on R^{f.dim}")
            inverse = np.zeros((V.dim, V.dim))
            start = 0
            for block in V.blocks:
                stop = start + block.dim
                inverse[start:stop, start:stop] = block.inverse
                start = stop
            return f.compose(V.matrix(), inverse)
        if V.dim != f.dim:
            raise DomainError(f"Dilation on R^{V.dim} applied to a function on R^{f.dim}")
        return f.compose(V.matrix, V.inverse)

    # ------------------------------------------------------------------
    # Predicted norms
    # ------------------------------------------------------------------
    @staticmethod
    def predicted_lp_ratio(V: Dilation, p: float) -> float:
        """|det A|^(-1/p), exact for every f in L_p."""
        if not p >= 1:
            raise DomainError(f"Exponent must be >= 1, got {p}")
        return abs(V.det) ** (-1.0 / p)

    def predicted_weighted_bound(self, V: Dilation, p: float, alpha: float) -> WeightedBound:
        """
        Operator norm candidates of V_A on L_{p,alpha}.

        The change of variables y = Ax gives |det A|^(-1/p) ||A^-1||^(alpha/p);
        the printed variants use ||A||^(-alpha/p), |det A|^(-(1+alpha)/p) and,
        for A = lambda I, |lambda|^(-d(1+alpha)/p).
        """
        if not alpha >= 0:
            raise DomainError(f"Weight exponent must be >= 0, got {alpha}")
        base = self.predicted_lp_ratio(V, p)
        scalar = None
        if _is_scalar_matrix(V.matrix):
            scalar = abs(V.matrix[0, 0]) ** (-V.dim * (1.0 + alpha) / p)
        return WeightedBound(
            derivation=base * V.inv_op_norm ** (alpha / p),
            printed=base * V.op_norm ** (-alpha / p),
            printed_diagonal=abs(V.det) ** (-(1.0 + alpha) / p),
            scalar_exponent=scalar,
        )

    @staticmethod
    def lambda_tensor(T: TensorDilation, pm: MixedExponent) -> float:
        """prod_j |det A_j|^(-1/p_j)."""
        if T.dims != pm.m:
            raise DomainError(f"Tensor blocks {T.dims} do not match exponent blocks {pm.m}")
        return math.prod(abs(b.det) ** (-1.0 / pj) for b, pj in zip(T.blocks, pm.p))

    def gls_dilation_bound(self, V: Dilation, zeta: PsiFunction) -> float:
        """phi(G zeta, |det A|^-1)."""
        return self.fundamental.fundamental_gls(zeta, 1.0 / abs(V.det))

    def weighted_gls_bound(self, V: Dilation, zeta: PsiFunction, alpha: float) -> WeightedGLSBound:
        """
        phi(G zeta, |det A|^-1 ||A||^-alpha) as printed, and the variant with
        ||A^-1||^alpha that the change of variables supports.
        """
        if not alpha >= 0:
            raise DomainError(f"Weight exponent must be >= 0, got {alpha}")
        inv_det = 1.0 / abs(V.det)
        return WeightedGLSBound(
            printed=self.fundamental.fundamental_gls(zeta, inv_det * V.op_norm ** (-alpha)),
            derivation=self.fundamental.fundamental_gls(zeta, inv_det * V.inv_op_norm ** alpha),
        )

    @staticmethod
    def k_cube(T: TensorDilation) -> ProductSet:
        """Product of cubes, block j of side |det A_j|^(-1/m_j) (volume |det A_j|^-1)."""
        return ProductSet(tuple(
            Parallelepiped.cube(abs(b.det) ** (-1.0 / b.dim), b.dim) for b in T.blocks
        ))

    def agls_dilation_bound(self, T: TensorDilation, zeta: AnisotropicPsi) -> float:
        """phi(AGLS zeta, K), i.e. sup over p of Lambda_p(A) / zeta(p)."""
        return self.fundamental.fundamental_agls(zeta, self.k_cube(T))

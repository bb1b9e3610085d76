"""Test functions whose norms the toolkit evaluates.

Two families are closed under x -> Ax:

* quadric functions ``c * h((x - x0)^T S (x - x0))`` with h(t) = exp(-t)
  (Gaussian), 1{t <= 1} (ellipsoid indicator) or t^(-gamma/2) 1{t <= R^2}
  (truncated power law); composing with A maps S to A^T S A and x0 to A^-1 x0;
* parallelotope indicators ``{o + E u : u in [0,1]^d}``; composing with A maps
  (o, E) to (A^-1 o, A^-1 E). Axis-aligned boxes are the diagonal-E case.

Everything else (triangles, compositions of non-closed functions) is kept as
an explicit composition and is integrated numerically.
"""
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import DomainError


class FunctionKind(Enum):
    """Test function family."""
    GAUSSIAN = "gaussian_factorable"
    BOX_INDICATOR = "box_indicator"
    ELLIPSOID_INDICATOR = "ellipsoid_indicator"
    POWER_DECAY = "power_decay"
    PRODUCT = "product"
    TRIANGLE_INDICATOR = "triangle_indicator"
    COMPOSED = "composed"


QUADRIC_KINDS = (FunctionKind.GAUSSIAN, FunctionKind.ELLIPSOID_INDICATOR, FunctionKind.POWER_DECAY)
_BLOCK_TOL = 1e-14


def _vector(values: Any, dim: Optional[int] = None, name: str = "vector") -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional")
    if dim is not None and arr.shape[0] != dim:
        raise DomainError(f"{name} has length {arr.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {values!r}")
    return arr


def _off_block_max(matrix: np.ndarray, blocks: Sequence[int]) -> float:
    mask = np.ones(matrix.shape, dtype=bool)
    start = 0
    for m in blocks:
        mask[start:start + m, start:start + m] = False
        start += m
    return float(np.max(np.abs(matrix[mask]))) if mask.any() else 0.0


def _block_slices(blocks: Sequence[int]) -> List[slice]:
    slices = []
    start = 0
    for m in blocks:
        slices.append(slice(start, start + m))
        start += m
    return slices


def _image_box(inverse: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Bounding box of {inverse @ y : lo <= y <= hi}."""
    a = inverse * lo[np.newaxis, :]
    b = inverse * hi[np.newaxis, :]
    return np.minimum(a, b).sum(axis=1), np.maximum(a, b).sum(axis=1)


@dataclass(frozen=True, eq=False)
class TestFunction:
    """
    A nonnegative test function on R^d.

    Instances are immutable; use the classmethod constructors rather than
    filling the fields by hand.
    """
    __test__ = False  # not a pytest class

    kind: FunctionKind
    dim: int
    amplitude: float = 1.0
    center: Optional[np.ndarray] = None
    shape: Optional[np.ndarray] = None
    gamma: float = 0.0
    radius: float = 1.0
    side: float = 1.0
    factors: Tuple["TestFunction", ...] = field(default_factory=tuple)
    base: Optional["TestFunction"] = None
    matrix: Optional[np.ndarray] = None
    matrix_inverse: Optional[np.ndarray] = None

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", FunctionKind(self.kind))
        if not (self.amplitude > 0 and math.isfinite(self.amplitude)):
            raise DomainError(f"Amplitude must be positive, got {self.amplitude}")

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------
    @classmethod
    def gaussian(cls, scales: Sequence[float], center: Optional[Sequence[float]] = None,
                 amplitude: float = 1.0) -> "TestFunction":
        """prod_j exp(-c_j (x_j - mu_j)^2)."""
        scales = _vector(scales, name="scales")
        if np.any(scales <= 0):
            raise DomainError(f"Gaussian scales must be positive, got {scales}")
        return cls.gaussian_quadratic(np.diag(scales), center, amplitude)

    @classmethod
    def gaussian_quadratic(cls, S: np.ndarray, center: Optional[Sequence[float]] = None,
                           amplitude: float = 1.0) -> "TestFunction":
        """exp(-(x - mu)^T S (x - mu)) for a symmetric positive definite S."""
        return cls._quadric(FunctionKind.GAUSSIAN, S, center, amplitude)

    @classmethod
    def ellipsoid(cls, axes: Sequence[float], center: Optional[Sequence[float]] = None,
                  amplitude: float = 1.0) -> "TestFunction":
        """Indicator of the axis-aligned ellipsoid with the given semi-axes."""
        axes = _vector(axes, name="axes")
        if np.any(axes <= 0):
            raise DomainError(f"Semi-axes must be positive, got {axes}")
        return cls._quadric(FunctionKind.ELLIPSOID_INDICATOR, np.diag(axes ** -2.0), center, amplitude)

    @classmethod
    def ellipsoid_quadratic(cls, S: np.ndarray, center: Optional[Sequence[float]] = None,
                            amplitude: float = 1.0) -> "TestFunction":
        """Indicator of {x : (x - c)^T S (x - c) <= 1}."""
        return cls._quadric(FunctionKind.ELLIPSOID_INDICATOR, S, center, amplitude)

    @classmethod
    def unit_ball(cls, dim: int) -> "TestFunction":
        return cls.ellipsoid(np.ones(dim))

    @classmethod
    def power_decay(cls, dim: int, gamma: float, radius: float = 1.0,
                    S: Optional[np.ndarray] = None, center: Optional[Sequence[float]] = None,
                    amplitude: float = 1.0) -> "TestFunction":
        """q(x)^(-gamma/2) on the truncation ball q(x) <= radius^2, q(x) = x^T S x (S = I by default)."""
        if not (gamma >= 0 and math.isfinite(gamma)):
            raise DomainError(f"Decay exponent must be >= 0, got {gamma}")
        if not (radius > 0 and math.isfinite(radius)):
            raise DomainError(f"Truncation radius must be positive, got {radius}")
        S = np.eye(dim) if S is None else S
        base = cls._quadric(FunctionKind.POWER_DECAY, S, center, amplitude)
        return replace(base, gamma=float(gamma), radius=float(radius))

    @classmethod
    def _quadric(cls, kind: FunctionKind, S: np.ndarray, center: Optional[Sequence[float]],
                 amplitude: float) -> "TestFunction":
        S = np.atleast_2d(np.asarray(S, dtype=float))
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise DomainError(f"Quadratic form must be square, got shape {S.shape}")
        S = 0.5 * (S + S.T)
        if np.min(np.linalg.eigvalsh(S)) <= 0:
            raise DomainError("Quadratic form must be positive definite")
        dim = S.shape[0]
        center = np.zeros(dim) if center is None else _vector(center, dim, "center")
        return cls(kind=kind, dim=dim, amplitude=float(amplitude), center=center, shape=S)

    @classmethod
    def box(cls, lower: Sequence[float], sides: Sequence[float], amplitude: float = 1.0) -> "TestFunction":
        """Indicator of prod [lower_j, lower_j + sides_j]."""
        sides = _vector(sides, name="sides")
        if np.any(sides <= 0):
            raise DomainError(f"Box sides must be positive, got {sides}")
        return cls.parallelotope(_vector(lower, sides.shape[0], "lower"), np.diag(sides), amplitude)

    @classmethod
    def parallelotope(cls, origin: Sequence[float], edges: np.ndarray, amplitude: float = 1.0) -> "TestFunction":
        """Indicator of {origin + E u : u in [0,1]^d}; columns of E are the edges."""
        edges = np.atleast_2d(np.asarray(edges, dtype=float))
        if edges.shape[0] != edges.shape[1]:
            raise DomainError(f"Edge matrix must be square, got shape {edges.shape}")
        if abs(np.linalg.det(edges)) == 0.0:
            raise DomainError("Degenerate parallelotope (zero volume)")
        dim = edges.shape[0]
        return cls(kind=FunctionKind.BOX_INDICATOR, dim=dim, amplitude=float(amplitude),
                   center=_vector(origin, dim, "origin"), shape=edges)

    @classmethod
    def triangle(cls, side: float = 1.0, amplitude: float = 1.0) -> "TestFunction":
        """Indicator of {0 <= x_2 <= x_1 <= side} in R^2."""
        if not side > 0:
            raise DomainError(f"Triangle side must be positive, got {side}")
        return cls(kind=FunctionKind.TRIANGLE_INDICATOR, dim=2, amplitude=float(amplitude), side=float(side))

    @classmethod
    def product(cls, *factors: "TestFunction") -> "TestFunction":
        """g_1(x_1) g_2(x_2) ... with x_j in R^(dim of g_j)."""
        if not factors:
            raise DomainError("A product needs at least one factor")
        if len(factors) == 1:
            return factors[0]
        flat: List[TestFunction] = []
        for factor in factors:
            flat.extend(factor.factors if factor.kind is FunctionKind.PRODUCT else (factor,))
        return cls(kind=FunctionKind.PRODUCT, dim=sum(f.dim for f in flat), factors=tuple(flat))

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------
    @property
    def is_quadric(self) -> bool:
        return self.kind in QUADRIC_KINDS

    @property
    def is_centered(self) -> bool:
        return self.center is not None and not np.any(self.center)

    @property
    def is_indicator(self) -> bool:
        return self.kind in (FunctionKind.BOX_INDICATOR, FunctionKind.ELLIPSOID_INDICATOR,
                             FunctionKind.TRIANGLE_INDICATOR)

    @property
    def is_axis_aligned_box(self) -> bool:
        return self.kind is FunctionKind.BOX_INDICATOR and _off_block_max(self.shape, [1] * self.dim) == 0.0

    @property
    def factor_dims(self) -> Tuple[int, ...]:
        if self.kind is FunctionKind.PRODUCT:
            return tuple(f.dim for f in self.factors)
        return (self.dim,)

    def max_exponent(self, alpha: float = 0.0) -> float:
        """Open upper end of the exponents p with integral |f|^p |x|^alpha finite."""
        if self.kind is FunctionKind.POWER_DECAY and self.gamma > 0:
            return (self.dim + alpha) / self.gamma
        if self.kind is FunctionKind.PRODUCT:
            return min(f.max_exponent(0.0) for f in self.factors)
        if self.kind is FunctionKind.COMPOSED:
            return self.base.max_exponent(alpha)
        return math.inf

    def check_exponent(self, p: float, alpha: float = 0.0) -> None:
        """Raise DomainError unless p lies in [1, max_exponent)."""
        if not p >= 1.0:
            raise DomainError(f"Exponent must be >= 1, got {p}")
        limit = self.max_exponent(alpha)
        if not p < limit:
            raise DomainError(
                f"Exponent p={p} outside the integrability range [1, {limit:g}) of {self.kind.value}"
            )

    def factorize(self, blocks: Sequence[int]) -> Optional[List["TestFunction"]]:
        """
        Split f into factors g_j living on consecutive coordinate blocks.

        Args:
            blocks: Block dimensions m_1..m_l summing to ``dim``

        Returns:
            The factors, or None if f does not factor along these blocks
        """
        blocks = [int(m) for m in blocks]
        if sum(blocks) != self.dim or any(m < 1 for m in blocks):
            raise DomainError(f"Blocks {blocks} do not partition dimension {self.dim}")
        if len(blocks) == 1:
            return [self]

        if self.kind is FunctionKind.GAUSSIAN:
            if _off_block_max(self.shape, blocks) > _BLOCK_TOL * np.max(np.abs(self.shape)):
                return None
            result = []
            for i, sl in enumerate(_block_slices(blocks)):
                amp = self.amplitude if i == 0 else 1.0
                result.append(TestFunction._quadric(FunctionKind.GAUSSIAN, self.shape[sl, sl], self.center[sl], amp))
            return result

        if self.kind is FunctionKind.BOX_INDICATOR:
            if _off_block_max(self.shape, blocks) > _BLOCK_TOL * np.max(np.abs(self.shape)):
                return None
            result = []
            for i, sl in enumerate(_block_slices(blocks)):
                amp = self.amplitude if i == 0 else 1.0
                result.append(TestFunction.parallelotope(self.center[sl], self.shape[sl, sl], amp))
            return result

        if self.kind is FunctionKind.PRODUCT:
            return self._factorize_product(blocks)

        return None

    def _factorize_product(self, blocks: List[int]) -> Optional[List["TestFunction"]]:
        queue = list(self.factors)
        result: List[TestFunction] = []
        for need in blocks:
            group: List[TestFunction] = []
            have = 0
            while have < need:
                piece = queue.pop(0)
                if have + piece.dim <= need:
                    group.append(piece)
                    have += piece.dim
                    continue
                split = piece.factorize([need - have, piece.dim - need + have])
                if split is None:
                    return None
                group.append(split[0])
                queue.insert(0, split[1])
                have = need
            result.append(TestFunction.product(*group))
        return result

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------
    def quadratic_values(self, points: np.ndarray) -> np.ndarray:
        """q(x) = (x - x0)^T S (x - x0) at each row of ``points``."""
        z = np.asarray(points, dtype=float) - self.center
        return np.einsum("ni,ij,nj->n", z, self.shape, z)

    def profile(self, t: np.ndarray) -> np.ndarray:
        """Radial profile h(t) of a quadric function (without amplitude)."""
        t = np.asarray(t, dtype=float)
        if self.kind is FunctionKind.GAUSSIAN:
            return np.exp(-t)
        if self.kind is FunctionKind.ELLIPSOID_INDICATOR:
            return (t <= 1.0).astype(float)
        if self.kind is FunctionKind.POWER_DECAY:
            with np.errstate(divide="ignore", invalid="ignore"):
                core = np.where(t > 0, t, 0.0) ** (-0.5 * self.gamma) if self.gamma > 0 else np.ones_like(t)
            return np.where(t <= self.radius ** 2, core, 0.0)
        raise DomainError(f"{self.kind.value} has no radial profile")

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """f at each row of an (n, d) array."""
        x = np.atleast_2d(np.asarray(points, dtype=float))
        if x.shape[1] != self.dim:
            raise DomainError(f"Points of dimension {x.shape[1]} passed to a function on R^{self.dim}")
        if self.is_quadric:
            return self.amplitude * self.profile(self.quadratic_values(x))
        if self.kind is FunctionKind.BOX_INDICATOR:
            u = np.linalg.solve(self.shape, (x - self.center).T).T
            inside = np.all((u >= -1e-15) & (u <= 1.0 + 1e-15), axis=1)
            return self.amplitude * inside.astype(float)
        if self.kind is FunctionKind.TRIANGLE_INDICATOR:
            inside = (x[:, 1] >= 0) & (x[:, 1] <= x[:, 0]) & (x[:, 0] <= self.side)
            return self.amplitude * inside.astype(float)
        if self.kind is FunctionKind.PRODUCT:
            values = np.ones(x.shape[0])
            for factor, sl in zip(self.factors, _block_slices(self.factor_dims)):
                values *= factor.evaluate(x[:, sl])
            return values
        if self.kind is FunctionKind.COMPOSED:
            return self.amplitude * self.base.evaluate(x @ self.matrix.T)
        raise DomainError(f"Cannot evaluate {self.kind.value}")

    def line_breaks(self, point: np.ndarray, direction: np.ndarray) -> List[float]:
        """
        Parameters t where t -> f(point + t * direction) may jump or blow up.

        Indicator boundaries and the power-law center; empty for Gaussians.
        """
        y = np.asarray(point, dtype=float)
        v = np.asarray(direction, dtype=float)
        if not np.any(v):
            return []
        if self.kind is FunctionKind.GAUSSIAN:
            return []
        if self.is_quadric:
            z = y - self.center
            a = float(v @ self.shape @ v)
            b = float(v @ self.shape @ z)
            c = float(z @ self.shape @ z)
            r2 = self.radius ** 2 if self.kind is FunctionKind.POWER_DECAY else 1.0
            breaks = [-b / a]
            disc = b * b - a * (c - r2)
            if disc >= 0:
                root = math.sqrt(disc)
                breaks += [(-b - root) / a, (-b + root) / a]
            return breaks if self.kind is FunctionKind.POWER_DECAY else breaks[1:]
        if self.kind is FunctionKind.BOX_INDICATOR:
            inverse = np.linalg.inv(self.shape)
            u0 = inverse @ (y - self.center)
            rate = inverse @ v
            breaks = []
            for u, r in zip(u0, rate):
                if r != 0.0:
                    breaks += [-u / r, (1.0 - u) / r]
            return breaks
        if self.kind is FunctionKind.TRIANGLE_INDICATOR:
            # edges x_2 = 0, x_2 = x_1 and x_1 = side
            breaks = []
            if v[1] != 0.0:
                breaks.append(-y[1] / v[1])
            if v[0] != v[1]:
                breaks.append((y[1] - y[0]) / (v[0] - v[1]))
            if v[0] != 0.0:
                breaks.append((self.side - y[0]) / v[0])
            return breaks
        if self.kind is FunctionKind.PRODUCT:
            breaks = []
            for factor, sl in zip(self.factors, _block_slices(self.factor_dims)):
                breaks += factor.line_breaks(y[sl], v[sl])
            return breaks
        if self.kind is FunctionKind.COMPOSED:
            return self.base.line_breaks(self.matrix @ y, self.matrix @ v)
        raise DomainError(f"No break points for {self.kind.value}")

    def section_breaks(self, axis: int, point: Sequence[float], lo: float, hi: float) -> List[float]:
        """Sorted break coordinates of x_axis strictly inside (lo, hi), other coordinates from ``point``."""
        y = np.asarray(point, dtype=float)
        e = np.zeros(self.dim)
        e[axis] = 1.0
        values = {float(y[axis] + t) for t in self.line_breaks(y, e) if math.isfinite(t)}
        return sorted(x for x in values if lo < x < hi)

    def bounding_box(self, tail_tol: float = 1e-12) -> Tuple[np.ndarray, np.ndarray]:
        """
        Box containing the support, or for Gaussians the region outside which
        |f|^p (p >= 1) carries less than ``tail_tol`` of its mass.
        """
        if self.is_quadric:
            if self.kind is FunctionKind.GAUSSIAN:
                r2 = math.log(1.0 / tail_tol) + 2.0 * self.dim
            elif self.kind is FunctionKind.POWER_DECAY:
                r2 = self.radius ** 2
            else:
                r2 = 1.0
            half = np.sqrt(r2 * np.diag(np.linalg.inv(self.shape)))
            return self.center - half, self.center + half
        if self.kind is FunctionKind.BOX_INDICATOR:
            lo = self.center + np.minimum(self.shape, 0.0).sum(axis=1)
            hi = self.center + np.maximum(self.shape, 0.0).sum(axis=1)
            return lo, hi
        if self.kind is FunctionKind.TRIANGLE_INDICATOR:
            return np.zeros(2), np.full(2, self.side)
        if self.kind is FunctionKind.PRODUCT:
            boxes = [f.bounding_box(tail_tol) for f in self.factors]
            return np.concatenate([b[0] for b in boxes]), np.concatenate([b[1] for b in boxes])
        if self.kind is FunctionKind.COMPOSED:
            lo, hi = self.base.bounding_box(tail_tol)
            return _image_box(self.matrix_inverse, lo, hi)
        raise DomainError(f"No bounding box for {self.kind.value}")

    # ------------------------------------------------------------------
    # Transformations
    # ------------------------------------------------------------------
    def scaled(self, c: float) -> "TestFunction":
        """The function c * f."""
        if not (c > 0 and math.isfinite(c)):
            raise DomainError(f"Scale must be positive, got {c}")
        if self.kind is FunctionKind.PRODUCT:
            return TestFunction.product(self.factors[0].scaled(c), *self.factors[1:])
        return replace(self, amplitude=self.amplitude * c)

    def compose(self, matrix: np.ndarray, inverse: Optional[np.ndarray] = None) -> "TestFunction":
        """x -> f(A x) for a nonsingular A (``inverse`` is A^-1 when already known)."""
        A = np.atleast_2d(np.asarray(matrix, dtype=float))
        if A.shape != (self.dim, self.dim):
            raise DomainError(f"Matrix of shape {A.shape} cannot act on R^{self.dim}")
        A_inv = np.linalg.inv(A) if inverse is None else np.asarray(inverse, dtype=float)

        if self.is_quadric:
            S = A.T @ self.shape @ A
            return replace(self, shape=0.5 * (S + S.T), center=A_inv @ self.center)
        if self.kind is FunctionKind.BOX_INDICATOR:
            return replace(self, center=A_inv @ self.center, shape=A_inv @ self.shape)
        if self.kind is FunctionKind.PRODUCT:
            dims = self.factor_dims
            if _off_block_max(A, dims) == 0.0:
                parts = [
                    f.compose(A[sl, sl], A_inv[sl, sl])
                    for f, sl in zip(self.factors, _block_slices(dims))
                ]
                return TestFunction.product(*parts)
        if self.kind is FunctionKind.COMPOSED:
            return replace(self, matrix=self.matrix @ A, matrix_inverse=A_inv @ self.matrix_inverse)
        return TestFunction(kind=FunctionKind.COMPOSED, dim=self.dim, base=self,
                            matrix=A, matrix_inverse=A_inv)

    # ------------------------------------------------------------------
    # Description
    # ------------------------------------------------------------------
    def describe(self) -> Dict[str, Any]:
        """Parameters for report rows."""
        info: Dict[str, Any] = {"kind": self.kind.value, "dim": self.dim}
        if self.amplitude != 1.0:
            info["amplitude"] = self.amplitude
        if self.is_quadric:
            info["center"] = self.center.tolist()
            info["form"] = self.shape.tolist()
            if self.kind is FunctionKind.POWER_DECAY:
                info["gamma"] = self.gamma
                info["radius"] = self.radius
        elif self.kind is FunctionKind.BOX_INDICATOR:
            info["origin"] = self.center.tolist()
            info["edges"] = self.shape.tolist()
        elif self.kind is FunctionKind.TRIANGLE_INDICATOR:
            info["side"] = self.side
        elif self.kind is FunctionKind.PRODUCT:
            info["factors"] = [f.describe() for f in self.factors]
        elif self.kind is FunctionKind.COMPOSED:
            info["base"] = self.base.describe()
            info["matrix"] = self.matrix.tolist()
        return info

    @classmethod
    def from_descriptor(cls, text: str) -> "TestFunction":
        """
        Parse ``kind:key=value,...`` with ``;``-separated vectors.

        Examples: ``box:sides=4;9``, ``gaussian:scales=1``,
        ``ellipsoid:axes=2;0.5``, ``power:dim=2,gamma=0.25,radius=1``,
        ``triangle:side=1``.
        """
        kind, _, rest = text.partition(":")
        params: Dict[str, str] = {}
        for item in filter(None, rest.split(",")):
            key, sep, value = item.partition("=")
            if not sep:
                raise DomainError(f"Malformed parameter {item!r} in {text!r}")
            params[key.strip()] = value.strip()

        def vec(key: str, default: Optional[List[float]] = None) -> Optional[List[float]]:
            if key not in params:
                return default
            return [float(v) for v in params[key].split(";")]

        kind = kind.strip().lower()
        try:
            if kind == "gaussian":
                return cls.gaussian(vec("scales", [1.0]), vec("center"), float(params.get("amplitude", 1.0)))
            if kind == "box":
                sides = vec("sides", [1.0])
                return cls.box(vec("lower", [0.0] * len(sides)), sides, float(params.get("amplitude", 1.0)))
            if kind == "ellipsoid":
                return cls.ellipsoid(vec("axes", [1.0]), vec("center"), float(params.get("amplitude", 1.0)))
            if kind == "power":
                return cls.power_decay(int(params.get("dim", 1)), float(params.get("gamma", 0.25)),
                                       float(params.get("radius", 1.0)))
            if kind == "triangle":
                return cls.triangle(float(params.get("side", 1.0)))
        except (TypeError, ValueError) as e:
            if isinstance(e, DomainError):
                raise
            raise DomainError(f"Cannot parse function descriptor {text!r}: {e}") from e
        raise DomainError(f"Unknown function kind {kind!r} in {text!r}")

"""Domain models: exponents, regions, psi functions, dilations and reports."""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import DomainError


class NormMethod(Enum):
    """How a norm estimate was obtained."""
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


class Verdict(Enum):
    """Outcome of one report row."""
    PASS = "pass"
    FAIL = "fail"
    INFO = "informational"


class Precedence(Enum):
    """Numerical verdict for the order psi1 << psi2."""
    TRUE = "true"
    FALSE = "false"
    INCONCLUSIVE = "inconclusive"


def _as_tuple(values: Sequence[float], name: str) -> Tuple[float, ...]:
    try:
        result = tuple(float(v) for v in np.atleast_1d(np.asarray(values, dtype=float)))
    except (TypeError, ValueError) as e:
        raise DomainError(f"{name} must be a vector of reals, got {values!r}") from e
    if not result:
        raise DomainError(f"{name} must not be empty")
    return result


def jsonable(value: Any) -> Any:
    """Convert numpy scalars, arrays, enums and non-finite floats for JSON output."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


@dataclass
class NormEstimate:
    """
    A norm value with its error bound.

    ``lower_bound`` marks sup-type quantities (GLS/AGLS norms) whose value
    is the best grid value found, i.e. a lower estimate of the supremum.
    """
    value: float
    abs_error: float = 0.0
    method: NormMethod = NormMethod.CLOSED_FORM
    samples_or_nodes: int = 0
    lower_bound: bool = False
    argmax: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        """Normalize method strings and validate the error bound."""
        if isinstance(self.method, str):
            self.method = NormMethod(self.method.lower())
        if self.abs_error < 0 or math.isnan(self.abs_error):
            raise DomainError(f"abs_error must be >= 0, got {self.abs_error}")

    @property
    def rel_error(self) -> float:
        """Relative error bound; infinite when the value is zero."""
        if self.value == 0:
            return 0.0 if self.abs_error == 0 else math.inf
        return self.abs_error / abs(self.value)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to a JSON-ready dictionary."""
        return jsonable({
            "value": self.value,
            "abs_error": self.abs_error,
            "method": self.method,
            "samples_or_nodes": self.samples_or_nodes,
            "lower_bound": self.lower_bound,
            "argmax": self.argmax,
        })


@dataclass(frozen=True)
class MixedExponent:
    """Exponent vector p = (p_1..p_l) acting on blocks of dimensions m = (m_1..m_l)."""
    p: Tuple[float, ...]
    m: Tuple[int, ...]

    def __post_init__(self):
        """Validate lengths and ranges."""
        p = _as_tuple(self.p, "p")
        m = tuple(int(v) for v in np.atleast_1d(self.m))
        if len(p) != len(m):
            raise DomainError(f"Exponent vector {p} and block dims {m} differ in length")
        if any(not (v >= 1.0) for v in p):
            raise DomainError(f"All exponents must be >= 1, got {p}")
        if any(v < 1 for v in m):
            raise DomainError(f"Block dimensions must be positive, got {m}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "m", m)

    @classmethod
    def per_coordinate(cls, p: Sequence[float]) -> "MixedExponent":
        """One exponent per coordinate (all blocks one-dimensional)."""
        p = _as_tuple(p, "p")
        return cls(p, (1,) * len(p))

    @classmethod
    def uniform(cls, p: float, m: Sequence[int]) -> "MixedExponent":
        """Same exponent on every block; the mixed norm reduces to the L_p norm."""
        m = tuple(int(v) for v in m)
        return cls((float(p),) * len(m), m)

    @property
    def l(self) -> int:
        """Number of blocks."""
        return len(self.p)

    @property
    def d(self) -> int:
        """Total dimension."""
        return sum(self.m)

    def expanded(self) -> Tuple[float, ...]:
        """Exponent repeated over the coordinates of its block."""
        return tuple(pj for pj, mj in zip(self.p, self.m) for _ in range(mj))

    def is_uniform(self) -> bool:
        """True when all block exponents coincide."""
        return all(abs(v - self.p[0]) <= 1e-15 * self.p[0] for v in self.p)


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """The set {x : sum((x_i - c_i)^2 / (R a_i)^2) <= 1}."""
    a: Tuple[float, ...]
    R: float = 1.0
    center: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        """Validate semi-axes, radius and center."""
        a = _as_tuple(self.a, "a")
        if any(not (v > 0 and math.isfinite(v)) for v in a):
            raise DomainError(f"Semi-axes must be positive, got {a}")
        if not (self.R > 0 and math.isfinite(self.R)):
            raise DomainError(f"Radius must be positive, got {self.R}")
        center = (0.0,) * len(a) if self.center is None else _as_tuple(self.center, "center")
        if len(center) != len(a):
            raise DomainError(f"Center {center} does not match dimension {len(a)}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "R", float(self.R))
        object.__setattr__(self, "center", center)

    @property
    def dim(self) -> int:
        return len(self.a)

    @property
    def axes(self) -> Tuple[float, ...]:
        """Effective semi-axes R * a_i."""
        return tuple(self.R * v for v in self.a)

    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        c = np.asarray(self.center)
        r = np.asarray(self.axes)
        return c - r, c + r

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Indicator at the rows of ``points``."""
        z = (np.asarray(points, dtype=float) - np.asarray(self.center)) / np.asarray(self.axes)
        return (np.sum(z * z, axis=-1) <= 1.0).astype(float)


@dataclass(frozen=True, eq=False)
class Parallelepiped:
    """Axis-aligned box origin_j <= x_j <= origin_j + delta_j."""
    origin: Tuple[float, ...]
    delta: Tuple[float, ...]

    def __post_init__(self):
        """Validate sides."""
        origin = _as_tuple(self.origin, "origin")
        delta = _as_tuple(self.delta, "delta")
        if len(origin) != len(delta):
            raise DomainError(f"Origin {origin} and sides {delta} differ in length")
        if any(not (v > 0 and math.isfinite(v)) for v in delta):
            raise DomainError(f"Box sides must be positive, got {delta}")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "delta", delta)

    @classmethod
    def cube(cls, side: float, dim: int) -> "Parallelepiped":
        return cls((0.0,) * dim, (float(side),) * dim)

    @property
    def dim(self) -> int:
        return len(self.delta)

    @property
    def volume(self) -> float:
        return math.prod(self.delta)

    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        lo = np.asarray(self.origin)
        return lo, lo + np.asarray(self.delta)

    def contains(self, points: np.ndarray) -> np.ndarray:
        lo, hi = self.bounding_box()
        x = np.asarray(points, dtype=float)
        return np.all((x >= lo) & (x <= hi), axis=-1).astype(float)


@dataclass(frozen=True, eq=False)
class ProductSet:
    """Cartesian product of box/ellipsoid blocks; block j is measured with exponent p_j."""
    blocks: Tuple[Any, ...]

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise DomainError("A product set needs at least one block")
        for block in blocks:
            if not isinstance(block, (Ellipsoid, Parallelepiped)):
                raise DomainError(f"Unsupported block type {type(block).__name__}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(b.dim for b in self.blocks)

    @property
    def dim(self) -> int:
        return sum(self.dims)


@dataclass(frozen=True, eq=False)
class PsiFunction:
    """
    A continuous positive function on the open interval (lower, upper).

    Evaluation outside the open support returns +inf, so sup-type norms
    simply ignore those exponents.
    """
    lower: float
    upper: float
    func: Callable[[float], float]
    label: str = "psi"

    def __post_init__(self):
        """Validate the support 1 <= a < b <= inf."""
        lower = float(self.lower)
        upper = float(self.upper)
        if math.isnan(lower) or math.isnan(upper) or not math.isfinite(lower):
            raise DomainError(f"Invalid support ({self.lower}, {self.upper})")
        if lower < 1.0 or not lower < upper:
            raise DomainError(f"Support must satisfy 1 <= a < b <= inf, got ({lower}, {upper})")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def __call__(self, p: float) -> float:
        if not self.lower < p < self.upper:
            return math.inf
        return float(self.func(p))

    def contains(self, p: float) -> bool:
        return self.lower < p < self.upper

    @property
    def support(self) -> Tuple[float, float]:
        return self.lower, self.upper

    def scaled(self, c: float) -> "PsiFunction":
        """The function c * psi."""
        if not (c > 0 and math.isfinite(c)):
            raise DomainError(f"Scale must be positive, got {c}")
        func = self.func
        return PsiFunction(self.lower, self.upper, lambda p: c * func(p), f"{c:g}*{self.label}")


@dataclass(frozen=True, eq=False)
class PsiTilde:
    """Piecewise (p - a)^(-alpha) on (a, h), p^beta on [h, inf), glued at the crossover h."""
    a: float
    alpha: float
    beta: float
    h: float

    def __call__(self, p: float) -> float:
        if not p > self.a:
            return math.inf
        if p < self.h:
            return (p - self.a) ** (-self.alpha)
        return p ** self.beta

    def as_psi(self) -> PsiFunction:
        """The same function as a PsiFunction on (a, inf)."""
        return PsiFunction(
            self.a, math.inf, self.__call__,
            f"tilde(a={self.a:g},alpha={self.alpha:g},beta={self.beta:g})",
        )


@dataclass(frozen=True, eq=False)
class AnisotropicPsi:
    """
    A positive function of an exponent vector on the box Q = prod (a_j, b_j).

    When ``factors`` is set the function equals prod psi_j(p_j).
    """
    bounds: Tuple[Tuple[float, float], ...]
    func: Callable[[Sequence[float]], float]
    label: str = "psi"
    factors: Optional[Tuple[PsiFunction, ...]] = None

    def __post_init__(self):
        bounds = tuple((float(a), float(b)) for a, b in self.bounds)
        if not bounds:
            raise DomainError("Exponent domain must have at least one coordinate")
        for a, b in bounds:
            if a < 1.0 or not a < b:
                raise DomainError(f"Exponent domain interval ({a}, {b}) is invalid")
        object.__setattr__(self, "bounds", bounds)
        if self.factors is not None:
            object.__setattr__(self, "factors", tuple(self.factors))

    @classmethod
    def factorable(cls, *psis: PsiFunction) -> "AnisotropicPsi":
        """psi(p) = prod psi_j(p_j)."""
        if not psis:
            raise DomainError("At least one factor is required")

        def func(pvec: Sequence[float]) -> float:
            return math.prod(psi(pj) for psi, pj in zip(psis, pvec))

        label = "*".join(psi.label for psi in psis)
        return cls(tuple(psi.support for psi in psis), func, label, tuple(psis))

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def is_factorable(self) -> bool:
        return self.factors is not None

    def contains(self, pvec: Sequence[float]) -> bool:
        return len(pvec) == self.dim and all(a < p < b for p, (a, b) in zip(pvec, self.bounds))

    def __call__(self, pvec: Sequence[float]) -> float:
        if not self.contains(pvec):
            return math.inf
        return float(self.func(pvec))


@dataclass(frozen=True, eq=False)
class Dilation:
    """A nonsingular matrix A with cached determinant, inverse and spectral norms."""
    matrix: np.ndarray
    det: float
    inverse: np.ndarray
    op_norm: float
    inv_op_norm: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class TensorDilation:
    """Block-diagonal dilation (A_1, ..., A_l), A_j acting on R^(m_j)."""
    blocks: Tuple[Dilation, ...]

    def __post_init__(self):
        if not self.blocks:
            raise DomainError("A tensor dilation needs at least one block")
        object.__setattr__(self, "blocks", tuple(self.blocks))

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(b.dim for b in self.blocks)

    @property
    def dim(self) -> int:
        return sum(self.dims)

    def matrix(self) -> np.ndarray:
        """The full block-diagonal d x d matrix."""
        d = self.dim
        full = np.zeros((d, d))
        start = 0
        for block in self.blocks:
            stop = start + block.dim
            full[start:stop, start:stop] = block.matrix
            start = stop
        return full


@dataclass(frozen=True)
class WeightedBound:
    """Candidate operator norms of V_A on the weighted space L_{p,alpha}.

    ``derivation`` is |det A|^(-1/p) ||A^-1||^(alpha/p), the value the
    change of variables supports; the others are the printed variants.
    """
    derivation: float
    printed: float
    printed_diagonal: float
    scalar_exponent: Optional[float] = None

    @property
    def value(self) -> float:
        return self.derivation


@dataclass
class ReportRow:
    """One checked or informational case of an experiment."""
    case_id: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    predicted: Any = None
    measured: Any = None
    error_bound: Optional[float] = None
    tolerance: Optional[float] = None
    verdict: Verdict = Verdict.INFO
    note: str = ""

    def __post_init__(self):
        """Normalize the verdict and require the data behind pass/fail."""
        if isinstance(self.verdict, str):
            self.verdict = Verdict(self.verdict.lower())
        if self.verdict in (Verdict.PASS, Verdict.FAIL):
            missing = [
                name for name in ("predicted", "measured", "tolerance")
                if getattr(self, name) is None
            ]
            if missing:
                raise ValueError(f"Row {self.case_id} has verdict {self.verdict.value} without {missing}")

    def to_dict(self) -> Dict[str, Any]:
        """Convert to a JSON-ready dictionary."""
        return jsonable({
            "case": self.case_id,
            "inputs": self.inputs,
            "predicted": self.predicted,
            "measured": self.measured,
            "error_bound": self.error_bound,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "note": self.note,
        })


@dataclass
class Report:
    """All rows of one experiment run."""
    experiment: str
    seed: int
    config: Dict[str, Any] = field(default_factory=dict)
    rows: List[ReportRow] = field(default_factory=list)
    wall_clock_s: float = 0.0

    def add(self, row: ReportRow) -> ReportRow:
        self.rows.append(row)
        return row

    def count(self, verdict: Verdict) -> int:
        return sum(1 for row in self.rows if row.verdict is verdict)

    @property
    def verdict(self) -> Verdict:
        """PASS only if no checked row failed."""
        return Verdict.FAIL if self.count(Verdict.FAIL) else Verdict.PASS

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def summary(self) -> Dict[str, Any]:
        """Summary fields shared by the JSONL trailer and the CSV index."""
        return {
            "experiment": self.experiment,
            "verdict": self.verdict.value,
            "rows": len(self.rows),
            "passed": self.count(Verdict.PASS),
            "failed": self.count(Verdict.FAIL),
            "informational": self.count(Verdict.INFO),
            "seed": self.seed,
        }

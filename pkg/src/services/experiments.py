"""Verification experiments.

Every experiment returns a Report. Checked rows carry the predicted value,
the measured value and the tolerance; statements that only hold for special
matrices (the printed weighted bounds, the large-delta asymptote of the
piecewise psi) are recorded as informational rows.
"""
import math
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.config import AppConfig, ExperimentConfig
from src.core.exceptions import ConfigError, GLSToolError, SingularMatrixError
from src.core.logging import get_logger
from src.core.mathcore import ball_volume
from src.domain.functions import TestFunction
from src.domain.models import (
    AnisotropicPsi,
    Ellipsoid,
    MixedExponent,
    Parallelepiped,
    Precedence,
    ProductSet,
    PsiFunction,
    Report,
    ReportRow,
    Verdict,
)
from src.services.dilation import DilationService
from src.services.fundamental import (
    FundamentalService,
    product_set_fundamental,
    theta_factor,
    theta_scaled,
    theta_unit,
)
from src.services.norm_service import NormService
from src.services.psi_registry import (
    PsiRegistry,
    psi_constant,
    psi_power,
    psi_product,
    psi_tilde,
)

logger = get_logger(__name__)

LP_EXPONENTS = (1.0, 1.5, 2.0, 4.0, 10.0)
WEIGHTED_EXPONENTS = (1.0, 2.0, 4.0)
SHARPNESS_SUPPORT = (1.1, 10.0)
GOLDEN_RATIO = 0.5 * (1.0 + math.sqrt(5.0))


# ----------------------------------------------------------------------
# Row helpers
# ----------------------------------------------------------------------
def relative_row(case_id: str, inputs: Dict[str, Any], predicted: float, measured: float,
                 tolerance: float, error_bound: float = 0.0, note: str = "") -> ReportRow:
    """PASS when |measured - predicted| <= tolerance * |predicted| + error_bound."""
    ok = abs(measured - predicted) <= tolerance * abs(predicted) + error_bound
    return ReportRow(case_id, inputs, predicted, measured, error_bound, tolerance,
                     Verdict.PASS if ok else Verdict.FAIL, note)


def bound_row(case_id: str, inputs: Dict[str, Any], bound: float, measured: float,
              tolerance: float, error_bound: float = 0.0, note: str = "") -> ReportRow:
    """PASS when measured <= bound * (1 + tolerance) + error_bound."""
    ok = measured <= bound * (1.0 + tolerance) + error_bound
    return ReportRow(case_id, inputs, bound, measured, error_bound, tolerance,
                     Verdict.PASS if ok else Verdict.FAIL, note)


def info_row(case_id: str, inputs: Dict[str, Any], predicted: Any, measured: Any,
             error_bound: Optional[float] = None, note: str = "") -> ReportRow:
    return ReportRow(case_id, inputs, predicted, measured, error_bound, None, Verdict.INFO, note)


def random_matrix(rng: np.random.Generator, d: int, min_det: float = 0.1,
                  max_condition: float = 100.0) -> np.ndarray:
    """Uniform [-2, 2] entries, redrawn until |det| >= min_det and cond <= max_condition."""
    while True:
        A = rng.uniform(-2.0, 2.0, size=(d, d))
        if abs(np.linalg.det(A)) >= min_det and np.linalg.cond(A) <= max_condition:
            return A


def lp_scaling_family(d: int) -> List[Tuple[str, TestFunction]]:
    return [
        ("gaussian", TestFunction.gaussian(np.linspace(0.5, 2.0, d), center=np.full(d, 0.3))),
        ("box", TestFunction.box(np.linspace(-0.5, 0.5, d), np.linspace(1.0, 2.0, d))),
        ("power_decay", TestFunction.power_decay(d, gamma=0.09 * d, radius=1.5)),
    ]


def weighted_family(d: int) -> List[Tuple[str, TestFunction]]:
    """Twelve functions: Gaussians and ellipsoids of varied anisotropy, power laws, boxes."""
    ramp = np.geomspace(0.2, 5.0, d) if d > 1 else np.ones(1)
    steep = np.array([25.0] + [0.04] * (d - 1)) if d > 1 else np.full(1, 25.0)
    thin = np.array([1.0] + [0.1] * (d - 1))
    far = np.array([10.0] + [-0.05] * (d - 1))
    return [
        ("gaussian_round", TestFunction.gaussian(np.ones(d))),
        ("gaussian_ramp", TestFunction.gaussian(ramp)),
        ("gaussian_ramp_reversed", TestFunction.gaussian(ramp[::-1])),
        ("gaussian_steep", TestFunction.gaussian(steep)),
        ("ball", TestFunction.unit_ball(d)),
        ("ellipsoid_long", TestFunction.ellipsoid(np.array([4.0] + [0.25] * (d - 1)))),
        ("ellipsoid_short", TestFunction.ellipsoid(np.array([0.25] + [4.0] * (d - 1)))),
        ("power_decay", TestFunction.power_decay(d, gamma=0.2)),
        ("power_decay_wide", TestFunction.power_decay(d, gamma=0.1, radius=3.0)),
        ("unit_cube", TestFunction.box(np.zeros(d), np.ones(d))),
        ("thin_box", TestFunction.box(-0.5 * thin, 4.0 * thin)),
        ("far_box", TestFunction.box(far, thin)),
    ]


class ExperimentRunner:
    """
    Runs the named verification experiments.

    Every run builds its own services, so experiments share no mutable
    state and can be executed concurrently.
    """

    def __init__(self, config: AppConfig, experiment_config: ExperimentConfig):
        """
        Initialize the runner.

        Args:
            config: Application configuration (numerical settings)
            experiment_config: Experiment selection, tolerances and sample counts
        """
        self.config = config
        self.cfg = experiment_config
        self._experiments: Dict[str, Callable[[int], Report]] = {
            "lp_scaling": self.run_lp_scaling,
            "mixed_factorable": self.run_mixed_factorable,
            "thm31_sharpness": self.run_thm31_sharpness,
            "theta_mc": self.run_theta_mc,
            "counterexample_projection": self.run_counterexample_projection,
            "weighted_bounds": self.run_weighted_bounds,
            "thm51": self.run_thm51,
            "compactness": self.run_compactness,
        }

    def run(self, name: str, seed: int) -> Report:
        """Run one experiment and stamp its wall-clock time."""
        if name not in self._experiments:
            raise ConfigError(f"Unknown experiment {name!r}")
        logger.info(f"Running {name} (seed={seed})")
        start = time.perf_counter()
        report = self._experiments[name](seed)
        report.wall_clock_s = time.perf_counter() - start
        summary = report.summary()
        logger.info(
            f"{name}: {summary['verdict']} ({summary['passed']} passed, {summary['failed']} failed, "
            f"{summary['informational']} informational) in {report.wall_clock_s:.1f}s"
        )
        return report

    def _report(self, name: str, seed: int) -> Report:
        return Report(experiment=name, seed=seed, config=self.cfg.echo())

    def _services(self, seed: int) -> Tuple[NormService, FundamentalService, DilationService]:
        norms = NormService(self.config, seed)
        fundamental = FundamentalService(self.config.supremum)
        return norms, fundamental, DilationService(self.config.dilation, fundamental)

    # ------------------------------------------------------------------
    # Exact L_p dilation law
    # ------------------------------------------------------------------
    def run_lp_scaling(self, seed: int) -> Report:
        """|V_A f|_p / |f|_p against |det A|^(-1/p) for random conditioned A."""
        report = self._report("lp_scaling", seed)
        norms, _, dilations = self._services(seed)
        rng = np.random.default_rng(seed)
        tol = self.cfg.tolerances["lp_scaling"]

        for d in self.cfg.dims:
            matrices = [("identity", np.eye(d)), ("scalar2", 2.0 * np.eye(d))]
            matrices += [(f"random{k}", random_matrix(rng, d)) for k in range(self.cfg.samples["matrices"])]
            family = lp_scaling_family(d)
            base = {(name, p): norms.lp_norm(f, p) for name, f in family for p in LP_EXPONENTS}
            for label, A in matrices:
                V = dilations.make_dilation(A)
                for name, f in family:
                    g = dilations.apply(V, f)
                    for p in LP_EXPONENTS:
                        before, after = base[(name, p)], norms.lp_norm(g, p)
                        measured = after.value / before.value
                        report.add(relative_row(
                            f"d{d}-{label}-{name}-p{p:g}",
                            {"d": d, "matrix": A, "det": V.det, "function": name, "p": p,
                             "method": after.method},
                            dilations.predicted_lp_ratio(V, p),
                            measured,
                            tol,
                            measured * (before.rel_error + after.rel_error),
                        ))
        return report

    # ------------------------------------------------------------------
    # Mixed norms under tensor dilations
    # ------------------------------------------------------------------
    def _factorable_family(self, blocks: Sequence[int]) -> List[Tuple[str, TestFunction]]:
        d = sum(blocks)
        parts = []
        for j, m in enumerate(blocks):
            if j % 2 == 0:
                parts.append(TestFunction.ellipsoid(np.linspace(0.5, 1.5, m)))
            else:
                S = np.eye(m) + 0.4 * (np.ones((m, m)) - np.eye(m))
                parts.append(TestFunction.gaussian_quadratic(S))
        return [
            ("gaussian", TestFunction.gaussian(np.linspace(0.5, 2.0, d), center=np.linspace(-1.0, 1.0, d))),
            ("box", TestFunction.box(np.linspace(-1.0, 0.5, d), np.linspace(0.5, 3.0, d))),
            ("product", TestFunction.product(*parts)),
        ]

    def run_mixed_factorable(self, seed: int) -> Report:
        """Factorable functions attain Lambda_p(A) exactly; non-factorable ones stay below it."""
        report = self._report("mixed_factorable", seed)
        norms, _, dilations = self._services(seed)
        rng = np.random.default_rng(seed)
        tol = self.cfg.tolerances["mixed"]

        structures: List[Tuple[Tuple[int, ...], Tuple[float, ...]]] = [
            ((1, 1), (1.0, 1.0)),
            ((1, 1), (2.0, 4.0)),
            ((1, 2), (1.5, 3.0)),
            ((2, 1), (3.0, 1.5)),
            ((1, 1, 1), (1.0, 2.0, 5.0)),
        ]
        structures += [((1, 1), tuple(rng.uniform(1.0, 5.0, 2))), ((2, 2), tuple(rng.uniform(1.0, 5.0, 2)))]

        for m, p in structures:
            pm = MixedExponent(p, m)
            tensors = [("identity", dilations.make_tensor([np.eye(mj) for mj in m]))]
            if m == (1, 1):
                tensors.append(("diag2-diag3", dilations.make_tensor([[[2.0]], [[3.0]]])))
            tensors.append(("random", dilations.make_tensor([random_matrix(rng, mj) for mj in m])))
            for name, f in self._factorable_family(m):
                before = norms.mixed_norm(f, pm)
                for label, T in tensors:
                    after = norms.mixed_norm(dilations.apply(T, f), pm)
                    measured = after.value / before.value
                    report.add(relative_row(
                        f"m{''.join(map(str, m))}-p{'-'.join(f'{v:g}' for v in p)}-{label}-{name}",
                        {"m": m, "p": p, "blocks": [b.matrix for b in T.blocks], "function": name,
                         "method": after.method},
                        dilations.lambda_tensor(T, pm),
                        measured,
                        tol,
                        measured * (before.rel_error + after.rel_error),
                    ))

        T = dilations.make_tensor([[[2.0]], [[3.0]]])
        controls = [
            ("triangle", TestFunction.triangle(1.0)),
            ("coupled_gaussian", TestFunction.gaussian_quadratic(np.array([[1.0, 0.6], [0.6, 1.0]]))),
        ]
        for p in ((1.0, 3.0), (3.0, 1.0)):
            pm = MixedExponent.per_coordinate(p)
            bound = dilations.lambda_tensor(T, pm)
            for name, f in controls:
                before = norms.mixed_norm(f, pm)
                after = norms.mixed_norm(dilations.apply(T, f), pm)
                measured = after.value / before.value
                report.add(bound_row(
                    f"control-{name}-p{p[0]:g}-{p[1]:g}",
                    {"p": p, "blocks": [[[2.0]], [[3.0]]], "function": name, "method": after.method},
                    bound, measured, tol,
                    measured * (before.rel_error + after.rel_error),
                    "non-factorable: must not exceed the tensor bound",
                ))

        # The triangle 0 <= x2 <= x1 <= 1: |f|_(1,3) = 4^(-1/3), |f|_(3,1) = 3/4.
        triangle = TestFunction.triangle(1.0)
        first = norms.mixed_norm(triangle, MixedExponent.per_coordinate((1.0, 3.0)))
        second = norms.mixed_norm(triangle, MixedExponent.per_coordinate((3.0, 1.0)))
        report.add(relative_row("asymmetry-triangle-p1-3", {"p": (1.0, 3.0)}, 4.0 ** (-1.0 / 3.0),
                                first.value, tol, first.abs_error))
        report.add(relative_row("asymmetry-triangle-p3-1", {"p": (3.0, 1.0)}, 0.75,
                                second.value, tol, second.abs_error))
        margin = first.abs_error + second.abs_error
        gap = abs(first.value - second.value)
        report.add(ReportRow(
            "asymmetry-triangle-order", {"p": [(1.0, 3.0), (3.0, 1.0)]}, margin, gap, margin, 0.0,
            Verdict.PASS if gap > margin else Verdict.FAIL,
            "exponent order matters: the gap must exceed the combined error bounds",
        ))
        return report

    # ------------------------------------------------------------------
    # GLS dilation bound and its equality case
    # ------------------------------------------------------------------
    def run_thm31_sharpness(self, seed: int) -> Report:
        """gls_norm(V_A f, psi zeta) against phi(G zeta, 1/|det A|) gls_norm(f, psi)."""
        report = self._report("thm31_sharpness", seed)
        norms, _, dilations = self._services(seed)
        tol = self.cfg.tolerances["sharpness"]
        lo, hi = SHARPNESS_SUPPORT
        zetas = [
            ("one", psi_constant(1.0, lo, hi)),
            ("p", psi_power(1.0, lo, hi)),
            ("sqrt_p", psi_power(2.0, lo, hi)),
        ]
        matrices = [
            ("shear", np.array([[1.0, 1.0], [0.0, 1.0]])),
            ("scalar4", 4.0 * np.eye(2)),
            ("scalar_quarter", 0.25 * np.eye(2)),
        ]
        others = [("p", psi_power(1.0, lo, hi)), ("one", psi_constant(1.0, lo, hi))]

        for delta in (1.0 / 16.0, 1.0, 16.0):
            f = TestFunction.box([0.0, 0.0], [delta, 1.0])
            natural = norms.sample_natural_psi(f, lo, hi, self.cfg.samples["psi_samples"])
            f_natural = norms.gls_norm(f, natural)
            for label, A in matrices:
                V = dilations.make_dilation(A)
                g = dilations.apply(V, f)
                for zname, zeta in zetas:
                    bound = dilations.gls_dilation_bound(V, zeta)
                    measured = norms.gls_norm(g, psi_product(natural, zeta))
                    report.add(relative_row(
                        f"delta{delta:g}-{label}-zeta_{zname}",
                        {"measure": delta, "matrix": A, "det": V.det, "zeta": zeta.label, "psi": "natural"},
                        bound * f_natural.value,
                        measured.value,
                        tol,
                        note="equality case psi = natural function of f",
                    ))
                    for pname, psi in others:
                        lhs = norms.gls_norm(g, psi_product(psi, zeta)).value
                        rhs = bound * norms.gls_norm(f, psi).value
                        holds = lhs <= rhs * (1.0 + tol)
                        report.add(info_row(
                            f"delta{delta:g}-{label}-zeta_{zname}-psi_{pname}",
                            {"measure": delta, "matrix": A, "zeta": zeta.label, "psi": psi.label},
                            rhs, lhs, note="inequality holds" if holds else "inequality violated",
                        ))
        return report

    # ------------------------------------------------------------------
    # Ellipsoid recurrence against Monte Carlo
    # ------------------------------------------------------------------
    def run_theta_mc(self, seed: int) -> Report:
        """Beta recurrence anchors, recurrence identity and Monte Carlo cross-checks."""
        report = self._report("theta_mc", seed)
        norms, _, _ = self._services(seed)
        rng = np.random.default_rng(seed)
        anchor_tol = self.cfg.tolerances["theta_anchor"]
        identity_tol = self.cfg.tolerances["identity"]
        n = self.cfg.samples["mc_samples"]

        for d in range(1, 7):
            report.add(relative_row(f"anchor-ones-d{d}", {"p": [1.0] * d}, ball_volume(d),
                                    theta_unit([1.0] * d), anchor_tol))
        report.add(relative_row("anchor-p2-2", {"p": [2.0, 2.0]}, math.sqrt(math.pi),
                                theta_unit([2.0, 2.0]), anchor_tol))

        for d in range(1, 6):
            p = rng.uniform(1.0, 10.0, d + 1)
            report.add(relative_row(
                f"recurrence-d{d + 1}", {"p": p},
                theta_factor(p), theta_unit(p) / theta_unit(p[:-1]), identity_tol,
            ))

        for d in (2, 3):
            if d not in self.cfg.dims:
                continue
            draws = [(np.ones(d), np.ones(d), 1.0, "ones")]
            if d == 2:
                draws.append((np.full(2, 2.0), np.ones(2), 1.0, "p2-2"))
            for k in range(self.cfg.samples["theta_draws"]):
                draws.append((rng.uniform(1.0, 5.0, d), rng.uniform(0.5, 2.0, d),
                               float(rng.uniform(0.5, 2.0)), f"draw{k}"))
            for p, a, R, label in draws:
                pm = MixedExponent.per_coordinate(p)
                estimate = norms.mc_region_norm(Ellipsoid(a, R), pm, n, int(rng.integers(2 ** 32)))
                report.add(relative_row(
                    f"mc-d{d}-{label}", {"p": p, "a": a, "R": R, "samples": n},
                    theta_scaled(p, a, R), estimate.value, 0.0, estimate.abs_error,
                    note="agreement within the Monte Carlo error bound",
                ))

            p, a = np.linspace(1.5, 3.0, d), np.linspace(0.8, 1.6, d)
            pm = MixedExponent.per_coordinate(p)
            centered = norms.mc_region_norm(Ellipsoid(a), pm, n, int(rng.integers(2 ** 32)))
            center = np.array([5.0, -3.0, 2.0][:d])
            shifted = norms.mc_region_norm(Ellipsoid(a, 1.0, center), pm, n, int(rng.integers(2 ** 32)))
            report.add(relative_row(
                f"center-shift-d{d}", {"p": p, "a": a, "center": center, "samples": n},
                centered.value, shifted.value, 0.0, centered.abs_error + shifted.abs_error,
                note="shifted and centered ellipsoids agree",
            ))

        D = ProductSet((Parallelepiped((0.0,), (2.0,)), Ellipsoid((1.0, 0.5))))
        pvec = (1.5, 3.0)
        estimate = norms.mc_region_norm(D, MixedExponent(pvec, D.dims), n, int(rng.integers(2 ** 32)))
        report.add(relative_row(
            "product-set-box-ellipse", {"p": pvec, "blocks": ["box side 2", "ellipse axes (1, 0.5)"]},
            product_set_fundamental(D, pvec), estimate.value, 0.0, estimate.abs_error,
        ))
        return report

    # ------------------------------------------------------------------
    # Degenerate matrix
    # ------------------------------------------------------------------
    def run_counterexample_projection(self, seed: int) -> Report:
        """A coordinate projection is rejected, and the projected function is not in L_p."""
        report = self._report("counterexample_projection", seed)
        norms, _, dilations = self._services(seed)
        tol = self.cfg.tolerances["counterexample"]
        p, gamma = 2.0, 0.25
        projection = np.array([[1.0, 0.0], [0.0, 0.0]])

        try:
            dilations.make_dilation(projection)
            outcome = "accepted"
        except SingularMatrixError:
            outcome = "SingularMatrixError"
        report.add(ReportRow(
            "projection-rejected", {"matrix": projection}, "SingularMatrixError", outcome, None, 0.0,
            Verdict.PASS if outcome == "SingularMatrixError" else Verdict.FAIL,
        ))

        g = TestFunction.power_decay(1, gamma)
        f = TestFunction.product(g, g)
        measured = norms.lp_norm(f, p)
        report.add(relative_row(
            "f-in-Lp", {"p": p, "gamma": gamma},
            (2.0 / (1.0 - gamma * p)) ** (2.0 / p), measured.value, tol, measured.abs_error,
            note="f(x, y) = g(x) g(y) with g(y) = |y|^-gamma on [-1, 1]",
        ))
        for y0 in (1e-2, 1e-4, 1e-6):
            report.add(info_row(
                f"g-near-zero-{y0:g}", {"y": y0}, "unbounded as y -> 0", y0 ** (-gamma),
                note="f(x, 0) = g(x) g(0) is infinite; windows below use g(y0) at y0 = 1e-6",
            ))

        y0 = 1e-6
        windows = (1.0, 10.0, 100.0, 1000.0)
        truncated = []
        for T in windows:
            window = TestFunction.product(g.scaled(y0 ** (-gamma)), TestFunction.box([-T], [2.0 * T]))
            truncated.append(norms.lp_norm(window, p))
            report.add(info_row(f"window-T{T:g}", {"T": T, "p": p}, None, truncated[-1].value,
                                truncated[-1].abs_error))
        for (T1, n1), (T2, n2) in zip(zip(windows, truncated), zip(windows[1:], truncated[1:])):
            growth = n2.value / n1.value
            expected = (T2 / T1) ** (1.0 / p)
            report.add(ReportRow(
                f"growth-T{T1:g}-T{T2:g}", {"T": (T1, T2), "p": p}, expected, growth,
                growth * (n1.rel_error + n2.rel_error), tol,
                Verdict.PASS if growth >= expected * (1.0 - tol) else Verdict.FAIL,
                "truncated norm grows at least like T^(1/p)",
            ))
        return report

    # ------------------------------------------------------------------
    # Weighted spaces
    # ------------------------------------------------------------------
    def run_weighted_bounds(self, seed: int) -> Report:
        """Scalar matrices are exact; general matrices are dominated by the change-of-variables bound."""
        report = self._report("weighted_bounds", seed)
        norms, _, dilations = self._services(seed)
        rng = np.random.default_rng(seed)
        tol = self.cfg.tolerances["weighted"]

        for d in self.cfg.dims:
            scalar_family = [
                ("gaussian", TestFunction.gaussian(np.array([1.0, 0.5, 2.0][:d] if d <= 3 else np.ones(d)))),
                ("ball", TestFunction.unit_ball(d)),
            ]
            for lam in (0.5, 2.0, 3.0):
                V = dilations.make_dilation(lam * np.eye(d))
                for alpha in (0.5, 1.0, 2.0):
                    for p in WEIGHTED_EXPONENTS:
                        bound = dilations.predicted_weighted_bound(V, p, alpha)
                        for name, f in scalar_family:
                            before = norms.weighted_norm(f, p, alpha)
                            after = norms.weighted_norm(dilations.apply(V, f), p, alpha)
                            measured = after.value / before.value
                            case = f"scalar-d{d}-lambda{lam:g}-alpha{alpha:g}-p{p:g}-{name}"
                            inputs = {"d": d, "lambda": lam, "alpha": alpha, "p": p, "function": name}
                            report.add(relative_row(case, inputs, bound.derivation, measured, tol,
                                                    measured * (before.rel_error + after.rel_error)))
                            report.add(info_row(f"{case}-printed-scalar", inputs, bound.scalar_exponent, measured,
                                                note="printed value for lambda I"))

        matrices: List[Tuple[str, np.ndarray]] = []
        if 2 in self.cfg.dims:
            matrices.append(("diag2-8", np.diag([2.0, 8.0])))
        if 3 in self.cfg.dims:
            matrices.append(("diag0.5-3-1.5", np.diag([0.5, 3.0, 1.5])))
        for d in self.cfg.dims:
            if d >= 2:
                matrices += [(f"random-d{d}-{k}", random_matrix(rng, d))
                             for k in range(self.cfg.samples["weighted_matrices"])]

        base_cache: Dict[Tuple[int, str, float, float], Any] = {}
        for label, A in matrices:
            d = A.shape[0]
            V = dilations.make_dilation(A)
            family = weighted_family(d)
            for alpha in (1.0, 2.0):
                for p in WEIGHTED_EXPONENTS:
                    bound = dilations.predicted_weighted_bound(V, p, alpha)
                    best, best_name, best_error = -math.inf, "", 0.0
                    for name, f in family:
                        key = (d, name, p, alpha)
                        if key not in base_cache:
                            base_cache[key] = norms.weighted_norm(f, p, alpha)
                        before = base_cache[key]
                        after = norms.weighted_norm(dilations.apply(V, f), p, alpha)
                        ratio = after.value / before.value
                        if ratio > best:
                            best, best_name = ratio, name
                            best_error = ratio * (before.rel_error + after.rel_error)
                    case = f"{label}-alpha{alpha:g}-p{p:g}"
                    inputs = {"matrix": A, "alpha": alpha, "p": p, "argmax_function": best_name,
                              "family_size": len(family)}
                    report.add(bound_row(case, inputs, bound.derivation, best, tol, best_error,
                                         note="empirical sup over the function family"))
                    for variant, value in (("printed", bound.printed), ("printed-diagonal", bound.printed_diagonal)):
                        report.add(info_row(
                            f"{case}-{variant}", inputs, value, best, best_error,
                            "empirical sup exceeds this value" if best > value * (1.0 + tol) + best_error
                            else "empirical sup within this value",
                        ))
        return report

    # ------------------------------------------------------------------
    # AGLS dilation bound
    # ------------------------------------------------------------------
    def run_thm51(self, seed: int) -> Report:
        """Tensor dilations on anisotropic GLS: equality for diagonal blocks and factorable data."""
        report = self._report("thm51", seed)
        norms, fundamental, dilations = self._services(seed)
        rng = np.random.default_rng(seed)
        tol = self.cfg.tolerances["sharpness"]
        identity_tol = self.cfg.tolerances["identity"]
        lo, hi = SHARPNESS_SUPPORT
        count = self.cfg.samples["psi_samples"]

        def natural_factorable(factors: Sequence[TestFunction]) -> AnisotropicPsi:
            return AnisotropicPsi.factorable(*(norms.sample_natural_psi(g, lo, hi, count) for g in factors))

        def combined(psi: AnisotropicPsi, zeta: AnisotropicPsi) -> AnisotropicPsi:
            return AnisotropicPsi.factorable(*(psi_product(a, b) for a, b in zip(psi.factors, zeta.factors)))

        zetas = [
            ("one", AnisotropicPsi.factorable(psi_constant(1.0, lo, hi), psi_constant(1.0, lo, hi))),
            ("p-sqrt_p", AnisotropicPsi.factorable(psi_power(1.0, lo, hi), psi_power(2.0, lo, hi))),
        ]
        tensors = [
            ("identity", [[[1.0]], [[1.0]]]),
            ("diag4-diag4", [[[4.0]], [[4.0]]]),
            ("diag4-diagquarter", [[[4.0]], [[0.25]]]),
        ]
        for sides in ((1.0, 1.0), (1.0 / 16.0, 16.0), (16.0, 0.25)):
            factors = [TestFunction.box([0.0], [sides[0]]), TestFunction.box([0.0], [sides[1]])]
            f = TestFunction.product(*factors)
            psi = natural_factorable(factors)
            f_norm = norms.agls_norm(f, psi)
            for tlabel, blocks in tensors:
                T = dilations.make_tensor(blocks)
                g = dilations.apply(T, f)
                for zname, zeta in zetas:
                    bound = dilations.agls_dilation_bound(T, zeta)
                    measured = norms.agls_norm(g, combined(psi, zeta))
                    report.add(relative_row(
                        f"sides{sides[0]:g}-{sides[1]:g}-{tlabel}-zeta_{zname}",
                        {"sides": sides, "blocks": blocks, "zeta": zeta.label},
                        bound * f_norm.value, measured.value, tol,
                        note="diagonal blocks, factorable f and natural psi",
                    ))

        factors = [TestFunction.box([0.0, 0.0], [2.0, 0.5]), TestFunction.box([0.0], [4.0])]
        f = TestFunction.product(*factors)
        psi = natural_factorable(factors)
        zeta = zetas[1][1]
        T = dilations.make_tensor([random_matrix(rng, 2), [[0.5]]])
        lhs = norms.agls_norm(dilations.apply(T, f), combined(psi, zeta), blocks=(2, 1)).value
        rhs = dilations.agls_dilation_bound(T, zeta) * norms.agls_norm(f, psi, blocks=(2, 1)).value
        report.add(info_row("non-diagonal-block", {"blocks": [b.matrix for b in T.blocks], "m": (2, 1)},
                            rhs, lhs, note="inequality holds" if lhs <= rhs * (1.0 + tol) else "inequality violated"))

        for dims in ((1, 2), (2, 1), (1, 1, 1)):
            T = dilations.make_tensor([random_matrix(rng, m) for m in dims])
            p = tuple(rng.uniform(1.0, 5.0, len(dims)))
            report.add(relative_row(
                f"k-cube-identity-m{''.join(map(str, dims))}", {"m": dims, "p": p},
                dilations.lambda_tensor(T, MixedExponent(p, dims)),
                product_set_fundamental(dilations.k_cube(T), p), identity_tol,
                note="fundamental value of the K-cube equals Lambda",
            ))

        zeta_one = psi_power(1.0, lo, hi)
        V = dilations.make_dilation(0.25 * np.eye(2))
        T = dilations.make_tensor([V])
        report.add(relative_row(
            "single-block-reduction", {"matrix": V.matrix, "zeta": zeta_one.label},
            dilations.gls_dilation_bound(V, zeta_one),
            dilations.agls_dilation_bound(T, AnisotropicPsi.factorable(zeta_one)), identity_tol,
        ))

        generic = AnisotropicPsi(((lo, hi), (lo, hi)), lambda pv: pv[0] * math.sqrt(pv[1]), "p1*sqrt(p2)")
        K = dilations.k_cube(dilations.make_tensor([[[4.0]], [[0.25]]]))
        report.add(relative_row(
            "grid-vs-factorable", {"zeta": generic.label, "K": "sides (1/4, 4)"},
            fundamental.fundamental_agls(zetas[1][1], K),
            fundamental.fundamental_agls(generic, K), tol,
            note="tensor grid search against the factorized supremum",
        ))
        return report

    # ------------------------------------------------------------------
    # Compactness order and the piecewise psi
    # ------------------------------------------------------------------
    def run_compactness(self, seed: int) -> Report:
        """Verdicts of psi1 << psi2 and the machinery of the piecewise psi-tilde."""
        report = self._report("compactness", seed)
        _, fundamental, _ = self._services(seed)
        registry = PsiRegistry(self.config.precedence)
        root_tol = self.cfg.tolerances["root"]
        continuity_tol = self.cfg.tolerances["continuity"]
        tol = self.cfg.tolerances["sharpness"]
        probe = registry.power_probe()

        def verdict(psi1: PsiFunction, psi2: PsiFunction, points: Sequence[float]) -> str:
            try:
                return registry.precedes(psi1, psi2, points).value
            except GLSToolError as e:
                return f"error: {e}"

        wobble = PsiFunction(1.0, math.inf, lambda p: p * (1.0 + math.sin(p) ** 2), "p(1+sin^2 p)")
        checked = [
            ("sqrt_p-vs-p", psi_power(2.0), psi_power(1.0), Precedence.TRUE),
            ("p-vs-p", psi_power(1.0), psi_power(1.0), Precedence.FALSE),
            ("wobble-vs-p", wobble, psi_power(1.0), Precedence.FALSE),
            ("p-vs-sqrt_p", psi_power(1.0), psi_power(2.0), Precedence.FALSE),
        ]
        for case, psi1, psi2, expected in checked:
            measured = verdict(psi1, psi2, probe)
            compact = measured == Precedence.TRUE.value
            report.add(ReportRow(
                case, {"psi1": psi1.label, "psi2": psi2.label, "probe": "2^k, k=1..40"},
                expected.value, measured, None, 0.0,
                Verdict.PASS if measured == expected.value else Verdict.FAIL,
                "V_A: G psi -> G theta compact" if compact else "compactness criterion not met",
            ))

        nu = psi_power(1.0)
        report.add(info_row("identity-dilation", {"theta": nu.label, "nu": nu.label},
                            "no compactness", verdict(nu, nu, probe),
                            note="theta = nu has no strict order, the criterion gives no compactness"))

        for a, alpha, beta, power in ((1.0, 1.0, 2.0, 2.0), (1.0, 1.0, 1.0, 2.0), (2.0, 0.5, 2.0, 3.0)):
            tilde = psi_tilde(a, alpha, beta).as_psi()
            points = [p for p in registry.power_probe(41) if p > a][:40]
            report.add(info_row(
                f"tilde-a{a:g}-alpha{alpha:g}-beta{beta:g}-vs-p^{power:g}",
                {"a": a, "alpha": alpha, "beta": beta, "psi2": f"p^{power:g}"},
                None, verdict(tilde, psi_power(1.0 / power), points),
            ))

        tilde = psi_tilde(1.0, 1.0, 1.0)
        report.add(relative_row("tilde-crossover", {"a": 1.0, "alpha": 1.0, "beta": 1.0},
                                GOLDEN_RATIO, tilde.h, root_tol))
        t2 = psi_tilde(2.0, 0.5, 2.0)
        report.add(relative_row("tilde-crossover-residual", {"a": 2.0, "alpha": 0.5, "beta": 2.0},
                                t2.h ** 2.0, (t2.h - 2.0) ** -0.5, continuity_tol))
        gaps = [abs(tilde(tilde.h - eps) - tilde(tilde.h + eps)) for eps in (1e-4, 1e-6, 1e-8)]
        shrinking = all(b < a for a, b in zip(gaps, gaps[1:]))
        report.add(ReportRow(
            "tilde-continuity", {"eps": (1e-4, 1e-6, 1e-8)}, "decreasing", gaps, None, 0.0,
            Verdict.PASS if shrinking else Verdict.FAIL, "gap |psi(h - eps) - psi(h + eps)|",
        ))

        psi = tilde.as_psi()
        report.add(relative_row("tilde-phi-at-one", {"delta": 1.0}, 1.0 / tilde.h ** tilde.beta,
                                fundamental.fundamental_gls(psi, 1.0), tol,
                                note="phi(1) = 1 / min psi"))

        rows = fundamental.tilde_phi_asymptotic_check(tilde)
        for row in rows:
            for name, ratio in row.ratios().items():
                report.add(info_row(f"tilde-{row.regime}-delta{row.delta:g}-{name}",
                                    {"delta": row.delta, "candidate": name},
                                    row.candidates[name], row.phi, note=f"ratio {ratio:.12g}"))
        small = [row for row in rows if row.regime == "small"]
        for row in small:
            report.add(relative_row(f"tilde-small-delta{row.delta:g}-laplace", {"delta": row.delta},
                                    row.candidates["laplace"], row.phi, tol,
                                    note="(beta/e)^beta |ln delta|^-beta"))
        ratios = [row.ratios()["beta_beta"] for row in small]
        monotone = all(b >= a * (1.0 - 1e-9) for a, b in zip(ratios, ratios[1:])) or \
            all(b <= a * (1.0 + 1e-9) for a, b in zip(ratios, ratios[1:]))
        report.add(ReportRow(
            "tilde-small-delta-trend", {"delta": [row.delta for row in small]}, "monotone", ratios, None, 0.0,
            Verdict.PASS if monotone else Verdict.FAIL,
            "ratio to beta^beta |ln delta|^-beta",
        ))

        deltas = [1e-12, 1e-8, 1e-4, 1.0, 1e4, 1e8, 1e12]
        values = [fundamental.fundamental_gls(psi, delta) for delta in deltas]
        nondecreasing = all(b >= a * (1.0 - 1e-12) for a, b in zip(values, values[1:]))
        report.add(ReportRow(
            "tilde-phi-monotone", {"delta": deltas}, "nondecreasing", values, None, 0.0,
            Verdict.PASS if nondecreasing else Verdict.FAIL,
        ))
        return report

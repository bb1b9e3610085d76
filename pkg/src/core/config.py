"""Configuration management for glstool.

Numerical defaults (grid sizes, tolerances, sample counts) come from
environment variables and an optional .env file. Experiment runs are further
described by a JSON ``ExperimentConfig`` file.
"""
import json
import math
import os
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Dict, List, Optional

from dotenv import load_dotenv

from src.core.exceptions import ConfigError

# Load environment variables from .env file
load_dotenv()


EXPERIMENT_NAMES = (
    "lp_scaling",
    "mixed_factorable",
    "thm31_sharpness",
    "theta_mc",
    "counterexample_projection",
    "weighted_bounds",
    "thm51",
    "compactness",
)

DEFAULT_TOLERANCES: Dict[str, float] = {
    "lp_scaling": 1e-6,
    "mixed": 1e-6,
    "sharpness": 1e-3,
    "theta_anchor": 1e-9,
    "identity": 1e-12,
    "weighted": 1e-6,
    "counterexample": 1e-6,
    "root": 1e-12,
    "continuity": 1e-8,
}

DEFAULT_SAMPLES: Dict[str, int] = {
    "matrices": 20,
    "mc_samples": 1_000_000,
    "theta_draws": 10,
    "weighted_matrices": 4,
    "psi_samples": 48,
}


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() in ("1", "true", "yes")


@dataclass
class SupremumConfig:
    """Grid and refinement settings for suprema over exponent intervals."""

    grid_points: int = 512
    golden_tol: float = 1e-10
    boundary_steps: int = 7
    max_doublings: int = 2
    agls_grid_points: int = 64
    agls_max_blocks: int = 3

    @classmethod
    def from_env(cls) -> "SupremumConfig":
        """Create configuration from environment variables."""
        return cls(
            grid_points=int(os.getenv("GLS_SUP_GRID_POINTS", "512")),
            golden_tol=float(os.getenv("GLS_SUP_GOLDEN_TOL", "1e-10")),
            boundary_steps=int(os.getenv("GLS_SUP_BOUNDARY_STEPS", "7")),
            max_doublings=int(os.getenv("GLS_SUP_MAX_DOUBLINGS", "2")),
            agls_grid_points=int(os.getenv("GLS_AGLS_GRID_POINTS", "64")),
            agls_max_blocks=int(os.getenv("GLS_AGLS_MAX_BLOCKS", "3")),
        )


@dataclass
class QuadratureConfig:
    """Deterministic quadrature settings."""

    rel_tol: float = 1e-8
    min_nodes: int = 16
    max_total_nodes: int = 2_097_152
    quad_limit: int = 200
    tail_tol: float = 1e-12
    weight_norm: str = "euclidean"

    @classmethod
    def from_env(cls) -> "QuadratureConfig":
        """Create configuration from environment variables."""
        return cls(
            rel_tol=float(os.getenv("GLS_QUAD_REL_TOL", "1e-8")),
            min_nodes=int(os.getenv("GLS_QUAD_MIN_NODES", "16")),
            max_total_nodes=int(os.getenv("GLS_QUAD_MAX_TOTAL_NODES", "2097152")),
            quad_limit=int(os.getenv("GLS_QUAD_LIMIT", "200")),
            tail_tol=float(os.getenv("GLS_TAIL_TOL", "1e-12")),
            weight_norm=os.getenv("GLS_WEIGHT_NORM", "euclidean").lower(),
        )


@dataclass
class MonteCarloConfig:
    """Monte Carlo sampling settings."""

    samples: int = 1_000_000
    min_samples: int = 10_000
    strata: int = 64
    sigma: float = 3.0

    @classmethod
    def from_env(cls) -> "MonteCarloConfig":
        """Create configuration from environment variables."""
        return cls(
            samples=int(os.getenv("GLS_MC_SAMPLES", "1000000")),
            min_samples=int(os.getenv("GLS_MC_MIN_SAMPLES", "10000")),
            strata=int(os.getenv("GLS_MC_STRATA", "64")),
            sigma=float(os.getenv("GLS_MC_SIGMA", "3.0")),
        )


@dataclass
class PrecedenceConfig:
    """Thresholds of the numerical psi1 << psi2 verdict."""

    threshold: float = 1e-6
    window: int = 8
    stable_fraction: float = 0.5
    growth_factor: float = 10.0

    @classmethod
    def from_env(cls) -> "PrecedenceConfig":
        """Create configuration from environment variables."""
        return cls(
            threshold=float(os.getenv("GLS_PRECEDES_THRESHOLD", "1e-6")),
            window=int(os.getenv("GLS_PRECEDES_WINDOW", "8")),
            stable_fraction=float(os.getenv("GLS_PRECEDES_STABLE_FRACTION", "0.5")),
            growth_factor=float(os.getenv("GLS_PRECEDES_GROWTH", "10.0")),
        )


@dataclass
class DilationConfig:
    """Linear-algebra settings for dilation matrices."""

    power_tol: float = 1e-12
    power_max_iter: int = 10_000
    singular_rtol: float = 1e-12

    @classmethod
    def from_env(cls) -> "DilationConfig":
        """Create configuration from environment variables."""
        return cls(
            power_tol=float(os.getenv("GLS_POWER_TOL", "1e-12")),
            power_max_iter=int(os.getenv("GLS_POWER_MAX_ITER", "10000")),
            singular_rtol=float(os.getenv("GLS_SINGULAR_RTOL", "1e-12")),
        )


@dataclass
class HarnessConfig:
    """Defaults for experiment runs."""

    output_dir: str = "reports"
    seed: int = 20240917
    parallel: bool = False

    @classmethod
    def from_env(cls) -> "HarnessConfig":
        """Create configuration from environment variables."""
        return cls(
            output_dir=os.getenv("GLS_OUTPUT_DIR", "reports"),
            seed=int(os.getenv("GLS_SEED", "20240917")),
            parallel=_env_bool("GLS_PARALLEL", "false"),
        )


@dataclass
class LoggingConfig:
    """Logging configuration."""

    log_file: str = "logs/glstool.log"
    log_level: str = "INFO"
    log_max_bytes: int = 5 * 1024 * 1024  # 5MB
    log_backup_count: int = 3

    @classmethod
    def from_env(cls) -> "LoggingConfig":
        """Create configuration from environment variables."""
        return cls(
            log_file=os.getenv("LOG_FILE", "logs/glstool.log"),
            log_level=os.getenv("LOG_LEVEL", "INFO"),
            log_max_bytes=int(os.getenv("LOG_MAX_BYTES", str(5 * 1024 * 1024))),
            log_backup_count=int(os.getenv("LOG_BACKUP_COUNT", "3"))
        )


@dataclass
class AppConfig:
    """Main application configuration container."""

    supremum: SupremumConfig = field(default_factory=SupremumConfig)
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    monte_carlo: MonteCarloConfig = field(default_factory=MonteCarloConfig)
    precedence: PrecedenceConfig = field(default_factory=PrecedenceConfig)
    dilation: DilationConfig = field(default_factory=DilationConfig)
    harness: HarnessConfig = field(default_factory=HarnessConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    @classmethod
    def from_env(cls) -> "AppConfig":
        """Create full application configuration from environment."""
        return cls(
            supremum=SupremumConfig.from_env(),
            quadrature=QuadratureConfig.from_env(),
            monte_carlo=MonteCarloConfig.from_env(),
            precedence=PrecedenceConfig.from_env(),
            dilation=DilationConfig.from_env(),
            harness=HarnessConfig.from_env(),
            logging=LoggingConfig.from_env(),
        )

    def validate(self) -> None:
        """Validate configuration consistency."""
        if self.supremum.grid_points < 8:
            raise ConfigError(f"GLS_SUP_GRID_POINTS must be >= 8, got {self.supremum.grid_points}")
        if self.supremum.agls_grid_points < 4:
            raise ConfigError(
                f"GLS_AGLS_GRID_POINTS must be >= 4, got {self.supremum.agls_grid_points}"
            )
        if not 0 < self.supremum.golden_tol < 1:
            raise ConfigError(f"GLS_SUP_GOLDEN_TOL must lie in (0, 1), got {self.supremum.golden_tol}")
        if self.quadrature.weight_norm not in ("euclidean", "max"):
            raise ConfigError(
                f"Invalid GLS_WEIGHT_NORM: {self.quadrature.weight_norm}. Must be 'euclidean' or 'max'"
            )
        if self.quadrature.min_nodes < 2:
            raise ConfigError("GLS_QUAD_MIN_NODES must be >= 2")
        if self.monte_carlo.min_samples < 1 or self.monte_carlo.samples < self.monte_carlo.min_samples:
            raise ConfigError("GLS_MC_SAMPLES must be at least GLS_MC_MIN_SAMPLES")
        if self.monte_carlo.sigma <= 0:
            raise ConfigError("GLS_MC_SIGMA must be positive")
        if self.precedence.window < 2:
            raise ConfigError("GLS_PRECEDES_WINDOW must be >= 2")
        if self.dilation.power_max_iter < 1:
            raise ConfigError("GLS_POWER_MAX_ITER must be >= 1")


@dataclass
class ExperimentConfig:
    """One harness invocation, usually loaded from a JSON file.

    ``experiment`` is either a single name from ``EXPERIMENT_NAMES`` or ``"all"``.
    """

    experiment: str = "all"
    seed: int = 20240917
    dims: List[int] = field(default_factory=lambda: [1, 2, 3])
    tolerances: Dict[str, float] = field(default_factory=dict)
    samples: Dict[str, int] = field(default_factory=dict)
    output_dir: str = "reports"
    parallel: bool = False

    def __post_init__(self):
        """Validate names and merge defaults."""
        if self.experiment != "all" and self.experiment not in EXPERIMENT_NAMES:
            raise ConfigError(
                f"Unknown experiment {self.experiment!r}; expected 'all' or one of {', '.join(EXPERIMENT_NAMES)}"
            )
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"Unknown tolerance keys: {sorted(unknown)}")
        unknown = set(self.samples) - set(DEFAULT_SAMPLES)
        if unknown:
            raise ConfigError(f"Unknown sample keys: {sorted(unknown)}")
        if not self.dims or any(int(d) != d or d < 1 for d in self.dims):
            raise ConfigError(f"dims must be a non-empty list of positive integers, got {self.dims}")
        self.dims = [int(d) for d in self.dims]
        self.tolerances = {**DEFAULT_TOLERANCES, **{k: float(v) for k, v in self.tolerances.items()}}
        self.samples = {**DEFAULT_SAMPLES, **{k: int(v) for k, v in self.samples.items()}}
        for key, value in self.tolerances.items():
            if not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"Tolerance {key} must be positive, got {value}")
        for key, value in self.samples.items():
            if value < 1:
                raise ConfigError(f"Sample count {key} must be positive, got {value}")

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        """Load an experiment file; unknown keys are rejected."""
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"Cannot read experiment config {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"Experiment config {path} is not valid JSON: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"Experiment config {path} must hold a JSON object")
        allowed = set(cls.__dataclass_fields__)
        unknown = set(raw) - allowed
        if unknown:
            raise ConfigError(f"Unknown keys in {path}: {sorted(unknown)}")
        return cls(**raw)

    @classmethod
    def from_harness(cls, harness: HarnessConfig) -> "ExperimentConfig":
        """Defaults taken from the environment-level harness settings."""
        return cls(seed=harness.seed, output_dir=harness.output_dir, parallel=harness.parallel)

    def with_overrides(
        self,
        experiment: Optional[str] = None,
        seed: Optional[int] = None,
        output_dir: Optional[str] = None,
        parallel: Optional[bool] = None,
    ) -> "ExperimentConfig":
        """Return a copy with command-line overrides applied."""
        data = asdict(self)
        if experiment is not None:
            data["experiment"] = experiment
        if seed is not None:
            data["seed"] = seed
        if output_dir is not None:
            data["output_dir"] = output_dir
        if parallel is not None:
            data["parallel"] = parallel
        return ExperimentConfig(**data)

    def selected_experiments(self) -> List[str]:
        """Experiment names to run, in the fixed schedule order."""
        if self.experiment == "all":
            return list(EXPERIMENT_NAMES)
        return [self.experiment]

    def echo(self) -> Dict[str, object]:
        """Config fields that affect numerical content (no output path)."""
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "dims": list(self.dims),
            "tolerances": dict(sorted(self.tolerances.items())),
            "samples": dict(sorted(self.samples.items())),
        }


# Global configuration instance
_config: Optional[AppConfig] = None


def get_config() -> AppConfig:
    """Get global configuration instance (singleton pattern)."""
    global _config
    if _config is None:
        _config = AppConfig.from_env()
        _config.validate()
    return _config


def reload_config() -> AppConfig:
    """Reload configuration from environment."""
    global _config
    load_dotenv(override=True)
    _config = AppConfig.from_env()
    _config.validate()
    return _config

#!/usr/bin/env python3
"""
Main entry point for glstool.

    glstool run --experiment all --config config/experiments.json --seed 7 --out reports
    glstool fundamental --kind gls --psi power:lambda=2 --delta 4
    glstool norm --function box:sides=4;9 --space mixed --p 2 3
"""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent))

from src.core.config import EXPERIMENT_NAMES, ExperimentConfig, get_config
from src.core.exceptions import ConfigError, DomainError, GLSToolError, ReportWriteError
from src.core.logging import get_logger, setup_logging
from src.domain.functions import TestFunction
from src.domain.models import AnisotropicPsi, MixedExponent, Parallelepiped, ProductSet
from src.harness import run_all
from src.services.fundamental import (
    FundamentalService,
    fundamental_box,
    fundamental_lp,
    theta_scaled,
)
from src.services.norm_service import NormService
from src.services.psi_registry import PsiRegistry, psi_tilde

EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

logger = get_logger("glstool")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glstool", description="Grand Lebesgue Space norms and dilation bounds")
    parser.add_argument("-v", "--verbose", action="store_true", help="Show debug output on the console")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run verification experiments and write reports")
    run.add_argument("--experiment", default=None, choices=["all", *EXPERIMENT_NAMES])
    run.add_argument("--config", default=None, help="JSON experiment config")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", default=None, help="Output directory for reports")
    run.add_argument("--parallel", action="store_true", default=None, help="Run experiments concurrently")

    fundamental = sub.add_parser("fundamental", help="Evaluate a fundamental function")
    fundamental.add_argument("--kind", required=True, choices=["lp", "gls", "theta", "box", "agls", "tilde"])
    fundamental.add_argument("--delta", type=float, help="Measure of the set (lp, gls)")
    fundamental.add_argument("--p", type=float, nargs="+", help="Exponent(s)")
    fundamental.add_argument("--psi", nargs="+", help="Psi descriptor(s), one per block for agls")
    fundamental.add_argument("--a", type=float, nargs="+", help="Semi-axes (theta) or support start (tilde)")
    fundamental.add_argument("--R", type=float, default=1.0, help="Ellipsoid radius (theta)")
    fundamental.add_argument("--sides", type=float, nargs="+", help="Box sides (box, agls)")
    fundamental.add_argument("--alpha", type=float, default=1.0, help="Left exponent (tilde)")
    fundamental.add_argument("--beta", type=float, default=1.0, help="Right exponent (tilde)")

    norm = sub.add_parser("norm", help="Evaluate a norm of a test function")
    norm.add_argument("--function", required=True, help="Function descriptor, e.g. gaussian:scales=1;2")
    norm.add_argument("--space", required=True, choices=["lp", "weighted", "mixed", "gls"])
    norm.add_argument("--p", type=float, nargs="+", help="Exponent(s); one per block for mixed")
    norm.add_argument("--m", type=int, nargs="+", help="Block dimensions for mixed (default: one per coordinate)")
    norm.add_argument("--alpha", type=float, default=0.0, help="Weight exponent (weighted)")
    norm.add_argument("--weight-norm", default=None, choices=["euclidean", "max"])
    norm.add_argument("--psi", help="Psi descriptor (gls)")
    norm.add_argument("--seed", type=int, default=0, help="Seed for Monte Carlo paths")
    return parser


def _require(value, name: str):
    if value is None:
        raise DomainError(f"--{name} is required for this command")
    return value


def cmd_run(args: argparse.Namespace) -> int:
    config = get_config()
    if args.config:
        experiment_config = ExperimentConfig.from_file(args.config)
    else:
        experiment_config = ExperimentConfig.from_harness(config.harness)
    experiment_config = experiment_config.with_overrides(
        experiment=args.experiment, seed=args.seed, output_dir=args.out, parallel=args.parallel
    )
    reports = run_all(experiment_config, config)
    for report in reports:
        summary = report.summary()
        print(f"{summary['experiment']:28s} {summary['verdict']:5s} "
              f"passed={summary['passed']} failed={summary['failed']} info={summary['informational']}")
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAILURE


def cmd_fundamental(args: argparse.Namespace) -> int:
    config = get_config()
    service = FundamentalService(config.supremum)
    registry = PsiRegistry(config.precedence)
    kind = args.kind

    if kind == "lp":
        value = fundamental_lp(_require(args.delta, "delta"), _require(args.p, "p")[0])
    elif kind == "gls":
        psi = registry.from_descriptor(_require(args.psi, "psi")[0])
        value = service.fundamental_gls(psi, _require(args.delta, "delta"))
    elif kind == "theta":
        p = _require(args.p, "p")
        value = theta_scaled(p, args.a or [1.0] * len(p), args.R)
    elif kind == "box":
        value = fundamental_box(_require(args.p, "p"), _require(args.sides, "sides"))
    elif kind == "agls":
        psis = [registry.from_descriptor(text) for text in _require(args.psi, "psi")]
        sides = _require(args.sides, "sides")
        if len(sides) != len(psis):
            raise DomainError(f"{len(sides)} sides given for {len(psis)} psi factors")
        D = ProductSet(tuple(Parallelepiped((0.0,), (s,)) for s in sides))
        value = service.fundamental_agls(AnisotropicPsi.factorable(*psis), D)
    else:
        a = (args.a or [1.0])[0]
        tilde = psi_tilde(a, args.alpha, args.beta)
        print(f"h = {tilde.h:.15g}")
        print(f"{'regime':8s} {'delta':>10s} {'phi':>22s}  ratios")
        for row in service.tilde_phi_asymptotic_check(tilde):
            ratios = ", ".join(f"{name}={ratio:.12g}" for name, ratio in row.ratios().items())
            print(f"{row.regime:8s} {row.delta:10.3g} {row.phi:22.15g}  {ratios}")
        return EXIT_PASS

    print(f"{value:.15g}")
    return EXIT_PASS


def cmd_norm(args: argparse.Namespace) -> int:
    config = get_config()
    f = TestFunction.from_descriptor(args.function)
    service = NormService(config, args.seed)

    if args.space == "lp":
        estimate = service.lp_norm(f, _require(args.p, "p")[0])
    elif args.space == "weighted":
        estimate = service.weighted_norm(f, _require(args.p, "p")[0], args.alpha, args.weight_norm)
    elif args.space == "mixed":
        p = _require(args.p, "p")
        m = args.m or [1] * len(p)
        estimate = service.mixed_norm(f, MixedExponent(p, m))
    else:
        psi = PsiRegistry(config.precedence).from_descriptor(_require(args.psi, "psi"))
        estimate = service.gls_norm(f, psi)

    print(json.dumps(estimate.to_dict(), sort_keys=True))
    return EXIT_PASS


COMMANDS = {"run": cmd_run, "fundamental": cmd_fundamental, "norm": cmd_norm}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        setup_logging(get_config().logging, verbose=args.verbose)
    except ConfigError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](args)
    except ReportWriteError as e:
        logger.error(f"Report output failed: {e}")
        return EXIT_FAILURE
    except (ConfigError, DomainError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except GLSToolError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

"""Main entry point for hyperflux."""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from .catalog import SeriesId, SeriesKind, build_direct, build_via_transform, infer_n, parse_params
from .config import Config
from .errors import ClusterError, ConvergenceError, GenericityError, HyperfluxError
from .kz import (
    PQRParameters,
    pipeline_pqr,
    predicted_scheme,
    riemann_scheme,
    rigidity_formula,
    rigidity_index,
    validate,
)
from .scheme_tex import emit_tex
from .series import TruncatedSeries
from .storage import ArtifactStore
from .transforms import TransformSpec, apply_transform
from .verify import SUITES, Verifier

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_TOLERANCE = 3
EXIT_USAGE = 64


class UsageParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit status 64."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def setup_logging(log_level: str):
    """Setup logging configuration."""
    logging.basicConfig(
        level=getattr(logging, log_level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )


def build_parser() -> UsageParser:
    common = UsageParser(add_help=False)
    common.add_argument("--config", type=str, help="Path to config YAML file")
    common.add_argument(
        "--log-level",
        type=str,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Log level (default: from config, INFO)",
    )
    common.add_argument("--output", type=str, help="Artifact directory (overrides output_dir)")

    parser = UsageParser(
        prog="hyperflux",
        description="Integral transforms of hypergeometric series and KZ residue families",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    series = sub.add_parser("series", parents=[common], help="Build a catalog series")
    series.add_argument("--kind", required=True, choices=[k.value for k in SeriesKind])
    series.add_argument("--params", required=True, help='e.g. "a=0.3,b=0.7,bp=0.4,c=1.9"')
    series.add_argument("--trunc", type=int, help="Truncation degree D (default: from config)")
    series.add_argument("--n", type=int, help="Variable count for the Lauricella kinds")
    series.add_argument("--route", default="direct", choices=["direct", "K", "L", "map"])
    series.add_argument("--out", default="json", choices=["json", "text"])

    transform = sub.add_parser("transform", parents=[common], help="Apply K or L to a series")
    transform.add_argument("--input", required=True, help="Series JSON file")
    transform.add_argument("--spec", required=True, help="Transform spec JSON file")
    transform.add_argument("--direction", required=True, choices=["K", "L"])

    pipeline = sub.add_parser("kz-pipeline", parents=[common], help="Run the (p,q,r) KZ pipeline")
    pipeline.add_argument("--pqr", required=True, help="e.g. 2,1,2")
    pipeline.add_argument("--seed", type=int, help="Parameter seed (default: from config)")
    pipeline.add_argument("--emit", type=str, help="Write the Riemann scheme as TeX to this path")
    pipeline.add_argument("--div", type=int, help="Columns per TeX block")

    scheme = sub.add_parser("kz-scheme", parents=[common], help="Riemann scheme of a family")
    scheme.add_argument("--family", required=True, help="Residue family JSON file")
    scheme.add_argument("--emit", type=str, help="Write the Riemann scheme as TeX to this path")
    scheme.add_argument("--div", type=int, help="Columns per TeX block")

    verify = sub.add_parser("verify", parents=[common], help="Run verification suites")
    verify.add_argument("--suite", default="all", choices=list(SUITES) + ["all"])
    verify.add_argument("--tol-report", action="store_true", help="Print every check as JSON")
    verify.add_argument("--full", action="store_true", help="Run the full randomized sizes")
    verify.add_argument("--seed", type=int, help="Random seed (default: from config)")
    return parser


def _print_json(data: Any) -> None:
    print(json.dumps(data, indent=2, ensure_ascii=False))


def _store(config: Config, args: argparse.Namespace) -> Optional[ArtifactStore]:
    if not args.output:
        return None
    store = ArtifactStore(config)
    store.ensure_directories()
    return store


def cmd_series(config: Config, args: argparse.Namespace) -> int:
    kind = SeriesKind(args.kind)
    params = parse_params(kind, args.params)
    n = args.n or infer_n(kind, params)
    D = args.trunc if args.trunc is not None else config.series.trunc
    sid = SeriesId(kind, params, n, D)
    if args.route == "direct":
        series = build_direct(sid)
    else:
        series = build_via_transform(sid, args.route)
    logger.info(f"Built {kind.value} with n={n}, D={D} via {args.route}")

    if args.out == "json":
        _print_json(series.to_json())
    else:
        for m, c in series.items():
            print(f"{list(m)}\t{c.real:.17g}\t{c.imag:.17g}")

    store = _store(config, args)
    if store:
        store.save_series(f"{kind.value}-D{D}-{args.route}", series)
    return EXIT_OK


def cmd_transform(config: Config, args: argparse.Namespace) -> int:
    u = ArtifactStore.read_json(args.input)
    spec = TransformSpec.from_json(ArtifactStore.read_json(args.spec))
    series = apply_transform(TruncatedSeries.from_json(u), spec, args.direction)
    _print_json(series.to_json())
    store = _store(config, args)
    if store:
        store.save_series(f"{Path(args.input).stem}-{args.direction}", series)
    return EXIT_OK


def _parse_pqr(text: str) -> List[int]:
    try:
        values = [int(v) for v in text.split(",")]
    except ValueError:
        values = []
    if len(values) != 3 or min(values) < 1:
        raise HyperfluxError(f"--pqr needs three positive integers, got {text!r}")
    return values


def _write_tex(path: str, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")


def cmd_kz_pipeline(config: Config, args: argparse.Namespace) -> int:
    p, q, r = _parse_pqr(args.pqr)
    seed = args.seed if args.seed is not None else config.seed
    logger.info(f"Drawing (p,q,r)=({p},{q},{r}) parameters with seed {seed}")
    rng = np.random.default_rng(seed)
    params = PQRParameters.draw(p, q, r, rng, config.kz.param_low, config.kz.param_high)
    F = pipeline_pqr(p, q, r, params, config.tolerances.kernel)

    check = validate(F, config.tolerances.pick(config.tolerances.integrability))
    scheme = riemann_scheme(F, config.tolerances.eigen)
    distance = scheme.distance(predicted_scheme(p, q, r, params))
    report: Dict[str, Any] = {
        "pqr": [p, q, r],
        "seed": seed,
        "rank": F.N,
        "idx_x": rigidity_index(F, "x"),
        "idx_y": rigidity_index(F, "y"),
        "idx_x_formula": rigidity_formula(p, q, r),
        "validate": check.to_json(),
        "scheme_distance": distance,
        "parameters": params.to_json(),
    }
    _print_json(report)

    if args.emit:
        _write_tex(args.emit, emit_tex(scheme, args.div or config.kz.tex_div))
    store = _store(config, args)
    if store:
        store.save_family(f"pqr-{p}{q}{r}-seed{seed}", F)
        store.save_report(f"pqr-{p}{q}{r}-seed{seed}", report)

    if not check.passed:
        return EXIT_VALIDATION
    if distance > config.tolerances.pick(config.tolerances.eigen):
        logger.error(f"Riemann scheme deviates from the prediction by {distance:.3e}")
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_kz_scheme(config: Config, args: argparse.Namespace) -> int:
    store = ArtifactStore(config)
    F = store.load_family(args.family)
    check = validate(F, config.tolerances.pick(config.tolerances.integrability))
    scheme = riemann_scheme(F, config.tolerances.eigen)
    _print_json({"validate": check.to_json(), "scheme": scheme.to_json()})
    if args.emit:
        _write_tex(args.emit, emit_tex(scheme, args.div or config.kz.tex_div))
    return EXIT_OK if check.passed else EXIT_VALIDATION


def cmd_verify(config: Config, args: argparse.Namespace) -> int:
    if args.seed is not None:
        config.seed = args.seed
    report = Verifier(config, full=args.full).run(args.suite)
    stats = report["stats"]
    if args.tol_report:
        _print_json(report)
    else:
        _print_json(stats)
    store = _store(config, args)
    if store:
        store.save_report(f"verify-{args.suite}-seed{config.seed}", report)
    logger.info(f"Verification complete: {stats}")
    if stats["errors"]:
        return EXIT_VALIDATION
    if stats["failed"]:
        return EXIT_TOLERANCE
    return EXIT_OK


COMMANDS = {
    "series": cmd_series,
    "transform": cmd_transform,
    "kz-pipeline": cmd_kz_pipeline,
    "kz-scheme": cmd_kz_scheme,
    "verify": cmd_verify,
}


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run the subcommand and return its exit status."""
    args = build_parser().parse_args(argv)

    config_path = args.config
    if not config_path:
        default_config = Path("config.yaml")
        if default_config.exists():
            config_path = str(default_config)

    try:
        config = Config.load(config_path)
    except Exception as e:
        setup_logging(args.log_level or "INFO")
        logger.error(f"Failed to load config: {e}")
        return EXIT_VALIDATION

    setup_logging(args.log_level or config.log_level)
    if args.output:
        config.output_dir = args.output

    try:
        return COMMANDS[args.command](config, args)
    except (ConvergenceError, ClusterError, GenericityError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_TOLERANCE
    except (HyperfluxError, ValueError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_VALIDATION
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return EXIT_VALIDATION


def main():
    """Main entry point."""
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``python -m app.cli <command> ...``.

Exit codes: 0 success, 2 bad input or configuration, 3 dynamical failure
(tie, cap, degenerate block, halted orbit), 4 invariant violation.
"""
import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import List, Optional

from app.classify import classify, decompose
from app.constructions import ConstructionSpec, construct_theorem_c
from app.errors import IetError, ParseError
from app.harness import HarnessRunner
from app.iet import Iet
from app.models import Config
from app.orbits import saddle_connections
from app.scalar import Scalar
from app.svg import render_orbit_svg

logger = logging.getLogger(__name__)


def setup_logging(level: str) -> None:
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s — %(message)s",
    )


# ---------------------------------------------------------------------------
# I/O helpers
# ---------------------------------------------------------------------------


def _read_iet(path: str) -> Iet:
    try:
        if path == "-":
            data = json.load(sys.stdin)
        else:
            with open(path, "r") as f:
                data = json.load(f)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return Iet.from_dict(data)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as f:
            f.write(text + "\n")
        logger.info("Output written to %s", out)
    else:
        print(text)


def _dumps(data: dict) -> str:
    return json.dumps(data, indent=2)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_classify(args: argparse.Namespace, config: Config) -> int:
    T = _read_iet(args.input)
    report = classify(T.lengths, T.perm, config.caps)
    logger.info("Classified %s: %s", T.perm, report.summary)
    if not args.json:
        _emit(report.summary, args.out)
        return 0
    data = report.to_dict()
    data["decomposition"] = decompose(T.perm).to_dict()
    data["saddle_connections"] = [
        connection.to_dict() for connection in saddle_connections(T, config.caps.keane_depth)
    ]
    _emit(_dumps(data), args.out)
    return 0


def cmd_construct(args: argparse.Namespace, config: Config) -> int:
    spec = ConstructionSpec(n=args.n, k=args.k, ell=args.l, seed=config.harness.seed)
    construction = construct_theorem_c(spec)
    logger.info("Constructed %s for (n=%d, k=%d, l=%d)", construction.perm, spec.n, spec.k, spec.ell)
    _emit(_dumps(construction.to_dict()), args.out)
    return 0


def cmd_verify(args: argparse.Namespace, config: Config) -> int:
    runner = HarnessRunner(config.harness, config.caps)
    report = runner.verify()
    if args.json:
        _emit(_dumps(report.to_dict()), args.out)
    else:
        _emit(
            f"samples={report.samples} terminated={len(report.terminated)} "
            f"bound_violations={report.bound_violations} "
            f"nper_zero_with_flips={report.nper_zero_with_flips} "
            f"tie_count={report.tie_count} cap_count={report.cap_count}",
            args.out,
        )
    return 0


def cmd_perturb(args: argparse.Namespace, config: Config) -> int:
    T = _read_iet(args.input)
    runner = HarnessRunner(config.harness, config.caps)
    report = runner.perturb(T.lengths, T.perm)
    if args.json:
        _emit(_dumps(report.to_dict()), args.out)
    else:
        ratio = report.max_rho_ratio
        _emit(
            f"preserved={report.preserved}/{len(report.trials)} "
            f"base=({report.base_n_per},{report.base_n_min}) "
            f"max_rho_ratio={'n/a' if ratio is None else f'{ratio:.3g}'}",
            args.out,
        )
    return 0


def cmd_orbit_svg(args: argparse.Namespace, config: Config) -> int:
    T = _read_iet(args.input)
    if args.witness:
        witnesses: List[Scalar] = [Scalar.parse(w, T.basis) for w in args.witness]
    else:
        report = classify(T.lengths, T.perm, config.caps)
        witnesses = [component.witness for component in report.components]
    text = render_orbit_svg(T, witnesses, args.steps)
    _emit(text, args.out)
    return 0


COMMANDS = {
    "classify": cmd_classify,
    "construct": cmd_construct,
    "verify": cmd_verify,
    "perturb": cmd_perturb,
    "orbit-svg": cmd_orbit_svg,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML configuration file")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument("--caps-rauzy", type=int, help="maximum Rauzy steps per block")
    common.add_argument("--caps-recursion", type=int, help="maximum classification depth")
    common.add_argument("--caps-orbit", type=int, help="maximum orbit length when tracing returns")
    common.add_argument("--caps-keane", type=int, help="saddle-connection depth for oriented blocks")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--json", action="store_true", help="print the full JSON report")
    common.add_argument("--out", help="write output to this file instead of stdout")

    parser = argparse.ArgumentParser(
        prog="iet-flips",
        description="Exact interval exchange transformations with flips.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="count periodic and minimal components")
    p.add_argument("input", help="IET JSON file, or - for stdin")

    p = sub.add_parser("construct", parents=[common], help="build an IET with k periodic and l minimal components")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("l", type=int)

    p = sub.add_parser("verify", parents=[common], help="sample flipped IETs and check the component bound")
    p.add_argument("--n", type=int, help="number of intervals")
    p.add_argument("--samples", type=int, help="number of samples (per permutation with --exhaustive)")
    p.add_argument("--exhaustive", action="store_true", help="enumerate every irreducible flipped permutation")
    p.add_argument("--workers", type=int, help="worker processes")

    p = sub.add_parser("perturb", parents=[common], help="classify randomly perturbed copies of an IET")
    p.add_argument("input", help="IET JSON file, or - for stdin")
    p.add_argument("--magnitude", type=_fraction, help="relative perturbation size, e.g. 1/1000")
    p.add_argument("--trials", type=int, help="number of perturbed copies")
    p.add_argument("--workers", type=int, help="worker processes")

    p = sub.add_parser("orbit-svg", parents=[common], help="plot orbits of witness points as SVG")
    p.add_argument("input", help="IET JSON file, or - for stdin")
    p.add_argument("--witness", action="append", help="witness point, e.g. 1/2 or 1+sqrt(2); repeatable")
    p.add_argument("--steps", type=int, default=200, help="orbit length per witness")
    return parser


def resolve_config(args: argparse.Namespace) -> Config:
    """Environment (or --config file), then command-line flags."""
    config = Config.load(args.config) if args.config else Config.from_env()
    if args.log_level:
        config.logging.level = args.log_level
    if args.caps_rauzy is not None:
        config.caps.rauzy_cap = config.harness.rauzy_cap = args.caps_rauzy
    if args.caps_orbit is not None:
        config.caps.orbit_cap = config.harness.orbit_cap = args.caps_orbit
    if args.caps_recursion is not None:
        config.caps.recursion_cap = args.caps_recursion
    if args.caps_keane is not None:
        config.caps.keane_depth = args.caps_keane
    if args.seed is not None:
        config.harness.seed = args.seed
    for flag, name in (("n", "n"), ("samples", "sample_count"), ("workers", "workers"),
                       ("magnitude", "perturbation_magnitude"), ("trials", "trials")):
        value = getattr(args, flag, None)
        if value is not None:
            setattr(config.harness, name, value)
    if getattr(args, "exhaustive", False):
        config.harness.exhaustive = True
    return config


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = resolve_config(args)
    except (OSError, ValueError, TypeError) as exc:
        setup_logging("INFO")
        logger.error("Could not load configuration: %s", exc)
        return 2

    setup_logging(config.logging.level)
    errors = config.validate()
    for err in errors:
        logger.error("Config validation error: %s", err)
    if errors:
        return 2

    logger.debug("Configuration: %s", config.to_dict())
    try:
        return COMMANDS[args.command](args, config)
    except IetError as exc:
        logger.error("%s failed: %s: %s", args.command, type(exc).__name__, exc)
        payload = {
            "error": type(exc).__name__,
            "message": str(exc),
            "exit_code": exc.exit_code,
        }
        report = getattr(exc, "report", None)
        if report is not None:
            payload["report"] = report.to_dict()
        print(_dumps(payload))
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

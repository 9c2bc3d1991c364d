"""ofdm-ici command line.

Each subcommand runs one study. Settings resolve in the order
command-line flag, scenario document, environment, config file, default.
Exit status is 0 on success and 1 on any failure; a failed run still
writes manifest.json with status "failed".
"""

import argparse
import logging
import sys
from dataclasses import replace

from .. import __version__
from ..channel.profiles import ProfileRegistry, get_profile_registry, profile_to_dict
from ..config import OUTPUT_FORMATS, AppConfig, get_config
from ..errors import OfdmIciError, ScenarioError
from ..sim.executor import get_executor
from ..sim.rng import SEED_MAX
from .outputs import STATUS_COMPLETE, STATUS_FAILED, RunOutputs
from .scenario import Scenario, default_scenario, load_scenario
from .studies import StudyContext, StudyRegistry, create_default_registry

logger = logging.getLogger(__name__)

VALIDATE_ITERATIONS = 100_000
COEFFICIENT_REALIZATIONS = 1
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def resolve_scenario(scenario: Scenario, config: AppConfig, full_scale: bool = False) -> Scenario:
    """Fill realization and iteration counts the scenario leaves unset."""
    realizations, iterations = config.scale(full_scale)
    p = scenario.params
    if scenario.study == "coefficients":
        realizations = COEFFICIENT_REALIZATIONS
    if scenario.study == "validate":
        iterations = VALIDATE_ITERATIONS
    params = replace(
        p,
        realizations=p.realizations if p.realizations is not None else realizations,
        iterations=p.iterations if p.iterations is not None else iterations,
    )
    return scenario.with_changes(params=params)


def profile_definitions(scenario: Scenario, profiles: ProfileRegistry) -> dict:
    """Definitions of the scenario's named profiles that resolve in profiles."""
    known = set(profiles.names())
    return {name: profile_to_dict(profiles.get(name))
            for name in scenario.channel.profiles if name in known}


def run_scenario(scenario: Scenario, out_dir: str | None = None, threads: int | None = None,
                 formats: tuple[str, ...] | None = None, full_scale: bool = False,
                 registry: StudyRegistry | None = None) -> int:
    """Run one scenario end to end and write its outputs. Returns the exit status."""
    config = get_config()
    scenario = resolve_scenario(scenario, config, full_scale)
    out_dir = out_dir or scenario.output_dir or config.output_dir
    threads = threads or config.threads
    formats = formats or scenario.formats
    scenario = scenario.with_changes(formats=formats)
    registry = registry or create_default_registry()

    outputs = RunOutputs(out_dir, formats)
    logger.info("Running %s (%s) into %s with %d thread(s)",
                scenario.name, scenario.study, out_dir, threads)
    profiles = get_profile_registry()
    with get_executor(threads) as executor:
        ctx = StudyContext(scenario, outputs, executor, profiles)
        result = registry.execute(scenario.study, ctx)

    status = STATUS_COMPLETE if result.success else STATUS_FAILED
    outputs.write_manifest(scenario.to_dict(), status, threads, error=result.error,
                           profiles=profile_definitions(scenario, profiles))
    if result.success:
        logger.info("%s: %s", scenario.study, result.output)
        return 0
    logger.error("%s failed: %s", scenario.study, result.error)
    return 1


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value <= SEED_MAX:
        raise argparse.ArgumentTypeError("seed must be in [0, 2^64 - 1]")
    return value


def _profiles_epilog(profiles: ProfileRegistry) -> str:
    lines = ["channel profiles:"]
    for profile in profiles.get_available():
        lines.append(f"  {profile.name:<16}{profile.description}".rstrip())
    return "\n".join(lines)


def build_parser(registry: StudyRegistry,
                 profiles: ProfileRegistry | None = None) -> argparse.ArgumentParser:
    epilog = _profiles_epilog(profiles or get_profile_registry())
    parser = argparse.ArgumentParser(
        prog="ofdm-ici",
        description="Inter-carrier interference, BEP and BER of OFDM over time-varying channels.",
        epilog=epilog,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for study in registry.list_studies():
        p = sub.add_parser(study.command, help=study.description, description=study.description,
                           epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--scenario", help="scenario JSON (or a manifest.json to replay)")
        p.add_argument("--seed", type=_seed, help="root seed, overrides the scenario")
        p.add_argument("--out", help="output directory")
        p.add_argument("--threads", type=_positive_int, help="worker threads")
        p.add_argument("--format", choices=OUTPUT_FORMATS, help="json also writes the csv tables")
        p.add_argument("--paper-scale", "--full-scale", dest="full_scale", action="store_true",
                       help="full realization and iteration counts instead of desk scale")
        p.add_argument("--log-level", choices=LOG_LEVELS, help="logging threshold")
    return parser


def _formats(fmt: str | None) -> tuple[str, ...] | None:
    if fmt is None:
        return None
    return ("csv",) if fmt == "csv" else ("csv", "json")


def main(argv: list[str] | None = None) -> int:
    registry = create_default_registry()
    args = build_parser(registry).parse_args(argv)
    study = registry.by_command(args.command).name
    config = get_config()
    logging.basicConfig(
        level=args.log_level or config.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        if args.scenario:
            scenario = load_scenario(args.scenario, study=study)
        else:
            scenario = default_scenario(study)
    except ScenarioError as e:
        logger.error("Invalid scenario: %s", e)
        return 1
    if args.seed is not None:
        scenario = scenario.with_changes(seed=args.seed)

    formats = _formats(args.format)
    if formats is None and scenario.formats == ("csv",) and config.output_format == "json":
        formats = ("csv", "json")
    try:
        return run_scenario(scenario, out_dir=args.out, threads=args.threads, formats=formats,
                            full_scale=args.full_scale, registry=registry)
    except (OfdmIciError, OSError) as e:
        logger.error("Run failed: %s", e)
        return 1


if __name__ == "__main__":
    sys.exit(main())

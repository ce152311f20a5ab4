import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from errors import ConfigInvalid, DecayToolkitError
from models import Config
from runner import ScenarioRunner
from scenarios.all_scenarios import Scenarios, describe
from services.results_writer import ResultsWriter
from services.scenario_loader import ScenarioLoader

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TOLERANCE = 2


def setup_logging(config: Config, verbose: bool = False):
    """ Create logs directory and configure logging. """
    log_dir = Path(config.log_dir)
    log_dir.mkdir(exist_ok=True)

    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_dir / 'run.log'),
            logging.StreamHandler()
        ]
    )

    if not verbose:
        logging.getLogger('numerics').setLevel(logging.WARNING)


def parse_tolerances(items: list[str]) -> dict[str, float]:
    """ KEY=VAL pairs from the command line. """
    tolerances = {}
    for item in items:
        key, sep, value = item.partition('=')
        if not sep or not key:
            raise ConfigInvalid('--tol', f'expected KEY=VAL, got {item!r}')
        try:
            tolerance = float(value)
        except ValueError as e:
            raise ConfigInvalid(f'--tol {key}', f'{value!r} is not a number') from e
        if not tolerance > 0:
            raise ConfigInvalid(f'--tol {key}', f'must be positive, got {value}')
        tolerances[key] = tolerance
    return tolerances


def list_scenarios() -> str:
    return '\n'.join(describe(scenario) for scenario in Scenarios)


def run(config_path: str, out: str | None, tol: list[str], config: Config) -> int:
    settings = ScenarioLoader(config).load(config_path)
    if tol:
        settings = replace(settings, tolerances={**settings.tolerances, **parse_tolerances(tol)})

    report, series = ScenarioRunner(config).run(settings)
    output_dir = out or settings.output_dir or str(Path(config.output_dir) / settings.scenario.value)
    series_path, report_path = ResultsWriter(output_dir).write(report, series)

    print(f'Series written to {series_path}')
    print(f'Report written to {report_path}')
    for key, check in report.checks.items():
        status = 'PASS' if check['passed'] else 'FAIL'
        print(f'  [{status}] {key}: {check["value"]:.6g} vs {check["target"]:.6g} '
              f'(error {check["error"]:.3e}, tolerance {check["tolerance"]:.3e})')

    return EXIT_OK if report.passed else EXIT_TOLERANCE


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description='Resonance poles, survival amplitudes and decoherence times')
    commands = parser.add_subparsers(dest='command', required=True)

    run_parser = commands.add_parser('run', help='Run a scenario file')
    run_parser.add_argument('config', help='Path to a JSON scenario file')
    run_parser.add_argument('--out', default=None, help='Output directory (default: results/<scenario>)')
    run_parser.add_argument('--tol', action='append', default=[], metavar='KEY=VAL',
                            help='Request or override a tolerance check; may be repeated')
    run_parser.add_argument('-v', '--verbose', action='store_true', help='Enable debug logging')

    commands.add_parser('list', help='List the available scenarios')

    args = parser.parse_args(argv)

    if args.command == 'list':
        print(list_scenarios())
        return EXIT_OK

    config = Config()
    setup_logging(config, args.verbose)
    logger = logging.getLogger(__name__)

    try:
        return run(args.config, args.out, args.tol, config)
    except ConfigInvalid as e:
        logger.error(f'Invalid configuration: {e}')
        print(f'Invalid configuration: {e}', file=sys.stderr)
        return EXIT_ERROR
    except (DecayToolkitError, ValueError) as e:
        logger.exception(f'Scenario {args.config} failed')
        print(f'{args.config}: {type(e).__name__}: {e}', file=sys.stderr)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())

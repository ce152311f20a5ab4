import argparse
import logging
from tqdm import tqdm

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from models import Config, FormFactor, FriedrichsModel
from numerics.fitting import fit_power_law
from physics.friedrichs import exact_pole, perturbative_pole
from physics.oracle import convergence_study
from services.results_writer import ResultsWriter


def build_model(args) -> FriedrichsModel:
    return FriedrichsModel(omega0=args.omega0, form_factor=FormFactor(family=args.family, g=args.g,
                                                                      omega_c=args.omega_c))


def oracle_study(args, config: Config):
    """ Max |A_oracle − A_quadrature| over [0, 5/γ] while N doubles. """
    logger = logging.getLogger(__name__)
    model = build_model(args)
    gamma = perturbative_pole(model, config).gamma
    times = np.linspace(0.0, args.lifetimes / gamma, args.samples)
    Ns = [args.n_start * 2 ** k for k in range(args.doublings)]

    logger.info(f'Oracle study: g = {args.g}, omega_max = {args.omega_max}, N in {Ns}')
    progress = lambda values: tqdm(values, desc='Diagonalizing')
    results = convergence_study(model, Ns, args.omega_max, times, config, progress=progress)

    print(f'{"N":>8}  {"max discrepancy":>16}')
    for N, discrepancy in results:
        print(f'{N:>8}  {discrepancy:>16.3e}')

    return {'N': np.array([N for N, _ in results], dtype=float),
            'max_discrepancy': np.array([d for _, d in results])}


def pole_scaling_study(args, config: Config):
    """ log|z_exact − z_pert| against log g; second-order accuracy shows up as a slope near 4. """
    logger = logging.getLogger(__name__)
    couplings = np.array(args.couplings)
    gaps = []

    with tqdm(couplings, desc='Pole gaps') as pbar:
        for g in pbar:
            model = FriedrichsModel(omega0=args.omega0, form_factor=FormFactor(family=args.family, g=float(g),
                                                                               omega_c=args.omega_c))
            gap = abs(exact_pole(model, config).z - perturbative_pole(model, config).z)
            gaps.append(gap)
            pbar.set_postfix(g=f'{g:.4g}', gap=f'{gap:.3e}')

    gaps = np.array(gaps)
    fit = fit_power_law(couplings, gaps, (couplings.min(), couplings.max()), replace_min_samples(config, len(gaps)))
    logger.info(f'Pole gap exponent {fit.rate_or_exponent:.4f} (residual {fit.residual:.2e})')
    print(f'Gap exponent: {fit.rate_or_exponent:.4f}')

    return {'g': couplings, 'gap': gaps}


def replace_min_samples(config: Config, samples: int) -> Config:
    """ A handful of couplings is enough for this fit. """
    return config.override({'min_fit_samples': min(config.min_fit_samples, samples)})


def setup_logging():
    """ Create logs directory and configure logging. """
    log_dir = Path('logs')
    log_dir.mkdir(exist_ok=True)

    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_dir / 'convergence_study.log'),
            logging.StreamHandler()
        ]
    )

    logging.getLogger('numerics').setLevel(logging.WARNING)


def main():
    parser = argparse.ArgumentParser(description='Convergence studies for the pole finder and the discretized oracle')
    parser.add_argument('study', choices=['oracle', 'pole-scaling'], help='Which study to run')
    parser.add_argument('--omega0', type=float, default=1.0, help='Bare level (default: 1.0)')
    parser.add_argument('--omega-c', type=float, default=10.0, help='Form-factor cutoff (default: 10.0)')
    parser.add_argument('--family', default='threshold_lorentzian', help='Form-factor family')
    parser.add_argument('-g', type=float, default=0.2, help='Coupling for the oracle study (default: 0.2)')
    parser.add_argument('--omega-max', type=float, default=50.0, help='Oracle band edge (default: 50.0)')
    parser.add_argument('--n-start', type=int, default=500, help='Smallest mode count (default: 500)')
    parser.add_argument('--doublings', type=int, default=4, help='Number of mode counts (default: 4)')
    parser.add_argument('--lifetimes', type=float, default=5.0, help='Time span in units of 1/γ (default: 5)')
    parser.add_argument('--samples', type=int, default=101, help='Time samples (default: 101)')
    parser.add_argument('--couplings', type=float, nargs='+', default=[0.05, 0.0707, 0.1, 0.1414, 0.2],
                        help='Couplings for the pole-scaling study')
    parser.add_argument('--out', default=None, help='Directory for a CSV of the results')

    args = parser.parse_args()

    setup_logging()
    config = Config()

    if args.study == 'oracle':
        columns = oracle_study(args, config)
    else:
        columns = pole_scaling_study(args, config)

    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        path = ResultsWriter(args.out).write_series(columns)
        print(f'Results written to {path}')


if __name__ == '__main__':
    main()

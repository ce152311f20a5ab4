import logging

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from models import RunReport, ScenarioContext
from numerics.fitting import fit_exponential_rate
from physics.friedrichs import perturbative_pole, survival_amplitude
from physics.oracle import OracleEvolver, discretize
from scenarios.common import check, complex_columns, fit_window, new_report, time_unit

logger = logging.getLogger(__name__)


class OracleScenario:
    def __init__(self, context: ScenarioContext):
        self.context = context
        self._series = {}

    def run(self) -> RunReport:
        config = self.context.config
        params = self.context.settings.model
        model = params.to_model()
        report = new_report(self.context)

        d = discretize(model, params.N, params.omega_max, config)
        evolver = OracleEvolver(d)

        unit = time_unit(perturbative_pole(model, config).gamma)
        times = self.context.settings.time.values(unit)
        oracle = evolver.survival(times)
        quadrature = survival_amplitude(model, times, config).amplitude
        discrepancy = np.abs(oracle - quadrature)

        report.quantities.update({
            'N': params.N,
            'omega_max': params.omega_max,
            'recurrence_horizon': evolver.horizon,
            'weight_sum': float(evolver.weights.sum()),
            'max_discrepancy': float(discrepancy.max())
        })
        check(report, self.context, 'max_discrepancy', discrepancy.max(), 0.0)

        window = fit_window(self.context, 'rate', unit)
        if window:
            fit = fit_exponential_rate(times, np.abs(oracle) ** 2, window, config)
            report.quantities['fitted_rate'] = fit.rate_or_exponent
            check(report, self.context, 'rate', fit.rate_or_exponent, 2 * d.gamma_estimate, relative=True)

        self._series = complex_columns(times, oracle)
        self._series.update({'quad_re': quadrature.real, 'quad_im': quadrature.imag, 'discrepancy': discrepancy})

        print(f'Oracle with {params.N} modes: max |A_oracle − A_quad| = {discrepancy.max():.3e}, '
              f'recurrence horizon {evolver.horizon:.4g}')
        return report

    def series(self) -> dict[str, np.ndarray]:
        return self._series

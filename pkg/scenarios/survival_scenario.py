import logging

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from models import RunReport, ScenarioContext
from numerics.fitting import fit_exponential_rate, fit_power_law
from physics.friedrichs import exact_pole, pole_background_split, relaxation_time, survival_amplitude
from scenarios.common import check, complex_columns, complex_entry, fit_window, new_report, time_unit

logger = logging.getLogger(__name__)


class SurvivalScenario:
    """
        A(t) of the full model with its pole/background split. Optional fits: "rate" fits ln|A|² (the result
        is compared with 2γ) and "power_law" fits ln|A|² against ln t (compared with the −3 threshold tail).
    """

    def __init__(self, context: ScenarioContext):
        self.context = context
        self._series = {}

    def run(self) -> RunReport:
        config = self.context.config
        model = self.context.settings.model.to_model()
        report = new_report(self.context)

        if model.is_free:
            times = self.context.settings.time.values()
            series = survival_amplitude(model, times, config)
            deviation = float(np.max(np.abs(np.abs(series.amplitude) - 1.0)))
            report.quantities.update({'decaying': False, 'max_norm_deviation': deviation})
            check(report, self.context, 'free_norm', deviation, 0.0)
            self._series = complex_columns(times, series.amplitude)
            self._series['probability'] = series.probability
            return report

        pole = exact_pole(model, config)
        unit = time_unit(pole.gamma)
        times = self.context.settings.time.values(unit)
        series = pole_background_split(model, times, config, pole)
        probability = series.probability

        report.quantities.update({
            'z0': complex_entry(pole.z),
            'gamma': pole.gamma,
            't_R': relaxation_time(pole),
            'decaying': True
        })

        window = fit_window(self.context, 'rate', unit)
        if window:
            fit = fit_exponential_rate(times, probability, window, config)
            report.quantities['fitted_rate'] = fit.rate_or_exponent
            report.quantities['fitted_rate_residual'] = fit.residual
            check(report, self.context, 'rate', fit.rate_or_exponent, 2 * pole.gamma, relative=True)

        window = fit_window(self.context, 'power_law', unit)
        if window:
            fit = fit_power_law(times, probability, window, config)
            inside = (times >= window[0]) & (times <= window[1])
            dominated = bool(np.all(np.abs(series.background_part[inside]) > np.abs(series.pole_part[inside])))
            report.quantities['power_law_exponent'] = fit.rate_or_exponent
            report.quantities['background_dominates'] = dominated
            check(report, self.context, 'power_law', fit.rate_or_exponent, -3.0)
            if not dominated:
                logger.warning('The pole term still exceeds the background inside the power-law window')

        self._series = complex_columns(times, series.amplitude)
        self._series.update({
            'probability': probability,
            'pole_abs': np.abs(series.pole_part),
            'background_abs': np.abs(series.background_part)
        })

        print(f'Survival of z0 = {pole.z:.8g} over {len(times)} times, |A|² at the end = {probability[-1]:.3e}')
        return report

    def series(self) -> dict[str, np.ndarray]:
        return self._series

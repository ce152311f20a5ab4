import logging

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from models import RunReport, ScenarioContext
from numerics.fitting import fit_exponential_rate
from physics.lee_friedrichs import (decoherence_time_lf, default_cutoff, gamma_eff_lf, gamma_eff_series,
                                    offdiagonal_closed, offdiagonal_series, omnes_decoherence_estimate)
from scenarios.common import check, complex_columns, complex_entry, effective_model, new_report

logger = logging.getLogger(__name__)

SLOPE_SAMPLES = 64
SLOPE_WINDOW = 0.2  # in units of t_D


class LeeFriedrichsScenario:
    """
        Off-diagonal element of a two-branch oscillator superposition under H_eff = z₀N, in closed form and as
        the truncated Poisson series, with the decoherence time read off both the formula and the curve.
    """

    def __init__(self, context: ScenarioContext):
        self.context = context
        self._series = {}

    def run(self) -> RunReport:
        config = self.context.config
        settings = self.context.settings
        state = settings.state.to_state()
        em = effective_model(self.context)
        n_max = settings.n_max or default_cutoff(state.alpha2.alpha, config)
        report = new_report(self.context)

        t_D, t_R = decoherence_time_lf(state, em)
        rate = gamma_eff_lf(state, em)
        estimate = omnes_decoherence_estimate(state, em)

        # a single branch has ρ₁₂ ≡ 0: no mode weights to average and no curve to fit
        two_branch = state.a * state.b.conjugate() != 0
        series_rate = slope_rate = None
        if two_branch:
            series_rate = gamma_eff_series(state, em, n_max, config)
            # |ρ₁₂| falls from |ab*| at the rate 1/t_D until the exponent curves over
            early = np.linspace(0.0, SLOPE_WINDOW * t_D, SLOPE_SAMPLES)
            slope_rate = fit_exponential_rate(early, np.abs(offdiagonal_closed(state, em, early)),
                                              (0.0, SLOPE_WINDOW * t_D), config).rate_or_exponent
        else:
            logger.info('Single-branch state: series rate and initial slope are not defined')

        times = settings.time.values(t_R)
        closed = offdiagonal_closed(state, em, times)
        series = offdiagonal_series(state, em, times, n_max, config)
        gap = float(np.max(np.abs(closed - series)))

        report.quantities.update({
            'z0': complex_entry(em.z0),
            'alpha2': complex_entry(state.alpha2.alpha),
            'L0': state.L0,
            'n_max': n_max,
            'gamma_eff': rate,
            'gamma_eff_series': series_rate,
            't_D': t_D,
            't_R': t_R,
            't_D_estimate': estimate,
            'initial_slope': slope_rate,
            'closed_series_gap': gap
        })

        if two_branch:
            check(report, self.context, 'gamma_eff', series_rate, rate, relative=True)
            check(report, self.context, 'initial_slope', slope_rate, 1.0 / t_D, relative=True)
        check(report, self.context, 'closed_series', gap, 0.0)
        check(report, self.context, 'estimate_ratio', t_D / estimate, 2.0, relative=True)

        self._series = complex_columns(times, closed)
        self._series.update({'series_re': series.real, 'series_im': series.imag, 'series_abs': np.abs(series)})

        print(f't_D = {t_D:.6g} (t_R = {t_R:.6g}, estimate {estimate:.6g}), initial slope {slope_rate}')
        return report

    def series(self) -> dict[str, np.ndarray]:
        return self._series

import logging

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from errors import ConfigInvalid
from models import ModeSum, RunReport, ScenarioContext
from physics.multipole import model2_characteristic_times, model2_expand, model2_offdiagonal
from scenarios.common import complex_columns, new_report, time_unit
from scenarios.multipole_scenario import record_timescales

logger = logging.getLogger(__name__)


class TwoPoleScenario:
    """
        Two poles z₀, z₁ with widths γ₀ ≪ γ₁. Timescales are read off the two poles; the series is the
        off-diagonal element built from their four products.
    """

    def __init__(self, context: ScenarioContext):
        self.context = context
        self._series = {}

    def run(self) -> RunReport:
        settings = self.context.settings
        if len(settings.modes) != 2:
            raise ConfigInvalid('modes', f'two_pole needs exactly two modes, got {len(settings.modes)}')

        ms2 = ModeSum(settings.equilibrium, settings.modes)
        report = new_report(self.context)
        record_timescales(report, self.context, ms2)

        gamma0, gamma1 = ms2.gammas
        expanded = model2_expand(ms2)
        report.quantities['product_rates'] = expanded.gammas.tolist()
        if gamma0 > 0:
            report.quantities['product_times'] = list(model2_characteristic_times(gamma0, gamma1))

        times = settings.time.values(time_unit(gamma0))
        offdiagonal = model2_offdiagonal(ms2, times)
        self._series = complex_columns(times, offdiagonal)
        self._series['slowest_abs'] = np.abs(ms2.modes[0].c) ** 2 * np.exp(-gamma0 * times)
        return report

    def series(self) -> dict[str, np.ndarray]:
        return self._series

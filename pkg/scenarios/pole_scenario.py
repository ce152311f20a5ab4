import logging

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from models import RunReport, ScenarioContext
from physics.friedrichs import (bound_state_threshold, characteristic_times, exact_pole, perturbative_pole,
                                relaxation_time, total_norm)
from scenarios.common import check, complex_columns, complex_entry, new_report, time_unit

logger = logging.getLogger(__name__)


class PoleScenario:
    """ Second-order and exact poles side by side. The series is the pole term residue·e^{−iz₀t} of each. """

    def __init__(self, context: ScenarioContext):
        self.context = context
        self._series = {}

    def run(self) -> RunReport:
        config = self.context.config
        model = self.context.settings.model.to_model()
        report = new_report(self.context)

        perturbative = perturbative_pole(model, config)
        exact = exact_pole(model, config)
        gap = abs(exact.z - perturbative.z)

        report.quantities.update({
            'z0_perturbative': complex_entry(perturbative.z),
            'z0_exact': complex_entry(exact.z),
            'pole_gap': gap,
            'gamma': exact.gamma,
            'residue': complex_entry(exact.residue),
            'decaying': exact.decaying,
            't_R': relaxation_time(exact),
            'bound_state_threshold': bound_state_threshold(model, config)
        })

        if exact.decaying:
            report.quantities['characteristic_times'] = list(characteristic_times(exact.gamma))
            report.quantities['total_norm'] = total_norm(model, config)
            check(report, self.context, 'gamma', exact.gamma, perturbative.gamma, relative=True)
        check(report, self.context, 'pole_gap', gap, 0.0)
        check(report, self.context, 'free_level', float(exact.decaying), float(not model.is_free))

        times = self.context.settings.time.values(time_unit(exact.gamma))
        self._series = complex_columns(times, exact.residue * np.exp(-1j * exact.z * times))
        self._series['perturbative_abs'] = np.abs(np.exp(-1j * perturbative.z * times))

        print(f'Perturbative z0 = {perturbative.z:.10g}')
        print(f'Exact z0        = {exact.z:.10g}  (gap {gap:.3e})')
        return report

    def series(self) -> dict[str, np.ndarray]:
        return self._series

import logging
import math

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from models import ModeSum, RunReport, ScenarioContext
from physics.multipole import expectation, linearized_f, partition, preferred_expectation, timescales
from scenarios.common import check, complex_columns, complex_entry, new_report, time_unit

logger = logging.getLogger(__name__)


def record_timescales(report: RunReport, context: ScenarioContext, ms: ModeSum) -> None:
    """
        Timescale quantities of a mode sum plus the ordering checks: "scale_ratio" (t_D/t_R, target 0) and
        "preferred_gap", the gap between full and preferred evolution at five fast lifetimes relative to |full(0)|.
    """
    scales = timescales(ms)
    _, fast = partition(ms, scales.gamma_eff)
    report.quantities.update({
        't_R': scales.t_R,
        't_D': scales.t_D,
        'gamma_eff': scales.gamma_eff,
        'probability_rate': scales.probability_rate,
        'slow_count': scales.slow_count,
        'fast_count': scales.fast_count
    })

    if math.isfinite(scales.t_R):
        check(report, context, 'scale_ratio', scales.t_D / scales.t_R, 0.0)

    if len(fast) and fast.gammas.max() > 0 and abs(expectation(ms, 0.0)) > 0:
        late = 5.0 / fast.gammas.max()
        full = expectation(ms, late)
        gap = abs(full - preferred_expectation(ms, late, scales.gamma_eff)) / abs(expectation(ms, 0.0))
        report.quantities['preferred_gap'] = gap
        report.quantities['preferred_check_time'] = late
        check(report, context, 'preferred_gap', gap, 0.0)

    print(f't_R = {scales.t_R:.6g}, t_D = {scales.t_D:.6g}, '
          f'{scales.slow_count} slow / {scales.fast_count} fast modes')


class MultipoleScenario:
    def __init__(self, context: ScenarioContext):
        self.context = context
        self._series = {}

    def mode_sum(self) -> ModeSum:
        settings = self.context.settings
        return ModeSum(settings.equilibrium, settings.modes)

    def run(self) -> RunReport:
        ms = self.mode_sum()
        report = new_report(self.context)
        record_timescales(report, self.context, ms)
        report.quantities['equilibrium'] = complex_entry(ms.equilibrium)

        times = self.context.settings.time.values(time_unit(ms.gammas.min()))
        full = expectation(ms, times)
        preferred = preferred_expectation(ms, times, report.quantities['gamma_eff'])

        self._series = complex_columns(times, full)
        self._series.update({
            'preferred_re': preferred.real,
            'preferred_im': preferred.imag,
            'linearized_abs': np.abs(ms.equilibrium + linearized_f(ms, times))
        })
        return report

    def series(self) -> dict[str, np.ndarray]:
        return self._series

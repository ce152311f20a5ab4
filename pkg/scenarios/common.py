import logging

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from errors import ConfigInvalid
from models import EffectiveModel, RunReport, ScenarioContext
from physics.friedrichs import exact_pole

logger = logging.getLogger(__name__)


def complex_columns(times: np.ndarray, values: np.ndarray) -> dict[str, np.ndarray]:
    """ The t, re, im, abs columns every series table starts with. """
    values = np.asarray(values, dtype=complex)
    return {'t': np.asarray(times, dtype=float), 're': values.real, 'im': values.imag, 'abs': np.abs(values)}


def complex_entry(z: complex) -> dict:
    z = complex(z)
    return {'re': z.real, 'im': z.imag}


def new_report(context: ScenarioContext) -> RunReport:
    return RunReport(scenario=context.settings.scenario.value, echo=context.settings.raw)


def check(report: RunReport, context: ScenarioContext, key: str, value: float, target: float,
          relative: bool = False) -> None:
    """ Adds a pass/fail entry only when the config requested a tolerance for `key`. """
    tolerances = context.settings.tolerances
    if key in tolerances:
        report.add_check(key, float(value), float(target), tolerances[key], relative)


def fit_window(context: ScenarioContext, name: str, unit: float) -> tuple[float, float] | None:
    """ A fit window from the config, in the same time units as the time grid. """
    window = context.settings.fits.get(name)
    if window is None:
        return None
    factor = unit if context.settings.time.scale == 'lifetime' else 1.0
    return window[0] * factor, window[1] * factor


def effective_model(context: ScenarioContext) -> EffectiveModel:
    """ The configured z₀, or the exact pole of the configured Friedrichs model. """
    settings = context.settings
    if settings.effective is not None:
        return EffectiveModel(settings.effective)

    model = settings.model.to_model()
    if model.is_free:
        raise ConfigInvalid('model.g', 'a free level has no decaying pole to build H_eff from')
    pole = exact_pole(model, context.config)
    logger.info(f'Effective model taken from the exact pole z0 = {pole.z:.10g}')
    return EffectiveModel.from_pole(pole)


def time_unit(gamma: float) -> float:
    """ 1/γ, or 1 for a level that does not decay. """
    return 1.0 / gamma if gamma > 0 else 1.0

import logging

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from errors import InsufficientSamples, NonPositiveValue
from models import Config, FitResult

logger = logging.getLogger(__name__)


def _select(times, values, window: tuple[float, float], min_samples: int) -> tuple[np.ndarray, np.ndarray]:
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    t_min, t_max = window
    if not t_min < t_max:
        raise ValueError(f'Fit window must satisfy t_min < t_max, got {window}')

    inside = (times >= t_min) & (times <= t_max)
    t, v = times[inside], values[inside]

    if len(t) < min_samples:
        raise InsufficientSamples(f'Need at least {min_samples} samples in window {window}, got {len(t)}')
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise NonPositiveValue(f'All values in window {window} must be positive and finite')

    return t, v


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), float(intercept), residual


def fit_exponential_rate(times, values, window: tuple[float, float], config: Config | None = None) -> FitResult:
    """ Least-squares line through log(value) against t. The rate is minus the slope, the residual is the RMS log misfit. """
    config = config or Config()
    t, v = _select(times, values, window, config.min_fit_samples)
    slope, intercept, residual = _linear_fit(t, np.log(v))
    logger.debug(f'Exponential fit on {window}: rate {-slope:.6g}, residual {residual:.3e}')
    return FitResult(rate_or_exponent=-slope, intercept=intercept, residual=residual, window=tuple(window))


def fit_power_law(times, values, window: tuple[float, float], config: Config | None = None) -> FitResult:
    """ Same as fit_exponential_rate on log-log axes; the exponent is the slope itself. """
    config = config or Config()
    t, v = _select(times, values, window, config.min_fit_samples)
    if np.any(t <= 0):
        raise NonPositiveValue(f'Power-law fits need t > 0 throughout the window {window}')

    slope, intercept, residual = _linear_fit(np.log(t), np.log(v))
    logger.debug(f'Power-law fit on {window}: exponent {slope:.6g}, residual {residual:.3e}')
    return FitResult(rate_or_exponent=slope, intercept=intercept, residual=residual, window=tuple(window))

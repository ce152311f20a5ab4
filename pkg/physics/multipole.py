import logging
import math

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from errors import DegenerateInitialCondition, ModelInvalid, WrongArity
from models import Mode, ModeSum, TimescaleReport

logger = logging.getLogger(__name__)

DEGENERATE_WEIGHT = 1e-12


def evaluate_f(ms: ModeSum, t):
    """ f(t) = Σ cᵢ e^{−iωᵢt} e^{−γᵢt}, without the equilibrium value. Vectorized over t. """
    t = np.asarray(t, dtype=float)
    if not len(ms):
        return complex(0) if t.ndim == 0 else np.zeros(t.shape, dtype=complex)

    exponents = np.multiply.outer(t, -1j * ms.omegas - ms.gammas)
    value = np.exp(exponents) @ ms.weights
    return complex(value) if t.ndim == 0 else value


def expectation(ms: ModeSum, t):
    """ Equilibrium value plus the decaying modes. """
    return ms.equilibrium + evaluate_f(ms, t)


def _log_derivative(ms: ModeSum) -> complex:
    """ g′(0) for g = log f. """
    weights = ms.weights
    total = weights.sum()
    if abs(total) <= DEGENERATE_WEIGHT * np.abs(weights).sum() or not len(ms):
        raise DegenerateInitialCondition('Σcᵢ vanishes, so log f has no derivative at t = 0')
    return complex(np.sum(weights * (-1j * ms.omegas - ms.gammas)) / total)


def gamma_eff(ms: ModeSum) -> float:
    """ γ_eff = −Re g′(0): the weighted mean Σcᵢγᵢ/Σcᵢ when the weights are real. """
    return -_log_derivative(ms).real


def linearized_f(ms: ModeSum, t):
    """ f(0)·exp(g′(0)·t), tangent to log f at t = 0. """
    t = np.asarray(t, dtype=float)
    value = ms.weights.sum() * np.exp(_log_derivative(ms) * t)
    return complex(value) if t.ndim == 0 else value


def partition(ms: ModeSum, rate: float | None = None) -> tuple[ModeSum, ModeSum]:
    """
        Splits the modes at γ_eff into slow (γᵢ < γ_eff) and fast ones. The slow set keeps the equilibrium value
        and is never empty: when no mode is strictly slower the test relaxes to ≤, and failing that the slowest
        mode is taken.
    """
    rate = gamma_eff(ms) if rate is None else rate

    slow = [i for i, mode in enumerate(ms.modes) if mode.gamma < rate]
    if not slow:
        slow = [i for i, mode in enumerate(ms.modes) if mode.gamma <= rate] or [0]
    fast = [mode for i, mode in enumerate(ms.modes) if i not in slow]

    return ModeSum(ms.equilibrium, tuple(ms.modes[i] for i in slow)), ModeSum(0j, tuple(fast))


def preferred_expectation(ms: ModeSum, t, rate: float | None = None):
    """ (ρ_P(t)|O): equilibrium plus the slow modes only. """
    slow, _ = partition(ms, rate)
    return expectation(slow, t)


def timescales(ms: ModeSum) -> TimescaleReport:
    """ t_R from the slowest mode (∞ when it does not decay), t_D = 1/γ_eff. """
    if not len(ms):
        raise ModelInvalid('A mode sum needs at least one mode')

    slowest = float(ms.gammas.min())
    rate = gamma_eff(ms)
    slow, fast = partition(ms, rate)

    t_R = 1.0 / slowest if slowest > 0 else math.inf
    t_D = 1.0 / rate if rate > 0 else math.inf
    if math.isinf(t_R):
        logger.info('Slowest mode does not decay; relaxation time reported as infinite')

    return TimescaleReport(t_R=t_R, gamma_eff=rate, t_D=t_D, slow_count=len(slow), fast_count=len(fast))


# Two-pole case

def model2_expand(ms2: ModeSum) -> ModeSum:
    """
        Products of two poles written as zᵢ = ωᵢ − (i/2)γᵢ: every pair (i, j) gives a term cᵢc̄ⱼ oscillating at
        ωᵢ − ωⱼ and decaying at (γᵢ + γⱼ)/2, so rates γ₀, (γ₀ + γ₁)/2 twice and γ₁ appear.
    """
    if len(ms2) != 2:
        raise WrongArity(f'The two-pole expansion needs exactly two modes, got {len(ms2)}')

    products = tuple(
        Mode(c=first.c * second.c.conjugate(),
             omega=first.omega - second.omega,
             gamma=(first.gamma + second.gamma) / 2)
        for first in ms2.modes for second in ms2.modes
    )
    return ModeSum(ms2.equilibrium, products)


def model2_offdiagonal(ms2: ModeSum, t):
    return expectation(model2_expand(ms2), t)


def model2_characteristic_times(gamma0: float, gamma1: float) -> tuple[float, float, float, float]:
    """ Reciprocals of the four product rates, slowest first. """
    if not (gamma0 > 0 and gamma1 > 0):
        raise ModelInvalid('Both pole widths must be positive')
    cross = 2.0 / (gamma0 + gamma1)
    return 1.0 / gamma0, cross, cross, 1.0 / gamma1

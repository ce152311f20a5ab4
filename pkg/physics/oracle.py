import logging
import math
import warnings

import numpy as np
import scipy.linalg

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from errors import BeyondRecurrence, GridTooCoarse, ModelInvalid
from models import Config, DiscreteModel, FitResult, FriedrichsModel
from numerics.fitting import fit_exponential_rate
from numerics.quadrature import composite_gauss_grid
from physics.friedrichs import coupling_weight, perturbative_pole, support_end, survival_amplitude

logger = logging.getLogger(__name__)


def _split_panels(lengths: list[float], total: int) -> list[int]:
    """ Shares `total` panels among segments in proportion to length, at least one each. """
    if total < len(lengths):
        raise ModelInvalid(f'{total} panels cannot cover {len(lengths)} grid segments')

    shares = np.array(lengths) / sum(lengths) * (total - len(lengths))
    counts = np.floor(shares).astype(int) + 1
    # Largest remainders take the leftover panels
    for index in np.argsort(-(shares - np.floor(shares)))[:total - counts.sum()]:
        counts[index] += 1
    return counts.tolist()


def discretize(model: FriedrichsModel, N: int, omega_max: float, config: Config | None = None) -> DiscreteModel:
    """
        Replaces the continuum by N modes at composite Gauss-Legendre nodes on [0, omega_max]. A share of the
        panels is reserved for the window ω₀′ ± oracle_peak_halfwidth·γ around the expected pole; the rest is
        spread over the remaining segments by length. Mode j couples with λ(ωⱼ)·√(n(ωⱼ)wⱼ).
    """
    config = config or Config()
    order = config.oracle_order

    if N < config.oracle_min_modes:
        raise ModelInvalid(f'N must be at least {config.oracle_min_modes}, got {N}')
    if N % order:
        raise ModelInvalid(f'N must be a multiple of the panel order {order}, got {N}')

    pole = perturbative_pole(model, config)
    gamma = pole.gamma
    if omega_max < model.omega0 + 20 * gamma:
        raise ModelInvalid(f'omega_max = {omega_max} does not reach omega0 + 20γ = {model.omega0 + 20 * gamma:.4g}')

    panels = N // order
    edges = [0.0, omega_max]
    band_end = support_end(model)
    if band_end < omega_max:
        edges.insert(1, band_end)

    if gamma > 0:
        halfwidth = config.oracle_peak_halfwidth * gamma
        lo, hi = max(0.0, pole.omega_prime - halfwidth), min(omega_max, pole.omega_prime + halfwidth)
        outer = sorted(set(edges) | {lo, hi})
        segments = list(zip(outer[:-1], outer[1:]))
        peak = [i for i, (a, b) in enumerate(segments) if a >= lo and b <= hi]

        peak_panels = max(len(peak), round(panels * config.oracle_peak_fraction))
        counts = [0] * len(segments)
        for i, share in zip(peak, _split_panels([segments[i][1] - segments[i][0] for i in peak], peak_panels)):
            counts[i] = share
        rest = [i for i in range(len(segments)) if i not in peak]
        if rest:
            shares = _split_panels([segments[i][1] - segments[i][0] for i in rest], panels - peak_panels)
            for i, share in zip(rest, shares):
                counts[i] = share
        edges = outer
    else:
        lengths = [b - a for a, b in zip(edges[:-1], edges[1:])]
        counts = _split_panels(lengths, panels)

    grid = composite_gauss_grid(edges, counts, order)
    couplings = np.sqrt(coupling_weight(model, grid.points) * grid.weights)

    if gamma > 0:
        window = config.oracle_check_window * gamma
        near = grid.points[np.abs(grid.points - pole.omega_prime) <= window]
        spacing = np.mean(np.diff(near)) if len(near) > 1 else math.inf
        if spacing > gamma / 10:
            raise GridTooCoarse(f'Mode spacing {spacing:.3e} near the level exceeds γ/10 = {gamma / 10:.3e}; '
                                f'increase N (now {N})')

    hamiltonian = np.diag(np.concatenate([[model.omega0], grid.points]))
    hamiltonian[0, 1:] = couplings
    hamiltonian[1:, 0] = couplings

    logger.info(f'Discretized continuum: N = {N}, omega_max = {omega_max}, {len(edges) - 1} segments')
    return DiscreteModel(hamiltonian=hamiltonian, grid=grid, couplings=couplings, omega0=model.omega0,
                         gamma_estimate=gamma)


def recurrence_horizon(d: DiscreteModel) -> float:
    """ 2π over the widest gap between modes; past it the discrete sum stops resembling the continuum. """
    return 2 * math.pi / d.grid.max_spacing()


class OracleEvolver:
    """ Exact one-excitation dynamics of a DiscreteModel, diagonalized once and reused for any time grid. """

    def __init__(self, d: DiscreteModel, chunk_size: int = 256):
        self.d = d
        self.chunk_size = chunk_size
        self.horizon = recurrence_horizon(d)

        energies, vectors = scipy.linalg.eigh(d.hamiltonian)
        self.energies = energies
        self.weights = np.abs(vectors[0, :]) ** 2
        logger.debug(f'Oracle diagonalized: {len(energies)} levels, weight sum {self.weights.sum():.15f}')

    def survival(self, times) -> np.ndarray:
        """ A(t) = Σₖ |⟨1|Eₖ⟩|² e^{−iEₖt}. """
        times = np.asarray(times, dtype=float)
        late = times[times > self.horizon]
        if len(late):
            message = (f'{len(late)} times exceed the recurrence horizon {self.horizon:.4g}; '
                       f'the discrete result no longer tracks the continuum')
            logger.warning(message)
            warnings.warn(message, BeyondRecurrence, stacklevel=2)

        amplitude = np.empty(len(times), dtype=complex)
        for start in range(0, len(times), self.chunk_size):
            block = times[start:start + self.chunk_size]
            amplitude[start:start + len(block)] = np.exp(-1j * np.outer(block, self.energies)) @ self.weights
        return amplitude


def eigen_weights(d: DiscreteModel) -> tuple[np.ndarray, np.ndarray]:
    """ Eigenenergies and |⟨1|Eₖ⟩|²; the weights sum to one. """
    evolver = OracleEvolver(d)
    return evolver.energies, evolver.weights


def oracle_survival(d: DiscreteModel, times) -> np.ndarray:
    return OracleEvolver(d).survival(times)


def oracle_rate(d: DiscreteModel, window: tuple[float, float], samples: int = 64,
                config: Config | None = None) -> FitResult:
    """ Exponential fit of the exact |A(t)|² on the window; the fitted rate estimates 2γ. """
    times = np.linspace(window[0], window[1], samples)
    probability = np.abs(oracle_survival(d, times)) ** 2
    return fit_exponential_rate(times, probability, window, config)


def convergence_study(model: FriedrichsModel, Ns, omega_max: float, times,
                      config: Config | None = None, progress=None) -> list[tuple[int, float]]:
    """
        Max discrepancy between the discretized survival and the continuum quadrature for each N.
        `progress` wraps the N iterable, e.g. a tqdm factory from a batch script.
    """
    config = config or Config()
    times = np.asarray(times, dtype=float)
    reference = survival_amplitude(model, times, config).amplitude

    iterable = progress(Ns) if progress else Ns
    results = []
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', BeyondRecurrence)
        for N in iterable:
            d = discretize(model, N, omega_max, config)
            discrepancy = float(np.max(np.abs(oracle_survival(d, times) - reference)))
            logger.info(f'N = {N}: max discrepancy {discrepancy:.3e}')
            results.append((N, discrepancy))
    return results

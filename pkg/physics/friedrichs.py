import logging
import math
from collections import OrderedDict

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from errors import (BoundStatePresent, CouplingZero, EtaVanishedOnAxis, ModelInvalid, NonPositiveRate,
                    PoleOnWrongSheet)
from models import Config, FriedrichsModel, ResonancePole, Sheet, SurvivalSeries
from numerics.quadrature import (composite_gauss_grid, integrate, integrate_semi_infinite,
                                 principal_value)
from numerics.roots import find_complex_root, numerical_derivative
from physics.form_factors import shape_for

logger = logging.getLogger(__name__)

ETA_FLOOR = 1e-13


# Coupling weight n(ω)·λ²(ω)

def coupling_weight(model: FriedrichsModel, omega):
    shape = shape_for(model.form_factor)
    value = shape.lambda_squared(omega)
    if model.mode_density is not None:
        value = value * np.asarray(model.mode_density(omega), dtype=float)
    return value


def continued_coupling_weight(model: FriedrichsModel, z):
    shape = shape_for(model.form_factor)
    value = shape.continued_lambda_squared(z)
    if model.mode_density is not None:
        # A custom density must accept complex arguments to be continued
        value = value * np.asarray(model.mode_density(z), dtype=complex)
    return value


def support_end(model: FriedrichsModel) -> float:
    if shape_for(model.form_factor).analytic:
        return math.inf
    return model.form_factor.omega_c


def level_shift(model: FriedrichsModel, omega: float, config: Config | None = None) -> float:
    """ P∫ n(ω′)λ²(ω′)/(ω − ω′) dω′ by quadrature. """
    config = config or Config()
    weight = lambda x: coupling_weight(model, x)
    end = support_end(model)

    if omega < 0:
        raise ValueError(f'Level shift is only needed for ω ≥ 0, got {omega}')
    if omega == 0:
        # ω′ = u² removes the threshold singularity of λ²/ω′
        folded = lambda u: -2 * coupling_weight(model, u ** 2) / u
        if math.isinf(end):
            return float(integrate_semi_infinite(folded, 0.0, config.quad_tol, math.sqrt(config.omega_max), config))
        return float(integrate(folded, 0.0, math.sqrt(end), config.quad_tol, config))

    if omega >= end:
        return float(integrate(lambda x: weight(x) / (omega - x), 0.0, end, config.quad_tol, config))

    upper = min(2 * omega, end)
    value = -principal_value(weight, omega, 0.0, upper, config.quad_tol, config)
    if upper < end:
        tail = lambda x: weight(x) / (omega - x)
        if math.isinf(end):
            value += integrate_semi_infinite(tail, upper, config.quad_tol, config=config)
        else:
            value += integrate(tail, upper, end, config.quad_tol, config)
    return float(np.real(value))


def _first_sheet_quadrature(model: FriedrichsModel, z: complex, config: Config) -> complex:
    # ω = u² smooths the √ω threshold
    integrand = lambda u: 2 * u * coupling_weight(model, u ** 2) / (z - u ** 2)
    end = support_end(model)
    if math.isinf(end):
        return complex(integrate_semi_infinite(integrand, 0.0, config.quad_tol, math.sqrt(config.omega_max), config))
    return complex(integrate(integrand, 0.0, math.sqrt(end), config.quad_tol, config))


def _sigma(model: FriedrichsModel, z, sheet: Sheet, config: Config):
    shape = shape_for(model.form_factor)

    if model.mode_density is None:
        if sheet is Sheet.FIRST:
            return shape.self_energy_first(z)
        return shape.self_energy_second(z)

    z = np.asarray(z, dtype=complex)
    first = np.vectorize(lambda w: _first_sheet_quadrature(model, complex(w), config), otypes=[complex])(z)
    if sheet is Sheet.FIRST:
        return first
    return first - 2j * math.pi * continued_coupling_weight(model, z)


def _eta_second(model: FriedrichsModel, config: Config):
    """ η on the second sheet without the half-plane check, for iterating root finders. """
    def eta(z):
        if model.is_free:
            return z - model.omega0
        return complex(z - model.omega0 - _sigma(model, z, Sheet.SECOND, config))
    return eta


def self_energy(model: FriedrichsModel, z: complex, sheet: Sheet = Sheet.FIRST,
                config: Config | None = None) -> complex:
    """
        η(z) = z − ω₀ − ∫ n(ω)λ²(ω)/(z − ω) dω. On the second sheet (Im z < 0) the continuation through the cut
        from above adds 2πi·n(z)λ²(z).
    """
    config = config or Config()
    z = complex(z)
    sheet = Sheet(sheet)

    if sheet is Sheet.FIRST and z.imag == 0 and z.real >= 0:
        raise ValueError(f'z = {z} lies on the cut; use boundary_self_energy for real energies')
    if sheet is Sheet.SECOND and not z.imag < 0:
        raise ValueError(f'The second sheet is only reached for Im z < 0, got {z}')

    if model.is_free:
        # Free theory still rejects a second sheet the form factor cannot reach
        if sheet is Sheet.SECOND:
            shape_for(model.form_factor).continued_lambda_squared(z)
        return z - model.omega0

    return complex(z - model.omega0 - _sigma(model, z, sheet, config))


def boundary_self_energy(model: FriedrichsModel, omega, config: Config | None = None):
    """ η₊(ω) = η(ω + i0) = ω − ω₀ − Δ(ω) + iπn(ω)λ²(ω). Accepts arrays for the default density. """
    config = config or Config()
    omega = np.asarray(omega, dtype=float)

    if model.mode_density is None:
        sigma = shape_for(model.form_factor).self_energy_boundary(omega)
    else:
        shift = np.vectorize(lambda w: level_shift(model, float(w), config), otypes=[float])(omega)
        sigma = shift - 1j * math.pi * coupling_weight(model, omega)

    eta = omega - model.omega0 - sigma
    return complex(eta) if eta.ndim == 0 else eta


def spectral_density(model: FriedrichsModel, omega, config: Config | None = None):
    """ p(ω) = n(ω)λ²(ω)/|η₊(ω)|². Array-valued for array input. """
    if model.is_free:
        raise CouplingZero('g = 0 leaves the level unmixed; its spectral density is a delta function')

    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError('The spectral density is only defined for ω ≥ 0')

    eta = np.asarray(boundary_self_energy(model, omega, config))
    magnitude = np.abs(eta)
    if np.any(magnitude < ETA_FLOOR):
        raise EtaVanishedOnAxis(f'|η₊(ω)| fell below {ETA_FLOOR:g} on the real axis')

    with np.errstate(invalid='ignore'):
        density = np.where(np.isinf(magnitude), 0.0, coupling_weight(model, omega) / magnitude ** 2)
    return float(density) if density.ndim == 0 else density


def total_norm(model: FriedrichsModel, config: Config | None = None) -> float:
    """ ∫₀^∞ p(ω) dω, which is 1 whenever no bound state has split off. """
    config = config or Config()
    density = lambda u: 2 * u * spectral_density(model, u ** 2, config)
    end = support_end(model)
    if math.isinf(end):
        return float(integrate_semi_infinite(density, 0.0, 1e-9, math.sqrt(config.omega_max), config))
    return float(integrate(density, 0.0, math.sqrt(end), 1e-9, config))


def bound_state_threshold(model: FriedrichsModel, config: Config | None = None) -> float:
    """
        η(0⁻) = −ω₀ − Σ(0). η is increasing below threshold, so a non-negative value means a bound state
        below the continuum. The flat cutoff's logarithmic edge always binds one with weight of order
        e^{−ω₀/g²}; that case reports +inf and is not rejected.
    """
    if model.is_free:
        return -model.omega0
    if model.mode_density is None:
        sigma0 = shape_for(model.form_factor).threshold_self_energy()
    else:
        sigma0 = level_shift(model, 0.0, config)
    return -model.omega0 - sigma0


def check_no_bound_state(model: FriedrichsModel, config: Config | None = None) -> None:
    eta0 = bound_state_threshold(model, config)
    if math.isfinite(eta0) and eta0 >= 0:
        raise BoundStatePresent(f'η(0) = {eta0:.6g} ≥ 0: the coupling binds a state below threshold')


def perturbative_pole(model: FriedrichsModel, config: Config | None = None) -> ResonancePole:
    """ Second-order pole: δω = P∫ nλ²/(ω₀ − ω′) dω′ and γ = π·n(ω₀)λ²(ω₀), residue 1. """
    config = config or Config()

    if model.is_free:
        logger.info('g = 0: returning the non-decaying free level')
        return ResonancePole(omega_prime=model.omega0, gamma=0.0, residue=1.0, decaying=False)

    gamma = math.pi * float(coupling_weight(model, model.omega0))
    if gamma <= 0:
        raise ModelInvalid(f'omega0 = {model.omega0} lies outside the support of the form factor')
    if gamma >= model.omega0:
        logger.warning(f'Perturbative width {gamma:.4g} is not small against omega0 = {model.omega0}')

    shift = level_shift(model, model.omega0, config)
    logger.debug(f'Perturbative pole: shift {shift:.10g}, width {gamma:.10g}')
    return ResonancePole(omega_prime=model.omega0 + shift, gamma=gamma, residue=1.0)


def exact_pole(model: FriedrichsModel, config: Config | None = None) -> ResonancePole:
    """ Zero of η on the second sheet, seeded by the perturbative pole. """
    config = config or Config()

    if model.is_free:
        return perturbative_pole(model, config)

    shape = shape_for(model.form_factor)
    if not shape.analytic:
        shape.continued_lambda_squared(complex(model.omega0, -1.0))
    check_no_bound_state(model, config)

    seed = perturbative_pole(model, config).z
    eta = _eta_second(model, config)

    tol = config.root_tol
    if model.mode_density is not None:
        tol = max(tol, 10 * config.quad_tol)

    z0 = find_complex_root(eta, seed, tol, config.root_max_iter, config)
    if z0.imag >= 0:
        raise PoleOnWrongSheet(f'Root {z0} is not in the lower half plane')

    derivative = numerical_derivative(eta, z0, config.residue_step * abs(z0))
    residue = 1.0 / derivative

    logger.info(f'Exact pole z0 = {z0.real:.10g} {z0.imag:+.10g}i, residue {residue:.6g} (seed {seed:.6g})')
    return ResonancePole(omega_prime=z0.real, gamma=-z0.imag, residue=complex(residue))


class SurvivalQuadrature:
    """
        Evaluates A(t) = ∫ p(ω) e^{−iωt} dω on composite Gauss grids. Panels inside the peak window
        ω₀′ ± peak_halfwidth·γ are no wider than γ/panels_per_width and a phase of phase_per_panel; the rest of
        [0, omega_max] uses a higher order with up to far_phase_per_panel per panel. The first panel is graded
        geometrically towards the threshold. Widths are snapped to powers of two so grids are reused across times.
    """

    def __init__(self, model: FriedrichsModel, config: Config | None = None):
        if model.is_free:
            raise CouplingZero('Survival of a free level needs no quadrature')

        self.model = model
        self.config = config or Config()
        pole = perturbative_pole(model, self.config)
        self.center = pole.omega_prime
        self.gamma = pole.gamma

        self.peak_width = min(self.config.panel_width_max, self.gamma / self.config.panels_per_width)
        self.far_width = self.config.far_panel_width

        halfwidth = self.config.peak_halfwidth * self.gamma
        self.peak_lo = max(0.0, self.center - halfwidth)
        self.upper = min(self.config.omega_max, support_end(model))
        self.peak_hi = min(self.upper, self.center + halfwidth)

        self._cache: OrderedDict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = OrderedDict()

    @staticmethod
    def _level(width: float, t: float, phase: float) -> int:
        if t <= 0:
            return 0
        return max(0, math.ceil(math.log2(width * t / phase)))

    def levels(self, t: float) -> tuple[int, int]:
        return (self._level(self.peak_width, t, self.config.phase_per_panel),
                self._level(self.far_width, t, self.config.far_phase_per_panel))

    def _segment(self, lo: float, hi: float, width: float, order: int, graded: bool):
        count = max(1, math.ceil((hi - lo) / width))
        edges = np.linspace(lo, hi, count + 1)
        pieces = []

        if graded:
            first = edges[1]
            grading = lo + (first - lo) * 2.0 ** -np.arange(self.config.threshold_grading, -1, -1)
            pieces.append(composite_gauss_grid(np.concatenate([[lo], grading]), 1, order))
            if count > 1:
                pieces.append(composite_gauss_grid([first, hi], count - 1, order))
        else:
            pieces.append(composite_gauss_grid([lo, hi], count, order))

        return pieces

    def grid(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """ Nodes and weight·p(node) for the grid serving time t. """
        key = self.levels(t)
        if key in self._cache:
            self._cache.move_to_end(key)
            return self._cache[key]

        peak_width = self.peak_width / 2 ** key[0]
        far_width = self.far_width / 2 ** key[1]
        config = self.config

        pieces = []
        if self.peak_lo > 0:
            pieces += self._segment(0.0, self.peak_lo, far_width, config.far_order, graded=True)
        pieces += self._segment(self.peak_lo, self.peak_hi, peak_width, config.survival_order,
                                graded=self.peak_lo == 0)
        if self.peak_hi < self.upper:
            pieces += self._segment(self.peak_hi, self.upper, far_width, config.far_order, graded=False)

        points = np.concatenate([piece.points for piece in pieces])
        weights = np.concatenate([piece.weights for piece in pieces])
        weighted = weights * spectral_density(self.model, points, config)

        logger.debug(f'Survival grid {key}: {len(points)} nodes')
        self._cache[key] = (points, weighted)
        if len(self._cache) > config.grid_cache_size:
            self._cache.popitem(last=False)
        return points, weighted

    def amplitude(self, t: float) -> complex:
        points, weighted = self.grid(t)
        phase = points * t
        # p is real, so the transform splits into two real sums
        return complex(np.dot(weighted, np.cos(phase)), -np.dot(weighted, np.sin(phase)))


def survival_amplitude(model: FriedrichsModel, times, config: Config | None = None) -> SurvivalSeries:
    """
        A(t) = ∫ p(ω) e^{−iωt} dω under the full Hermitian Hamiltonian. The series is returned unsplit:
        pole_part is zero and background_part equals the amplitude; see pole_background_split.
    """
    config = config or Config()
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError('Survival times must be non-negative')

    if model.is_free:
        amplitude = np.exp(-1j * model.omega0 * times)
    else:
        check_no_bound_state(model, config)
        quadrature = SurvivalQuadrature(model, config)
        amplitude = np.array([quadrature.amplitude(t) for t in times], dtype=complex)

    return SurvivalSeries(times=times, amplitude=amplitude, pole_part=np.zeros_like(amplitude),
                          background_part=amplitude.copy())


def pole_background_split(model: FriedrichsModel, times, config: Config | None = None,
                          pole: ResonancePole | None = None) -> SurvivalSeries:
    """ Splits A(t) into residue·e^{−iz₀t} and the non-exponential remainder. """
    config = config or Config()
    pole = pole or exact_pole(model, config)
    series = survival_amplitude(model, times, config)

    pole_part = pole.residue * np.exp(-1j * pole.z * series.times)
    return SurvivalSeries(times=series.times, amplitude=series.amplitude, pole_part=pole_part,
                          background_part=series.amplitude - pole_part)


def characteristic_times(gamma0: float) -> tuple[float, float, float, float]:
    """
        Decay times of the four terms of the one-pole survival probability when the pole is written
        z₀ = ω₀ − (i/2)γ₀: the exponential term, the two pole-background cross terms, and the background,
        which decays as a power law and gets an infinite marker.
    """
    if not gamma0 > 0:
        raise NonPositiveRate(f'gamma0 must be positive, got {gamma0}')
    return 1.0 / gamma0, 2.0 / gamma0, 2.0 / gamma0, math.inf


def relaxation_time(pole: ResonancePole) -> float:
    """ t_R = 1/γ; infinite for a non-decaying level. """
    return pole.lifetime

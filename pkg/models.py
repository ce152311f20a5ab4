import math
from dataclasses import dataclass, field
from enum import Enum, unique
from typing import TYPE_CHECKING, Callable

import numpy as np

from errors import ModelInvalid

if TYPE_CHECKING:
    from scenarios.all_scenarios import Scenarios


# Numerical plumbing

@dataclass(frozen=True, eq=False)
class Grid1D:
    """ Quadrature nodes and weights on the real energy axis. """
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        weights = np.asarray(self.weights, dtype=float)

        if points.shape != weights.shape or points.ndim != 1:
            raise ModelInvalid('Grid1D points and weights must be 1-D arrays of equal length')
        if len(points) > 1 and np.any(np.diff(points) <= 0):
            raise ModelInvalid('Grid1D points must be strictly increasing')
        if np.any(weights <= 0):
            raise ModelInvalid('Grid1D weights must be strictly positive')

        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'weights', weights)

    def __len__(self) -> int:
        return len(self.points)

    def max_spacing(self, lo: float = -math.inf, hi: float = math.inf) -> float:
        """ Largest gap between consecutive nodes that lie inside [lo, hi]. """
        inside = self.points[(self.points >= lo) & (self.points <= hi)]
        if len(inside) < 2:
            return math.inf
        return float(np.max(np.diff(inside)))


@dataclass(frozen=True)
class FitResult:
    rate_or_exponent: float
    intercept: float
    residual: float
    window: tuple[float, float]

    def __post_init__(self):
        if not self.window[0] < self.window[1]:
            raise ModelInvalid(f'Fit window must satisfy t_min < t_max, got {self.window}')
        if not math.isfinite(self.residual) or self.residual < 0:
            raise ModelInvalid(f'Fit residual must be finite and non-negative, got {self.residual}')


# Friedrichs model

@unique
class FormFactorFamily(Enum):
    """
        Coupling shapes λ(ω) the model ships with. THRESHOLD_LORENTZIAN has a √ω threshold in λ² and
        continues analytically into the lower half plane; FLAT_CUTOFF is constant up to ω_c and has no
        second sheet.
    """
    THRESHOLD_LORENTZIAN = 'threshold_lorentzian'
    FLAT_CUTOFF = 'flat_cutoff'


@unique
class Sheet(Enum):
    FIRST = 'first'
    SECOND = 'second'


@dataclass(frozen=True)
class FormFactor:
    family: FormFactorFamily = FormFactorFamily.THRESHOLD_LORENTZIAN
    g: float = 0.1
    omega_c: float = 10.0

    def __post_init__(self):
        if isinstance(self.family, str):
            object.__setattr__(self, 'family', FormFactorFamily(self.family))
        if self.g < 0:
            raise ModelInvalid(f'Coupling g must be non-negative, got {self.g}')
        if self.omega_c <= 0:
            raise ModelInvalid(f'Cutoff omega_c must be positive, got {self.omega_c}')


@dataclass(frozen=True)
class FriedrichsModel:
    omega0: float
    form_factor: FormFactor = field(default_factory=FormFactor)
    mode_density: Callable | None = None  # None means n(ω) = 1

    def __post_init__(self):
        if self.omega0 <= 0:
            raise ModelInvalid(f'Bare level omega0 must lie inside the continuum (> 0), got {self.omega0}')

    @property
    def g(self) -> float:
        return self.form_factor.g

    @property
    def is_free(self) -> bool:
        return self.form_factor.g == 0


@dataclass(frozen=True)
class ResonancePole:
    """ z₀ = ω₀′ − iγ with its residue. A non-decaying result (g = 0) carries decaying=False and γ = 0. """
    omega_prime: float
    gamma: float
    residue: complex = 1.0
    decaying: bool = True

    def __post_init__(self):
        if self.decaying and not self.gamma > 0:
            raise ModelInvalid(f'A decaying pole needs gamma > 0, got {self.gamma}')
        if not self.decaying and self.gamma != 0:
            raise ModelInvalid('A non-decaying pole must have gamma = 0')

    @property
    def z(self) -> complex:
        return complex(self.omega_prime, -self.gamma)

    @property
    def lifetime(self) -> float:
        return 1.0 / self.gamma if self.gamma > 0 else math.inf


@dataclass(frozen=True, eq=False)
class SurvivalSeries:
    times: np.ndarray
    amplitude: np.ndarray
    pole_part: np.ndarray
    background_part: np.ndarray

    @property
    def probability(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2


@dataclass(frozen=True, eq=False)
class DiscreteModel:
    """ Row/column 0 is the discrete level, rows 1..N the continuum modes. """
    hamiltonian: np.ndarray
    grid: Grid1D
    couplings: np.ndarray
    omega0: float
    gamma_estimate: float = 0.0

    @property
    def size(self) -> int:
        return len(self.grid)


# Mode sums

@dataclass(frozen=True)
class Mode:
    """ One decaying mode c·e^{−iωt}·e^{−γt}. """
    c: complex
    omega: float
    gamma: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ModelInvalid(f'Mode decay rate must be non-negative, got {self.gamma}')
        if not np.isfinite(complex(self.c)):
            raise ModelInvalid('Mode amplitude must be finite')
        object.__setattr__(self, 'c', complex(self.c))


@dataclass(frozen=True)
class ModeSum:
    """
        Equilibrium value plus a list of decaying modes, kept sorted by decay rate. An empty mode list
        only appears as the fast half of a partition where every mode was slow.
    """
    equilibrium: complex = 0j
    modes: tuple[Mode, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'equilibrium', complex(self.equilibrium))
        object.__setattr__(self, 'modes', tuple(sorted(self.modes, key=lambda m: m.gamma)))

    def __len__(self) -> int:
        return len(self.modes)

    @property
    def weights(self) -> np.ndarray:
        return np.array([m.c for m in self.modes], dtype=complex)

    @property
    def gammas(self) -> np.ndarray:
        return np.array([m.gamma for m in self.modes], dtype=float)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([m.omega for m in self.modes], dtype=float)


@dataclass(frozen=True)
class TimescaleReport:
    t_R: float
    gamma_eff: float
    t_D: float
    slow_count: int
    fast_count: int

    @property
    def probability_rate(self) -> float:
        return 2.0 * self.gamma_eff


# Lee-Friedrichs example

@dataclass(frozen=True)
class CoherentAmplitude:
    alpha: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, 'alpha', complex(self.alpha))
        if not np.isfinite(self.alpha):
            raise ModelInvalid('Coherent amplitude must be finite')

    @property
    def mean_photon_number(self) -> float:
        return abs(self.alpha) ** 2

    def default_cutoff(self, sigmas: float = 10.0) -> int:
        """ Fock cutoff that leaves a Poisson tail of more than `sigmas` standard deviations. """
        mean = self.mean_photon_number
        return int(math.ceil(mean + sigmas * math.sqrt(mean + 1.0)))


@dataclass(frozen=True)
class SuperpositionState:
    """
        a|α₁(0)⟩ + b|α₂(0)⟩. The weights are normalized at construction so |a|² + |b|² = 1.
        The default convention puts α₁(0) = 0 and α₂(0) = √(mω/2)·L₀ on the positive real axis.
    """
    a: complex
    b: complex
    alpha1: CoherentAmplitude = field(default_factory=CoherentAmplitude)
    alpha2: CoherentAmplitude = field(default_factory=CoherentAmplitude)
    mass_m: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        if norm == 0:
            raise ModelInvalid('Superposition weights a and b cannot both vanish')
        if self.mass_m <= 0 or self.omega <= 0:
            raise ModelInvalid('mass_m and omega must be positive')

        object.__setattr__(self, 'a', a / norm)
        object.__setattr__(self, 'b', b / norm)
        for name in ('alpha1', 'alpha2'):
            value = getattr(self, name)
            if not isinstance(value, CoherentAmplitude):
                object.__setattr__(self, name, CoherentAmplitude(value))

    @classmethod
    def from_separation(cls, a: complex, b: complex, mass_m: float, omega: float,
                        L0: float) -> 'SuperpositionState':
        if L0 < 0:
            raise ModelInvalid(f'Separation L0 must be non-negative, got {L0}')
        alpha2 = math.sqrt(mass_m * omega / 2.0) * L0
        return cls(a=a, b=b, alpha1=CoherentAmplitude(0j), alpha2=CoherentAmplitude(alpha2),
                   mass_m=mass_m, omega=omega)

    @property
    def L0(self) -> float:
        return abs(self.alpha2.alpha - self.alpha1.alpha) * math.sqrt(2.0 / (self.mass_m * self.omega))

    @property
    def alphas(self) -> tuple[complex, complex]:
        return self.alpha1.alpha, self.alpha2.alpha

    @property
    def weights(self) -> np.ndarray:
        """ The 2x2 dyad weights [[|a|², ab*], [a*b, |b|²]]. """
        amps = np.array([self.a, self.b])
        return np.outer(amps, amps.conj())


@dataclass(frozen=True)
class EffectiveModel:
    """ H_eff = z₀N₀, so level n evolves with z_n = n·z₀. """
    z0: complex

    def __post_init__(self):
        object.__setattr__(self, 'z0', complex(self.z0))
        if not self.z0.imag < 0:
            raise ModelInvalid(f'Effective pole must lie in the lower half plane, got {self.z0}')

    @classmethod
    def from_pole(cls, pole: ResonancePole) -> 'EffectiveModel':
        return cls(pole.z)

    @property
    def omega0_prime(self) -> float:
        return self.z0.real

    @property
    def gamma0(self) -> float:
        return -self.z0.imag

    def z_n(self, n) -> complex:
        return n * self.z0


@dataclass(frozen=True, eq=False)
class ReducedDensity:
    """
        Density operator Σ |f_i⟩ C_ij ⟨f_j| in the frame {|α₁(0)⟩, |α₂(0)⟩} with Gram matrix S.
        `coeffs` are normalized so Tr(C·S) = 1; `projected_trace` is that trace before normalization and
        `trace_raw` the full-space trace of the non-Hermitian evolution.
    """
    coeffs: np.ndarray
    gram: np.ndarray
    trace_raw: float
    projected_trace: float = 1.0

    def frame_elements(self) -> np.ndarray:
        """ Unnormalized ⟨f_i|ρ|f_j⟩. """
        return self.gram @ self.coeffs @ self.gram * self.projected_trace


@dataclass(frozen=True, eq=False)
class BasisReport:
    times: np.ndarray
    eigen_overlap: np.ndarray
    offdiag_mod: np.ndarray
    linear_entropy: np.ndarray
    preferred_linear_entropy: np.ndarray

    def quartile_means(self) -> tuple[float, float]:
        """ Mean overlap over the first and last quarter of the time grid. """
        quarter = max(1, len(self.times) // 4)
        return float(np.mean(self.eigen_overlap[:quarter])), float(np.mean(self.eigen_overlap[-quarter:]))


# Configuration

@dataclass
class Config:
    # File paths
    log_dir: str = 'logs'
    output_dir: str = 'results'

    # Adaptive quadrature
    quad_tol: float = 1e-10
    quad_order: int = 10
    quad_max_depth: int = 50
    quad_max_panels: int = 200000

    # Continuum survival grids
    omega_max: float = 100.0
    peak_halfwidth: float = 15.0  # in units of γ
    survival_order: int = 8
    panel_width_max: float = 0.05
    panels_per_width: float = 4.0  # panels per pole width γ
    phase_per_panel: float = math.pi / 4
    far_order: int = 16
    far_panel_width: float = 0.25
    far_phase_per_panel: float = 2 * math.pi
    threshold_grading: int = 40
    grid_cache_size: int = 8

    # Root finding
    root_tol: float = 1e-12
    root_max_iter: int = 100
    newton_step: float = 1e-7
    residue_step: float = 1e-6

    # Oracle discretization
    oracle_order: int = 10
    oracle_peak_halfwidth: float = 8.0  # in units of γ
    oracle_peak_fraction: float = 0.4
    oracle_check_window: float = 1.0  # spacing is measured within ω₀′ ± this·γ
    oracle_min_modes: int = 100

    # Fitting
    min_fit_samples: int = 8

    # Fock truncation
    fock_sigmas: float = 10.0

    def override(self, values: dict) -> 'Config':
        """ Returns a copy with the given fields replaced. Unknown keys raise KeyError. """
        unknown = [key for key in values if key not in self.__dataclass_fields__]
        if unknown:
            raise KeyError(unknown[0])
        merged = {**self.__dict__, **values}
        return Config(**merged)


# Scenario files

@unique
class Spacing(Enum):
    LINEAR = 'linear'
    LOG = 'log'


@dataclass(frozen=True)
class TimeGrid:
    t_start: float = 0.0
    t_end: float = 10.0
    samples: int = 101
    spacing: Spacing = Spacing.LINEAR
    scale: str = 'absolute'  # 'absolute' or 'lifetime' (multiplied by the scenario's 1/γ)

    def values(self, unit: float = 1.0) -> np.ndarray:
        factor = unit if self.scale == 'lifetime' else 1.0
        if self.spacing is Spacing.LOG:
            grid = np.geomspace(self.t_start, self.t_end, self.samples)
        else:
            grid = np.linspace(self.t_start, self.t_end, self.samples)
        return grid * factor


@dataclass(frozen=True)
class ModelParams:
    omega0: float
    g: float
    omega_c: float = 10.0
    family: FormFactorFamily = FormFactorFamily.THRESHOLD_LORENTZIAN
    N: int = 2000
    omega_max: float = 50.0

    def to_model(self) -> FriedrichsModel:
        return FriedrichsModel(omega0=self.omega0,
                               form_factor=FormFactor(family=self.family, g=self.g, omega_c=self.omega_c))


@dataclass(frozen=True)
class StateParams:
    a: complex = 1 / math.sqrt(2)
    b: complex = 1 / math.sqrt(2)
    mass_omega: float | None = None
    L0: float | None = None
    alpha2: float | None = None

    def to_state(self) -> SuperpositionState:
        if self.alpha2 is not None:
            return SuperpositionState(a=self.a, b=self.b, alpha1=CoherentAmplitude(0j),
                                      alpha2=CoherentAmplitude(self.alpha2))
        # mω enters only as a product, so the oscillator frequency is pinned to 1
        return SuperpositionState.from_separation(self.a, self.b, mass_m=self.mass_omega, omega=1.0, L0=self.L0)


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: 'Scenarios'
    time: TimeGrid = field(default_factory=TimeGrid)
    model: ModelParams | None = None
    state: StateParams | None = None
    effective: complex | None = None
    modes: tuple[Mode, ...] = ()
    equilibrium: complex = 0j
    fits: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    n_max: int | None = None
    output_dir: str | None = None
    numerics: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


@dataclass
class ScenarioContext:
    """ What every scenario is handed: the validated scenario file and the numerical settings it resolved to. """
    config: Config
    settings: ScenarioConfig


@dataclass
class RunReport:
    scenario: str
    echo: dict
    quantities: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def add_check(self, key: str, value: float, target: float, tolerance: float, relative: bool = False) -> bool:
        """ Records a pass/fail entry. Only called when the caller asked for the tolerance `key`. """
        error = abs(value - target)
        if relative:
            error = error / abs(target) if target != 0 else math.inf
        passed = bool(error <= tolerance)
        self.checks[key] = {
            'value': value, 'target': target, 'tolerance': tolerance,
            'relative': relative, 'error': error, 'passed': passed
        }
        return passed

    @property
    def passed(self) -> bool:
        return all(check['passed'] for check in self.checks.values())

    def to_dict(self) -> dict:
        return {
            'scenario': self.scenario,
            'echo': self.echo,
            'quantities': self.quantities,
            'checks': self.checks,
            'passed': self.passed if self.checks else None,
            'wall_time': self.wall_time
        }

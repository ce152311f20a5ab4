import logging
import math

import numpy as np
import scipy.linalg
from scipy.special import gammaln
from scipy.stats import poisson

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from errors import ConventionViolation, GramSingular, NoSuperposition, TruncationTooSmall
from models import (BasisReport, CoherentAmplitude, Config, EffectiveModel, Mode, ModeSum, ReducedDensity,
                    SuperpositionState)
from numerics.linalg import GRAM_MIN_EIGENVALUE, generalized_eigen, hermitian_eigen
from physics.multipole import evaluate_f, gamma_eff

logger = logging.getLogger(__name__)


# Coherent states in a truncated Fock space

def overlap(alpha: complex, beta: complex) -> complex:
    """ ⟨α|β⟩ = exp(−(|α|² + |β|²)/2 + ᾱβ). """
    alpha, beta = complex(alpha), complex(beta)
    return complex(np.exp(-(abs(alpha) ** 2 + abs(beta) ** 2) / 2 + alpha.conjugate() * beta))


def default_cutoff(alpha: complex, config: Config | None = None) -> int:
    config = config or Config()
    return CoherentAmplitude(alpha).default_cutoff(config.fock_sigmas)


def check_cutoff(alphas, n_max: int, config: Config | None = None) -> None:
    needed = max(default_cutoff(alpha, config) for alpha in alphas)
    if n_max < needed:
        raise TruncationTooSmall(f'n_max = {n_max} is below the Poisson-tail cutoff {needed}')


def coherent_fock(alpha: complex, n_max: int) -> np.ndarray:
    """ Coefficients e^{−|α|²/2} αⁿ/√n! for n = 0..n_max, built in log space. """
    alpha = complex(alpha)
    n = np.arange(n_max + 1)
    if alpha == 0:
        vector = np.zeros(n_max + 1, dtype=complex)
        vector[0] = 1.0
        return vector

    log_magnitude = -abs(alpha) ** 2 / 2 + n * math.log(abs(alpha)) - gammaln(n + 1) / 2
    return np.exp(log_magnitude + 1j * n * np.angle(alpha))


def fock_propagate(vector: np.ndarray, z0: complex, t: float) -> np.ndarray:
    """ Applies e^{−iH_eff t} with H_eff = z₀N: level n picks up e^{−inz₀t}. """
    n = np.arange(len(vector))
    return vector * np.exp(-1j * n * complex(z0) * t)


def fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """ |⟨u|v⟩|² / (‖u‖²‖v‖²). """
    return float(abs(np.vdot(u, v)) ** 2 / (np.vdot(u, u).real * np.vdot(v, v).real))


def evolve_coherent(alpha0: complex, em: EffectiveModel, t: float) -> tuple[complex, float]:
    """
        e^{−iH_eff t}|α₀⟩ is the coherent state |α₀e^{−iz₀t}⟩ scaled by exp(log_norm), with
        log_norm = (|α_t|² − |α₀|²)/2 ≤ 0.
    """
    if t < 0:
        raise ValueError(f'Evolution time must be non-negative, got {t}')
    alpha_t = complex(alpha0) * np.exp(-1j * em.z0 * t)
    log_norm = (abs(alpha_t) ** 2 - abs(alpha0) ** 2) / 2
    return complex(alpha_t), float(log_norm)


# Off-diagonal decay

def _separation_squared(state: SuperpositionState) -> float:
    return abs(state.alpha2.alpha - state.alpha1.alpha) ** 2


def _require_vacuum_origin(state: SuperpositionState) -> None:
    if state.alpha1.alpha != 0:
        raise ConventionViolation(f'The closed form assumes α₁(0) = 0, got {state.alpha1.alpha}')


def offdiagonal_closed(state: SuperpositionState, em: EffectiveModel, t):
    """ ρ₁₂(t) ≅ ab*·exp(−|α₂|²(1 − e^{iz₀*t})). Vectorized over t. """
    _require_vacuum_origin(state)
    t = np.asarray(t, dtype=float)
    mean = state.alpha2.mean_photon_number
    value = state.a * state.b.conjugate() * np.exp(-mean * (1 - np.exp(1j * em.z0.conjugate() * t)))
    return complex(value) if t.ndim == 0 else value


def offdiagonal_modes(state: SuperpositionState, em: EffectiveModel, n_max: int,
                      config: Config | None = None) -> ModeSum:
    """
        The Poisson expansion of ρ₁₂: term n carries ab*·P(n; |α₂|²), oscillates with e^{inω₀′t} and decays at
        nγ₀. The n = 0 term never decays and stays in the list as a mode.
    """
    _require_vacuum_origin(state)
    check_cutoff([state.alpha2.alpha], n_max, config)

    n = np.arange(n_max + 1)
    weights = state.a * state.b.conjugate() * poisson.pmf(n, state.alpha2.mean_photon_number)
    modes = tuple(Mode(c=c, omega=-k * em.omega0_prime, gamma=k * em.gamma0) for k, c in zip(n, weights))
    return ModeSum(0j, modes)


def offdiagonal_series(state: SuperpositionState, em: EffectiveModel, t, n_max: int,
                       config: Config | None = None):
    return evaluate_f(offdiagonal_modes(state, em, n_max, config), t)


def gamma_eff_lf(state: SuperpositionState, em: EffectiveModel) -> float:
    """ Poisson mean of γₙ = nγ₀, i.e. γ₀·|α₂ − α₁|². Amplitude-level rate; |ρ₁₂|² decays at twice this. """
    return em.gamma0 * _separation_squared(state)


def gamma_eff_series(state: SuperpositionState, em: EffectiveModel, n_max: int,
                     config: Config | None = None) -> float:
    """ The same rate read off the truncated Poisson modes through the general mode-sum formula. """
    return gamma_eff(offdiagonal_modes(state, em, n_max, config))


def decoherence_time_lf(state: SuperpositionState, em: EffectiveModel) -> tuple[float, float]:
    """
        Returns (t_D, t_R) with t_R = 1/γ₀ and t_D = 1/(γ₀|α₂|²). Since |α₂|² = mωL₀²/2 this is
        t_D = 2/(mωL₀²)·t_R.
    """
    if state.L0 == 0:
        raise NoSuperposition('L0 = 0: both branches are the same coherent state')
    t_R = 1.0 / em.gamma0
    return 1.0 / gamma_eff_lf(state, em), t_R


def omnes_decoherence_estimate(state: SuperpositionState, em: EffectiveModel) -> float:
    """ The order-of-magnitude estimate t_R/(mωL₀²); the exact t_D is twice this. """
    if state.L0 == 0:
        raise NoSuperposition('L0 = 0: both branches are the same coherent state')
    return (1.0 / em.gamma0) / (state.mass_m * state.omega * state.L0 ** 2)


# Densities in the {|α₁(0)⟩, |α₂(0)⟩} frame

def gram_matrix(state: SuperpositionState) -> np.ndarray:
    alphas = state.alphas
    return np.array([[overlap(alpha, beta) for beta in alphas] for alpha in alphas])


def _frame(state: SuperpositionState, n_max: int) -> np.ndarray:
    return np.column_stack([coherent_fock(alpha, n_max) for alpha in state.alphas])


def _branches(state: SuperpositionState, em: EffectiveModel, t: float, n_max: int) -> list[np.ndarray]:
    """ Unnormalized e^{−iH_eff t}|αᵢ(0)⟩ in the Fock basis. """
    return [fock_propagate(coherent_fock(alpha, n_max), em.z0, t) for alpha in state.alphas]


def _project(state: SuperpositionState, frame_elements: np.ndarray, trace_raw: float) -> ReducedDensity:
    """ Coefficients C with Σ|fᵢ⟩Cᵢⱼ⟨fⱼ| sharing the frame matrix elements M = S·C·S. """
    gram = gram_matrix(state)
    if scipy.linalg.eigvalsh(gram)[0] <= GRAM_MIN_EIGENVALUE:
        raise GramSingular('The two coherent amplitudes coincide; the frame has no second direction')

    inverse = scipy.linalg.inv(gram)
    coeffs = inverse @ frame_elements @ inverse
    coeffs = 0.5 * (coeffs + coeffs.conj().T)
    projected_trace = float(np.real(np.trace(coeffs @ gram)))

    return ReducedDensity(coeffs=coeffs / projected_trace, gram=gram, trace_raw=trace_raw,
                          projected_trace=projected_trace)


def _resolve_cutoff(state: SuperpositionState, n_max: int | None, config: Config | None) -> int:
    if n_max is None:
        return max(default_cutoff(alpha, config) for alpha in state.alphas)
    check_cutoff(state.alphas, n_max, config)
    return n_max


def reduced_density(state: SuperpositionState, em: EffectiveModel, t: float, n_max: int | None = None,
                    config: Config | None = None) -> ReducedDensity:
    """
        Evolves a|α₁(0)⟩ + b|α₂(0)⟩ under H_eff in a truncated Fock space and expresses |ψ(t)⟩⟨ψ(t)| in the
        initial coherent frame. trace_raw is ⟨ψ(t)|ψ(t)⟩; the coefficients are normalized to unit trace.
    """
    if t < 0:
        raise ValueError(f'Evolution time must be non-negative, got {t}')
    n_max = _resolve_cutoff(state, n_max, config)

    first, second = _branches(state, em, t, n_max)
    psi = state.a * first + state.b * second
    projection = _frame(state, n_max).conj().T @ psi

    return _project(state, np.outer(projection, projection.conj()), float(np.vdot(psi, psi).real))


def preferred_density(state: SuperpositionState, em: EffectiveModel, t: float, n_max: int | None = None,
                      config: Config | None = None) -> ReducedDensity:
    """ ρ_P(t) = |a|²|α₁(t)⟩⟨α₁(t)| + |b|²|α₂(t)⟩⟨α₂(t)|: the evolved state with the cross dyads dropped. """
    if t < 0:
        raise ValueError(f'Evolution time must be non-negative, got {t}')
    n_max = _resolve_cutoff(state, n_max, config)

    frame = _frame(state, n_max)
    elements = np.zeros((2, 2), dtype=complex)
    trace_raw = 0.0
    for weight, branch in zip((abs(state.a) ** 2, abs(state.b) ** 2), _branches(state, em, t, n_max)):
        projection = frame.conj().T @ branch
        elements += weight * np.outer(projection, projection.conj())
        trace_raw += weight * float(np.vdot(branch, branch).real)

    return _project(state, elements, trace_raw)


def moving_basis(rd: ReducedDensity, quasi_orthogonal: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """
        Eigenvalues (descending) and eigenvectors, in frame coordinates, of the density Σ|fᵢ⟩Cᵢⱼ⟨fⱼ|. The exact
        problem is (S·C·S)x = λ·S·x with S-orthonormal x; quasi_orthogonal=True takes S = 1 and diagonalizes C.
    """
    if quasi_orthogonal:
        return hermitian_eigen(rd.coeffs)
    return generalized_eigen(rd.gram @ rd.coeffs @ rd.gram, rd.gram)


def linear_entropy(rd: ReducedDensity) -> float:
    """ 1 − Tr((C·S)²); zero for a pure state. """
    product = rd.coeffs @ rd.gram
    return float(1.0 - np.real(np.trace(product @ product)))


def _preferred_vectors(rd_p: ReducedDensity) -> np.ndarray:
    """
        Columns to compare against: the dominant eigenvector of ρ_P, or both frame vectors when its eigenvalues are
        degenerate within the Gram splitting and no eigenvector is singled out.
    """
    values, vectors = moving_basis(rd_p)
    if values[0] - values[1] <= 2 * abs(rd_p.gram[0, 1]) + 1e-12:
        return np.eye(2, dtype=complex)
    return vectors[:, :1]


def basis_convergence(state: SuperpositionState, em: EffectiveModel, times, n_max: int | None = None,
                      config: Config | None = None) -> BasisReport:
    """
        At each time, the squared S-overlap between the dominant eigenvectors of ρ(t) and ρ_P(t) (the best frame
        vector while ρ_P is degenerate), plus |C₁₂| and the linear entropies of both densities.
    """
    times = np.asarray(times, dtype=float)
    n_max = _resolve_cutoff(state, n_max, config)

    overlaps, offdiag, entropy, preferred_entropy = [], [], [], []
    for t in times:
        rd = reduced_density(state, em, t, n_max, config)
        rd_p = preferred_density(state, em, t, n_max, config)

        _, vectors = moving_basis(rd)
        dominant = vectors[:, 0]
        candidates = _preferred_vectors(rd_p)
        best = max(abs(np.vdot(dominant, rd.gram @ candidates[:, k])) ** 2 for k in range(candidates.shape[1]))

        overlaps.append(min(1.0, float(best)))
        offdiag.append(float(abs(rd.coeffs[0, 1])))
        entropy.append(linear_entropy(rd))
        preferred_entropy.append(linear_entropy(rd_p))

    logger.info(f'Basis convergence over {len(times)} times: overlap {overlaps[0]:.4f} -> {overlaps[-1]:.4f}')
    return BasisReport(times=times, eigen_overlap=np.array(overlaps), offdiag_mod=np.array(offdiag),
                       linear_entropy=np.array(entropy), preferred_linear_entropy=np.array(preferred_entropy))

import math

import numpy as np
import pytest

from errors import ConventionViolation, GramSingular, ModelInvalid, NoSuperposition, TruncationTooSmall
from models import CoherentAmplitude, EffectiveModel, SuperpositionState
from numerics.fitting import fit_exponential_rate
from physics.lee_friedrichs import (basis_convergence, check_cutoff, coherent_fock, decoherence_time_lf,
                                    default_cutoff, evolve_coherent, fidelity, fock_propagate, gamma_eff_lf,
                                    gamma_eff_series, gram_matrix, linear_entropy, moving_basis,
                                    offdiagonal_closed, offdiagonal_modes, offdiagonal_series,
                                    omnes_decoherence_estimate, overlap, preferred_density, reduced_density)

HALF = 1 / math.sqrt(2)


def superposition(alpha2: float, a: complex = HALF, b: complex = HALF) -> SuperpositionState:
    return SuperpositionState(a=a, b=b, alpha1=CoherentAmplitude(0j), alpha2=CoherentAmplitude(alpha2))


@pytest.fixture
def em():
    return EffectiveModel(1.0 - 0.1j)


@pytest.fixture
def resting():
    return EffectiveModel(-0.1j)


class TestCoherentStates:
    def test_overlap_with_itself(self):
        assert overlap(1 + 2j, 1 + 2j) == pytest.approx(1.0)

    def test_overlap_of_separated_states(self):
        assert overlap(0, 4) == pytest.approx(math.exp(-8))
        assert overlap(0, 4) == pytest.approx(3.3546e-4, abs=1e-8)
        assert abs(overlap(-2, 2.5)) < 5e-4

    def test_overlap_matches_fock_sum(self):
        for alpha, beta in ((0, 4), (1 + 1j, -0.5 + 2j)):
            fock = np.vdot(coherent_fock(alpha, 80), coherent_fock(beta, 80))
            assert abs(overlap(alpha, beta) - fock) < 1e-12

    def test_overlap_is_bounded(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            alpha, beta = rng.normal(size=2) + 1j * rng.normal(size=2)
            assert abs(overlap(alpha, beta)) <= 1.0 + 1e-15

    def test_fock_vector_is_normalized(self):
        vector = coherent_fock(3.0, 60)
        assert np.vdot(vector, vector).real == pytest.approx(1.0, abs=1e-12)

    def test_vacuum(self):
        vector = coherent_fock(0, 5)
        assert vector[0] == 1
        assert np.count_nonzero(vector) == 1

    def test_default_cutoff(self):
        assert default_cutoff(3.0) == 41
        assert CoherentAmplitude(0).default_cutoff() == 10

    def test_truncation_too_small(self):
        with pytest.raises(TruncationTooSmall):
            check_cutoff([0, 3.0], 20)


class TestEvolution:
    def test_start(self, em):
        assert evolve_coherent(2.0, em, 0.0) == (2.0, 0.0)

    def test_rotation_without_damping(self):
        alpha_t, log_norm = evolve_coherent(1.5, EffectiveModel(2.0 - 1e-14j), 3.0)
        assert abs(alpha_t) == pytest.approx(1.5)
        assert log_norm == pytest.approx(0.0, abs=1e-12)

    def test_damped_rotation(self, em):
        alpha_t, log_norm = evolve_coherent(2.0, em, 1.0)
        assert alpha_t == pytest.approx(2 * np.exp(-1j) * math.exp(-0.1))
        assert log_norm == pytest.approx((abs(alpha_t) ** 2 - 4) / 2)

    def test_matches_fock_propagation(self, em):
        alpha_t, log_norm = evolve_coherent(2.0, em, 1.0)
        propagated = fock_propagate(coherent_fock(2.0, 60), em.z0, 1.0)
        assert np.allclose(propagated, math.exp(log_norm) * coherent_fock(alpha_t, 60), atol=1e-10)

    def test_stays_coherent(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            alpha = complex(*rng.uniform(-2, 2, size=2))
            z0 = complex(rng.uniform(-2, 2), -rng.uniform(0.01, 0.5))
            t = rng.uniform(0, 5)
            alpha_t, _ = evolve_coherent(alpha, EffectiveModel(z0), t)
            propagated = fock_propagate(coherent_fock(alpha, 60), z0, t)
            assert fidelity(propagated, coherent_fock(alpha_t, 60)) >= 1 - 1e-10

    def test_negative_time(self, em):
        with pytest.raises(ValueError):
            evolve_coherent(1.0, em, -1.0)

    def test_effective_model_needs_decay(self):
        with pytest.raises(ModelInvalid):
            EffectiveModel(1.0 + 0.1j)
        assert EffectiveModel(1.0 - 0.1j).z_n(3) == pytest.approx(3.0 - 0.3j)


class TestOffDiagonal:
    def test_initial_value(self, em):
        state = superposition(3.0)
        assert offdiagonal_closed(state, em, 0.0) == pytest.approx(0.5)

    def test_late_limit(self, em):
        state = superposition(3.0)
        late = offdiagonal_closed(state, em, 50 / em.gamma0)
        assert late == pytest.approx(0.5 * math.exp(-9), rel=1e-9)

    def test_closed_matches_series(self, em):
        state = superposition(3.0)
        t = np.linspace(0, 10 / em.gamma0, 201)
        gap = np.abs(offdiagonal_closed(state, em, t) - offdiagonal_series(state, em, t, 120))
        assert gap.max() <= 1e-8

    def test_closed_matches_series_for_wide_separation(self, resting):
        state = superposition(4.0, a=0.6, b=0.8j)
        t = np.linspace(0, 10 / resting.gamma0, 101)
        gap = np.abs(offdiagonal_closed(state, resting, t) - offdiagonal_series(state, resting, t, 120))
        assert gap.max() <= 1e-8

    def test_truncation_converges(self, em):
        state = superposition(3.0)
        t = np.linspace(0, 30, 31)
        change = np.abs(offdiagonal_series(state, em, t, 60) - offdiagonal_series(state, em, t, 120))
        assert change.max() < 1e-10

    def test_series_modes(self, em):
        modes = offdiagonal_modes(superposition(3.0), em, 60)
        assert len(modes) == 61
        assert modes.gammas[5] == pytest.approx(0.5)
        assert modes.omegas[5] == pytest.approx(-5.0)
        assert modes.weights.sum() == pytest.approx(0.5, abs=1e-12)

    def test_series_needs_cutoff(self, em):
        with pytest.raises(TruncationTooSmall):
            offdiagonal_series(superposition(3.0), em, 1.0, 20)

    def test_vacuum_convention(self, em):
        state = SuperpositionState(a=1, b=1, alpha1=CoherentAmplitude(1.0), alpha2=CoherentAmplitude(3.0))
        with pytest.raises(ConventionViolation):
            offdiagonal_closed(state, em, 1.0)

    def test_envelope(self, em):
        state = superposition(3.0)
        t = np.linspace(0, 40, 401)
        envelope = 0.5 * np.exp(-9 * (1 - np.exp(-em.gamma0 * t)))
        assert np.all(np.abs(offdiagonal_closed(state, em, t)) <= envelope + 1e-15)
        touch = 2 * math.pi
        expected = 0.5 * math.exp(-9 * (1 - math.exp(-0.1 * touch)))
        assert abs(offdiagonal_closed(state, em, touch)) == pytest.approx(expected)


class TestRates:
    def test_no_separation(self, em):
        assert gamma_eff_lf(superposition(0.0), em) == 0.0

    def test_series_and_closed_rate(self, em):
        state = superposition(3.0)
        assert gamma_eff_lf(state, em) == pytest.approx(0.9)
        assert gamma_eff_series(state, em, 120) == pytest.approx(0.9, abs=1e-12)

    def test_rate_grows_with_separation_squared(self, em):
        assert gamma_eff_lf(superposition(4.0), em) == pytest.approx(4 * gamma_eff_lf(superposition(2.0), em))

    @pytest.mark.parametrize('mass_omega, L0, gamma0, t_D, t_R', [
        (2.0, 1.0, 1.0, 1.0, 1.0),
        (2.0, 10.0, 0.1, 0.1, 10.0),
    ])
    def test_decoherence_time(self, mass_omega, L0, gamma0, t_D, t_R):
        state = SuperpositionState.from_separation(HALF, HALF, mass_m=mass_omega, omega=1.0, L0=L0)
        result = decoherence_time_lf(state, EffectiveModel(-1j * gamma0))
        assert result == pytest.approx((t_D, t_R))
        assert result[1] / result[0] == pytest.approx(mass_omega * L0 ** 2 / 2)

    def test_estimate_is_half(self, resting):
        state = SuperpositionState.from_separation(HALF, HALF, mass_m=2.0, omega=1.0, L0=10.0)
        t_D, _ = decoherence_time_lf(state, resting)
        assert omnes_decoherence_estimate(state, resting) == pytest.approx(t_D / 2)

    def test_no_superposition(self, em):
        state = SuperpositionState.from_separation(HALF, HALF, mass_m=1.0, omega=1.0, L0=0.0)
        with pytest.raises(NoSuperposition):
            decoherence_time_lf(state, em)

    def test_initial_slope(self, resting):
        state = superposition(3.0)
        t_D, _ = decoherence_time_lf(state, resting)
        t = np.linspace(0, 0.2 * t_D, 64)
        fit = fit_exponential_rate(t, np.abs(offdiagonal_closed(state, resting, t)), (0.0, 0.2 * t_D))
        assert fit.rate_or_exponent == pytest.approx(1 / t_D, rel=0.02)

    def test_initial_slope_by_differences(self, em):
        state = superposition(3.0)
        h = 1e-6
        values = np.abs(offdiagonal_closed(state, em, [0.0, h]))
        slope = (math.log(values[1]) - math.log(values[0])) / h
        assert slope == pytest.approx(-gamma_eff_lf(state, em), rel=1e-4)


class TestDensities:
    def test_gram(self):
        gram = gram_matrix(superposition(4.0))
        assert np.allclose(np.diag(gram), 1.0)
        assert gram[0, 1] == pytest.approx(math.exp(-8))

    def test_macroscopic_start(self, resting):
        rd = reduced_density(superposition(4.0), resting, 0.0)
        assert np.allclose(rd.coeffs, 0.5, atol=1e-3)
        assert np.allclose(rd.gram, np.eye(2), atol=1e-3)
        assert rd.trace_raw == pytest.approx(1.0, abs=1e-3)

    def test_unit_trace(self, em):
        state = superposition(3.0, a=0.6, b=0.8)
        for t in (0.0, 1.0, 7.5):
            rd = reduced_density(state, em, t)
            assert np.trace(rd.coeffs @ rd.gram).real == pytest.approx(1.0, abs=1e-10)
            assert np.allclose(rd.coeffs, rd.coeffs.conj().T)

    def test_norm_decays(self, resting):
        state = superposition(3.0)
        traces = [reduced_density(state, resting, t).trace_raw for t in (0.0, 2.0, 5.0)]
        assert traces[0] > traces[1] > traces[2]

    def test_coherence_is_lost(self, resting):
        state = superposition(4.0)
        t_D, _ = decoherence_time_lf(state, resting)
        rd = reduced_density(state, resting, 10 * t_D)
        assert abs(rd.coeffs[0, 1]) / 0.5 < math.exp(-8) + 0.01

    def test_single_branch_stays_pure(self, em):
        state = superposition(3.0, a=1.0, b=0.0)
        for t in (0.0, 2.0):
            rd = reduced_density(state, em, t)
            assert linear_entropy(rd) == pytest.approx(0.0, abs=1e-10)
            values, _ = moving_basis(rd)
            assert values == pytest.approx([1.0, 0.0], abs=1e-10)

    def test_coincident_branches(self, em):
        with pytest.raises(GramSingular):
            reduced_density(SuperpositionState(a=1, b=1), em, 0.0)
        with pytest.raises(GramSingular):
            preferred_density(SuperpositionState(a=1, b=1), em, 0.0)

    def test_cutoff_is_checked(self, em):
        with pytest.raises(TruncationTooSmall):
            reduced_density(superposition(4.0), em, 0.0, n_max=20)

    def test_preferred_start(self, resting):
        rd_p = preferred_density(superposition(4.0, a=0.8, b=0.6), resting, 0.0)
        values, vectors = moving_basis(rd_p)
        assert values == pytest.approx([0.64, 0.36], abs=1e-3)
        assert abs(vectors[0, 0]) == pytest.approx(1.0, abs=1e-3)
        assert abs(vectors[1, 1]) == pytest.approx(1.0, abs=1e-3)

    def test_preferred_is_mixed(self, resting):
        rd_p = preferred_density(superposition(4.0), resting, 0.0)
        assert linear_entropy(rd_p) == pytest.approx(0.5, abs=1e-3)

    def test_eigenvalues_sum_to_one(self, em):
        rd = reduced_density(superposition(2.0, a=0.6, b=0.8), em, 1.5)
        values, _ = moving_basis(rd)
        assert values.sum() == pytest.approx(1.0, abs=1e-10)

    def test_quasi_orthogonal_agrees_when_separated(self, resting):
        rd = reduced_density(superposition(4.0), resting, 0.0)
        exact, _ = moving_basis(rd)
        approximate, _ = moving_basis(rd, quasi_orthogonal=True)
        assert np.allclose(exact, approximate, atol=1e-3)


class TestBasisConvergence:
    def test_convergence(self, resting):
        state = superposition(4.0)
        t_D, _ = decoherence_time_lf(state, resting)
        report = basis_convergence(state, resting, np.linspace(0, 5 * t_D, 21))

        assert report.eigen_overlap[0] == pytest.approx(0.5, abs=1e-3)
        assert report.eigen_overlap[-1] > 0.99
        first, last = report.quartile_means()
        assert last > first
        assert np.all((report.eigen_overlap >= 0) & (report.eigen_overlap <= 1))
        assert report.offdiag_mod[-1] < report.offdiag_mod[0]

    def test_compares_with_the_dominant_preferred_vector(self, resting):
        # unequal weights lift the degeneracy of ρ_P at t = 0, so only its dominant eigenvector |α⟩ counts
        state = superposition(4.0, a=math.sqrt(0.2), b=math.sqrt(0.8))
        report = basis_convergence(state, resting, [0.0])
        assert report.eigen_overlap[0] == pytest.approx(0.8, abs=1e-3)

    def test_single_branch(self, em):
        report = basis_convergence(superposition(3.0, a=1.0, b=0.0), em, np.linspace(0, 10, 6))
        assert np.allclose(report.eigen_overlap, 1.0, atol=1e-9)
        assert np.allclose(report.linear_entropy, 0.0, atol=1e-10)

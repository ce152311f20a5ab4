import math
from pathlib import Path

import numpy as np
import pytest

import main
from conftest import lorentzian_model
from models import CoherentAmplitude, EffectiveModel, Mode, ModeSum, SuperpositionState
from numerics.fitting import fit_exponential_rate, fit_power_law
from physics.friedrichs import (characteristic_times, exact_pole, perturbative_pole, pole_background_split,
                                survival_amplitude)
from physics.lee_friedrichs import (basis_convergence, coherent_fock, decoherence_time_lf, evolve_coherent,
                                    fidelity, fock_propagate, gamma_eff_series, offdiagonal_closed,
                                    offdiagonal_series, overlap)
from physics.multipole import expectation, preferred_expectation, timescales
from physics.oracle import discretize, oracle_survival

CONFIGS = Path(__file__).parent.parent / 'configs'
HALF = 1 / math.sqrt(2)


def superposition(alpha2: float) -> SuperpositionState:
    return SuperpositionState(a=HALF, b=HALF, alpha1=CoherentAmplitude(0j), alpha2=CoherentAmplitude(alpha2))


def test_free_level(free_model, config):
    times = np.linspace(0, 200, 101)
    amplitude = survival_amplitude(free_model, times, config).amplitude
    assert np.max(np.abs(np.abs(amplitude) - 1)) <= 1e-10
    assert not perturbative_pole(free_model, config).decaying


def test_pole_gap_is_fourth_order(config):
    couplings = np.array([0.05, 0.0707, 0.1, 0.1414, 0.2])
    gaps = []
    for g in couplings:
        m = lorentzian_model(float(g))
        gaps.append(abs(exact_pole(m, config).z - perturbative_pole(m, config).z))

    fit = fit_power_law(couplings, np.array(gaps), (0.05, 0.2), config.override({'min_fit_samples': 5}))
    assert fit.rate_or_exponent == pytest.approx(4.0, abs=0.5)


@pytest.mark.slow
def test_oracle_equivalence(model, config):
    gamma = perturbative_pole(model, config).gamma
    times = np.linspace(0, 5 / gamma, 101)
    exact = oracle_survival(discretize(model, 2000, 50.0, config), times)
    assert np.max(np.abs(exact - survival_amplitude(model, times, config).amplitude)) <= 1e-3


@pytest.mark.slow
@pytest.mark.parametrize('g', [0.1, 0.2])
def test_relaxation_rate(g, config):
    m = lorentzian_model(g)
    pole = exact_pole(m, config)
    times = np.linspace(0.5 / pole.gamma, 3 / pole.gamma, 60)
    fit = fit_exponential_rate(times, survival_amplitude(m, times, config).probability, (times[0], times[-1]),
                               config)
    assert fit.rate_or_exponent == pytest.approx(2 * pole.gamma, rel=0.05)


@pytest.mark.slow
def test_long_time_power_law(model, config):
    pole = exact_pole(model, config)
    times = np.geomspace(30 / pole.gamma, 300 / pole.gamma, 40)
    split = pole_background_split(model, times, config, pole)

    fit = fit_power_law(times, np.abs(split.amplitude) ** 2, (times[0], times[-1]), config)
    assert fit.rate_or_exponent == pytest.approx(-3.0, abs=0.3)
    assert np.all(np.abs(split.background_part) > np.abs(split.pole_part))


def test_characteristic_time_table():
    times = characteristic_times(0.25)
    assert times[:3] == (4.0, 8.0, 8.0)
    assert math.isinf(times[3])


def test_two_pole_ordering():
    ms = ModeSum(0j, (Mode(0.5, 0.0, 0.1), Mode(0.5, 0.0, 10.0)))
    report = timescales(ms)
    assert report.t_R == 10.0
    assert report.t_D <= report.t_R / 5

    late = 5 / 10.0
    gap = abs(expectation(ms, late) - preferred_expectation(ms, late))
    assert gap < 0.01 * abs(expectation(ms, 0.0))


@pytest.mark.parametrize('alpha2', [1.0, 2.0, 3.0, 4.0])
def test_poisson_mean(alpha2):
    em = EffectiveModel(0.5 - 0.1j)
    assert gamma_eff_series(superposition(alpha2), em, 120) == pytest.approx(0.1 * alpha2 ** 2, abs=1e-12)


def test_decoherence_time():
    em = EffectiveModel(-0.1j)
    state = SuperpositionState.from_separation(HALF, HALF, mass_m=2.0, omega=1.0, L0=3.0)
    t_D, t_R = decoherence_time_lf(state, em)
    assert t_D == pytest.approx(2 / (2.0 * 3.0 ** 2) * t_R, rel=1e-14)

    t = np.linspace(0, 0.2 * t_D, 64)
    fit = fit_exponential_rate(t, np.abs(offdiagonal_closed(state, em, t)), (0.0, 0.2 * t_D))
    assert fit.rate_or_exponent == pytest.approx(1 / t_D, rel=0.02)


@pytest.mark.parametrize('alpha2', [1.0, 2.5, 4.0])
def test_closed_form_matches_series(alpha2):
    em = EffectiveModel(0.7 - 0.1j)
    state = superposition(alpha2)
    t = np.linspace(0, 10 / em.gamma0, 301)
    gap = np.abs(offdiagonal_closed(state, em, t) - offdiagonal_series(state, em, t, 120))
    assert gap.max() <= 1e-8


def test_coherent_invariance():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        alpha = complex(*rng.uniform(-2.5, 2.5, size=2))
        z0 = complex(rng.uniform(-3, 3), -rng.uniform(0.001, 1.0))
        t = rng.uniform(0, 10)
        alpha_t, _ = evolve_coherent(alpha, EffectiveModel(z0), t)
        propagated = fock_propagate(coherent_fock(alpha, 80), z0, t)
        assert fidelity(propagated, coherent_fock(alpha_t, 80)) >= 1 - 1e-10


def test_basis_convergence():
    assert abs(overlap(0, 4)) == pytest.approx(math.exp(-8), abs=1e-12)

    em = EffectiveModel(-0.1j)
    state = superposition(4.0)
    t_D, _ = decoherence_time_lf(state, em)
    report = basis_convergence(state, em, np.linspace(0, 10 * t_D, 41))

    assert report.eigen_overlap[0] <= 0.6
    late = report.times >= 5 * t_D
    assert np.all(report.eigen_overlap[late] > 0.99)


@pytest.mark.parametrize('name', [
    'pole', 'multipole', 'two_pole', 'lee_friedrichs', 'basis_convergence',
    pytest.param('survival', marks=pytest.mark.slow),
    pytest.param('oracle_check', marks=pytest.mark.slow),
])
def test_shipped_scenarios_are_deterministic(name, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for out in ('first', 'second'):
        assert main.main(['run', str(CONFIGS / f'{name}.json'), '--out', str(tmp_path / out)]) == main.EXIT_OK
    assert (tmp_path / 'first' / 'series.csv').read_bytes() == (tmp_path / 'second' / 'series.csv').read_bytes()

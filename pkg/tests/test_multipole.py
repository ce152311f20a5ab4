import math

import numpy as np
import pytest

from errors import DegenerateInitialCondition, ModelInvalid, WrongArity
from models import Mode, ModeSum
from physics.multipole import (evaluate_f, expectation, gamma_eff, linearized_f, model2_characteristic_times,
                               model2_expand, model2_offdiagonal, partition, preferred_expectation, timescales)


def mode_sum(weights, gammas, omegas=None, equilibrium=0j) -> ModeSum:
    omegas = omegas or [0.0] * len(weights)
    return ModeSum(equilibrium, tuple(Mode(c, w, g) for c, w, g in zip(weights, omegas, gammas)))


@pytest.fixture
def two_pole():
    return mode_sum([1, 1], [0.1, 10.0])


class TestEvaluate:
    def test_single_mode(self):
        ms = mode_sum([1], [1.0])
        t = np.linspace(0, 5, 11)
        assert np.allclose(evaluate_f(ms, t), np.exp(-t))

    def test_two_modes(self, two_pole):
        assert evaluate_f(two_pole, 0.0) == 2
        assert evaluate_f(two_pole, 1.0) == pytest.approx(0.90489, abs=1e-5)

    def test_oscillation(self):
        ms = mode_sum([1], [0.0], omegas=[2.0])
        assert evaluate_f(ms, math.pi / 4) == pytest.approx(-1j)

    def test_scalar_and_array(self, two_pole):
        assert isinstance(evaluate_f(two_pole, 0.5), complex)
        assert evaluate_f(two_pole, [0.0, 0.5, 1.0]).shape == (3,)

    def test_equilibrium_is_added(self):
        ms = mode_sum([1], [1.0], equilibrium=0.25)
        assert expectation(ms, 0.0) == pytest.approx(1.25)
        assert expectation(ms, 100.0) == pytest.approx(0.25)


class TestModes:
    def test_sorted_by_rate(self):
        ms = mode_sum([1, 2, 3], [5.0, 0.1, 1.0])
        assert list(ms.gammas) == [0.1, 1.0, 5.0]
        assert list(ms.weights) == [2, 3, 1]

    def test_negative_rate(self):
        with pytest.raises(ModelInvalid):
            Mode(1, 0.0, -0.1)


class TestGammaEff:
    @pytest.mark.parametrize('weights, gammas, expected', [
        ([1, 1], [1.0, 3.0], 2.0),
        ([3, 1], [0.0, 4.0], 1.0),
        ([1], [0.7], 0.7),
    ])
    def test_weighted_mean(self, weights, gammas, expected):
        assert gamma_eff(mode_sum(weights, gammas)) == pytest.approx(expected)

    def test_between_extremes(self):
        ms = mode_sum([0.2, 0.5, 0.3], [0.5, 2.0, 7.0])
        assert 0.5 < gamma_eff(ms) < 7.0

    def test_frequencies_do_not_enter(self):
        ms = mode_sum([1, 1], [1.0, 3.0], omegas=[0.0, 5.0])
        assert gamma_eff(ms) == pytest.approx(2.0)

    def test_cancelling_weights(self):
        with pytest.raises(DegenerateInitialCondition):
            gamma_eff(mode_sum([1, -1], [1.0, 2.0]))


class TestLinearized:
    def test_exact_at_zero(self, two_pole):
        assert linearized_f(two_pole, 0.0) == evaluate_f(two_pole, 0.0)

    def test_single_mode_is_exact(self):
        ms = mode_sum([0.5 + 0.5j], [0.3], omegas=[1.5])
        t = np.linspace(0, 10, 21)
        assert np.allclose(linearized_f(ms, t), evaluate_f(ms, t))

    def test_first_order_agreement(self, two_pole):
        t = np.linspace(0, 0.01, 11)
        exact = evaluate_f(two_pole, t)
        assert np.max(np.abs(linearized_f(two_pole, t) - exact) / np.abs(exact)) < 0.01

    def test_degenerate(self):
        with pytest.raises(DegenerateInitialCondition):
            linearized_f(mode_sum([1, -1], [1.0, 2.0]), 0.5)


class TestTimescales:
    def test_two_poles(self, two_pole):
        report = timescales(two_pole)
        assert report.t_R == pytest.approx(10.0)
        assert report.gamma_eff == pytest.approx(5.05)
        assert report.t_D == pytest.approx(0.198, abs=1e-3)
        assert (report.slow_count, report.fast_count) == (1, 1)
        assert report.probability_rate == pytest.approx(10.1)

    def test_single_mode(self):
        report = timescales(mode_sum([1], [2.0]))
        assert report.t_R == pytest.approx(0.5)
        assert report.t_D == pytest.approx(0.5)
        assert (report.slow_count, report.fast_count) == (1, 0)

    def test_fast_mode_dominates(self):
        report = timescales(mode_sum([1e-3, 1], [0.1, 10.0]))
        assert report.t_R == pytest.approx(10.0)
        assert report.t_D == pytest.approx(0.1, rel=2e-3)

    def test_non_decaying_mode(self):
        report = timescales(mode_sum([1, 1], [0.0, 2.0]))
        assert math.isinf(report.t_R)
        assert report.t_D == pytest.approx(1.0)

    def test_empty(self):
        with pytest.raises(ModelInvalid):
            timescales(ModeSum())


class TestPartition:
    def test_split_at_mean(self):
        slow, fast = partition(mode_sum([1, 1], [1.0, 3.0], equilibrium=0.5))
        assert list(slow.gammas) == [1.0]
        assert list(fast.gammas) == [3.0]
        assert slow.equilibrium == 0.5
        assert fast.equilibrium == 0

    def test_fast_never_empty_for_positive_weights(self):
        ms = mode_sum([0.2, 0.3, 0.5], [0.5, 1.0, 4.0])
        slow, fast = partition(ms)
        assert len(fast) >= 1
        assert len(slow) + len(fast) == len(ms)

    def test_single_mode_is_slow(self):
        slow, fast = partition(mode_sum([1], [2.0]))
        assert len(slow) == 1
        assert len(fast) == 0

    def test_explicit_rate(self):
        slow, fast = partition(mode_sum([1, 1, 1], [0.1, 1.0, 10.0]), rate=5.0)
        assert list(slow.gammas) == [0.1, 1.0]

    def test_identical_modes_are_both_kept(self):
        ms = mode_sum([1, 1, -1.5], [1.0, 1.0, 2.0])
        assert gamma_eff(ms) == pytest.approx(-2.0)

        slow, fast = partition(ms)
        assert len(slow) + len(fast) == len(ms)
        assert sorted(slow.modes + fast.modes, key=lambda m: (m.gamma, m.c.real)) == sorted(
            ms.modes, key=lambda m: (m.gamma, m.c.real))

        t = np.linspace(0, 3, 7)
        assert np.allclose(evaluate_f(slow, t) + evaluate_f(fast, t), evaluate_f(ms, t), atol=1e-14)


class TestPreferred:
    def test_at_zero(self):
        ms = mode_sum([1, 1], [0.1, 10.0], equilibrium=0.5)
        assert preferred_expectation(ms, 0.0) == pytest.approx(1.5)
        assert expectation(ms, 0.0) == pytest.approx(2.5)

    def test_fast_tail_bound(self, two_pole):
        t = 5 / 10.0
        gap = abs(preferred_expectation(two_pole, t) - expectation(two_pole, t))
        assert gap <= math.exp(-5) + 1e-15

    def test_gap_vanishes(self, two_pole):
        t = np.linspace(0, 5, 51)
        gap = np.abs(preferred_expectation(two_pole, t) - expectation(two_pole, t))
        assert np.all(np.diff(gap) <= 0)
        assert gap[-1] < 1e-20

    def test_without_fast_modes(self):
        ms = mode_sum([1], [2.0], equilibrium=0.1)
        t = np.linspace(0, 3, 7)
        assert np.allclose(preferred_expectation(ms, t), expectation(ms, t))


class TestTwoPoles:
    def test_product_rates(self, two_pole):
        products = model2_expand(two_pole)
        assert len(products) == 4
        assert np.allclose(products.gammas, [0.1, 5.05, 5.05, 10.0])

    def test_product_weights(self):
        base = mode_sum([0.5, 0.5j], [0.1, 10.0], omegas=[1.0, 3.0])
        products = model2_expand(base)
        assert products.weights.sum() == pytest.approx(abs(0.5 + 0.5j) ** 2)
        assert sorted(products.omegas) == [-2.0, 0.0, 0.0, 2.0]

    def test_offdiagonal_at_zero(self):
        base = mode_sum([0.5, 0.5], [0.1, 10.0], equilibrium=0.2)
        assert model2_offdiagonal(base, 0.0) == pytest.approx(1.2)

    def test_late_times_keep_the_slow_product(self, two_pole):
        t = 50.0
        assert model2_offdiagonal(two_pole, t) == pytest.approx(math.exp(-0.1 * t), rel=1e-9)

    def test_wrong_arity(self):
        with pytest.raises(WrongArity):
            model2_expand(mode_sum([1, 1, 1], [0.1, 1.0, 10.0]))

    def test_characteristic_times(self):
        times = model2_characteristic_times(0.1, 10.0)
        assert times[0] == pytest.approx(10.0)
        assert times[1] == times[2] == pytest.approx(2 / 10.1)
        assert times[3] == pytest.approx(0.1)

    def test_characteristic_times_need_decay(self):
        with pytest.raises(ModelInvalid):
            model2_characteristic_times(0.0, 1.0)

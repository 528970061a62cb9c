import math
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

from conftest import random_matrices
from steinperm import (
    Permutation,
    cond_exp_sq,
    conditional_drift,
    custom_spec,
    descents_spec,
    identity,
    inversions_spec,
    move_to_end,
    sample_pair,
    unit_step_check,
    variance_formula,
    x_delta,
    x_stat,
    zero_matrix,
)
from steinperm.perm_core import EnumerationLimitError

WORKED = Permutation((6, 4, 1, 5, 3, 2, 7))


def all_perms(n):
    return (Permutation(img) for img in permutations(range(1, n + 1)))


class TestMoveToEnd:
    def test_worked_example(self):
        assert move_to_end(WORKED, 3).image == (6, 4, 5, 3, 2, 7, 1)

    def test_last_position_fixed_point(self):
        for p in all_perms(4):
            assert move_to_end(p, 4) == p

    def test_first_position(self):
        assert move_to_end(Permutation((1, 2, 3)), 1).image == (2, 3, 1)

    @pytest.mark.parametrize("i", [0, 8, -1])
    def test_out_of_range(self, i):
        with pytest.raises(ValueError):
            move_to_end(WORKED, i)

    def test_equals_cycle_composition(self):
        # the step is composition with the cycle i -> i+1 -> ... -> n -> i
        n = 5
        for p in all_perms(n):
            for i in range(1, n + 1):
                cyc = {j: j for j in range(1, n + 1)}
                for j in range(i, n):
                    cyc[j] = j + 1
                cyc[n] = i
                moved = move_to_end(p, i)
                assert all(moved(j) == p(cyc[j]) for j in range(1, n + 1))


class TestXDelta:
    def test_worked_values(self):
        assert x_delta(inversions_spec(7), WORKED, 3) == 8
        assert x_delta(descents_spec(7), WORKED, 3) == 2

    def test_last_position_zero(self):
        for spec in (descents_spec(4), inversions_spec(4)):
            for p in all_perms(4):
                assert x_delta(spec, p, 4) == 0

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            x_delta(descents_spec(7), WORKED, 0)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            x_delta(descents_spec(6), WORKED, 1)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_matches_statistic_difference_everywhere(self, n):
        specs = [descents_spec(n), inversions_spec(n)]
        specs += [custom_spec(m) for m in random_matrices(n, count=2)]
        for spec in specs:
            for p in all_perms(n):
                x = x_stat(spec, p)
                for i in range(1, n + 1):
                    assert x_delta(spec, p, i) == x_stat(spec, move_to_end(p, i)) - x

    def test_step_bounds(self):
        n = 6
        dspec, ispec = descents_spec(n), inversions_spec(n)
        for p in all_perms(n):
            for i in range(1, n + 1):
                assert abs(x_delta(dspec, p, i)) <= 2
                assert abs(x_delta(ispec, p, i)) <= 2 * (n - 1)


class TestConditionalMoments:
    def test_drift_worked_values(self):
        assert conditional_drift(inversions_spec(7), WORKED) == Fraction(-2, 7)
        assert conditional_drift(descents_spec(7), WORKED) == 0

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_drift_is_linear_regression(self, n):
        specs = [descents_spec(n), inversions_spec(n), custom_spec(random_matrices(n, count=1)[0])]
        for spec in specs:
            for p in all_perms(n):
                assert conditional_drift(spec, p) == Fraction(-2, n) * x_stat(spec, p)

    def test_cond_exp_sq_worked_values(self):
        assert cond_exp_sq(descents_spec(7), identity(7)) == Fraction(24, 7)
        assert cond_exp_sq(inversions_spec(3), Permutation((1, 2, 3))) == Fraction(20, 3)

    def test_cond_exp_sq_zero_matrix(self):
        assert cond_exp_sq(custom_spec(zero_matrix(4)), identity(4)) == 0

    def test_cond_exp_sq_is_mean_of_squares(self):
        n = 4
        for spec in (descents_spec(n), inversions_spec(n)):
            for p in all_perms(n):
                direct = sum(x_delta(spec, p, i) ** 2 for i in range(1, n + 1))
                assert cond_exp_sq(spec, p) == Fraction(direct, n)


class TestSamplePair:
    def test_deterministic_given_seed(self):
        spec = descents_spec(7)
        a = sample_pair(spec, np.random.Generator(np.random.PCG64(99)))
        b = sample_pair(spec, np.random.Generator(np.random.PCG64(99)))
        assert a == b

    def test_fields_consistent(self):
        spec = inversions_spec(6)
        sigma = math.sqrt(variance_formula(spec.matrix).variance)
        rng = np.random.Generator(np.random.PCG64(5))
        for _ in range(50):
            s = sample_pair(spec, rng)
            assert 1 <= s.position <= 6
            assert s.w == float(s.x) / sigma
            assert s.w_prime == float(s.x_prime) / sigma

    def test_descent_increments_are_0_or_2(self):
        spec = descents_spec(7)
        deltas = set()
        rng = np.random.Generator(np.random.PCG64(1234))
        for _ in range(200):
            s = sample_pair(spec, rng)
            deltas.add(abs(s.x_prime - s.x))
        assert deltas <= {0, 2}
        assert 2 in deltas

    def test_zero_variance_rejected(self):
        with pytest.raises(ValueError):
            sample_pair(custom_spec(zero_matrix(5)), np.random.Generator(np.random.PCG64(0)))


class TestUnitStep:
    @pytest.mark.parametrize("n", [2, 5, 7])
    def test_descent_count_changes_by_at_most_one(self, n):
        assert unit_step_check(n) is True

    def test_limit(self):
        with pytest.raises(EnumerationLimitError):
            unit_step_check(12)

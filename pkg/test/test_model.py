#  nlcover - Solvers for Non-Linear Knapsack-Cover and UFP-Cover
#  Copyright (C) 2023 The nlcover developers
#
#  This program is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 3 of the License, or
#  (at your option) any later version.
#
#  This program is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""Tests for the instance model"""
import itertools
import pickle
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import nlcover
from doubles import lst, steps
from nlcover.model import (INF, CostFunction, IntegralSolution, KcInstance,
                           OracleCost, UfpInstance, UfpItem, as_ufp,
                           bucket_layout, compress_coordinates, coverage,
                           demand_cap, expand_steps_to_list, from_classic_kc,
                           is_feasible, marginal, normalize_instance, prepare,
                           residual_demands, solution_cost, to_cost, validate)
from nlcover.oracles import exact_kc


class TestCosts:
    def test_infinite_compares_above_everything(self):
        assert INF > Fraction(10 ** 30)
        assert not INF < Fraction(5)
        assert INF >= INF
        assert INF == INF
        assert INF + Fraction(3) is INF
        assert Fraction(3) + INF is INF

    def test_infinite_is_a_singleton(self):
        """INF survives pickling as the same object (bench workers rely on
        this)"""
        assert pickle.loads(pickle.dumps(INF)) is INF

    @pytest.mark.parametrize('value', [-1, Fraction(-1, 2), True, 1.5, "3"])
    def test_to_cost_rejects(self, value):
        with pytest.raises(nlcover.InvalidInstance):
            to_cost(value)

    def test_marginal_conventions(self):
        assert marginal(Fraction(4), Fraction(3)) == 1
        assert marginal(INF, Fraction(3)) is INF
        assert marginal(INF, INF) == 0
        with pytest.raises(nlcover.InvalidInstance):
            marginal(Fraction(3), INF)


class TestCostFunction:
    def test_list_evaluation(self):
        f = lst(1, 2)
        assert f.m == 2
        assert f(0) == 0
        assert f(2) == 2
        with pytest.raises(nlcover.LevelOutOfRange):
            f(3)
        with pytest.raises(nlcover.LevelOutOfRange):
            f(-1)

    def test_steps_evaluation(self):
        f = steps((2, 1), (4, 3))
        assert f.is_steps
        assert f.m == 4
        assert [f(j) for j in range(5)] == [0, 1, 1, 3, 3]

    def test_marginals_after_infinity(self):
        assert lst(1, INF, INF).marginals() == (1, INF, 0)

    def test_truncated(self):
        f = lst(1, 2, INF, INF)
        assert f.finite_prefix() == 2
        assert f.truncated(5).values == (1, 2)
        assert f.truncated(1).values == (1,)
        g = lst(1, 2)
        assert g.truncated(5) is g

    def test_truncated_steps_inside_piece(self):
        f = steps((3, 1), (6, 4))
        assert f.truncated(4).pieces == steps((3, 1), (4, 4)).pieces
        assert f.truncated(2).pieces == steps((2, 1)).pieces

    def test_problems(self):
        assert lst(3, 2).problems()
        assert steps((3, 2), (4, 2)).problems()
        assert steps((3, 2), (3, 4)).problems()
        assert not steps((3, 2), (4, 5)).problems()


class TestValidate:
    def test_exactly_coverable(self):
        assert validate(KcInstance((lst(1, 2),), 2)).ok

    def test_capacity_shortfall(self):
        report = validate(KcInstance((lst(1),), 2))
        assert not report.errors
        assert report.infeasibilities

    def test_decreasing(self):
        report = validate(KcInstance((lst(3, 2),), 1))
        assert report.errors

    def test_infinite_segments_do_not_count(self):
        report = validate(KcInstance((lst(1, INF),), 2))
        assert report.infeasibilities

    def test_zero_demand_is_accepted(self):
        assert validate(KcInstance((lst(1),), 0)).ok

    def test_oracle_items_must_be_compressed(self):
        report = validate(KcInstance((OracleCost('polynomial', 3),), 1))
        assert report.errors

    def test_ufp_interval_out_of_range(self):
        instance = UfpInstance((UfpItem(lst(1), (1, 3)),), (1, 1))
        assert validate(instance).errors

    def test_ufp_uncovered_demand(self):
        instance = UfpInstance((UfpItem(lst(1), (1, 1)),), (1, 1))
        report = validate(instance)
        assert not report.errors
        assert report.infeasibilities

    def test_ufp_zero_demand_may_be_uncovered(self):
        instance = UfpInstance((UfpItem(lst(1), (1, 1)),), (1, 0))
        assert validate(instance).ok

    def test_prepare_raises(self):
        with pytest.raises(nlcover.InvalidInstance):
            prepare(KcInstance((lst(3, 2),), 1))
        with pytest.raises(nlcover.InfeasibleError):
            prepare(KcInstance((lst(1),), 2))


class TestNormalize:
    def test_clamps_to_demand(self):
        instance = normalize_instance(KcInstance((lst(1, 2, 3, 4),), 2))
        assert instance.items[0].values == (1, 2)

    def test_trims_infinite_tail(self):
        instance = normalize_instance(KcInstance((lst(1, INF, INF),), 3))
        assert instance.items[0].values == (1,)

    def test_ufp_clamps_to_largest_demand(self):
        instance = UfpInstance((UfpItem(lst(1, 2, 3), (1, 2)),), (1, 2))
        assert demand_cap(instance) == 2
        assert normalize_instance(instance).items[0].costs.m == 2

    def test_idempotent(self, kc_pair):
        once = normalize_instance(kc_pair)
        assert normalize_instance(once) is once


class TestClassicKc:
    def test_capacity_above_demand(self):
        instance = from_classic_kc([3], [5], 2)
        assert instance.items[0].values == (5, 5)

    def test_zero_cost(self):
        instance = from_classic_kc([1], [0], 1)
        assert instance.items[0].values == (0,)

    def test_optimum(self):
        instance = from_classic_kc([2, 2], [1, 4], 3)
        assert instance.items[0].values == (1, 1)
        assert instance.items[1].values == (4, 4)
        assert exact_kc(instance)[0] == 5

    def test_rejects_zero_capacity(self):
        with pytest.raises(nlcover.InvalidInstance):
            from_classic_kc([0], [1], 1)

    def test_matches_subset_enumeration(self):
        """The exact optimum of the reduction equals the cheapest subset of
        classical items whose capacities reach the demand"""
        rng = random.Random(11)
        for _ in range(100):
            n = rng.randint(1, 4)
            capacities = [rng.randint(1, 4) for _ in range(n)]
            costs = [rng.randint(0, 9) for _ in range(n)]
            demand = rng.randint(0, sum(capacities))
            best = min(sum(c for c, chosen in zip(costs, subset) if chosen)
                       for subset in itertools.product((0, 1), repeat=n)
                       if sum(u for u, chosen in zip(capacities, subset)
                              if chosen) >= demand)
            instance = from_classic_kc(capacities, costs, demand)
            assert exact_kc(instance)[0] == best


class TestExpandSteps:
    def test_expand(self):
        assert expand_steps_to_list(steps((2, 1), (4, 3))).values == \
            (1, 1, 3, 3)

    def test_single_infinite_piece(self):
        assert expand_steps_to_list(steps((1, INF))).values == (INF,)

    def test_list_unchanged(self):
        f = lst(1, 2)
        assert expand_steps_to_list(f) is f

    def test_cap(self):
        with pytest.raises(nlcover.MaterializationTooLarge):
            expand_steps_to_list(steps((10, 1)), cap=9)

    def test_bucket_layout(self):
        assert bucket_layout(steps((2, 1), (5, 4))) == ((2, 1), (3, 3))
        assert bucket_layout(lst(3, 4)) == ((1, 3), (1, 1))
        with pytest.raises(nlcover.InvalidInstance):
            bucket_layout(lst(1, INF))


class TestSolutions:
    def test_cost(self):
        assert solution_cost(KcInstance((lst(1, 2),), 2),
                             IntegralSolution((2,))) == 2
        assert solution_cost(KcInstance((lst(1, INF),), 2),
                             IntegralSolution((2,))) is INF

    def test_cost_of_pair(self, kc_pair):
        assert solution_cost(kc_pair, IntegralSolution((2, 1))) == 5

    def test_cost_level_out_of_range(self, kc_pair):
        with pytest.raises(nlcover.LevelOutOfRange):
            solution_cost(kc_pair, IntegralSolution((3, 0)))
        with pytest.raises(nlcover.InvalidInstance):
            solution_cost(kc_pair, IntegralSolution((1,)))

    def test_kc_feasible(self, kc_pair):
        assert is_feasible(kc_pair, IntegralSolution((2, 1)))
        assert not is_feasible(kc_pair, IntegralSolution((1, 1)))
        assert not is_feasible(kc_pair, IntegralSolution((2,)))

    def test_ufp_feasible(self, ufp_three):
        assert is_feasible(ufp_three, IntegralSolution((0, 0, 1)))
        assert not is_feasible(ufp_three, IntegralSolution((1, 0, 0)))
        assert coverage(ufp_three, (1, 0, 1)) == [2, 1]
        assert residual_demands(ufp_three, (1, 0, 0)) == [0, 1]

    def test_as_ufp(self, kc_pair):
        ufp = as_ufp(kc_pair)
        assert ufp.k == 1
        assert ufp.demands == (3,)
        assert all(item.interval == (1, 1) for item in ufp.items)


class TestCompressCoordinates:
    def test_single_covering_set(self):
        instance = UfpInstance((UfpItem(lst(1, 2, 3), (1, 5)),),
                               (1, 2, 1, 0, 3))
        compressed = compress_coordinates(instance)
        assert compressed.instance.k == 1
        assert compressed.instance.demands == (3,)
        assert compressed.original_point(1) == 5

    def test_uncovered_gap_dropped(self):
        instance = UfpInstance((UfpItem(lst(1), (1, 1)),
                                UfpItem(lst(1), (3, 3))), (1, 0, 1))
        compressed = compress_coordinates(instance)
        assert compressed.instance.k == 2
        assert compressed.points == ((1,), (3,))
        assert [item.interval for item in compressed.instance.items] == \
            [(1, 1), (2, 2)]

    def test_identity(self, ufp_three):
        compressed = compress_coordinates(ufp_three)
        assert compressed.instance == ufp_three

    @given(st.data())
    @settings(max_examples=60, deadline=None)
    def test_feasibility_preserved(self, data):
        """Every level vector is feasible on the compressed instance exactly
        when it is feasible on the original"""
        k = data.draw(st.integers(1, 8))
        n = data.draw(st.integers(1, 4))
        items = []
        for _ in range(n):
            s = data.draw(st.integers(1, k))
            e = data.draw(st.integers(s, k))
            items.append(UfpItem(lst(*range(1, 4)), (s, e)))
        instance = UfpInstance(tuple(items), tuple(
            data.draw(st.integers(0, 3)) if any(i.covers(t) for i in items)
            else 0 for t in range(1, k + 1)))
        compressed = compress_coordinates(instance).instance
        assert compressed.k <= 2 * n
        for levels in itertools.product(range(4), repeat=n):
            solution = IntegralSolution(levels)
            assert is_feasible(instance, solution) == \
                is_feasible(compressed, solution)


def test_cost_function_equality():
    """Cost functions compare by content, not by cached lookup tables"""
    assert steps((2, 1)) == CostFunction.from_pieces([(2, 1)])
    assert lst(1, 2) != lst(1, 3)

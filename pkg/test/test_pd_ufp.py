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
"""Tests for the UFP-cover primal-dual solver and its pruning phase"""
import dataclasses
from collections import Counter

import pytest

import nlcover
from doubles import (drop_rates, inflate_delta, inflate_residuals, lst,
                     positive_raise, ufp_spec)
from nlcover.engine import Certificate
from nlcover.gen import generate
from nlcover.model import (IntegralSolution, KcInstance, UfpInstance, UfpItem,
                           is_feasible, prepare)
from nlcover.oracles import brute_force_ufp
from nlcover.pd_kc import solve_pd_kc
from nlcover.pd_ufp import (DEMAND_NEEDED, KEPT, REDUNDANT, REMOVED,
                            SUPERIOR_BLOCK, PdUfpResult, PruneEntry,
                            check_certificate_ufp, solve_pd_ufp)


def test_three_items(ufp_three):
    """The first item is taken for point 1, the spanning item for point 2,
    and pruning then drops the first item again"""
    result = solve_pd_ufp(ufp_three, audit=True)
    assert result.solution.levels == (0, 0, 1)
    assert result.primal_cost == 1
    assert result.certificate.dual_objective == 1
    assert result.prune_log.entries == (
        PruneEntry(1, 2, 1, KEPT, DEMAND_NEEDED),
        PruneEntry(0, 0, 1, REMOVED, REDUNDANT),
    )
    assert result.prune_log.removed() == [0]
    assert check_certificate_ufp(ufp_three, result).ok


def test_without_pruning(ufp_three):
    result = solve_pd_ufp(ufp_three, prune=False)
    assert result.solution.levels == (1, 0, 1)
    assert result.primal_cost == 2
    assert result.prune_log.entries == ()


def test_points_recorded_in_input_coordinates():
    """Point 5 is the only one with demand; compression renumbers it but the
    ledger does not"""
    instance = UfpInstance((UfpItem(lst(2, 3), (3, 6)),),
                           (0, 0, 0, 0, 2, 0, 0))
    result = solve_pd_ufp(instance, audit=True)
    assert result.solution.levels == (2,)
    assert {r.t for r in result.certificate.raises} == {5}


def test_spanning_item_covers_peak():
    instance = UfpInstance((UfpItem(lst(1, 2, 3), (1, 4)),), (1, 3, 2, 0))
    result = solve_pd_ufp(instance)
    assert result.solution.levels == (3,)
    assert result.primal_cost == 3


def test_zero_demands():
    instance = UfpInstance((UfpItem(lst(1), (1, 2)),), (0, 0))
    result = solve_pd_ufp(instance, audit=True)
    assert result.solution.levels == (0,)
    assert result.primal_cost == 0
    assert result.certificate.raises == []


def test_uncoverable_point():
    instance = UfpInstance((UfpItem(lst(1), (1, 1)),), (1, 1))
    with pytest.raises(nlcover.InfeasibleError):
        solve_pd_ufp(instance)


def test_single_point_matches_knapsack_cover():
    """On one point, without pruning, the growing phase is the knapsack-cover
    algorithm"""
    for seed in range(200):
        instance = generate(ufp_spec(seed=seed, k=1))
        ufp = solve_pd_ufp(instance, prune=False)
        kc = solve_pd_kc(KcInstance(instance.costs, instance.demands[0]))
        assert ufp.solution == kc.solution, seed
        assert ufp.certificate.dual_objective == \
            kc.certificate.dual_objective, seed


def test_deterministic():
    instance = generate(ufp_spec(seed=11))
    first = solve_pd_ufp(instance, audit=True)
    second = solve_pd_ufp(instance, audit=True)
    assert first.solution == second.solution
    assert first.prune_log == second.prune_log
    assert first.certificate == second.certificate


def test_ratio_and_sandwich():
    """Over 300 seeded instances: dual <= OPT <= primal <= 4 * dual"""
    for seed in range(300):
        instance = generate(ufp_spec(seed=seed))
        result = solve_pd_ufp(instance, audit=True)
        optimum, _ = brute_force_ufp(instance)
        dual = result.certificate.dual_objective
        assert dual <= optimum <= result.primal_cost <= 4 * dual, seed
        assert result.ratio_bound_ok
        assert check_certificate_ufp(instance, result).ok, seed


def test_prune_log_consistent():
    """The log visits blocks newest first, every level is the sum of its
    kept blocks, and lowering any item by its top kept block uncovers some
    point"""
    for seed in range(200):
        instance = generate(ufp_spec(seed=seed))
        result = solve_pd_ufp(instance)
        entries = result.prune_log.entries
        seqs = [e.block for e in entries]
        assert seqs == sorted(seqs, reverse=True), seed

        kept = Counter()
        for entry in entries:
            assert (entry.action, entry.reason) in (
                (KEPT, SUPERIOR_BLOCK), (KEPT, DEMAND_NEEDED),
                (REMOVED, REDUNDANT))
            if entry.action == KEPT:
                kept[entry.item] += entry.size
        levels = result.solution.levels
        assert all(kept[i] == x for i, x in enumerate(levels)), seed

        prepared = prepare(instance)
        for entry in entries:
            if entry.reason != DEMAND_NEEDED:
                continue
            lowered = list(levels)
            lowered[entry.item] -= entry.size
            assert not is_feasible(prepared, IntegralSolution(lowered)), seed


def test_injected_raise_detected():
    for seed in range(100):
        instance = generate(ufp_spec(seed=seed))
        result = solve_pd_ufp(instance, audit=True)
        if positive_raise(result.certificate) is None:
            continue
        forged = PdUfpResult(result.solution, result.primal_cost,
                             inflate_delta(result.certificate),
                             result.prune_log, True)
        assert 'dual-feasibility' in \
            check_certificate_ufp(instance, forged).checks_failed(), seed

        forged = PdUfpResult(result.solution, result.primal_cost,
                             inflate_residuals(result.certificate, 2),
                             result.prune_log, True)
        assert 'residual' in \
            check_certificate_ufp(instance, forged).checks_failed(), seed

        forged = PdUfpResult(result.solution, result.primal_cost,
                             drop_rates(result.certificate),
                             result.prune_log, True)
        assert 'raise-rates' in \
            check_certificate_ufp(instance, forged).checks_failed(), seed


def test_inflated_residuals(ufp_three):
    result = solve_pd_ufp(ufp_three, audit=True)
    assert check_certificate_ufp(ufp_three, result).ok
    for keep_levels in (True, False):
        certificate = inflate_residuals(result.certificate,
                                        keep_levels=keep_levels)
        assert certificate.dual_objective == 100
        forged = PdUfpResult(result.solution, result.primal_cost,
                             certificate, result.prune_log, True)
        assert 'residual' in \
            check_certificate_ufp(ufp_three, forged).checks_failed()


def test_raise_without_point(ufp_three):
    result = solve_pd_ufp(ufp_three, audit=True)
    k = positive_raise(result.certificate)
    raises = list(result.certificate.raises)
    raises[k] = dataclasses.replace(raises[k], t=None)
    forged = PdUfpResult(result.solution, result.primal_cost,
                         Certificate(result.certificate.dual_objective,
                                     raises, True),
                         result.prune_log, True)
    assert 'residual' in \
        check_certificate_ufp(ufp_three, forged).checks_failed()

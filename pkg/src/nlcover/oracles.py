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

"""Exact solvers used as ground truth, and the separation oracle for the
knapsack-cover LP"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .exceptions import (BudgetExceeded, ChainViolated, InfeasibleError,
                         InvalidInstance)
from .model import (INF, Cost, FractionalSolution, IntegralSolution,
                    KcInstance, UfpInstance, as_ufp, is_feasible, prepare,
                    solution_cost)

log = logging.getLogger('nlcover')

#: Largest number of level vectors brute force will enumerate by default
DEFAULT_ENUMERATION_BUDGET = 1000000


def exact_kc(instance: KcInstance) -> Tuple[Cost, IntegralSolution]:
    """Exact optimum of a Knapsack-Cover instance by dynamic programming over
    (items considered, residual demand). Backtracking prefers the smallest
    level of each item, last item first.

    :raises InfeasibleError: if no finite-cost cover exists
    """
    instance = prepare(instance)
    demand = instance.demand
    # table[i][d]: cheapest cover of residual d using the first i items
    table: List[List[Cost]] = [[Fraction(0)] + [INF] * demand]
    for costs in instance.items:
        previous = table[-1]
        row: List[Cost] = []
        for d in range(demand + 1):
            best: Cost = INF
            for x in range(costs.m + 1):
                candidate = previous[max(d - x, 0)] + costs(x)
                if candidate < best:
                    best = candidate
            row.append(best)
        table.append(row)

    optimum = table[-1][demand]
    if optimum is INF:
        raise InfeasibleError("No finite-cost cover exists")

    levels = [0] * instance.n
    d = demand
    for i in range(instance.n, 0, -1):
        costs = instance.items[i - 1]
        for x in range(costs.m + 1):
            if table[i - 1][max(d - x, 0)] + costs(x) == table[i][d]:
                levels[i - 1] = x
                d = max(d - x, 0)
                break
    return optimum, IntegralSolution(levels)


def brute_force_ufp(instance: UfpInstance,
                    budget: int = DEFAULT_ENUMERATION_BUDGET
                    ) -> Tuple[Cost, IntegralSolution]:
    """Exact optimum of a UFP-Cover instance by enumerating every level
    vector in lexicographic order. The first optimal vector wins.

    :raises BudgetExceeded: if there are more than ``budget`` vectors
    :raises InfeasibleError: if no finite-cost cover exists
    """
    instance = prepare(instance)
    count = 1
    for costs in instance.costs:
        count *= costs.m + 1
    if count > budget:
        raise BudgetExceeded(f"{count} level vectors exceed the enumeration "
                             f"budget of {budget}")

    best_cost: Cost = INF
    best: Optional[IntegralSolution] = None
    for levels in itertools.product(*(range(c.m + 1)
                                      for c in instance.costs)):
        candidate = IntegralSolution(levels)
        if not is_feasible(instance, candidate):
            continue
        cost = solution_cost(instance, candidate)
        if best is None or cost < best_cost:
            best_cost, best = cost, candidate
    if best is None or best_cost is INF:
        raise InfeasibleError("No finite-cost cover exists")
    return best_cost, best


def brute_force_kc(instance: KcInstance,
                   budget: int = DEFAULT_ENUMERATION_BUDGET
                   ) -> Tuple[Cost, IntegralSolution]:
    """Exhaustive Knapsack-Cover optimum, as UFP-Cover on one point"""
    return brute_force_ufp(as_ufp(instance), budget)


@dataclass(frozen=True)
class Violation:
    """A knapsack-cover inequality violated by ``lhs < d``: items fixed at
    levels ``a`` (``sum a = D - d``) leave residual demand ``d``"""
    a: Tuple[int, ...]
    d: int
    lhs: Fraction

    @property
    def amount(self) -> Fraction:
        return self.d - self.lhs


@dataclass(frozen=True)
class SeparationResult:
    violated: Optional[Violation] = None

    @property
    def found(self) -> bool:
        return self.violated is not None


def _chain_rows(instance: KcInstance,
                z: Union[FractionalSolution, Sequence[Sequence[Fraction]]]
                ) -> Tuple[Tuple[Fraction, ...], ...]:
    solution = z if isinstance(z, FractionalSolution) \
        else FractionalSolution(tuple(z))
    if len(solution.z) != instance.n:
        raise InvalidInstance(f"Fractional solution has {len(solution.z)} "
                              f"rows for {instance.n} items")
    for i, (row, costs) in enumerate(zip(solution.z, instance.items)):
        if len(row) != costs.m:
            raise InvalidInstance(f"Row {i} has {len(row)} values for "
                                  f"{costs.m} segments")
    if not solution.is_chain():
        raise ChainViolated("Fractional solution is not in chain form")
    return solution.z


def separate_gkc(instance: KcInstance,
                 z: Union[FractionalSolution, Sequence[Sequence[Fraction]]]
                 ) -> SeparationResult:
    """Find a most violated knapsack-cover inequality for a chain-form
    fractional solution.

    For every residual demand ``d`` in ``1..D``, a dynamic program finds the
    lexicographically smallest ``a`` with ``sum a = D - d`` minimizing
    ``sum_i h_i(a_i)``, where ``h_i(a_i)`` sums ``z_ij`` over
    ``a_i + 1 .. min(m_i, a_i + d)``. The largest ``d - lhs`` wins, smaller
    ``d`` on ties.

    :raises ChainViolated: if ``z`` is not in chain form
    """
    rows = _chain_rows(instance, z)
    ms = [len(row) for row in rows]
    prefix = []
    for row in rows:
        sums = [Fraction(0)]
        for value in row:
            sums.append(sums[-1] + value)
        prefix.append(sums)

    demand = instance.demand
    capacity = sum(ms)
    best: Optional[Violation] = None
    for d in range(1, demand + 1):
        target = demand - d
        if target > capacity:
            continue

        def h(i: int, a: int) -> Fraction:
            return prefix[i][min(ms[i], a + d)] - prefix[i][a]

        # suffix[i][e]: least sum of h over items i.. with levels summing to e
        suffix: List[List[Optional[Fraction]]] = \
            [[None] * (target + 1) for _ in range(instance.n + 1)]
        suffix[instance.n][0] = Fraction(0)
        for i in range(instance.n - 1, -1, -1):
            for e in range(target + 1):
                for a in range(min(ms[i], e) + 1):
                    rest = suffix[i + 1][e - a]
                    if rest is None:
                        continue
                    candidate = h(i, a) + rest
                    if suffix[i][e] is None or candidate < suffix[i][e]:
                        suffix[i][e] = candidate
        lhs = suffix[0][target]
        if lhs is None or lhs >= d:
            continue
        if best is not None and d - lhs <= best.amount:
            continue

        levels = []
        e = target
        for i in range(instance.n):
            for a in range(min(ms[i], e) + 1):
                rest = suffix[i + 1][e - a]
                if rest is not None and h(i, a) + rest == suffix[i][e]:
                    levels.append(a)
                    e -= a
                    break
        best = Violation(tuple(levels), d, lhs)

    if best is not None:
        log.debug("Most violated cut: a=%s d=%d lhs=%s", best.a, best.d,
                  best.lhs)
    return SeparationResult(best)

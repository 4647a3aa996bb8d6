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

"""Primal-dual water filling for Non-Linear Knapsack-Cover (factor 2)"""

import logging
from dataclasses import dataclass

from .checks import CheckReport, check_certificate
from .engine import Certificate, WaterFillingEngine
from .model import (Cost, IntegralSolution, KcInstance, bucket_layout,
                    prepare, solution_cost)

log = logging.getLogger('nlcover.solver.pd-kc')


@dataclass(frozen=True)
class PdKcResult:
    solution: IntegralSolution
    primal_cost: Cost
    certificate: Certificate
    ratio_bound_ok: bool


def solve_pd_kc(instance: KcInstance, audit: bool = False) -> PdKcResult:
    """Solve a Knapsack-Cover instance within twice the optimum.

    While residual demand ``D(a)`` remains, every item receives water on its
    segments ``a_i + 1 .. min(m_i, a_i + D(a))``. Steps-form items are run
    with one bucket per piece.

    :param audit: Record the full rate map of every raise, as needed by
                  :func:`check_certificate_kc`
    :raises InvalidInstance: if the instance is malformed
    :raises InfeasibleError: if the instance cannot be covered
    """
    instance = prepare(instance)
    engine = WaterFillingEngine([bucket_layout(c) for c in instance.items],
                                audit)
    log.info("Solving knapsack-cover instance with %d items, demand %d",
             instance.n, instance.demand)
    while True:
        residual = max(instance.demand - sum(engine.levels()), 0)
        if residual == 0:
            break
        active = {i: min(stair.m, stair.level + residual)
                  for i, stair in enumerate(engine.stairs)}
        engine.step(active, residual)

    solution = IntegralSolution(engine.levels())
    primal = solution_cost(instance, solution)
    dual = engine.certificate.dual_objective
    log.info("Primal cost %s, dual objective %s, %d blocks", primal, dual,
             len(engine.blocks))
    return PdKcResult(solution, primal, engine.certificate, primal <= 2 * dual)


def check_certificate_kc(instance: KcInstance,
                         result: PdKcResult) -> CheckReport:
    """Check a :func:`solve_pd_kc` result exactly (needs audit mode)"""
    return check_certificate(prepare(instance), result.solution,
                             result.primal_cost, result.certificate, 2)

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

"""Primal-dual water filling with reverse-delete pruning for Non-Linear
UFP-Cover (factor 4)"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

from .checks import CheckReport, check_certificate
from .engine import Block, Certificate, WaterFillingEngine
from .model import (Cost, IntegralSolution, UfpInstance, bucket_layout,
                    compress_coordinates, is_feasible, prepare,
                    residual_demands, solution_cost)

log = logging.getLogger('nlcover.solver.pd-ufp')

KEPT = 'kept'
REMOVED = 'removed'

#: A higher block of the same item is still kept
SUPERIOR_BLOCK = 'superior-block'
#: Removing the block would leave some point uncovered
DEMAND_NEEDED = 'demand-needed'
#: The block is the top of its item and nothing needs it
REDUNDANT = 'redundant'


@dataclass(frozen=True)
class PruneEntry:
    block: int
    item: int
    size: int
    action: str
    reason: str


@dataclass(frozen=True)
class PruneLog:
    """Pruning decisions in the order they were made (reverse creation
    order of the blocks)"""
    entries: Tuple[PruneEntry, ...] = ()

    def removed(self) -> List[int]:
        return [e.block for e in self.entries if e.action == REMOVED]


@dataclass(frozen=True)
class PdUfpResult:
    solution: IntegralSolution
    primal_cost: Cost
    certificate: Certificate
    prune_log: PruneLog
    ratio_bound_ok: bool


def _grow(instance: UfpInstance, audit: bool) -> WaterFillingEngine:
    """The growing phase, run on a coordinate-compressed instance"""
    compressed = compress_coordinates(instance)
    work = compressed.instance
    engine = WaterFillingEngine([bucket_layout(c) for c in work.costs], audit)
    while True:
        residuals = residual_demands(work, engine.levels())
        residual = max(residuals, default=0)
        if residual == 0:
            return engine
        t = residuals.index(residual) + 1
        active = {i: min(engine.stairs[i].m, engine.stairs[i].level + residual)
                  for i in work.covering(t)}
        engine.step(active, residual, compressed.original_point(t))


def _prune(instance: UfpInstance, blocks: List[Block],
           levels: List[int]) -> PruneLog:
    """Reverse delete: visit blocks newest first and drop a block if it is
    its item's highest kept block and every point stays covered without it.
    Updates ``levels`` in place."""
    kept: Dict[int, List[Block]] = {}
    for block in blocks:
        kept.setdefault(block.item, []).append(block)

    entries = []
    for block in reversed(blocks):
        stack = kept[block.item]
        if stack[-1] is not block:
            entries.append(PruneEntry(block.seq, block.item, block.size, KEPT,
                                      SUPERIOR_BLOCK))
            continue
        levels[block.item] -= block.size
        if is_feasible(instance, IntegralSolution(levels)):
            stack.pop()
            entries.append(PruneEntry(block.seq, block.item, block.size,
                                      REMOVED, REDUNDANT))
            log.debug("Removed block %d of item %d", block.seq, block.item)
        else:
            levels[block.item] += block.size
            entries.append(PruneEntry(block.seq, block.item, block.size, KEPT,
                                      DEMAND_NEEDED))
    return PruneLog(tuple(entries))


def solve_pd_ufp(instance: UfpInstance, audit: bool = False,
                 prune: bool = True) -> PdUfpResult:
    """Solve a UFP-Cover instance within four times the optimum.

    The growing phase repeatedly picks the point ``t`` with the largest
    residual demand (smallest ``t`` on ties) and pours water into the items
    covering it. Points in the certificate are given in the coordinates of
    the input instance.

    :param audit: Record the full rate map of every raise
    :param prune: Run the reverse-delete phase (off keeps every block)
    :raises InvalidInstance: if the instance is malformed
    :raises InfeasibleError: if some point cannot be covered
    """
    instance = prepare(instance)
    log.info("Solving UFP-cover instance with %d items on %d points",
             instance.n, instance.k)
    engine = _grow(instance, audit)
    levels = list(engine.levels())
    if prune:
        prune_log = _prune(instance, engine.blocks, levels)
        log.info("Pruning removed %d of %d blocks",
                 len(prune_log.removed()), len(engine.blocks))
    else:
        prune_log = PruneLog()

    solution = IntegralSolution(levels)
    primal = solution_cost(instance, solution)
    dual = engine.certificate.dual_objective
    log.info("Primal cost %s, dual objective %s", primal, dual)
    return PdUfpResult(solution, primal, engine.certificate, prune_log,
                       primal <= 4 * dual)


def check_certificate_ufp(instance: UfpInstance,
                          result: PdUfpResult) -> CheckReport:
    """Check a :func:`solve_pd_ufp` result exactly (needs audit mode)"""
    return check_certificate(prepare(instance), result.solution,
                             result.primal_cost, result.certificate, 4)

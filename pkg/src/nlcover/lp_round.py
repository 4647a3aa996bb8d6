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

"""LP rounding for Non-Linear Knapsack-Cover.

The knapsack-cover LP over chain-form fractional solutions is solved by
cutting planes, thresholded at 1/2, and the leftover demand is covered by
solving the doubled residual problem and dropping its one fractional item.
The result costs at most twice the LP optimum.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exceptions import (AssemblyInfeasible, InvalidInstance,
                         IterationCapExceeded)
from .model import (DEFAULT_MATERIALIZE_CAP, Cost, FractionalSolution,
                    IntegralSolution, KcInstance, expand_steps_to_list,
                    is_feasible, prepare, solution_cost)
from .oracles import separate_gkc
from .simplex import GE, Tableau

log = logging.getLogger('nlcover.solver.round')

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Cut:
    """The knapsack-cover inequality for fixed levels ``a`` and residual
    demand ``d``"""
    a: Tuple[int, ...]
    d: int

    def coefficient(self, i: int, k: int) -> int:
        """Coefficient of the prefix weight ``y_ik`` (``z_ij`` summed over
        ``j <= k`` inside the cut's range for item ``i``)"""
        return max(0, min(k, self.a[i] + self.d) - self.a[i])


@dataclass(frozen=True)
class GkcLpResult:
    z: FractionalSolution
    cost: Fraction
    cuts: Tuple[Cut, ...]
    #: Restricted LP optimum after each cut
    history: Tuple[Fraction, ...]

    @property
    def cut_count(self) -> int:
        return len(self.cuts)


@dataclass(frozen=True)
class ResidualContext:
    """Thresholds ``a_bar``, residual demand ``D_bar`` and caps ``m_bar``
    of a normalized fractional solution"""
    a_bar: Tuple[int, ...]
    d_bar: int
    m_bar: Tuple[int, ...]

    @property
    def widths(self) -> Tuple[int, ...]:
        return tuple(hi - lo for lo, hi in zip(self.a_bar, self.m_bar))


@dataclass(frozen=True)
class EnvelopeBlock:
    """Item value ``1`` on ``a_bar + 1 .. r - 1``, ``w`` on ``r .. R`` and
    ``0`` above (``R < r`` means no fractional block)"""
    r: int
    R: int
    w: Fraction


@dataclass(frozen=True)
class EnvelopeSolution:
    blocks: Tuple[EnvelopeBlock, ...]
    cost: Fraction
    target: int
    fractional_item: Optional[int]

    def z_star(self, ctx: ResidualContext) -> Tuple[Tuple[Fraction, ...], ...]:
        """Values over each item's residual range ``a_bar + 1 .. m_bar``"""
        rows = []
        for block, lo, hi in zip(self.blocks, ctx.a_bar, ctx.m_bar):
            row = []
            for j in range(lo + 1, hi + 1):
                if j < block.r:
                    row.append(Fraction(1))
                elif j <= block.R:
                    row.append(block.w)
                else:
                    row.append(Fraction(0))
            rows.append(tuple(row))
        return tuple(rows)


@dataclass(frozen=True)
class RoundingResult:
    solution: IntegralSolution
    cost: Cost
    lp: GkcLpResult
    context: ResidualContext
    envelope: EnvelopeSolution

    @property
    def lp_cost(self) -> Fraction:
        return self.lp.cost


def _list_model(instance: KcInstance,
                materialize_cap: int) -> KcInstance:
    instance = prepare(instance)
    return instance.replace_costs([expand_steps_to_list(c, materialize_cap)
                                   for c in instance.items])


def _z_from_prefix_weights(tableau: Tableau, ms: Sequence[int],
                           offsets: Sequence[int]) -> FractionalSolution:
    y = tableau.values(sum(ms))
    rows = []
    for m, offset in zip(ms, offsets):
        row = []
        running = Fraction(0)
        for k in range(m, 0, -1):
            running += y[offset + k - 1]
            row.append(running)
        rows.append(tuple(reversed(row)))
    return FractionalSolution(tuple(rows))


def solve_gkc_lp(instance: KcInstance, cut_cap_factor: int = 1,
                 materialize_cap: int = DEFAULT_MATERIALIZE_CAP
                 ) -> GkcLpResult:
    """Solve the knapsack-cover LP with chain constraints by cutting planes.

    The restricted LP works over prefix weights ``y_ik >= 0`` with
    ``sum_k y_ik <= 1`` per item, so ``z_ij = sum_{k >= j} y_ik`` always
    satisfies the chain constraints. It starts with the plain cover
    inequality and gains one most-violated cut per round, re-optimized with
    the dual simplex, until separation finds none.

    :raises IterationCapExceeded: after ``cut_cap_factor * n * m * D`` cuts,
                                  or if separation repeats a cut
    """
    instance = _list_model(instance, materialize_cap)
    ms = [c.m for c in instance.items]
    demand = instance.demand
    if demand == 0:
        zero = FractionalSolution(tuple((Fraction(0),) * m for m in ms))
        return GkcLpResult(zero, Fraction(0), (), ())

    offsets = []
    costs: List[Fraction] = []
    for item in instance.items:
        offsets.append(len(costs))
        costs.extend(Fraction(item(k)) for k in range(1, item.m + 1))
    columns = len(costs)
    rows = []
    for i, m in enumerate(ms):
        row = [Fraction(0)] * (columns + instance.n)
        for k in range(m):
            row[offsets[i] + k] = Fraction(1)
        row[columns + i] = Fraction(1)
        rows.append(row)
    tableau = Tableau(rows, [Fraction(1)] * instance.n,
                      [columns + i for i in range(instance.n)],
                      costs + [Fraction(0)] * instance.n)

    cap = max(1, cut_cap_factor * instance.n * max(ms, default=0) * demand)
    cuts: List[Cut] = []
    seen: Dict[Tuple[Tuple[int, ...], int], Cut] = {}
    history: List[Fraction] = []
    cut: Optional[Cut] = Cut((0,) * instance.n, demand)
    while cut is not None:
        if (cut.a, cut.d) in seen:
            raise IterationCapExceeded(f"Separation repeated the cut "
                                       f"a={cut.a} "
                                       f"d={cut.d}")
        if len(cuts) >= cap:
            raise IterationCapExceeded(f"Cutting plane loop exceeded {cap} "
                                       "cuts")
        seen[(cut.a, cut.d)] = cut
        cuts.append(cut)
        coeffs = [Fraction(0)] * columns
        for i, m in enumerate(ms):
            for k in range(1, m + 1):
                coeffs[offsets[i] + k - 1] = Fraction(cut.coefficient(i, k))
        tableau.add_constraint(coeffs, GE, Fraction(cut.d))
        history.append(tableau.objective)
        log.debug("Cut %d (a=%s, d=%d): objective %s", len(cuts), cut.a,
                  cut.d, tableau.objective)

        z = _z_from_prefix_weights(tableau, ms, offsets)
        violated = separate_gkc(instance, z).violated
        cut = None if violated is None else Cut(violated.a, violated.d)

    log.info("Knapsack-cover LP solved with %d cuts, cost %s", len(cuts),
             tableau.objective)
    return GkcLpResult(z, tableau.objective, tuple(cuts), tuple(history))


def normalize(instance: KcInstance,
              z: Sequence[Sequence[Fraction]]) -> FractionalSolution:
    """Bring a fractional solution into chain form: take prefix minima, then
    clamp values above 1 to 1"""
    if len(z) != instance.n:
        raise InvalidInstance(f"Fractional solution has {len(z)} rows for "
                              f"{instance.n} items")
    rows = []
    for row in z:
        out = []
        low: Optional[Fraction] = None
        for value in row:
            value = Fraction(value)
            low = value if low is None else min(low, value)
            out.append(min(low, Fraction(1)))
        rows.append(tuple(out))
    return FractionalSolution(tuple(rows))


def residual_context(instance: KcInstance,
                     z: FractionalSolution) -> ResidualContext:
    """Threshold a chain-form solution at 1/2"""
    a_bar = tuple(sum(1 for v in row if v >= HALF) for row in z.z)
    d_bar = max(instance.demand - sum(a_bar), 0)
    m_bar = tuple(min(c.m, a + d_bar) for c, a in zip(instance.items, a_bar))
    return ResidualContext(a_bar, d_bar, m_bar)


def _lower_envelope(points: Sequence[Tuple[int, Fraction]]
                    ) -> List[Tuple[int, Fraction]]:
    """Vertices of the lower convex hull of points sorted by x, collinear
    points dropped"""
    hull: List[Tuple[int, Fraction]] = []
    for x, y in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (x - x1) >= (y - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append((x, y))
    return hull


def solve_residual(instance: KcInstance,
                   ctx: ResidualContext) -> EnvelopeSolution:
    """Solve the doubled residual problem exactly.

    Under chain constraints, the cheapest way to place mass ``s`` on an item
    is the lower convex envelope of its cumulative residual marginals at
    ``s``. Buying envelope segments in order of slope (item index on ties)
    until the target mass is reached gives an optimal extreme point in
    which at most one item is fractional. The target is ``2 * D_bar``,
    capped at the total residual capacity.
    """
    instance = _list_model(instance, DEFAULT_MATERIALIZE_CAP)
    segments = []
    for i, (item, lo, hi) in enumerate(zip(instance.items, ctx.a_bar,
                                           ctx.m_bar)):
        base = item(lo)
        points = [(s, Fraction(item(lo + s) - base))
                  for s in range(hi - lo + 1)]
        hull = _lower_envelope(points)
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            segments.append(((y2 - y1) / (x2 - x1), i, x1, x2, y1, y2))
    segments.sort(key=lambda s: (s[0], s[1], s[2]))

    capacity = sum(ctx.widths)
    target = 2 * ctx.d_bar
    if target > capacity:
        log.warning("Residual mass capped at %d (doubled demand is %d)",
                    capacity, target)
        target = capacity

    bought = [0] * instance.n
    cost = Fraction(0)
    remaining = Fraction(target)
    fractional: Optional[Tuple[int, int, int, Fraction]] = None
    for slope, i, x1, x2, y1, y2 in segments:
        if remaining <= 0:
            break
        length = x2 - x1
        if length <= remaining:
            bought[i] = x2
            cost += y2 - y1
            remaining -= length
        else:
            theta = remaining / length
            fractional = (i, x1, x2, theta)
            cost += theta * (y2 - y1)
            remaining = Fraction(0)

    blocks = []
    for i, lo in enumerate(ctx.a_bar):
        if fractional is not None and fractional[0] == i:
            _, x1, x2, theta = fractional
            blocks.append(EnvelopeBlock(lo + x1 + 1, lo + x2, theta))
        else:
            blocks.append(EnvelopeBlock(lo + bought[i] + 1, lo + bought[i],
                                        Fraction(0)))
    return EnvelopeSolution(tuple(blocks), cost, target,
                            None if fractional is None else fractional[0])


def assemble_rounded(instance: KcInstance, z_bar: FractionalSolution,
                     ctx: ResidualContext,
                     envelope: EnvelopeSolution) -> IntegralSolution:
    """Combine the thresholded levels with the integral part of the residual
    solution, dropping the fractional item's residual block entirely

    :raises AssemblyInfeasible: if the result does not cover the demand
    """
    levels = []
    for i, (lo, block) in enumerate(zip(ctx.a_bar, envelope.blocks)):
        if i == envelope.fractional_item:
            levels.append(lo)
        else:
            levels.append(block.r - 1)
    solution = IntegralSolution(tuple(levels))
    if not is_feasible(instance, solution):
        raise AssemblyInfeasible(f"Rounded levels {solution.levels} cover "
                                 f"{sum(levels)} of {instance.demand}")
    return solution


def round_2apx(instance: KcInstance, cut_cap_factor: int = 1,
               materialize_cap: int = DEFAULT_MATERIALIZE_CAP
               ) -> RoundingResult:
    """Solve the LP, threshold, solve the residual problem, assemble"""
    instance = _list_model(instance, materialize_cap)
    lp = solve_gkc_lp(instance, cut_cap_factor, materialize_cap)
    z_bar = normalize(instance, lp.z.z)
    ctx = residual_context(instance, z_bar)
    envelope = solve_residual(instance, ctx)
    solution = assemble_rounded(instance, z_bar, ctx, envelope)
    cost = solution_cost(instance, solution)
    log.info("Rounded solution costs %s against LP cost %s", cost, lp.cost)
    return RoundingResult(solution, cost, lp, ctx, envelope)

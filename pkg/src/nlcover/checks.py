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

"""Certificate checking shared by the primal-dual solvers"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .engine import AuditRecord, Certificate
from .exceptions import InvalidInstance, LevelOutOfRange
from .model import (Cost, Instance, IntegralSolution, KcInstance,
                    bucket_layout, is_feasible, residual_demands,
                    solution_cost)

#: ``(start, end)`` segment span of every bucket of one item
Spans = List[Tuple[int, int]]


@dataclass(frozen=True)
class CheckFailure:
    """One failed check. ``raise_index`` and ``bucket`` (item, bucket) point
    at the offending ledger entry when there is one."""
    check: str
    message: str
    raise_index: Optional[int] = None
    bucket: Optional[Tuple[int, int]] = None

    def __str__(self):
        return f"{self.check}: {self.message}"


@dataclass(frozen=True)
class CheckReport:
    failures: Tuple[CheckFailure, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures

    def checks_failed(self) -> List[str]:
        return sorted({f.check for f in self.failures})

    def __str__(self):
        if self.ok:
            return "all checks passed"
        return "; ".join(str(f) for f in self.failures)


def check_certificate(instance: Instance, solution: IntegralSolution,
                      primal_cost: Cost, certificate: Certificate,
                      factor: int) -> CheckReport:
    """Check a primal-dual result exactly against a prepared instance.

    Checks primal feasibility, the stated cost, the residual demand of
    every raise against the levels it was made at, the dual objective, and
    ``primal <= factor * dual``. With the rates of an audited ledger it also
    checks that every positive raise pours exactly the active width of each
    active item into buckets of its active range, dual feasibility by
    replaying the ledger, tightness of every taken bucket, and
    ``sum tau * z <= factor * residual`` for every positive raise.

    Without recorded levels, a residual only has to stay within the demand
    (of its point, for UFP-Cover) and, for Knapsack-Cover, must not grow
    from one raise to the next.

    :param factor: 2 for Knapsack-Cover, 4 for UFP-Cover
    """
    primal_report = check_solution(instance, solution, primal_cost)
    try:
        actual_cost = solution_cost(instance, solution)
    except (InvalidInstance, LevelOutOfRange):
        return primal_report
    failures: List[CheckFailure] = list(primal_report.failures)
    layouts = [bucket_layout(c) for c in instance.costs]
    spans = [_spans(layout) for layout in layouts]

    failures.extend(_check_residuals(instance, spans, certificate.raises))

    dual = Fraction(0)
    for index, record in enumerate(certificate.raises):
        if record.delta < 0:
            failures.append(CheckFailure(
                'dual-feasibility', f"negative raise {record.delta}", index))
        dual += record.delta * record.residual
    if dual != certificate.dual_objective:
        failures.append(CheckFailure(
            'dual-objective', f"ledger sums to {dual}, certificate states "
            f"{certificate.dual_objective}"))
    if actual_cost > factor * certificate.dual_objective:
        failures.append(CheckFailure(
            'ratio', f"primal cost {actual_cost} exceeds {factor} x dual "
            f"objective {certificate.dual_objective}"))

    unaudited = [k for k, r in enumerate(certificate.raises)
                 if r.tau is None]
    if unaudited:
        failures.append(CheckFailure(
            'audit', f"{len(unaudited)} raise(s) carry no rates (solve with "
            "audit on)", unaudited[0]))
        return CheckReport(tuple(failures))

    fills: Dict[Tuple[int, int], Fraction] = {}
    for index, record in enumerate(certificate.raises):
        assert record.tau is not None
        for i, j, rate in record.tau:
            if not (0 <= i < len(layouts) and 1 <= j <= len(layouts[i])):
                failures.append(CheckFailure(
                    'dual-feasibility', f"rate for unknown bucket {j} of "
                    f"item {i}", index, (i, j)))
                continue
            fills[(i, j)] = fills.get((i, j), Fraction(0)) + \
                record.delta * rate
        if record.delta > 0 and record.levels is not None:
            failures.extend(_check_rates(instance, spans, record, index))

    taken = _taken_buckets(layouts, solution.levels)
    for i, layout in enumerate(layouts):
        for j, (_, capacity) in enumerate(layout, start=1):
            fill = fills.get((i, j), Fraction(0))
            if fill > capacity:
                failures.append(CheckFailure(
                    'dual-feasibility', f"bucket {j} of item {i} filled to "
                    f"{fill} beyond capacity {capacity}", bucket=(i, j)))
            elif (i, j) in taken and fill != capacity:
                failures.append(CheckFailure(
                    'tightness', f"taken bucket {j} of item {i} filled to "
                    f"{fill} of {capacity}", bucket=(i, j)))

    for index, record in enumerate(certificate.raises):
        if record.delta <= 0 or record.tau is None:
            continue
        load = sum(rate for i, j, rate in record.tau if (i, j) in taken)
        if load > factor * record.residual:
            failures.append(CheckFailure(
                'raise-bound', f"taken rate {load} exceeds {factor} x "
                f"residual {record.residual}", index))

    return CheckReport(tuple(failures))


def _spans(layout: Sequence[Tuple[int, Fraction]]) -> Spans:
    spans = []
    start = 1
    for width, _ in layout:
        spans.append((start, start + width - 1))
        start += width
    return spans


def _point_demand(instance: Instance, t: Optional[int]) -> Optional[int]:
    """Demand the raise answers to: ``D`` for Knapsack-Cover, ``D_t`` for
    UFP-Cover, ``None`` if ``t`` is not a point of the instance"""
    if isinstance(instance, KcInstance):
        return instance.demand
    if t is None or not 1 <= t <= instance.k:
        return None
    return instance.demands[t - 1]


def _active_items(instance: Instance, t: Optional[int]) -> List[int]:
    if isinstance(instance, KcInstance):
        return list(range(instance.n))
    assert t is not None
    return instance.covering(t)


def _check_residuals(instance: Instance, spans: Sequence[Spans],
                     raises: Sequence[AuditRecord]) -> List[CheckFailure]:
    """Every residual must be the residual demand left by the levels of its
    raise. Levels may only grow along the ledger."""
    failures = []
    kc = isinstance(instance, KcInstance)
    previous_levels: Optional[Tuple[int, ...]] = None
    previous_residual: Optional[int] = None
    for index, record in enumerate(raises):
        demand = _point_demand(instance, record.t)
        if demand is None:
            failures.append(CheckFailure(
                'residual', f"raise names no point of the instance "
                f"(t = {record.t})", index))
            continue
        if record.residual < 0 or record.residual > demand:
            failures.append(CheckFailure(
                'residual', f"residual {record.residual} outside 0..{demand}",
                index))
        if kc and previous_residual is not None and \
                record.residual > previous_residual:
            failures.append(CheckFailure(
                'residual', f"residual grows from {previous_residual} to "
                f"{record.residual}", index))
        previous_residual = record.residual

        if record.levels is None:
            continue
        levels = record.levels
        if len(levels) != instance.n or any(
                not 0 <= a <= (s[-1][1] if s else 0)
                for a, s in zip(levels, spans)):
            failures.append(CheckFailure(
                'levels', f"levels {list(levels)} do not fit the items",
                index))
            continue
        if previous_levels is not None and any(
                a < b for a, b in zip(levels, previous_levels)):
            failures.append(CheckFailure(
                'levels', f"levels drop from {list(previous_levels)} to "
                f"{list(levels)}", index))
        previous_levels = levels
        if kc:
            expected = max(demand - sum(levels), 0)
        else:
            assert record.t is not None
            expected = residual_demands(instance, levels)[record.t - 1]
        if record.residual != expected:
            failures.append(CheckFailure(
                'residual', f"residual {record.residual} but levels "
                f"{list(levels)} leave {expected}", index))
    return failures


def _check_rates(instance: Instance, spans: Sequence[Spans],
                 record: AuditRecord, index: int) -> List[CheckFailure]:
    """A positive raise pours, for every active item, exactly the width of
    its active range ``a_i + 1 .. min(m_i, a_i + residual)``, and only into
    buckets overlapping that range"""
    assert record.tau is not None and record.levels is not None
    failures = []
    if _point_demand(instance, record.t) is None or \
            len(record.levels) != instance.n:
        return failures
    active = set(_active_items(instance, record.t))
    poured: Dict[int, int] = {}
    for i, j, rate in record.tau:
        if not (0 <= i < len(spans) and 1 <= j <= len(spans[i])):
            continue
        start, end = spans[i][j - 1]
        level = record.levels[i]
        if i not in active:
            failures.append(CheckFailure(
                'raise-rates', f"item {i} is not active in this raise",
                index, (i, j)))
        elif rate <= 0 or end <= level or \
                start > level + record.residual:
            failures.append(CheckFailure(
                'raise-rates', f"rate {rate} for bucket {j} of item {i} "
                f"outside its active range", index, (i, j)))
        poured[i] = poured.get(i, 0) + rate
    for i in sorted(active):
        m = spans[i][-1][1] if spans[i] else 0
        width = min(m, record.levels[i] + record.residual) - record.levels[i]
        if poured.get(i, 0) != max(width, 0):
            failures.append(CheckFailure(
                'raise-rates', f"rates of item {i} sum to {poured.get(i, 0)}"
                f", its active width is {width}", index))
    return failures


def _taken_buckets(layouts: Sequence[Sequence[Tuple[int, Fraction]]],
                   levels: Sequence[int]) -> set:
    """Buckets containing at least one segment at or below the item's
    level"""
    taken = set()
    for i, (layout, level) in enumerate(zip(layouts, levels)):
        start = 1
        for j, (width, _) in enumerate(layout, start=1):
            if start > level:
                break
            taken.add((i, j))
            start += width
    return taken


def check_solution(instance: Instance, solution: IntegralSolution,
                   stated_cost: Optional[Cost] = None) -> CheckReport:
    """Check feasibility of a solution and, when given, its stated cost"""
    try:
        actual_cost = solution_cost(instance, solution)
    except (InvalidInstance, LevelOutOfRange) as e:
        return CheckReport((CheckFailure('feasibility', str(e)),))
    failures = []
    if not is_feasible(instance, solution):
        failures.append(CheckFailure('feasibility',
                                     "solution does not cover the demand"))
    if stated_cost is not None and stated_cost != actual_cost:
        failures.append(CheckFailure(
            'cost', f"stated cost {stated_cost} differs from actual cost "
            f"{actual_cost}"))
    return CheckReport(tuple(failures))

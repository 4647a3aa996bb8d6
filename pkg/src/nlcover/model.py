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

"""Domain types for non-linear covering: costs, cost functions, instances and
integral solutions, plus validation and normalization of instances"""

import bisect
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import (Any, Dict, FrozenSet, Iterable, List, Optional, Sequence,
                    Tuple, Union)

from .exceptions import (InfeasibleError, InvalidInstance, LevelOutOfRange,
                         MaterializationTooLarge)

log = logging.getLogger('nlcover')

#: Largest m that :func:`expand_steps_to_list` will materialize by default
DEFAULT_MATERIALIZE_CAP = 100000

LIST_MODEL = 'list'
STEPS_MODEL = 'steps'


class Infinite:
    """The infinite cost. There is exactly one instance, :data:`INF`.

    It compares strictly greater than every finite value, and adding anything
    to it gives :data:`INF` again. It is never mixed into arithmetic beyond
    that."""

    _instance: Optional['Infinite'] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return 'INF'

    def __str__(self):
        return 'inf'

    def __reduce__(self):
        return (Infinite, ())

    def __eq__(self, other):
        return other is self

    def __ne__(self, other):
        return other is not self

    def __hash__(self):
        return hash('nlcover.INF')

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__


#: The infinite cost
INF = Infinite()

#: A cost value: an exact non-negative rational or :data:`INF`
Cost = Union[Fraction, Infinite]


def to_cost(value: Any) -> Cost:
    """Coerce an int, :class:`~fractions.Fraction` or :data:`INF` to a
    :data:`Cost`

    :raises InvalidInstance: if the value is negative or of the wrong type
    """
    if value is INF:
        return INF
    # bool is an int subclass, but True is not a cost
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise InvalidInstance(f"Cost {value!r} is not an integer, rational "
                              "or infinite")
    value = Fraction(value)
    if value < 0:
        raise InvalidInstance(f"Cost {value} is negative")
    return value


def marginal(upper: Cost, lower: Cost) -> Cost:
    """The marginal cost ``upper - lower`` of one step of a non-decreasing
    cost function. A step into :data:`INF` has marginal :data:`INF`, a step
    after it has marginal 0."""
    if upper is INF:
        return Fraction(0) if lower is INF else INF
    if lower is INF:
        raise InvalidInstance("Cost function decreases after an infinite "
                              "value")
    return upper - lower


@dataclass(frozen=True)
class Piece:
    """One constant piece of a Steps cost function: ``f(j) = value`` for every
    ``j`` after the previous piece's ``upto`` up to and including ``upto``"""
    upto: int
    value: Cost


@dataclass(frozen=True)
class CostFunction:
    """A non-decreasing cost curve ``f(1..m)`` with implicit ``f(0) = 0``.

    Either in List form (every value given) or in Steps form (piecewise
    constant). Use :meth:`from_values` or :meth:`from_pieces` rather than the
    constructor. Construction does not check monotonicity; that is the job of
    :func:`validate`, so malformed input can still be reported in full.
    """
    model: str
    values: Tuple[Cost, ...] = ()
    pieces: Tuple[Piece, ...] = ()
    _uptos: Tuple[int, ...] = field(default=(), init=False, repr=False,
                                    compare=False)

    def __post_init__(self):
        if self.model not in (LIST_MODEL, STEPS_MODEL):
            raise InvalidInstance(f"Unknown cost model {self.model!r}")
        object.__setattr__(self, 'values', tuple(self.values))
        object.__setattr__(self, 'pieces', tuple(self.pieces))
        object.__setattr__(self, '_uptos',
                           tuple(p.upto for p in self.pieces))

    @classmethod
    def from_values(cls, values: Iterable[Any]) -> 'CostFunction':
        """Create a List-form cost function from ``f(1), ..., f(m)``"""
        return cls(LIST_MODEL, values=tuple(to_cost(v) for v in values))

    @classmethod
    def from_pieces(cls, pieces: Iterable[Tuple[int, Any]]) -> 'CostFunction':
        """Create a Steps-form cost function from ``(upto, value)`` pairs"""
        return cls(STEPS_MODEL, pieces=tuple(Piece(int(upto), to_cost(value))
                                             for upto, value in pieces))

    @property
    def is_steps(self) -> bool:
        return self.model == STEPS_MODEL

    @property
    def m(self) -> int:
        """Number of segments"""
        if self.is_steps:
            return self._uptos[-1] if self._uptos else 0
        return len(self.values)

    def __call__(self, j: int) -> Cost:
        """Evaluate ``f(j)``

        :raises LevelOutOfRange: if ``j`` is not in ``0..m``
        """
        if j < 0 or j > self.m:
            raise LevelOutOfRange(f"Level {j} outside 0..{self.m}")
        if j == 0:
            return Fraction(0)
        if self.is_steps:
            return self.pieces[bisect.bisect_left(self._uptos, j)].value
        return self.values[j - 1]

    def marginals(self) -> Tuple[Cost, ...]:
        """Per-segment marginals ``g_j = f(j) - f(j-1)`` (materializes Steps
        form, so keep ``m`` small)"""
        result = []
        previous: Cost = Fraction(0)
        for j in range(1, self.m + 1):
            current = self(j)
            result.append(marginal(current, previous))
            previous = current
        return tuple(result)

    def finite_prefix(self) -> int:
        """Number of leading segments with finite cost"""
        if self.is_steps:
            previous = 0
            for piece in self.pieces:
                if piece.value is INF:
                    return previous
                previous = piece.upto
            return previous
        for j, value in enumerate(self.values):
            if value is INF:
                return j
        return len(self.values)

    def truncated(self, cap: int) -> 'CostFunction':
        """Drop every segment at or beyond the first infinite value and every
        segment beyond ``cap``. Returns ``self`` when nothing changes."""
        keep = min(self.finite_prefix(), max(cap, 0))
        if keep == self.m:
            return self
        if not self.is_steps:
            return CostFunction(LIST_MODEL, values=self.values[:keep])
        pieces = []
        for piece in self.pieces:
            if piece.upto >= keep:
                if keep > (pieces[-1].upto if pieces else 0):
                    pieces.append(Piece(keep, piece.value))
                break
            pieces.append(piece)
        return CostFunction(STEPS_MODEL, pieces=tuple(pieces))

    def problems(self) -> List[str]:
        """Describe every violated invariant (empty if well-formed)"""
        found = []
        if self.is_steps:
            previous_upto = 0
            previous_value: Optional[Cost] = None
            for piece in self.pieces:
                if piece.upto <= previous_upto:
                    found.append(f"piece ending at {piece.upto} does not "
                                 f"extend past {previous_upto}")
                if previous_value is not None and \
                        not piece.value > previous_value:
                    found.append(f"piece values not strictly increasing at "
                                 f"upto={piece.upto}")
                previous_upto = piece.upto
                previous_value = piece.value
            return found
        previous: Cost = Fraction(0)
        for j, value in enumerate(self.values, start=1):
            if value < previous:
                found.append(f"f({j}) = {value} is below f({j - 1}) = "
                             f"{previous}")
            previous = value
        return found


@dataclass(frozen=True)
class OracleCost:
    """A cost function in the oracle model, described by a registered family
    name and its parameters. It must be compressed before solving."""
    family: str
    m: int
    params: Tuple[Tuple[str, Cost], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'params', tuple(sorted(self.params)))

    def param_dict(self) -> Dict[str, Cost]:
        return dict(self.params)


#: Costs of one item
ItemCost = Union[CostFunction, OracleCost]


def _require_list_or_steps(cost: ItemCost, index: int) -> CostFunction:
    if not isinstance(cost, CostFunction):
        raise InvalidInstance(f"Item {index} uses the oracle model; compress "
                              "it first")
    return cost


@dataclass(frozen=True)
class KcInstance:
    """A Non-Linear Knapsack-Cover instance: cover ``demand`` with item
    levels at minimum total cost"""
    items: Tuple[ItemCost, ...]
    demand: int

    def __post_init__(self):
        object.__setattr__(self, 'items', tuple(self.items))

    kind = 'kc'

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def costs(self) -> Tuple[ItemCost, ...]:
        return self.items

    def replace_costs(self, costs: Sequence[ItemCost]) -> 'KcInstance':
        return KcInstance(tuple(costs), self.demand)


@dataclass(frozen=True)
class UfpItem:
    """An item of a UFP-cover instance: a cost function and the inclusive
    1-based interval ``[s, e]`` of points it covers"""
    costs: ItemCost
    interval: Tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, 'interval', tuple(self.interval))

    def covers(self, t: int) -> bool:
        return self.interval[0] <= t <= self.interval[1]


@dataclass(frozen=True)
class UfpInstance:
    """A Non-Linear UFP-Cover instance on the points ``1..k``. Point ``t``
    has demand ``demands[t - 1]``."""
    items: Tuple[UfpItem, ...]
    demands: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'items', tuple(self.items))
        object.__setattr__(self, 'demands', tuple(self.demands))

    kind = 'ufp'

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def k(self) -> int:
        return len(self.demands)

    @property
    def costs(self) -> Tuple[ItemCost, ...]:
        return tuple(item.costs for item in self.items)

    def covering(self, t: int) -> List[int]:
        """Indices of the items whose interval contains point ``t``"""
        return [i for i, item in enumerate(self.items) if item.covers(t)]

    def replace_costs(self, costs: Sequence[ItemCost]) -> 'UfpInstance':
        return UfpInstance(
            tuple(UfpItem(c, item.interval)
                  for c, item in zip(costs, self.items)),
            self.demands,
        )


Instance = Union[KcInstance, UfpInstance]


@dataclass(frozen=True)
class IntegralSolution:
    """Integral levels ``x_i``: segment ``j`` of item ``i`` is taken iff
    ``j <= x_i``"""
    levels: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'levels', tuple(self.levels))


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate`. ``errors`` are malformations,
    ``infeasibilities`` mean the instance is well-formed but cannot be covered
    at finite cost."""
    errors: Tuple[str, ...] = ()
    infeasibilities: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors and not self.infeasibilities

    @property
    def problems(self) -> Tuple[str, ...]:
        return self.errors + self.infeasibilities


def _cost_errors(costs: ItemCost, index: int) -> List[str]:
    if isinstance(costs, OracleCost):
        return [f"item {index}: oracle-model costs must be compressed before "
                "solving"]
    return [f"item {index}: {p}" for p in costs.problems()]


def _is_demand(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and \
        value >= 0


def validate(instance: Instance) -> ValidationReport:
    """Check every invariant of an instance, including feasibility with
    finite cost. Never raises; the report carries the failures."""
    errors: List[str] = []
    infeasible: List[str] = []
    if isinstance(instance, KcInstance):
        if not _is_demand(instance.demand):
            errors.append(f"demand {instance.demand!r} is not a "
                          "non-negative integer")
        for i, costs in enumerate(instance.items):
            errors.extend(_cost_errors(costs, i))
        if not errors:
            capacity = sum(c.finite_prefix() for c in instance.items)
            if capacity < instance.demand:
                infeasible.append(f"finite-cost capacity {capacity} is below "
                                  f"demand {instance.demand}")
        return ValidationReport(tuple(errors), tuple(infeasible))

    for t, demand in enumerate(instance.demands, start=1):
        if not _is_demand(demand):
            errors.append(f"demand at point {t} ({demand!r}) is not a "
                          "non-negative integer")
    for i, item in enumerate(instance.items):
        s, e = item.interval
        if not 1 <= s <= e <= instance.k:
            errors.append(f"item {i}: interval [{s}, {e}] not within "
                          f"[1, {instance.k}]")
        errors.extend(_cost_errors(item.costs, i))
    if not errors:
        for t, demand in enumerate(instance.demands, start=1):
            if demand == 0:
                continue
            capacity = sum(instance.items[i].costs.finite_prefix()
                           for i in instance.covering(t))
            if capacity < demand:
                infeasible.append(f"point {t}: finite-cost capacity "
                                  f"{capacity} is below demand {demand}")
    return ValidationReport(tuple(errors), tuple(infeasible))


def demand_cap(instance: Instance) -> int:
    """Largest demand any single item could usefully cover"""
    if isinstance(instance, KcInstance):
        return instance.demand
    return max(instance.demands, default=0)


def normalize_instance(instance: Instance) -> Instance:
    """Trim every segment at or beyond an item's first infinite value and
    clamp every ``m_i`` to :func:`demand_cap`. Idempotent. Assumes the
    instance has List or Steps costs only."""
    cap = demand_cap(instance)
    costs = [_require_list_or_steps(c, i).truncated(cap)
             for i, c in enumerate(instance.costs)]
    if all(new is old for new, old in zip(costs, instance.costs)):
        return instance
    return instance.replace_costs(costs)


def prepare(instance: Instance) -> Instance:
    """Validate and normalize an instance for the solvers

    :raises InvalidInstance: if the instance is malformed
    :raises InfeasibleError: if it cannot be covered at finite cost
    """
    report = validate(instance)
    if report.errors:
        raise InvalidInstance("; ".join(report.errors))
    if report.infeasibilities:
        raise InfeasibleError("; ".join(report.infeasibilities))
    return normalize_instance(instance)


def from_classic_kc(capacities: Sequence[int], costs: Sequence[Any],
                    demand: int) -> KcInstance:
    """Build the non-linear instance of a classical Knapsack-Cover instance:
    item ``i`` costs ``c_i`` for any level from 1 to ``min(u_i, D)``.
    Levels beyond ``u_i`` are left out rather than priced at infinity.

    :raises InvalidInstance: on a zero capacity or mismatched lengths
    """
    if len(capacities) != len(costs):
        raise InvalidInstance("Capacities and costs differ in length")
    items = []
    for i, (u, c) in enumerate(zip(capacities, costs)):
        if u < 1:
            raise InvalidInstance(f"Item {i} has capacity {u}; capacities "
                                  "must be at least 1")
        c = to_cost(c)
        items.append(CostFunction.from_values([c] * min(u, demand)))
    return KcInstance(tuple(items), demand)


def expand_steps_to_list(cf: CostFunction,
                         cap: int = DEFAULT_MATERIALIZE_CAP) -> CostFunction:
    """Materialize a Steps cost function into List form with identical
    values. List-form input is returned unchanged.

    :raises MaterializationTooLarge: if ``m`` exceeds ``cap``
    """
    if not cf.is_steps:
        return cf
    if cf.m > cap:
        raise MaterializationTooLarge(f"Cannot materialize {cf.m} segments "
                                      f"(cap is {cap})")
    values: List[Cost] = []
    for piece in cf.pieces:
        values.extend([piece.value] * (piece.upto - len(values)))
    return CostFunction(LIST_MODEL, values=tuple(values))


def bucket_layout(cf: CostFunction) -> Tuple[Tuple[int, Fraction], ...]:
    """The water-filling buckets of a finite cost function as
    ``(width, capacity)`` pairs: one unit-width bucket per segment in List
    form, one bucket per piece in Steps form (a constant piece's whole jump
    sits on its first segment)

    :raises InvalidInstance: if any cost is infinite (normalize first)
    """
    if cf.finite_prefix() != cf.m:
        raise InvalidInstance("Bucket layout needs finite costs; normalize "
                              "the instance first")
    if not cf.is_steps:
        return tuple((1, g) for g in cf.marginals())
    layout = []
    previous_upto = 0
    previous_value = Fraction(0)
    for piece in cf.pieces:
        layout.append((piece.upto - previous_upto,
                       piece.value - previous_value))
        previous_upto = piece.upto
        previous_value = piece.value
    return tuple(layout)


def _check_levels(instance: Instance, sol: IntegralSolution) -> None:
    if len(sol.levels) != instance.n:
        raise InvalidInstance(f"Solution has {len(sol.levels)} levels for "
                              f"{instance.n} items")
    for i, (x, costs) in enumerate(zip(sol.levels, instance.costs)):
        costs = _require_list_or_steps(costs, i)
        if x < 0 or x > costs.m:
            raise LevelOutOfRange(f"Level {x} of item {i} outside "
                                  f"0..{costs.m}")


def solution_cost(instance: Instance, sol: IntegralSolution) -> Cost:
    """Total cost ``sum_i f_i(x_i)``, :data:`INF` if any term is infinite

    :raises LevelOutOfRange: if some ``x_i`` exceeds ``m_i``
    """
    _check_levels(instance, sol)
    total: Cost = Fraction(0)
    for x, costs in zip(sol.levels, instance.costs):
        total = total + costs(x)
    return total


def coverage(instance: UfpInstance, levels: Sequence[int]) -> List[int]:
    """Total level covering each point ``1..k`` (index ``t - 1``)"""
    covered = [0] * instance.k
    for x, item in zip(levels, instance.items):
        s, e = item.interval
        for t in range(s, e + 1):
            covered[t - 1] += x
    return covered


def residual_demands(instance: UfpInstance,
                     levels: Sequence[int]) -> List[int]:
    """``D_t(a) = max(D_t - sum_{i: t in I_i} a_i, 0)`` for every point"""
    return [max(d - c, 0)
            for d, c in zip(instance.demands, coverage(instance, levels))]


def is_feasible(instance: Instance, sol: IntegralSolution) -> bool:
    """Whether the levels cover the demand (every point's demand for UFP)"""
    if len(sol.levels) != instance.n:
        return False
    if isinstance(instance, KcInstance):
        return sum(sol.levels) >= instance.demand
    return not any(residual_demands(instance, sol.levels))


def as_ufp(instance: KcInstance) -> UfpInstance:
    """A Knapsack-Cover instance as UFP-cover on a single point"""
    return UfpInstance(tuple(UfpItem(c, (1, 1)) for c in instance.items),
                       (instance.demand,))


@dataclass(frozen=True)
class CompressedUfp:
    """Result of :func:`compress_coordinates`

    ``points[t - 1]`` lists the original points merged into new point ``t``
    and ``representatives[t - 1]`` is the first of them carrying the run's
    maximum demand.
    """
    instance: UfpInstance
    points: Tuple[Tuple[int, ...], ...]
    representatives: Tuple[int, ...]

    def original_point(self, t: int) -> int:
        return self.representatives[t - 1]


def compress_coordinates(instance: UfpInstance) -> CompressedUfp:
    """Merge each maximal run of points covered by the same item set into a
    single point carrying the run's maximum demand. Points covered by no
    item are dropped (a validated instance has zero demand there). Item
    levels mean the same on both instances, so feasibility carries over in
    both directions."""
    runs: List[Tuple[FrozenSet[int], List[int]]] = []
    for t in range(1, instance.k + 1):
        cover = frozenset(instance.covering(t))
        if runs and runs[-1][0] == cover:
            runs[-1][1].append(t)
        else:
            runs.append((cover, [t]))

    new_index: Dict[int, int] = {}
    points = []
    representatives = []
    demands = []
    for cover, run in runs:
        if not cover:
            continue
        points.append(tuple(run))
        best = max(instance.demands[t - 1] for t in run)
        representatives.append(next(t for t in run
                                    if instance.demands[t - 1] == best))
        demands.append(best)
        for t in run:
            new_index[t] = len(points)

    items = tuple(UfpItem(item.costs, (new_index[item.interval[0]],
                                       new_index[item.interval[1]]))
                  for item in instance.items)
    compressed = UfpInstance(items, tuple(demands))
    log.debug("Compressed %d points into %d", instance.k, compressed.k)
    return CompressedUfp(compressed, tuple(points), tuple(representatives))


@dataclass(frozen=True)
class FractionalSolution:
    """Per-item fractional segment values ``z_i1..z_im``"""
    z: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, 'z', tuple(tuple(Fraction(v) for v in row)
                                            for row in self.z))

    def is_chain(self) -> bool:
        """Whether ``1 >= z_i1 >= ... >= z_im >= 0`` holds for every item"""
        for row in self.z:
            previous = Fraction(1)
            for value in row:
                if value > previous or value < 0:
                    return False
                previous = value
        return True

    def cost(self, instance: Instance) -> Fraction:
        """``sum_ij g_ij z_ij`` against a normalized List-form instance"""
        total = Fraction(0)
        for row, costs in zip(self.z, instance.costs):
            for value, g in zip(row, _require_list_or_steps(costs, 0)
                                .marginals()):
                total += value * g
        return total

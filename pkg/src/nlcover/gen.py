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

"""Seeded random instance generators for tests and benchmarks"""

import dataclasses
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from .exceptions import UnsatisfiableSpec
from .model import (INF, Cost, CostFunction, Instance, ItemCost, KcInstance,
                    OracleCost, UfpInstance, UfpItem, validate)

log = logging.getLogger('nlcover')

COST_FAMILIES = ('uniform', 'facility', 'quadratic', 'steps', 'adversarial',
                 'oracle')

# Draws before a kc spec is declared unsatisfiable
_ATTEMPTS = 64

Range = Tuple[int, int]


def _parse_range(raw: Any, name: str) -> Range:
    if isinstance(raw, int) and not isinstance(raw, bool):
        return (raw, raw)
    if isinstance(raw, (list, tuple)) and len(raw) == 2 and \
            all(isinstance(v, int) and not isinstance(v, bool) for v in raw):
        return (raw[0], raw[1])
    raise UnsatisfiableSpec(f"'{name}' must be an integer or a [low, high] "
                            "pair")


@dataclass(frozen=True)
class GenSpec:
    """What to generate. Ranges are inclusive ``(low, high)`` pairs; a
    single integer stands for ``(v, v)``.

    For UFP, each point's demand is drawn from ``demand`` and then clamped to
    the capacity of the items covering it; uncovered points get demand 0.
    """
    kind: str = 'kc'
    n: Range = (1, 6)
    m: Range = (1, 6)
    k: Range = (1, 8)
    demand: Range = (0, 20)
    family: str = 'uniform'
    max_marginal: int = 20
    #: Family used by ``family = 'oracle'``
    oracle_family: str = 'polynomial'
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ('kc', 'ufp'):
            raise UnsatisfiableSpec(f"Unknown instance kind {self.kind!r}")
        if self.family not in COST_FAMILIES:
            raise UnsatisfiableSpec(f"Unknown cost family {self.family!r}")
        for name in ('n', 'm', 'k', 'demand'):
            object.__setattr__(self, name,
                               _parse_range(getattr(self, name), name))
            low, high = getattr(self, name)
            if low > high or low < 0:
                raise UnsatisfiableSpec(f"Range {name} = [{low}, {high}] is "
                                        "empty or negative")
        if self.n[0] < 1 or self.m[0] < 1 or self.k[0] < 1:
            raise UnsatisfiableSpec("n, m and k must be at least 1")
        if self.max_marginal < 1:
            raise UnsatisfiableSpec("max_marginal must be at least 1")
        if self.kind == 'kc' and self.demand[0] > self.n[1] * self.m[1]:
            raise UnsatisfiableSpec(f"Demand {self.demand[0]} exceeds the "
                                    "largest possible capacity "
                                    f"{self.n[1] * self.m[1]}")

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> 'GenSpec':
        """Build a spec from decoded JSON

        :raises UnsatisfiableSpec: on unknown keys or bad values
        """
        if not isinstance(raw, dict):
            raise UnsatisfiableSpec("Spec must be a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(raw) - names)
        if unknown:
            raise UnsatisfiableSpec(f"Unknown spec key(s): "
                                    f"{', '.join(unknown)}")
        values: Dict[str, Any] = {}
        for key, value in raw.items():
            if key in ('n', 'm', 'k', 'demand'):
                values[key] = _parse_range(value, key)
            elif key in ('kind', 'family', 'oracle_family'):
                if not isinstance(value, str):
                    raise UnsatisfiableSpec(f"'{key}' must be a string")
                values[key] = value
            else:
                if isinstance(value, bool) or not isinstance(value, int):
                    raise UnsatisfiableSpec(f"'{key}' must be an integer")
                values[key] = value
        return cls(**values)

    def with_seed(self, seed: int) -> 'GenSpec':
        return dataclasses.replace(self, seed=seed)


def _cumulative(marginals: List[int]) -> CostFunction:
    values = []
    total = 0
    for g in marginals:
        total += g
        values.append(total)
    return CostFunction.from_values(values)


def _item_costs(spec: GenSpec, rng: random.Random, m: int) -> ItemCost:
    top = spec.max_marginal
    if spec.family == 'uniform':
        return _cumulative([rng.randint(0, top) for _ in range(m)])
    if spec.family == 'facility':
        b = rng.randint(0, top)
        c = rng.randint(0, max(1, top // 4))
        return _cumulative([b + c] + [c] * (m - 1))
    if spec.family == 'quadratic':
        q = rng.randint(1, max(1, top // 8))
        c = rng.randint(0, max(1, top // 4))
        b = rng.randint(0, 2 * q - 1)
        return CostFunction.from_values([b + c * j + q * j * j
                                         for j in range(1, m + 1)])
    if spec.family == 'steps':
        cuts = sorted(rng.sample(range(1, m), rng.randint(0, m - 1))) + [m]
        value = rng.randint(0, top)
        pieces = []
        for upto in cuts:
            pieces.append((upto, value))
            value += rng.randint(1, top)
        return CostFunction.from_pieces(pieces)
    if spec.family == 'adversarial':
        first = top * rng.randint(2, 4)
        return _cumulative([first] + [rng.randint(0, 1)
                                      for _ in range(m - 1)])
    params: Dict[str, Cost]
    if spec.oracle_family == 'polynomial':
        params = {'c': Fraction(rng.randint(1, top)),
                  'p': Fraction(rng.randint(1, 3))}
    elif spec.oracle_family == 'facility':
        params = {'b': Fraction(rng.randint(0, top)),
                  'c': Fraction(rng.randint(1, top))}
    elif spec.oracle_family == 'quadratic':
        params = {'b': Fraction(0), 'c': Fraction(rng.randint(0, top)),
                  'q': Fraction(rng.randint(1, top))}
    else:
        params = {}
    return OracleCost(spec.oracle_family, m, tuple(params.items()))


def _generate_kc(spec: GenSpec, rng: random.Random) -> KcInstance:
    for _ in range(_ATTEMPTS):
        n = rng.randint(*spec.n)
        ms = [rng.randint(*spec.m) for _ in range(n)]
        capacity = sum(ms)
        if capacity < spec.demand[0]:
            continue
        items = tuple(_item_costs(spec, rng, m) for m in ms)
        demand = rng.randint(spec.demand[0], min(spec.demand[1], capacity))
        return KcInstance(items, demand)
    raise UnsatisfiableSpec(f"No draw reached demand {spec.demand[0]} in "
                            f"{_ATTEMPTS} attempts")


def _generate_ufp(spec: GenSpec, rng: random.Random) -> UfpInstance:
    n = rng.randint(*spec.n)
    k = rng.randint(*spec.k)
    items = []
    for _ in range(n):
        m = rng.randint(*spec.m)
        s = rng.randint(1, k)
        e = rng.randint(s, k)
        items.append(UfpItem(_item_costs(spec, rng, m), (s, e)))
    demands = []
    for t in range(1, k + 1):
        capacity = sum(item.costs.m for item in items if item.covers(t))
        demands.append(min(rng.randint(*spec.demand), capacity))
    return UfpInstance(tuple(items), tuple(demands))


def generate(spec: GenSpec) -> Instance:
    """Generate a feasible instance. A pure function of the spec, seed
    included.

    :raises UnsatisfiableSpec: if the spec cannot produce a feasible instance
    """
    rng = random.Random(spec.seed)
    if spec.kind == 'kc':
        instance: Instance = _generate_kc(spec, rng)
    else:
        instance = _generate_ufp(spec, rng)
    if spec.family != 'oracle':
        report = validate(instance)
        if not report.ok:
            raise UnsatisfiableSpec("Generated instance is not usable: " +
                                    "; ".join(report.problems))
    log.debug("Generated %s instance with %d items (seed %d)", spec.kind,
              instance.n, spec.seed)
    return instance


def random_oracle(seed: int, m: int, max_value: int = 1000,
                  infinite_tail: Optional[bool] = None) -> CostFunction:
    """A random non-decreasing cost curve over ``1..m`` for compression
    tests: a run of zeros, plateaus, rational steps and possibly an infinite
    tail. Returned in List form, which can be queried like an oracle."""
    rng = random.Random(seed)
    if infinite_tail is None:
        infinite_tail = rng.random() < 0.2
    zeros = rng.randint(0, m // 4)
    tail = rng.randint(1, max(1, m // 8)) if infinite_tail and m > 1 else 0
    values: List[Cost] = [Fraction(0)] * zeros
    value = Fraction(rng.randint(1, max_value), rng.randint(1, 8))
    while len(values) < m - tail:
        values.extend([value] * rng.randint(1, 4))
        value += Fraction(rng.randint(0, max_value), rng.randint(1, 8))
    values = values[:m - tail] + [INF] * tail
    return CostFunction.from_values(values)

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

"""Piecewise-constant compression of cost oracles.

A non-decreasing cost oracle over ``1..m`` is replaced by a Steps cost
function whose values are powers of ``1 + eps``, rounded up, so that
``f(j) <= f~(j) <= (1 + eps) f(j)`` everywhere. The number of pieces is
logarithmic in the ratio of the largest to the smallest positive cost.
"""

import logging
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Tuple
if sys.version_info < (3, 8):
    from typing_extensions import Protocol
else:
    from typing import Protocol

from .exceptions import (BoundViolated, InvalidEpsilon, LevelOutOfRange,
                         NonMonotoneOracle)
from .model import INF, Cost, CostFunction, to_cost

log = logging.getLogger('nlcover')

DEFAULT_MONOTONE_PROBES = 16
DEFAULT_SAMPLE_BUDGET = 64


class CostQuery(Protocol):
    def __call__(self, j: int) -> Any:
        ...


class CostOracle:
    """Point queries ``j -> f(j)`` for ``j`` in ``1..m``, with a call counter.

    Construction spot-checks monotonicity on ``probes`` random pairs and then
    resets the counter.

    :param func: The cost function
    :param m: Number of segments
    :param probes: Random pairs to spot-check
    :param seed: Seed for the spot check
    :raises NonMonotoneOracle: if a probed pair decreases
    """

    def __init__(self, func: CostQuery, m: int,
                 probes: int = DEFAULT_MONOTONE_PROBES, seed: int = 0):
        self.func = func
        self.m = m
        self.calls = 0
        if m >= 2:
            rng = random.Random(seed)
            for _ in range(probes):
                lo, hi = sorted(rng.sample(range(1, m + 1), 2))
                if self(lo) > self(hi):
                    raise NonMonotoneOracle(f"f({lo}) > f({hi})")
        self.calls = 0

    def __call__(self, j: int) -> Cost:
        if not 1 <= j <= self.m:
            raise LevelOutOfRange(f"Oracle queried at {j} outside "
                                  f"1..{self.m}")
        self.calls += 1
        return to_cost(self.func(j))


class PowerLadder:
    """Exact integer powers of ``base``, memoized"""

    def __init__(self, base: Fraction):
        self.base = base
        self._powers: Dict[int, Fraction] = {0: Fraction(1)}

    def power(self, k: int) -> Fraction:
        if k not in self._powers:
            step = 1 if k > 0 else -1
            self._powers[k] = self.power(k - step) * \
                (self.base if k > 0 else 1 / self.base)
        return self._powers[k]

    def ceil_exponent(self, value: Fraction) -> int:
        """Smallest ``k`` with ``base ** k >= value`` (``value > 0``)"""
        k = 0
        if value > 1:
            while self.power(k) < value:
                k += 1
        else:
            while self.power(k - 1) >= value:
                k -= 1
        return k

    def round_up(self, value: Fraction) -> Fraction:
        if value == 0:
            return Fraction(0)
        return self.power(self.ceil_exponent(value))


def _check_eps(eps: Any) -> Fraction:
    eps = Fraction(eps)
    if eps <= 0:
        raise InvalidEpsilon(f"Accuracy {eps} must be positive")
    return eps


def compress_function(oracle: CostOracle, eps: Any) -> CostFunction:
    """Compress an oracle to Steps form.

    Each piece starts at the first segment not yet covered, takes the rounded
    up value there, and extends by binary search to the last segment whose
    cost does not exceed that value. An infinite cost ends the function with
    one infinite piece.

    :raises InvalidEpsilon: if ``eps <= 0``
    :raises NonMonotoneOracle: if the search witnesses a decrease
    """
    ladder = PowerLadder(1 + _check_eps(eps))
    pieces: List[Tuple[int, Cost]] = []
    pos = 1
    while pos <= oracle.m:
        value = oracle(pos)
        if value is INF:
            pieces.append((oracle.m, INF))
            break
        rounded = ladder.round_up(value)
        lo, hi = pos, oracle.m
        while lo < hi:
            mid = (lo + hi + 1) // 2
            probe = oracle(mid)
            if probe < value:
                raise NonMonotoneOracle(f"f({mid}) = {probe} is below "
                                        f"f({pos}) = {value}")
            if probe <= rounded:
                lo = mid
            else:
                hi = mid - 1
        pieces.append((lo, rounded))
        pos = lo + 1
    log.debug("Compressed %d segments into %d pieces", oracle.m, len(pieces))
    return CostFunction.from_pieces(pieces)


@dataclass(frozen=True)
class CompressionReport:
    pieces: int
    bound: int
    samples: int


def piece_bound(oracle: CostOracle, compressed: CostFunction,
                eps: Any) -> int:
    """``ceil(log_{1+eps}(f_max / f_min)) + 2`` over the positive finite
    costs, plus one for an infinite tail"""
    ladder = PowerLadder(1 + _check_eps(eps))
    first_positive = None
    last_positive = None
    previous = 0
    for piece in compressed.pieces:
        if piece.value is not INF and piece.value > 0:
            if first_positive is None:
                first_positive = previous + 1
            last_positive = piece.upto
        previous = piece.upto
    bound = 2
    if first_positive is not None:
        f_min = Fraction(oracle(first_positive))
        f_max = Fraction(oracle(last_positive))
        bound += ladder.ceil_exponent(f_max / f_min)
    if compressed.pieces and compressed.pieces[-1].value is INF:
        bound += 1
    return bound


def verify_compression(oracle: CostOracle, compressed: CostFunction,
                       eps: Any, sample_budget: int = DEFAULT_SAMPLE_BUDGET,
                       seed: int = 0) -> CompressionReport:
    """Check ``f(j) <= f~(j) <= (1 + eps) f(j)`` at both ends of every piece
    and at ``sample_budget`` random segments, and check the piece count

    :raises InvalidEpsilon: if ``eps <= 0``
    :raises BoundViolated: with the first witness segment found
    """
    eps = _check_eps(eps)
    if compressed.m != oracle.m:
        raise BoundViolated(f"Compressed function has {compressed.m} "
                            f"segments, oracle has {oracle.m}", compressed.m)
    points = set()
    previous = 0
    for piece in compressed.pieces:
        points.update((previous + 1, piece.upto))
        previous = piece.upto
    rng = random.Random(seed)
    if oracle.m:
        points.update(rng.randint(1, oracle.m) for _ in range(sample_budget))

    for j in sorted(points):
        exact = oracle(j)
        approx = compressed(j)
        if exact is INF or approx is INF:
            if exact is not approx:
                raise BoundViolated(f"f({j}) = {exact} but compressed value "
                                    f"is {approx}", j)
            continue
        if approx < exact:
            raise BoundViolated(f"Compressed value {approx} is below "
                                f"f({j}) = {exact}", j)
        if approx > (1 + eps) * exact:
            raise BoundViolated(f"Compressed value {approx} exceeds "
                                f"(1 + {eps}) * f({j}) = {exact}", j)

    bound = piece_bound(oracle, compressed, eps)
    if len(compressed.pieces) > bound:
        raise BoundViolated(f"{len(compressed.pieces)} pieces exceed the "
                            f"bound of {bound}", compressed.m)
    return CompressionReport(len(compressed.pieces), bound, len(points))

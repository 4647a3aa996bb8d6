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

"""The water-filling bucket engine shared by both primal-dual solvers.

Every segment (or, for Steps costs, every constant piece) of an item is a
bucket whose capacity is its marginal cost. Raising a dual variable pours
water into the non-full buckets of the active items; a full bucket passes the
water it receives on to the nearest non-full bucket below it. When the lowest
untaken bucket of an item fills, the whole full run starting there is taken
into the primal solution as one block.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .exceptions import OverfillDetected, Stalled

log = logging.getLogger('nlcover.engine')

#: ``(width, capacity)`` for every bucket of one item
Layout = Sequence[Tuple[int, Fraction]]

#: ``{item: {bucket: rate}}`` for the non-full buckets receiving water
RateMap = Dict[int, Dict[int, int]]


@dataclass
class Bucket:
    """One dual constraint. Covers segments ``start..start + width - 1``."""
    start: int
    width: int
    capacity: Fraction
    fill: Fraction = Fraction(0)
    #: Bucket index this one passes its water to, once full
    spill_to: Optional[int] = None
    #: Whether the engine has reacted to this bucket becoming full
    settled: bool = False
    taken: bool = False

    @property
    def end(self) -> int:
        return self.start + self.width - 1

    @property
    def full(self) -> bool:
        return self.fill == self.capacity


@dataclass(frozen=True)
class Block:
    """A run of buckets ``first..last`` (segments ``start..end``) of one item
    taken together. ``seq`` is the global creation order."""
    item: int
    first: int
    last: int
    start: int
    end: int
    seq: int

    @property
    def size(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class AuditRecord:
    """One dual raise: ``delta`` at residual demand ``residual`` (for point
    ``t`` in UFP). ``tau`` holds ``(item, bucket, rate)`` for every bucket that
    received water and ``levels`` the item levels ``a`` the raise was made
    at; both are ``None`` when audit mode was off."""
    delta: Fraction
    residual: int
    t: Optional[int] = None
    tau: Optional[Tuple[Tuple[int, int, int], ...]] = None
    levels: Optional[Tuple[int, ...]] = None


@dataclass
class Certificate:
    """The dual ledger of a solve"""
    dual_objective: Fraction = Fraction(0)
    raises: List[AuditRecord] = field(default_factory=list)
    audit: bool = False


@dataclass(frozen=True)
class Event:
    """The next dual raise: how far to raise and which buckets become full,
    in (item, bucket) order"""
    delta: Fraction
    tight: Tuple[Tuple[int, int], ...]


class Stair:
    """The buckets of one item, bottom to top (bucket indices are 1-based)

    :param item: Item index
    :param layout: ``(width, capacity)`` of each bucket
    """

    def __init__(self, item: int, layout: Layout):
        self.item = item
        self.buckets: List[Bucket] = []
        start = 1
        for width, capacity in layout:
            self.buckets.append(Bucket(start, width, Fraction(capacity)))
            start += width
        #: Number of leading taken buckets
        self.taken_count = 0
        #: Blocks taken from this item, in creation order
        self.blocks: List[Block] = []
        self._settle_zero_capacity()

    def _settle_zero_capacity(self):
        """Zero-capacity buckets start full. Those with a non-full bucket
        below them spill to it straight away; the leading run is left for the
        first raise to take."""
        lowest_open: Optional[int] = None
        for j, bucket in enumerate(self.buckets, start=1):
            if not bucket.full:
                lowest_open = j
            elif lowest_open is not None:
                bucket.spill_to = lowest_open
                bucket.settled = True

    def bucket(self, j: int) -> Bucket:
        return self.buckets[j - 1]

    @property
    def level(self) -> int:
        """Number of taken segments (the item's ``a_i``)"""
        if self.taken_count == 0:
            return 0
        return self.buckets[self.taken_count - 1].end

    @property
    def m(self) -> int:
        return self.buckets[-1].end if self.buckets else 0

    def external(self, j: int, active_hi: int) -> int:
        """Number of segments of bucket ``j`` inside the active range
        ``level + 1 .. active_hi``"""
        bucket = self.bucket(j)
        if bucket.taken:
            return 0
        lo = max(bucket.start, self.level + 1)
        return max(0, min(bucket.end, active_hi) - lo + 1)

    def rates(self, active_hi: int) -> Dict[int, int]:
        """Rate of every non-full bucket receiving water: its own active
        width plus the active width of the full buckets spilling to it"""
        rates: Dict[int, int] = {}
        for j in range(self.taken_count + 1, len(self.buckets) + 1):
            width = self.external(j, active_hi)
            if width == 0:
                continue
            bucket = self.bucket(j)
            target = j if not bucket.full else bucket.spill_to
            if target is None:
                continue
            rates[target] = rates.get(target, 0) + width
        return rates

    def unsettled(self) -> List[int]:
        """Full, untaken buckets the engine has not yet reacted to"""
        return [j for j in range(self.taken_count + 1, len(self.buckets) + 1)
                if self.bucket(j).full and not self.bucket(j).settled]

    def on_full(self, j: int, seq: int) -> Optional[Block]:
        """React to bucket ``j`` becoming full.

        If it is the lowest untaken bucket, take the maximal full run starting
        there (buckets beyond the active range included) and return the new
        block. Otherwise point every bucket from ``j`` up to the next non-full
        bucket at the nearest non-full bucket below ``j``.
        """
        bucket = self.bucket(j)
        bucket.settled = True
        if j == self.taken_count + 1:
            q = j
            while q < len(self.buckets) and self.bucket(q + 1).full:
                q += 1
            for k in range(j, q + 1):
                self.bucket(k).taken = True
                self.bucket(k).settled = True
                self.bucket(k).spill_to = None
            self.taken_count = q
            block = Block(self.item, j, q, self.bucket(j).start,
                          self.bucket(q).end, seq)
            self.blocks.append(block)
            return block

        p = max(k for k in range(self.taken_count + 1, j)
                if not self.bucket(k).full)
        q = j
        while q <= len(self.buckets) and self.bucket(q).full:
            q += 1
        for k in range(j, q):
            self.bucket(k).spill_to = p
        return None

    def check_spill_pointers(self) -> List[str]:
        """Recompute the expected spill target of every settled full bucket by
        brute force and describe each mismatch.

        The target is the nearest bucket below that is not full. Pointers
        are only up to date once every full bucket has been dispatched, so
        this reports nothing while :meth:`unsettled` is non-empty.
        """
        if self.unsettled():
            return []
        problems = []
        for j in range(self.taken_count + 1, len(self.buckets) + 1):
            bucket = self.bucket(j)
            if not (bucket.full and bucket.settled):
                continue
            expected = None
            for k in range(j - 1, self.taken_count, -1):
                if not self.bucket(k).full:
                    expected = k
                    break
            if bucket.spill_to != expected:
                problems.append(f"item {self.item} bucket {j} spills to "
                                f"{bucket.spill_to}, expected {expected}")
        return problems


class WaterFillingEngine:
    """Event-driven water filling over the stairs of all items

    :param layouts: Bucket layout of every item (see
                    :func:`~nlcover.model.bucket_layout`)
    :param audit: Keep the full rate map and zero raises in the ledger
    """

    def __init__(self, layouts: Sequence[Layout], audit: bool = False):
        self.stairs = [Stair(i, layout) for i, layout in enumerate(layouts)]
        self.certificate = Certificate(audit=audit)
        #: Every block taken so far, in creation order
        self.blocks: List[Block] = []

    @property
    def audit(self) -> bool:
        return self.certificate.audit

    def levels(self) -> Tuple[int, ...]:
        return tuple(stair.level for stair in self.stairs)

    def rates(self, active: Mapping[int, int]) -> RateMap:
        """Rates of every active item. ``active`` maps item index to the top
        of its active range."""
        return {i: self.stairs[i].rates(hi)
                for i, hi in sorted(active.items())}

    def next_event(self, active: Mapping[int, int],
                   rates: RateMap) -> Event:
        """Compute the next raise

        :raises Stalled: if no active bucket receives water
        """
        unsettled = [(i, j) for i in sorted(active)
                     for j in self.stairs[i].unsettled()]
        if unsettled:
            return Event(Fraction(0), tuple(unsettled))

        best: Optional[Fraction] = None
        tight: List[Tuple[int, int]] = []
        for i, item_rates in rates.items():
            for j, rate in sorted(item_rates.items()):
                bucket = self.stairs[i].bucket(j)
                delta = (bucket.capacity - bucket.fill) / rate
                if best is None or delta < best:
                    best = delta
                    tight = [(i, j)]
                elif delta == best:
                    tight.append((i, j))
        if best is None:
            raise Stalled("Residual demand remains but no bucket receives "
                          "water")
        return Event(best, tuple(tight))

    def pour(self, delta: Fraction, rates: RateMap, residual: int,
             t: Optional[int] = None):
        """Raise the dual by ``delta`` and record it in the ledger

        :raises OverfillDetected: if a bucket would exceed its capacity
        """
        if delta:
            for i, item_rates in rates.items():
                for j, rate in item_rates.items():
                    bucket = self.stairs[i].bucket(j)
                    bucket.fill += delta * rate
                    if bucket.fill > bucket.capacity:
                        raise OverfillDetected(
                            f"Bucket {j} of item {i} filled to {bucket.fill} "
                            f"beyond capacity {bucket.capacity}")
            self.certificate.dual_objective += delta * residual
        if not delta and not self.audit:
            return
        tau = None
        levels = None
        if self.audit:
            tau = tuple((i, j, rate) for i, item_rates in sorted(rates.items())
                        for j, rate in sorted(item_rates.items()) if delta)
            levels = self.levels()
        self.certificate.raises.append(
            AuditRecord(delta, residual, t, tau, levels))

    def on_full(self, i: int, j: int) -> Optional[Block]:
        """Dispatch bucket ``j`` of item ``i`` becoming full"""
        block = self.stairs[i].on_full(j, len(self.blocks))
        if block is not None:
            self.blocks.append(block)
            log.debug("Took block %d of item %d: segments %d..%d",
                      block.seq, i, block.start, block.end)
        return block

    def step(self, active: Mapping[int, int], residual: int,
             t: Optional[int] = None) -> Event:
        """Run one iteration: compute the next event, pour, then dispatch the
        first tight bucket. Further tight buckets are left for following
        zero raises."""
        rates = self.rates(active)
        event = self.next_event(active, rates)
        log.debug("Raise by %s at residual %d (point %s), %d tight",
                  event.delta, residual, t, len(event.tight))
        self.pour(event.delta, rates, residual, t)
        self.on_full(*event.tight[0])
        return event

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

"""Exact rational simplex: a dense tableau with Bland's rule for the primal
method, a dual simplex for re-optimizing after a constraint is added, and a
two-phase driver for general linear programs"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .exceptions import InfeasibleMaster, UnboundedMaster

log = logging.getLogger('nlcover')

LE = '<='
GE = '>='
EQ = '=='


@dataclass(frozen=True)
class Constraint:
    """``coeffs . x  sense  rhs``"""
    coeffs: Tuple[Fraction, ...]
    sense: str
    rhs: Fraction

    def __post_init__(self):
        if self.sense not in (LE, GE, EQ):
            raise ValueError(f"Unknown constraint sense {self.sense!r}")
        object.__setattr__(self, 'coeffs',
                           tuple(Fraction(c) for c in self.coeffs))
        object.__setattr__(self, 'rhs', Fraction(self.rhs))


@dataclass(frozen=True)
class LpSolution:
    x: Tuple[Fraction, ...]
    objective: Fraction
    basis: Tuple[int, ...]


class Tableau:
    """A minimization tableau ``min c.x  s.t.  A x = b, x >= 0`` kept in
    canonical form for the current basis.

    :param rows: Constraint rows, already in canonical form for ``basis``
    :param rhs: Right-hand sides
    :param basis: Basic column of each row
    :param costs: Objective coefficients of every column
    """

    def __init__(self, rows: Sequence[Sequence[Fraction]],
                 rhs: Sequence[Fraction], basis: Sequence[int],
                 costs: Sequence[Fraction]):
        self.rows = [[Fraction(v) for v in row] for row in rows]
        self.rhs = [Fraction(v) for v in rhs]
        self.basis = list(basis)
        self.costs = [Fraction(c) for c in costs]
        self.reduced: List[Fraction] = []
        self.objective = Fraction(0)
        self.pivots = 0
        self.price()

    @property
    def width(self) -> int:
        return len(self.costs)

    def price(self):
        """Recompute reduced costs and objective from the basis"""
        self.reduced = list(self.costs)
        self.objective = Fraction(0)
        for row, rhs, b in zip(self.rows, self.rhs, self.basis):
            cb = self.costs[b]
            if not cb:
                continue
            for j, value in enumerate(row):
                if value:
                    self.reduced[j] -= cb * value
            self.objective += cb * rhs

    def pivot(self, r: int, c: int):
        """Make column ``c`` basic in row ``r``"""
        self.pivots += 1
        row = self.rows[r]
        piv = row[c]
        if piv != 1:
            self.rows[r] = row = [v / piv for v in row]
            self.rhs[r] /= piv
        for k, other in enumerate(self.rows):
            if k == r:
                continue
            factor = other[c]
            if factor:
                self.rows[k] = [v - factor * p for v, p in zip(other, row)]
                self.rhs[k] -= factor * self.rhs[r]
        factor = self.reduced[c]
        if factor:
            self.reduced = [v - factor * p for v, p in zip(self.reduced, row)]
            self.objective += factor * self.rhs[r]
        self.basis[r] = c

    def primal(self, allowed: Optional[Sequence[bool]] = None):
        """Primal simplex with Bland's rule from a primal feasible basis

        :param allowed: Columns that may enter (all by default)
        :raises UnboundedMaster: if the objective is unbounded below
        """
        while True:
            entering = next((j for j, r in enumerate(self.reduced)
                             if r < 0 and (allowed is None or allowed[j])),
                            None)
            if entering is None:
                return
            leaving = None
            best: Optional[Tuple[Fraction, int]] = None
            for i, row in enumerate(self.rows):
                if row[entering] > 0:
                    key = (self.rhs[i] / row[entering], self.basis[i])
                    if best is None or key < best:
                        best, leaving = key, i
            if leaving is None:
                raise UnboundedMaster(f"Column {entering} is unbounded")
            self.pivot(leaving, entering)

    def dual(self):
        """Dual simplex from a dual feasible basis (all reduced costs
        non-negative). The leaving row is the infeasible one with the
        smallest basic column; the entering column minimizes the ratio,
        smallest index on ties.

        :raises InfeasibleMaster: if the primal has no feasible point
        """
        while True:
            candidates = [(self.basis[i], i) for i, v in enumerate(self.rhs)
                          if v < 0]
            if not candidates:
                return
            _, leaving = min(candidates)
            row = self.rows[leaving]
            entering = None
            best: Optional[Fraction] = None
            for j, value in enumerate(row):
                if value < 0:
                    ratio = self.reduced[j] / -value
                    if best is None or ratio < best:
                        best, entering = ratio, j
            if entering is None:
                raise InfeasibleMaster(f"Row {leaving} cannot be satisfied")
            self.pivot(leaving, entering)

    def add_constraint(self, coeffs: Sequence[Fraction], sense: str,
                       rhs: Fraction):
        """Append an inequality over the existing columns with a new slack
        column and restore optimality with the dual simplex. The tableau
        must be optimal (dual feasible) beforehand."""
        if sense == GE:
            coeffs = [-Fraction(c) for c in coeffs]
            rhs = -Fraction(rhs)
        elif sense != LE:
            raise ValueError("Only inequalities can be added")
        row = [Fraction(c) for c in coeffs]
        row += [Fraction(0)] * (self.width - len(row))
        rhs = Fraction(rhs)
        for other, other_rhs, b in zip(self.rows, self.rhs, self.basis):
            factor = row[b]
            if factor:
                row = [v - factor * p for v, p in zip(row, other)]
                rhs -= factor * other_rhs
        for other in self.rows:
            other.append(Fraction(0))
        row.append(Fraction(1))
        self.rows.append(row)
        self.rhs.append(rhs)
        self.basis.append(self.width)
        self.costs.append(Fraction(0))
        self.reduced.append(Fraction(0))
        self.dual()

    def values(self, count: int) -> Tuple[Fraction, ...]:
        """Values of the first ``count`` columns"""
        x = [Fraction(0)] * count
        for b, v in zip(self.basis, self.rhs):
            if b < count:
                x[b] = v
        return tuple(x)


def simplex_exact(objective: Sequence[Fraction],
                  constraints: Sequence[Constraint]) -> LpSolution:
    """Minimize ``objective . x`` over ``x >= 0`` subject to
    ``constraints``, returning an optimal basic solution in exact rationals.

    :raises InfeasibleMaster: if there is no feasible point
    :raises UnboundedMaster: if the objective is unbounded below
    """
    n = len(objective)
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    senses: List[str] = []
    for constraint in constraints:
        coeffs = list(constraint.coeffs) + \
            [Fraction(0)] * (n - len(constraint.coeffs))
        value, sense = constraint.rhs, constraint.sense
        if value < 0:
            coeffs = [-c for c in coeffs]
            value = -value
            sense = {LE: GE, GE: LE, EQ: EQ}[sense]
        rows.append(coeffs)
        rhs.append(value)
        senses.append(sense)

    # Slack or surplus columns, then artificial columns where no slack can
    # start basic
    slack_count = sum(1 for s in senses if s != EQ)
    artificial_rows = [i for i, s in enumerate(senses) if s != LE]
    width = n + slack_count + len(artificial_rows)
    full_rows = [row + [Fraction(0)] * (width - n) for row in rows]
    basis = [0] * len(rows)
    column = n
    for i, sense in enumerate(senses):
        if sense == EQ:
            continue
        full_rows[i][column] = Fraction(1 if sense == LE else -1)
        if sense == LE:
            basis[i] = column
        column += 1
    first_artificial = column
    for i in artificial_rows:
        full_rows[i][column] = Fraction(1)
        basis[i] = column
        column += 1

    phase_one = [Fraction(0)] * first_artificial + \
        [Fraction(1)] * (width - first_artificial)
    tableau = Tableau(full_rows, rhs, basis, phase_one)
    tableau.primal()
    if tableau.objective > 0:
        raise InfeasibleMaster("Linear program has no feasible point")

    # Drive remaining artificials out of the basis, dropping redundant rows
    for r in range(len(tableau.rows) - 1, -1, -1):
        if tableau.basis[r] < first_artificial:
            continue
        entering = next((j for j in range(first_artificial)
                         if tableau.rows[r][j] != 0), None)
        if entering is None:
            del tableau.rows[r]
            del tableau.rhs[r]
            del tableau.basis[r]
        else:
            tableau.pivot(r, entering)

    tableau.costs = [Fraction(c) for c in objective] + \
        [Fraction(0)] * (width - n)
    tableau.price()
    tableau.primal(allowed=[j < first_artificial for j in range(width)])
    log.debug("Simplex finished after %d pivots", tableau.pivots)
    return LpSolution(tableau.values(n), tableau.objective,
                      tuple(tableau.basis))

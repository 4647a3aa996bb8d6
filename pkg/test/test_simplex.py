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
"""Tests for the exact rational simplex"""
import random
from fractions import Fraction

import pytest

import nlcover
from nlcover.simplex import EQ, GE, LE, Constraint, Tableau, simplex_exact


def test_two_covering_rows():
    result = simplex_exact((1, 1), [Constraint((1, 2), GE, 4),
                                    Constraint((3, 1), GE, 6)])
    assert result.x == (Fraction(8, 5), Fraction(6, 5))
    assert result.objective == Fraction(14, 5)


def test_equality_and_bound():
    result = simplex_exact((2, 3), [Constraint((1, 1), EQ, 3),
                                    Constraint((1,), LE, 1)])
    assert result.x == (1, 2)
    assert result.objective == 8


def test_negative_rhs_flipped():
    result = simplex_exact((1,), [Constraint((-1,), LE, -2)])
    assert result.x == (2,)


def test_redundant_equality():
    result = simplex_exact((1, 0), [Constraint((1, 1), EQ, 2),
                                    Constraint((2, 2), EQ, 4)])
    assert result.objective == 0
    assert result.x == (0, 2)


def test_infeasible():
    with pytest.raises(nlcover.InfeasibleMaster):
        simplex_exact((1,), [Constraint((1,), LE, 1),
                             Constraint((1,), GE, 2)])


def test_unbounded():
    with pytest.raises(nlcover.UnboundedMaster):
        simplex_exact((-1,), [Constraint((1,), GE, 1)])


def test_unknown_sense():
    with pytest.raises(ValueError):
        Constraint((1,), '<', 1)


def test_add_constraint_reoptimizes():
    """min x with slack s: adding x >= 2 moves the optimum to x = 2"""
    tableau = Tableau([[1, 1]], [5], [1], [1, 0])
    assert tableau.objective == 0
    tableau.add_constraint([1], GE, 2)
    assert tableau.values(1) == (2,)
    assert tableau.objective == 2


def test_add_infeasible_constraint():
    tableau = Tableau([[1, 1]], [5], [1], [1, 0])
    with pytest.raises(nlcover.InfeasibleMaster):
        tableau.add_constraint([1], GE, 6)


def test_strong_duality():
    """Random covering programs and their packing duals meet"""
    rng = random.Random(3)
    for _ in range(100):
        n = rng.randint(1, 4)
        rows = rng.randint(1, 4)
        a = [[Fraction(rng.randint(0, 3)) for _ in range(n)]
             for _ in range(rows)]
        for row in a:
            row[rng.randrange(n)] += 1
        b = [Fraction(rng.randint(0, 5)) for _ in range(rows)]
        c = [Fraction(rng.randint(1, 6), rng.randint(1, 3)) for _ in range(n)]

        primal = simplex_exact(c, [Constraint(row, GE, rhs)
                                   for row, rhs in zip(a, b)])
        for row, rhs in zip(a, b):
            assert sum(v * x for v, x in zip(row, primal.x)) >= rhs
        assert all(x >= 0 for x in primal.x)
        assert sum(v * x for v, x in zip(c, primal.x)) == primal.objective

        columns = [[a[r][j] for r in range(rows)] for j in range(n)]
        dual = simplex_exact([-v for v in b],
                             [Constraint(col, LE, cost)
                              for col, cost in zip(columns, c)])
        assert primal.objective == -dual.objective

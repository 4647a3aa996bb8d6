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

"""All nlcover exceptions"""


class NLCoverException(Exception):
    """Base class for all nlcover exceptions"""


class ConfigError(NLCoverException):
    """Raised when the configuration is malformed or has other errors"""


class InputError(NLCoverException):
    """Base class for errors caused by unusable input: a malformed instance,
    a request beyond a configured budget, or a violated precondition"""


class InvalidInstance(InputError):
    """Raised when an instance (or a solution for it) is malformed"""


class MaterializationTooLarge(InputError):
    """Raised when expanding a Steps cost function to List form would exceed
    the configured cap"""


class LevelOutOfRange(InputError):
    """Raised when a solution level exceeds the number of segments of its
    item"""


class BudgetExceeded(InputError):
    """Raised when exhaustive enumeration would exceed the configured
    budget"""


class UnsatisfiableSpec(InputError):
    """Raised when a generator spec cannot produce a feasible instance"""


class NonMonotoneOracle(InputError):
    """Raised when a cost oracle is witnessed to decrease"""


class InvalidEpsilon(InputError):
    """Raised when a compression accuracy is not strictly positive"""


class ChainViolated(InputError):
    """Raised when a fractional solution is not in chain form
    (1 >= z_i1 >= z_i2 >= ... >= 0)"""


class UnknownFamily(InputError):
    """Raised when an oracle family name cannot be resolved"""


class UnknownAlgorithm(InputError):
    """Raised when an algorithm id is not known or does not apply to the
    instance type"""


class InfeasibleError(NLCoverException):
    """Raised when an instance has no feasible solution of finite cost"""


class SolverError(NLCoverException):
    """Base class for broken internal invariants. These indicate a bug, not a
    bad input."""


class Stalled(SolverError):
    """Raised by the water-filling engine when residual demand remains but no
    bucket receives water"""


class OverfillDetected(SolverError):
    """Raised when a bucket would be filled beyond its capacity"""


class IterationCapExceeded(SolverError):
    """Raised when the cutting-plane loop exceeds its iteration cap"""


class InfeasibleMaster(SolverError):
    """Raised when a linear program handed to the simplex kernel has no
    feasible point"""


class UnboundedMaster(SolverError):
    """Raised when a linear program handed to the simplex kernel is
    unbounded"""


class AssemblyInfeasible(SolverError):
    """Raised when the rounded solution does not cover the demand"""


class RatioBoundViolated(SolverError):
    """Raised when a primal-dual solution costs more than its approximation
    factor times the dual objective"""


class BoundViolated(SolverError):
    """Raised when a compressed cost function is outside its two-sided bound.

    :param j: the witness segment index
    """

    def __init__(self, message: str, j: int):
        super().__init__(message)
        #: Witness segment index
        self.j = j

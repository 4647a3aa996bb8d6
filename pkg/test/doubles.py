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

"""Test doubles and helpers for use in test modules and fixtures"""
import dataclasses
import errno
from fractions import Fraction
from typing import List, Optional

import nlcover
from nlcover.engine import AuditRecord, Certificate
from nlcover.families import BaseFamily
from nlcover.gen import GenSpec
from nlcover.model import CostFunction, IntegralSolution


def lst(*values) -> CostFunction:
    """Shorthand for a List-form cost function"""
    return CostFunction.from_values(values)


def steps(*pieces) -> CostFunction:
    """Shorthand for a Steps-form cost function from (upto, value) pairs"""
    return CostFunction.from_pieces(pieces)


class BrokenFile:
    """File-like object that raises an exception when being read from"""

    def __iter__(self):
        raise OSError(errno.ETIMEDOUT, "timeout")

    def read(self, *_):
        raise OSError(errno.ETIMEDOUT, "timeout")

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        pass


class ConstantFamily(BaseFamily):
    """A custom family importable by module and type: ``f(j) = c``"""

    defaults = {'c': Fraction(7)}

    def cost(self, j):
        return self.params['c']


class CountingFunction:
    """Callable cost curve counting how often it is queried"""

    def __init__(self, values):
        self.values = list(values)
        self.calls = 0

    def __call__(self, j):
        self.calls += 1
        return self.values[j - 1]


class ZigZag:
    """A cost curve that goes down every other segment"""

    def __call__(self, j):
        return j + (3 if j % 2 else 0)


def kc_spec(**kwargs) -> GenSpec:
    """Knapsack-cover generator spec with small defaults"""
    values = dict(kind='kc', n=(1, 6), m=(1, 6), demand=(0, 20),
                  max_marginal=20)
    values.update(kwargs)
    return GenSpec(**values)


def ufp_spec(**kwargs) -> GenSpec:
    """UFP-cover generator spec with small defaults"""
    values = dict(kind='ufp', n=(1, 5), k=(1, 8), m=(1, 4), demand=(0, 6),
                  max_marginal=20)
    values.update(kwargs)
    return GenSpec(**values)


def positive_raise(certificate: Certificate) -> Optional[int]:
    """Index of the first raise with a positive delta"""
    return next((k for k, r in enumerate(certificate.raises) if r.delta > 0),
                None)


def with_raise(certificate: Certificate, index: int,
               record: AuditRecord) -> Certificate:
    """Copy of a certificate with one raise replaced"""
    raises: List[AuditRecord] = list(certificate.raises)
    raises[index] = record
    return Certificate(certificate.dual_objective, raises, certificate.audit)


def inflate_delta(certificate: Certificate) -> Certificate:
    """Double the first positive raise"""
    k = positive_raise(certificate)
    assert k is not None
    record = certificate.raises[k]
    return with_raise(certificate, k,
                      dataclasses.replace(record, delta=2 * record.delta))


def inflate_residuals(certificate: Certificate, factor: int = 100,
                      keep_levels: bool = True) -> Certificate:
    """Multiply every residual and restate the dual objective to match,
    optionally dropping the recorded levels"""
    raises = [dataclasses.replace(
        r, residual=factor * r.residual,
        levels=r.levels if keep_levels else None)
        for r in certificate.raises]
    dual = sum((r.delta * r.residual for r in raises), Fraction(0))
    return Certificate(dual, raises, certificate.audit)


def drop_rates(certificate: Certificate) -> Optional[Certificate]:
    """Empty the rate map of the first positive raise"""
    k = positive_raise(certificate)
    if k is None:
        return None
    record = certificate.raises[k]
    return with_raise(certificate, k, dataclasses.replace(record, tau=()))


def forge_tau(certificate: Certificate, taken) -> Optional[Certificate]:
    """Bump the rate of a taken bucket in the first positive raise that pours
    into one, or ``None`` if no raise does"""
    for k, record in enumerate(certificate.raises):
        if record.delta <= 0:
            continue
        for n, (i, j, rate) in enumerate(record.tau):
            if (i, j) in taken:
                tau = list(record.tau)
                tau[n] = (i, j, rate + 1)
                return with_raise(certificate, k,
                                  dataclasses.replace(record, tau=tuple(tau)))
    return None


def decrement_level(solution: IntegralSolution) -> Optional[IntegralSolution]:
    """Lower the first positive level by one"""
    levels = list(solution.levels)
    for i, x in enumerate(levels):
        if x > 0:
            levels[i] = x - 1
            return IntegralSolution(tuple(levels))
    return None


def finalized_config(**main) -> 'nlcover.Config':
    conf = nlcover.Config({k: str(v) for k, v in main.items()})
    conf.finalize(lambda mod, typ: True)
    return conf

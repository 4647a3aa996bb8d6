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

"""Oracle families: named, parameterized cost curves for oracle-model items.

Built-in families are below. Others can be added through the
``nlcover.family`` entry-point group or a ``[family.<name>]`` config section
naming a ``module`` and ``type``.
"""

import importlib
import logging
import sys
# Note: abstractmethod is used only so Sphinx marks the method as abstract.
# BaseFamily intentionally does NOT use ABCMeta.
from abc import abstractmethod
from fractions import Fraction
from typing import Dict, Optional, Tuple, Type, Union, cast

if sys.version_info < (3, 10):
    from importlib_metadata import entry_points
else:
    from importlib.metadata import entry_points

from .compress import DEFAULT_MONOTONE_PROBES, CostOracle
from .configuration import Config
from .exceptions import InvalidInstance, UnknownFamily
from .instancefile import parse_cost
from .model import INF, Cost, OracleCost

log = logging.getLogger('nlcover')


class BaseFamily:
    """Base class for oracle families. Subclasses list their parameters with
    defaults in :attr:`defaults` and implement :meth:`cost`.

    :param name: Family name (built-in name or config section name)
    :param params: Parameter values, overriding :attr:`defaults`

    :raises InvalidInstance: on an unknown or infinite parameter
    """

    #: Parameter names and their default values
    defaults: Dict[str, Cost] = {}

    def __init__(self, name: str, params: Dict[str, Cost]):
        #: Family name
        self.name = name

        #: Logger (see standard :mod:`logging` module)
        self.log = logging.getLogger(f'nlcover.family.{name}')

        unknown = sorted(set(params) - set(self.defaults))
        if unknown:
            raise InvalidInstance(f"Family {name} has no parameter(s) "
                                  f"{', '.join(unknown)}")
        merged = dict(self.defaults)
        merged.update(params)
        for key, value in merged.items():
            if value is INF:
                raise InvalidInstance(f"Family {name}: parameter {key} must "
                                      "be finite")
        #: Parameter values
        self.params: Dict[str, Fraction] = cast(Dict[str, Fraction], merged)

    @abstractmethod
    def cost(self, j: int) -> Cost:
        """Cost of level ``j`` (``j >= 1``)"""
        raise NotImplementedError

    def __call__(self, j: int) -> Cost:
        return self.cost(j)


class PolynomialFamily(BaseFamily):
    """``c * j ** p`` for a whole exponent ``p``"""

    defaults = {'c': Fraction(1), 'p': Fraction(1)}

    def __init__(self, name: str, params: Dict[str, Cost]):
        super().__init__(name, params)
        if self.params['p'].denominator != 1:
            raise InvalidInstance(f"Family {name}: exponent p must be a "
                                  "whole number")

    def cost(self, j: int) -> Cost:
        return self.params['c'] * Fraction(j) ** int(self.params['p'])


class FacilityFamily(BaseFamily):
    """Activation cost plus linear cost: ``b + c * j``"""

    defaults = {'b': Fraction(1), 'c': Fraction(1)}

    def cost(self, j: int) -> Cost:
        return self.params['b'] + self.params['c'] * j


class QuadraticFamily(BaseFamily):
    """Convex quadratic: ``b + c * j + q * j ** 2``"""

    defaults = {'b': Fraction(0), 'c': Fraction(0), 'q': Fraction(1)}

    def cost(self, j: int) -> Cost:
        return self.params['b'] + self.params['c'] * j + \
            self.params['q'] * j * j


families: Dict[Union[str, Tuple[str, str]], Type[BaseFamily]] = {
    'polynomial': PolynomialFamily,
    'facility': FacilityFamily,
    'quadratic': QuadraticFamily,
}


def validate_family_type(module: Optional[str], type_: str) -> bool:
    """Check if a family type exists, importing it if it is not one of the
    built-in families

    :param module: ``None`` for built-in or entry-point families. Otherwise,
                   the module the family class can be imported from.
    :param type_: The name of a built-in family or the class name of a
                  non-built-in one.
    :returns: ``True`` if the family exists, ``False`` otherwise
    """
    if module is None:
        # Check if built-in or already imported with an entry point
        if type_ in families:
            return True
        # Check if an nlcover entry point with this name exists
        discovered = entry_points(group='nlcover.family')
        try:
            entry_point = discovered[type_]
        except KeyError:
            return False
        families[type_] = entry_point.load()
        return True

    # Check if already imported non-built-in
    if (module, type_) in families:
        return True

    # Check if it's importable
    try:
        imported_module = importlib.import_module(module)
    except ImportError:
        return False
    try:
        imported_class = getattr(imported_module, type_)
    except AttributeError:
        return False
    families[cast(Tuple[str, str], (module, type_))] = imported_class
    return True


def create_family(name: str, params: Dict[str, Cost],
                  config: Optional[Config] = None) -> BaseFamily:
    """Instantiate a family by name. A ``[family.<name>]`` section in a
    finalized config takes precedence over built-in and entry-point families
    of the same name; its other options are parameter defaults.

    :raises UnknownFamily: if the name cannot be resolved
    """
    section = config.families.get(name) if config is not None else None
    if section is None:
        if not validate_family_type(None, name):
            raise UnknownFamily(f"No family named {name}")
        return families[name](name, params)

    if name in families:
        log.warning("Configured family %s shadows the built-in family", name)
    module = section.get('module')
    type_ = section['type']
    if not validate_family_type(module, type_):
        raise UnknownFamily(f"Family {name} has unknown type {type_}")
    family_class = families[type_] if module is None \
        else families[(module, type_)]
    merged: Dict[str, Cost] = {
        key: parse_cost(value, f"family.{name}.{key}")
        for key, value in section.items() if key not in ('type', 'module')
    }
    merged.update(params)
    return family_class(name, merged)


def make_oracle(costs: OracleCost, config: Optional[Config] = None,
                probes: int = DEFAULT_MONOTONE_PROBES,
                seed: int = 0) -> CostOracle:
    """Build a :class:`~nlcover.compress.CostOracle` for an oracle-model
    item"""
    family = create_family(costs.family, costs.param_dict(), config)
    return CostOracle(family, costs.m, probes, seed)

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

"""nlcover configuration parsing"""

import configparser
import os
import pathlib
import sys

from typing import Callable, Dict, Iterable, Optional, Union

if sys.version_info < (3, 10):
    from importlib_metadata import version
else:
    from importlib.metadata import version

from .exceptions import ConfigError


VERSION = version('nlcover')

#: Environment variable that forces audit mode on when set to ``1``
AUDIT_ENV = 'COVER_AUDIT'

DEFAULTS = {
    'log': 'stderr',
    'audit': 'false',
    'materialize_cap': '100000',
    'enumeration_budget': '1000000',
    'cut_cap_factor': '1',
    'sample_budget': '64',
    'monotone_probes': '16',
    'workers': '1',
}

_INT_OPTIONS = ('materialize_cap', 'enumeration_budget', 'cut_cap_factor',
                'sample_budget', 'monotone_probes', 'workers')
_MINIMUMS = {'cut_cap_factor': 1, 'workers': 1}


def parse_bool(name: str, value: str) -> bool:
    """Parse a boolean option the way :mod:`configparser` spells them

    :raises ConfigError: if the value is not a boolean
    """
    lowered = value.strip().lower()
    if lowered in ('true', 'on', 'yes', '1'):
        return True
    if lowered in ('false', 'off', 'no', '0'):
        return False
    raise ConfigError(f"'{name}' must be boolean (true/yes/on/1/"
                      "false/no/off/0)")


class Config:
    """Contains all nlcover configuration. Normally, this would be created
    from a configuration file by :func:`read_config` or
    :func:`read_config_from_path`, but it can also be created directly when
    using nlcover as a library.

    Note that all configuration values should be strings, as they would be
    from Python's :class:`configparser.ConfigParser`.

    The configuration must be finalized before its options are read.

    :param main: A dictionary of global configuration options, that is, the
                 options that go under ``[nlcover]`` in the configuration
                 file.
    :param families: A dictionary of oracle family configurations. Keys are
                     family names (the ``XYZ`` of ``[family.XYZ]``) and values
                     are dicts with ``type``, an optional ``module`` and any
                     default parameters.
    """

    def __init__(self,
                 main: Optional[Dict[str, str]] = None,
                 families: Optional[Dict[str, Dict[str, str]]] = None):
        #: Dict containing global configuration (from ``[nlcover]``)
        self._main: Dict[str, str] = dict(main or {})

        #: Family configurations (from ``[family.<name>]`` sections)
        self._families: Dict[str, Dict[str, str]] = dict(families or {})

        #: Typed option values, filled in by :meth:`finalize`
        self._options: Dict[str, Union[int, bool, str]] = {}

        #: Whether the config has been finalized yet
        self._finalized = False

    def _check_finalized(self):
        """Raise an exception if the config is not finalized"""
        if not self._finalized:
            raise ConfigError("Tried to access config before it was finalized")

    @property
    def main(self) -> Dict[str, str]:
        self._check_finalized()
        return self._main

    @property
    def families(self) -> Dict[str, Dict[str, str]]:
        self._check_finalized()
        return self._families

    # Logfile has special property since it must be accessed before finalizing
    @property
    def logfile(self) -> str:
        return self._main.get('log', DEFAULTS['log'])

    @logfile.setter
    def logfile(self, value: str):
        self._main['log'] = value

    def _option(self, name: str):
        self._check_finalized()
        return self._options[name]

    @property
    def audit(self) -> bool:
        return self._option('audit')

    @property
    def materialize_cap(self) -> int:
        return self._option('materialize_cap')

    @property
    def enumeration_budget(self) -> int:
        return self._option('enumeration_budget')

    @property
    def cut_cap_factor(self) -> int:
        return self._option('cut_cap_factor')

    @property
    def sample_budget(self) -> int:
        return self._option('sample_budget')

    @property
    def monotone_probes(self) -> int:
        return self._option('monotone_probes')

    @property
    def workers(self) -> int:
        return self._option('workers')

    def _fill_defaults(self):
        """Fill in defaults if they are not yet set, then type-check"""
        for name, value in DEFAULTS.items():
            self._main.setdefault(name, value)
        unknown = sorted(set(self._main) - set(DEFAULTS))
        if unknown:
            raise ConfigError(f"Unknown config option(s): "
                              f"{', '.join(unknown)}")

        for name in _INT_OPTIONS:
            try:
                value = int(self._main[name])
            except ValueError:
                raise ConfigError(f"'{name}' must be an integer") from None
            if value < _MINIMUMS.get(name, 0):
                raise ConfigError(f"'{name}' must be at least "
                                  f"{_MINIMUMS.get(name, 0)}")
            self._options[name] = value
        self._options['audit'] = parse_bool('audit', self._main['audit']) or \
            os.environ.get(AUDIT_ENV) == '1'
        self._options['log'] = self._main['log']

    def _validate_types(
        self,
        validate_type: Callable[[Optional[str], str], bool],
    ) -> None:
        """Verify that every family has a valid type

        :param validate_type: A callable that validates the family types

        :raises ConfigError: if any type is missing or invalid
        """
        for name, config in self._families.items():
            module = config.get('module')
            try:
                type_ = config['type']
            except KeyError:
                raise ConfigError(f"Family {name} requires a type") from None
            exists = validate_type(module, type_)
            if not exists and module is None:
                raise ConfigError(f"No built-in family of type {type_}")
            elif not exists:
                raise ConfigError(f"Family module or class {module}.{type_} "
                                  "does not exist")

    def finalize(self,
                 validate_family_type: Callable[[Optional[str], str], bool]):
        """Finalize the configuration: fill default values, type-check the
        global options and validate the family types.

        :param validate_family_type: A callable to check if a family type is
                                     valid. First parameter is a module name,
                                     or ``None`` for a built-in or
                                     entry-point family. Second parameter is a
                                     class name or built-in family name.
        :raises ConfigError: if the configuration is invalid
        """
        if self._finalized:
            return

        self._fill_defaults()
        self._validate_types(validate_family_type)

        self._finalized = True


def _process_config(config: configparser.ConfigParser) -> Config:
    """Process the given :class:`~configparser.ConfigParser` into a
    :class:`Config`

    :param config: The configuration to process
    :raises ConfigError: if the configuration is invalid
    :returns: the processed configuration
    """
    # Note: ConfigParser already handles catching duplicate sections and
    #   duplicate keys

    main: Dict[str, str] = dict()
    families: Dict[str, Dict[str, str]] = dict()

    for section in config.sections():
        if section == 'nlcover':
            main.update(config[section])
            continue

        kind, sep, name = section.partition('.')
        if kind != 'family':
            raise ConfigError("Config section %s is not a family section" %
                              section)
        if sep != '.' or name == '':
            raise ConfigError("Config section %s must have a '.<name>'" %
                              section)
        families[name] = dict(config[section])

    return Config(main, families)


def read_config_from_path(filename: Union[str, pathlib.Path]) -> Config:
    """Read configuration from the named file or :class:`~pathlib.Path`

    :param filename: Filename or path to read from
    :raises ConfigError: if the config file cannot be read or is invalid
    :return: A :class:`Config`, not yet finalized
    """
    try:
        with open(filename, 'r') as f:
            return read_config(f)
    except OSError as e:
        raise ConfigError("Could not read config file %s: %s" %
                          (filename, e.strerror)) from e


def read_config(configfile: Iterable[str]) -> Config:
    """Read configuration in from the given file-like object opened in text
    mode

    :param configfile: Filelike object to read the config from
    :raises ConfigError: if the config file cannot be read or is invalid
    :return: A :class:`Config`, not yet finalized
    """
    config = configparser.ConfigParser()
    try:
        config.read_file(configfile)
    except configparser.Error as e:
        raise ConfigError("Error in config file: %s" % e) from e
    except OSError as e:
        raise ConfigError("Could not read config file: %s" % e) from e

    return _process_config(config)

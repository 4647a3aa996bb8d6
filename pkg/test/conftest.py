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

import logging

import pytest

import nlcover
from doubles import lst
from nlcover import instancefile
from nlcover.model import KcInstance, UfpInstance, UfpItem


@pytest.fixture
def kc_pair():
    """Two items f=[2,3] and f=[2,4] with demand 3 (optimum 5 at (2,1))"""
    return KcInstance((lst(2, 3), lst(2, 4)), 3)


@pytest.fixture
def ufp_three():
    """Points 1 and 2 with unit demand, covered by one item each and by a
    third item spanning both, all costing 1"""
    return UfpInstance((UfpItem(lst(1), (1, 1)),
                        UfpItem(lst(1), (2, 2)),
                        UfpItem(lst(1), (1, 2))), (1, 1))


@pytest.fixture
def config():
    """A finalized default :class:`~nlcover.Config`"""
    conf = nlcover.Config()
    conf.finalize(lambda mod, typ: True)
    return conf


@pytest.fixture
def json_factory(tmp_path):
    """Fixture creating a factory that writes JSON (or raw text) to a
    temporary file and returns its path"""
    count = 0

    def factory(data, raw=False):
        nonlocal count
        count += 1
        path = tmp_path / f"data_{count}.json"
        with open(path, 'w') as f:
            f.write(data if raw else instancefile.dumps(data))
        return str(path)
    return factory


@pytest.fixture
def no_audit_env(monkeypatch):
    """Make sure COVER_AUDIT from the environment does not leak in"""
    monkeypatch.delenv('COVER_AUDIT', raising=False)


@pytest.fixture
def reset_logging():
    """Remove handlers the CLI installs on the nlcover logger"""
    yield
    log = logging.getLogger('nlcover')
    for handler in list(log.handlers):
        log.removeHandler(handler)
        handler.close()
    log.setLevel(logging.NOTSET)

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
"""Tests for the random instance generators"""
import pytest

import nlcover
from doubles import kc_spec, ufp_spec
from nlcover.gen import COST_FAMILIES, GenSpec, generate, random_oracle
from nlcover.instancefile import canonical_digest
from nlcover.model import INF, OracleCost, compress_coordinates, validate


def test_deterministic():
    for spec in (kc_spec(seed=3), ufp_spec(seed=3)):
        assert canonical_digest(generate(spec)) == \
            canonical_digest(generate(spec))


def test_seed_matters():
    digests = {canonical_digest(generate(kc_spec(seed=s)))
               for s in range(20)}
    assert len(digests) > 1


@pytest.mark.parametrize('family', [f for f in COST_FAMILIES
                                    if f != 'oracle'])
def test_valid(family):
    for seed in range(30):
        for spec in (kc_spec(seed=seed, family=family),
                     ufp_spec(seed=seed, family=family)):
            report = validate(generate(spec))
            assert report.ok, (family, seed, report.problems)


def test_ranges_respected():
    for seed in range(50):
        instance = generate(kc_spec(seed=seed, n=(2, 3), m=(3, 4),
                                    demand=(1, 5)))
        assert 2 <= instance.n <= 3
        assert all(3 <= c.m <= 4 for c in instance.items)
        assert 1 <= instance.demand <= 5


def test_facility_pattern():
    for seed in range(20):
        instance = generate(kc_spec(seed=seed, family='facility'))
        for costs in instance.items:
            marginals = costs.marginals()
            assert len(set(marginals[1:])) <= 1
            assert all(marginals[0] >= g for g in marginals[1:])


def test_quadratic_convex():
    for seed in range(20):
        instance = generate(kc_spec(seed=seed, family='quadratic'))
        for costs in instance.items:
            marginals = costs.marginals()
            assert all(a < b for a, b in zip(marginals, marginals[1:]))


def test_steps_form():
    instance = generate(kc_spec(seed=1, family='steps', m=(5, 40)))
    assert all(c.is_steps for c in instance.items)


def test_adversarial_expensive_first_segment():
    for seed in range(20):
        instance = generate(kc_spec(seed=seed, family='adversarial'))
        for costs in instance.items:
            marginals = costs.marginals()
            assert marginals[0] >= 40
            assert all(g <= 1 for g in marginals[1:])


def test_oracle_items():
    instance = generate(kc_spec(seed=4, family='oracle',
                                oracle_family='quadratic'))
    assert all(isinstance(c, OracleCost) and c.family == 'quadratic'
               for c in instance.items)


def test_ufp_demands_coverable():
    for seed in range(50):
        instance = generate(ufp_spec(seed=seed))
        for t, demand in enumerate(instance.demands, start=1):
            capacity = sum(instance.items[i].costs.m
                           for i in instance.covering(t))
            assert demand <= capacity


def test_ufp_compression_size():
    """Merging runs of points with the same covering items leaves at most
    2n points"""
    for seed in range(50):
        instance = generate(ufp_spec(seed=seed, k=(1, 40)))
        compressed = compress_coordinates(instance).instance
        assert compressed.k <= 2 * instance.n


def test_unsatisfiable_draws():
    spec = GenSpec(n=(1, 30), m=(1, 30), demand=(900, 900))
    with pytest.raises(nlcover.UnsatisfiableSpec):
        generate(spec)


class TestGenSpec:
    def test_from_dict(self):
        spec = GenSpec.from_dict({'kind': 'ufp', 'n': [1, 3], 'm': 2,
                                  'seed': 5})
        assert spec.kind == 'ufp'
        assert spec.n == (1, 3)
        assert spec.m == (2, 2)
        assert spec.seed == 5
        assert spec.with_seed(9).seed == 9

    def test_single_integer_ranges(self):
        spec = GenSpec(kind='ufp', k=1, demand=3)
        assert spec.k == (1, 1)
        assert spec.demand == (3, 3)
        assert generate(spec).k == 1

    def test_bad_range_type(self):
        with pytest.raises(nlcover.UnsatisfiableSpec):
            GenSpec(n=(1, 2, 3))

    @pytest.mark.parametrize('raw', [
        [],
        {'colour': 'blue'},
        {'seed': True},
        {'seed': '3'},
        {'n': [3, 1]},
        {'n': [1, 2, 3]},
        {'n': 0},
        {'kind': 'tsp'},
        {'family': 'exotic'},
        {'family': 7},
        {'max_marginal': 0},
        {'kind': 'kc', 'n': 2, 'm': 2, 'demand': 5},
    ])
    def test_bad_spec(self, raw):
        with pytest.raises(nlcover.UnsatisfiableSpec):
            GenSpec.from_dict(raw)


class TestRandomOracle:
    def test_non_decreasing(self):
        for seed in range(50):
            curve = random_oracle(seed, 100)
            assert curve.m == 100
            assert not curve.problems()

    def test_infinite_tail(self):
        assert random_oracle(1, 50, infinite_tail=True)(50) is INF
        assert random_oracle(1, 50, infinite_tail=False)(50) is not INF

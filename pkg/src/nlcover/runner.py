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

"""Runs the solvers by algorithm id: compression, exact optima,
verification and benchmarking"""

import concurrent.futures
import functools
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import configuration
from .checks import CheckReport, check_certificate, check_solution
from .compress import CostOracle, compress_function, verify_compression
from .engine import Certificate
from .exceptions import (ConfigError, InvalidInstance, LevelOutOfRange,
                         RatioBoundViolated, UnknownAlgorithm)
from .families import make_oracle, validate_family_type
from .gen import GenSpec, generate
from .instancefile import canonical_digest, encode_cost
from .lp_round import Cut, round_2apx
from .model import (INF, Cost, Instance, IntegralSolution, KcInstance,
                    OracleCost, as_ufp, prepare, solution_cost)
from .oracles import brute_force_ufp, exact_kc
from .pd_kc import solve_pd_kc
from .pd_ufp import PruneLog, solve_pd_ufp

#: Algorithm ids and the instance types they accept
ALGORITHMS: Dict[str, Tuple[str, ...]] = {
    'pd-kc': ('kc',),
    'pd-ufp': ('ufp',),
    'dp': ('kc',),
    'brute': ('kc', 'ufp'),
    'round': ('kc',),
}

DEFAULT_ALGORITHM = {'kc': 'pd-kc', 'ufp': 'pd-ufp'}

REPORT_COLUMNS = ('trial', 'seed', 'algorithm', 'digest', 'primal', 'dual',
                  'lp', 'opt', 'ratio', 'ratio_decimal', 'wall_ms')


def decimal_string(value: Fraction, places: int = 6) -> str:
    """Render a rational with a fixed number of decimals (round half to
    even)"""
    scaled = round(value * 10 ** places)
    sign = '-' if scaled < 0 else ''
    whole, frac = divmod(abs(scaled), 10 ** places)
    return f"{sign}{whole}.{frac:0{places}d}"


@dataclass(frozen=True)
class SolveOutcome:
    """Everything one solve produced. ``instance`` is the instance actually
    solved (after any compression)."""
    algorithm: str
    instance: Instance
    solution: IntegralSolution
    cost: Cost
    certificate: Optional[Certificate] = None
    prune_log: Optional[PruneLog] = None
    lp_cost: Optional[Fraction] = None
    cuts: Tuple[Cut, ...] = ()
    history: Tuple[Fraction, ...] = ()

    @property
    def dual(self) -> Optional[Fraction]:
        if self.certificate is None:
            return None
        return self.certificate.dual_objective


@dataclass(frozen=True)
class RunReport:
    """One benchmark row. ``ratio`` is primal over the exact optimum when
    that was computed, otherwise primal over the certified lower bound
    (dual objective or LP cost) when there is one."""
    trial: int
    seed: int
    algorithm: str
    digest: str
    primal: Cost
    dual: Optional[Fraction] = None
    lp: Optional[Fraction] = None
    opt: Optional[Cost] = None
    ratio: Optional[Cost] = None
    wall_ms: int = 0

    @property
    def ratio_decimal(self) -> str:
        if self.ratio is None:
            return ''
        if self.ratio is INF:
            return 'inf'
        return decimal_string(self.ratio)

    def row(self) -> List[str]:
        def cell(value):
            return '' if value is None else str(encode_cost(value))
        return [str(self.trial), str(self.seed), self.algorithm, self.digest,
                cell(self.primal), cell(self.dual), cell(self.lp),
                cell(self.opt), cell(self.ratio), self.ratio_decimal,
                str(self.wall_ms)]


def ratio_of(primal: Cost, bound: Optional[Cost]) -> Optional[Cost]:
    """``primal / bound`` with ``0 / 0 = 1`` and ``x / 0 = INF``"""
    if bound is None or bound is INF or primal is INF:
        return None
    if bound == 0:
        return Fraction(1) if primal == 0 else INF
    return Fraction(primal) / Fraction(bound)


def summary_line(reports: Sequence[RunReport]) -> Optional[str]:
    """The ``#`` summary line of a benchmark, ``None`` for no trials"""
    if not reports:
        return None
    ratios = [r.ratio for r in reports if r.ratio is not None]
    if not ratios:
        return f"# trials={len(reports)} max_ratio= mean_ratio="
    if any(r is INF for r in ratios):
        worst: Cost = INF
        mean = 'inf'
    else:
        worst = max(ratios)
        mean = decimal_string(sum(ratios, Fraction(0)) / len(ratios))
    worst_text = 'inf' if worst is INF else decimal_string(worst)
    return f"# trials={len(reports)} max_ratio={worst_text} mean_ratio={mean}"


class Runner:
    """Runs algorithms under a configuration

    :param config: A :class:`~nlcover.Config`; it is finalized here

    :raises ConfigError: if the configuration is not valid
    """

    def __init__(self, config: Optional[configuration.Config] = None):
        self.log = logging.getLogger('nlcover')

        config = config if config is not None else configuration.Config()
        try:
            config.finalize(validate_family_type)
        except ConfigError as e:
            self.log.critical("Config error: %s", e)
            raise
        self.config = config

    def _audit(self, audit: Optional[bool]) -> bool:
        return self.config.audit or bool(audit)

    def compress_instance(self, instance: Instance, eps: Fraction) -> Instance:
        """Replace every Steps or oracle-model item by its compression and
        verify each one

        :raises BoundViolated: if a compression falls outside its bound
        """
        costs = []
        for i, item in enumerate(instance.costs):
            if isinstance(item, OracleCost):
                oracle = make_oracle(item, self.config,
                                     self.config.monotone_probes, seed=i)
            elif item.is_steps:
                oracle = CostOracle(item, item.m,
                                    self.config.monotone_probes, seed=i)
            else:
                costs.append(item)
                continue
            compressed = compress_function(oracle, eps)
            self.log.debug("Item %d: %d segments in %d pieces (%d queries)",
                           i, oracle.m, len(compressed.pieces), oracle.calls)
            verify_compression(oracle, compressed, eps,
                               self.config.sample_budget, seed=i)
            costs.append(compressed)
        return instance.replace_costs(costs)

    def solve(self, instance: Instance, algorithm: str,
              audit: Optional[bool] = None, epsilon: Optional[Fraction] = None,
              prune: bool = True) -> SolveOutcome:
        """Solve with the named algorithm

        :raises UnknownAlgorithm: if the algorithm does not exist or does not
                                  apply to this instance type
        """
        if algorithm not in ALGORITHMS:
            raise UnknownAlgorithm(f"Unknown algorithm {algorithm!r}; choose "
                                   f"from {', '.join(ALGORITHMS)}")
        if instance.kind not in ALGORITHMS[algorithm]:
            raise UnknownAlgorithm(f"Algorithm {algorithm} does not solve "
                                   f"{instance.kind} instances")
        if epsilon is not None:
            instance = self.compress_instance(instance, epsilon)
        audit = self._audit(audit)

        if algorithm == 'pd-kc':
            kc = solve_pd_kc(instance, audit)
            self._check_ratio(algorithm, kc.ratio_bound_ok, kc.primal_cost,
                              kc.certificate.dual_objective)
            return SolveOutcome(algorithm, instance, kc.solution,
                                kc.primal_cost, kc.certificate)
        if algorithm == 'pd-ufp':
            ufp = solve_pd_ufp(instance, audit, prune)
            self._check_ratio(algorithm, ufp.ratio_bound_ok, ufp.primal_cost,
                              ufp.certificate.dual_objective)
            return SolveOutcome(algorithm, instance, ufp.solution,
                                ufp.primal_cost, ufp.certificate,
                                ufp.prune_log)
        if algorithm == 'round':
            rounded = round_2apx(instance, self.config.cut_cap_factor,
                                 self.config.materialize_cap)
            return SolveOutcome(algorithm, instance, rounded.solution,
                                rounded.cost, lp_cost=rounded.lp_cost,
                                cuts=rounded.lp.cuts,
                                history=rounded.lp.history)
        cost, solution = self._exact(instance, algorithm)
        return SolveOutcome(algorithm, instance, solution, cost)

    def _check_ratio(self, algorithm: str, ok: bool, primal: Cost,
                     dual: Fraction):
        if not ok:
            self.log.error("%s: primal cost %s breaks the ratio bound against "
                           "dual objective %s", algorithm, primal, dual)
            raise RatioBoundViolated(
                f"{algorithm}: primal cost {primal} is above the ratio bound "
                f"for dual objective {dual}")

    def _exact(self, instance: Instance,
               algorithm: str) -> Tuple[Cost, IntegralSolution]:
        if algorithm == 'dp':
            assert isinstance(instance, KcInstance)
            return exact_kc(instance)
        ufp = as_ufp(instance) if isinstance(instance, KcInstance) \
            else instance
        return brute_force_ufp(ufp, self.config.enumeration_budget)

    def optimum(self, instance: Instance) -> Cost:
        """Exact optimum: dynamic programming for Knapsack-Cover, brute
        force for UFP-Cover"""
        algorithm = 'dp' if isinstance(instance, KcInstance) else 'brute'
        return self._exact(instance, algorithm)[0]

    def verify(self, instance: Instance, solution: IntegralSolution,
               stated_cost: Optional[Cost] = None,
               certificate: Optional[Certificate] = None) -> CheckReport:
        """Check a solution, and its certificate when one is given"""
        instance = prepare(instance)
        if certificate is None:
            return check_solution(instance, solution, stated_cost)
        factor = 2 if isinstance(instance, KcInstance) else 4
        if stated_cost is None:
            try:
                stated_cost = solution_cost(instance, solution)
            except (InvalidInstance, LevelOutOfRange):
                return check_solution(instance, solution)
        return check_certificate(instance, solution, stated_cost, certificate,
                                 factor)

    def run_trial(self, spec: GenSpec, algorithm: Optional[str],
                  with_optimum: bool, epsilon: Optional[Fraction],
                  trial: int, seed: int) -> RunReport:
        """Generate and solve one benchmark instance"""
        instance = generate(spec.with_seed(seed))
        algorithm = algorithm or DEFAULT_ALGORITHM[instance.kind]
        started = time.perf_counter()
        outcome = self.solve(instance, algorithm, epsilon=epsilon)
        wall_ms = int(round((time.perf_counter() - started) * 1000))

        opt = None
        if with_optimum:
            opt = self.optimum(outcome.instance)
        bound = opt if opt is not None else \
            (outcome.dual if outcome.dual is not None else outcome.lp_cost)
        return RunReport(trial, seed, algorithm,
                         canonical_digest(instance), outcome.cost,
                         outcome.dual, outcome.lp_cost, opt,
                         ratio_of(outcome.cost, bound), wall_ms)

    def bench(self, spec: GenSpec, trials: int, seed: int,
              algorithm: Optional[str] = None, with_optimum: bool = False,
              epsilon: Optional[Fraction] = None,
              workers: Optional[int] = None) -> List[RunReport]:
        """Run ``trials`` seeded trials (trial ``i`` uses seed ``seed + i``).
        Reports come back in trial order whatever the worker count."""
        workers = workers or self.config.workers
        run: Callable[[int, int], RunReport] = functools.partial(
            self.run_trial, spec, algorithm, with_optimum, epsilon)
        indices = list(range(trials))
        seeds = [seed + i for i in indices]
        self.log.info("Running %d trials with %d worker(s)", trials, workers)
        if workers <= 1 or trials <= 1:
            return [run(i, s) for i, s in zip(indices, seeds)]
        with concurrent.futures.ProcessPoolExecutor(workers) as pool:
            return list(pool.map(run, indices, seeds))

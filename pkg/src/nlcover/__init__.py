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

"""nlcover, solvers for Non-Linear Knapsack-Cover and UFP-Cover

Top-level module, containing the instance model, the solvers and the classes
useful to custom oracle families.
"""

from .configuration import Config, read_config, read_config_from_path
from .exceptions import (NLCoverException, ConfigError, InputError,
                         InfeasibleError, SolverError, InvalidInstance,
                         MaterializationTooLarge, LevelOutOfRange,
                         BudgetExceeded, UnsatisfiableSpec, NonMonotoneOracle,
                         InvalidEpsilon, ChainViolated, UnknownFamily,
                         UnknownAlgorithm, Stalled, OverfillDetected,
                         IterationCapExceeded, InfeasibleMaster,
                         UnboundedMaster, AssemblyInfeasible,
                         RatioBoundViolated, BoundViolated)
from .model import (INF, CostFunction, OracleCost, KcInstance, UfpItem,
                    UfpInstance, IntegralSolution, FractionalSolution,
                    validate, prepare, from_classic_kc, expand_steps_to_list,
                    compress_coordinates, as_ufp)
from .engine import Certificate, WaterFillingEngine
from .pd_kc import solve_pd_kc, check_certificate_kc
from .pd_ufp import solve_pd_ufp, check_certificate_ufp
from .oracles import exact_kc, brute_force_kc, brute_force_ufp, separate_gkc
from .lp_round import solve_gkc_lp, round_2apx
from .compress import CostOracle, compress_function, verify_compression
from .families import BaseFamily
from .gen import GenSpec, generate, random_oracle
from .runner import Runner

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

import argparse
import csv
import logging
import sys
from fractions import Fraction

from . import configuration, instancefile
from .exceptions import (ConfigError, InfeasibleError, InputError,
                         InvalidEpsilon, NLCoverException, SolverError)
from .gen import GenSpec, generate
from .runner import ALGORITHMS, DEFAULT_ALGORITHM, REPORT_COLUMNS, Runner, \
    summary_line

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_SOLVER = 4

log = logging.getLogger('nlcover')


def parse_epsilon(text: str) -> Fraction:
    """Parse a ``p/q`` (or integer) epsilon

    :raises InvalidEpsilon: if it is malformed or not positive
    """
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InvalidEpsilon(f"Epsilon {text!r} is not a rational p/q")
    if value <= 0:
        raise InvalidEpsilon(f"Epsilon must be positive, got {value}")
    return value


def parse_args(argv):
    """Parse command line arguments

    :param argv: Either ``None`` or a list of arguments
    :returns: a :class:`argparse.Namespace` containing the parsed arguments
    """
    parser = argparse.ArgumentParser(
        prog="nlcover",
        description="Solvers for Non-Linear Knapsack-Cover and UFP-Cover",
        epilog="Exit codes: 0 success, 2 invalid input, 3 infeasible "
               "instance, 4 failed check or internal error. COVER_AUDIT=1 "
               "forces audit mode.",
    )
    parser.add_argument("-c", "--configfile", default=None,
                        help="Path to the config file")
    parser.add_argument("-d", "--debug-logs", action="store_true",
                        help="Increase verbosity of logging significantly")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {configuration.VERSION}")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    gen = commands.add_parser("gen", help="Generate a random instance")
    gen.add_argument("--spec", required=True,
                     help="Generator spec (JSON)")
    gen.add_argument("--seed", type=int, default=None,
                     help="Seed, overriding the one in the spec")
    gen.add_argument("--out", default=None,
                     help="Write the instance here instead of stdout")

    solve = commands.add_parser("solve", help="Solve an instance")
    solve.add_argument("--algo", choices=list(ALGORITHMS), default=None,
                       help="Algorithm (default pd-kc or pd-ufp by instance "
                            "type)")
    solve.add_argument("--input", required=True, help="Instance (JSON)")
    solve.add_argument("--audit", action="store_true",
                       help="Record per-bucket rates in the certificate")
    solve.add_argument("--epsilon", type=str, default=None,
                       help="Compress Steps and oracle items to within 1+p/q")
    solve.add_argument("--out", default=None,
                       help="Write the solution here instead of stdout")
    solve.add_argument("--cert", default=None,
                       help="Write the certificate here (primal-dual "
                            "algorithms; turns audit on)")
    solve.add_argument("--prune-log", default=None,
                       help="Write the pruning log here (pd-ufp)")
    solve.add_argument("--no-prune", action="store_true",
                       help="Skip the pruning phase (pd-ufp)")
    solve.add_argument("--cuts", default=None,
                       help="Write the cutting-plane cuts here (round)")
    solve.add_argument("--compressed", default=None,
                       help="Write the instance actually solved here "
                            "(useful with --epsilon)")

    verify = commands.add_parser("verify", help="Verify a solution")
    verify.add_argument("--input", required=True, help="Instance (JSON)")
    verify.add_argument("--solution", required=True, help="Solution (JSON)")
    verify.add_argument("--cert", default=None, help="Certificate (JSON)")

    bench = commands.add_parser("bench", help="Benchmark on random instances")
    bench.add_argument("--spec", required=True, help="Generator spec (JSON)")
    bench.add_argument("--trials", type=int, required=True,
                       help="Number of trials")
    bench.add_argument("--seed", type=int, default=0,
                       help="Seed of trial 0; trial i uses seed + i")
    bench.add_argument("--oracle", action="store_true",
                       help="Compute the exact optimum for every trial")
    bench.add_argument("--algo", choices=list(ALGORITHMS), default=None,
                       help="Algorithm (default pd-kc or pd-ufp)")
    bench.add_argument("--workers", type=int, default=None,
                       help="Parallel worker processes")
    bench.add_argument("--epsilon", type=str, default=None,
                       help="Compress Steps and oracle items to within 1+p/q")
    return parser.parse_args(argv)


def setup_logging(conf: configuration.Config, debug: bool):
    """Install the single handler on the ``nlcover`` logger"""
    if conf.logfile == 'stderr':
        log_handler: logging.Handler = logging.StreamHandler(sys.stderr)
    else:
        log_handler = logging.FileHandler(conf.logfile)
    log_handler.setFormatter(logging.Formatter(
        "%(levelname)s %(name)s: %(message)s"))
    for old in list(log.handlers):
        log.removeHandler(old)
    log.addHandler(log_handler)

    if debug:
        log.setLevel(logging.DEBUG)
    else:
        log.setLevel(logging.INFO)


def _emit(data, path):
    if path is None:
        sys.stdout.write(instancefile.dumps(data))
    else:
        instancefile.write_json(path, data)


def cmd_gen(runner: Runner, args) -> int:
    spec = GenSpec.from_dict(instancefile.read_json(args.spec))
    if args.seed is not None:
        spec = spec.with_seed(args.seed)
    instance = generate(spec)
    _emit(instancefile.instance_to_dict(instance), args.out)
    return EXIT_OK


def cmd_solve(runner: Runner, args) -> int:
    instance = instancefile.load_instance(args.input)
    algorithm = args.algo or DEFAULT_ALGORITHM[instance.kind]
    epsilon = None if args.epsilon is None else parse_epsilon(args.epsilon)
    primal_dual = algorithm in ('pd-kc', 'pd-ufp')
    audit = args.audit or (primal_dual and args.cert is not None)

    outcome = runner.solve(instance, algorithm, audit=audit, epsilon=epsilon,
                           prune=not args.no_prune)
    log.info("%s: cost %s", algorithm, outcome.cost)

    _emit(instancefile.solution_to_dict(outcome.solution, outcome.cost),
          args.out)
    if args.cert is not None:
        if outcome.certificate is None:
            log.warning("Algorithm %s produces no certificate; not writing "
                        "%s", algorithm, args.cert)
        else:
            instancefile.write_json(
                args.cert,
                instancefile.certificate_to_dict(outcome.certificate))
    if args.prune_log is not None:
        if outcome.prune_log is None:
            log.warning("Algorithm %s does not prune; not writing %s",
                        algorithm, args.prune_log)
        else:
            instancefile.write_json(
                args.prune_log,
                instancefile.prune_log_to_dict(outcome.prune_log))
    if args.cuts is not None:
        if algorithm != 'round':
            log.warning("Only the round algorithm generates cuts; not "
                        "writing %s", args.cuts)
        else:
            instancefile.write_json(
                args.cuts,
                instancefile.cuts_to_dict(outcome.cuts, outcome.history))
    if args.compressed is not None:
        instancefile.dump_instance(outcome.instance, args.compressed)
    return EXIT_OK


def cmd_verify(runner: Runner, args) -> int:
    instance = instancefile.load_instance(args.input)
    solution, stated_cost = instancefile.solution_from_dict(
        instancefile.read_json(args.solution))
    certificate = None
    if args.cert is not None:
        certificate = instancefile.certificate_from_dict(
            instancefile.read_json(args.cert))
    report = runner.verify(instance, solution, stated_cost, certificate)
    if not report.ok:
        for failure in report.failures:
            where = ""
            if failure.raise_index is not None:
                where += f" (raise {failure.raise_index})"
            if failure.bucket is not None:
                where += f" (item {failure.bucket[0]}, bucket " \
                         f"{failure.bucket[1]})"
            print(f"FAIL {failure}{where}", file=sys.stderr)
        return EXIT_SOLVER
    log.info("Verified: %s", report)
    return EXIT_OK


def cmd_bench(runner: Runner, args) -> int:
    spec = GenSpec.from_dict(instancefile.read_json(args.spec))
    if args.trials < 0:
        raise InputError(f"Trial count must not be negative, got "
                         f"{args.trials}")
    if args.workers is not None and args.workers < 1:
        raise InputError(f"Worker count must be at least 1, got "
                         f"{args.workers}")
    epsilon = None if args.epsilon is None else parse_epsilon(args.epsilon)

    reports = runner.bench(spec, args.trials, args.seed, args.algo,
                           args.oracle, epsilon, args.workers)
    writer = csv.writer(sys.stdout, lineterminator='\n')
    writer.writerow(REPORT_COLUMNS)
    for report in reports:
        writer.writerow(report.row())
    summary = summary_line(reports)
    if summary is not None:
        print(summary)
    return EXIT_OK


COMMANDS = {
    'gen': cmd_gen,
    'solve': cmd_solve,
    'verify': cmd_verify,
    'bench': cmd_bench,
}


def run(args) -> int:
    """Run the parsed command and map errors onto exit codes

    :returns: the exit code
    """
    try:
        if args.configfile is None:
            conf = configuration.Config()
        else:
            conf = configuration.read_config_from_path(args.configfile)
    except ConfigError as e:
        print("Config error:", e, file=sys.stderr)
        return EXIT_INPUT

    setup_logging(conf, args.debug_logs)

    try:
        runner = Runner(conf)
        return COMMANDS[args.command](runner, args)
    except ConfigError as e:
        print("Config error:", e, file=sys.stderr)
        return EXIT_INPUT
    except InputError as e:
        print(f"Invalid input: {e}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as e:
        print(f"Infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SolverError as e:
        log.critical("Solver failed: %s", e)
        print(f"Internal check failed: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except NLCoverException as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main(argv=None):
    """Main entry point when run as a standalone program

    :param argv: List of arguments. If ``None``, read :data:`sys.argv`.
    """
    args = parse_args(argv)
    sys.exit(run(args))

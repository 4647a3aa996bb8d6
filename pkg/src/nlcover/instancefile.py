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

"""JSON files: instances, solutions, certificates, prune logs and cut lists.

Cost values are written as JSON integers when whole, ``"p/q"`` strings
otherwise, and ``"inf"`` for the infinite cost. Floats are rejected on
input so every value stays exact.
"""

# Instance format:
#
# {
#     "type": "kc" | "ufp",
#     "demand": int,                        (kc only)
#     "demands": [int, ...],                (ufp only)
#     "items": [
#         {
#             "interval": [s, e],           (ufp only)
#             "costs": {"model": "list", "values": [v, ...]}
#                    | {"model": "steps", "pieces": [{"upto": j,
#                                                     "value": v}, ...]}
#                    | {"model": "oracle", "family": name, "m": int,
#                       "params": {name: v, ...}}
#         },
#         ...
#     ]
# }

import hashlib
import json
import logging
import re
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .engine import AuditRecord, Certificate
from .exceptions import InvalidInstance
from .model import (INF, LIST_MODEL, STEPS_MODEL, Cost, CostFunction,
                    Infinite, Instance, IntegralSolution, ItemCost,
                    KcInstance, OracleCost, UfpInstance, UfpItem)

log = logging.getLogger('nlcover')

ORACLE_MODEL = 'oracle'

_RATIONAL = re.compile(r'^\s*(\d+)\s*(?:/\s*(\d+)\s*)?$')


class _CostJSONEncoder(json.JSONEncoder):
    """Subclass of JSONEncoder that can handle Fraction and INF"""
    def default(self, o):
        if isinstance(o, (Fraction, Infinite)):
            return encode_cost(o)
        return super().default(o)


def _reject_float(text: str):
    raise InvalidInstance(f"Floating point value {text} is not allowed; use "
                          "an integer or a \"p/q\" string")


def _reject_constant(text: str):
    raise InvalidInstance(f"Non-finite number {text} is not allowed; use "
                          "\"inf\"")


def encode_cost(value: Cost) -> Any:
    if value is INF:
        return 'inf'
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def parse_cost(raw: Any, where: str = "cost") -> Cost:
    """Decode a cost: an integer, a ``"p/q"`` string or ``"inf"``

    :raises InvalidInstance: on anything else, including negative values
    """
    if isinstance(raw, bool):
        raise InvalidInstance(f"{where}: {raw!r} is not a cost")
    if isinstance(raw, int):
        if raw < 0:
            raise InvalidInstance(f"{where}: {raw} is negative")
        return Fraction(raw)
    if isinstance(raw, str):
        if raw.strip().lower() == 'inf':
            return INF
        match = _RATIONAL.match(raw)
        if match is None:
            raise InvalidInstance(f"{where}: {raw!r} is not an integer, "
                                  "\"p/q\" or \"inf\"")
        denominator = int(match.group(2) or 1)
        if denominator == 0:
            raise InvalidInstance(f"{where}: {raw!r} has a zero denominator")
        return Fraction(int(match.group(1)), denominator)
    raise InvalidInstance(f"{where}: {raw!r} is not a cost")


def _parse_int(raw: Any, where: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise InvalidInstance(f"{where}: {raw!r} is not an integer")
    return raw


def _expect(raw: Any, kind: type, where: str) -> Any:
    if not isinstance(raw, kind):
        raise InvalidInstance(f"{where}: expected a JSON "
                              f"{'object' if kind is dict else 'array'}")
    return raw


def _parse_costs(raw: Any, where: str) -> ItemCost:
    raw = _expect(raw, dict, where)
    model = raw.get('model')
    if model == LIST_MODEL:
        values = _expect(raw.get('values'), list, f"{where}.values")
        return CostFunction(LIST_MODEL, values=tuple(
            parse_cost(v, f"{where}.values[{j}]")
            for j, v in enumerate(values)))
    if model == STEPS_MODEL:
        pieces = _expect(raw.get('pieces'), list, f"{where}.pieces")
        parsed = []
        for k, piece in enumerate(pieces):
            piece = _expect(piece, dict, f"{where}.pieces[{k}]")
            parsed.append((_parse_int(piece.get('upto'),
                                      f"{where}.pieces[{k}].upto"),
                           parse_cost(piece.get('value'),
                                      f"{where}.pieces[{k}].value")))
        return CostFunction.from_pieces(parsed)
    if model == ORACLE_MODEL:
        family = raw.get('family')
        if not isinstance(family, str):
            raise InvalidInstance(f"{where}.family: expected a name")
        m = _parse_int(raw.get('m'), f"{where}.m")
        if m < 0:
            raise InvalidInstance(f"{where}.m: {m} is negative")
        params = _expect(raw.get('params', {}), dict, f"{where}.params")
        return OracleCost(family, m, tuple(
            (name, parse_cost(v, f"{where}.params.{name}"))
            for name, v in params.items()))
    raise InvalidInstance(f"{where}.model: unknown cost model {model!r}")


def _costs_to_dict(costs: ItemCost) -> Dict[str, Any]:
    if isinstance(costs, OracleCost):
        return {'model': ORACLE_MODEL, 'family': costs.family, 'm': costs.m,
                'params': costs.param_dict()}
    if costs.is_steps:
        return {'model': STEPS_MODEL,
                'pieces': [{'upto': p.upto, 'value': p.value}
                           for p in costs.pieces]}
    return {'model': LIST_MODEL, 'values': list(costs.values)}


def instance_from_dict(raw: Any) -> Instance:
    """Build an instance from decoded JSON. Structure is checked here;
    invariants are left to :func:`~nlcover.model.validate`.

    :raises InvalidInstance: if the structure is wrong
    """
    raw = _expect(raw, dict, "instance")
    items = _expect(raw.get('items'), list, "items")
    kind = raw.get('type')
    if kind == 'kc':
        demand = _parse_int(raw.get('demand'), "demand")
        return KcInstance(tuple(
            _parse_costs(_expect(item, dict, f"items[{i}]").get('costs'),
                         f"items[{i}].costs")
            for i, item in enumerate(items)), demand)
    if kind == 'ufp':
        demands = _expect(raw.get('demands'), list, "demands")
        parsed_items = []
        for i, item in enumerate(items):
            item = _expect(item, dict, f"items[{i}]")
            interval = _expect(item.get('interval'), list,
                               f"items[{i}].interval")
            if len(interval) != 2:
                raise InvalidInstance(f"items[{i}].interval: expected "
                                      "[start, end]")
            parsed_items.append(UfpItem(
                _parse_costs(item.get('costs'), f"items[{i}].costs"),
                (_parse_int(interval[0], f"items[{i}].interval[0]"),
                 _parse_int(interval[1], f"items[{i}].interval[1]"))))
        return UfpInstance(tuple(parsed_items), tuple(
            _parse_int(d, f"demands[{t}]") for t, d in enumerate(demands)))
    raise InvalidInstance(f"type: unknown instance type {kind!r}")


def instance_to_dict(instance: Instance) -> Dict[str, Any]:
    if isinstance(instance, KcInstance):
        return {'type': 'kc', 'demand': instance.demand,
                'items': [{'costs': _costs_to_dict(c)}
                          for c in instance.items]}
    return {'type': 'ufp', 'demands': list(instance.demands),
            'items': [{'interval': list(item.interval),
                       'costs': _costs_to_dict(item.costs)}
                      for item in instance.items]}


def loads(text: str) -> Any:
    """Decode JSON text, refusing floats and non-finite numbers

    :raises InvalidInstance: if the text is not valid JSON
    """
    try:
        return json.loads(text, parse_float=_reject_float,
                          parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise InvalidInstance(f"Malformed JSON at ({e.lineno}:{e.colno}): "
                              f"{e.msg}")


def dumps(data: Any) -> str:
    return json.dumps(data, cls=_CostJSONEncoder, indent=2) + '\n'


def read_json(path: str) -> Any:
    """Read and decode a JSON file

    :raises InvalidInstance: if it cannot be read or decoded
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise InvalidInstance(f"Could not read {path}: {e.strerror}")
    except UnicodeDecodeError as e:
        raise InvalidInstance(f"Could not read {path}: not UTF-8 text "
                              f"(byte {e.start})")
    return loads(text)


def write_json(path: str, data: Any):
    """Write JSON to a file. Errors are logged and re-raised."""
    try:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(dumps(data))
    except OSError as e:
        log.error("Could not write %s: %s", path, e.strerror)
        raise


def load_instance(path: str) -> Instance:
    return instance_from_dict(read_json(path))


def dump_instance(instance: Instance, path: str):
    write_json(path, instance_to_dict(instance))


def canonical_digest(instance: Instance) -> str:
    """SHA-256 of the instance's canonical JSON (sorted keys, no
    whitespace)"""
    text = json.dumps(instance_to_dict(instance), cls=_CostJSONEncoder,
                      sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def solution_to_dict(solution: IntegralSolution,
                     cost: Cost) -> Dict[str, Any]:
    return {'levels': list(solution.levels), 'cost': cost}


def solution_from_dict(raw: Any) -> Tuple[IntegralSolution, Optional[Cost]]:
    """Decode a solution and its stated cost (``None`` when absent)"""
    raw = _expect(raw, dict, "solution")
    levels = _expect(raw.get('levels'), list, "levels")
    solution = IntegralSolution(tuple(_parse_int(x, f"levels[{i}]")
                                      for i, x in enumerate(levels)))
    cost = parse_cost(raw['cost'], "cost") if 'cost' in raw else None
    return solution, cost


def certificate_to_dict(certificate: Certificate) -> Dict[str, Any]:
    raises: List[Dict[str, Any]] = []
    for record in certificate.raises:
        entry: Dict[str, Any] = {'delta': record.delta,
                                 'residual': record.residual, 't': record.t}
        if record.tau is not None:
            entry['tau'] = [list(triple) for triple in record.tau]
        if record.levels is not None:
            entry['levels'] = list(record.levels)
        raises.append(entry)
    return {'dual_objective': certificate.dual_objective, 'raises': raises}


def _finite(raw: Any, where: str) -> Fraction:
    value = parse_cost(raw, where)
    if value is INF:
        raise InvalidInstance(f"{where}: must be finite")
    return value


def certificate_from_dict(raw: Any) -> Certificate:
    raw = _expect(raw, dict, "certificate")
    records = []
    audit = True
    for k, entry in enumerate(_expect(raw.get('raises'), list, "raises")):
        where = f"raises[{k}]"
        entry = _expect(entry, dict, where)
        t = entry.get('t')
        tau = None
        if 'tau' in entry:
            triples = []
            for triple in _expect(entry['tau'], list, f"{where}.tau"):
                triple = _expect(triple, list, f"{where}.tau")
                if len(triple) != 3:
                    raise InvalidInstance(f"{where}.tau: expected [item, "
                                          "bucket, rate]")
                triples.append(tuple(_parse_int(v, f"{where}.tau")
                                     for v in triple))
            tau = tuple(triples)
        else:
            audit = False
        levels = None
        if 'levels' in entry:
            levels = tuple(_parse_int(v, f"{where}.levels") for v in
                           _expect(entry['levels'], list, f"{where}.levels"))
        records.append(AuditRecord(
            _finite(entry.get('delta'), f"{where}.delta"),
            _parse_int(entry.get('residual'), f"{where}.residual"),
            None if t is None else _parse_int(t, f"{where}.t"),
            tau, levels))
    dual = _finite(raw.get("dual_objective"), "dual_objective")
    return Certificate(dual, records, audit)


def prune_log_to_dict(prune_log) -> List[Dict[str, Any]]:
    return [{'block': e.block, 'item': e.item, 'size': e.size,
             'action': e.action, 'reason': e.reason}
            for e in prune_log.entries]


def cuts_to_dict(cuts: Sequence, history: Sequence[Fraction]
                 ) -> Dict[str, Any]:
    return {'cuts': [{'a': list(cut.a), 'd': cut.d} for cut in cuts],
            'objective_history': list(history)}

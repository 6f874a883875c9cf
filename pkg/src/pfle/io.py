"""JSON file formats for instances and solutions.

Numbers are written as JSON integers when integral and as exact ``"p/q"``
strings otherwise. On input, integers, ``"p/q"`` strings and decimal strings
(``"2.5"``) are all accepted and converted exactly.

Instance document::

    {
      "points": [0, 1, 2],
      "dist": [[0, 1, 2], [1, 0, 1], [2, 1, 0]],
      "facilities": [0, 2],
      "lease_durations": [5, 20],
      "lease_costs": [[4, 10], [3, 9]],
      "clients": [{"point": 1, "penalty": 10, "arrival": 0}]
    }

Solution document: ``leases`` is a list of ``{"facility", "lease_type",
"start"}`` objects (start may be negative), ``assignment`` holds an index into
``leases`` or ``null`` per client, plus optional ``cost`` and ``dual``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import ParseError
from .model import Client, Instance, Solution, as_fraction, validate_instance

INSTANCE_KEYS = ("points", "dist", "facilities", "lease_durations", "lease_costs", "clients")


def num_to_json(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _num(value, field):
    if isinstance(value, (int, str)) and not isinstance(value, bool):
        try:
            return as_fraction(value)
        except (ValueError, ZeroDivisionError):
            pass
    raise ParseError(f"not an exact number: {value!r}", field=field)


def _int(value, field):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", field=field)
    return value


def _format(obj, depth, indent):
    compact = not isinstance(obj, (dict, list)) or depth >= 3 or not any(
        isinstance(v, (dict, list)) for v in (obj.values() if isinstance(obj, dict) else obj))
    if compact:
        return json.dumps(obj, separators=(", ", ": "))
    pad = "  " * (indent + 1)
    if isinstance(obj, dict):
        items = [f"{pad}{json.dumps(k)}: {_format(v, depth + 1, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    items = [pad + _format(v, depth + 1, indent + 1) for v in obj]
    return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"


def dumps(obj) -> str:
    """Canonical JSON text: outer levels expanded one item per line, rows compact."""
    return _format(obj, 0, 0) + "\n"


def _load_json(text, source):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: {exc.msg}", line=exc.lineno) from None


def instance_to_dict(inst) -> dict:
    return {
        "points": list(inst.points),
        "dist": [[num_to_json(x) for x in row] for row in inst.dist],
        "facilities": list(inst.facilities),
        "lease_durations": list(inst.lease_durations),
        "lease_costs": [[num_to_json(x) for x in row] for row in inst.lease_costs],
        "clients": [{"point": c.position, "penalty": num_to_json(c.penalty), "arrival": c.arrival}
                    for c in inst.clients],
    }


def instance_from_dict(doc):
    if not isinstance(doc, dict):
        raise ParseError("instance must be a JSON object")
    for key in INSTANCE_KEYS:
        if key not in doc:
            raise ParseError("missing key", field=key)
        if not isinstance(doc[key], list):
            raise ParseError("expected a list", field=key)
    for i, p in enumerate(doc["points"]):
        if not isinstance(p, (int, str)) or isinstance(p, bool):
            raise ParseError(f"point ids must be strings or integers, got {p!r}", field=f"points[{i}]")
    dist = []
    for i, row in enumerate(doc["dist"]):
        if not isinstance(row, list):
            raise ParseError("expected a list", field=f"dist[{i}]")
        dist.append(tuple(_num(x, f"dist[{i}][{k}]") for k, x in enumerate(row)))
    costs = []
    for i, row in enumerate(doc["lease_costs"]):
        if not isinstance(row, list):
            raise ParseError("expected a list", field=f"lease_costs[{i}]")
        costs.append(tuple(_num(x, f"lease_costs[{i}][{k}]") for k, x in enumerate(row)))
    clients = []
    for i, c in enumerate(doc["clients"]):
        if not isinstance(c, dict) or not {"point", "penalty", "arrival"} <= c.keys():
            raise ParseError("client needs point, penalty and arrival", field=f"clients[{i}]")
        clients.append(Client(i, c["point"], _num(c["penalty"], f"clients[{i}].penalty"),
                              _int(c["arrival"], f"clients[{i}].arrival")))
    raw = Instance(
        points=tuple(doc["points"]),
        dist=tuple(dist),
        facilities=tuple(doc["facilities"]),
        lease_durations=tuple(_int(d, f"lease_durations[{k}]")
                              for k, d in enumerate(doc["lease_durations"])),
        lease_costs=tuple(costs),
        clients=tuple(clients),
    )
    return validate_instance(raw)


def read_instance(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    doc = _load_json(text, path)
    return instance_from_dict(doc)


def write_instance(inst, path) -> None:
    Path(path).write_text(dumps(instance_to_dict(inst)))


def lease_to_dict(f) -> dict:
    return {"facility": f.facility, "lease_type": f.lease_type, "start": f.start}


def solution_to_dict(sol, cost=None, dual=None) -> dict:
    index = {f: i for i, f in enumerate(sol.leases)}
    out = {
        "leases": [lease_to_dict(f) for f in sol.leases],
        "assignment": [None if f is None else index[f] for f in sol.assignment],
    }
    if cost is not None:
        out["cost"] = {k: num_to_json(v) for k, v in cost.as_dict().items()}
    if dual is not None:
        out["dual"] = [num_to_json(a) for a in dual]
    return out


def solution_from_dict(inst, doc) -> tuple:
    """Parse a solution document against ``inst``. Returns ``(solution, dual or None)``."""
    if not isinstance(doc, dict) or "leases" not in doc or "assignment" not in doc:
        raise ParseError("solution needs 'leases' and 'assignment'")
    fac_index = {p: i for i, p in enumerate(inst.facilities)}
    leases = []
    for i, item in enumerate(doc["leases"]):
        field = f"leases[{i}]"
        if not isinstance(item, dict) or not {"facility", "lease_type", "start"} <= item.keys():
            raise ParseError("lease needs facility, lease_type and start", field=field)
        if item["facility"] not in fac_index:
            raise ParseError(f"unknown facility {item['facility']!r}", field=field)
        k = _int(item["lease_type"], field + ".lease_type")
        if not 1 <= k <= inst.num_lease_types:
            raise ParseError(f"lease type {k} out of range", field=field)
        leases.append(inst.lease(fac_index[item["facility"]], k, _int(item["start"], field + ".start")))
    assignment = []
    for j, a in enumerate(doc["assignment"]):
        if a is None:
            assignment.append(None)
            continue
        a = _int(a, f"assignment[{j}]")
        if not 0 <= a < len(leases):
            raise ParseError(f"lease index {a} out of range", field=f"assignment[{j}]")
        assignment.append(leases[a])
    dual = None
    if doc.get("dual") is not None:
        dual = tuple(_num(x, f"dual[{j}]") for j, x in enumerate(doc["dual"]))
        if len(dual) != len(inst.clients):
            raise ParseError("dual vector length does not match clients", field="dual")
    return Solution(tuple(leases), tuple(assignment)), dual


def read_solution(inst, path) -> tuple:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return solution_from_dict(inst, _load_json(text, path))


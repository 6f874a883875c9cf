"""Command-line entry point: ``pfle gen|solve|exact|verify|bench``.

Exit codes: 0 success, 1 certificate or assertion failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .engine import prune_unused_leases, solve_traced
from .errors import InvalidConfig, PFLeError, TooLarge
from .generator import GeneratorConfig, generate_instance
from .io import dumps, instance_to_dict, num_to_json, read_instance, read_solution, solution_to_dict
from .model import solution_cost
from .oracle import OracleLimits, exact_opt
from .verify import CertificateReport, certify, check_dual_feasibility, check_primal_feasibility

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

BENCH_HEADER = ["config", "seed", "num_points", "num_facilities", "num_clients",
                "num_lease_types", "candidates", "dual", "total", "ratio_to_dual",
                "opt", "ratio_to_opt", "wall_time"]


def _ratio(num, den):
    if den == 0:
        return None if num == 0 else "inf"
    return num_to_json(Fraction(num) / den)


def _checks_json(rep: CertificateReport):
    return {"passed": rep.passed,
            "checks": [{"name": c.name, "passed": c.passed, "witness": c.witness}
                       for c in rep.checks]}


def _emit(report: dict, as_json: bool, out=None):
    out = out or sys.stdout
    if as_json:
        out.write(dumps(report))
        return
    for key, value in report.items():
        if isinstance(value, dict) and "checks" in value:
            out.write(f"{key}: {'PASS' if value['passed'] else 'FAIL'}\n")
            for c in value["checks"]:
                status = "ok  " if c["passed"] else "FAIL"
                out.write(f"  {status} {c['name']}" + (f"  [{c['witness']}]" if c["witness"] else "") + "\n")
        elif isinstance(value, dict):
            out.write(f"{key}: " + ", ".join(f"{k}={v}" for k, v in value.items()) + "\n")
        elif isinstance(value, list):
            out.write(f"{key}: {json.dumps(value)}\n")
        else:
            out.write(f"{key}: {value}\n")


def cmd_gen(args) -> int:
    cfg = GeneratorConfig(
        seed=args.seed, num_points=args.points, num_facilities=args.facilities,
        num_clients=args.clients, num_lease_types=args.lease_types, horizon=args.horizon,
        cost_scale=args.cost_scale, penalty_scale=args.penalty_scale,
        economy_of_scale=not args.no_economy_of_scale,
    )
    text = dumps(instance_to_dict(generate_instance(cfg)))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    sol, trace = solve_traced(inst)
    rep = certify(inst, sol, trace) if args.certify else None
    if args.prune:
        sol = prune_unused_leases(sol)
    cost = solution_cost(inst, sol)
    dual = sum(trace.ascent.alpha, Fraction(0))
    report = {
        "cost": {k: num_to_json(v) for k, v in cost.as_dict().items()},
        "dual_objective": num_to_json(dual),
        "ratio": _ratio(cost.total, dual),
        "events": len(trace.ascent.events),
        "tentatively_open": len(trace.ascent.tentatively_open),
        "independent": len(trace.independent),
        "pruned": bool(args.prune),
        "solution": solution_to_dict(sol, dual=trace.ascent.alpha if args.emit_dual else None),
    }
    if rep is not None:
        report["certificate"] = _checks_json(rep)
    if args.output:
        Path(args.output).write_text(dumps(solution_to_dict(
            sol, cost=cost, dual=trace.ascent.alpha if args.emit_dual else None)))
    _emit(report, args.json)
    return EXIT_FAIL if rep is not None and not rep.passed else EXIT_OK


def cmd_exact(args) -> int:
    inst = read_instance(args.instance)
    limits = OracleLimits(max_candidate_leases=args.max_candidates, max_clients=args.max_clients)
    _, opt = exact_opt(inst, limits)
    sol, trace = solve_traced(inst)
    total = solution_cost(inst, sol).total
    dual = sum(trace.ascent.alpha, Fraction(0))
    ok = total <= 3 * opt and dual <= opt
    report = {
        "opt": num_to_json(opt),
        "engine_total": num_to_json(total),
        "dual_objective": num_to_json(dual),
        "ratio": _ratio(total, opt),
        "within_3_opt": total <= 3 * opt,
        "weak_duality": dual <= opt,
    }
    _emit(report, args.json)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    inst = read_instance(args.instance)
    sol, dual = read_solution(inst, args.solution)
    rep = check_primal_feasibility(inst, sol)
    report = {}
    if rep.passed:
        report["cost"] = {k: num_to_json(v) for k, v in rep.cost.as_dict().items()}
    if dual is not None:
        drep = check_dual_feasibility(inst, dual)
        rep.extend(drep)
        if rep.cost is not None:
            rep.add("total_within_3_dual", rep.cost.total <= 3 * drep.dual_objective,
                    f"{rep.cost.total} > 3*{drep.dual_objective}")
        report["dual_objective"] = num_to_json(drep.dual_objective)
    report["certificate"] = _checks_json(rep)
    _emit(report, args.json)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _load_matrix(path):
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidConfig(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{path}: {exc.msg} (line {exc.lineno})") from None
    rows = doc.get("rows", []) if isinstance(doc, dict) else doc
    names = {f.name for f in dataclasses.fields(GeneratorConfig)} - {"seed"}
    jobs = []
    for i, row in enumerate(rows):
        if not isinstance(row, dict):
            raise InvalidConfig(f"matrix row {i} must be an object")
        seeds = row.get("seeds", [1])
        if isinstance(seeds, dict):
            seeds = range(seeds["from"], seeds["to"] + 1)
        unknown = set(row) - names - {"seeds", "name", "exact"}
        if unknown:
            raise InvalidConfig(f"matrix row {i}: unknown keys {sorted(unknown)}")
        params = {k: v for k, v in row.items() if k in names}
        for s in seeds:
            cfg = GeneratorConfig(seed=s, **params)
            cfg.validate()
            jobs.append((row.get("name", f"row{i}"), cfg, bool(row.get("exact", False))))
    return jobs


def bench_row(job, max_candidates=18):
    name, cfg, exact = job
    t0 = time.perf_counter()
    inst = generate_instance(cfg)
    sol, trace = solve_traced(inst)
    total = solution_cost(inst, sol).total
    dual = sum(trace.ascent.alpha, Fraction(0))
    opt = None
    if exact:
        try:
            _, opt = exact_opt(inst, OracleLimits(max_candidate_leases=max_candidates))
        except TooLarge:
            opt = None
    wall = time.perf_counter() - t0
    return [name, cfg.seed, cfg.num_points, cfg.num_facilities, cfg.num_clients,
            cfg.num_lease_types, len(inst.candidates), num_to_json(dual), num_to_json(total),
            _ratio(total, dual) or "", "" if opt is None else num_to_json(opt),
            "" if opt is None else (_ratio(total, opt) or ""), f"{wall:.4f}"]


def _as_fraction(cell):
    return None if cell in ("", "inf") else Fraction(cell)


def cmd_bench(args) -> int:
    jobs = _load_matrix(args.matrix)
    if args.jobs > 1 and jobs:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(bench_row, jobs, [args.max_candidates] * len(jobs)))
    else:
        rows = [bench_row(j, args.max_candidates) for j in jobs]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "bench.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BENCH_HEADER)
        w.writerows(rows)
    col = BENCH_HEADER.index
    r_dual = [x for x in (_as_fraction(r[col("ratio_to_dual")]) for r in rows) if x is not None]
    r_opt = [x for x in (_as_fraction(r[col("ratio_to_opt")]) for r in rows) if x is not None]
    print(f"rows: {len(rows)}")
    print(f"max ratio_to_dual: {num_to_json(max(r_dual)) if r_dual else 'n/a'}")
    print(f"max ratio_to_opt: {num_to_json(max(r_opt)) if r_opt else 'n/a'}")
    print(f"written: {out / 'bench.csv'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pfle", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a seeded random instance")
    defaults = GeneratorConfig()
    g.add_argument("--seed", type=int, default=defaults.seed)
    g.add_argument("--points", type=int, default=defaults.num_points)
    g.add_argument("--facilities", type=int, default=defaults.num_facilities)
    g.add_argument("--clients", type=int, default=defaults.num_clients)
    g.add_argument("--lease-types", type=int, default=defaults.num_lease_types)
    g.add_argument("--horizon", type=int, default=defaults.horizon)
    g.add_argument("--cost-scale", type=int, default=defaults.cost_scale)
    g.add_argument("--penalty-scale", type=int, default=defaults.penalty_scale)
    g.add_argument("--no-economy-of-scale", action="store_true")
    g.add_argument("-o", "--output", help="write here instead of stdout")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run the primal-dual algorithm")
    s.add_argument("instance")
    s.add_argument("--prune", action="store_true", help="drop purchased leases serving nobody")
    s.add_argument("--certify", action="store_true", help="run every certificate check")
    s.add_argument("--emit-dual", action="store_true", help="include the dual vector")
    s.add_argument("--json", action="store_true")
    s.add_argument("-o", "--output", help="also write the solution document here")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("exact", help="compare against the exact optimum")
    e.add_argument("instance")
    e.add_argument("--max-candidates", type=int, default=OracleLimits.max_candidate_leases)
    e.add_argument("--max-clients", type=int, default=OracleLimits.max_clients)
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_exact)

    v = sub.add_parser("verify", help="check a solution file against an instance")
    v.add_argument("instance")
    v.add_argument("solution")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run a matrix of generated instances to CSV")
    b.add_argument("matrix")
    b.add_argument("--out", required=True)
    b.add_argument("--max-candidates", type=int, default=18)
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PFLeError, ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, PFLeError) and not isinstance(exc, (ValueError, TooLarge)):
            # solver-internal failures (coverage holes, non-termination) are bugs, not input errors
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_FAIL
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

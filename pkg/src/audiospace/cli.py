"""Command line front end.

Thin wrapper over the library: every subcommand loads documents, calls
the same functions the HTTP service uses, and maps outcomes to exit
codes.  0 means success (and, for comparisons, equivalence), 1 means a
real mismatch or rule violation, 2 means the inputs were unusable.
"""

from __future__ import annotations

import argparse
import json
import sys

from .catalog import Catalog, CatalogError, load_catalog
from .engine import RunResult, run_simulation
from .fuzz import run_fuzz
from .logdiff import DiffResult, LogDiffError, diff_logs
from .oracle import run_oracle
from .renderlog import RenderLogError, log_from_jsonl
from .scenario import Scenario, ScenarioError, check_against_catalog, load_scenario

USAGE_ERROR = 2
MISMATCH = 1
OK = 0


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return USAGE_ERROR


def _load_catalog(path: str) -> Catalog:
    with open(path, "rb") as fh:
        return load_catalog(fh)


def _load_scenario(path: str) -> Scenario:
    with open(path, "rb") as fh:
        return load_scenario(fh)


def _print_mismatches(diff: DiffResult, limit: int = 10) -> None:
    print(
        f"logs differ: {len(diff.mismatches)} interval(s), "
        f"total {diff.total_mismatch_ms} ms, longest {diff.max_mismatch_ms} ms",
        file=sys.stderr,
    )
    for m in diff.mismatches[:limit]:
        print(
            f"  device {m.device} [{m.t0}, {m.t1}): {m.a_desc}  vs  {m.b_desc}",
            file=sys.stderr,
        )
    if len(diff.mismatches) > limit:
        print(f"  ... and {len(diff.mismatches) - limit} more", file=sys.stderr)


def _metrics_doc(result: RunResult) -> dict:
    return {
        **result.metrics.to_dict(),
        "tap_tips": [
            {
                "t_ms": tip.t_ms,
                "device_id": tip.device_id,
                "wall_id": tip.wall_id,
                "target_ids": list(tip.target_ids),
                "tip_duration_ms": tip.tip_duration_ms,
            }
            for tip in result.tap_tips
        ],
        "network": vars(result.network_stats),
    }


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        catalog = _load_catalog(args.catalog)
        scenario = _load_scenario(args.scenario)
        result = run_simulation(catalog, scenario)
    except (OSError, CatalogError, ScenarioError) as exc:
        return _fail(str(exc))

    jsonl = result.render_log.to_jsonl()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(jsonl)
    else:
        sys.stdout.write(jsonl)

    if args.metrics:
        with open(args.metrics, "w", encoding="utf-8") as fh:
            json.dump(_metrics_doc(result), fh, indent=2)
            fh.write("\n")

    log = result.render_log
    print(
        f"simulated {log.duration_ms} ms, {len(log.devices)} device(s), "
        f"{len(log.segments)} segment(s), {len(result.messages)} message(s), "
        f"{len(result.tap_tips)} tap tip(s)",
        file=sys.stderr,
    )

    if args.oracle:
        reference = run_oracle(catalog, scenario)
        diff = diff_logs(log, reference)
        if diff.equal:
            byte_note = (
                "byte-identical" if log.to_jsonl() == reference.to_jsonl() else "equivalent"
            )
            print(f"oracle check: {byte_note}", file=sys.stderr)
            return OK
        _print_mismatches(diff)
        return MISMATCH
    return OK


def _cmd_diff(args: argparse.Namespace) -> int:
    try:
        with open(args.log_a, encoding="utf-8") as fh:
            a = log_from_jsonl(fh.read())
        with open(args.log_b, encoding="utf-8") as fh:
            b = log_from_jsonl(fh.read())
        diff = diff_logs(a, b)
    except (OSError, RenderLogError, LogDiffError) as exc:
        return _fail(str(exc))
    if diff.equal:
        print("logs are equivalent")
        return OK
    _print_mismatches(diff)
    return MISMATCH


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        catalog = _load_catalog(args.catalog)
    except (OSError, CatalogError) as exc:
        return _fail(str(exc))
    print(
        f"catalog ok: {len(catalog.rooms)} room(s), {len(catalog.walls)} wall(s), "
        f"{len(catalog.targets_by_id)} target(s), {len(catalog.clips)} clip(s)"
    )
    if catalog.orphan_clip_ids:
        print(
            f"warning: {len(catalog.orphan_clip_ids)} clip(s) referenced by no target: "
            f"{list(catalog.orphan_clip_ids)}",
            file=sys.stderr,
        )
    if args.scenario:
        try:
            scenario = _load_scenario(args.scenario)
        except (OSError, ScenarioError) as exc:
            return _fail(str(exc))
        problems = check_against_catalog(scenario, catalog)
        if problems:
            for problem in problems:
                print(f"error: {problem}", file=sys.stderr)
            return USAGE_ERROR
        print(
            f"scenario ok: {len(scenario.devices)} device(s), "
            f"{len(scenario.events)} event(s), {scenario.duration_ms} ms"
        )
    return OK


def _cmd_fuzz(args: argparse.Namespace) -> int:
    try:
        catalog = _load_catalog(args.catalog)
    except (OSError, CatalogError) as exc:
        return _fail(str(exc))
    report = run_fuzz(catalog, seed=args.seed, events_per_run=args.events, runs=args.runs)
    print(
        f"fuzz: {report.runs} run(s), {report.events_replayed} event(s) replayed, "
        f"{report.oracle_checked} reference-checked, {len(report.violations)} violation(s)"
    )
    for violation in report.violations:
        print(f"  {violation}", file=sys.stderr)
    return OK if report.ok else MISMATCH


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="audiospace",
        description="Shared-audio protocol engine: simulate, compare, validate, fuzz.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a scenario and emit its render log")
    p_run.add_argument("--catalog", required=True, help="catalog JSON file")
    p_run.add_argument("--scenario", required=True, help="scenario JSON file")
    p_run.add_argument("--oracle", action="store_true", help="also run the reference renderer and compare")
    p_run.add_argument("--out", help="write render log JSONL here instead of stdout")
    p_run.add_argument("--metrics", help="write metrics JSON here")
    p_run.set_defaults(func=_cmd_run)

    p_diff = sub.add_parser("diff", help="compare two render log JSONL files")
    p_diff.add_argument("log_a")
    p_diff.add_argument("log_b")
    p_diff.set_defaults(func=_cmd_diff)

    p_val = sub.add_parser("validate", help="check a catalog, optionally with a scenario")
    p_val.add_argument("--catalog", required=True)
    p_val.add_argument("--scenario")
    p_val.set_defaults(func=_cmd_validate)

    p_fuzz = sub.add_parser("fuzz", help="random scenarios under lossy networks, rules checked")
    p_fuzz.add_argument("--catalog", required=True)
    p_fuzz.add_argument("--seed", type=int, default=0)
    p_fuzz.add_argument("--events", type=int, default=100, help="events per run")
    p_fuzz.add_argument("--runs", type=int, default=5, help="runs per loss rate")
    p_fuzz.set_defaults(func=_cmd_fuzz)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front-end: parse -> check -> query -> report.

Exit codes are a stable contract: 0 clean, 1 violations found, 2 usage or
load failure.  JSON output is key-sorted, so identical inputs produce
byte-identical reports.  Set GFO_COLOR=1 for ANSI colors in human output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import checker
from .chrono import TimeBoundary, coord_str
from .dsl import ParseError, parse_file, parse_query
from .errors import GfoError
from .functions import is_actual_realization, is_actual_realizer
from .model import Model
from .truthmakers import classify_property_support, find_truthmakers

HUMAN = "human"
JSON = "json"


@dataclass
class RunConfig:
    command: str
    inputs: list
    complete: bool = False
    integration_mode: str = checker.IDENTITY
    tolerance: Fraction = Fraction(0)
    output_format: str = HUMAN


def _color_enabled() -> bool:
    return os.environ.get("GFO_COLOR", "") == "1"


def _red(text: str) -> str:
    return f"\x1b[31m{text}\x1b[0m" if _color_enabled() else text


def _emit_json(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _emit_diagnostics(exc: ParseError, output_format: str) -> None:
    if output_format == JSON:
        _emit_json({"diagnostics": [d.to_json() for d in exc.diagnostics]})
    else:
        for diagnostic in exc.diagnostics:
            print(_red(str(diagnostic)), file=sys.stderr)


def _fmt_value(value) -> object:
    if isinstance(value, Fraction):
        return coord_str(value)
    return value


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def _check_file(path: str, cfg: RunConfig) -> dict:
    m = parse_file(path)
    violations = list(checker.check_disjointness(m))
    derived: list = []
    if cfg.complete:
        m, derived = checker.complete_integration(m, cfg.integration_mode)
    for cid in sorted(m.continuants):
        c = m.continuants[cid]
        if not c.material:
            continue
        result = checker.check_integration(m, c, cfg.integration_mode)
        if not isinstance(result, checker.IntegrationWitness):
            violations.extend(result)
    violations.extend(checker.check_presential_dependence(m))

    continuant_changes = []
    for cid in sorted(m.continuants):
        changes = checker.detect_continuant_changes(m, m.continuants[cid])
        continuant_changes.append({"id": cid, "changes": len(changes)})
    trajectory_changes = []
    for pid in sorted(m.processes):
        p = m.processes[pid]
        for prop in sorted(p.trajectories):
            points = checker.detect_process_changes(m, p, prop, cfg.tolerance)
            trajectory_changes.append(
                {
                    "id": pid,
                    "property": prop,
                    "points": [coord_str(t) for t in points],
                }
            )

    violations = checker.sort_violations(violations)
    return {
        "path": path,
        "entities": m.entity_count(),
        "samples": m.sample_count(),
        "violations": [v.to_json() for v in violations],
        "derived_processes": derived,
        "changes": {
            "continuants": continuant_changes,
            "trajectories": trajectory_changes,
        },
    }


def run_check(cfg: RunConfig) -> int:
    reports = []
    for path in cfg.inputs:
        try:
            reports.append(_check_file(path, cfg))
        except ParseError as exc:
            _emit_diagnostics(exc, cfg.output_format)
            return 2
        except OSError as exc:
            print(f"gfo: cannot read {path}: {exc}", file=sys.stderr)
            return 2
    total = sum(len(r["violations"]) for r in reports)
    if cfg.output_format == JSON:
        _emit_json({"files": reports, "total_violations": total})
    else:
        for report in reports:
            print(
                f"{report['path']}: {len(report['violations'])} violations, "
                f"{report['entities']} entities, {report['samples']} samples"
            )
            for v in report["violations"]:
                at = f" at {v['at']}" if "at" in v else ""
                subjects = ", ".join(v["subjects"])
                print(_red(f"  {v['axiom']}: {subjects}{at}: {v['message']}"))
            for pid in report["derived_processes"]:
                print(f"  derived process {pid}")
            for entry in report["changes"]["continuants"]:
                if entry["changes"]:
                    print(f"  changes: {entry['id']}: {entry['changes']} change point(s)")
            for entry in report["changes"]["trajectories"]:
                if entry["points"]:
                    points = ", ".join(entry["points"])
                    print(
                        f"  changes: {entry['id']}.{entry['property']}: at {points}"
                    )
    errors = any(
        v["severity"] == "error" for r in reports for v in r["violations"]
    )
    return 1 if errors else 0


# ---------------------------------------------------------------------------
# query
# ---------------------------------------------------------------------------


def _query_truthmakers(m: Model, text: str):
    prop = parse_query(text, m)
    return [tm.to_json() for tm in find_truthmakers(m, prop)]


def _query_realizers(m: Model, fn_id: str):
    fn = m.functions.get(fn_id)
    if fn is None:
        raise GfoError(f"function {fn_id!r} is not declared")
    out = []
    executors = sorted({x for x, _ in m.exe_assertions})
    for x in executors:
        if is_actual_realizer(x, fn, m):
            out.append(x)
    return out


def _query_realizations(m: Model, fn_id: str):
    fn = m.functions.get(fn_id)
    if fn is None:
        raise GfoError(f"function {fn_id!r} is not declared")
    out = []
    for pid in sorted(m.processes):
        record = is_actual_realization(m.processes[pid], fn, m)
        if record is not None:
            out.append(
                {
                    "process": record.process,
                    "requirement_situation": record.requirement_situation,
                    "goal_situation": record.goal_situation,
                }
            )
    return out


def _query_changes(m: Model, entity: str, tol: Fraction):
    if entity in m.continuants:
        changes = checker.detect_continuant_changes(m, m.continuants[entity])
        return [
            {
                "t1": coord_str(t1),
                "t2": coord_str(t2),
                "property": prop,
                "from": _fmt_value(v1),
                "to": _fmt_value(v2),
            }
            for t1, t2, prop, v1, v2 in changes
        ]
    if entity in m.processes:
        p = m.processes[entity]
        out = []
        for prop in sorted(p.trajectories):
            points = checker.detect_process_changes(m, p, prop, tol)
            out.append({"property": prop, "points": [coord_str(t) for t in points]})
        return out
    raise GfoError(f"{entity!r} is not a continuant or process")


def _query_classify(m: Model, prop_name: str, process_id: str):
    support = classify_property_support(prop_name, process_id, m)
    return {
        "property": prop_name,
        "process": process_id,
        "support": support.value,
    }


def run_query(cfg: RunConfig, args) -> int:
    try:
        m = parse_file(cfg.inputs[0])
    except ParseError as exc:
        _emit_diagnostics(exc, JSON)
        return 2
    except OSError as exc:
        print(f"gfo: cannot read {cfg.inputs[0]}: {exc}", file=sys.stderr)
        return 2
    try:
        if args.truthmakers is not None:
            result = _query_truthmakers(m, args.truthmakers)
        elif args.realizers is not None:
            result = _query_realizers(m, args.realizers)
        elif args.realizations is not None:
            result = _query_realizations(m, args.realizations)
        elif args.changes is not None:
            result = _query_changes(m, args.changes, cfg.tolerance)
        else:
            result = _query_classify(m, args.classify[0], args.classify[1])
    except ParseError as exc:
        _emit_diagnostics(exc, JSON)
        return 2
    except (GfoError, TypeError) as exc:
        print(f"gfo: {exc}", file=sys.stderr)
        return 2
    _emit_json(result)
    return 0


# ---------------------------------------------------------------------------
# dump
# ---------------------------------------------------------------------------


def _extent_json(extent) -> dict:
    if isinstance(extent, TimeBoundary):
        return {
            "kind": "boundary",
            "chronoid": extent.owner,
            "coordinate": coord_str(extent.coordinate),
        }
    return {"kind": "chronoid", "chronoid": extent.id}


def model_to_json(m: Model) -> dict:
    """Canonical JSON view of the whole store (debugging aid)."""
    return {
        "chronoids": {
            cid: {"left": coord_str(ch.left), "right": coord_str(ch.right)}
            for cid, ch in m.chronoids.items()
        },
        "properties": {
            name: {
                "domain": pdef.domain.kind,
                "symbols": sorted(pdef.domain.symbols),
                "support": pdef.support.kind,
                "window_radius": (
                    coord_str(pdef.support.window_radius)
                    if pdef.support.window_radius is not None
                    else None
                ),
            }
            for name, pdef in m.property_defs.items()
        },
        "presentials": {
            pid: {
                "at": _extent_json(pres.at),
                "material": pres.material,
                "valuation": {
                    prop: _fmt_value(v) for prop, v in pres.valuation.items()
                },
            }
            for pid, pres in m.presentials.items()
        },
        "processes": {
            pid: {
                "extent": p.extent.id,
                "boundaries": {
                    coord_str(t): target for t, target in p.boundary_map.items()
                },
                "trajectories": {
                    prop: [[coord_str(t), _fmt_value(v)] for t, v in samples]
                    for prop, samples in p.trajectories.items()
                },
            }
            for pid, p in m.processes.items()
        },
        "continuants": {
            cid: {
                "lifetime": c.lifetime.id,
                "material": c.material,
                "exhibits": {
                    coord_str(t): target for t, target in c.exhibit_map.items()
                },
            }
            for cid, c in m.continuants.items()
        },
        "facts": {
            fid: {"relator": f.relator, "args": [_fmt_value(a) for a in f.args]}
            for fid, f in m.facts.items()
        },
        "situations": {
            sid: {
                "extent": _extent_json(s.extent),
                "founded_on": s.founded_on,
                "constituents": sorted(s.constituents),
                "participants": sorted(s.participants),
            }
            for sid, s in m.situations.items()
        },
        "functions": {
            fid: {
                "kind": fn.kind,
                "bearer": fn.bearer,
                "labels": sorted(fn.labels),
                "requires": _concept_json(fn.req),
                "achieves": _concept_json(fn.goal),
                "fitem": [[prop, _fmt_value(v)] for prop, v in fn.fitem],
            }
            for fid, fn in m.functions.items()
        },
        "exe": sorted([list(pair) for pair in m.exe_assertions]),
        "requirement_instances": {
            fn: sorted(sits) for fn, sits in m.requirement_instances.items()
        },
        "goal_instances": {
            fn: sorted(sits) for fn, sits in m.goal_instances.items()
        },
    }


def _concept_json(concept) -> dict:
    return {
        "facts": sorted(
            [
                {"relator": p.relator, "args": [_fmt_value(a) for a in p.args]}
                for p in concept.required_facts
            ],
            key=lambda d: (d["relator"], d["args"]),
        ),
        "holds": sorted(
            [
                {"entity": c.entity, "property": c.prop, "value": _fmt_value(c.value)}
                for c in concept.required_props
            ],
            key=lambda d: (d["entity"], d["property"], str(d["value"])),
        ),
    }


def run_dump(cfg: RunConfig) -> int:
    try:
        m = parse_file(cfg.inputs[0])
    except ParseError as exc:
        _emit_diagnostics(exc, JSON)
        return 2
    except OSError as exc:
        print(f"gfo: cannot read {cfg.inputs[0]}: {exc}", file=sys.stderr)
        return 2
    _emit_json(model_to_json(m))
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _tolerance(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational") from None
    if value < 0:
        raise argparse.ArgumentTypeError("tolerance must be non-negative")
    return value


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gfo",
        description="Load .gfo model files, verify the axioms, run queries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="verify all axioms over the model(s)")
    check.add_argument("inputs", nargs="+", metavar="FILE")
    check.add_argument(
        "--complete",
        action="store_true",
        help="derive the missing integration process for material continuants",
    )
    check.add_argument(
        "--integration",
        choices=[checker.IDENTITY, checker.VALUATION],
        default=checker.IDENTITY,
        help="how exhibited presentials and process boundaries must agree",
    )
    check.add_argument(
        "--tol", type=_tolerance, default=Fraction(0), metavar="R",
        help="numeric discontinuity tolerance (exact rational)",
    )
    check.add_argument("--format", choices=[HUMAN, JSON], default=HUMAN)

    query = sub.add_parser("query", help="evaluate one query against a model")
    query.add_argument("inputs", nargs=1, metavar="FILE")
    which = query.add_mutually_exclusive_group(required=True)
    which.add_argument("--truthmakers", metavar="PROP")
    which.add_argument("--realizers", metavar="FUNCTION")
    which.add_argument("--realizations", metavar="FUNCTION")
    which.add_argument("--changes", metavar="ENTITY")
    which.add_argument("--classify", nargs=2, metavar=("PROPERTY", "PROCESS"))
    query.add_argument(
        "--tol", type=_tolerance, default=Fraction(0), metavar="R",
        help="numeric discontinuity tolerance for --changes on a process",
    )

    dump = sub.add_parser("dump", help="print the canonical JSON store")
    dump.add_argument("inputs", nargs=1, metavar="FILE")
    return parser


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        inputs=list(args.inputs),
        complete=getattr(args, "complete", False),
        integration_mode=getattr(args, "integration", checker.IDENTITY),
        tolerance=getattr(args, "tol", Fraction(0)),
        output_format=getattr(args, "format", HUMAN),
    )
    if args.command == "check":
        return run_check(cfg)
    if args.command == "query":
        return run_query(cfg, args)
    return run_dump(cfg)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())

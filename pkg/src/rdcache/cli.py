"""Command-line front end.

Every command except ``generate`` prints a JSON report::

    {"kind": "report", "schema_version": 1, "command": [...],
     "inputs": {path: sha256}, "result": {...}}

Reports written by ``analyze`` and ``aggregate`` can be fed straight back in
through ``--profile`` / ``--aggregate``.

Exit status: 0 success, 1 usage error, 2 input or format error,
3 no configuration satisfies the optimization constraint.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import math
import sys
from dataclasses import replace
from typing import Sequence

from . import documents as docs
from .aggregate import aggregate_pair, solo
from .errors import RdCacheError
from .missmodel import evaluate
from .optimizer import BUDGET, SLOWDOWN, optimize, pareto_front
from .rdist import build_profile
from .simulator import simulate_hierarchy
from .trace import FORMATS, DEFAULT_LINE_SIZE, line_trace_bytes, read_trace
from .validation import validate
from .workloads import KINDS, PRESETS, WorkloadSpec, generate, preset

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


class _Run:
    """Collects input digests for the report envelope."""

    def __init__(self, argv):
        self.argv = list(argv)
        self.inputs: dict[str, str] = {}

    def doc(self, path, kind: str):
        self.inputs[str(path)] = _digest(path)
        doc = docs.load(path)
        if isinstance(doc, dict) and doc.get("kind") == "report":
            doc = doc.get("result")
        if kind and isinstance(doc, dict) and doc.get("kind") not in (None, kind):
            raise docs.DocumentError(f"{path}: expected a {kind} document, got {doc.get('kind')!r}")
        return doc

    def trace(self, path, fmt, line_size, app_id=None):
        self.inputs[str(path)] = _digest(path)
        return read_trace(path, fmt, line_size, app_id)

    def report(self, result: dict) -> dict:
        return {
            "kind": "report",
            "schema_version": docs.SCHEMA_VERSION,
            "command": self.argv,
            "inputs": self.inputs,
            "result": result,
        }


def _unique_ids(items):
    seen = set()
    out = []
    for x in items:
        name, k = x, 2
        while name in seen:
            name = f"{x}#{k}"
            k += 1
        seen.add(name)
        out.append(name)
    return out


def _profiles(run, paths):
    if not 1 <= len(paths) <= 2:
        raise UsageError("give one or two --profile arguments")
    profiles = [docs.profile_from_doc(run.doc(p, "profile")) for p in paths]
    ids = _unique_ids([p.app_id for p in profiles])
    return [replace(p, app_id=i) for p, i in zip(profiles, ids)]


def _traces(run, args, line_size):
    if not 1 <= len(args.trace) <= 2:
        raise UsageError("give one or two --trace arguments")
    traces = [run.trace(p, args.format, line_size) for p in args.trace]
    ids = _unique_ids([t.app_id for t in traces])
    return [replace(t, app_id=i) for t, i in zip(traces, ids)]


def _json_number(x):
    return None if isinstance(x, float) and math.isinf(x) else x


def cmd_analyze(args, run):
    trace = run.trace(args.trace[0], args.format, args.line_size or DEFAULT_LINE_SIZE, args.app_id)
    return run.report(docs.profile_to_doc(build_profile(trace))), EXIT_OK


def cmd_generate(args, run):
    if args.spec:
        spec = docs.workload_from_doc(run.doc(args.spec, None))
    elif args.preset:
        spec = preset(args.preset, args.length or 0, args.seed, args.app_id)
    else:
        if args.kind is None or args.footprint is None or args.length is None:
            raise UsageError("generate needs --spec, --preset, or --kind/--footprint/--length")
        params = {}
        if args.stride is not None:
            params["stride"] = args.stride
        if args.base is not None:
            params["base"] = args.base
        if args.exponent is not None:
            params["exponent"] = args.exponent
        spec = WorkloadSpec(args.kind, args.footprint, args.length, args.seed, params, args.app_id)
    trace = generate(spec, args.line_size or DEFAULT_LINE_SIZE)
    return line_trace_bytes(trace, args.format), EXIT_OK


def cmd_aggregate(args, run):
    if len(args.profile) != 2:
        raise UsageError("aggregate needs exactly two --profile arguments")
    profiles = _profiles(run, args.profile)
    return run.report(docs.aggregate_to_doc(aggregate_pair(*profiles))), EXIT_OK


def _need_config(args, run):
    if not args.config:
        raise UsageError("--config is required")
    return docs.config_from_doc(run.doc(args.config, "cache_config"))


def cmd_estimate(args, run):
    config = _need_config(args, run)
    profiles = _profiles(run, args.profile)
    if args.aggregate:
        agg = docs.aggregate_from_doc(run.doc(args.aggregate, "aggregate"))
        if len(agg.per_app) != len(profiles):
            raise docs.DocumentError("aggregate document does not match the number of profiles")
        agg = type(agg)(tuple(p.app_id for p in profiles), agg.per_app, agg.combined)
    else:
        agg = aggregate_pair(*profiles) if len(profiles) == 2 else solo(profiles[0])
    result = evaluate(profiles, agg, config, aggregated_private=args.aggregated_private)
    return run.report(docs.result_to_doc(result, config)), EXIT_OK


def cmd_simulate(args, run):
    config = _need_config(args, run)
    traces = _traces(run, args, args.line_size or config.line_size_bytes)
    result = simulate_hierarchy(traces, config, args.llc_update, args.interleave)
    return run.report(docs.result_to_doc(result, config)), EXIT_OK


def cmd_validate(args, run):
    config = _need_config(args, run)
    traces = _traces(run, args, args.line_size or config.line_size_bytes)
    v = validate(
        traces,
        config,
        llc_update=args.llc_update,
        interleave=args.interleave,
        aggregated_private=args.aggregated_private,
    )
    result = {
        "kind": "validation",
        "schema_version": docs.SCHEMA_VERSION,
        "levels": list(config.sizes),
        "errors": [
            {"app_id": a, "epsilon": list(row)} for a, row in zip(v.model.app_ids, v.errors)
        ],
        "mean_abs_error": v.mean_abs_error,
        "model": docs.result_to_doc(v.model, config),
        "simulator": docs.result_to_doc(v.sim, config),
    }
    return run.report(result), EXIT_OK


def _csv(rows) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def cmd_optimize(args, run):
    if not args.space:
        raise UsageError("--space is required")
    if (args.budget is None) == (args.slowdown_limit is None):
        raise UsageError("give exactly one of --budget or --slowdown-limit")
    space = docs.space_from_doc(run.doc(args.space, "design_space"))
    profiles = _profiles(run, args.profile)
    mode, limit = (BUDGET, args.budget) if args.budget is not None else (SLOWDOWN, args.slowdown_limit)
    res = optimize(profiles, space, mode, limit, aggregated_private=args.aggregated_private)
    front = pareto_front(res.evaluated)
    front_rows = [docs.design_point_row(p) for p in front]
    pareto_csv = _csv(front_rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(pareto_csv)
    result = {
        "kind": "optimization",
        "schema_version": docs.SCHEMA_VERSION,
        "mode": mode,
        "limit": _json_number(limit),
        "feasible": not res.infeasible,
        "winner": docs.design_point_row(res.winner) if res.winner else None,
        "winner_config": docs.config_to_doc(res.winner.config) if res.winner else None,
        "evaluated": len(res.evaluated),
        "ranked": [docs.design_point_row(p) for p in res.ranked],
        "pareto": front_rows,
        "pareto_csv": pareto_csv,
    }
    if res.infeasible:
        result["reason"] = (
            f"no configuration in the space satisfies the {mode} limit {limit}"
            if res.evaluated
            else "the design space admits no strictly increasing size assignment"
        )
    return run.report(result), EXIT_INFEASIBLE if res.infeasible else EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "generate": cmd_generate,
    "aggregate": cmd_aggregate,
    "estimate": cmd_estimate,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
    "optimize": cmd_optimize,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rdcache", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--out", help="write the report here instead of standard output")
        p.add_argument("--line-size", type=int, help="cache line size in bytes (default 64)")

    def trace_args(p, many=True):
        p.add_argument("--trace", action="append", default=[], required=True,
                       help="trace file" + (" (repeat for a second core)" if many else ""))
        p.add_argument("--format", choices=FORMATS, default="text-hex")

    def policy_args(p):
        p.add_argument("--config", help="cache_config document")
        p.add_argument("--llc-update", choices=("every-access", "on-l1-miss"), default="every-access")
        p.add_argument("--interleave", default="proportional", help="'proportional' or 'k:m'")

    def aggregated_private(p):
        p.add_argument("--aggregated-private", action="store_true",
                       help="use shifted histograms at private levels as well")

    p = sub.add_parser("analyze", help="trace -> reuse-distance profile")
    common(p)
    trace_args(p, many=False)
    p.add_argument("--app-id")

    p = sub.add_parser("generate", help="synthetic workload -> trace file")
    common(p)
    p.add_argument("--format", choices=FORMATS, default="text-hex")
    p.add_argument("--spec", help="workload document")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("--footprint", type=int)
    p.add_argument("--length", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stride", type=int)
    p.add_argument("--base", type=int)
    p.add_argument("--exponent", type=float)
    p.add_argument("--app-id")

    p = sub.add_parser("aggregate", help="two profiles -> aggregated histograms")
    common(p)
    p.add_argument("--profile", action="append", default=[], required=True)

    p = sub.add_parser("estimate", help="profiles + config -> model miss counts, f and g")
    common(p)
    p.add_argument("--profile", action="append", default=[], required=True)
    p.add_argument("--aggregate", help="aggregate document (computed in-process if omitted)")
    p.add_argument("--config", help="cache_config document")
    aggregated_private(p)

    p = sub.add_parser("simulate", help="traces + config -> simulated miss counts")
    common(p)
    trace_args(p)
    policy_args(p)

    p = sub.add_parser("validate", help="model vs simulator error per level and app")
    common(p)
    trace_args(p)
    policy_args(p)
    aggregated_private(p)

    p = sub.add_parser("optimize", help="scan a design space for the best configuration")
    common(p)
    p.add_argument("--profile", action="append", default=[], required=True)
    p.add_argument("--space", help="design_space document")
    p.add_argument("--budget", type=float, help="cost limit G: minimize slowdown")
    p.add_argument("--slowdown-limit", type=float, help="slowdown limit F: minimize cost")
    p.add_argument("--csv", help="also write the Pareto front as CSV here")
    aggregated_private(p)
    return parser


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "llc_update", None):
            args.llc_update = args.llc_update.replace("-", "_")
        payload, status = COMMANDS[args.command](args, _Run(argv))
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except (RdCacheError, OSError, UnicodeDecodeError) as exc:
        print(f"rdcache: error: {exc}", file=stderr)
        return EXIT_INPUT

    if isinstance(payload, bytes):
        if args.out:
            with open(args.out, "wb") as fh:
                fh.write(payload)
        else:
            out = getattr(stdout, "buffer", None)
            if out is not None:
                out.write(payload)
                out.flush()
            else:
                stdout.write(payload.decode("utf-8", "replace"))
        return status
    text = docs.dumps(payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return status


def main() -> None:  # pragma: no cover - console entry point
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()

"""JSON documents exchanged between CLI steps.

Every document carries ``"kind"`` and ``"schema_version"``. Field layouts:

profile
    ``app_id``, ``n``, ``footprint``, ``cold_count``,
    ``histogram`` as ``[[r, count], ...]``, ``rd_table`` as ``[[r, mean_span], ...]``
aggregate
    ``apps``: list of ``{app_id, cold_count, histogram}`` in pair order,
    ``combined``: ``{cold_count, histogram}``
cache_config
    ``line_size_bytes``, ``core_count``, ``levels``: list of
    ``{size_bytes, ways ("FULL" or int), scope, miss_penalty_cycles, unit_cost}``
design_space
    as ``cache_config`` but each level has ``min_size_bytes``/``max_size_bytes``
    instead of ``size_bytes``
workload
    ``kind``, ``footprint_lines``, ``length``, ``seed``, ``params``, optional ``app_id``
cache_result
    model estimates and simulator results share this layout:
    ``levels`` (sizes in bytes), ``apps``: list of
    ``{app_id, accesses, hits: [...], misses: [...]}``, ``policy``, and for
    model results ``objective_f``/``cost_g``
"""

from __future__ import annotations

import json
from typing import Any

from .aggregate import AggregatedHistogram
from .errors import DocumentError
from .missmodel import CacheConfig, CacheLevelSpec, EvalResult
from .optimizer import DesignPoint, DesignSpace, LevelRange
from .rdist import AppProfile, RdTable, ReuseHistogram
from .simulator import SimResult
from .workloads import WorkloadSpec

SCHEMA_VERSION = 1


def _envelope(kind: str, body: dict) -> dict:
    return {"kind": kind, "schema_version": SCHEMA_VERSION, **body}


def _open(doc: Any, kind: str) -> dict:
    if not isinstance(doc, dict):
        raise DocumentError(f"expected a {kind} document (JSON object)")
    if doc.get("kind", kind) != kind:
        raise DocumentError(f"expected a {kind} document, got {doc.get('kind')!r}")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise DocumentError(f"unsupported {kind} schema version {version!r}")
    return doc


def _field(doc: dict, name: str, kind: str):
    try:
        return doc[name]
    except KeyError:
        raise DocumentError(f"{kind} document is missing {name!r}") from None


def _pairs(rows, kind: str, value_type=int) -> dict:
    try:
        return {int(r): value_type(v) for r, v in rows}
    except (TypeError, ValueError):
        raise DocumentError(f"{kind}: expected a list of [distance, value] pairs") from None


def _hist_body(h: ReuseHistogram) -> dict:
    return {"cold_count": h.cold_count, "histogram": [[r, c] for r, c in h.finite.items()]}


def _hist_from(doc: dict, kind: str) -> ReuseHistogram:
    try:
        return ReuseHistogram(
            _pairs(_field(doc, "histogram", kind), kind), int(_field(doc, "cold_count", kind))
        )
    except ValueError as exc:
        raise DocumentError(f"{kind}: {exc}") from None


def profile_to_doc(p: AppProfile) -> dict:
    return _envelope(
        "profile",
        {
            "app_id": p.app_id,
            "n": p.n,
            "footprint": p.footprint,
            **_hist_body(p.histogram),
            "rd_table": [[r, d] for r, d in p.rd_table.entries.items()],
        },
    )


def profile_from_doc(doc: Any) -> AppProfile:
    doc = _open(doc, "profile")
    try:
        return AppProfile(
            str(_field(doc, "app_id", "profile")),
            _hist_from(doc, "profile"),
            RdTable(_pairs(_field(doc, "rd_table", "profile"), "profile", float)),
            int(_field(doc, "n", "profile")),
            int(_field(doc, "footprint", "profile")),
        )
    except ValueError as exc:
        raise DocumentError(f"inconsistent profile: {exc}") from None


def aggregate_to_doc(agg: AggregatedHistogram) -> dict:
    return _envelope(
        "aggregate",
        {
            "apps": [{"app_id": a, **_hist_body(h)} for a, h in zip(agg.app_ids, agg.per_app)],
            "combined": _hist_body(agg.combined),
        },
    )


def aggregate_from_doc(doc: Any) -> AggregatedHistogram:
    doc = _open(doc, "aggregate")
    apps = _field(doc, "apps", "aggregate")
    per_app = tuple(_hist_from(a, "aggregate") for a in apps)
    combined = _hist_from(_field(doc, "combined", "aggregate"), "aggregate")
    total = per_app[0]
    for h in per_app[1:]:
        total = total + h
    if total != combined:
        raise DocumentError("aggregate: combined histogram is not the sum of the per-app histograms")
    return AggregatedHistogram(tuple(str(a["app_id"]) for a in apps), per_app, combined)


def _ways_out(ways):
    return "FULL" if ways is None else ways


def _ways_in(value, kind):
    if value is None or (isinstance(value, str) and value.upper() == "FULL"):
        return None
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    raise DocumentError(f"{kind}: ways must be an integer or \"FULL\", got {value!r}")


def _level_common(lv: dict, kind: str) -> dict:
    return {
        "ways": _ways_in(lv.get("ways", "FULL"), kind),
        "scope": lv.get("scope", "private"),
        "miss_penalty_cycles": lv.get("miss_penalty_cycles", 0),
        "unit_cost": lv.get("unit_cost", 0),
    }


def config_to_doc(cfg: CacheConfig) -> dict:
    return _envelope(
        "cache_config",
        {
            "line_size_bytes": cfg.line_size_bytes,
            "core_count": cfg.core_count,
            "levels": [
                {
                    "size_bytes": lv.size_bytes,
                    "ways": _ways_out(lv.ways),
                    "scope": lv.scope,
                    "miss_penalty_cycles": lv.miss_penalty_cycles,
                    "unit_cost": lv.unit_cost,
                }
                for lv in cfg.levels
            ],
        },
    )


def config_from_doc(doc: Any) -> CacheConfig:
    doc = _open(doc, "cache_config")
    levels = tuple(
        CacheLevelSpec(size_bytes=_field(lv, "size_bytes", "cache_config"), **_level_common(lv, "cache_config"))
        for lv in _field(doc, "levels", "cache_config")
    )
    return CacheConfig(levels, doc.get("line_size_bytes", 64), doc.get("core_count", 1))


def space_to_doc(space: DesignSpace) -> dict:
    return _envelope(
        "design_space",
        {
            "line_size_bytes": space.line_size_bytes,
            "core_count": space.core_count,
            "levels": [
                {
                    "min_size_bytes": lv.min_size_bytes,
                    "max_size_bytes": lv.max_size_bytes,
                    "ways": _ways_out(lv.ways),
                    "scope": lv.scope,
                    "miss_penalty_cycles": lv.miss_penalty_cycles,
                    "unit_cost": lv.unit_cost,
                }
                for lv in space.levels
            ],
        },
    )


def space_from_doc(doc: Any) -> DesignSpace:
    doc = _open(doc, "design_space")
    levels = tuple(
        LevelRange(
            _field(lv, "min_size_bytes", "design_space"),
            _field(lv, "max_size_bytes", "design_space"),
            **_level_common(lv, "design_space"),
        )
        for lv in _field(doc, "levels", "design_space")
    )
    return DesignSpace(levels, doc.get("line_size_bytes", 64), doc.get("core_count", 2))


def workload_to_doc(spec: WorkloadSpec) -> dict:
    body = {
        "kind": spec.kind,
        "footprint_lines": spec.footprint_lines,
        "length": spec.length,
        "seed": spec.seed,
        "params": dict(spec.params),
    }
    if spec.app_id:
        body["app_id"] = spec.app_id
    # the generator kind lives under "kind", so the envelope kind is implied
    return {"schema_version": SCHEMA_VERSION, "document": "workload", **body}


def workload_from_doc(doc: Any) -> WorkloadSpec:
    if not isinstance(doc, dict):
        raise DocumentError("expected a workload document (JSON object)")
    if doc.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise DocumentError("unsupported workload schema version")
    return WorkloadSpec(
        _field(doc, "kind", "workload"),
        _field(doc, "footprint_lines", "workload"),
        _field(doc, "length", "workload"),
        doc.get("seed", 0),
        doc.get("params", {}),
        doc.get("app_id"),
    )


def result_to_doc(result: EvalResult | SimResult, config: CacheConfig) -> dict:
    hits = result.hits() if isinstance(result, EvalResult) else result.hits
    body = {
        "levels": list(config.sizes),
        "apps": [
            {"app_id": a, "accesses": n, "hits": list(h), "misses": list(m)}
            for a, n, h, m in zip(result.app_ids, result.accesses, hits, result.misses)
        ],
        "level_misses": result.level_totals(),
        "policy": dict(result.policy),
    }
    if isinstance(result, EvalResult):
        body["objective_f"] = result.objective_f
        body["cost_g"] = result.cost_g
    return _envelope("cache_result", body)


def design_point_row(p: DesignPoint) -> dict:
    row = {f"L{i}_bytes": s for i, s in enumerate(p.sizes, start=1)}
    row["f"] = p.f
    row["g"] = p.g
    for l, total in enumerate(p.eval.level_totals(), start=1):
        row[f"L{l}_misses"] = total
    row["feasible"] = p.feasible
    return row


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def load(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: invalid JSON: {exc}") from None

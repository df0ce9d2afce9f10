"""Reading run data and writing scenarios and reports.

The canonical runs file is a CSV with columns
``instance_id,solver_id,status,time_s[,obj]``; objective trajectories live in
a sibling ``<stem>_trajectories.csv`` with columns
``instance_id,solver_id,t_s,obj``. A best-effort reader for attribute-relation
(ARFF style) run tables is also provided.
"""

from __future__ import annotations

import csv
import json
import math
import warnings as _warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from . import __version__
from .baselines import BaselineReport
from .errors import RowError, SchemaError, UnsupportedAttribute
from .harness import EvaluationResult, RankEntry, rank
from .scenario import (
    Instance,
    InstanceKind,
    RunOutcome,
    RunStatus,
    Scenario,
    Trajectory,
    quantize_ms,
    validate_scenario,
)

__all__ = [
    "MetricSection",
    "Report",
    "build_report",
    "emit_report",
    "emit_scenario",
    "parse_aslib_runs",
    "parse_runs",
    "trajectories_path_for",
]

_STATUS_IN = {"ok": RunStatus.SOLVED, "timeout": RunStatus.TIMEOUT,
              "memout": RunStatus.ERROR, "crash": RunStatus.ERROR}
_STATUS_OUT = {RunStatus.SOLVED: "ok", RunStatus.TIMEOUT: "timeout", RunStatus.ERROR: "crash"}

_RUN_FIELDS = ("instance_id", "solver_id", "status", "time_s")
_TRAJ_FIELDS = ("instance_id", "solver_id", "t_s", "obj")


def trajectories_path_for(runs_path: str | Path) -> Path:
    p = Path(runs_path)
    return p.with_name(p.stem + "_trajectories" + p.suffix)


def _parse_time(cell: str, line_no: int) -> float:
    try:
        t = float(cell)
    except (TypeError, ValueError):
        raise RowError(line_no, f"unparseable time_s {cell!r}") from None
    if math.isnan(t) or math.isinf(t):
        raise RowError(line_no, f"time_s must be finite, got {cell!r}")
    return t


def _parse_obj(cell: str | None, line_no: int) -> float:
    if cell is None or not cell.strip():
        return math.inf
    try:
        v = float(cell)
    except ValueError:
        raise RowError(line_no, f"unparseable obj {cell!r}") from None
    if math.isnan(v) or v == -math.inf:
        raise RowError(line_no, f"obj must be a number or +inf, got {cell!r}")
    return v


def parse_runs(
    path: str | Path,
    timeout_s: float,
    trajectories_path: str | Path | None = None,
    scenario_id: str | None = None,
) -> Scenario:
    """Load a runs CSV (plus optional trajectory sibling) into a scenario.

    Instances appear in file order; an instance counts as optimization when
    any of its rows carries a non-empty obj cell. Unsolved rows have their
    recorded time replaced by the timeout. Rows with time_s beyond the
    timeout, unknown statuses, or duplicate (instance, solver) pairs are
    rejected with their line number.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, expected a runs CSV header")
        fields = [f.strip() for f in reader.fieldnames]
        has_obj = "obj" in fields
        expected = set(_RUN_FIELDS) | ({"obj"} if has_obj else set())
        missing = set(_RUN_FIELDS) - set(fields)
        extra = set(fields) - expected
        if missing or extra:
            raise SchemaError(
                f"{path}: header must be instance_id,solver_id,status,time_s[,obj];"
                f" missing {sorted(missing)}, unexpected {sorted(extra)}"
            )

        instance_order: list[str] = []
        solver_order: list[str] = []
        is_opt: dict[str, bool] = {}
        outcomes: dict[tuple[str, str], RunOutcome] = {}
        for line_no, row in enumerate(reader, start=2):
            iid = (row["instance_id"] or "").strip()
            sid = (row["solver_id"] or "").strip()
            if not iid or not sid:
                raise RowError(line_no, "instance_id and solver_id must be non-empty")
            status_raw = (row["status"] or "").strip().lower()
            if status_raw not in _STATUS_IN:
                raise RowError(
                    line_no,
                    f"unknown status {status_raw!r}; expected one of {sorted(_STATUS_IN)}",
                )
            status = _STATUS_IN[status_raw]
            t = _parse_time(row["time_s"], line_no)
            if t < 0:
                raise RowError(line_no, f"time_s must be >= 0, got {t}")
            if quantize_ms(t) > timeout_s:
                raise RowError(line_no, f"time_s {t} exceeds the timeout {timeout_s}")
            if status is RunStatus.SOLVED:
                t = quantize_ms(t)
                if t >= timeout_s:
                    raise RowError(line_no, "a solved run must finish strictly before the timeout")
            else:
                t = timeout_s
            obj = _parse_obj(row.get("obj"), line_no) if has_obj else math.inf
            obj_present = has_obj and bool((row.get("obj") or "").strip())

            if iid not in is_opt:
                instance_order.append(iid)
                is_opt[iid] = False
            if obj_present:
                is_opt[iid] = True
            if sid not in solver_order:
                solver_order.append(sid)
            if (iid, sid) in outcomes:
                raise RowError(line_no, f"duplicate row for ({iid}, {sid})")
            outcomes[(iid, sid)] = RunOutcome(t, status, obj)

    trajectories = _read_trajectories(path, trajectories_path, outcomes, is_opt)
    instances = tuple(
        Instance(i, InstanceKind.OPTIMIZATION if is_opt[i] else InstanceKind.DECISION)
        for i in instance_order
    )
    return validate_scenario(
        Scenario(
            id=scenario_id or path.stem,
            instances=instances,
            solvers=tuple(solver_order),
            timeout_s=timeout_s,
            outcomes=outcomes,
            trajectories=trajectories,
        )
    )


def _read_trajectories(
    runs_path: Path,
    trajectories_path: str | Path | None,
    outcomes: Mapping[tuple[str, str], RunOutcome],
    is_opt: Mapping[str, bool],
) -> dict[tuple[str, str], Trajectory]:
    if trajectories_path is None:
        candidate = trajectories_path_for(runs_path)
        if not candidate.exists():
            return {}
        trajectories_path = candidate
    events: dict[tuple[str, str], list[tuple[float, float]]] = {}
    with open(trajectories_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return {}
        fields = [f.strip() for f in reader.fieldnames]
        if set(fields) != set(_TRAJ_FIELDS):
            raise SchemaError(
                f"{trajectories_path}: header must be instance_id,solver_id,t_s,obj"
            )
        for line_no, row in enumerate(reader, start=2):
            key = ((row["instance_id"] or "").strip(), (row["solver_id"] or "").strip())
            if key not in outcomes:
                raise RowError(line_no, f"trajectory row for unknown pair {key!r}")
            t = _parse_time(row["t_s"], line_no)
            try:
                v = float(row["obj"])
            except (TypeError, ValueError):
                raise RowError(line_no, f"unparseable obj {row['obj']!r}") from None
            events.setdefault(key, []).append((t, v))
    out: dict[tuple[str, str], Trajectory] = {}
    for key, evs in events.items():
        run = outcomes[key]
        proved = run.time_s if (run.status is RunStatus.SOLVED and is_opt.get(key[0])) else None
        out[key] = Trajectory(tuple(evs), proved)
    return out


def emit_scenario(
    scenario: Scenario,
    runs_path: str | Path,
    trajectories_path: str | Path | None = None,
) -> list[Path]:
    """Write a scenario as runs CSV (and a trajectory CSV when present).

    Inverse of parse_runs: parsing the written files with the same timeout
    reproduces the scenario field for field.
    """
    runs_path = Path(runs_path)
    has_opt = any(i.kind is InstanceKind.OPTIMIZATION for i in scenario.instances)
    written = [runs_path]
    with open(runs_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = list(_RUN_FIELDS) + (["obj"] if has_opt else [])
        writer.writerow(header)
        for inst in scenario.instances:
            for s in scenario.solvers:
                out = scenario.outcome(inst.id, s)
                row = [inst.id, s, _STATUS_OUT[out.status], f"{out.time_s:.3f}"]
                if has_opt:
                    if inst.kind is InstanceKind.DECISION:
                        row.append("")
                    else:
                        row.append("inf" if math.isinf(out.obj) else repr(out.obj))
                writer.writerow(row)
    if scenario.trajectories:
        tpath = Path(trajectories_path) if trajectories_path else trajectories_path_for(runs_path)
        with open(tpath, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(_TRAJ_FIELDS)
            for inst in scenario.instances:
                for s in scenario.solvers:
                    traj = scenario.trajectory(inst.id, s)
                    if traj is None:
                        continue
                    for t, v in traj.events:
                        writer.writerow([inst.id, s, f"{t:.3f}", repr(v)])
        written.append(tpath)
    return written


def parse_aslib_runs(
    path: str | Path,
    timeout_s: float,
    scenario_id: str | None = None,
) -> Scenario:
    """Best-effort reader for attribute-relation run tables.

    Requires the attributes instance_id, repetition, algorithm, runtime, and
    runstatus. Only repetition 1 is kept (others are ignored with a warning).
    runstatus ok maps to solved, memout and crash to error, anything else to
    timeout; unsolved runs are scored at the timeout.
    """
    path = Path(path)
    attrs: list[str] = []
    rows: list[tuple[int, list[str]]] = []
    in_data = False
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            low = line.lower()
            if low.startswith("@relation"):
                continue
            if low.startswith("@attribute"):
                parts = line.split(None, 2)
                if len(parts) < 2:
                    raise SchemaError(f"{path}: malformed attribute on line {line_no}")
                attrs.append(parts[1].strip().strip("'\"").lower())
                continue
            if low.startswith("@data"):
                in_data = True
                continue
            if in_data:
                rows.append((line_no, next(csv.reader([line]))))

    required = ("instance_id", "repetition", "algorithm", "runtime", "runstatus")
    missing = [a for a in required if a not in attrs]
    if missing:
        raise SchemaError(f"{path}: missing attributes {missing}")
    extra = [a for a in attrs if a not in required]
    if extra:
        raise UnsupportedAttribute(f"{path}: unsupported attributes {extra}")
    col = {a: attrs.index(a) for a in required}

    instance_order: list[str] = []
    solver_order: list[str] = []
    outcomes: dict[tuple[str, str], RunOutcome] = {}
    skipped_repetitions = 0
    for line_no, cells in rows:
        if len(cells) != len(attrs):
            raise RowError(line_no, f"expected {len(attrs)} fields, got {len(cells)}")
        cells = [c.strip().strip("'\"") for c in cells]
        try:
            repetition = int(float(cells[col["repetition"]]))
        except ValueError:
            raise RowError(line_no, f"unparseable repetition {cells[col['repetition']]!r}") from None
        if repetition != 1:
            skipped_repetitions += 1
            continue
        iid = cells[col["instance_id"]]
        sid = cells[col["algorithm"]]
        runstatus = cells[col["runstatus"]].lower()
        t = _parse_time(cells[col["runtime"]], line_no)
        if runstatus == "ok":
            t = quantize_ms(t)
            if t >= timeout_s:
                status, t = RunStatus.TIMEOUT, timeout_s
            else:
                status = RunStatus.SOLVED
        elif runstatus in ("memout", "crash"):
            status, t = RunStatus.ERROR, timeout_s
        else:
            status, t = RunStatus.TIMEOUT, timeout_s
        if iid not in instance_order:
            instance_order.append(iid)
        if sid not in solver_order:
            solver_order.append(sid)
        if (iid, sid) in outcomes:
            raise RowError(line_no, f"duplicate row for ({iid}, {sid})")
        outcomes[(iid, sid)] = RunOutcome(t, status)

    if skipped_repetitions:
        _warnings.warn(
            f"{path}: ignored {skipped_repetitions} row(s) with repetition != 1",
            UserWarning,
            stacklevel=2,
        )
    return validate_scenario(
        Scenario(
            id=scenario_id or path.stem,
            instances=tuple(Instance(i) for i in instance_order),
            solvers=tuple(solver_order),
            timeout_s=timeout_s,
            outcomes=outcomes,
        )
    )


@dataclass(frozen=True)
class MetricSection:
    metric_id: str
    params: Mapping[str, object]
    direction: str
    scores: Mapping[str, float]
    ranking: tuple[RankEntry, ...]


@dataclass(frozen=True)
class BaselineCell:
    repeat: int
    fold: int
    report: BaselineReport


@dataclass(frozen=True)
class Report:
    """Machine-readable evaluation summary, ready for emission."""

    scenario_id: str
    n_instances: int
    solvers: tuple[str, ...]
    timeout_s: float
    sections: tuple[MetricSection, ...]
    baselines: tuple[BaselineCell, ...] = ()
    warnings: tuple[str, ...] = ()
    provenance: Mapping[str, object] = field(default_factory=dict)


def build_report(
    scenario: Scenario,
    evaluations: Sequence[EvaluationResult],
    source: str | None = None,
    seed: int | None = None,
    extra_warnings: Sequence[str] = (),
) -> Report:
    """Assemble a report from one or more evaluations of the same scenario."""
    sections = []
    baseline_cells = []
    collected = list(extra_warnings)
    for ev in evaluations:
        sections.append(
            MetricSection(
                metric_id=ev.metric_id,
                params=dict(ev.merged.params),
                direction=ev.merged.direction.value,
                scores=dict(ev.merged.per_solver),
                ranking=tuple(rank([ev.merged])),
            )
        )
        for cell in ev.cells:
            if cell.baseline is not None:
                baseline_cells.append(BaselineCell(cell.repeat, cell.fold, cell.baseline))
                for w in cell.baseline.warnings:
                    tag = f"[{ev.metric_id} r{cell.repeat} f{cell.fold}] " if ev.fold_plan else ""
                    collected.append(tag + w)
    first = evaluations[0] if evaluations else None
    fold_info = None
    if first is not None and first.fold_plan is not None:
        fold_info = {
            "k": first.fold_plan.k,
            "repeats": first.fold_plan.repeats,
            "seed": first.fold_plan.seed,
        }
    provenance: dict[str, object] = {
        "tool": "solvereval",
        "version": __version__,
        "timeout_s": scenario.timeout_s,
        "fold_plan": fold_info,
        "sbs_policy": first.sbs_policy.value if first is not None else None,
        "aggregation": first.aggregation.value if first is not None else None,
    }
    if source is not None:
        provenance["source"] = source
    if seed is not None:
        provenance["seed"] = seed
    return Report(
        scenario_id=scenario.id,
        n_instances=len(scenario.instances),
        solvers=scenario.solvers,
        timeout_s=scenario.timeout_s,
        sections=tuple(sections),
        baselines=tuple(baseline_cells),
        warnings=tuple(collected),
        provenance=provenance,
    )


def _param_str(params: Mapping[str, object]) -> str:
    parts = []
    for k in sorted(params):
        v = params[k]
        if isinstance(v, float):
            parts.append(f"{k}={v:g}")
        else:
            parts.append(f"{k}={v}")
    return ",".join(parts)


def _section_label(section: MetricSection) -> str:
    p = _param_str(section.params)
    return f"{section.metric_id}[{p}]" if p else section.metric_id


def _baseline_jsonable(cell: BaselineCell) -> dict:
    r = cell.report
    return {
        "repeat": cell.repeat,
        "fold": cell.fold,
        "base_metric": r.base_metric_id,
        "sbs_policy": r.sbs_policy.value,
        "sbs": r.sbs_id,
        "m_vbs": r.m_vbs,
        "m_sbs": r.m_sbs,
        "gap_ratio": r.gap_ratio,
        "vbs_per_instance": dict(r.vbs_per_instance),
        "warnings": list(r.warnings),
    }


def emit_report(report: Report, fmt: str = "table") -> bytes:
    """Render a report as json, csv (long form), or a text table."""
    if fmt == "json":
        payload = {
            "scenario": {
                "id": report.scenario_id,
                "n_instances": report.n_instances,
                "solvers": list(report.solvers),
                "timeout_s": report.timeout_s,
            },
            "metric": [s.metric_id for s in report.sections],
            "params": [dict(s.params) for s in report.sections],
            "scores": [dict(s.scores) for s in report.sections],
            "ranking": [
                [
                    {"solver": e.solver_id, "score": e.score, "position": e.position, "tied": e.tied}
                    for e in s.ranking
                ]
                for s in report.sections
            ],
            "baselines": [_baseline_jsonable(c) for c in report.baselines],
            "warnings": list(report.warnings),
            "provenance": dict(report.provenance),
        }
        return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode()

    if fmt == "csv":
        import io as _io

        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["scenario", "metric", "params", "solver", "score", "rank", "tied"])
        for s in report.sections:
            for e in s.ranking:
                writer.writerow(
                    [
                        report.scenario_id,
                        s.metric_id,
                        _param_str(s.params),
                        e.solver_id,
                        repr(e.score),
                        e.position,
                        str(e.tied).lower(),
                    ]
                )
        return buf.getvalue().encode()

    if fmt == "table":
        lines = [
            f"scenario {report.scenario_id}: {report.n_instances} instances x "
            f"{len(report.solvers)} solvers, timeout {report.timeout_s:g} s",
            "",
        ]
        headers = ["solver"] + [_section_label(s) for s in report.sections]
        peaks = []
        for s in report.sections:
            vals = [s.scores[sv] for sv in report.solvers if sv in s.scores]
            if not vals:
                peaks.append(None)
            elif s.direction == "lower_better":
                peaks.append(min(vals))
            else:
                peaks.append(max(vals))
        table_rows = []
        for sv in report.solvers:
            row = [sv]
            for s, peak in zip(report.sections, peaks):
                if sv not in s.scores:
                    row.append("-")
                    continue
                v = s.scores[sv]
                mark = "*" if peak is not None and v == peak else ""
                row.append(f"{v:.4f}{mark}")
            table_rows.append(row)
        widths = [
            max(len(headers[c]), *(len(r[c]) for r in table_rows)) if table_rows else len(headers[c])
            for c in range(len(headers))
        ]
        lines.append("  ".join(h.ljust(widths[c]) for c, h in enumerate(headers)).rstrip())
        lines.append("-" * (sum(widths) + 2 * (len(widths) - 1)))
        for r in table_rows:
            cells = [r[0].ljust(widths[0])] + [
                r[c].rjust(widths[c]) for c in range(1, len(headers))
            ]
            lines.append("  ".join(cells).rstrip())
        if report.baselines:
            lines.append("")
            lines.append("baselines:")
            for c in report.baselines:
                r = c.report
                lines.append(
                    f"  repeat {c.repeat} fold {c.fold}: base={r.base_metric_id} "
                    f"policy={r.sbs_policy.value} sbs={r.sbs_id} "
                    f"m_sbs={r.m_sbs:.4f} m_vbs={r.m_vbs:.4f} gap_ratio={r.gap_ratio:.4f}"
                )
        if report.warnings:
            lines.append("")
            lines.append("warnings:")
            for w in report.warnings:
                lines.append(f"  - {w}")
        return ("\n".join(lines) + "\n").encode()

    raise ValueError(f"unknown report format {fmt!r}; use table, json, or csv")

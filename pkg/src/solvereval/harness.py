"""Evaluation harness: cross-validation, aggregation, ranking, diagnostics."""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace as _replace
from enum import Enum
from typing import Mapping, Sequence

from .baselines import BaselineReport, FoldContext, SbsPolicy, baseline_report
from .errors import (
    BadK,
    EmptyInput,
    MixedMetrics,
    NonPositiveForGeomean,
    UnknownSolver,
    UnsupportedMetricForFolds,
)
from .metrics import (
    MetricParams,
    area_instance_values,
    base_instance_values,
    bounded_reward_score,
    closed_gap,
    metric_info,
    mznc_pair,
    mznc_score,
    par_instance,
    ratio_score,
)
from .rng import SplitMix64
from .scenario import (
    Direction,
    RunStatus,
    Scenario,
    ScoreTable,
    obj_pool,
    resolve_best_known,
    restrict,
    time_to_ms,
)

__all__ = [
    "Aggregation",
    "EvaluationResult",
    "FoldCell",
    "FoldPlan",
    "HeadToHead",
    "RankEntry",
    "aggregate",
    "delta_sweep",
    "evaluate",
    "find_flip_delta",
    "head_to_head",
    "make_fold_plan",
    "rank",
    "runtime_distribution",
    "score_scenario",
]


class Aggregation(str, Enum):
    SUM = "sum"
    ARITHMETIC_MEAN = "arithmetic_mean"
    GEOMETRIC_MEAN = "geometric_mean"
    MEDIAN = "median"


def aggregate(values: Sequence[float], method: Aggregation | str) -> float:
    """Combine a list of scores with the chosen method."""
    method = Aggregation(method)
    vals = list(values)
    if not vals:
        raise EmptyInput("nothing to aggregate")
    if method is Aggregation.SUM:
        return math.fsum(vals)
    if method is Aggregation.ARITHMETIC_MEAN:
        return math.fsum(vals) / len(vals)
    if method is Aggregation.GEOMETRIC_MEAN:
        if any(v <= 0 for v in vals):
            raise NonPositiveForGeomean("geometric mean needs strictly positive values")
        return statistics.geometric_mean(vals)
    return statistics.median(vals)


@dataclass(frozen=True)
class FoldPlan:
    """Deterministic k-fold assignments, one partition per repeat.

    Fold membership is a function of (seed, k, repeats, instance id set)
    only; the order instances were listed in does not matter.
    """

    seed: int
    k: int
    repeats: int
    assignment: tuple[tuple[tuple[str, ...], ...], ...]

    @property
    def instance_ids(self) -> tuple[str, ...]:
        return tuple(sorted(i for fold in self.assignment[0] for i in fold))


def make_fold_plan(
    instances: Sequence[str], k: int, repeats: int = 1, seed: int = 0
) -> FoldPlan:
    ids = sorted(str(i) for i in instances)
    if len(set(ids)) != len(ids):
        raise ValueError("instance ids must be unique")
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    if k < 2 or k > len(ids):
        raise BadK(f"k must satisfy 2 <= k <= number of instances, got k={k} for {len(ids)}")
    rng = SplitMix64(seed)
    n = len(ids)
    base, extra = divmod(n, k)
    repeats_out = []
    for _ in range(repeats):
        order = list(ids)
        rng.shuffle(order)
        folds = []
        start = 0
        for f in range(k):
            size = base + (1 if f < extra else 0)
            folds.append(tuple(order[start : start + size]))
            start += size
        repeats_out.append(tuple(folds))
    return FoldPlan(seed=seed, k=k, repeats=repeats, assignment=tuple(repeats_out))


DEFAULT_MERGE = Aggregation.ARITHMETIC_MEAN


def _mean(values: Mapping[str, list[float]]) -> dict[str, float]:
    return {k: math.fsum(v) / len(v) for k, v in values.items()}


def _per_solver_from_instances(
    scenario: Scenario,
    values: Mapping[tuple[str, str], float],
    how: Aggregation,
) -> dict[str, float]:
    out = {}
    for s in scenario.solvers:
        vs = [v for (sid, _), v in values.items() if sid == s]
        out[s] = aggregate(vs, how)
    return out


def score_scenario(
    scenario: Scenario,
    metric_id: str,
    params: MetricParams | None = None,
    sbs_policy: SbsPolicy | str | None = None,
    fold_context: FoldContext | None = None,
) -> tuple[ScoreTable, BaselineReport | None]:
    """Score every solver under one metric.

    When a fold context is given, scores are computed on its test split;
    baseline selection for the closed gap follows sbs_policy. Returns the
    score table and, for the closed gap, the baseline report used.
    """
    params = params or MetricParams()
    metric_info(metric_id)
    policy = SbsPolicy(sbs_policy) if sbs_policy is not None else (
        SbsPolicy.TRAIN_SPLIT if fold_context is not None else SbsPolicy.FULL_DATASET
    )
    evaluation = restrict(scenario, fold_context.test) if fold_context is not None else scenario
    tau = evaluation.timeout_s

    if metric_id == "par":
        vals = {
            (s, i): par_instance(evaluation.outcome(i, s), params.lam, tau)
            for s in evaluation.solvers
            for i in evaluation.instance_ids
        }
        table = ScoreTable(
            "par",
            {"lambda": params.lam},
            _per_solver_from_instances(evaluation, vals, Aggregation.ARITHMETIC_MEAN),
            Direction.LOWER,
            vals,
            Aggregation.ARITHMETIC_MEAN.value,
        )
        return table, None

    if metric_id == "runtime":
        vals = {
            (s, i): evaluation.time(i, s)
            for s in evaluation.solvers
            for i in evaluation.instance_ids
        }
        table = ScoreTable(
            "runtime",
            {},
            _per_solver_from_instances(evaluation, vals, Aggregation.ARITHMETIC_MEAN),
            Direction.LOWER,
            vals,
            Aggregation.ARITHMETIC_MEAN.value,
        )
        return table, None

    if metric_id == "solved-count":
        vals = {
            (s, i): 1.0 if evaluation.outcome(i, s).status is RunStatus.SOLVED else 0.0
            for s in evaluation.solvers
            for i in evaluation.instance_ids
        }
        table = ScoreTable(
            "solved-count",
            {},
            _per_solver_from_instances(evaluation, vals, Aggregation.SUM),
            Direction.HIGHER,
            vals,
            Aggregation.SUM.value,
        )
        return table, None

    if metric_id == "normalized-runtime":
        vals = {
            (s, i): 1.0 - evaluation.time(i, s) / tau
            for s in evaluation.solvers
            for i in evaluation.instance_ids
        }
        table = ScoreTable(
            "normalized-runtime",
            {},
            _per_solver_from_instances(evaluation, vals, Aggregation.ARITHMETIC_MEAN),
            Direction.HIGHER,
            vals,
            Aggregation.ARITHMETIC_MEAN.value,
        )
        return table, None

    if metric_id == "mznc":
        if len(evaluation.solvers) < 2:
            raise UnsupportedMetricForFolds(
                "pairwise scoring needs at least two solvers in the scenario"
            )
        vals = {
            (s, i): math.fsum(
                mznc_pair(evaluation, i, s, other, params.delta)
                for other in evaluation.solvers
                if other != s
            )
            for s in evaluation.solvers
            for i in evaluation.instance_ids
        }
        table = ScoreTable(
            "mznc",
            {"delta": params.delta},
            _per_solver_from_instances(evaluation, vals, Aggregation.SUM),
            Direction.HIGHER,
            vals,
            Aggregation.SUM.value,
        )
        return table, None

    if metric_id == "speedup":
        vbs_times = {
            i: min(evaluation.time(i, s) for s in evaluation.solvers)
            for i in evaluation.instance_ids
        }
        vals = {}
        for s in evaluation.solvers:
            for i in evaluation.instance_ids:
                t = evaluation.time(i, s)
                vals[(s, i)] = 1.0 if t == 0.0 else vbs_times[i] / t
        table = ScoreTable(
            "speedup",
            {},
            _per_solver_from_instances(evaluation, vals, Aggregation.ARITHMETIC_MEAN),
            Direction.HIGHER,
            vals,
            Aggregation.ARITHMETIC_MEAN.value,
        )
        return table, None

    if metric_id == "closed-gap":
        report = baseline_report(
            scenario,
            base_metric=params.base_metric,
            lam=params.lam,
            policy=policy,
            fold_context=fold_context,
        )
        base_vals = base_instance_values(evaluation, params.base_metric, params.lam)
        per_solver = {}
        for s in evaluation.solvers:
            m_s = math.fsum(v for (sid, _), v in base_vals.items() if sid == s)
            per_solver[s] = closed_gap(m_s, report.m_sbs, report.m_vbs)
        table_params = {
            "base_metric": params.base_metric,
            "sbs_policy": policy.value,
        }
        if params.base_metric == "par":
            table_params["lambda"] = params.lam
        table = ScoreTable("closed-gap", table_params, per_solver, Direction.HIGHER)
        return table, report

    if metric_id in ("ratio", "area", "bounded-reward"):
        opt_ids = evaluation.optimization_ids
        if not opt_ids:
            raise EmptyInput(f"{metric_id} needs optimization instances")
        if metric_id == "area":
            vals = area_instance_values(evaluation)
            table = ScoreTable(
                "area",
                {},
                _per_solver_from_instances(evaluation, vals, Aggregation.ARITHMETIC_MEAN),
                Direction.LOWER,
                vals,
                Aggregation.ARITHMETIC_MEAN.value,
            )
            return table, None
        vals = {}
        for iid in opt_ids:
            inst = evaluation.instance(iid)
            pool = obj_pool(evaluation, iid)
            best = resolve_best_known(evaluation, iid)
            for s in evaluation.solvers:
                out = evaluation.outcome(iid, s)
                if metric_id == "ratio":
                    if best is None:
                        vals[(s, iid)] = 0.0
                    else:
                        vals[(s, iid)] = ratio_score(_replace(inst, best_known_obj=best), out)
                else:
                    if pool is None:
                        vals[(s, iid)] = 0.0
                    else:
                        vals[(s, iid)] = bounded_reward_score(
                            inst, out, pool[0], pool[1], params.alpha, params.beta
                        )
        table_params = {} if metric_id == "ratio" else {"alpha": params.alpha, "beta": params.beta}
        table = ScoreTable(
            metric_id,
            table_params,
            _per_solver_from_instances(evaluation, vals, Aggregation.ARITHMETIC_MEAN),
            Direction.HIGHER,
            vals,
            Aggregation.ARITHMETIC_MEAN.value,
        )
        return table, None

    raise ValueError(f"unknown metric {metric_id!r}")


@dataclass(frozen=True)
class FoldCell:
    repeat: int
    fold: int
    test_instances: tuple[str, ...]
    table: ScoreTable
    baseline: BaselineReport | None


@dataclass(frozen=True)
class EvaluationResult:
    scenario_id: str
    metric_id: str
    params: Mapping[str, object]
    cells: tuple[FoldCell, ...]
    merged: ScoreTable
    fold_plan: FoldPlan | None
    sbs_policy: SbsPolicy
    aggregation: Aggregation


def evaluate(
    scenario: Scenario,
    metric_id: str,
    params: MetricParams | None = None,
    fold_plan: FoldPlan | None = None,
    sbs_policy: SbsPolicy | str | None = None,
    aggregation: Aggregation | str | None = None,
    n_jobs: int = 1,
) -> EvaluationResult:
    """Run one metric over a scenario, optionally per cross-validation cell.

    Without a fold plan this is a single evaluation over all instances. With
    one, the metric is scored on each test fold (baselines resolved per
    sbs_policy against that cell's splits) and the per-cell scores are merged
    with the chosen aggregation, arithmetic mean by default.
    """
    params = params or MetricParams()
    metric_info(metric_id)
    merge = Aggregation(aggregation) if aggregation is not None else DEFAULT_MERGE
    if metric_id == "mznc" and len(scenario.solvers) < 2:
        raise UnsupportedMetricForFolds(
            "pairwise scoring needs at least two solvers in the scenario"
        )

    if fold_plan is None:
        policy = SbsPolicy(sbs_policy) if sbs_policy is not None else SbsPolicy.FULL_DATASET
        table, report = score_scenario(scenario, metric_id, params, policy, None)
        cell = FoldCell(0, 0, scenario.instance_ids, table, report)
        return EvaluationResult(
            scenario.id, metric_id, table.params, (cell,), table, None, policy, merge
        )

    if set(fold_plan.instance_ids) != set(scenario.instance_ids):
        raise ValueError("fold plan does not cover exactly the scenario's instances")
    policy = SbsPolicy(sbs_policy) if sbs_policy is not None else SbsPolicy.TRAIN_SPLIT

    jobs = []
    for r, folds in enumerate(fold_plan.assignment):
        for f, test in enumerate(folds):
            train = tuple(i for g, fold in enumerate(folds) if g != f for i in fold)
            jobs.append((r, f, FoldContext(train=train, test=test)))

    def run(job):
        r, f, ctx = job
        table, report = score_scenario(scenario, metric_id, params, policy, ctx)
        return FoldCell(r, f, ctx.test, table, report)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            cells = tuple(pool.map(run, jobs))
    else:
        cells = tuple(run(job) for job in jobs)

    merged_scores = {
        s: aggregate([c.table.per_solver[s] for c in cells], merge)
        for s in scenario.solvers
    }
    merged = ScoreTable(
        metric_id, cells[0].table.params, merged_scores, cells[0].table.direction
    )
    return EvaluationResult(
        scenario.id, metric_id, merged.params, cells, merged, fold_plan, policy, merge
    )


@dataclass(frozen=True)
class RankEntry:
    solver_id: str
    score: float
    position: int
    tied: bool


def rank(tables: Sequence[ScoreTable], direction: Direction | None = None) -> list[RankEntry]:
    """Order solvers by score across one or more tables of the same metric."""
    if not tables:
        raise EmptyInput("nothing to rank")
    first = tables[0]
    scores: dict[str, float] = {}
    for t in tables:
        if (t.metric_id, dict(t.params), t.direction) != (
            first.metric_id,
            dict(first.params),
            first.direction,
        ):
            raise MixedMetrics("tables disagree on metric id, params, or direction")
        for s, v in t.per_solver.items():
            if s in scores:
                raise MixedMetrics(f"solver {s!r} appears in more than one table")
            scores[s] = v
    direction = direction or first.direction
    reverse = direction is Direction.HIGHER
    ordered = sorted(scores.items(), key=lambda kv: ((-kv[1] if reverse else kv[1]), kv[0]))
    counts: dict[float, int] = {}
    for _, v in ordered:
        counts[v] = counts.get(v, 0) + 1
    return [
        RankEntry(s, v, pos + 1, counts[v] > 1)
        for pos, (s, v) in enumerate(ordered)
    ]


@dataclass(frozen=True)
class HeadToHead:
    solver_a: str
    solver_b: str
    a_faster: int
    b_faster: int
    ties: int


def head_to_head(scenario: Scenario, solver_a: str, solver_b: str) -> HeadToHead:
    """Count instances each solver finished strictly faster; equal times tie."""
    for s in (solver_a, solver_b):
        if s not in scenario.solvers:
            raise UnknownSolver(f"solver {s!r} is not part of scenario {scenario.id!r}")
    a = b = ties = 0
    for i in scenario.instance_ids:
        ta = time_to_ms(scenario.time(i, solver_a))
        tb = time_to_ms(scenario.time(i, solver_b))
        if ta < tb:
            a += 1
        elif tb < ta:
            b += 1
        else:
            ties += 1
    return HeadToHead(solver_a, solver_b, a, b, ties)


def delta_sweep(
    scenario: Scenario,
    deltas: Sequence[float],
    solvers: Sequence[str] | None = None,
) -> dict[float, dict[str, float]]:
    """Pairwise scores of the chosen solvers at each time-equivalence threshold."""
    if any(d < 0 for d in deltas):
        raise ValueError("deltas must be non-negative")
    if list(deltas) != sorted(deltas):
        raise ValueError("deltas must be sorted ascending")
    chosen = tuple(solvers) if solvers is not None else scenario.solvers
    for s in chosen:
        if s not in scenario.solvers:
            raise UnknownSolver(f"solver {s!r} is not part of scenario {scenario.id!r}")
    return {
        float(d): {s: mznc_score(scenario, s, d) for s in chosen}
        for d in deltas
    }


def find_flip_delta(scenario: Scenario, solver_a: str, solver_b: str) -> float | None:
    """Smallest threshold from which solver_a outscores solver_b for every larger one.

    Pairwise scores only change at thresholds equal to some per-instance time
    difference, so scanning those breakpoints is exhaustive. Returns None if
    solver_a never stays ahead.
    """
    diffs_ms = {0}
    for i in scenario.instance_ids:
        for s in (solver_a, solver_b):
            ts = time_to_ms(scenario.time(i, s))
            for other in scenario.solvers:
                if other == s:
                    continue
                diffs_ms.add(abs(ts - time_to_ms(scenario.time(i, other))))
    candidates = [d / 1000.0 for d in sorted(diffs_ms)]
    flip: float | None = None
    for d in reversed(candidates):
        if mznc_score(scenario, solver_a, d) > mznc_score(scenario, solver_b, d):
            flip = d
        else:
            break
    return flip


def runtime_distribution(scenario: Scenario, solver: str) -> list[float]:
    """Ascending runtimes of the instances the solver actually solved."""
    if solver not in scenario.solvers:
        raise UnknownSolver(f"solver {solver!r} is not part of scenario {scenario.id!r}")
    times = [
        scenario.time(i, solver)
        for i in scenario.instance_ids
        if scenario.outcome(i, solver).status is RunStatus.SOLVED
    ]
    return sorted(times)

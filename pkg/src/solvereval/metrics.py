"""Performance metrics for solver runs.

Implements the penalized-average-runtime family (PAR), the MiniZinc-challenge
style pairwise Borda score (here "mznc") with a configurable time-equivalence
threshold delta, closed gap relative to the virtual/single best solver,
speedup over the virtual best solver, normalized runtime, and three
optimization-quality scores (ratio, area, bounded reward).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .errors import (
    BadAlphaBeta,
    BadBounds,
    BadLambda,
    DegenerateGap,
    MissingTrajectory,
    NonDecomposableMetric,
    NonPositiveObjective,
    SameSolver,
    SingleSolverScenario,
    UnknownSolver,
)
from .scenario import (
    Direction,
    Instance,
    InstanceKind,
    RunOutcome,
    RunStatus,
    Scenario,
    Trajectory,
    obj_pool,
    resolve_best_known,
    time_to_ms,
)

__all__ = [
    "MetricInfo",
    "MetricParams",
    "METRICS",
    "area_instance_values",
    "area_score",
    "base_instance_values",
    "bounded_reward_score",
    "closed_gap",
    "metric_info",
    "mznc_pair",
    "mznc_score",
    "normalized_runtime_score",
    "par_instance",
    "par_score",
    "ratio_score",
    "solved_ranking",
    "speedup_score",
]


@dataclass(frozen=True)
class MetricParams:
    """Named parameters a metric may take; unused fields are ignored."""

    lam: float = 10.0
    delta: float = 0.0
    alpha: float = 0.25
    beta: float = 0.75
    base_metric: str = "par"


@dataclass(frozen=True)
class MetricInfo:
    metric_id: str
    direction: Direction
    decomposable_base: bool
    optimization_only: bool
    relative: bool


METRICS: dict[str, MetricInfo] = {
    m.metric_id: m
    for m in (
        MetricInfo("par", Direction.LOWER, True, False, False),
        MetricInfo("runtime", Direction.LOWER, True, False, False),
        MetricInfo("solved-count", Direction.HIGHER, False, False, False),
        MetricInfo("mznc", Direction.HIGHER, False, False, True),
        MetricInfo("normalized-runtime", Direction.HIGHER, False, False, False),
        MetricInfo("speedup", Direction.HIGHER, False, False, True),
        MetricInfo("closed-gap", Direction.HIGHER, False, False, True),
        MetricInfo("ratio", Direction.HIGHER, False, True, False),
        MetricInfo("area", Direction.LOWER, True, True, False),
        MetricInfo("bounded-reward", Direction.HIGHER, False, True, False),
    )
}


def metric_info(metric_id: str) -> MetricInfo:
    try:
        return METRICS[metric_id]
    except KeyError:
        raise ValueError(f"unknown metric {metric_id!r}") from None


def _check_solver(scenario: Scenario, solver: str) -> None:
    if solver not in scenario.solvers:
        raise UnknownSolver(f"solver {solver!r} is not part of scenario {scenario.id!r}")


def par_instance(outcome: RunOutcome, lam: float, timeout_s: float) -> float:
    """Penalized runtime of one run: the time if it beat the timeout, else lam * timeout."""
    if not lam >= 1.0:
        raise BadLambda(f"penalty factor must be >= 1, got {lam}")
    if outcome.time_s < timeout_s:
        return outcome.time_s
    return lam * timeout_s


def par_score(scenario: Scenario, solver: str, lam: float) -> float:
    """Mean penalized runtime of one solver over all instances."""
    _check_solver(scenario, solver)
    total = math.fsum(
        par_instance(scenario.outcome(i, solver), lam, scenario.timeout_s)
        for i in scenario.instance_ids
    )
    return total / len(scenario.instance_ids)


@dataclass(frozen=True)
class SolvedRank:
    solver_id: str
    solved: int
    par1: float


def solved_ranking(scenario: Scenario) -> list[SolvedRank]:
    """Solvers ordered by solved count, then mean runtime, then id."""
    entries = [
        SolvedRank(
            s,
            sum(1 for i in scenario.instance_ids if scenario.outcome(i, s).status is RunStatus.SOLVED),
            par_score(scenario, s, 1.0),
        )
        for s in scenario.solvers
    ]
    entries.sort(key=lambda e: (-e.solved, e.par1, e.solver_id))
    return entries


def _is_unknown(scenario: Scenario, instance_id: str, solver: str) -> bool:
    # A solver knows nothing about a decision instance it timed out on, or an
    # optimization instance it found no solution for.
    if scenario.instance(instance_id).kind is InstanceKind.DECISION:
        return scenario.time(instance_id, solver) >= scenario.timeout_s
    return math.isinf(scenario.obj(instance_id, solver))


def _is_better(scenario: Scenario, instance_id: str, solver: str, other: str) -> bool:
    # Strictly better: finished while the opponent hit the timeout, or found a
    # strictly better objective value.
    t, t2 = scenario.time(instance_id, solver), scenario.time(instance_id, other)
    if t < t2 and t2 == scenario.timeout_s:
        return True
    return scenario.obj(instance_id, solver) < scenario.obj(instance_id, other)


def mznc_pair(
    scenario: Scenario,
    instance_id: str,
    solver: str,
    opponent: str,
    delta: float = 0.0,
) -> float:
    """Pairwise score of solver against opponent on one instance.

    Branch order: 0 when the solver knows nothing or the opponent is strictly
    better; 1 when the solver is strictly better; 0.5 when run times agree
    within delta and objectives are equal; otherwise the opponent's share of
    the summed runtimes. delta is interpreted on the millisecond grid, and
    delta = 0 demands exact time equality for the tie branch.
    """
    if solver == opponent:
        raise SameSolver("a solver cannot be scored against itself")
    _check_solver(scenario, solver)
    _check_solver(scenario, opponent)
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    scenario.instance(instance_id)

    if _is_unknown(scenario, instance_id, solver) or _is_better(scenario, instance_id, opponent, solver):
        return 0.0
    if _is_better(scenario, instance_id, solver, opponent):
        return 1.0
    t, t2 = scenario.time(instance_id, solver), scenario.time(instance_id, opponent)
    diff_ms = abs(time_to_ms(t) - time_to_ms(t2))
    if diff_ms <= round(delta * 1000.0) and scenario.obj(instance_id, solver) == scenario.obj(
        instance_id, opponent
    ):
        return 0.5
    denom = t + t2
    if denom == 0.0:
        return 0.5
    return t2 / denom


def mznc_score(scenario: Scenario, solver: str, delta: float = 0.0) -> float:
    """Total pairwise score of a solver against every opponent on every instance."""
    if len(scenario.solvers) < 2:
        raise SingleSolverScenario("pairwise scoring needs at least two solvers")
    _check_solver(scenario, solver)
    return math.fsum(
        mznc_pair(scenario, i, solver, other, delta)
        for i in scenario.instance_ids
        for other in scenario.solvers
        if other != solver
    )


def normalized_runtime_score(scenario: Scenario, solver: str) -> float:
    """One minus the mean fraction of the timeout the solver consumed."""
    _check_solver(scenario, solver)
    used = math.fsum(
        scenario.time(i, solver) / scenario.timeout_s for i in scenario.instance_ids
    )
    return 1.0 - used / len(scenario.instance_ids)


def speedup_score(
    scenario: Scenario,
    solver_times: Mapping[str, float],
    vbs_times: Mapping[str, float],
) -> float:
    """Mean per-instance ratio of the reference (virtual best) time to the solver's time.

    A 0/0 ratio counts as 1 (both finished instantly); a positive reference
    time against a zero solver time yields +inf.
    """
    ratios = []
    for i in scenario.instance_ids:
        v, t = vbs_times[i], solver_times[i]
        if t == 0.0:
            ratios.append(1.0 if v == 0.0 else math.inf)
        else:
            ratios.append(v / t)
    return math.fsum(ratios) / len(ratios)


def closed_gap(m_solver: float, m_sbs: float, m_vbs: float) -> float:
    """Fraction of the single-best-to-virtual-best gap the solver closes.

    1 means performing like the virtual best, 0 like the single best;
    negative values mean worse than the single best.
    """
    if not m_sbs > m_vbs:
        raise DegenerateGap(
            f"single best ({m_sbs}) must be strictly worse than virtual best ({m_vbs})"
        )
    return (m_sbs - m_solver) / (m_sbs - m_vbs)


def ratio_score(instance: Instance, outcome: RunOutcome) -> float:
    """Best known objective divided by the objective the solver reached.

    0 when the solver found no solution. Requires strictly positive
    objectives and a resolved best_known_obj on the instance.
    """
    if instance.kind is not InstanceKind.OPTIMIZATION:
        raise ValueError("ratio_score applies to optimization instances only")
    if instance.best_known_obj is None:
        raise ValueError("ratio_score needs a resolved best_known_obj")
    if math.isinf(outcome.obj):
        return 0.0
    if instance.best_known_obj <= 0 or outcome.obj <= 0:
        raise NonPositiveObjective(
            "ratio_score needs strictly positive objectives; shift the objective scale"
        )
    return min(1.0, instance.best_known_obj / outcome.obj)


def _norm_obj(v: float, best: float, worst: float) -> float:
    if worst == best:
        return 0.0 if v <= best else 1.0
    return min(1.0, max(0.0, (v - best) / (worst - best)))


def area_score(
    instance: Instance,
    trajectory: Trajectory,
    bounds: tuple[float, float],
    timeout_s: float,
) -> float:
    """Normalized area under the solution-quality step function; lower is better.

    Quality is 1 before the first solution, the incumbent objective scaled
    into [0, 1] by the given (best, worst) bounds afterwards, and 0 from the
    moment optimality was proven.
    """
    if instance.kind is not InstanceKind.OPTIMIZATION:
        raise ValueError("area_score applies to optimization instances only")
    best, worst = bounds
    if not (math.isfinite(best) and math.isfinite(worst) and best <= worst):
        raise BadBounds(f"bounds must be finite with best <= worst, got {bounds!r}")
    if not trajectory.events:
        return 1.0
    pieces = []
    first_t = trajectory.events[0][0]
    pieces.append(first_t * 1.0)
    end = trajectory.proved_optimal_at if trajectory.proved_optimal_at is not None else timeout_s
    for idx, (t, v) in enumerate(trajectory.events):
        nxt = trajectory.events[idx + 1][0] if idx + 1 < len(trajectory.events) else end
        pieces.append((nxt - t) * _norm_obj(v, best, worst))
    # The proven-optimal stretch contributes zero area.
    return math.fsum(pieces) / timeout_s


def bounded_reward_score(
    instance: Instance,
    outcome: RunOutcome,
    pool_best: float,
    pool_worst: float,
    alpha: float,
    beta: float,
) -> float:
    """Reward in {0} | [alpha, beta] | {1}.

    0 without a solution, 1 when solved to proven optimality, otherwise a
    linear interpolation between alpha (pool-worst objective) and beta
    (pool-best objective).
    """
    if not (0.0 <= alpha <= beta <= 1.0):
        raise BadAlphaBeta(f"need 0 <= alpha <= beta <= 1, got alpha={alpha}, beta={beta}")
    if instance.kind is not InstanceKind.OPTIMIZATION:
        raise ValueError("bounded_reward_score applies to optimization instances only")
    if not pool_best <= pool_worst:
        raise ValueError("pool_best must not exceed pool_worst")
    if math.isinf(outcome.obj):
        return 0.0
    if outcome.status is RunStatus.SOLVED:
        return 1.0
    if pool_best == pool_worst:
        return beta
    frac = (pool_worst - outcome.obj) / (pool_worst - pool_best)
    return alpha + (beta - alpha) * min(1.0, max(0.0, frac))


def area_instance_values(scenario: Scenario) -> dict[tuple[str, str], float]:
    """Area score per (solver, optimization instance).

    Instances where no solver found any solution score 0 for everyone, since
    there is no objective scale to integrate against.
    """
    values: dict[tuple[str, str], float] = {}
    for iid in scenario.optimization_ids:
        inst = scenario.instance(iid)
        best = resolve_best_known(scenario, iid)
        pool = obj_pool(scenario, iid)
        if best is None or pool is None:
            for s in scenario.solvers:
                values[(s, iid)] = 0.0
            continue
        bounds = (min(best, pool[0]), pool[1])
        for s in scenario.solvers:
            out = scenario.outcome(iid, s)
            traj = scenario.trajectory(iid, s)
            if traj is None:
                if math.isinf(out.obj):
                    traj = Trajectory()
                else:
                    raise MissingTrajectory(
                        f"area needs a trajectory for ({iid}, {s}); none was recorded"
                    )
            values[(s, iid)] = area_score(inst, traj, bounds, scenario.timeout_s)
    return values


def base_instance_values(
    scenario: Scenario, base_metric: str, lam: float = 10.0
) -> dict[tuple[str, str], float]:
    """Per-(solver, instance) values of a per-instance, lower-is-better metric.

    Only such metrics can anchor virtual/single best baselines: par, raw
    runtime, and area.
    """
    if base_metric == "par":
        return {
            (s, i): par_instance(scenario.outcome(i, s), lam, scenario.timeout_s)
            for s in scenario.solvers
            for i in scenario.instance_ids
        }
    if base_metric == "runtime":
        return {
            (s, i): scenario.time(i, s)
            for s in scenario.solvers
            for i in scenario.instance_ids
        }
    if base_metric == "area":
        return area_instance_values(scenario)
    raise NonDecomposableMetric(
        f"{base_metric!r} cannot anchor baselines; it has no per-instance, "
        "lower-is-better decomposition"
    )

"""Hand-rolled scenario builders shared by the test modules."""

from __future__ import annotations

import math

from solvereval import (
    Instance,
    InstanceKind,
    RunOutcome,
    RunStatus,
    Scenario,
    build_scenario,
)

TIMEOUT = 100.0


def solved(time_s: float, obj: float = math.inf) -> RunOutcome:
    return RunOutcome(time_s, RunStatus.SOLVED, obj)


def timed_out(timeout_s: float = TIMEOUT, obj: float = math.inf) -> RunOutcome:
    return RunOutcome(timeout_s, RunStatus.TIMEOUT, obj)


def errored(timeout_s: float = TIMEOUT) -> RunOutcome:
    return RunOutcome(timeout_s, RunStatus.ERROR)


def decision_scenario(
    times: dict[str, dict[str, float | None]],
    timeout_s: float = TIMEOUT,
    scenario_id: str = "dec",
) -> Scenario:
    """times[instance][solver] = seconds, or None for an unsolved run."""
    instance_ids = list(times)
    solver_ids = list(times[instance_ids[0]])
    outcomes = {}
    for i, row in times.items():
        for s, t in row.items():
            if t is None or t >= timeout_s:
                outcomes[(i, s)] = RunOutcome(timeout_s, RunStatus.TIMEOUT)
            else:
                outcomes[(i, s)] = RunOutcome(t, RunStatus.SOLVED)
    return build_scenario(scenario_id, instance_ids, solver_ids, timeout_s, outcomes)


def scenario_from(
    cells: dict[tuple[str, str], RunOutcome],
    timeout_s: float = TIMEOUT,
    kinds: dict[str, str] | None = None,
    best_known: dict[str, float] | None = None,
    trajectories: dict | None = None,
    scenario_id: str = "sc",
) -> Scenario:
    """Build a scenario from explicit outcomes, in cell discovery order."""
    instance_ids: list[str] = []
    solver_ids: list[str] = []
    for i, s in cells:
        if i not in instance_ids:
            instance_ids.append(i)
        if s not in solver_ids:
            solver_ids.append(s)
    kinds = kinds or {}
    best_known = best_known or {}
    instances = [
        Instance(i, InstanceKind(kinds.get(i, "decision")), best_known.get(i))
        for i in instance_ids
    ]
    return build_scenario(scenario_id, instances, solver_ids, timeout_s, cells, trajectories)

"""Virtual best and single best solver baselines.

The virtual best solver (VBS) takes the per-instance minimum of a base metric
over all solvers; the single best solver (SBS) is the one solver minimizing
the base metric total over a selection set. The selection set depends on the
policy: the training split, the test split, or the whole dataset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .errors import MissingFoldContext
from .metrics import base_instance_values
from .scenario import Scenario, restrict

__all__ = [
    "BaselineReport",
    "FoldContext",
    "SbsPolicy",
    "baseline_report",
    "select_sbs",
    "solver_totals",
    "vbs_values",
]

LOW_RESOLUTION_THRESHOLD = 0.01


class SbsPolicy(str, Enum):
    TRAIN_SPLIT = "train_split"
    TEST_SPLIT = "test_split"
    FULL_DATASET = "full_dataset"


@dataclass(frozen=True)
class FoldContext:
    """Train/test instance ids of one cross-validation cell."""

    train: tuple[str, ...]
    test: tuple[str, ...]


@dataclass(frozen=True)
class BaselineReport:
    base_metric_id: str
    sbs_id: str
    sbs_policy: SbsPolicy
    vbs_per_instance: Mapping[str, float]
    m_vbs: float
    m_sbs: float
    gap_ratio: float
    warnings: tuple[str, ...] = ()


def vbs_values(scenario: Scenario, base_metric: str, lam: float = 10.0) -> dict[str, float]:
    """Per-instance value the virtual best solver achieves."""
    values = base_instance_values(scenario, base_metric, lam)
    out: dict[str, float] = {}
    for i in scenario.instance_ids:
        candidates = [values[(s, i)] for s in scenario.solvers if (s, i) in values]
        if candidates:
            out[i] = min(candidates)
    return out


def solver_totals(scenario: Scenario, base_metric: str, lam: float = 10.0) -> dict[str, float]:
    """Base metric total per solver over the scenario's instances."""
    values = base_instance_values(scenario, base_metric, lam)
    return {
        s: math.fsum(v for (sid, _), v in values.items() if sid == s)
        for s in scenario.solvers
    }


def _selection_scenario(
    scenario: Scenario, policy: SbsPolicy, fold_context: FoldContext | None
) -> Scenario:
    if policy is SbsPolicy.FULL_DATASET:
        return scenario
    if fold_context is None:
        raise MissingFoldContext(
            f"policy {policy.value} needs a fold context with train/test splits"
        )
    split = fold_context.train if policy is SbsPolicy.TRAIN_SPLIT else fold_context.test
    return restrict(scenario, split)


def select_sbs(
    scenario: Scenario,
    base_metric: str = "par",
    lam: float = 10.0,
    policy: SbsPolicy = SbsPolicy.FULL_DATASET,
    fold_context: FoldContext | None = None,
) -> str:
    """Pick the single best solver on the policy's selection set; ties go lexicographically."""
    selection = _selection_scenario(scenario, SbsPolicy(policy), fold_context)
    totals = solver_totals(selection, base_metric, lam)
    return min(scenario.solvers, key=lambda s: (totals[s], s))


def baseline_report(
    scenario: Scenario,
    base_metric: str = "par",
    lam: float = 10.0,
    policy: SbsPolicy = SbsPolicy.FULL_DATASET,
    fold_context: FoldContext | None = None,
    low_resolution_threshold: float = LOW_RESOLUTION_THRESHOLD,
) -> BaselineReport:
    """Resolve both baselines and evaluate them on the evaluation instance set.

    The SBS is picked on the policy's selection set; both m_vbs and m_sbs are
    then measured on the evaluation set (the test split when a fold context is
    given, the whole scenario otherwise).
    """
    policy = SbsPolicy(policy)
    sbs = select_sbs(scenario, base_metric, lam, policy, fold_context)
    evaluation = restrict(scenario, fold_context.test) if fold_context is not None else scenario
    per_instance = vbs_values(evaluation, base_metric, lam)
    m_vbs = math.fsum(per_instance.values())
    eval_totals = solver_totals(evaluation, base_metric, lam)
    m_sbs = eval_totals[sbs]
    gap_ratio = 0.0 if m_sbs == 0.0 else (m_sbs - m_vbs) / m_sbs
    warnings = []
    if gap_ratio < low_resolution_threshold:
        warnings.append(
            f"low resolution: the single best solver is within "
            f"{gap_ratio:.4%} of the virtual best on the evaluation set; "
            "closed-gap values will be noisy"
        )
    return BaselineReport(
        base_metric_id=base_metric,
        sbs_id=sbs,
        sbs_policy=policy,
        vbs_per_instance=per_instance,
        m_vbs=m_vbs,
        m_sbs=m_sbs,
        gap_ratio=gap_ratio,
        warnings=tuple(warnings),
    )

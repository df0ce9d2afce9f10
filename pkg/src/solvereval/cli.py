"""Command line front end.

Exit codes: 0 on success, 1 for anything wrong with the input (bad files,
bad arguments, scenario violations), 2 for unexpected internal failures.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import traceback
from dataclasses import replace as _replace
from pathlib import Path

from . import __version__
from .errors import CliUsageError, SolverEvalError, ValidationError
from .harness import (
    Aggregation,
    delta_sweep,
    evaluate,
    find_flip_delta,
    head_to_head,
    make_fold_plan,
    rank,
    runtime_distribution,
)
from .io import build_report, emit_report, emit_scenario, parse_aslib_runs, parse_runs
from .metrics import METRICS, MetricParams
from .scenario import InstanceKind, Scenario
from .synthkit import SolverSpec, constant, generate, thorough_vs_fast_spec, uniform

__all__ = ["build_parser", "main", "run"]

_POLICY = {"train": "train_split", "test": "test_split", "full": "full_dataset"}
_AGG = {
    "sum": Aggregation.SUM,
    "mean": Aggregation.ARITHMETIC_MEAN,
    "geomean": Aggregation.GEOMETRIC_MEAN,
    "median": Aggregation.MEDIAN,
}
_DEFAULT_DELTAS = "0,0.01,0.05,0.1,0.5,1"


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exceptions, not exit(2)."""

    def error(self, message: str):
        raise CliUsageError(f"{self.prog}: {message}")


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("runs", help="runs CSV, or an attribute-relation run table")
    p.add_argument("--timeout", type=float, required=True, metavar="SECONDS",
                   help="per-run time limit the data was collected under")
    p.add_argument("--trajectories", metavar="PATH", default=None,
                   help="trajectory CSV (default: <runs>_trajectories.csv when present)")
    p.add_argument("--input-format", choices=("auto", "csv", "aslib"), default="auto",
                   help="runs file format; auto picks aslib for .arff files")
    p.add_argument("--id", default=None, help="scenario id (default: runs file stem)")


def _add_metric_param_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="lam", type=float, default=10.0,
                   help="penalty factor for unsolved runs in par scores (default 10)")
    p.add_argument("--delta", type=float, default=0.0,
                   help="time equivalence threshold in seconds for pairwise scores")
    p.add_argument("--alpha", type=float, default=0.25,
                   help="bounded reward floor for unsolved runs with a solution")
    p.add_argument("--beta", type=float, default=0.75,
                   help="bounded reward ceiling for unsolved runs with a solution")
    p.add_argument("--base-metric", choices=("par", "runtime", "area"), default="par",
                   help="per-instance metric anchoring closed-gap baselines")


def _load_scenario(args: argparse.Namespace) -> Scenario:
    fmt = args.input_format
    if fmt == "auto":
        fmt = "aslib" if Path(args.runs).suffix.lower() == ".arff" else "csv"
    if fmt == "aslib":
        return parse_aslib_runs(args.runs, args.timeout, scenario_id=args.id)
    return parse_runs(
        args.runs, args.timeout,
        trajectories_path=args.trajectories, scenario_id=args.id,
    )


def _write_bytes(data: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.write(data.decode())


def _metric_params(args: argparse.Namespace) -> MetricParams:
    return MetricParams(
        lam=args.lam, delta=args.delta, alpha=args.alpha, beta=args.beta,
        base_metric=args.base_metric,
    )


def _parse_float_list(text: str, what: str) -> list[float]:
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            out.append(float(piece))
        except ValueError:
            raise CliUsageError(f"cannot parse {what} value {piece!r}") from None
    if not out:
        raise CliUsageError(f"{what} list is empty")
    return out


def _two_solvers(text: str, flag: str) -> tuple[str, str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    if len(names) != 2:
        raise CliUsageError(f"{flag} expects exactly two solver names, e.g. {flag} a,b")
    return names[0], names[1]


def cmd_score(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args)
    metrics = args.metric or ["par"]
    plan = None
    if args.folds:
        plan = make_fold_plan(
            scenario.instance_ids, args.folds, repeats=args.repeats, seed=args.seed
        )
    params = _metric_params(args)
    policy = _POLICY[args.sbs_policy] if args.sbs_policy else None
    agg = _AGG[args.agg] if args.agg else None
    evaluations = [
        evaluate(scenario, m, params, fold_plan=plan, sbs_policy=policy,
                 aggregation=agg, n_jobs=args.jobs)
        for m in metrics
    ]
    report = build_report(
        scenario, evaluations, source=str(args.runs),
        seed=args.seed if plan is not None else None,
    )
    _write_bytes(emit_report(report, args.format), args.output)
    return 0


def cmd_rank(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args)
    policy = _POLICY[args.sbs_policy] if args.sbs_policy else None
    result = evaluate(scenario, args.metric, _metric_params(args), sbs_policy=policy)
    entries = rank([result.merged])
    if args.format == "json":
        payload = {
            "scenario": scenario.id,
            "metric": args.metric,
            "ranking": [
                {"solver": e.solver_id, "score": e.score,
                 "position": e.position, "tied": e.tied}
                for e in entries
            ],
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for e in entries:
            tie = " (tied)" if e.tied else ""
            print(f"{e.position}. {e.solver_id}  {e.score:.4f}{tie}")
    return 0


def cmd_head2head(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args)
    if args.solvers:
        pairs = [_two_solvers(args.solvers, "--solvers")]
    else:
        pairs = [
            (a, b)
            for idx, a in enumerate(scenario.solvers)
            for b in scenario.solvers[idx + 1:]
        ]
    results = [head_to_head(scenario, a, b) for a, b in pairs]
    if args.format == "json":
        payload = {
            "scenario": scenario.id,
            "pairs": [
                {"solver_a": h.solver_a, "solver_b": h.solver_b,
                 "a_faster": h.a_faster, "b_faster": h.b_faster, "ties": h.ties}
                for h in results
            ],
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for h in results:
            print(f"{h.solver_a} vs {h.solver_b}: "
                  f"{h.a_faster} faster, {h.b_faster} slower, {h.ties} ties")
    return 0


def cmd_sweep_delta(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args)
    deltas = sorted(set(_parse_float_list(args.deltas, "--deltas")))
    if deltas[0] < 0:
        raise CliUsageError("--deltas values must be non-negative")
    solvers = None
    if args.solvers:
        solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
    table = delta_sweep(scenario, deltas, solvers)
    flip = None
    if args.flip:
        a, b = _two_solvers(args.flip, "--flip")
        flip = {"solver_a": a, "solver_b": b, "delta": find_flip_delta(scenario, a, b)}
    if args.format == "json":
        payload = {
            "scenario": scenario.id,
            "sweep": [
                {"delta": d, "scores": dict(sorted(table[d].items()))} for d in deltas
            ],
            "flip": flip,
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        names = solvers if solvers is not None else list(scenario.solvers)
        width = max(len("delta"), *(len(f"{d:g}") for d in deltas))
        swidth = max(len("solver"), *(len(s) for s in names))
        print(f"{'delta'.ljust(width)}  {'solver'.ljust(swidth)}  score")
        for d in deltas:
            for s in names:
                print(f"{f'{d:g}'.ljust(width)}  {s.ljust(swidth)}  {table[d][s]:.4f}")
        if flip is not None:
            d = flip["delta"]
            shown = "none" if d is None else f"{d:g}"
            print(f"flip threshold for {flip['solver_a']} over {flip['solver_b']}: {shown}")
    return 0


def cmd_runtime_dist(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args)
    solvers = [args.solver] if args.solver else list(scenario.solvers)
    data = {s: runtime_distribution(scenario, s) for s in solvers}
    if args.format == "json":
        payload = {"scenario": scenario.id, "distributions": data}
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for s in solvers:
            times = " ".join(f"{t:.3f}" for t in data[s])
            print(f"{s}: {len(data[s])} solved{'  ' + times if times else ''}")
    return 0


def _parse_draw(text: str, what: str):
    text = text.strip()
    m = re.fullmatch(r"uniform\(([^,()]+),([^,()]+)\)", text)
    if m:
        try:
            return uniform(float(m.group(1)), float(m.group(2)))
        except ValueError:
            raise CliUsageError(f"cannot parse {what} draw {text!r}") from None
    m = re.fullmatch(r"constant\(([^,()]+)\)", text)
    if m:
        try:
            return constant(float(m.group(1)))
        except ValueError:
            raise CliUsageError(f"cannot parse {what} draw {text!r}") from None
    try:
        return constant(float(text))
    except ValueError:
        raise CliUsageError(
            f"cannot parse {what} draw {text!r}; use uniform(lo,hi), constant(x), or a number"
        ) from None


def _split_spec_params(text: str) -> list[str]:
    parts, cur, depth = [], [], 0
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur:
        parts.append("".join(cur))
    return parts


def _parse_solver_spec(text: str) -> SolverSpec:
    name, sep, rest = text.partition(":")
    name = name.strip()
    if not sep or not name:
        raise CliUsageError(
            f"solver spec {text!r} must look like NAME:p=0.9,runtime=uniform(1,10)"
        )
    p = runtime = quality = None
    for part in _split_spec_params(rest):
        key, sep2, val = part.partition("=")
        key, val = key.strip().lower(), val.strip()
        if not sep2 or not val:
            raise CliUsageError(f"solver spec field {part!r} must look like key=value")
        if key == "p":
            try:
                p = float(val)
            except ValueError:
                raise CliUsageError(f"cannot parse solve probability {val!r}") from None
        elif key == "runtime":
            runtime = _parse_draw(val, "runtime")
        elif key == "quality":
            quality = _parse_draw(val, "quality")
        else:
            raise CliUsageError(f"unknown solver spec key {key!r}; use p, runtime, quality")
    if p is None or runtime is None:
        raise CliUsageError(f"solver spec {text!r} needs both p= and runtime=")
    return SolverSpec(solve_probability=p, runtime=runtime,
                      objective_quality=quality, name=name)


def cmd_gen(args: argparse.Namespace) -> int:
    base = thorough_vs_fast_spec(
        seed=args.seed, n_instances=args.instances, timeout_s=args.timeout
    )
    spec = _replace(
        base,
        opt_fraction=args.opt_fraction,
        subopt_probability=args.subopt_p,
        error_probability=args.error_p,
        scenario_id=args.id,
    )
    if args.solver:
        spec = _replace(spec, solvers=tuple(_parse_solver_spec(s) for s in args.solver))
    scenario = generate(spec)
    written = emit_scenario(scenario, args.output)
    for p in written:
        print(p)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        scenario = _load_scenario(args)
    except ValidationError as e:
        print(f"invalid: {len(e.violations)} violation(s)", file=sys.stderr)
        for v in e.violations:
            print(f"  {v}", file=sys.stderr)
        return 1
    n_opt = sum(1 for i in scenario.instances if i.kind is InstanceKind.OPTIMIZATION)
    print(
        f"ok: scenario {scenario.id!r}, {len(scenario.instances)} instances "
        f"({n_opt} optimization), {len(scenario.solvers)} solvers, "
        f"timeout {scenario.timeout_s:g} s"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="solvereval",
        description="Score, rank, and compare solvers over benchmark run data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("score", help="score solvers under one or more metrics")
    _add_input_args(p)
    _add_metric_param_args(p)
    p.add_argument("--metric", action="append", choices=sorted(METRICS), default=None,
                   help="metric to report; repeatable (default: par)")
    p.add_argument("--sbs-policy", choices=sorted(_POLICY), default=None,
                   help="which split selects the single best solver for closed-gap")
    p.add_argument("--folds", type=int, default=None, metavar="K",
                   help="evaluate per cross-validation fold instead of once overall")
    p.add_argument("--repeats", type=int, default=1,
                   help="independent fold partitions to average over (default 1)")
    p.add_argument("--seed", type=int, default=0, help="fold shuffling seed (default 0)")
    p.add_argument("--agg", choices=sorted(_AGG), default=None,
                   help="how per-fold scores merge (default mean)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for fold cells")
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.add_argument("-o", "--output", default=None, help="write the report here instead of stdout")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("rank", help="order solvers under a single metric")
    _add_input_args(p)
    _add_metric_param_args(p)
    p.add_argument("--metric", choices=sorted(METRICS), default="par")
    p.add_argument("--sbs-policy", choices=sorted(_POLICY), default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("head2head", help="count per-instance faster/slower/tied finishes")
    _add_input_args(p)
    p.add_argument("--solvers", default=None, metavar="A,B",
                   help="compare just this pair (default: all pairs)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_head2head)

    p = sub.add_parser("sweep-delta", help="pairwise scores across tie thresholds")
    _add_input_args(p)
    p.add_argument("--deltas", default=_DEFAULT_DELTAS, metavar="D1,D2,...",
                   help=f"thresholds in seconds (default {_DEFAULT_DELTAS})")
    p.add_argument("--solvers", default=None, metavar="A,B,...",
                   help="restrict reporting to these solvers")
    p.add_argument("--flip", default=None, metavar="A,B",
                   help="also find the smallest threshold from which A outscores B")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_sweep_delta)

    p = sub.add_parser("runtime-dist", help="ascending solved runtimes per solver")
    _add_input_args(p)
    p.add_argument("--solver", default=None, help="restrict to one solver")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_runtime_dist)

    p = sub.add_parser("gen", help="generate a synthetic scenario and write it as CSV")
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--timeout", type=float, default=100.0, metavar="SECONDS")
    p.add_argument("--solver", action="append", default=None, metavar="SPEC",
                   help="solver profile NAME:p=0.95,runtime=uniform(1,10)[,quality=uniform(0,5)];"
                        " repeatable (default: the thorough/fast pair)")
    p.add_argument("--opt-fraction", type=float, default=0.0,
                   help="fraction of optimization instances (default 0)")
    p.add_argument("--subopt-p", type=float, default=0.5,
                   help="chance an unsolved optimization run still finds a solution")
    p.add_argument("--error-p", type=float, default=0.0,
                   help="chance a run crashes instead of timing out")
    p.add_argument("--id", default=None, help="scenario id (default: synth-<seed>)")
    p.add_argument("-o", "--output", required=True, help="runs CSV path to write")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("validate", help="check a runs file against the scenario invariants")
    _add_input_args(p)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliUsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except SystemExit as e:
        # argparse exits directly for --help and --version
        return int(e.code or 0)
    try:
        return args.func(args)
    except (SolverEvalError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

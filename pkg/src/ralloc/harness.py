"""Batch runner: every configured method on every instance, one result row each."""
from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .core import EvaluationLedger, Instance, SolveReport, load_instance
from .greedy import run_myopic, run_prescient
from .instance_gen import GenSpec, generate
from .one_opt import run_one_opt
from .sandwich import run_sandwich
from .subsolver import CapExceeded, brute_force_solve, table_objective

__all__ = ["METHODS", "COLUMNS", "MethodSpec", "SuiteConfig", "solve", "run_suite", "write_csv"]

COLUMNS = (
    "instance_id",
    "method",
    "objective",
    "lb",
    "ub",
    "evals",
    "iterations",
    "opt_gap",
    "wall_ms",
    "terminated_early",
)


def _myopic(instance, ledger, opts):
    return run_myopic(instance, ledger, max_iters=opts.get("max_iters"))


def _prescient(instance, ledger, opts):
    mode = "convex" if opts.get("convex_bounds") else "monotone"
    return run_prescient(instance, ledger, bound_mode=mode, max_iters=opts.get("max_iters"))


def _one_opt(instance, ledger, opts):
    return run_one_opt(
        instance, ledger, use_convex_bounds=opts.get("convex_bounds"), max_iters=opts.get("max_iters")
    )


def _sandwich(rule):
    def run(instance, ledger, opts):
        return run_sandwich(
            instance,
            ledger,
            rule=rule,
            epsilon=float(opts.get("epsilon", 0.0)),
            seed=opts.get("seed", 0),
            use_convex_bounds=opts.get("convex_bounds"),
            max_iters=opts.get("max_iters"),
        )

    return run


METHODS: dict[str, Callable[[Instance, EvaluationLedger, dict], SolveReport]] = {
    "myopic": _myopic,
    "prescient": _prescient,
    "one-opt": _one_opt,
    "sw-rnd": _sandwich("RND"),
    "sw-a": _sandwich("A"),
    "sw-r": _sandwich("R"),
}


def solve(instance: Instance, method: str, **opts) -> SolveReport:
    """Run ``method`` on ``instance`` with a fresh ledger.

    ``opts`` may hold ``epsilon``, ``seed``, ``convex_bounds`` and
    ``max_iters``; options a method does not use are ignored.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(METHODS)}")
    return METHODS[method](instance, EvaluationLedger(instance), opts)


@dataclass
class MethodSpec:
    id: str
    options: dict = field(default_factory=dict)

    @classmethod
    def parse(cls, item: str | dict) -> "MethodSpec":
        if isinstance(item, str):
            spec = cls(item)
        else:
            item = dict(item)
            spec = cls(item.pop("id"), item)
        if spec.id not in METHODS:
            raise ValueError(f"unknown method {spec.id!r}; choose from {sorted(METHODS)}")
        return spec

    @property
    def label(self) -> str:
        if not self.options:
            return self.id
        opts = ",".join(f"{k}={v}" for k, v in sorted(self.options.items()))
        return f"{self.id}({opts})"


@dataclass
class SuiteConfig:
    instances: list  # paths, GenSpecs, or Instances
    methods: list[MethodSpec]
    include_brute_force: bool = True
    workers: int = 1
    trace_dir: str | None = None

    @classmethod
    def from_dict(cls, d: dict, base: Path | None = None) -> "SuiteConfig":
        instances = []
        for item in d.get("instances", []):
            if isinstance(item, str):
                path = Path(item)
                instances.append(path if path.is_absolute() or base is None else base / path)
            else:
                instances.append(GenSpec.from_dict(item))
        return cls(
            instances=instances,
            methods=[MethodSpec.parse(m) for m in d.get("methods", [])],
            include_brute_force=bool(d.get("include_brute_force", True)),
            workers=int(d.get("workers", 1)),
            trace_dir=d.get("trace_dir"),
        )


def _materialize(item) -> Instance:
    if isinstance(item, Instance):
        return item
    if isinstance(item, GenSpec):
        return generate(item)
    return load_instance(item)


def _instance_id(item, instance: Instance, index: int) -> str:
    if instance.name:
        return instance.name
    if isinstance(item, (str, Path)):
        return Path(item).stem
    return f"instance-{index}"


def _run_row(instance, instance_id, method: MethodSpec, optimum, trace_dir) -> dict[str, Any]:
    row: dict[str, Any] = {"instance_id": instance_id, "method": method.label}
    start = time.perf_counter()
    try:
        report = solve(instance, method.id, **method.options)
    except Exception as exc:  # a failing run must not abort the suite
        row.update({c: "" for c in COLUMNS if c not in row})
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    wall_ms = (time.perf_counter() - start) * 1000.0
    # the experimenter may look at the sealed table; the method never did
    objective = report.true_objective
    if objective is None and report.allocation.feasible:
        objective = table_objective(instance, report.allocation.x)
    row.update(
        objective=objective,
        lb=report.objective_lower,
        ub=report.objective_upper,
        evals=report.evals,
        iterations=report.iterations,
        opt_gap="" if optimum is None or objective is None else objective - optimum,
        wall_ms=round(wall_ms, 3),
        terminated_early=report.terminated_early,
    )
    if trace_dir:
        safe = method.label.replace("/", "_")
        Path(trace_dir, f"{instance_id}__{safe}.json").write_text(report.to_json())
    return row


def run_suite(config: SuiteConfig) -> list[dict[str, Any]]:
    """One row per (instance, method), in configuration order.

    Rows carry the columns in :data:`COLUMNS`; a run that raises yields a row
    with an ``error`` entry instead of aborting the suite.
    """
    if config.trace_dir:
        Path(config.trace_dir).mkdir(parents=True, exist_ok=True)
    jobs = []
    for index, item in enumerate(config.instances):
        instance = _materialize(item)
        iid = _instance_id(item, instance, index)
        optimum = None
        if config.include_brute_force:
            try:
                optimum = brute_force_solve(instance).value
            except CapExceeded:
                optimum = None
        for method in config.methods:
            jobs.append((instance, iid, method, optimum, config.trace_dir))
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            return list(pool.map(lambda job: _run_row(*job), jobs))
    return [_run_row(*job) for job in jobs]


def write_csv(rows: list[dict[str, Any]], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(COLUMNS), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def load_config(path) -> SuiteConfig:
    path = Path(path)
    return SuiteConfig.from_dict(json.loads(path.read_text()), base=path.parent)

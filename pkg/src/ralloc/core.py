"""Problem instances, the counting oracle, and objective evaluation.

An :class:`Instance` holds the budgets and a sealed cost table.  Methods never
read the table directly; every value they see comes through an
:class:`EvaluationLedger`, which caches each point and counts distinct
evaluations.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "RallocError",
    "AssumptionViolation",
    "IndexOutOfRange",
    "MissingValue",
    "Instance",
    "EvaluationLedger",
    "Allocation",
    "TraceEntry",
    "SolveReport",
    "create_instance",
    "evaluate_point",
    "objective_value",
    "fold_sum",
    "instance_from_dict",
    "instance_to_dict",
    "load_instance",
    "save_instance",
]


class RallocError(Exception):
    """Base class for all package errors."""


class AssumptionViolation(RallocError, ValueError):
    """Instance data breaks one of the problem assumptions.

    ``clause`` names the broken condition: ``"total-budget"``,
    ``"individual-budget"``, ``"range"``, ``"non-monotone"``, ``"non-convex"``
    or ``"shape"``.
    """

    def __init__(self, clause: str, message: str):
        super().__init__(message)
        self.clause = clause


class IndexOutOfRange(RallocError, IndexError):
    pass


class MissingValue(RallocError, LookupError):
    """A value was requested at a point that has not been evaluated."""


def fold_sum(values: Iterable[float]) -> float:
    """Sum ``v0 + (v1 + (... + v_{n-1}))``.

    Every objective in the package is accumulated in this order, which is the
    order the dynamic program adds terms.  Using one association everywhere
    makes objective values of the same allocation bit-identical across the
    solver, the brute-force oracle and the reports.
    """
    total = 0.0
    for v in reversed(list(values)):
        total = v + total
    return total


def is_convex_row(row: Sequence[float]) -> bool:
    diffs = np.diff(np.asarray(row, dtype=float))
    return bool(np.all(np.diff(diffs) >= 0))


@dataclass(frozen=True, eq=False)
class Instance:
    """Validated problem data; build with :func:`create_instance`."""

    b: tuple[int, ...]
    B: int
    M: float
    _costs: tuple[tuple[float, ...], ...] = field(repr=False)
    convex: bool = False
    name: str = ""

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def total_points(self) -> int:
        """Number of distinct evaluable points, ``n + sum(b)``."""
        return self.n + sum(self.b)

    def _lookup(self, i: int, k: int) -> float:
        # the only read path into the sealed table
        return self._costs[i][k]


def create_instance(
    b: Sequence[int],
    B: int,
    M: float,
    costs: Sequence[Sequence[float]],
    *,
    convex: bool = False,
    strict: bool = True,
    name: str = "",
) -> Instance:
    """Validate the data and build an :class:`Instance`.

    With ``strict=False`` the two budget clauses (``sum(b) > B`` and
    ``B >= b_i``) are not enforced; the value range and monotonicity always
    are.  ``convex=True`` additionally requires every row to have
    non-decreasing first differences.
    """
    b = tuple(int(x) for x in b)
    B = int(B)
    M = float(M)
    if not b:
        raise AssumptionViolation("shape", "at least one player is required")
    if any(x < 1 for x in b):
        raise AssumptionViolation("shape", f"individual budgets must be positive, got {b}")
    if B < 1:
        raise AssumptionViolation("shape", f"total budget must be positive, got {B}")
    if len(costs) != len(b):
        raise AssumptionViolation("shape", f"expected {len(b)} cost rows, got {len(costs)}")
    rows = []
    for i, (bi, row) in enumerate(zip(b, costs)):
        row = tuple(float(v) for v in row)
        if len(row) != bi + 1:
            raise AssumptionViolation(
                "shape", f"row {i} has {len(row)} entries, expected b_i + 1 = {bi + 1}"
            )
        rows.append(row)
    if strict:
        if sum(b) <= B:
            raise AssumptionViolation(
                "total-budget", f"sum(b) = {sum(b)} must exceed B = {B}"
            )
        for i, bi in enumerate(b):
            if bi > B:
                raise AssumptionViolation(
                    "individual-budget", f"b_{i} = {bi} exceeds B = {B}"
                )
    for i, row in enumerate(rows):
        for k, v in enumerate(row):
            if not (math.isfinite(v) and 0.0 <= v <= M):
                raise AssumptionViolation(
                    "range", f"f_{i}({k}) = {v} lies outside [0, {M}]"
                )
        for k in range(len(row) - 1):
            if row[k + 1] > row[k]:
                raise AssumptionViolation(
                    "non-monotone", f"row {i} increases between k={k} and k={k + 1}"
                )
        if convex and not is_convex_row(row):
            raise AssumptionViolation("non-convex", f"row {i} is flagged convex but is not")
    return Instance(b=b, B=B, M=M, _costs=tuple(rows), convex=bool(convex), name=name)


class EvaluationLedger:
    """Record of evaluated points for one solve.

    ``v[i][k]`` is true once ``f_i(k)`` has been queried; ``values[i][k]``
    then holds the cached result (NaN elsewhere).  Repeated queries are free.
    """

    def __init__(self, instance: Instance):
        self.instance = instance
        self.v = [np.zeros(bi + 1, dtype=bool) for bi in instance.b]
        self.values = [np.full(bi + 1, np.nan) for bi in instance.b]
        self.per_player_count = [0] * instance.n
        self.eval_count = 0

    def _check(self, i: int, k: int) -> None:
        if not 0 <= i < self.instance.n:
            raise IndexOutOfRange(f"player {i} outside 0..{self.instance.n - 1}")
        if not 0 <= k <= self.instance.b[i]:
            raise IndexOutOfRange(f"point k={k} outside 0..{self.instance.b[i]} for player {i}")

    def evaluate(self, i: int, k: int) -> float:
        self._check(i, k)
        if not self.v[i][k]:
            self.values[i][k] = self.instance._lookup(i, k)
            self.v[i][k] = True
            self.per_player_count[i] += 1
            self.eval_count += 1
        return float(self.values[i][k])

    def is_evaluated(self, i: int, k: int) -> bool:
        return 0 <= k <= self.instance.b[i] and bool(self.v[i][k])

    def value(self, i: int, k: int) -> float:
        """Cached ``f_i(k)``; never triggers an evaluation."""
        self._check(i, k)
        if not self.v[i][k]:
            raise MissingValue(f"f_{i}({k}) has not been evaluated")
        return float(self.values[i][k])

    def evaluated_points(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.v[i])

    def unevaluated(self) -> list[tuple[int, int]]:
        """All unevaluated points in lexicographic order."""
        return [(i, int(k)) for i, row in enumerate(self.v) for k in np.flatnonzero(~row)]

    def all_evaluated(self) -> bool:
        return all(row.all() for row in self.v)

    def copy(self) -> "EvaluationLedger":
        other = EvaluationLedger(self.instance)
        other.v = [row.copy() for row in self.v]
        other.values = [row.copy() for row in self.values]
        other.per_player_count = list(self.per_player_count)
        other.eval_count = self.eval_count
        return other


def evaluate_point(instance: Instance, ledger: EvaluationLedger, i: int, k: int) -> float:
    """Return ``f_i(k)``, counting it only the first time it is requested."""
    if ledger.instance is not instance:
        raise ValueError("ledger belongs to a different instance")
    return ledger.evaluate(i, k)


@dataclass(frozen=True)
class Allocation:
    x: tuple[int, ...]
    feasible: bool = True

    @classmethod
    def of(cls, x: Iterable[int], instance: Instance | None = None) -> "Allocation":
        x = tuple(int(v) for v in x)
        if instance is None:
            return cls(x)
        if len(x) != instance.n or any(not 0 <= xi <= bi for xi, bi in zip(x, instance.b)):
            raise IndexOutOfRange(f"allocation {x} violates 0 <= x_i <= b_i")
        return cls(x, feasible=sum(x) == instance.B)

    def __iter__(self):
        return iter(self.x)

    def __len__(self) -> int:
        return len(self.x)

    def __getitem__(self, i: int) -> int:
        return self.x[i]


def objective_value(
    allocation: Allocation | Sequence[int],
    value_fn: Callable[[int, int], float] | EvaluationLedger,
) -> float:
    """Sum of ``value_fn(i, x_i)`` over all players.

    ``value_fn`` may be an :class:`EvaluationLedger`, in which case only cached
    values are used and :class:`MissingValue` is raised for unevaluated points.
    """
    if isinstance(value_fn, EvaluationLedger):
        value_fn = value_fn.value
    terms = []
    for i, xi in enumerate(allocation):
        try:
            v = value_fn(i, xi)
        except (KeyError, IndexError) as exc:
            raise MissingValue(f"no value for player {i} at {xi}") from exc
        if v is None:
            raise MissingValue(f"no value for player {i} at {xi}")
        terms.append(float(v))
    return fold_sum(terms)


@dataclass
class TraceEntry:
    iteration: int
    allocation: tuple[int, ...]
    lower: float
    upper: float
    evals: int
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "iteration": self.iteration,
            "allocation": list(self.allocation),
            "lower": _json_float(self.lower),
            "upper": _json_float(self.upper),
            "evals": self.evals,
        }
        d.update({k: _json_float(v) for k, v in self.extra.items()})
        return d


@dataclass
class SolveReport:
    method: str
    allocation: Allocation
    objective_lower: float
    objective_upper: float
    true_objective: float | None
    evals: int
    iterations: int
    trace: list[TraceEntry] = field(default_factory=list)
    terminated_early: bool = False
    info: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "allocation": list(self.allocation.x),
            "feasible": self.allocation.feasible,
            "objective_lower": _json_float(self.objective_lower),
            "objective_upper": _json_float(self.objective_upper),
            "true_objective": _json_float(self.true_objective),
            "evals": self.evals,
            "iterations": self.iterations,
            "terminated_early": self.terminated_early,
            "info": {k: _json_float(v) for k, v in self.info.items()},
            "trace": [t.to_dict() for t in self.trace],
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        return json.dumps(self.to_dict(), **kwargs)


def _json_float(v):
    # JSON has no infinities; keep them readable and round-trippable
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, dict):
        return {k: _json_float(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_float(x) for x in v]
    return v


def instance_to_dict(instance: Instance) -> dict:
    d = {
        "n": instance.n,
        "B": instance.B,
        "M": instance.M,
        "b": list(instance.b),
        "costs": [list(row) for row in instance._costs],
        "convex": instance.convex,
    }
    if instance.name:
        d["name"] = instance.name
    return d


def instance_from_dict(d: dict, *, strict: bool = True) -> Instance:
    try:
        b, B, M, costs = d["b"], d["B"], d["M"], d["costs"]
    except KeyError as exc:
        raise AssumptionViolation("shape", f"instance JSON lacks field {exc}") from None
    if "n" in d and int(d["n"]) != len(b):
        raise AssumptionViolation("shape", f"n = {d['n']} but b has {len(b)} entries")
    return create_instance(
        b, B, M, costs, convex=bool(d.get("convex", False)), strict=strict,
        name=str(d.get("name", "")),
    )


def load_instance(path, *, strict: bool = True) -> Instance:
    with open(path) as fh:
        return instance_from_dict(json.load(fh), strict=strict)


def save_instance(instance: Instance, path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_dict(instance), fh, indent=2)
        fh.write("\n")

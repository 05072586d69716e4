"""Sandwich method: close the gap between lower- and upper-bound objectives.

Each iteration solves the allocation problem on the lower-bound curves, measures
the gap between the upper and lower bound objectives at that solution, and
evaluates one more point chosen by a decision rule until the gap is at most
``epsilon``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .bounds import BoundModel, build_bounds, model_bound_objective
from .core import (
    Allocation,
    EvaluationLedger,
    Instance,
    RallocError,
    SolveReport,
    TraceEntry,
    objective_value,
    MissingValue,
)
from .subsolver import bound_menu, solve_menu

__all__ = [
    "AllEvaluated",
    "SandwichState",
    "initial_allocation",
    "objective_gap",
    "select_point",
    "run_sandwich",
    "RULES",
]

Rule = Literal["RND", "A", "R"]
RULES = ("RND", "A", "R")


class AllEvaluated(RallocError):
    pass


@dataclass
class SandwichState:
    instance: Instance
    ledger: EvaluationLedger
    bound_mode: str
    epsilon: float = 0.0
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))
    t: int = 0
    bound_model: BoundModel | None = None
    x_l: tuple[int, ...] = ()
    x_u: tuple[int, ...] | None = None
    z_lower: float = -math.inf  # z(x_l, l), equal to z*(l)
    z_upper: float = math.inf  # z(x_l, u)
    g: float = math.inf

    def rebuild(self) -> None:
        """Recompute bounds, the lower-bound solution and the gap."""
        self.bound_model = build_bounds(self.instance, self.ledger, self.bound_mode)
        sol = solve_menu(bound_menu(self.bound_model.lower), self.instance.B)
        self.x_l = sol.allocation.x
        self.x_u = None
        self.z_lower = sol.value
        self.z_upper = model_bound_objective(self.bound_model, self.x_l, "upper")
        self.g = objective_gap(self)

    def upper_solution(self) -> tuple[int, ...]:
        if self.x_u is None:
            sol = solve_menu(bound_menu(self.bound_model.upper), self.instance.B)
            self.x_u = sol.allocation.x
        return self.x_u


def initial_allocation(instance: Instance) -> tuple[int, ...]:
    """``B // n`` items each, remainder spread from the first player on.

    Items beyond a player's budget move on to the following players (cyclically).
    """
    n, B, b = instance.n, instance.B, instance.b
    base, extra = divmod(B, n)
    target = [base + (1 if i < extra else 0) for i in range(n)]
    x = [min(t, bi) for t, bi in zip(target, b)]
    overflow = sum(target) - sum(x)
    if overflow:
        start = next(i for i in range(n) if target[i] > b[i])
        for step in range(1, n + 1):
            j = (start + step) % n
            room = b[j] - x[j]
            take = min(room, overflow)
            x[j] += take
            overflow -= take
            if not overflow:
                break
    return tuple(x)


def objective_gap(state: SandwichState) -> float:
    """``sum_i u_i(x_l_i) - l_i(x_l_i)`` at the lower-bound solution."""
    m = state.bound_model
    return float(sum(m.upper[i][xi] - m.lower[i][xi] for i, xi in enumerate(state.x_l)))


def _widest(points, model: BoundModel) -> tuple[int, int]:
    # strict '>' over lexicographically ordered points keeps the smallest (i, k) on ties
    best, best_gap = None, -math.inf
    for i, k in points:
        gap = model.upper[i][k] - model.lower[i][k]
        if gap > best_gap:
            best, best_gap = (i, k), gap
    return best


def select_point(state: SandwichState, rule: Rule) -> tuple[int, int]:
    """Pick the next point to evaluate.

    ``RND`` draws uniformly from the unevaluated points, ``A`` takes the
    unevaluated point with the widest bound gap, and ``R`` does the same but
    only among points used by the lower- or upper-bound solution, falling back
    to ``A`` when none of those is unevaluated.
    """
    unevaluated = state.ledger.unevaluated()
    if not unevaluated:
        raise AllEvaluated("every point has already been evaluated")
    if rule == "RND":
        return unevaluated[int(state.rng.integers(len(unevaluated)))]
    if rule == "A":
        return _widest(unevaluated, state.bound_model)
    if rule == "R":
        x_u = state.upper_solution()
        used = {(i, k) for i, k in enumerate(state.x_l)} | {(i, k) for i, k in enumerate(x_u)}
        candidates = sorted(p for p in used if not state.ledger.is_evaluated(*p))
        if candidates:
            return _widest(candidates, state.bound_model)
        return _widest(unevaluated, state.bound_model)
    raise ValueError(f"unknown decision rule {rule!r}; expected one of {RULES}")


def run_sandwich(
    instance: Instance,
    ledger: EvaluationLedger | None = None,
    rule: Rule = "R",
    epsilon: float = 0.0,
    seed: int | None = 0,
    use_convex_bounds: bool | None = None,
    max_iters: int | None = None,
) -> SolveReport:
    """Evaluate points until the objective gap at the lower-bound solution is <= epsilon.

    Returns the lower-bound solution together with the interval
    ``[z(x_l, l), z(x_l, u)]``, which contains the true optimum at every
    iteration.  ``true_objective`` is only filled in when every point of the
    returned allocation has been evaluated.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if rule not in RULES:
        raise ValueError(f"unknown decision rule {rule!r}; expected one of {RULES}")
    if use_convex_bounds is None:
        use_convex_bounds = instance.convex
    mode = "convex" if use_convex_bounds else "monotone"
    ledger = ledger or EvaluationLedger(instance)
    for i, k in enumerate(initial_allocation(instance)):
        ledger.evaluate(i, k)
    state = SandwichState(
        instance, ledger, mode, epsilon=float(epsilon), rng=np.random.default_rng(seed)
    )
    state.rebuild()
    initial = {"evals": ledger.eval_count, "gap": state.g, "lower": state.z_lower, "upper": state.z_upper}
    trace: list[TraceEntry] = []
    early = False
    while state.g > state.epsilon:
        if max_iters is not None and state.t >= max_iters:
            early = True
            break
        point = select_point(state, rule)
        ledger.evaluate(*point)
        state.rebuild()
        extra = {"point": list(point), "gap": state.g}
        if rule == "R":
            x_u = state.upper_solution()
            extra["z_upper_model"] = model_bound_objective(state.bound_model, x_u, "upper")
        trace.append(
            TraceEntry(state.t, state.x_l, state.z_lower, state.z_upper, ledger.eval_count, extra)
        )
        state.t += 1
    alloc = Allocation.of(state.x_l, instance)
    try:
        true_value = objective_value(alloc, ledger)
    except MissingValue:
        true_value = None
    return SolveReport(
        method=f"sw-{rule.lower()}",
        allocation=alloc,
        objective_lower=state.z_lower,
        objective_upper=state.z_upper,
        true_objective=true_value,
        evals=ledger.eval_count,
        iterations=state.t,
        trace=trace,
        terminated_early=early,
        info={
            "bound_mode": mode,
            "epsilon": state.epsilon,
            "final_gap": state.g,
            "initial": initial,
            "heuristic_bounds": bool(state.bound_model.heuristic),
        },
    )

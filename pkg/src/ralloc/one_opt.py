"""1-Opt local search over evaluated points.

The current allocation is always optimal over the evaluated points.  Each
iteration evaluates one point adjacent to it, namely the one whose value could
unlock the largest single-item move, and stops once no such move can help.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import BoundModel, build_bounds
from .core import (
    Allocation,
    EvaluationLedger,
    Instance,
    SolveReport,
    TraceEntry,
    objective_value,
)
from .subsolver import SubSolution, evaluated_menu, solve_menu

__all__ = ["OneOptState", "init_one_opt", "best_case_gains", "refresh", "run_one_opt"]

NEG_INF = -math.inf


@dataclass
class OneOptState:
    t: int
    instance: Instance
    ledger: EvaluationLedger
    bound_mode: str
    bound_model: BoundModel | None = None
    x: tuple[int, ...] = ()
    value: float = math.inf
    theta: dict[int, float] | None = None
    eta: dict[int, float] | None = None
    S_minus: list[int] | None = None
    S_plus: list[int] | None = None
    d: float = NEG_INF
    d_pair: tuple[int, int] | None = None


def _menu_range(ledger: EvaluationLedger) -> tuple[int, int]:
    lo = sum(int(ledger.evaluated_points(i).min()) for i in range(ledger.instance.n))
    hi = sum(int(ledger.evaluated_points(i).max()) for i in range(ledger.instance.n))
    return lo, hi


def _make_feasible(instance: Instance, ledger: EvaluationLedger) -> None:
    # evaluated blocks stay contiguous, so reachable sums form the interval [lo, hi]
    B = instance.B
    while True:
        lo, hi = _menu_range(ledger)
        if lo <= B <= hi:
            return
        for i in range(instance.n):
            pts = ledger.evaluated_points(i)
            if hi < B and pts.max() < instance.b[i]:
                ledger.evaluate(i, int(pts.max()) + 1)
                break
            if lo > B and pts.min() > 0:
                ledger.evaluate(i, int(pts.min()) - 1)
                break


def refresh(state: OneOptState) -> OneOptState:
    """Re-solve over evaluated points and recompute bounds, theta, eta and d."""
    inst, ledger = state.instance, state.ledger
    sol: SubSolution = solve_menu(evaluated_menu(ledger), inst.B)
    assert sol.feasible
    x = sol.allocation.x
    model = build_bounds(inst, ledger, state.bound_mode)
    S_minus = [i for i in range(inst.n) if x[i] > 0]
    S_plus = [j for j in range(inst.n) if x[j] < inst.b[j]]
    theta = {i: float(model.lower[i][x[i] - 1]) - ledger.value(i, x[i]) for i in S_minus}
    eta = {j: ledger.value(j, x[j]) - float(model.lower[j][x[j] + 1]) for j in S_plus}
    d, pair = NEG_INF, None
    for i in S_minus:
        for j in S_plus:
            if i != j and eta[j] - theta[i] > d:
                d, pair = eta[j] - theta[i], (i, j)
    state.bound_model = model
    state.x, state.value = x, sol.value
    state.S_minus, state.S_plus = S_minus, S_plus
    state.theta, state.eta = theta, eta
    state.d, state.d_pair = d, pair
    return state


def init_one_opt(
    instance: Instance,
    ledger: EvaluationLedger | None = None,
    bound_mode: str | None = None,
) -> OneOptState:
    """Evaluate two adjacent points per player around ``B // n`` and solve.

    The pair is ``(q_i, q_i + 1)`` with ``q_i = min(B // n, b_i - 1)``.  If the
    evaluated points cannot add up to ``B``, blocks are extended one point at a
    time (lowest player first) until they can.
    """
    ledger = ledger or EvaluationLedger(instance)
    if bound_mode is None:
        bound_mode = "convex" if instance.convex else "monotone"
    base = instance.B // instance.n
    for i, bi in enumerate(instance.b):
        q = min(base, bi - 1)
        ledger.evaluate(i, q)
        ledger.evaluate(i, q + 1)
    _make_feasible(instance, ledger)
    state = OneOptState(t=0, instance=instance, ledger=ledger, bound_mode=bound_mode)
    return refresh(state)


def best_case_gains(state: OneOptState) -> tuple[list[float], list[float]]:
    """Best-case improvement from evaluating ``x_i + 1`` (plus) or ``x_i - 1`` (minus).

    Entries are ``-inf`` where the neighbouring point is already known, the
    player is not eligible, or no counterpart with a known value exists.
    """
    n = state.instance.n
    x, ledger = state.x, state.ledger
    plus = [NEG_INF] * n
    minus = [NEG_INF] * n
    for i in range(n):
        if i in state.eta and not ledger.is_evaluated(i, x[i] + 1):
            known = [state.theta[j] for j in state.S_minus if j != i and ledger.is_evaluated(j, x[j] - 1)]
            if known:
                plus[i] = state.eta[i] - min(known)
        if i in state.theta and not ledger.is_evaluated(i, x[i] - 1):
            known = [state.eta[j] for j in state.S_plus if j != i and ledger.is_evaluated(j, x[j] + 1)]
            if known:
                minus[i] = max(known) - state.theta[i]
    return plus, minus


def _fallback_point(state: OneOptState) -> tuple[int, int] | None:
    # every best-case gain is -inf although d > 0: probe the pair attaining d
    x, ledger = state.x, state.ledger
    pairs = sorted(
        ((state.eta[j] - state.theta[i], i, j) for i in state.S_minus for j in state.S_plus if i != j),
        key=lambda p: (-p[0], p[1], p[2]),
    )
    for gap, i, j in pairs:
        if gap <= 0:
            break
        if not ledger.is_evaluated(j, x[j] + 1):
            return j, x[j] + 1
        if not ledger.is_evaluated(i, x[i] - 1):
            return i, x[i] - 1
    return None


def run_one_opt(
    instance: Instance,
    ledger: EvaluationLedger | None = None,
    use_convex_bounds: bool | None = None,
    max_iters: int | None = None,
) -> SolveReport:
    """Run 1-Opt until no single-item move can improve the allocation.

    ``use_convex_bounds`` defaults to the instance's convexity flag.  The
    current allocation is feasible with a known objective after every
    iteration, so stopping early via ``max_iters`` is always safe.
    """
    if use_convex_bounds is None:
        use_convex_bounds = instance.convex
    mode = "convex" if use_convex_bounds else "monotone"
    state = init_one_opt(instance, ledger, mode)
    ledger = state.ledger
    trace: list[TraceEntry] = []
    early = False
    initial = {"evals": ledger.eval_count, "allocation": list(state.x), "value": state.value, "d": state.d}
    while state.d > 0:
        if max_iters is not None and state.t >= max_iters:
            early = True
            break
        plus, minus = best_case_gains(state)
        scores = [max(p, m) for p, m in zip(plus, minus)]
        i_t = int(np.argmax(scores))  # first maximiser, i.e. lowest index
        if scores[i_t] == NEG_INF:
            point = _fallback_point(state)
            if point is None:
                break
            rule = "fallback"
        else:
            lam = 1 if minus[i_t] < plus[i_t] else -1
            point = (i_t, state.x[i_t] + lam)
            rule = "best-case"
        ledger.evaluate(*point)
        refresh(state)
        trace.append(
            TraceEntry(
                state.t,
                state.x,
                state.value,
                state.value,
                ledger.eval_count,
                {"point": list(point), "d": state.d, "rule": rule},
            )
        )
        state.t += 1
    alloc = Allocation.of(state.x, instance)
    value = objective_value(alloc, ledger)
    return SolveReport(
        method="one-opt",
        allocation=alloc,
        objective_lower=value,
        objective_upper=value,
        true_objective=value,
        evals=ledger.eval_count,
        iterations=state.t,
        trace=trace,
        terminated_early=early,
        info={"bound_mode": mode, "final_d": state.d, "initial": initial,
              "heuristic_bounds": bool(state.bound_model.heuristic)},
    )

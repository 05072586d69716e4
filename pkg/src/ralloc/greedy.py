"""Constructive greedy benchmarks: the myopic and prescient methods.

Both allocate one item per iteration.  When ``2B <= sum(b)`` they start from
the empty allocation and add items; otherwise they start from ``x = b`` and
remove ``sum(b) - B`` items, which takes fewer iterations.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .bounds import BoundModel, build_bounds
from .core import (
    Allocation,
    EvaluationLedger,
    Instance,
    SolveReport,
    TraceEntry,
    objective_value,
)

__all__ = [
    "GreedyState",
    "immediate_gain",
    "prescient_score",
    "removal_score",
    "run_myopic",
    "run_prescient",
    "uses_removal",
]


@dataclass
class GreedyState:
    t: int
    x: list[int]
    J: list[int]
    S: list[int] = field(default_factory=list)


def uses_removal(instance: Instance) -> bool:
    return 2 * instance.B > sum(instance.b)


def immediate_gain(ledger: EvaluationLedger, i: int, k: int) -> float:
    """``G_i(k) = f_i(k) - f_i(k + 1)``; both points must be evaluated."""
    return ledger.value(i, k) - ledger.value(i, k + 1)


def prescient_score(
    instance: Instance,
    ledger: EvaluationLedger,
    bound_model: BoundModel,
    i: int,
    k: int,
    t: int,
) -> float:
    """Larger of the immediate gain and a conservative average gain.

    The average runs from ``k`` to the horizon ``beta = min(b_i, k + B - t)``,
    using the upper bound at ``beta`` so it never overstates the true average.
    """
    gain = immediate_gain(ledger, i, k)
    beta = min(instance.b[i], k + instance.B - t)
    if beta == k:
        return gain
    average = (ledger.value(i, k) - float(bound_model.upper[i][beta])) / (beta - k)
    return max(gain, average)


def removal_score(
    instance: Instance,
    ledger: EvaluationLedger,
    bound_model: BoundModel,
    i: int,
    k: int,
    excess: int,
) -> float:
    """Smaller of the immediate loss and a conservative average loss.

    ``excess`` is the number of items still to be removed; the horizon floor
    is ``gamma = max(0, k - excess)``.  The upper bound at ``gamma`` is used so
    the average never understates the true loss.
    """
    loss = ledger.value(i, k - 1) - ledger.value(i, k)
    gamma = max(0, k - excess)
    if gamma == k:
        return loss
    average = (float(bound_model.upper[i][gamma]) - ledger.value(i, k)) / (k - gamma)
    return min(loss, average)


def _partial_value(ledger: EvaluationLedger, x) -> float:
    return objective_value(x, ledger)


def _argbest(scores: dict[int, float], maximize: bool) -> int:
    # dict iteration follows player index, so strict comparison keeps the lowest index
    best_i, best = None, None
    for i, s in scores.items():
        if best is None or (s > best if maximize else s < best):
            best_i, best = i, s
    return best_i


def _report(method, instance, ledger, x, trace, t, terminated_early, info) -> SolveReport:
    alloc = Allocation.of(x, instance)
    value = _partial_value(ledger, alloc)
    return SolveReport(
        method=method,
        allocation=alloc,
        objective_lower=value,
        objective_upper=value,
        true_objective=value,
        evals=ledger.eval_count,
        iterations=t,
        trace=trace,
        terminated_early=terminated_early,
        info=info,
    )


def _run_additive(instance, ledger, scorer, init_points, method, max_iters):
    n, B, b = instance.n, instance.B, instance.b
    state = GreedyState(t=0, x=[0] * n, J=list(range(n)), S=list(range(n)))
    for i in range(n):
        for k in init_points(i):
            ledger.evaluate(i, k)
    trace = []
    early = False
    while state.t < B:
        if max_iters is not None and state.t >= max_iters:
            early = True
            break
        t, x = state.t, state.x
        scores = {i: scorer(i, x[i], t) for i in state.J}
        j = _argbest(scores, maximize=True)
        x[j] += 1
        if x[j] < b[j] and t < B - 1:
            ledger.evaluate(j, x[j] + 1)
        elif method == "myopic" or x[j] == b[j]:
            state.J.remove(j)
        state.t += 1
        value = _partial_value(ledger, x)
        trace.append(TraceEntry(t, tuple(x), value, value, ledger.eval_count, {"player": j, "score": scores[j]}))
    return state, trace, early


def _run_removal(instance, ledger, scorer, init_points, max_iters):
    n, B, b = instance.n, instance.B, instance.b
    R = sum(b) - B
    state = GreedyState(t=0, x=list(b), J=list(range(n)), S=list(range(n)))
    for i in range(n):
        for k in init_points(i):
            ledger.evaluate(i, k)
    trace = []
    early = False
    while state.t < R:
        if max_iters is not None and state.t >= max_iters:
            early = True
            break
        t, x = state.t, state.x
        scores = {i: scorer(i, x[i], R - t) for i in state.J}
        j = _argbest(scores, maximize=False)
        x[j] -= 1
        if x[j] > 0 and t < R - 1:
            ledger.evaluate(j, x[j] - 1)
        elif x[j] == 0:
            state.J.remove(j)
        state.t += 1
        value = _partial_value(ledger, x)
        trace.append(TraceEntry(t, tuple(x), value, value, ledger.eval_count, {"player": j, "score": scores[j]}))
    return state, trace, early


def run_myopic(
    instance: Instance,
    ledger: EvaluationLedger | None = None,
    max_iters: int | None = None,
) -> SolveReport:
    """Greedy allocation by immediate gain (or smallest loss when removing).

    Ties go to the lowest player index.
    """
    ledger = ledger or EvaluationLedger(instance)
    if uses_removal(instance):
        def scorer(i, k, excess):
            return ledger.value(i, k - 1) - ledger.value(i, k)

        state, trace, early = _run_removal(
            instance, ledger, scorer, lambda i: (instance.b[i], instance.b[i] - 1), max_iters
        )
        variant = "removal"
    else:
        def scorer(i, k, t):
            return immediate_gain(ledger, i, k)

        state, trace, early = _run_additive(
            instance, ledger, scorer, lambda i: (0, 1), "myopic", max_iters
        )
        variant = "additive"
    return _report("myopic", instance, ledger, state.x, trace, state.t, early, {"variant": variant})


def run_prescient(
    instance: Instance,
    ledger: EvaluationLedger | None = None,
    bound_mode: str = "monotone",
    max_iters: int | None = None,
) -> SolveReport:
    """Greedy allocation that also looks at the average gain up to the horizon.

    ``bound_mode`` selects the bound model used for the far end of the
    horizon; ``"monotone"`` is the safe default for non-convex instances.
    """
    ledger = ledger or EvaluationLedger(instance)
    b = instance.b
    cache = {}

    def bounds_now():
        # rebuilt only when a new point has been evaluated
        if cache.get("count") != ledger.eval_count:
            cache["count"] = ledger.eval_count
            cache["model"] = build_bounds(instance, ledger, bound_mode)
        return cache["model"]

    if uses_removal(instance):
        def scorer(i, k, excess):
            return removal_score(instance, ledger, bounds_now(), i, k, excess)

        state, trace, early = _run_removal(
            instance, ledger, scorer, lambda i: (b[i], b[i] - 1, 0), max_iters
        )
        variant = "removal"
    else:
        def scorer(i, k, t):
            return prescient_score(instance, ledger, bounds_now(), i, k, t)

        state, trace, early = _run_additive(
            instance, ledger, scorer, lambda i: (0, 1, b[i]), "prescient", max_iters
        )
        variant = "additive"
    info = {"variant": variant, "bound_mode": bound_mode}
    return _report("prescient", instance, ledger, state.x, trace, state.t, early, info)

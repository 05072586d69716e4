"""Lower and upper bound curves on each cost function, given the evaluated points.

Two modes are available.  ``monotone`` uses only that every cost curve is
non-increasing; ``convex`` additionally uses chords through evaluated points.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .core import Allocation, EvaluationLedger, Instance, RallocError, fold_sum

__all__ = [
    "NotConvexFlagged",
    "BoundModel",
    "monotone_bounds",
    "convex_bounds",
    "build_bounds",
    "model_bound_objective",
]

Mode = Literal["monotone", "convex"]

# chord bounds are widened by a few ulps so rounding can never make them invalid
_ULPS = 16 * np.finfo(float).eps


class NotConvexFlagged(RallocError, ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BoundModel:
    """Per-player bound curves ``lower[i][k] <= f_i(k) <= upper[i][k]``.

    ``heuristic`` is set when convex bounds were forced onto an instance that
    is not known to be convex; such bounds may be invalid.
    """

    mode: str
    lower: tuple[np.ndarray, ...]
    upper: tuple[np.ndarray, ...]
    heuristic: bool = False

    def gap(self, i: int, k: int) -> float:
        return float(self.upper[i][k] - self.lower[i][k])


def _monotone_row(v: np.ndarray, vals: np.ndarray, M: float) -> tuple[np.ndarray, np.ndarray]:
    # lower: value at the nearest evaluated point to the right (inclusive), else 0
    # upper: value at the nearest evaluated point to the left (inclusive), else M
    lower = np.where(v, vals, 0.0)
    upper = np.where(v, vals, M)
    lower = np.maximum.accumulate(lower[::-1])[::-1]
    upper = np.minimum.accumulate(upper)
    return np.maximum(lower, 0.0), np.minimum(upper, M)


def monotone_bounds(instance: Instance, ledger: EvaluationLedger) -> BoundModel:
    """Bounds from monotonicity alone.

    ``l_i(k)`` is the value at the smallest evaluated ``p >= k`` (or 0) and
    ``u_i(k)`` the value at the largest evaluated ``q <= k`` (or M).
    """
    lowers, uppers = [], []
    for i in range(instance.n):
        lo, up = _monotone_row(ledger.v[i], ledger.values[i], instance.M)
        lowers.append(lo)
        uppers.append(up)
    return BoundModel("monotone", tuple(lowers), tuple(uppers))


def _convex_row(v: np.ndarray, vals: np.ndarray, M: float) -> tuple[np.ndarray, np.ndarray]:
    bi = len(v) - 1
    k = np.arange(bi + 1, dtype=float)
    E = np.flatnonzero(v)
    fE = vals[E]
    slack = _ULPS * M * (bi + 1)

    lower, upper = _monotone_row(v, vals, M)
    if len(E) == 0:
        return lower, upper

    # chord from (0, M) to each evaluated (q, f(q)), valid left of q
    q = E[E > 0].astype(float)
    if len(q):
        fq = vals[E[E > 0]]
        chord = M * (q[:, None] - k) / q[:, None] + fq[:, None] * k / q[:, None]
        chord = np.where(k < q[:, None], chord + slack, np.inf)
        upper = np.minimum(upper, chord.min(axis=0))

    if len(E) >= 2:
        ip, iq = np.triu_indices(len(E), k=1)
        p, qq = E[ip].astype(float), E[iq].astype(float)
        fp, fq = fE[ip], fE[iq]
        slope = (fq - fp) / (qq - p)
        P, Q, FP, FQ, S = (a[:, None] for a in (p, qq, fp, fq, slope))
        inside = (P < k) & (k < Q)
        interp = FP * (Q - k) / (Q - P) + FQ * (k - P) / (Q - P)
        upper = np.minimum(upper, np.where(inside, interp + slack, np.inf).min(axis=0))
        right = FQ + (k - Q) * S
        left = FP - (P - k) * S
        ext = np.where(k > Q, right, np.where(k < P, left, -np.inf))
        lower = np.maximum(lower, (ext - slack).max(axis=0))

    lower = np.clip(lower, 0.0, M)
    upper = np.clip(upper, 0.0, M)
    lower[E] = fE
    upper[E] = fE
    # a bound at one point implies a bound at its neighbours through monotonicity
    lower = np.maximum.accumulate(lower[::-1])[::-1]
    upper = np.minimum.accumulate(upper)
    return lower, upper


def convex_bounds(
    instance: Instance, ledger: EvaluationLedger, *, force: bool = False
) -> BoundModel:
    """Bounds that additionally exploit convexity of every cost curve.

    Upper bounds take the minimum of M, chords anchored at ``(0, M)``,
    values of evaluated points to the left, and chords between evaluated
    points bracketing ``k``.  Lower bounds take the maximum of 0, values of
    evaluated points to the right, and chords through two evaluated points
    extended beyond either end.

    Raises :class:`NotConvexFlagged` unless the instance is flagged convex or
    ``force`` is set (the model is then marked heuristic).
    """
    if not instance.convex and not force:
        raise NotConvexFlagged("convex bounds require an instance flagged convex")
    lowers, uppers = [], []
    for i in range(instance.n):
        lo, up = _convex_row(ledger.v[i], ledger.values[i], instance.M)
        if not instance.convex:
            lo = np.minimum(lo, up)
        lowers.append(lo)
        uppers.append(up)
    return BoundModel("convex", tuple(lowers), tuple(uppers), heuristic=not instance.convex)


def build_bounds(instance: Instance, ledger: EvaluationLedger, mode: Mode) -> BoundModel:
    if mode == "monotone":
        return monotone_bounds(instance, ledger)
    if mode == "convex":
        return convex_bounds(instance, ledger, force=True)
    raise ValueError(f"unknown bound mode {mode!r}")


def model_bound_objective(
    model: BoundModel,
    allocation: Allocation | Sequence[int],
    side: Literal["lower", "upper"],
) -> float:
    rows = model.lower if side == "lower" else model.upper
    if side not in ("lower", "upper"):
        raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
    return fold_sum(float(rows[i][xi]) for i, xi in enumerate(allocation))

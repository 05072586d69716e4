"""Exact solver for the separable allocation problem over per-player point menus.

``solve_menu`` is a dynamic program over the total budget; it stands in for
the binary ILP in which ``y_{i,k} = 1`` selects ``k`` items for player ``i``.
``export_ilp`` writes that ILP in CPLEX LP format, and ``brute_force_solve``
enumerates every feasible allocation as a test oracle.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import Allocation, Instance, RallocError

__all__ = [
    "CapExceeded",
    "PointMenu",
    "SubSolution",
    "solve_menu",
    "brute_force_solve",
    "table_objective",
    "export_ilp",
    "full_menu",
    "evaluated_menu",
    "bound_menu",
    "default_cap",
]

DEFAULT_CAP = 10**7


class CapExceeded(RallocError):
    pass


def default_cap() -> int:
    """Brute-force lattice cap, overridable through ``RALLOC_BRUTE_FORCE_CAP``."""
    return int(os.environ.get("RALLOC_BRUTE_FORCE_CAP", DEFAULT_CAP))


class PointMenu:
    """Admissible ``(k, value)`` pairs for each player, sorted by ``k``."""

    def __init__(self, rows: Sequence[Mapping[int, float] | Sequence[tuple[int, float]]]):
        self.rows: list[tuple[np.ndarray, np.ndarray]] = []
        for i, row in enumerate(rows):
            items = sorted(dict(row).items())
            ks = np.array([int(k) for k, _ in items], dtype=int)
            vals = np.array([float(v) for _, v in items], dtype=float)
            if len(ks) and ks[0] < 0:
                raise ValueError(f"menu row {i} has a negative item count")
            if not np.all(np.isfinite(vals)):
                raise ValueError(f"menu row {i} has non-finite values")
            self.rows.append((ks, vals))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def size(self) -> int:
        return sum(len(ks) for ks, _ in self.rows)

    def value(self, i: int, k: int) -> float | None:
        ks, vals = self.rows[i]
        j = np.searchsorted(ks, k)
        if j < len(ks) and ks[j] == k:
            return float(vals[j])
        return None


@dataclass(frozen=True)
class SubSolution:
    allocation: Allocation
    value: float
    feasible: bool


def full_menu(rows: Sequence[Sequence[float]]) -> PointMenu:
    return PointMenu([list(enumerate(row)) for row in rows])


def evaluated_menu(ledger) -> PointMenu:
    """Menu restricted to the points already in ``ledger``."""
    return PointMenu(
        [
            [(int(k), float(ledger.values[i][k])) for k in np.flatnonzero(ledger.v[i])]
            for i in range(ledger.instance.n)
        ]
    )


def bound_menu(rows: Sequence[np.ndarray]) -> PointMenu:
    return PointMenu([list(enumerate(np.asarray(r, dtype=float))) for r in rows])


def solve_menu(menu: PointMenu, B: int) -> SubSolution:
    """Minimise the menu-value sum subject to the items summing to ``B``.

    Among optimal selections the lexicographically smallest allocation is
    returned.  If no selection reaches ``B`` exactly, ``feasible`` is false.
    """
    n = menu.n
    # suffix[i][s]: best value of players i..n-1 using exactly s items
    suffix = np.full((n + 1, B + 1), np.inf)
    suffix[n, 0] = 0.0
    for i in range(n - 1, -1, -1):
        ks, vals = menu.rows[i]
        row = suffix[i]
        nxt = suffix[i + 1]
        for k, val in zip(ks, vals):
            if k > B:
                break
            np.minimum(row[k:], val + nxt[: B + 1 - k], out=row[k:])
    best = suffix[0, B]
    if not np.isfinite(best):
        return SubSolution(Allocation(tuple([0] * n), feasible=False), float("inf"), False)
    x = []
    s = B
    for i in range(n):
        ks, vals = menu.rows[i]
        target = suffix[i, s]
        for k, val in zip(ks, vals):
            # same float expression as the forward pass, so equality is exact
            if k <= s and val + suffix[i + 1, s - k] == target:
                x.append(int(k))
                s -= int(k)
                break
        else:  # pragma: no cover - unreachable when best is finite
            raise RuntimeError("backtracking failed")
    return SubSolution(Allocation(tuple(x), feasible=True), float(best), True)


def table_objective(instance: Instance, x: Sequence[int]) -> float:
    """Objective of ``x`` read straight from the sealed table (non-counting)."""
    total = 0.0
    for i in range(instance.n - 1, -1, -1):
        total = instance._lookup(i, int(x[i])) + total
    return total


def brute_force_solve(instance: Instance, cap: int | None = None) -> SubSolution:
    """Enumerate all feasible allocations (test oracle; bypasses the ledger).

    Raises :class:`CapExceeded` when ``prod(b_i + 1)`` exceeds ``cap``.
    """
    cap = default_cap() if cap is None else cap
    lattice = 1
    for bi in instance.b:
        lattice *= bi + 1
    if lattice > cap:
        raise CapExceeded(f"{lattice} lattice points exceed the cap of {cap}")
    B = instance.B
    remaining_max = np.cumsum([0, *instance.b[::-1]])[::-1]  # capacity of players i..n-1
    # rows kept in lexicographic order: earlier players vary slowest
    X = np.zeros((1, 0), dtype=np.int64)
    used = np.zeros(1, dtype=np.int64)
    for i, bi in enumerate(instance.b):
        ks = np.arange(bi + 1)
        X = np.hstack([np.repeat(X, bi + 1, axis=0), np.tile(ks, len(X))[:, None]])
        used = np.repeat(used, bi + 1) + np.tile(ks, len(used))
        keep = (used <= B) & (used + remaining_max[i + 1] >= B)
        X, used = X[keep], used[keep]
    if len(X) == 0:
        return SubSolution(Allocation(tuple([0] * instance.n), feasible=False), float("inf"), False)
    table = [np.asarray(instance._costs[i]) for i in range(instance.n)]
    total = np.zeros(len(X))
    for i in range(instance.n - 1, -1, -1):
        total = table[i][X[:, i]] + total
    j = int(np.argmin(total))  # first minimum is the lexicographically smallest
    return SubSolution(Allocation(tuple(int(v) for v in X[j]), feasible=True), float(total[j]), True)


def _num(v: float) -> str:
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def _linear(terms: list[tuple[float, str]]) -> str:
    out = []
    for coef, var in terms:
        sign = "-" if coef < 0 else "+"
        body = f"{_num(abs(coef))} {var}"
        if not out:
            out.append(body if sign == "+" else f"- {body}")
        else:
            out.append(f"{sign} {body}")
    return " ".join(out)


def export_ilp(menu: PointMenu, B: int, *, name: str = "allocation") -> str:
    """CPLEX LP text of the binary selection model for ``menu``.

    One binary ``y_i_k`` per menu point, the budget row
    ``sum k * y_i_k = B`` and one choice row ``sum_k y_i_k = 1`` per player.
    """
    lines = [f"\\ {name}: separable allocation over {menu.size()} menu points", "Minimize"]
    obj = [(float(val), f"y_{i}_{k}") for i, (ks, vals) in enumerate(menu.rows) for k, val in zip(ks, vals)]
    lines.append(f" obj: {_linear(obj) if obj else '0'}")
    lines.append("Subject To")
    budget = [(float(k), f"y_{i}_{k}") for i, (ks, _) in enumerate(menu.rows) for k in ks if k != 0]
    lines.append(f" budget: {_linear(budget) if budget else '0'} = {B}")
    for i, (ks, _) in enumerate(menu.rows):
        row = [(1.0, f"y_{i}_{k}") for k in ks]
        lines.append(f" choice_{i}: {_linear(row) if row else '0'} = 1")
    variables = [f"y_{i}_{k}" for i, (ks, _) in enumerate(menu.rows) for k in ks]
    if variables:
        lines.append("Binary")
        lines.extend(f" {v}" for v in variables)
    lines.append("End")
    return "\n".join(lines) + "\n"

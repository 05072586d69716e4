"""Seeded random instance families: convex, monotone and near-convex."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Literal, Sequence

import numpy as np

from .core import Instance, RallocError, create_instance

__all__ = ["SpecInvalid", "GenSpec", "generate", "random_spec", "FAMILIES"]

Family = Literal["convex", "monotone", "near_convex"]
FAMILIES = ("convex", "monotone", "near_convex")
_GRID = 2.0**20


class SpecInvalid(RallocError, ValueError):
    pass


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    b: int | tuple[int, ...]
    B: int
    M: float = 100.0
    seed: int = 0
    perturbation: float = 0.0

    def budgets(self) -> tuple[int, ...]:
        if isinstance(self.b, int):
            return (self.b,) * self.n
        return tuple(int(x) for x in self.b)

    def to_dict(self) -> dict:
        d = asdict(self)
        if not isinstance(self.b, int):
            d["b"] = list(self.b)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GenSpec":
        b = d["b"]
        b = int(b) if isinstance(b, (int, float)) else tuple(int(x) for x in b)
        return cls(
            family=d["family"], n=int(d["n"]), b=b, B=int(d["B"]), M=float(d.get("M", 100.0)),
            seed=int(d.get("seed", 0)), perturbation=float(d.get("perturbation", 0.0)),
        )


def _check(spec: GenSpec) -> tuple[int, ...]:
    if spec.family not in FAMILIES:
        raise SpecInvalid(f"unknown family {spec.family!r}; expected one of {FAMILIES}")
    if spec.n < 1:
        raise SpecInvalid("n must be positive")
    b = spec.budgets()
    if len(b) != spec.n or any(x < 1 for x in b):
        raise SpecInvalid(f"b must be a positive scalar or a length-{spec.n} vector")
    if not spec.M > 0:
        raise SpecInvalid("M must be positive")
    if not 0.0 <= spec.perturbation <= 1.0:
        raise SpecInvalid("perturbation must lie in [0, 1]")
    if not (max(b) <= spec.B < sum(b)):
        raise SpecInvalid(f"need max(b) <= B < sum(b), got B={spec.B}, b={b}")
    return b


def _row(rng: np.random.Generator, bi: int, M: float, family: str, perturbation: float) -> np.ndarray:
    start = rng.uniform(0.5 * M, M)
    # expected total drop equals the start value, so rows sometimes bottom out at 0
    drops = rng.uniform(0.0, 2.0 * start / bi, size=bi)
    if family in ("convex", "near_convex"):
        drops = np.sort(drops)[::-1]
    if family == "near_convex" and bi > 2:
        drops[1:-1] *= rng.uniform(1.0 - perturbation, 1.0 + perturbation, size=bi - 2)
    # dyadic grid keeps the cumulative sums exact, so convexity survives rounding
    start = np.floor(start * _GRID) / _GRID
    drops = np.round(drops * _GRID) / _GRID
    row = start - np.concatenate([[0.0], np.cumsum(drops)])
    return np.clip(row, 0.0, M)


def generate(spec: GenSpec) -> Instance:
    """Build a random instance; the same spec always gives the same instance.

    Convex rows subtract sorted (descending) uniform drops from a start value
    in ``[M/2, M)``; monotone rows use the drops unsorted; near-convex rows
    scale the interior drops of a convex row by factors in
    ``[1 - perturbation, 1 + perturbation]``.
    """
    b = _check(spec)
    rng = np.random.default_rng(spec.seed)
    rows = [_row(rng, bi, spec.M, spec.family, spec.perturbation) for bi in b]
    name = f"{spec.family}-n{spec.n}-B{spec.B}-s{spec.seed}"
    return create_instance(b, spec.B, spec.M, rows, convex=spec.family == "convex", name=name)


def random_spec(
    rng: np.random.Generator,
    family: str,
    *,
    n_range: Sequence[int] = (2, 8),
    b_max: int = 12,
    lattice_cap: int = 10**5,
    regime: Literal["additive", "removal"] | None = None,
    M: float = 100.0,
) -> GenSpec:
    """Draw a spec with ``prod(b_i + 1) <= lattice_cap`` for benchmark sweeps.

    ``regime`` picks ``2B <= sum(b)`` (``"additive"``) or ``2B > sum(b)``
    (``"removal"``); ``None`` draws B uniformly over the admissible range.
    """
    while True:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        b = tuple(int(x) for x in rng.integers(1, b_max + 1, size=n))
        if np.prod([x + 1 for x in b], dtype=float) > lattice_cap:
            continue
        lo, hi = max(b), sum(b) - 1
        if regime == "additive":
            hi = min(hi, sum(b) // 2)
        elif regime == "removal":
            lo = max(lo, sum(b) // 2 + 1)
        if lo > hi:
            continue
        B = int(rng.integers(lo, hi + 1))
        return GenSpec(family, n, b, B, M, seed=int(rng.integers(2**31)))

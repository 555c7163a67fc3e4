"""Reference values of the Gaussian periods, summed straight from the definition.

``T[k, r] = sum over a in [0, 2**(m-k)) of eps**(g**(2**k * a + r))`` with
``eps = exp(2 pi i / p)``. Level ``k`` holds ``2**k`` periods that partition
``eps + eps**2 + ... + eps**(p-1) = -1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import NamedTuple

from .numeric import GUARD_BITS, MIN_PRECISION, BigComplex, BigFloat, pi_fixed, sin_cos
from .ntheory import FermatContext


class PeriodId(NamedTuple):
    k: int
    r: int

    def __str__(self) -> str:
        return f"T[{self.k},{self.r}]"


@dataclass(frozen=True)
class PeriodTable:
    k: int
    values: dict[PeriodId, BigComplex]
    prec: int

    def __getitem__(self, r: int) -> BigComplex:
        return self.values[PeriodId(self.k, r % (1 << self.k))]

    def __len__(self) -> int:
        return len(self.values)

    def min_gap(self) -> float:
        """Smallest distance between two periods of the level (inf for a single one)."""
        zs = [complex(v) for v in self.values.values()]
        return min((abs(a - b) for a, b in combinations(zs, 2)), default=float("inf"))


@lru_cache(maxsize=None)
def _root(p: int, j: int, prec: int) -> BigComplex:
    j %= p
    if j == 0:
        return BigComplex.from_int(1, prec)
    wp = prec + GUARD_BITS
    angle = BigFloat.make(2 * j * pi_fixed(wp) // p, -wp, wp)
    s, c = sin_cos(angle, prec)
    return BigComplex(c, s)


def root_of_unity(ctx: FermatContext, j: int, prec: int) -> BigComplex:
    """``eps**j = cos(2 pi j / p) + i sin(2 pi j / p)``."""
    if prec < MIN_PRECISION:
        raise ValueError(f"precision must be at least {MIN_PRECISION} bits")
    return _root(ctx.p, j, prec)


def _check_id(ctx: FermatContext, pid: PeriodId) -> None:
    if not 0 <= pid.k <= ctx.m or not 0 <= pid.r < (1 << pid.k):
        raise ValueError(f"invalid period id {pid} for p={ctx.p}")


def reference_period(ctx: FermatContext, pid: PeriodId | tuple[int, int], prec: int) -> BigComplex:
    pid = PeriodId(*pid)
    _check_id(ctx, pid)
    step = 1 << pid.k
    total = BigComplex.from_int(0, prec)
    for a in range(1 << (ctx.m - pid.k)):
        total = total + root_of_unity(ctx, ctx.gpow(step * a + pid.r), prec)
    return total


def reference_level(ctx: FermatContext, k: int, prec: int) -> PeriodTable:
    if not 0 <= k <= ctx.m:
        raise ValueError(f"level k={k} outside 0..{ctx.m}")
    values = {PeriodId(k, r): reference_period(ctx, (k, r), prec) for r in range(1 << k)}
    return PeriodTable(k, values, prec)

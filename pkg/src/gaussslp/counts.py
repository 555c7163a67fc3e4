"""Pair counts N[k, t] for the period product expansion.

``N[k, t]`` is the number of pairs ``(c, d)`` of residues mod ``2**(m-k-1)`` with

    g**(2**(k+1)*c + t) + g**(2**(k+1)*d + 2**k + t) == 1  (mod p)

These are the integer coefficients in
``T[k+1, r] * T[k+1, 2**k + r] = sum_s N[k, r - s] * T[k, s]`` (plus 1 at the
top level). The count only depends on ``t mod 2**k``, so tables are stored
over that canonical range.
"""
from __future__ import annotations

from dataclasses import dataclass

from .ntheory import DlogTable, FermatContext


@dataclass(frozen=True)
class CountTable:
    k: int
    values: tuple[int, ...]

    def __getitem__(self, t: int) -> int:
        return self.values[t % len(self.values)]

    def __len__(self) -> int:
        return len(self.values)


def _check_level(ctx: FermatContext, k: int) -> None:
    if not 0 <= k <= ctx.m - 1:
        raise ValueError(f"level k={k} outside 0..{ctx.m - 1}")


def solution_pairs(ctx: FermatContext, k: int, t: int) -> list[tuple[int, int]]:
    """All ``(c, d)`` solving the congruence, by enumeration."""
    _check_level(ctx, k)
    n = 1 << (ctx.m - k - 1)
    step = 1 << (k + 1)
    half = 1 << k
    return [
        (c, d)
        for c in range(n)
        for d in range(n)
        if (ctx.gpow(step * c + t) + ctx.gpow(step * d + half + t)) % ctx.p == 1
    ]


def count_bruteforce(ctx: FermatContext, k: int, t: int) -> int:
    return len(solution_pairs(ctx, k, t))


def count_table(ctx: FermatContext, dlog: DlogTable, k: int) -> CountTable:
    """Counts for every canonical ``t`` in ``Z_{2**k}``, one dlog lookup per ``c``.

    For fixed ``c`` the partner ``g**(...d...)`` must equal ``1 - g**(...c...)``, so
    at most one ``d`` qualifies: the one whose log is ``2**k + t`` mod ``2**(k+1)``.
    """
    _check_level(ctx, k)
    p, order = ctx.p, ctx.order
    n = 1 << (ctx.m - k - 1)
    step = 1 << (k + 1)
    half = 1 << k
    values = []
    for t in range(half):
        count = 0
        for c in range(n):
            u = (1 - ctx.gpow(step * c + t)) % p
            if u and (dlog[u] - half - t) % order % step == 0:
                count += 1
        values.append(count)
    return CountTable(k, tuple(values))


def verify_lemma1(ctx: FermatContext, k: int) -> bool:
    """True iff the brute-force count depends on ``t`` only through ``t mod 2**k``."""
    _check_level(ctx, k)
    half = 1 << k
    canonical = [count_bruteforce(ctx, k, t) for t in range(half)]
    return all(count_bruteforce(ctx, k, t) == canonical[t % half]
               for t in range(half, ctx.order))

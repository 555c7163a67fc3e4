"""Fermat primes, primitive roots and discrete logarithms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field


class NotFermatPrime(ValueError):
    pass


class NotPrimitiveRoot(ValueError):
    pass


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def is_prime(n: int) -> bool:
    """Deterministic trial division."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def validate_fermat_prime(n: int) -> tuple[int, int]:
    """Return ``(p, m)`` with ``p = 2**m + 1`` prime and ``m`` a power of two."""
    if not isinstance(n, int) or n < 3:
        raise NotFermatPrime(f"{n} is not a Fermat prime (must be an integer >= 3)")
    if not _is_power_of_two(n - 1):
        raise NotFermatPrime(f"{n} is not a Fermat prime ({n - 1} is not a power of two)")
    m = (n - 1).bit_length() - 1
    if not _is_power_of_two(m):
        raise NotFermatPrime(f"{n} is not a Fermat prime (exponent {m} is not a power of two)")
    if not is_prime(n):
        raise NotFermatPrime(f"{n} is not a Fermat prime (composite)")
    return n, m


def pow_mod(base: int, exp: int, p: int) -> int:
    if p < 2:
        raise ValueError("modulus must be at least 2")
    if exp < 0:
        raise ValueError("exponent must be non-negative")
    return pow(base, exp, p)


def is_primitive_root(g: int, p: int, m: int) -> bool:
    # p - 1 = 2**m has the single prime factor 2
    return pow_mod(g, 1 << (m - 1), p) == p - 1


def find_primitive_root(p: int, m: int) -> int:
    g = 2
    while not is_primitive_root(g, p, m):
        g += 1
    return g


@dataclass(frozen=True)
class FermatContext:
    p: int
    m: int
    g: int

    def __post_init__(self):
        p, m = validate_fermat_prime(self.p)
        if m != self.m:
            raise NotFermatPrime(f"exponent mismatch: {p} = 2**{m} + 1, not 2**{self.m} + 1")
        if not 0 < self.g < p or not is_primitive_root(self.g, p, m):
            raise NotPrimitiveRoot(f"{self.g} is not a primitive root mod {p}")

    @classmethod
    def from_prime(cls, n: int, g: int | None = None) -> "FermatContext":
        p, m = validate_fermat_prime(n)
        if g is None:
            g = find_primitive_root(p, m)
        return cls(p, m, g % p)

    @property
    def order(self) -> int:
        """Multiplicative order ``2**m = p - 1``; all exponents live mod this."""
        return self.p - 1

    def gpow(self, e: int) -> int:
        return pow(self.g, e % self.order, self.p)


@dataclass(frozen=True)
class DlogTable:
    p: int
    g: int
    entries: dict[int, int] = field(repr=False)

    def __getitem__(self, residue: int) -> int:
        return self.entries[residue % self.p]

    def __len__(self) -> int:
        return len(self.entries)


def build_dlog_table(ctx: FermatContext) -> DlogTable:
    entries = {}
    x = 1
    for i in range(ctx.p - 1):
        entries[x] = i
        x = x * ctx.g % ctx.p
    return DlogTable(ctx.p, ctx.g, entries)

"""Binary floating point and complex arithmetic at configurable precision.

Values are ``man * 2**exp`` with a signed integer mantissa of exactly ``prec``
bits (zero excepted). Operations round to nearest on the final shift; the error
budget is a few ulp per operation, not correct rounding.

Also home to the straight-line-program evaluator, which only needs the opcode
and operand ids of each instruction.
"""
from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

MIN_PRECISION = 53
GUARD_BITS = 32


class DivisionByZero(ZeroDivisionError):
    """A DIV instruction met a zero divisor."""

    def __init__(self, node: int):
        super().__init__(f"division by zero at node {node}")
        self.node = node


def _round_shift(n: int, shift: int) -> int:
    """Shift the non-negative ``n`` right by ``shift`` bits, rounding half up."""
    if shift <= 0:
        return n << -shift
    return (n + (1 << (shift - 1))) >> shift


@dataclass(frozen=True, slots=True)
class BigFloat:
    man: int
    exp: int
    prec: int

    @classmethod
    def make(cls, man: int, exp: int, prec: int) -> "BigFloat":
        if man == 0:
            return cls(0, 0, prec)
        sign = -1 if man < 0 else 1
        a = abs(man)
        shift = a.bit_length() - prec
        if shift > 0:
            a = _round_shift(a, shift)
            exp += shift
            if a.bit_length() > prec:
                a >>= 1
                exp += 1
        elif shift < 0:
            a <<= -shift
            exp += shift
        return cls(sign * a, exp, prec)

    @classmethod
    def from_int(cls, n: int, prec: int) -> "BigFloat":
        return cls.make(n, 0, prec)

    @classmethod
    def from_float(cls, x: float, prec: int) -> "BigFloat":
        if not math.isfinite(x):
            raise ValueError(f"cannot represent {x!r}")
        num, den = x.as_integer_ratio()
        return cls.make(num, 1 - den.bit_length(), prec)

    @classmethod
    def zero(cls, prec: int) -> "BigFloat":
        return cls(0, 0, prec)

    def with_prec(self, prec: int) -> "BigFloat":
        if prec == self.prec:
            return self
        return BigFloat.make(self.man, self.exp, prec)

    def is_zero(self) -> bool:
        return self.man == 0

    @property
    def top(self) -> int:
        """Exponent of the leading bit plus one; ``|x|`` lies in ``[2**(top-1), 2**top)``."""
        return self.exp + abs(self.man).bit_length()

    def __float__(self) -> float:
        a = abs(self.man)
        if a == 0:
            return 0.0
        s = max(a.bit_length() - 64, 0)
        try:
            v = math.ldexp(float(a >> s), self.exp + s)
        except OverflowError:
            v = math.inf
        return -v if self.man < 0 else v

    def __neg__(self) -> "BigFloat":
        return BigFloat(-self.man, self.exp, self.prec)

    def __abs__(self) -> "BigFloat":
        return BigFloat(abs(self.man), self.exp, self.prec)

    def __add__(self, other: "BigFloat") -> "BigFloat":
        prec = max(self.prec, other.prec)
        if other.man == 0:
            return self.with_prec(prec)
        if self.man == 0:
            return other.with_prec(prec)
        # operand entirely below the rounding position of the larger one
        if self.top - other.top > prec + 3:
            return self.with_prec(prec)
        if other.top - self.top > prec + 3:
            return other.with_prec(prec)
        e = min(self.exp, other.exp)
        man = (self.man << (self.exp - e)) + (other.man << (other.exp - e))
        return BigFloat.make(man, e, prec)

    def __sub__(self, other: "BigFloat") -> "BigFloat":
        return self + (-other)

    def __mul__(self, other: "BigFloat") -> "BigFloat":
        return BigFloat.make(self.man * other.man, self.exp + other.exp,
                             max(self.prec, other.prec))

    def __truediv__(self, other: "BigFloat") -> "BigFloat":
        if other.man == 0:
            raise ZeroDivisionError("BigFloat division by zero")
        prec = max(self.prec, other.prec)
        if self.man == 0:
            return BigFloat.zero(prec)
        a, b = abs(self.man), abs(other.man)
        shift = prec + 3 + b.bit_length() - a.bit_length()
        q = (a << shift) // b if shift >= 0 else (a >> -shift) // b
        sign = -1 if (self.man < 0) != (other.man < 0) else 1
        return BigFloat.make(sign * q, self.exp - other.exp - shift, prec)

    def sqrt(self) -> "BigFloat":
        if self.man < 0:
            raise ValueError("square root of a negative BigFloat")
        if self.man == 0:
            return self
        shift = 2 * (self.prec + 3) - self.man.bit_length()
        if (self.exp - shift) % 2:
            shift += 1
        scaled = self.man << shift if shift >= 0 else self.man >> -shift
        return BigFloat.make(math.isqrt(scaled), (self.exp - shift) // 2, self.prec)

    def ldexp(self, n: int) -> "BigFloat":
        return BigFloat(self.man, self.exp + n if self.man else 0, self.prec)

    def _cmp(self, other: "BigFloat") -> int:
        d = (self - other).man
        return (d > 0) - (d < 0)

    def __lt__(self, other: "BigFloat") -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: "BigFloat") -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: "BigFloat") -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: "BigFloat") -> bool:
        return self._cmp(other) >= 0

    def to_decimal(self, digits: int) -> str:
        with decimal.localcontext() as dc:
            dc.prec = digits + 10
            v = decimal.Decimal(self.man) * decimal.Decimal(2) ** self.exp
            dc.prec = digits
            return str(+v)

    def to_fixed(self, wp: int) -> int:
        """Round to an integer count of ``2**-wp`` units."""
        if self.man == 0:
            return 0
        a = _round_shift(abs(self.man), -(self.exp + wp))
        return -a if self.man < 0 else a


@dataclass(frozen=True, slots=True)
class BigComplex:
    re: BigFloat
    im: BigFloat

    @classmethod
    def from_int(cls, n: int, prec: int) -> "BigComplex":
        return cls(BigFloat.from_int(n, prec), BigFloat.zero(prec))

    @classmethod
    def from_complex(cls, z: complex, prec: int) -> "BigComplex":
        z = complex(z)
        return cls(BigFloat.from_float(z.real, prec), BigFloat.from_float(z.imag, prec))

    @property
    def prec(self) -> int:
        return max(self.re.prec, self.im.prec)

    def is_zero(self) -> bool:
        return self.re.man == 0 and self.im.man == 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __neg__(self) -> "BigComplex":
        return BigComplex(-self.re, -self.im)

    def __add__(self, other: "BigComplex") -> "BigComplex":
        return BigComplex(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "BigComplex") -> "BigComplex":
        return BigComplex(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "BigComplex") -> "BigComplex":
        a, b, c, d = self.re, self.im, other.re, other.im
        return BigComplex(a * c - b * d, a * d + b * c)

    def __truediv__(self, other: "BigComplex") -> "BigComplex":
        if other.is_zero():
            raise ZeroDivisionError("BigComplex division by zero")
        a, b, c, d = self.re, self.im, other.re, other.im
        if d.is_zero():
            return BigComplex(a / c, b / c)
        den = c * c + d * d
        return BigComplex((a * c + b * d) / den, (b * c - a * d) / den)

    def conjugate(self) -> "BigComplex":
        return BigComplex(self.re, -self.im)

    def abs2(self) -> BigFloat:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> BigFloat:
        return self.abs2().sqrt()

    def with_prec(self, prec: int) -> "BigComplex":
        return BigComplex(self.re.with_prec(prec), self.im.with_prec(prec))


def complex_sqrt(z: BigComplex, prec: int | None = None) -> BigComplex:
    """Principal square root: real part >= 0, imaginary part >= 0 on the negative axis."""
    if prec is not None:
        z = z.with_prec(prec)
    x, y = z.re, z.im
    if z.is_zero():
        return z
    if y.is_zero():
        if x.man > 0:
            return BigComplex(x.sqrt(), y)
        return BigComplex(BigFloat.zero(x.prec), (-x).sqrt())
    r = abs(z)
    if x.man >= 0:
        u = (r + x).ldexp(-1).sqrt()
        return BigComplex(u, y / u.ldexp(1))
    v = (r - x).ldexp(-1).sqrt()
    u = abs(y) / v.ldexp(1)
    return BigComplex(u, v if y.man > 0 else -v)


# -- transcendental helpers (fixed point, ``wp`` fractional bits) --

def _atan_inv_fixed(x: int, wp: int) -> int:
    """arctan(1/x) for integer x > 1."""
    x2 = x * x
    term = (1 << wp) // x
    total = term
    n, sign = 1, 1
    while term:
        term //= x2
        n += 2
        sign = -sign
        total += sign * (term // n)
    return total


@lru_cache(maxsize=None)
def pi_fixed(wp: int) -> int:
    """pi * 2**wp by Machin's formula, pi = 16 atan(1/5) - 4 atan(1/239)."""
    w = wp + 16
    v = 16 * _atan_inv_fixed(5, w) - 4 * _atan_inv_fixed(239, w)
    return _round_shift(v, 16)


def pi(prec: int) -> BigFloat:
    wp = prec + GUARD_BITS
    return BigFloat.make(pi_fixed(wp), -wp, prec)


def _sin_cos_small(r: int, wp: int) -> tuple[int, int]:
    """Taylor series for |r| <= pi/4 in fixed point."""
    one = 1 << wp
    r2 = (r * r) >> wp

    def series(term: int, n: int) -> int:
        total = term
        while term:
            # truncate toward zero so the loop terminates for either sign
            t = ((abs(term) * r2) >> wp) // ((n + 1) * (n + 2))
            term = -t if term > 0 else t
            total += term
            n += 2
        return total

    return series(r, 1), series(one, 0)


def sin_cos(x: BigFloat, prec: int) -> tuple[BigFloat, BigFloat]:
    """Return ``(sin x, cos x)`` at ``prec`` bits."""
    if prec < MIN_PRECISION:
        raise ValueError(f"precision must be at least {MIN_PRECISION} bits")
    if x.is_zero():
        return BigFloat.zero(prec), BigFloat.from_int(1, prec)
    wp = prec + GUARD_BITS
    # large arguments need as many extra bits of pi as they have integer bits
    wpi = wp + max(x.top, 0) + 4
    X = x.to_fixed(wpi)
    half_pi = pi_fixed(wpi) >> 1
    n, rem = divmod(X + (half_pi >> 1), half_pi)
    r = (rem - (half_pi >> 1)) >> (wpi - wp)
    s, c = _sin_cos_small(r, wp)
    q = n % 4
    if q == 1:
        s, c = c, -s
    elif q == 2:
        s, c = -s, -c
    elif q == 3:
        s, c = -c, s
    return BigFloat.make(s, -wp, prec), BigFloat.make(c, -wp, prec)


# -- evaluation of straight-line programs --

@dataclass(frozen=True)
class EvalTrace:
    values: tuple[BigComplex, ...]
    prec: int

    def __getitem__(self, node: int) -> BigComplex:
        return self.values[node]

    def __len__(self) -> int:
        return len(self.values)


def apply_op(op: str, args: Sequence[BigComplex], prec: int, node: int = -1) -> BigComplex:
    """Value of one instruction given its operand values."""
    if op == "ONE":
        return BigComplex.from_int(1, prec)
    if op == "ADD":
        return args[0] + args[1]
    if op == "SUB":
        return args[0] - args[1]
    if op == "MUL":
        return args[0] * args[1]
    if op == "DIV":
        if args[1].is_zero():
            raise DivisionByZero(node)
        return args[0] / args[1]
    if op == "SQRT":
        return complex_sqrt(args[0])
    raise ValueError(f"unknown opcode {op!r}")


def eval_program(program, prec: int) -> EvalTrace:
    """Run every instruction of ``program`` in order at ``prec`` bits."""
    if prec < MIN_PRECISION:
        raise ValueError(f"precision must be at least {MIN_PRECISION} bits")
    values: list[BigComplex] = []
    for node, ins in enumerate(program.instructions):
        values.append(apply_op(str(ins.op), [values[a] for a in ins.args], prec, node))
    return EvalTrace(tuple(values), prec)


def max_abs(values: Iterable[BigComplex]) -> float:
    return max((abs(complex(v)) for v in values), default=0.0)

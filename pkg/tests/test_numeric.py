import cmath
import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussslp.numeric import BigComplex, BigFloat, complex_sqrt, eval_program, pi, sin_cos
from gaussslp.circuit import Instruction, Program

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False).filter(lambda x: abs(x) > 1e-6)
precisions = st.sampled_from([53, 64, 100, 192])


def exact(x: BigFloat) -> Fraction:
    return Fraction(x.man) * Fraction(2) ** x.exp


def ulps(x: BigFloat, ref: Fraction) -> float:
    """Error of x against the exact value, in units of 2**-prec relative to |ref|."""
    if ref == 0:
        return 0.0 if x.is_zero() else math.inf
    return float(abs(exact(x) - ref) / abs(ref)) * 2.0 ** x.prec


def mpfrac(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    return (-1) ** sign * Fraction(int(man)) * Fraction(2) ** exp


def test_normalized_mantissa():
    x = BigFloat.from_int(6, 64)
    assert x.man.bit_length() == 64
    assert exact(x) == 6
    assert BigFloat.from_int(0, 64).man == 0


@pytest.mark.parametrize("v", [0.1, -3.75, 1e-300, 12345.678])
def test_float_round_trip(v):
    assert float(BigFloat.from_float(v, 53)) == v


@settings(max_examples=200, deadline=None)
@given(finite, finite, precisions)
def test_basic_ops_within_4_ulp(a, b, prec):
    x, y = BigFloat.from_float(a, prec), BigFloat.from_float(b, prec)
    fa, fb = Fraction(a), Fraction(b)
    assert ulps(x * y, fa * fb) <= 4
    assert ulps(x / y, fa / fb) <= 4
    if fa + fb != 0:
        assert ulps(x + y, fa + fb) <= 4
    if fa - fb != 0:
        assert ulps(x - y, fa - fb) <= 4


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=1e-6, max_value=1e6), precisions)
def test_real_sqrt_within_4_ulp(a, prec):
    r = BigFloat.from_float(a, prec).sqrt()
    assert ulps(r * r, Fraction(a)) <= 8


def test_addition_of_tiny_operand():
    big = BigFloat.from_int(1, 64)
    tiny = BigFloat.make(1, -500, 64)
    assert big + tiny == big
    assert (tiny + big) - big == BigFloat.zero(64)


def test_comparisons():
    a, b = BigFloat.from_float(1.5, 64), BigFloat.from_float(2.5, 64)
    assert a < b and b > a and a <= a and b >= a


def test_pi_against_mpmath():
    mpmath.mp.prec = 700
    for prec in (53, 64, 192, 600):
        assert ulps(pi(prec), mpfrac(mpmath.pi)) <= 2


@pytest.mark.parametrize("z, expected", [(4, 2), (-1, 1j), (2j, 1 + 1j), (0, 0), (-4 + 0j, 2j)])
def test_complex_sqrt_examples(z, expected):
    assert complex(complex_sqrt(BigComplex.from_complex(z, 64))) == expected


@settings(max_examples=200, deadline=None)
@given(finite, finite, precisions)
def test_complex_sqrt_principal(a, b, prec):
    z = BigComplex.from_complex(complex(a, b), prec)
    w = complex_sqrt(z)
    assert w.re.man >= 0
    if w.re.is_zero():
        assert w.im.man >= 0
    sq = w * w
    scale = abs(complex(a, b))
    assert abs(complex(sq - z)) <= 8 * 2.0 ** -prec * scale
    assert cmath.isclose(complex(w), cmath.sqrt(complex(a, b)), rel_tol=1e-12)


@settings(max_examples=150, deadline=None)
@given(finite, finite, finite, finite, finite, finite)
def test_field_axioms(a, b, c, d, e, f):
    prec = 96
    x = BigComplex.from_complex(complex(a, b), prec)
    y = BigComplex.from_complex(complex(c, d), prec)
    z = BigComplex.from_complex(complex(e, f), prec)
    lhs, rhs = (x * y) * z, x * (y * z)
    # componentwise cancellation makes the absolute error scale with |x||y||z|
    scale = abs(complex(x)) * abs(complex(y)) * abs(complex(z))
    assert abs(complex(lhs - rhs)) <= 16 * 2.0 ** -prec * scale
    one = x * (BigComplex.from_int(1, prec) / x)
    assert abs(complex(one) - 1) <= 16 * 2.0 ** -prec


def test_sin_cos_zero():
    s, c = sin_cos(BigFloat.zero(64), 64)
    assert (float(s), float(c)) == (0.0, 1.0)


def test_sin_cos_two_pi_over_five():
    x = BigFloat.from_float(2 * math.pi / 5, 64)
    s, c = sin_cos(x, 64)
    assert float(s) == pytest.approx(0.9510565163, abs=1e-10)
    assert float(c) == pytest.approx(0.3090169944, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0, max_value=2 * math.pi, exclude_max=True), precisions)
def test_sin_cos_against_mpmath(a, prec):
    mpmath.mp.prec = prec + 64
    s, c = sin_cos(BigFloat.from_float(a, prec), prec)
    # relative error bound 2**(6 - prec), floored at an absolute 2**-prec near the zeros
    for got, ref in ((s, mpmath.sin(a)), (c, mpmath.cos(a))):
        err = abs(exact(got) - mpfrac(ref))
        assert err <= 2.0 ** (6 - prec) * max(abs(mpfrac(ref)), Fraction(1, 2 ** 20))
    pyth = exact(s) ** 2 + exact(c) ** 2 - 1
    assert abs(pyth) <= 2.0 ** (48 - prec)


def test_sin_cos_large_argument():
    mpmath.mp.prec = 200
    s, c = sin_cos(BigFloat.from_int(10 ** 6, 128), 128)
    assert abs(exact(s) - mpfrac(mpmath.sin(10 ** 6))) < 2.0 ** -120
    assert abs(exact(c) - mpfrac(mpmath.cos(10 ** 6))) < 2.0 ** -120


def test_precision_floor():
    with pytest.raises(ValueError):
        sin_cos(BigFloat.from_int(1, 32), 32)


def _random_expression(rng, n_leaves=6, n_ops=20):
    """Program over random leaves (built as ratios of the constant 1) and its double-precision value."""
    ins = [Instruction("ONE")]
    vals = [1.0 + 0j]
    for _ in range(n_leaves):
        # a / b with small integers a, b built by repeated addition
        ins.append(Instruction("ADD", (len(ins) - 1, 0)))
        vals.append(vals[-1] + 1)
    for _ in range(n_ops):
        op = rng.choice(["ADD", "SUB", "MUL", "DIV", "SQRT"])
        a = rng.randrange(len(ins))
        b = rng.randrange(1, len(ins))
        if op == "SQRT":
            ins.append(Instruction(op, (a,)))
            vals.append(cmath.sqrt(vals[a]))
            continue
        if op == "DIV" and abs(vals[b]) < 1e-3:
            continue
        x, y = vals[a], vals[b]
        r = {"ADD": x + y, "SUB": x - y, "MUL": x * y, "DIV": x / y if op == "DIV" else 0}[op]
        if not 1e-6 < abs(r) < 1e12:
            continue
        ins.append(Instruction(op, (a, b)))
        vals.append(r)
    return Program(5, 2, 2, instructions=ins), vals


@pytest.mark.parametrize("seed", range(20))
def test_cross_check_with_doubles(seed):
    program, vals = _random_expression(random.Random(seed))
    trace = eval_program(program, 53)
    for node, v in enumerate(vals):
        # cmath.sqrt and our principal branch agree, including on the negative axis
        assert abs(complex(trace[node]) - v) <= 2.0 ** -40 * max(1.0, abs(v)), node


@pytest.mark.parametrize("seed", range(10))
def test_precision_monotonicity_random(seed):
    program, _ = _random_expression(random.Random(seed))
    lo, hi = eval_program(program, 64), eval_program(program, 128)
    for a, b in zip(lo.values, hi.values):
        assert abs(complex(a - b)) <= 2.0 ** (16 - 64) * max(1.0, abs(complex(b)))


def test_eval_single_one():
    trace = eval_program(Program(5, 2, 2), 64)
    assert len(trace) == 1 and complex(trace[0]) == 1


def test_eval_division_by_zero():
    from gaussslp.numeric import DivisionByZero
    prog = Program(5, 2, 2, instructions=[Instruction("ONE"), Instruction("SUB", (0, 0)),
                                          Instruction("DIV", (0, 1))])
    with pytest.raises(DivisionByZero) as e:
        eval_program(prog, 64)
    assert e.value.node == 2

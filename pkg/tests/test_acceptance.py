"""Exit criteria; each test prints one PASS/FAIL line."""
import math
import random
import time

import pytest

from gaussslp.app import check_identities, verify_program
from gaussslp.circuit import build_program, closed_form_count, op_count, parse, serialize
from gaussslp.counts import count_bruteforce, count_table, verify_lemma1
from gaussslp.ntheory import FermatContext, build_dlog_table
from gaussslp.numeric import eval_program
from gaussslp.periods import PeriodId, root_of_unity

from mutation import random_mutants


@pytest.fixture
def record(capsys):
    def _record(n, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail
    return _record


def ctx_for(p):
    return FermatContext.from_prime(p)


def test_1_bound_reproduction(record):
    expected = {3: 11, 5: 30, 17: 172}
    details, ok = [], True
    for p in (3, 5, 17, 257):
        t0 = time.perf_counter()
        n = op_count(build_program(ctx_for(p)))
        cf = closed_form_count(p)
        elapsed = time.perf_counter() - t0
        ok &= n == cf and n < 12 * p * p and elapsed < 1.0 and expected.get(p, n) == n
        details.append(f"p={p}:{n}/{12 * p * p} ({elapsed:.2f}s)")
    cf = closed_form_count(65537)
    ok &= cf < 12 * 65537 ** 2
    details.append(f"p=65537:{cf}/{12 * 65537 ** 2}")
    record(1, ok, " ".join(details))


@pytest.mark.parametrize("p, prec, tol, budget", [
    (3, 64, 1e-12, 1.0), (5, 64, 1e-12, 1.0), (17, 64, 1e-12, 1.0), (257, 192, 1e-30, 60.0)])
def test_2_root_construction(record, p, prec, tol, budget):
    t0 = time.perf_counter()
    ctx = ctx_for(p)
    prog = build_program(ctx, prec)
    trace = eval_program(prog, prec)
    worst = 0.0
    covered = set()
    for r in range(ctx.order):
        z = trace[prog.labels[PeriodId(ctx.m, r)]]
        j = ctx.gpow(r)
        worst = max(worst, abs(complex(z - root_of_unity(ctx, j, prec))))
        for jj in range(1, p):
            if abs(complex(z - root_of_unity(ctx, jj, prec))) <= tol:
                covered.add(jj)
    report = verify_program(prog, ctx, prec, tol, strict=False)
    elapsed = time.perf_counter() - t0
    ok = worst <= tol and covered == set(range(1, p)) and report.ok and elapsed < budget
    record(2, ok, f"p={p} B={prec} max_dev={worst:.2e} tol={tol:g} covered={len(covered)}/{p - 1} "
                  f"time={elapsed:.2f}s<{budget:g}s")


def test_3_p5_golden(record):
    prog = build_program(ctx_for(5), 64)
    trace = eval_program(prog, 64)
    t0 = trace[prog.labels[PeriodId(1, 0)]]
    t1 = trace[prog.labels[PeriodId(1, 1)]]
    d0 = abs(complex(t0) - (-1 + math.sqrt(5)) / 2)
    d1 = abs(complex(t1) - (-1 - math.sqrt(5)) / 2)
    dp = abs(complex(t0 * t1) + 1)
    ok = d0 <= 1e-12 and d1 <= 1e-12 and dp <= 1e-12
    record(3, ok, f"|T10-(-1+r5)/2|={d0:.1e} |T11-(-1-r5)/2|={d1:.1e} |T10*T11+1|={dp:.1e}")


def test_4_count_oracle(record):
    mismatches = checked = 0
    for p in (3, 5, 17):
        ctx = ctx_for(p)
        dlog = build_dlog_table(ctx)
        for k in range(ctx.m):
            table = count_table(ctx, dlog, k)
            for t in range(ctx.order):
                checked += 1
                mismatches += table[t] != count_bruteforce(ctx, k, t)
    ctx = ctx_for(257)
    dlog = build_dlog_table(ctx)
    rng = random.Random(4)
    for _ in range(32):
        k, t = rng.randrange(ctx.m), rng.randrange(ctx.order)
        checked += 1
        mismatches += count_table(ctx, dlog, k)[t] != count_bruteforce(ctx, k, t)
    record(4, mismatches == 0, f"{mismatches} mismatches in {checked} (k, t) checks")


def test_5_residue_class_invariance(record):
    results = {(p, k): verify_lemma1(ctx_for(p), k) for p in (5, 17) for k in range(ctx_for(p).m)}
    record(5, all(results.values()), f"{sum(results.values())}/{len(results)} (p, k) levels invariant")


def test_6_identities(record):
    ctx = ctx_for(17)
    ok = True
    parts = []
    for k in range(ctx.m):
        lo = max(max(r.sum_residual, r.product_residual) for r in check_identities(ctx, k, 64))
        hi = max(max(r.sum_residual, r.product_residual) for r in check_identities(ctx, k, 128))
        ok &= lo < 1e-10 and hi < lo
        parts.append(f"k={k}:{lo:.1e}->{hi:.1e}")
    record(6, ok, "p=17 B=64->128 " + " ".join(parts))


def test_7_robustness(record):
    parts, ok = [], True
    for p in (5, 17):
        prog = build_program(ctx_for(p))
        caught = sum(not verify_program(m, strict=False).ok for _, m in random_mutants(prog, 100, seed=p))
        ok &= caught == 100
        parts.append(f"p={p} mutants caught {caught}/100")
    for p in (5, 17, 257):
        text = serialize(build_program(ctx_for(p)))
        same_parse = serialize(parse(text)) == text
        same_build = serialize(build_program(ctx_for(p))) == text
        ok &= same_parse and same_build
        parts.append(f"p={p} round-trip={same_parse} rebuild={same_build}")
    record(7, ok, "; ".join(parts))

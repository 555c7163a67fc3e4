"""End-to-end verification and the ``gaussslp`` command line."""
from __future__ import annotations

import argparse
import cmath
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Sequence

from .circuit import (DegenerateDiscriminant, LabelAmbiguity, ParseError, Program, build_program,
                      closed_form_count, default_precision, export_dot, op_count, parse, serialize)
from .counts import count_table, verify_lemma1
from .ntheory import FermatContext, NotFermatPrime, NotPrimitiveRoot, build_dlog_table
from .numeric import BigComplex, DivisionByZero, eval_program
from .periods import PeriodId, reference_level, root_of_unity

# construct refuses anything bigger; p = 65537 is far beyond this
MAX_BUILD_OPS = 5_000_000


def default_tolerance(p: int) -> float:
    return 1e-12 if p <= 17 else 1e-30


@dataclass
class VerificationReport:
    p: int
    m: int
    g: int
    B: int
    op_count: int
    bound: int
    bound_ok: bool
    max_dev: float = math.inf
    max_dev_per_level: list[float] = field(default_factory=list)
    sum_residual_per_level: list[float] = field(default_factory=list)
    coverage_ok: bool = False
    ok: bool = False
    failed_check: str | None = None
    failed_node: int | None = None
    elapsed_ms: float = 0.0

    def to_json(self) -> str:
        d = asdict(self)
        # JSON has no infinity literal
        for key in ("max_dev",):
            if not math.isfinite(d[key]):
                d[key] = None
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "VerificationReport":
        d = json.loads(line)
        if d.get("max_dev") is None:
            d["max_dev"] = math.inf
        return cls(**d)

    def summary(self) -> str:
        status = "PASS" if self.ok else f"FAIL ({self.failed_check} at node {self.failed_node})"
        return (f"p={self.p} m={self.m} g={self.g} B={self.B} op_count={self.op_count} "
                f"bound={self.bound} bound_ok={str(self.bound_ok).lower()} max_dev={self.max_dev:.3g} "
                f"coverage_ok={str(self.coverage_ok).lower()} {status}")


class VerificationFailure(Exception):
    def __init__(self, check: str, node: int | None, report: VerificationReport):
        where = "" if node is None else f" at node {node}"
        super().__init__(f"verification failed: {check}{where}")
        self.check = check
        self.node = node
        self.report = report


def verify_program(program: Program, ctx: FermatContext | None = None, prec: int | None = None,
                   tol: float | None = None, strict: bool = True) -> VerificationReport:
    """Evaluate ``program`` and check it against reference periods and the 12 p**2 bound.

    With ``strict`` a failed check raises :class:`VerificationFailure`; otherwise the
    report comes back with ``ok=False``.
    """
    start = time.perf_counter()
    if ctx is None:
        ctx = program.ctx
    prec = prec or default_precision(ctx.p)
    tol = default_tolerance(ctx.p) if tol is None else tol
    n_ops = op_count(program)
    report = VerificationReport(ctx.p, ctx.m, ctx.g, prec, n_ops, 12 * ctx.p ** 2,
                                n_ops < 12 * ctx.p ** 2)
    failures: list[tuple[str, int | None]] = []

    def finish() -> VerificationReport:
        if not report.bound_ok:
            failures.append(("bound", None))
        report.ok = not failures
        if failures:
            report.failed_check, report.failed_node = failures[0]
        report.elapsed_ms = (time.perf_counter() - start) * 1e3
        if failures and strict:
            raise VerificationFailure(report.failed_check, report.failed_node, report)
        return report

    if (program.p, program.m, program.g) != (ctx.p, ctx.m, ctx.g):
        failures.append(("header", None))
        return finish()
    missing = program.missing_labels()
    if missing:
        failures.append((f"missing label {missing[0]}", None))
        return finish()
    try:
        trace = eval_program(program, prec)
    except DivisionByZero as e:
        failures.append(("division by zero", e.node))
        return finish()

    def val(node: int) -> complex:
        return complex(trace[node])

    for value, node in sorted(program.constants.items()):
        if abs(val(node) - value) > tol * max(1, value):
            failures.append((f"constant {value}", node))

    # (a) every label against its reference period
    devs = []
    for k in range(ctx.m + 1):
        table = reference_level(ctx, k, prec)
        worst = 0.0
        for r in range(1 << k):
            node = program.labels[PeriodId(k, r)]
            dev = abs(complex(trace[node] - table[r]))
            if not dev <= tol:
                failures.append((f"label T[{k},{r}]", node))
            worst = max(worst, dev)
        devs.append(worst)
    report.max_dev_per_level = devs
    report.max_dev = max(devs)

    # (b) top-level labels against eps**(g**r) computed directly
    top = [program.labels[PeriodId(ctx.m, r)] for r in range(1 << ctx.m)]
    for r, node in enumerate(top):
        dev = abs(complex(trace[node] - root_of_unity(ctx, ctx.gpow(r), prec)))
        if not dev <= tol:
            failures.append((f"root eps^{ctx.gpow(r)}", node))

    # (c) the top level covers every nontrivial p-th root of unity
    covered = set()
    for node in top:
        z = val(node)
        if not cmath.isfinite(z) or z == 0:
            continue
        j = round(cmath.phase(z) * ctx.p / (2 * math.pi)) % ctx.p
        if j and abs(complex(trace[node] - root_of_unity(ctx, j, prec))) <= tol:
            covered.add(j)
    report.coverage_ok = covered == set(range(1, ctx.p))
    if not report.coverage_ok:
        failures.append(("coverage", None))

    report.sum_residual_per_level = [
        max(abs(complex(trace[program.labels[PeriodId(k + 1, r)]]
                        + trace[program.labels[PeriodId(k + 1, (1 << k) + r)]]
                        - trace[program.labels[PeriodId(k, r)]]))
            for r in range(1 << k))
        for k in range(ctx.m)
    ]
    return finish()


class IdentityResidual(NamedTuple):
    r: int
    sum_residual: float
    product_residual: float


def check_identities(ctx: FermatContext, k: int, prec: int) -> list[IdentityResidual]:
    """Residuals of the split identities at level ``k``, from reference periods alone.

    sum:     T[k+1, r] + T[k+1, 2**k + r] = T[k, r]
    product: T[k+1, r] * T[k+1, 2**k + r] = Z + sum_s N[k, r - s] * T[k, s]
    with Z = 1 at the top level (pairs summing to 0 mod p) and 0 below it.
    """
    if not 0 <= k <= ctx.m - 1:
        raise ValueError(f"level k={k} outside 0..{ctx.m - 1}")
    lo = reference_level(ctx, k, prec)
    hi = reference_level(ctx, k + 1, prec)
    counts = count_table(ctx, build_dlog_table(ctx), k)
    half = 1 << k
    out = []
    for r in range(half):
        a, b = hi[r], hi[half + r]
        expected = BigComplex.from_int(1 if k == ctx.m - 1 else 0, prec)
        for s in range(half):
            expected = expected + BigComplex.from_int(counts[r - s], prec) * lo[s]
        out.append(IdentityResidual(r, abs(complex(a + b - lo[r])), abs(complex(a * b - expected))))
    return out


# -- command line --

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="ascii") as f:
        return f.read()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii", newline="\n") as f:
            f.write(text)


def _cmd_construct(args) -> int:
    ctx = FermatContext.from_prime(args.p, args.g)
    if closed_form_count(ctx.p) > MAX_BUILD_OPS:
        raise ValueError(f"p={ctx.p} needs {closed_form_count(ctx.p)} operations; "
                         f"too large to build (use `count`)")
    _write(args.out, serialize(build_program(ctx, args.precision_bits)))
    return 0


def _cmd_verify(args) -> int:
    program = parse(_read(args.input))
    try:
        report = verify_program(program, prec=args.precision_bits, tol=args.tol)
    except VerificationFailure as e:
        report = e.report
    print(report.summary())
    if args.report:
        _write(args.report, report.to_json() + "\n")
    else:
        print(report.to_json())
    return 0 if report.ok else 1


def _cmd_count(args) -> int:
    ctx = FermatContext.from_prime(args.p)
    n = closed_form_count(ctx.p)
    bound = 12 * ctx.p ** 2
    print(f"p={ctx.p} m={ctx.m} op_count={n} bound={bound} bound_ok={str(n < bound).lower()}")
    return 0 if n < bound else 1


def _cmd_counts(args) -> int:
    ctx = FermatContext.from_prime(args.p)
    if not 0 <= args.k <= ctx.m - 1:
        raise ValueError(f"k must be in 0..{ctx.m - 1}")
    table = count_table(ctx, build_dlog_table(ctx), args.k)
    print(f"p={ctx.p} g={ctx.g} k={args.k} N=" + " ".join(map(str, table.values)))
    ok = verify_lemma1(ctx, args.k)
    print(f"mod_2k_invariant={str(ok).lower()}")
    return 0 if ok else 1


def _cmd_periods(args) -> int:
    ctx = FermatContext.from_prime(args.p)
    prec = args.precision_bits or default_precision(ctx.p)
    digits = max(15, int(prec * math.log10(2)) - 3)
    table = reference_level(ctx, args.k, prec)
    for pid, z in sorted(table.values.items()):
        print(f"{pid} {z.re.to_decimal(digits)} {z.im.to_decimal(digits)}")
    return 0


def _cmd_export(args) -> int:
    _write(args.out, export_dot(parse(_read(args.input))))
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaussslp", description=(
        "Straight-line programs building the p-th roots of unity from 1 for Fermat primes p."))
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build and serialize the program")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--g", type=int, default=None, help="primitive root (default: smallest)")
    c.add_argument("--precision-bits", type=int, default=None)
    c.add_argument("--out", default=None)
    c.set_defaults(func=_cmd_construct)

    v = sub.add_parser("verify", help="evaluate and check a serialized program")
    v.add_argument("--in", dest="input", default="-")
    v.add_argument("--precision-bits", type=int, default=None)
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--report", default=None)
    v.set_defaults(func=_cmd_verify)

    n = sub.add_parser("count", help="closed-form operation count against 12 p^2")
    n.add_argument("--p", type=int, required=True)
    n.set_defaults(func=_cmd_count)

    t = sub.add_parser("counts", help="pair-count table for one level")
    t.add_argument("--p", type=int, required=True)
    t.add_argument("--k", type=int, required=True)
    t.set_defaults(func=_cmd_counts)

    r = sub.add_parser("periods", help="reference period values for one level")
    r.add_argument("--p", type=int, required=True)
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--precision-bits", type=int, default=None)
    r.set_defaults(func=_cmd_periods)

    e = sub.add_parser("export", help="render a program as GraphViz")
    e.add_argument("--in", dest="input", default="-")
    e.add_argument("--format", choices=["dot"], default="dot")
    e.add_argument("--out", default=None)
    e.set_defaults(func=_cmd_export)
    return parser


def cli_main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NotFermatPrime, NotPrimitiveRoot, ParseError, ValueError, OSError) as e:
        print(f"gaussslp: error: {e}", file=sys.stderr)
        return 2
    except (LabelAmbiguity, DegenerateDiscriminant) as e:
        print(f"gaussslp: construction failed: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())

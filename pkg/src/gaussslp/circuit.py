"""Straight-line programs that grow {1} into the p-th roots of unity.

A program is a list of instructions over ``ONE, ADD, SUB, MUL, DIV, SQRT``;
each instruction's operands are earlier node ids. Node 0 is the given
constant 1 and every other instruction counts as one operation.

The builder follows the period tower level by level. At level ``k`` it forms
the product ``T[k+1, r] * T[k+1, 2**k + r]`` as an integer combination of the
level-``k`` periods and splits ``T[k, r]`` into its two halves with the
quadratic formula.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple

from .counts import CountTable, count_table
from .ntheory import FermatContext, NotFermatPrime, NotPrimitiveRoot, build_dlog_table, validate_fermat_prime
from .numeric import BigComplex, apply_op
from .periods import PeriodId, PeriodTable, reference_level

FORMAT_VERSION = "SLPv1"
ARITY = {"ONE": 0, "ADD": 2, "SUB": 2, "MUL": 2, "DIV": 2, "SQRT": 1}
BINARY_OPS = ("ADD", "SUB", "MUL", "DIV")


class LabelAmbiguity(RuntimeError):
    pass


class DegenerateDiscriminant(RuntimeError):
    pass


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class Instruction(NamedTuple):
    op: str
    args: tuple[int, ...] = ()


@dataclass
class Program:
    p: int
    m: int
    g: int
    instructions: list[Instruction] = field(default_factory=lambda: [Instruction("ONE")])
    labels: dict[PeriodId, int] = field(default_factory=dict)
    constants: dict[int, int] = field(default_factory=lambda: {1: 0})
    version: str = FORMAT_VERSION

    @property
    def ctx(self) -> FermatContext:
        return FermatContext(self.p, self.m, self.g)

    def __len__(self) -> int:
        return len(self.instructions)

    def missing_labels(self) -> list[PeriodId]:
        return [PeriodId(k, r) for k in range(self.m + 1) for r in range(1 << k)
                if PeriodId(k, r) not in self.labels]


def op_count(program: Program) -> int:
    return len(program.instructions) - 1


@dataclass(frozen=True)
class OpBudget:
    p: int
    constants: int
    levels: tuple[int, ...]

    @property
    def total(self) -> int:
        return self.constants + sum(self.levels)

    @property
    def bound(self) -> int:
        return 12 * self.p * self.p

    def level_allowance(self, k: int) -> int:
        return 11 * 4 ** k


def level_cost(m: int, k: int) -> int:
    """Instructions emitted by ``build_level`` at level ``k``."""
    n = 1 << k
    if k == m - 1:
        return 8 * n
    return n * (2 * n - 1) + 8 * n


def op_budget(p: int) -> OpBudget:
    p, m = validate_fermat_prime(p)
    return OpBudget(p, p, tuple(level_cost(m, k) for k in range(m)))


def closed_form_count(p: int) -> int:
    return op_budget(p).total


class ProgramBuilder:
    """Append-only program under construction, evaluated as it grows.

    The running values are only used to name the two roots of each quadratic.
    """

    def __init__(self, ctx: FermatContext, prec: int):
        self.ctx = ctx
        self.prec = prec
        self.program = Program(ctx.p, ctx.m, ctx.g)
        self.values: list[BigComplex] = [BigComplex.from_int(1, prec)]

    def emit(self, op: str, *args: int) -> int:
        node = len(self.program.instructions)
        if len(args) != ARITY[op] or not all(0 <= a < node for a in args):
            raise ValueError(f"bad operands {args} for {op} at node {node}")
        self.program.instructions.append(Instruction(op, args))
        self.values.append(apply_op(op, [self.values[a] for a in args], self.prec, node))
        return node


def emit_constants(builder: ProgramBuilder, p: int) -> dict[int, int]:
    """Nodes for 0 = 1 - 1 and 2, 3, ..., p by repeated +1."""
    consts = builder.program.constants
    one = consts[1]
    consts[0] = builder.emit("SUB", one, one)
    prev = one
    for n in range(2, p + 1):
        prev = consts[n] = builder.emit("ADD", prev, one)
    return consts


def _split(builder: ProgramBuilder, s: int, prod: int, short: bool) -> tuple[int, int]:
    """Nodes for (s + sqrt(D))/2 and (s - sqrt(D))/2 with D = s*s - 4*prod.

    ``short`` takes the second root as ``s - x1``, one instruction fewer.
    """
    consts = builder.program.constants
    two = consts[2]
    sq = builder.emit("MUL", s, s)
    if 4 in consts:
        four_p = builder.emit("MUL", consts[4], prod)
    else:
        # p = 3: no constant 4, but the only product there is the constant 1
        if prod != consts[1]:
            raise ValueError("constant 4 missing for a non-unit product")
        four_p = builder.emit("MUL", two, two)
    disc = builder.emit("SUB", sq, four_p)
    d = complex(builder.values[disc])
    scale = max(1.0, abs(complex(builder.values[s])) ** 2)
    if abs(d) < 2.0 ** (32 - builder.prec) * scale:
        raise DegenerateDiscriminant(f"discriminant {d} vanishes at node {disc}")
    root = builder.emit("SQRT", disc)
    plus = builder.emit("ADD", s, root)
    if short:
        x1 = builder.emit("DIV", plus, two)
        x2 = builder.emit("SUB", s, x1)
    else:
        minus = builder.emit("SUB", s, root)
        x1 = builder.emit("DIV", plus, two)
        x2 = builder.emit("DIV", minus, two)
    return x1, x2


def _assign(builder: ProgramBuilder, nodes: tuple[int, int], targets: tuple[PeriodId, PeriodId],
            reference: PeriodTable, tol: float) -> None:
    x1, x2 = (complex(builder.values[n]) for n in nodes)
    a, b = (complex(reference.values[t]) for t in targets)
    if abs(x1 - x2) < 2 * tol:
        raise LabelAmbiguity(f"roots at nodes {nodes} are closer than {2 * tol:.3g}")
    direct = max(abs(x1 - a), abs(x2 - b))
    swapped = max(abs(x1 - b), abs(x2 - a))
    if swapped < direct:
        nodes = nodes[::-1]
    if min(direct, swapped) > tol:
        raise LabelAmbiguity(f"roots at nodes {nodes} match neither {targets[0]} nor {targets[1]}")
    labels = builder.program.labels
    labels[targets[0]], labels[targets[1]] = nodes


def build_level(builder: ProgramBuilder, k: int, counts: CountTable | None,
                reference: PeriodTable) -> dict[PeriodId, int]:
    """Split every level-``k`` period into its two level-``k+1`` halves.

    ``counts`` is the table for level ``k`` (unused at the top level, where each
    product is 1); ``reference`` holds the level-``k+1`` values used for naming.
    Returns the new labels.
    """
    ctx = builder.ctx
    labels = builder.program.labels
    consts = builder.program.constants
    half = 1 << k
    top = k == ctx.m - 1
    if reference.k != k + 1:
        raise ValueError(f"reference table is for level {reference.k}, expected {k + 1}")
    if k == 0:
        # -1 is not in the constant pool; the short split below pays for it
        labels[PeriodId(0, 0)] = builder.emit("SUB", consts[0], consts[1])
    missing = [r for r in range(half) if PeriodId(k, r) not in labels]
    if missing:
        raise ValueError(f"level {k} periods {missing} are not constructed")
    tol = reference.min_gap() / 4
    for r in range(half):
        s = labels[PeriodId(k, r)]
        if top:
            prod = consts[1]
        else:
            terms = [builder.emit("MUL", consts[counts[r - j]], labels[PeriodId(k, j)])
                     for j in range(half)]
            prod = terms[0]
            for t in terms[1:]:
                prod = builder.emit("ADD", prod, t)
        roots = _split(builder, s, prod, short=k == 0)
        _assign(builder, roots, (PeriodId(k + 1, r), PeriodId(k + 1, half + r)), reference, tol)
    return {pid: n for pid, n in labels.items() if pid.k == k + 1}


def default_precision(p: int) -> int:
    return 64 if p <= 17 else 192


def build_program(ctx: FermatContext, prec: int | None = None) -> Program:
    prec = prec or default_precision(ctx.p)
    builder = ProgramBuilder(ctx, prec)
    emit_constants(builder, ctx.p)
    dlog = build_dlog_table(ctx) if ctx.m > 1 else None
    for k in range(ctx.m):
        counts = count_table(ctx, dlog, k) if k < ctx.m - 1 else None
        build_level(builder, k, counts, reference_level(ctx, k + 1, prec))
    return builder.program


# -- text format --

def serialize(program: Program) -> str:
    lines = [f"{program.version} p={program.p} m={program.m} g={program.g}"]
    for node, ins in enumerate(program.instructions):
        lines.append(" ".join([str(node), ins.op, *map(str, ins.args)]))
    for value, node in sorted(program.constants.items()):
        lines.append(f"CONST {node} {value}")
    for pid, node in sorted(program.labels.items()):
        lines.append(f"LABEL {node} T {pid.k} {pid.r}")
    return "\n".join(lines) + "\n"


_HEADER = re.compile(r"SLPv1 p=(\d+) m=(\d+) g=(\d+)")
_INT = re.compile(r"\d+")


def parse(text: str) -> Program:
    if not text.isascii():
        raise ParseError(0, "non-ASCII input")
    program = None
    in_labels = False
    for lineno, raw in enumerate(text.split("\n"), 1):
        line = raw.split("#", 1)[0].rstrip("\r").strip()
        if not line:
            continue
        if program is None:
            hm = _HEADER.fullmatch(line)
            if not hm:
                raise ParseError(lineno, f"bad header {line!r}")
            p, m, g = map(int, hm.groups())
            try:
                FermatContext(p, m, g)
            except (NotFermatPrime, NotPrimitiveRoot) as e:
                raise ParseError(lineno, str(e)) from None
            program = Program(p, m, g, instructions=[], constants={})
            continue
        tok = line.split()
        numeric = tok[2:] if tok[0] not in ("CONST", "LABEL") else [t for t in tok[1:] if t != "T"]
        if not all(_INT.fullmatch(t) for t in numeric):
            raise ParseError(lineno, f"malformed line {line!r}")
        n_nodes = len(program.instructions)
        if tok[0] == "CONST":
            in_labels = True
            if len(tok) != 3:
                raise ParseError(lineno, "expected CONST <id> <value>")
            node, value = int(tok[1]), int(tok[2])
            if node >= n_nodes:
                raise ParseError(lineno, f"dangling node reference {node}")
            if value in program.constants:
                raise ParseError(lineno, f"duplicate constant {value}")
            program.constants[value] = node
        elif tok[0] == "LABEL":
            in_labels = True
            if len(tok) != 5 or tok[2] != "T":
                raise ParseError(lineno, "expected LABEL <id> T <k> <r>")
            node, pid = int(tok[1]), PeriodId(int(tok[3]), int(tok[4]))
            if node >= n_nodes:
                raise ParseError(lineno, f"dangling node reference {node}")
            if not (pid.k <= program.m and pid.r < (1 << pid.k)):
                raise ParseError(lineno, f"period {pid} out of range")
            if pid in program.labels:
                raise ParseError(lineno, f"duplicate label {pid}")
            program.labels[pid] = node
        else:
            if in_labels:
                raise ParseError(lineno, "instruction after label section")
            if len(tok) < 2 or not _INT.fullmatch(tok[0]) or tok[1] not in ARITY:
                raise ParseError(lineno, f"malformed instruction {line!r}")
            node, op, args = int(tok[0]), tok[1], tuple(map(int, tok[2:]))
            if node != n_nodes:
                raise ParseError(lineno, f"expected node id {n_nodes}, got {node}")
            if len(args) != ARITY[op]:
                raise ParseError(lineno, f"{op} takes {ARITY[op]} operands")
            if (op == "ONE") != (node == 0):
                raise ParseError(lineno, "ONE must be exactly node 0")
            for a in args:
                if a >= node:
                    raise ParseError(lineno, f"operand {a} is not an earlier node")
            program.instructions.append(Instruction(op, args))
    if program is None:
        raise ParseError(0, "empty input")
    if not program.instructions:
        raise ParseError(0, "no instructions")
    return program


def export_dot(program: Program) -> str:
    """GraphViz digraph; edges run from each instruction to its operands."""
    names: dict[int, list[str]] = {}
    for pid, node in sorted(program.labels.items()):
        names.setdefault(node, []).append(str(pid))
    for value, node in sorted(program.constants.items()):
        names.setdefault(node, []).append(f"={value}")
    out = [f'digraph slp_p{program.p} {{', "  rankdir=BT;"]
    for node, ins in enumerate(program.instructions):
        label = f"{node}: {ins.op}"
        if node in names:
            label += "\\n" + " ".join(names[node])
        out.append(f'  n{node} [label="{label}"];')
    for node, ins in enumerate(program.instructions):
        for a in ins.args:
            out.append(f"  n{node} -> n{a};")
    out.append("}")
    return "\n".join(out) + "\n"

"""Straight-line programs for the p-th roots of unity, Fermat primes p."""
from .app import VerificationFailure, VerificationReport, check_identities, cli_main, verify_program
from .circuit import (Instruction, OpBudget, Program, build_level, build_program, closed_form_count,
                      emit_constants, export_dot, op_budget, op_count, parse, serialize)
from .counts import CountTable, count_bruteforce, count_table, verify_lemma1
from .ntheory import (DlogTable, FermatContext, NotFermatPrime, build_dlog_table, find_primitive_root,
                      pow_mod, validate_fermat_prime)
from .numeric import BigComplex, BigFloat, EvalTrace, complex_sqrt, eval_program, sin_cos
from .periods import PeriodId, PeriodTable, reference_level, reference_period, root_of_unity

__version__ = "0.1.0"

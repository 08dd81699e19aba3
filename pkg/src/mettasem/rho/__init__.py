"""Rho-calculus processes, their reducer, and the compiler from machine states."""
from .compile import compile_config, compile_eval, compile_meaning, compile_meaning_rb, free_channels
from .harness import CorrectnessReport, TransliterationError, check_correctness, rho_barbs, rho_ledger
from .process import (
    ZERO,
    Bind,
    Dispatcher,
    Drop,
    Entry,
    Exact,
    Expr,
    GroundLeaf,
    IfPositive,
    Input,
    LedgerEntry,
    Like,
    NameVar,
    New,
    Output,
    Par,
    Proc,
    Quote,
    StateLeaf,
    new,
    par,
    pretty,
)
from .reduce import normalize, rho_step, rho_steps

__all__ = [
    "ZERO", "Bind", "CorrectnessReport", "Dispatcher", "Drop", "Entry", "Exact", "Expr", "GroundLeaf",
    "IfPositive", "Input", "LedgerEntry", "Like", "NameVar", "New", "Output", "Par", "Proc", "Quote",
    "StateLeaf", "TransliterationError", "check_correctness", "compile_config", "compile_eval",
    "compile_meaning", "compile_meaning_rb", "free_channels", "new", "normalize", "par", "pretty",
    "rho_barbs", "rho_ledger", "rho_step", "rho_steps",
]

"""The cost-free small-step engine over four-register states."""
from __future__ import annotations

import enum
import json
import logging
import random as _random
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .contexts import HOLE, Context, decompositions, plug
from .states import State
from .terms import (
    ADD_ATOM,
    INT_MAX,
    INT_MIN,
    PLUS,
    REM_ATOM,
    TIMES,
    TRANSFORM,
    UINT_MAX,
    UNIT_LIST,
    Bool,
    Float,
    Int,
    Str,
    Term,
    UInt,
    head_is,
    mdistinct,
    mremove,
    munion,
)
from .unify import apply, equation_parts, freshen, insensitive, max_fresh_index, unify

log = logging.getLogger(__name__)

MAX_DIRECTIVE_DEPTH = 8


class Rule(enum.Enum):
    QUERY = "Query"
    CHAIN = "Chain"
    TRANSFORM = "Transform"
    ADD_ATOM1 = "AddAtom1"
    ADD_ATOM2 = "AddAtom2"
    REM_ATOM1 = "RemAtom1"
    REM_ATOM2 = "RemAtom2"
    OUTPUT = "Output"
    BOOL_ADD1 = "BoolAdd1"
    BOOL_ADD2 = "BoolAdd2"
    BOOL_MULT1 = "BoolMult1"
    BOOL_MULT2 = "BoolMult2"
    NUM_ADD1 = "NumAdd1"
    NUM_ADD2 = "NumAdd2"
    NUM_MULT1 = "NumMult1"
    NUM_MULT2 = "NumMult2"
    STR_ADD1 = "StrAdd1"
    STR_ADD2 = "StrAdd2"

    def __str__(self):
        return self.value


BUILTIN_RULES = tuple(r for r in Rule if r.value[-1] in "12" and not r.value.startswith(("Add", "Rem")))

# Enumeration order: label order, except Output goes last so that any rule
# still able to reduce a workspace term is preferred by the deterministic policy.
ENUMERATION_ORDER = tuple(r for r in Rule if r is not Rule.OUTPUT) + (Rule.OUTPUT,)
_RANK = {r: n for n, r in enumerate(ENUMERATION_ORDER)}


class DirectiveDepthError(RuntimeError):
    """More than MAX_DIRECTIVE_DEPTH resident directives compose in one step."""


@dataclass(frozen=True)
class Transition:
    label: Rule
    register: str
    host: Term
    context: Context
    subterm: Term
    substitutions: tuple
    next: State
    consumed: tuple = ()  # ((register, term), ...)
    produced: tuple = ()
    matched: tuple = ()  # knowledge-base items the rule read
    inner: Optional["Transition"] = None
    rewrites: tuple = ()  # the u·sigma results before plugging
    groups: tuple = ()  # how many produced items each matched item accounts for

    def record(self, n: int) -> dict:
        return trace_record(n, self)

    @property
    def key(self) -> tuple:
        return (
            _RANK[self.label],
            self.register,
            self.host.key,
            self.context.key,
            self.subterm.key,
            None if self.inner is None else self.inner.key,
        )

    @property
    def redex(self) -> tuple:
        return (self.register, self.host, self.context, self.subterm)


def apply_transition(s: State, tr: Transition) -> State:
    """Replay ``tr`` on ``s`` from its consumed/produced lists."""
    regs = {r: s.reg(r) for r in "ikwo"}
    for r, t in tr.consumed:
        rest = mremove(regs[r], t)
        if rest is None:
            raise ValueError(f"{t!r} not present in register {r}")
        regs[r] = rest
    for r, t in tr.produced:
        regs[r] = munion(regs[r], (t,))
    return State(**regs)


def _build(s: State, label, register, host, ctx, sub, sigmas, consumed, produced, matched=(), inner=None,
           rewrites=(), groups=()):
    args = (tuple(consumed), tuple(produced), tuple(matched), inner, tuple(rewrites), tuple(groups))
    tmp = Transition(label, register, host, ctx, sub, tuple(sigmas), s, *args)
    return Transition(label, register, host, ctx, sub, tuple(sigmas), apply_transition(s, tmp), *args)


# -- builtins


class BuiltinOverflow(ArithmeticError):
    pass


_RESULT_TYPES = {Bool: "Bool", Int: "Num", UInt: "Num", Float: "Num", Str: "Str"}


def eval_builtin(t: Term):
    """``(base_label, result)`` for an evaluable ``(+ a b)`` / ``(* a b)``, else None.

    Raises BuiltinOverflow for an out-of-range integer result.
    """
    if not (head_is(t, PLUS, 3) or head_is(t, TIMES, 3)):
        return None
    op, a, b = t.items
    if type(a) is not type(b) or type(a) not in _RESULT_TYPES:
        return None
    plus = op == PLUS
    kind = type(a)
    if kind is Bool:
        return ("BoolAdd", Bool(a.value or b.value)) if plus else ("BoolMult", Bool(a.value and b.value))
    if kind is Str:
        return ("StrAdd", Str(a.value + b.value)) if plus else None
    v = a.value + b.value if plus else a.value * b.value
    base = "NumAdd" if plus else "NumMult"
    if kind is Int and not INT_MIN <= v <= INT_MAX:
        raise BuiltinOverflow(f"signed 64-bit overflow in {base}")
    if kind is UInt and not 0 <= v <= UINT_MAX:
        raise BuiltinOverflow(f"unsigned 64-bit overflow in {base}")
    return base, kind(v)


def _builtin(t: Term):
    try:
        return eval_builtin(t)
    except BuiltinOverflow as exc:
        log.debug("stuck redex %r: %s", t, exc)
        return None


def stuck_redexes(s: State) -> list:
    """Builtin redexes blocked by overflow, as ``(register, term, reason)``."""
    out = []
    for r in ("i", "w"):
        for t in mdistinct(s.reg(r)):
            try:
                eval_builtin(t)
            except BuiltinOverflow as exc:
                out.append((r, t, str(exc)))
    return out


# -- enumeration


def fresh_kb(s: State) -> tuple:
    """The knowledge base with every variable renamed apart from the state."""
    n = max_fresh_index(s.terms()) + 1
    return tuple(freshen(e, n) for e in s.k)


def _rewrite_hosts(s: State, register: str, label: Rule, kb: tuple) -> Iterator[Transition]:
    for host in mdistinct(s.reg(register)):
        seen = set()
        for ctx, sub in decompositions(host):
            if (ctx.key, sub.key) in seen:
                continue
            seen.add((ctx.key, sub.key))
            matches = []
            matched = []
            for original, e in zip(s.k, kb):
                parts = equation_parts(e)
                if parts is None:
                    continue
                sigma = unify(sub, parts[0])
                if sigma is not None:
                    matches.append((sigma, parts[1]))
                    matched.append(original)
            if not matches:
                continue
            rewrites = [apply(sig, rhs) for sig, rhs in matches]
            produced = [("w", plug(ctx, r)) for r in rewrites]
            yield _build(s, label, register, host, ctx, sub, [m[0] for m in matches],
                         [(register, host)], produced, matched, rewrites=rewrites, groups=(1,) * len(matched))


def _transforms(s: State, kb: tuple) -> Iterator[Transition]:
    for host in mdistinct(s.i):
        if not head_is(host, TRANSFORM, 3):
            continue
        _, pattern, template = host.items
        sigmas, produced, matched, rewrites, groups = [], [], [], [], []
        for original, atom in zip(s.k, kb):
            hits = 0
            for ctx, sub in decompositions(atom):
                sigma = unify(pattern, sub)
                if sigma is not None:
                    sigmas.append(sigma)
                    rewrites.append(apply(sigma, template))
                    produced.append(("w", plug(ctx, rewrites[-1])))
                    hits += 1
            if hits:
                matched.append(original)
                groups.append(hits)
        yield _build(s, Rule.TRANSFORM, "i", host, HOLE, host, sigmas, [("i", host)], produced, matched,
                     rewrites=rewrites, groups=groups)


def _directives_in_input(s: State) -> Iterator[Transition]:
    for host in mdistinct(s.i):
        if head_is(host, ADD_ATOM, 2):
            t = host.items[1]
            yield _build(s, Rule.ADD_ATOM1, "i", host, HOLE, host, (), [("i", host)], [("k", t), ("o", UNIT_LIST)])
        elif head_is(host, REM_ATOM, 2):
            t = host.items[1]
            if t in s.k:
                yield _build(s, Rule.REM_ATOM1, "i", host, HOLE, host, (),
                             [("i", host), ("k", t)], [("o", UNIT_LIST)], (t,))


def _resident_directives(s: State, depth: int) -> Iterator[Transition]:
    for d in mdistinct(s.k):
        if head_is(d, ADD_ATOM, 2):
            label, removed = Rule.ADD_ATOM2, (d,)
        elif head_is(d, REM_ATOM, 2):
            label, removed = Rule.REM_ATOM2, (d, d.items[1])
        else:
            continue
        k1 = s.k
        for x in removed:
            k1 = mremove(k1, x)
            if k1 is None:
                break
        if k1 is None:
            continue
        if depth >= MAX_DIRECTIVE_DEPTH:
            raise DirectiveDepthError(f"more than {MAX_DIRECTIVE_DEPTH} nested directives")
        t = d.items[1]
        for inner in _enabled(s.replace(k=k1), depth + 1):
            if label is Rule.ADD_ATOM2:
                consumed = inner.consumed
                produced = inner.produced + (("k", t), ("o", UNIT_LIST))
            else:
                consumed = inner.consumed + (("k", t),)
                produced = inner.produced + (("o", UNIT_LIST),)
            yield _build(s, label, "k", d, HOLE, d, inner.substitutions, consumed, produced, removed, inner)


def _outputs(s: State) -> Iterator[Transition]:
    for u in mdistinct(s.w):
        if insensitive(u, s.k):
            yield _build(s, Rule.OUTPUT, "w", u, HOLE, u, (), [("w", u)], [("o", u)])


def _builtins(s: State) -> Iterator[Transition]:
    for register, suffix in (("i", "1"), ("w", "2")):
        for host in mdistinct(s.reg(register)):
            r = _builtin(host)
            if r is not None:
                label = Rule(r[0] + suffix)
                yield _build(s, label, register, host, HOLE, host, (), [(register, host)], [("o", r[1])])


def _enabled(s: State, depth: int, composites: bool = True) -> list:
    kb = fresh_kb(s)
    found = []
    found.extend(_rewrite_hosts(s, "i", Rule.QUERY, kb))
    found.extend(_rewrite_hosts(s, "w", Rule.CHAIN, kb))
    found.extend(_transforms(s, kb))
    found.extend(_directives_in_input(s))
    if composites:
        found.extend(_resident_directives(s, depth))
    found.extend(_outputs(s))
    found.extend(_builtins(s))
    out, seen = [], set()
    for tr in sorted(found, key=lambda tr: (_RANK[tr.label],)):
        k = tr.key
        if k not in seen:
            seen.add(k)
            out.append(tr)
    return out


def enabled(s: State) -> list:
    """Every enabled rule instance at ``s`` in deterministic order."""
    return _enabled(s, 0)


# -- scheduling


class Deterministic:
    name = "det"

    def choose(self, options: Sequence):
        return options[0]


class Random:
    name = "rand"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = _random.Random(seed)

    def choose(self, options: Sequence):
        return options[self.rng.randrange(len(options))]


DETERMINISTIC = Deterministic()


def step(s: State, policy=DETERMINISTIC) -> Optional[Transition]:
    """One transition chosen by ``policy``, or None when ``s`` is quiescent."""
    options = enabled(s)
    if not options:
        return None
    return policy.choose(options)


QUIESCENT = "quiescent"
FUEL_EXHAUSTED = "fuel-exhausted"
STARVED = "starved"


@dataclass(frozen=True)
class Run:
    trace: tuple
    final: object
    verdict: str
    initial: object = None


def run(s: State, policy=DETERMINISTIC, fuel: int = 1000) -> Run:
    if fuel < 0:
        raise ValueError("fuel must be nonnegative")
    trace = []
    cur = s
    while True:
        options = enabled(cur)
        if not options:
            return Run(tuple(trace), cur, QUIESCENT, s)
        if len(trace) >= fuel:
            return Run(tuple(trace), cur, FUEL_EXHAUSTED, s)
        tr = policy.choose(options)
        trace.append(tr)
        cur = tr.next


def replay(s: State, trace: Iterable[Transition]) -> State:
    for tr in trace:
        s = apply_transition(s, tr)
    return s


# -- trace format


def trace_record(n: int, tr: Transition) -> dict:
    from .syntax import print_state, print_term

    return {
        "step": n,
        "rule": tr.label.value,
        "register": tr.register,
        "host": print_term(tr.host),
        "context": str(tr.context),
        "substitution": [{f"${v}": print_term(t) for v, t in sig.items()} for sig in tr.substitutions],
        "next": print_state(tr.next),
    }


def trace_lines(trace: Iterable) -> Iterator[str]:
    """One JSON object per step; works for plain and costed transitions."""
    for n, tr in enumerate(trace):
        yield json.dumps(tr.record(n), ensure_ascii=False)

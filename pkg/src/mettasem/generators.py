"""Seeded random generators for property tests and differential campaigns.

Every generator takes a ``random.Random`` so that runs are reproducible.
"""
from __future__ import annotations

import random
import string
from typing import Optional, Sequence

from .bisim import LTS
from .states import RState, State
from .terms import (
    ADD_ATOM,
    EQ,
    PLUS,
    REM_ATOM,
    TIMES,
    TRANSFORM,
    UNIT_BAG,
    UNIT_LIST,
    WILDCARD,
    AtomSource,
    Bag,
    BagComp,
    Bind,
    Bool,
    Builtin,
    BuiltinSym,
    Float,
    Int,
    List,
    ListComp,
    Quote,
    Receipt,
    ReceiptKind,
    Remainder,
    SourceMode,
    Str,
    Sym,
    Term,
    UInt,
    Uri,
    Var,
)

SYMBOLS = ("a", "b", "c", "f", "g", "h", "foo", "bar-baz", "x1", "α")
VARIABLES = ("x", "y", "z", "x#1", "long_name")
_TEXT = string.ascii_letters + string.digits + " \"\\`\n\t\r\0{}()$_|&;λ\x01"


def _text(rng: random.Random, n: int = 6) -> str:
    return "".join(rng.choice(_TEXT) for _ in range(rng.randint(0, n)))


def gen_ground(rng: random.Random) -> Term:
    kind = rng.randrange(7)
    if kind == 0:
        return Bool(rng.random() < 0.5)
    if kind == 1:
        return Int(rng.choice([0, 1, -1, 42, 2**63 - 1, -(2**63), rng.randint(-1000, 1000)]))
    if kind == 2:
        return UInt(rng.choice([0, 7, 2**64 - 1, rng.randint(0, 10**6)]))
    if kind == 3:
        return Float(rng.choice([0.0, -0.0, 1.5, -2.25e10, 1e-300, float("inf"), float("-inf"), float("nan"), rng.uniform(-1e6, 1e6)]))
    if kind == 4:
        return Str(_text(rng))
    if kind == 5:
        return Uri(_text(rng))
    return Sym(rng.choice(SYMBOLS))


def gen_atom(rng: random.Random, variables: bool = True) -> Term:
    r = rng.random()
    if variables and r < 0.2:
        return Var(rng.choice(VARIABLES))
    if variables and r < 0.25:
        return WILDCARD
    if r < 0.35:
        return Builtin(rng.choice(list(BuiltinSym)))
    if r < 0.4:
        return rng.choice((UNIT_LIST, UNIT_BAG))
    return gen_ground(rng)


def gen_term(
    rng: random.Random,
    max_depth: int = 3,
    max_width: int = 3,
    variables: bool = True,
    comprehensions: bool = False,
) -> Term:
    """A random term of every syntactic kind up to the given depth."""
    if max_depth <= 0 or rng.random() < 0.3:
        return gen_atom(rng, variables)
    if comprehensions and rng.random() < 0.08:
        return gen_comprehension(rng, max_depth - 1)
    items = [gen_term(rng, max_depth - 1, max_width, variables, comprehensions) for _ in range(rng.randint(1, max_width))]
    return List(items) if rng.random() < 0.6 else Bag(items)


def _name(rng, depth):
    r = rng.random()
    if r < 0.4:
        return Var(rng.choice(VARIABLES))
    if r < 0.6:
        return WILDCARD
    return Quote(gen_term(rng, depth, 2, comprehensions=False))


def gen_comprehension(rng: random.Random, depth: int = 1) -> Term:
    receipts = []
    for _ in range(rng.randint(1, 2)):
        kind = rng.choice(list(ReceiptKind))
        binds = []
        for _ in range(rng.randint(1, 2)):
            names = tuple(_name(rng, depth) for _ in range(rng.randint(0, 2)))
            rem = None
            if not names or rng.random() < 0.3:
                rem = Remainder(rng.choice((Var("rest"), WILDCARD)), rng.random() < 0.5)
            if kind is ReceiptKind.LINEAR:
                mode = rng.choice(list(SourceMode))
                args = tuple(gen_term(rng, depth, 2) for _ in range(rng.randint(0, 2))) if mode is SourceMode.SEND else ()
                src = AtomSource(rng.choice((Sym("chan"), Quote(Sym("q")), Str("s"))), mode, args)
            else:
                src = rng.choice((Sym("chan"), Quote(gen_term(rng, depth, 2)), Uri("u")))
            binds.append(Bind(names, rem, src))
        receipts.append(Receipt(kind, tuple(binds)))
    head = gen_term(rng, depth, 2)
    body = [gen_term(rng, depth, 2) for _ in range(rng.randint(0, 2))]
    cls = ListComp if rng.random() < 0.5 else BagComp
    return cls(head, receipts, body)


def gen_small_term(rng: random.Random, max_size: int, atoms: Sequence[Term], bags: bool = True) -> Term:
    """A term of at most ``max_size`` nodes over ``atoms``."""
    if max_size <= 1 or rng.random() < 0.35:
        return rng.choice(atoms)
    budget = max_size - 1
    items = []
    while budget > 0 and (not items or rng.random() < 0.6):
        part = rng.randint(1, budget)
        items.append(gen_small_term(rng, part, atoms, bags))
        budget -= _size(items[-1])
    return Bag(items) if bags and rng.random() < 0.3 else List(items)


def _size(t: Term) -> int:
    if isinstance(t, (List, Bag)):
        return 1 + sum(_size(u) for u in t.items)
    return 1


# -- machine states


def _machine_term(rng: random.Random) -> Term:
    a = lambda: Sym(rng.choice("abc"))  # noqa: E731
    kind = rng.randrange(9)
    if kind == 0:
        return List([Sym(rng.choice("fgh")), gen_term(rng, 2, 2, variables=False)])
    if kind == 1:
        arg = Var("x") if rng.random() < 0.7 else a()
        return List([EQ, List([Sym(rng.choice("fg")), arg]), List([Sym("h"), arg, a()])])
    if kind == 2:
        return List([rng.choice((PLUS, TIMES)), Int(rng.randint(-5, 5)), Int(rng.randint(-5, 5))])
    if kind == 3:
        return List([PLUS, Bool(rng.random() < 0.5), Bool(rng.random() < 0.5)])
    if kind == 4:
        return List([PLUS, Str(rng.choice("xy")), Str(rng.choice("zw"))])
    if kind == 5:
        return List([rng.choice((ADD_ATOM, REM_ATOM)), a()])
    if kind == 6:
        return List([TRANSFORM, List([Sym("f"), Var("y")]), List([Sym("g"), Var("y")])])
    if kind == 7:
        return List([Sym(rng.choice("fg")), a()])
    return a()


def gen_state(rng: random.Random, max_items: int = 3) -> State:
    regs = [[_machine_term(rng) for _ in range(rng.randint(0, max_items))] for _ in range(4)]
    return State(*regs)


def permuted(s, rng: random.Random):
    """The same state presented with every register (and every nested bag) shuffled."""
    def shuffle_term(t):
        if isinstance(t, List):
            return List(shuffle_term(u) for u in t.items)
        if isinstance(t, Bag):
            items = [shuffle_term(u) for u in t.items]
            rng.shuffle(items)
            return Bag(items)
        return t

    regs = []
    for r in ("i", "k", "w", "o"):
        items = list(s.reg(r))
        rng.shuffle(items)
        if isinstance(s, State):
            items = [shuffle_term(t) for t in items]
        regs.append(items)
    if isinstance(s, RState):
        eos = list(s.eos)
        rng.shuffle(eos)
        return RState(*regs, eos=eos)
    return State(*regs)


# -- the terminating corpus

HEADS = ("f0", "f1", "f2", "f3")
CONSTANTS = ("a", "b", "c")


def _corpus_ground(rng, depth, lo=0) -> Term:
    if depth <= 0 or rng.random() < 0.35:
        return Sym(rng.choice(CONSTANTS))
    head = Sym(rng.choice(HEADS[lo:]))
    return List([head] + [_corpus_ground(rng, depth - 1, lo) for _ in range(rng.randint(1, 2))])


def _corpus_rhs(rng, depth, level, lhs_vars) -> Term:
    leaves = [Sym(c) for c in CONSTANTS] + [Var(v) for v in lhs_vars] * 2
    if depth <= 0 or level >= len(HEADS) - 1 or rng.random() < 0.35:
        return rng.choice(leaves)
    head = Sym(rng.choice(HEADS[level + 1:]))
    hi = HEADS.index(head.value)
    args = [_corpus_rhs(rng, depth - 1, hi, lhs_vars) for _ in range(rng.randint(1, 2))]
    return List([head] + args)


def terminating_equation(rng: random.Random) -> Term:
    """``(= (f_i p...) u)`` where every head in ``u`` has index above ``i`` and ``u`` uses only the left-hand variables.

    f_i ranks above f_j for i < j, and above every constant, so each rewrite
    strictly decreases a recursive path order and the system terminates.
    """
    level = rng.randrange(len(HEADS) - 1)
    args, names = [], []
    for n in range(rng.randint(1, 2)):
        if rng.random() < 0.7:
            names.append(("x", "y")[n])
            args.append(Var(names[-1]))
        else:
            args.append(Sym(rng.choice(CONSTANTS)))
    lhs = List([Sym(HEADS[level])] + args)
    return List([EQ, lhs, _corpus_rhs(rng, 2, level, names)])


def terminating_state(rng: random.Random, max_equations: int = 3, max_inputs: int = 2) -> State:
    """A small state of the terminating corpus: ground inputs up to depth 3, at most ``max_equations`` equations."""
    k = [terminating_equation(rng) for _ in range(rng.randint(1, max_equations))]
    extras = [Sym(rng.choice(CONSTANTS))] if rng.random() < 0.3 else []
    i = []
    for _ in range(rng.randint(1, max_inputs)):
        r = rng.random()
        if r < 0.1:
            i.append(List([PLUS, Int(rng.randint(0, 9)), Int(rng.randint(0, 9))]))
        elif r < 0.15:
            i.append(List([ADD_ATOM, Sym(rng.choice(CONSTANTS))]))
        elif r < 0.2 and extras:
            i.append(List([REM_ATOM, extras[0]]))
        else:
            i.append(_corpus_ground(rng, 3))
    return State(i, k + extras, (), ())


# -- resource-bounded states

KEYS = (b"alice", b"bob", b"carol")


def fund(s: State, rng: random.Random, signer, keys: Sequence[bytes] = KEYS[:2],
         balance: tuple = (0, 40), inline: float = 0.3, unsigned: float = 0.0) -> RState:
    """Sign every item of ``s`` with a random key and give each key a random balance."""
    def sign(t):
        if rng.random() < unsigned:
            return t
        eo = rng.randint(0, 5) if rng.random() < inline else None
        return signer.sign(rng.choice(keys), t, eo)

    regs = [[sign(t) for t in s.reg(r)] for r in ("i", "k", "w", "o")]
    eos = {signer.add(p): rng.randint(*balance) for p in keys}
    return RState(*regs, eos=eos)


# -- labelled transition systems


def gen_lts(rng: random.Random, n: int, barbs: Sequence = ("p", "q"), edge_p: Optional[float] = None,
            barb_p: float = 0.25) -> LTS:
    edge_p = edge_p if edge_p is not None else min(1.0, 1.5 / max(n, 1))
    edges = tuple(
        (a, "tau", b) for a in range(n) for b in range(n) if rng.random() < edge_p
    )
    labels = tuple(frozenset(x for x in barbs if rng.random() < barb_p) for _ in range(n))
    return LTS(0, tuple(range(n)), edges, labels, False)


def stutter(lts: LTS, rng: random.Random, extra: int = 3) -> LTS:
    """A weakly bisimilar copy: nodes renumbered and some edges routed through a fresh intermediate node."""
    n = len(lts.nodes)
    perm = list(range(1, n))
    rng.shuffle(perm)
    perm = [0] + perm
    barbs = [None] * n
    for j in range(n):
        barbs[perm[j]] = lts.barbs[j]
    edges = []
    for a, lab, b in lts.edges:
        if extra and rng.random() < 0.3:
            # the intermediate node can only move on to b and shows nothing b lacks
            m = len(barbs)
            barbs.append(lts.barbs[b] if rng.random() < 0.5 else frozenset())
            edges += [(perm[a], lab, m), (m, lab, perm[b])]
            extra -= 1
        else:
            edges.append((perm[a], lab, perm[b]))
    return LTS(0, tuple(range(len(barbs))), tuple(edges), tuple(barbs), False)


def gen_lts_pair(rng: random.Random, max_nodes: int = 30) -> tuple:
    """Two LTSs whose sizes add up to at most ``max_nodes``; about a third are constructed to be bisimilar."""
    half = max_nodes // 2
    if rng.random() < 0.35:
        a = gen_lts(rng, rng.randint(1, max(1, half - 3)))
        return a, stutter(a, rng)
    return gen_lts(rng, rng.randint(1, half)), gen_lts(rng, rng.randint(1, half))


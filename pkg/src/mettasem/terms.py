"""MeTTa term algebra: atoms, lists, bags and inert comprehensions.

Every term carries a precomputed sort ``key``; equality, hashing and the total
term order are all defined through it.  Bags keep their items sorted by key,
so two bags that differ only by a permutation are the same value.
"""
from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Union

# variant tags, in term-order precedence
TAG_UNIT_LIST, TAG_UNIT_BAG, TAG_ATOM, TAG_LIST, TAG_BAG, TAG_LIST_COMP, TAG_BAG_COMP = range(7)

# atom kinds
KIND_VAR, KIND_WILDCARD, KIND_BUILTIN, KIND_GROUND = range(4)

# ground type tags
G_BOOL, G_INT, G_UINT, G_FLOAT, G_STR, G_URI, G_SYM = range(7)

INT_MIN, INT_MAX = -(2**63), 2**63 - 1
UINT_MAX = 2**64 - 1


class Term:
    """Base class of all terms.  Immutable once constructed."""

    __slots__ = ("key", "_hash")
    tag: int = -1

    def _set_key(self, key: tuple) -> None:
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return self._hash == other._hash and self.key == other.key

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Term"):
        return self.key < other.key

    def __le__(self, other: "Term"):
        return self.key <= other.key

    def __gt__(self, other: "Term"):
        return self.key > other.key

    def __ge__(self, other: "Term"):
        return self.key >= other.key

    def __repr__(self):
        from .syntax import print_term

        return f"<{type(self).__name__} {print_term(self)}>"

    def __reduce__(self):
        return (_rebuild, (type(self), self._args()))

    def _args(self) -> tuple:
        return ()


def _rebuild(cls, args):
    if cls is _UnitList:
        return UNIT_LIST
    if cls is _UnitBag:
        return UNIT_BAG
    if cls is Wildcard:
        return WILDCARD
    return cls(*args)


class _UnitList(Term):
    __slots__ = ()
    tag = TAG_UNIT_LIST

    def __init__(self):
        self._set_key((TAG_UNIT_LIST,))


class _UnitBag(Term):
    __slots__ = ()
    tag = TAG_UNIT_BAG

    def __init__(self):
        self._set_key((TAG_UNIT_BAG,))


UNIT_LIST = _UnitList()
UNIT_BAG = _UnitBag()


# ---------------------------------------------------------------------------
# atoms


class Atom(Term):
    __slots__ = ()
    tag = TAG_ATOM


class Var(Atom):
    __slots__ = ("name",)

    def __init__(self, name: str):
        if not name:
            raise ValueError("variable names must be nonempty")
        object.__setattr__(self, "name", name)
        self._set_key((TAG_ATOM, KIND_VAR, name))

    def _args(self):
        return (self.name,)


class Wildcard(Atom):
    """``_``: unifies with anything and binds nothing."""

    __slots__ = ()

    def __init__(self):
        self._set_key((TAG_ATOM, KIND_WILDCARD))


WILDCARD = Wildcard()


class BuiltinSym(enum.Enum):
    DEF_EQ = "::="
    EQ = "="
    TRANSFORM = "transform"
    ADD_ATOM = "addAtom"
    REM_ATOM = "remAtom"
    PLUS = "+"
    TIMES = "*"

    @property
    def index(self) -> int:
        return _BUILTIN_INDEX[self]


_BUILTIN_INDEX = {b: i for i, b in enumerate(BuiltinSym)}
BUILTIN_BY_TEXT = {b.value: b for b in BuiltinSym}


class Builtin(Atom):
    __slots__ = ("sym",)

    def __init__(self, sym: BuiltinSym):
        object.__setattr__(self, "sym", sym)
        self._set_key((TAG_ATOM, KIND_BUILTIN, sym.index))

    def _args(self):
        return (self.sym,)


class Ground(Atom):
    __slots__ = ("value",)
    gtag: int = -1

    def __init__(self, value):
        value = self._check(value)
        object.__setattr__(self, "value", value)
        self._set_key((TAG_ATOM, KIND_GROUND, self.gtag, self._vkey(value)))

    def _check(self, value):
        return value

    @staticmethod
    def _vkey(value):
        return value

    def _args(self):
        return (self.value,)


class Bool(Ground):
    __slots__ = ()
    gtag = G_BOOL

    def _check(self, value):
        if not isinstance(value, bool):
            raise TypeError("Bool needs a bool")
        return value


class Int(Ground):
    """Signed 64-bit integer."""

    __slots__ = ()
    gtag = G_INT

    def _check(self, value):
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeError("Int needs an int")
        if not INT_MIN <= value <= INT_MAX:
            raise OverflowError(f"{value} does not fit in a signed 64-bit integer")
        return value


class UInt(Ground):
    """Unsigned 64-bit integer."""

    __slots__ = ()
    gtag = G_UINT

    def _check(self, value):
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeError("UInt needs an int")
        if not 0 <= value <= UINT_MAX:
            raise OverflowError(f"{value} does not fit in an unsigned 64-bit integer")
        return value


def float_bits(x: float) -> int:
    return struct.unpack(">q", struct.pack(">d", x))[0]


def _float_order_key(x: float) -> int:
    # IEEE-754 totalOrder on the raw bit pattern; NaN == NaN when bits agree
    b = float_bits(x)
    return b if b >= 0 else b ^ 0x7FFFFFFFFFFFFFFF


class Float(Ground):
    """64-bit binary float.  Equality is bit-level."""

    __slots__ = ()
    gtag = G_FLOAT

    def _check(self, value):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError("Float needs a float")
        return float(value)

    _vkey = staticmethod(_float_order_key)


class Str(Ground):
    __slots__ = ()
    gtag = G_STR

    def _check(self, value):
        if not isinstance(value, str):
            raise TypeError("Str needs a str")
        return value


class Uri(Ground):
    __slots__ = ()
    gtag = G_URI

    def _check(self, value):
        if not isinstance(value, str):
            raise TypeError("Uri needs a str")
        return value


class Sym(Ground):
    """A bare symbol such as ``f`` or ``done``."""

    __slots__ = ()
    gtag = G_SYM

    def _check(self, value):
        if not isinstance(value, str) or not value:
            raise ValueError("symbols need a nonempty str")
        return value


AtomValue = Union[Ground, Builtin, Var, Wildcard]


# ---------------------------------------------------------------------------
# compound terms


class List(Term):
    """Nonempty ordered list ``(t1 ... tn)``.  The empty list is ``UNIT_LIST``."""

    __slots__ = ("items",)
    tag = TAG_LIST

    def __init__(self, items: Iterable[Term]):
        items = tuple(items)
        if not items:
            raise ValueError("use UNIT_LIST for the empty list")
        object.__setattr__(self, "items", items)
        self._set_key((TAG_LIST, tuple(t.key for t in items)))

    def _args(self):
        return (self.items,)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]


class Bag(Term):
    """Nonempty multiset ``{t1 ... tn}``, items kept in canonical order."""

    __slots__ = ("items",)
    tag = TAG_BAG

    def __init__(self, items: Iterable[Term], *, _sorted: bool = False):
        items = tuple(items) if _sorted else msort(items)
        if not items:
            raise ValueError("use UNIT_BAG for the empty bag")
        object.__setattr__(self, "items", items)
        self._set_key((TAG_BAG, tuple(t.key for t in items)))

    def _args(self):
        return (self.items,)

    def __len__(self):
        return len(self.items)


# -- receipts (representation only; the machine treats comprehensions as inert)


@dataclass(frozen=True)
class Quote:
    """A quoted-term name ``@t``."""

    term: Term

    @property
    def key(self):
        return (2, self.term.key)


NamePattern = Union[Wildcard, Var, Quote]


def _name_key(n) -> tuple:
    if isinstance(n, Quote):
        return n.key
    return (0 if isinstance(n, Wildcard) else 1, n.key)


@dataclass(frozen=True)
class Remainder:
    """``... $x`` (``quoted=False``) or ``... @$x`` (``quoted=True``)."""

    var: Union[Var, Wildcard]
    quoted: bool = False

    @property
    def key(self):
        return (self.quoted, self.var.key)


class SourceMode(enum.Enum):
    PLAIN = ""
    CONSUME = "?!"
    SEND = "!?"


@dataclass(frozen=True)
class AtomSource:
    name: Union[NamePattern, Atom]
    mode: SourceMode = SourceMode.PLAIN
    args: tuple = ()

    @property
    def key(self):
        if isinstance(self.name, Quote):
            nk = self.name.key
        else:
            nk = (1, self.name.key)
        return (nk, list(SourceMode).index(self.mode), tuple(a.key for a in self.args))


class ReceiptKind(enum.Enum):
    LINEAR = "<-"
    REPEATED = "<="
    PEEK = "<~"


@dataclass(frozen=True)
class Bind:
    names: tuple
    remainder: Optional[Remainder]
    source: Union[AtomSource, Atom]

    @property
    def key(self):
        return (
            tuple(_name_key(n) for n in self.names),
            () if self.remainder is None else (self.remainder.key,),
            self.source.key,
        )


@dataclass(frozen=True)
class Receipt:
    kind: ReceiptKind
    binds: tuple

    def __post_init__(self):
        if not self.binds:
            raise ValueError("receipts need at least one bind")

    @property
    def key(self):
        return (list(ReceiptKind).index(self.kind), tuple(b.key for b in self.binds))


class _Comp(Term):
    __slots__ = ("head", "receipts", "body")

    def __init__(self, head: Term, receipts: Sequence[Receipt], body: Sequence[Term] = ()):
        receipts = tuple(receipts)
        if not receipts:
            raise ValueError("comprehensions need at least one receipt")
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "receipts", receipts)
        object.__setattr__(self, "body", tuple(body))
        self._set_key(
            (self.tag, head.key, tuple(r.key for r in receipts), tuple(b.key for b in self.body))
        )

    def _args(self):
        return (self.head, self.receipts, self.body)


class ListComp(_Comp):
    __slots__ = ()
    tag = TAG_LIST_COMP


class BagComp(_Comp):
    __slots__ = ()
    tag = TAG_BAG_COMP


# ---------------------------------------------------------------------------
# construction helpers and multiset operations


def sym(name: str) -> Sym:
    return Sym(name)


def mk_list(items: Iterable[Term]) -> Term:
    items = tuple(items)
    return List(items) if items else UNIT_LIST


def mk_bag(items: Iterable[Term]) -> Term:
    items = msort(items)
    return Bag(items, _sorted=True) if items else UNIT_BAG


def builtin(sym_: BuiltinSym) -> Builtin:
    return _BUILTINS[sym_]


_BUILTINS = {b: Builtin(b) for b in BuiltinSym}
EQ = _BUILTINS[BuiltinSym.EQ]
PLUS = _BUILTINS[BuiltinSym.PLUS]
TIMES = _BUILTINS[BuiltinSym.TIMES]
TRANSFORM = _BUILTINS[BuiltinSym.TRANSFORM]
ADD_ATOM = _BUILTINS[BuiltinSym.ADD_ATOM]
REM_ATOM = _BUILTINS[BuiltinSym.REM_ATOM]


def msort(items: Iterable) -> tuple:
    """Sort anything with a ``key`` attribute into canonical multiset order."""
    return tuple(sorted(items, key=_key_of))


def _key_of(x):
    return x.key


def munion(x: tuple, y: tuple) -> tuple:
    if not x:
        return tuple(y)
    if not y:
        return tuple(x)
    return msort(x + tuple(y))


def mremove(x: tuple, t) -> Optional[tuple]:
    """Remove one occurrence of ``t`` from sorted tuple ``x``; None if absent."""
    for i, u in enumerate(x):
        if u == t:
            return x[:i] + x[i + 1 :]
    return None


def mremove_all(x: tuple, ts: Iterable) -> Optional[tuple]:
    for t in ts:
        x = mremove(x, t)
        if x is None:
            return None
    return x


def mdistinct(x: tuple) -> Iterator:
    """Distinct items of a sorted tuple, in order."""
    prev = None
    for i, u in enumerate(x):
        if i == 0 or u != prev:
            yield u
        prev = u


def bag_items(t: Term) -> tuple:
    if t is UNIT_BAG:
        return ()
    if isinstance(t, Bag):
        return t.items
    raise TypeError(f"not a bag: {t!r}")


def term_order(a: Term, b: Term) -> int:
    """-1, 0 or 1 according to the total term order."""
    ka, kb = a.key, b.key
    return (ka > kb) - (ka < kb)


def bag_union(x: Term, y: Term) -> Term:
    """The ``++`` operator on bags: multiplicities add."""
    return mk_bag(bag_items(x) + bag_items(y))


def bag_remove_one(x: Term, t: Term) -> Optional[Term]:
    rest = mremove(bag_items(x), t)
    if rest is None:
        return None
    return Bag(rest, _sorted=True) if rest else UNIT_BAG


def cons(t: Term, s: Term) -> Term:
    """The ``::`` operator: prepend to a list, or add one occurrence to a bag."""
    if s is UNIT_LIST:
        return List((t,))
    if isinstance(s, List):
        return List((t,) + s.items)
    if s is UNIT_BAG or isinstance(s, Bag):
        return mk_bag(bag_items(s) + (t,))
    raise TypeError(f"cons needs a list or bag, got {type(s).__name__}")


def canon(t: Term) -> Term:
    """Rebuild ``t`` with every bag re-sorted (identity on canonical input)."""
    if isinstance(t, List):
        return List(canon(u) for u in t.items)
    if isinstance(t, Bag):
        return Bag(canon(u) for u in t.items)
    return t


def children(t: Term) -> tuple:
    if isinstance(t, (List, Bag)):
        return t.items
    return ()


def size(t: Term) -> int:
    """Node count.  Comprehensions count as a single node."""
    if isinstance(t, (List, Bag)):
        return 1 + sum(size(u) for u in t.items)
    return 1


def depth(t: Term) -> int:
    if isinstance(t, (List, Bag)):
        return 1 + max(depth(u) for u in t.items)
    return 0


def variables(t: Term) -> set:
    """Names of variables occurring outside comprehensions."""
    out: set = set()
    _collect_vars(t, out)
    return out


def _collect_vars(t: Term, out: set) -> None:
    if isinstance(t, Var):
        out.add(t.name)
    elif isinstance(t, (List, Bag)):
        for u in t.items:
            _collect_vars(u, out)


def is_ground(t: Term) -> bool:
    if isinstance(t, (Var, Wildcard)):
        return False
    if isinstance(t, (List, Bag)):
        return all(is_ground(u) for u in t.items)
    return True


def head_is(t: Term, b: Builtin, arity: int) -> bool:
    """True when ``t`` is ``(b x1 .. x_{arity-1})``."""
    return isinstance(t, List) and len(t.items) == arity and t.items[0] == b


def is_nan(t: Term) -> bool:
    return isinstance(t, Float) and math.isnan(t.value)

"""Rho-calculus processes and names, extended with join inputs, an arithmetic
guard, and leaves that embed MeTTa data.

Every node carries a precomputed ``key``; equality, hashing and ordering go
through it.  ``New`` binders are locally nameless (``Bound`` indices), so
alpha-equivalent processes are equal.  ``par`` flattens, drops ``Zero`` and
sorts, which realizes the commutative-monoid congruence.
"""
from __future__ import annotations

from typing import Iterable, Optional, Union

from ..states import KeyId, RState, SignedTerm, State
from ..terms import Term


class _Node:
    __slots__ = ("key", "_hash")

    def _set_key(self, key):
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, _Node):
            return NotImplemented
        return self._hash == other._hash and self.key == other.key

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"<{type(self).__name__} {pretty(self)}>"


# -- names


class Name(_Node):
    __slots__ = ()


class Quote(Name):
    """``@P``."""

    __slots__ = ("proc",)

    def __init__(self, proc: "Proc"):
        object.__setattr__(self, "proc", proc)
        self._set_key((0, proc.key))


class NameVar(Name):
    """A name variable, bound by an input pattern or awaiting a ``New``."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        self._set_key((1, name))


class Bound(Name):
    """Reference to the ``idx``-th enclosing ``New``."""

    __slots__ = ("idx",)

    def __init__(self, idx: int):
        object.__setattr__(self, "idx", idx)
        self._set_key((2, idx))


# -- arithmetic


class Expr(_Node):
    """``const + var``, where ``var`` is an integer pattern variable or absent."""

    __slots__ = ("const", "var")

    def __init__(self, const: int, var: Optional[str] = None):
        object.__setattr__(self, "const", const)
        object.__setattr__(self, "var", var)
        self._set_key((const, var or ""))

    @property
    def closed(self) -> bool:
        return self.var is None


# -- patterns


class Pattern(_Node):
    __slots__ = ()


class Bind(Pattern):
    """Binds any payload."""

    __slots__ = ("var",)

    def __init__(self, var: str):
        object.__setattr__(self, "var", var)
        self._set_key((0, var))


class Exact(Pattern):
    """Matches exactly one payload."""

    __slots__ = ("proc",)

    def __init__(self, proc: "Proc"):
        object.__setattr__(self, "proc", proc)
        self._set_key((1, proc.key))


class Like(Pattern):
    """Matches a data leaf whose term, signature ignored, is ``term``; binds it."""

    __slots__ = ("term", "var")

    def __init__(self, term: Term, var: str):
        object.__setattr__(self, "term", term)
        object.__setattr__(self, "var", var)
        self._set_key((2, term.key, var))


class Entry(Pattern):
    """Matches a ledger entry of ``kid`` and binds its balance to ``var``."""

    __slots__ = ("kid", "var")

    def __init__(self, kid: KeyId, var: str):
        object.__setattr__(self, "kid", kid)
        object.__setattr__(self, "var", var)
        self._set_key((3, kid.raw, var))


# -- processes


class Proc(_Node):
    __slots__ = ()


class _Zero(Proc):
    __slots__ = ()

    def __init__(self):
        self._set_key((0,))


ZERO = _Zero()


class Par(Proc):
    """Use ``par`` to build; components are flattened, nonzero, sorted, at least two."""

    __slots__ = ("items",)

    def __init__(self, items: tuple):
        object.__setattr__(self, "items", items)
        self._set_key((1, tuple(p.key for p in items)))


class Output(Proc):
    __slots__ = ("chan", "payload")

    def __init__(self, chan: Name, payload: Proc):
        object.__setattr__(self, "chan", chan)
        object.__setattr__(self, "payload", payload)
        self._set_key((2, chan.key, payload.key))


class Input(Proc):
    """``for(p1 <- c1 & ... & pn <- cn){ body }``; a join when n > 1."""

    __slots__ = ("binds", "body")

    def __init__(self, binds: Iterable, body: Proc):
        binds = tuple(binds)
        if not binds:
            raise ValueError("an input needs at least one binder")
        object.__setattr__(self, "binds", binds)
        object.__setattr__(self, "body", body)
        self._set_key((3, tuple((p.key, c.key) for p, c in binds), body.key))


class New(Proc):
    __slots__ = ("hint", "body")

    def __init__(self, hint: str, body: Proc):
        object.__setattr__(self, "hint", hint)
        object.__setattr__(self, "body", body)
        self._set_key((4, body.key))


class Drop(Proc):
    """``*n``."""

    __slots__ = ("name",)

    def __init__(self, name: Name):
        object.__setattr__(self, "name", name)
        self._set_key((5, name.key))


class IfPositive(Proc):
    """``if (expr > 0) { then } else { other }``."""

    __slots__ = ("expr", "then", "other")

    def __init__(self, expr: Expr, then: Proc, other: Proc):
        object.__setattr__(self, "expr", expr)
        object.__setattr__(self, "then", then)
        object.__setattr__(self, "other", other)
        self._set_key((6, expr.key, then.key, other.key))


class GroundLeaf(Proc):
    """The transliteration of a MeTTa term or signed term."""

    __slots__ = ("value",)

    def __init__(self, value: Union[Term, SignedTerm]):
        object.__setattr__(self, "value", value)
        self._set_key((7, (0 if isinstance(value, Term) else 1), value.key))

    @property
    def term(self) -> Term:
        return self.value if isinstance(self.value, Term) else self.value.term


class LedgerEntry(Proc):
    """``(h(p) e)`` as carried on the ledger channel."""

    __slots__ = ("kid", "expr")

    def __init__(self, kid: KeyId, expr: Expr):
        object.__setattr__(self, "kid", kid)
        object.__setattr__(self, "expr", expr)
        self._set_key((8, kid.raw, expr.key))


class StateLeaf(Proc):
    """A MeTTa state, sent to the dispatcher to request its evaluation listeners."""

    __slots__ = ("state",)

    def __init__(self, state: Union[State, RState]):
        object.__setattr__(self, "state", state)
        self._set_key((9, 0 if isinstance(state, State) else 1, state.key))


class Dispatcher(Proc):
    """Replicated ``for(S <- chan){ eval(S) }`` instantiating evaluation listeners on demand."""

    __slots__ = ("chan", "regs", "options")

    def __init__(self, chan: Name, regs: tuple, options=None):
        object.__setattr__(self, "chan", chan)
        object.__setattr__(self, "regs", tuple(regs))
        object.__setattr__(self, "options", options)
        self._set_key((10, chan.key, tuple(r.key for r in self.regs)))


def par(*procs: Proc) -> Proc:
    items = []
    for p in procs:
        if isinstance(p, Par):
            items.extend(p.items)
        elif p is not ZERO and p != ZERO:
            items.append(p)
    if not items:
        return ZERO
    if len(items) == 1:
        return items[0]
    return Par(tuple(sorted(items)))


def par_all(procs: Iterable[Proc]) -> Proc:
    return par(*procs)


def components(p: Proc) -> tuple:
    if isinstance(p, Par):
        return p.items
    if p == ZERO:
        return ()
    return (p,)


# -- structural maps


def _map(p, name_fn, expr_fn, level, shadow):
    """Rebuild ``p`` applying ``name_fn(name, level, shadow)`` and ``expr_fn(expr, shadow)``."""
    if isinstance(p, Par):
        return par(*(_map(q, name_fn, expr_fn, level, shadow) for q in p.items))
    if isinstance(p, Output):
        return Output(name_fn(p.chan, level, shadow), _map(p.payload, name_fn, expr_fn, level, shadow))
    if isinstance(p, Input):
        binds = []
        inner = set(shadow)
        for pat, chan in p.binds:
            binds.append((_map_pattern(pat, name_fn, expr_fn, level, shadow), name_fn(chan, level, shadow)))
            v = getattr(pat, "var", None)
            if v is not None:
                inner.add(v)
        return Input(binds, _map(p.body, name_fn, expr_fn, level, frozenset(inner)))
    if isinstance(p, New):
        return New(p.hint, _map(p.body, name_fn, expr_fn, level + 1, shadow))
    if isinstance(p, Drop):
        n = name_fn(p.name, level, shadow)
        return n.proc if isinstance(n, Quote) else Drop(n)
    if isinstance(p, IfPositive):
        return IfPositive(
            expr_fn(p.expr, shadow),
            _map(p.then, name_fn, expr_fn, level, shadow),
            _map(p.other, name_fn, expr_fn, level, shadow),
        )
    if isinstance(p, LedgerEntry):
        return LedgerEntry(p.kid, expr_fn(p.expr, shadow))
    if isinstance(p, Dispatcher):
        return Dispatcher(name_fn(p.chan, level, shadow), tuple(name_fn(r, level, shadow) for r in p.regs), p.options)
    return p


def _map_pattern(pat, name_fn, expr_fn, level, shadow):
    if isinstance(pat, Exact):
        return Exact(_map(pat.proc, name_fn, expr_fn, level, shadow))
    return pat


def _map_name(n: Name, name_fn, expr_fn, level, shadow) -> Name:
    if isinstance(n, Quote):
        return Quote(_map(n.proc, name_fn, expr_fn, level, shadow))
    return n


def _keep_expr(e, shadow):
    return e


def subst(p: Proc, names: Optional[dict] = None, ints: Optional[dict] = None) -> Proc:
    """Replace free name variables by names and integer variables by values.

    ``*@Q`` left behind by substitution is reduced to ``Q``.
    """
    names = names or {}
    ints = ints or {}

    def name_fn(n, level, shadow):
        if isinstance(n, NameVar) and n.name in names and n.name not in shadow:
            return names[n.name]
        return _map_name(n, name_fn, expr_fn, level, shadow)

    def expr_fn(e, shadow):
        if e.var is not None and e.var in ints and e.var not in shadow:
            return Expr(e.const + ints[e.var])
        return e

    return _map(p, name_fn, expr_fn, 0, frozenset())


def close(p: Proc, var: str) -> Proc:
    """Turn free ``NameVar(var)`` into the index of a binder placed around ``p``."""

    def name_fn(n, level, shadow):
        if isinstance(n, NameVar) and n.name == var and var not in shadow:
            return Bound(level)
        return _map_name(n, name_fn, _keep_expr, level, shadow)

    return _map(p, name_fn, _keep_expr, 0, frozenset())


def open_new(p: New, name: Name) -> Proc:
    """The body of ``p`` with its bound name replaced by ``name``."""

    def name_fn(n, level, shadow):
        if isinstance(n, Bound) and n.idx == level:
            return name
        return _map_name(n, name_fn, _keep_expr, level, shadow)

    return _map(p.body, name_fn, _keep_expr, 0, frozenset())


def new(hint: str, var: str, body: Proc) -> Proc:
    return New(hint, close(body, var))


def news(binders: Iterable, body: Proc) -> Proc:
    """Nest ``new`` binders, outermost first; ``binders`` holds ``(hint, var)`` pairs."""
    for hint, var in reversed(tuple(binders)):
        body = new(hint, var, body)
    return body


# -- printing


def pretty(x) -> str:
    out: list = []
    _emit(x, out, [])
    return "".join(out)


def _leaf_text(p) -> str:
    from ..syntax import print_signed, print_state, print_term

    if isinstance(p, GroundLeaf):
        v = p.value
        return "«" + (print_term(v) if isinstance(v, Term) else print_signed(v)) + "»"
    if isinstance(p, StateLeaf):
        return "«" + print_state(p.state).strip().replace("\n", "; ") + "»"
    raise TypeError(p)


def _expr_text(e: Expr) -> str:
    if e.var is None:
        return str(e.const)
    if e.const == 0:
        return e.var
    return f"{e.var} {'+' if e.const > 0 else '-'} {abs(e.const)}"


def _emit(x, out: list, scope: list) -> None:
    if isinstance(x, Name):
        if isinstance(x, Quote):
            out.append("@")
            inner = x.proc
            if isinstance(inner, (Par, Input, New, IfPositive)):
                out.append("(")
                _emit(inner, out, scope)
                out.append(")")
            else:
                _emit(inner, out, scope)
        elif isinstance(x, NameVar):
            out.append(x.name)
        else:
            depth = len(scope) - 1 - x.idx
            out.append(scope[depth] if 0 <= depth < len(scope) else f"?{x.idx}")
        return
    if isinstance(x, Pattern):
        if isinstance(x, Bind):
            out.append(x.var)
        elif isinstance(x, Exact):
            _emit(x.proc, out, scope)
        elif isinstance(x, Like):
            from ..syntax import print_term

            out.append(f"{x.var}:«{print_term(x.term)}»")
        else:
            out.append(f"«({x.kid} {x.var})»")
        return
    if x == ZERO:
        out.append("0")
    elif isinstance(x, Par):
        for j, q in enumerate(x.items):
            if j:
                out.append(" | ")
            _emit(q, out, scope)
    elif isinstance(x, Output):
        _emit(x.chan, out, scope)
        out.append("!(")
        _emit(x.payload, out, scope)
        out.append(")")
    elif isinstance(x, Input):
        out.append("for(")
        for j, (pat, chan) in enumerate(x.binds):
            if j:
                out.append(" & ")
            _emit(pat, out, scope)
            out.append(" <- ")
            _emit(chan, out, scope)
        out.append("){ ")
        _emit(x.body, out, scope)
        out.append(" }")
    elif isinstance(x, New):
        label = f"{x.hint}{len(scope)}"
        out.append(f"new {label} {{ ")
        _emit(x.body, out, scope + [label])
        out.append(" }")
    elif isinstance(x, Drop):
        out.append("*")
        _emit(x.name, out, scope)
    elif isinstance(x, IfPositive):
        out.append(f"if ({_expr_text(x.expr)} > 0) {{ ")
        _emit(x.then, out, scope)
        out.append(" } else { ")
        _emit(x.other, out, scope)
        out.append(" }")
    elif isinstance(x, LedgerEntry):
        out.append(f"«({x.kid} {_expr_text(x.expr)})»")
    elif isinstance(x, Dispatcher):
        out.append("*for(S <- ")
        _emit(x.chan, out, scope)
        out.append("){ eval(S) }")
    else:
        out.append(_leaf_text(x))

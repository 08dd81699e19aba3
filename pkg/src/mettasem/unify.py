"""First-order unification with occurs check, substitution application, and
the ``insensitive`` predicate used by the conditional rewrite rules.

Bags unify by backtracking over item pairings in canonical order; the first
most general unifier found is returned.  Comprehensions only unify with
structurally equal comprehensions and are left untouched by substitution.
"""
from __future__ import annotations

import re
from typing import Iterable, Iterator, Mapping, Optional

from .terms import EQ, Bag, List, Term, Var, Wildcard, head_is


class Substitution(Mapping):
    """Immutable, idempotent map from variable names to terms."""

    __slots__ = ("_map", "_hash")

    def __init__(self, bindings: Optional[Mapping] = None):
        m = {}
        for name, t in (bindings or {}).items():
            name = name.name if isinstance(name, Var) else name
            m[name] = t
        self._map = dict(sorted(m.items()))
        self._hash = None

    def __getitem__(self, name):
        if isinstance(name, Var):
            name = name.name
        return self._map[name]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple((n, t.key) for n, t in self._map.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self._map == other._map
        if isinstance(other, Mapping):
            return self._map == dict(other)
        return NotImplemented

    def __repr__(self):
        from .syntax import print_term

        inner = ", ".join(f"${n} -> {print_term(t)}" for n, t in self._map.items())
        return f"Substitution({{{inner}}})"

    def items_sorted(self):
        return tuple(self._map.items())


EMPTY = Substitution()


def _walk(t: Term, s: dict) -> Term:
    while isinstance(t, Var):
        nxt = s.get(t.name)
        if nxt is None:
            return t
        t = nxt
    return t


def _occurs(name: str, t: Term, s: dict) -> bool:
    t = _walk(t, s)
    if isinstance(t, Var):
        return t.name == name
    if isinstance(t, (List, Bag)):
        return any(_occurs(name, u, s) for u in t.items)
    return False


def _unify(a: Term, b: Term, s: dict) -> Iterator[dict]:
    a = _walk(a, s)
    b = _walk(b, s)
    if a == b or isinstance(a, Wildcard) or isinstance(b, Wildcard):
        yield s
        return
    if isinstance(a, Var):
        if not _occurs(a.name, b, s):
            yield {**s, a.name: b}
        return
    if isinstance(b, Var):
        if not _occurs(b.name, a, s):
            yield {**s, b.name: a}
        return
    if a.tag != b.tag:
        return
    if isinstance(a, List):
        if len(a.items) == len(b.items):
            yield from _unify_seq(a.items, b.items, s, 0)
    elif isinstance(a, Bag):
        if len(a.items) == len(b.items):
            yield from _unify_bag(a.items, b.items, s, (False,) * len(b.items), 0)
    # atoms and comprehensions: equality was checked above


def _unify_seq(xs, ys, s, i) -> Iterator[dict]:
    if i == len(xs):
        yield s
        return
    for s2 in _unify(xs[i], ys[i], s):
        yield from _unify_seq(xs, ys, s2, i + 1)


def _unify_bag(xs, ys, s, used, i) -> Iterator[dict]:
    if i == len(xs):
        yield s
        return
    tried = set()
    for j, y in enumerate(ys):
        if used[j] or y in tried:
            continue
        tried.add(y)
        for s2 in _unify(xs[i], y, s):
            yield from _unify_bag(xs, ys, s2, used[:j] + (True,) + used[j + 1 :], i + 1)


def _resolve(t: Term, s: dict) -> Term:
    t = _walk(t, s)
    if isinstance(t, List):
        items = tuple(_resolve(u, s) for u in t.items)
        return t if all(x is y for x, y in zip(items, t.items)) else List(items)
    if isinstance(t, Bag):
        items = tuple(_resolve(u, s) for u in t.items)
        return t if all(x is y for x, y in zip(items, t.items)) else Bag(items)
    return t


def unify(a: Term, b: Term) -> Optional[Substitution]:
    """Most general unifier of ``a`` and ``b``, or None."""
    for s in _unify(a, b, {}):
        return Substitution({n: _resolve(t, s) for n, t in s.items()})
    return None


def unifies(a: Term, b: Term) -> bool:
    for _ in _unify(a, b, {}):
        return True
    return False


def apply(sigma: Mapping, t: Term) -> Term:
    """``t sigma``: replace free variables, re-canonicalizing bags."""
    if not sigma:
        return t
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if isinstance(t, List):
        items = tuple(apply(sigma, u) for u in t.items)
        return t if all(x is y for x, y in zip(items, t.items)) else List(items)
    if isinstance(t, Bag):
        items = tuple(apply(sigma, u) for u in t.items)
        return t if all(x is y for x, y in zip(items, t.items)) else Bag(items)
    return t


def equation_parts(t: Term):
    """``(lhs, rhs)`` when ``t`` is ``(= lhs rhs)``, else None."""
    if head_is(t, EQ, 3):
        return t.items[1], t.items[2]
    return None


def insensitive(t: Term, k: Iterable[Term]) -> bool:
    """No equation ``(= t' u)`` in ``k`` has ``t'`` unifiable with ``t``."""
    for e in k:
        parts = equation_parts(e)
        if parts is not None and unifies(t, parts[0]):
            return False
    return True


def match_equations(t: Term, k: Iterable[Term]) -> list:
    """One ``(sigma, rhs)`` per equation occurrence in ``k`` whose head unifies with ``t``."""
    out = []
    for e in k:
        parts = equation_parts(e)
        if parts is None:
            continue
        sigma = unify(t, parts[0])
        if sigma is not None:
            out.append((sigma, parts[1]))
    return out


# -- variable freshening

_SUFFIX_RE = re.compile(r"#([0-9]+)\Z")


def freshen(t: Term, n: int) -> Term:
    """Rename every variable ``$x`` to ``$x#n``."""
    if isinstance(t, Var):
        return Var(f"{t.name}#{n}")
    if isinstance(t, List):
        return List(freshen(u, n) for u in t.items)
    if isinstance(t, Bag):
        return Bag(freshen(u, n) for u in t.items)
    return t


def max_fresh_index(terms: Iterable[Term]) -> int:
    """Largest ``n`` among variables named ``...#n``; 0 when there are none."""
    best = 0
    stack = list(terms)
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            m = _SUFFIX_RE.search(t.name)
            if m:
                best = max(best, int(m.group(1)))
        elif isinstance(t, (List, Bag)):
            stack.extend(t.items)
    return best

"""One-hole contexts over terms and their enumeration.

A context is a path of steps from the root to the hole.  A list step keeps the
siblings to either side of the hole; a bag step keeps the remaining multiset,
so a hole inside a bag is identified by value, not position.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .terms import Bag, List, Term, mk_bag


@dataclass(frozen=True)
class ListStep:
    left: tuple
    right: tuple

    @property
    def key(self):
        return (0, tuple(t.key for t in self.left), tuple(t.key for t in self.right))


@dataclass(frozen=True)
class BagStep:
    rest: tuple  # canonically sorted

    @property
    def key(self):
        return (1, tuple(t.key for t in self.rest))


Step = Union[ListStep, BagStep]


@dataclass(frozen=True)
class Context:
    steps: tuple = ()

    @property
    def key(self):
        return tuple(s.key for s in self.steps)

    @property
    def is_hole(self) -> bool:
        return not self.steps

    def plug(self, t: Term) -> Term:
        return plug(self, t)

    def __str__(self):
        return print_context(self)


HOLE = Context()


def plug(ctx: Context, t: Term) -> Term:
    """Fill the hole of ``ctx`` with ``t``; bags on the path are re-sorted."""
    for step in reversed(ctx.steps):
        if isinstance(step, ListStep):
            t = List(step.left + (t,) + step.right)
        else:
            t = mk_bag(step.rest + (t,))
    return t


def decompositions(t: Term) -> Iterator[tuple]:
    """Every ``(K, sub)`` with ``plug(K, sub) == t``, in pre-order.

    Bag items are visited in canonical order, once per occurrence.
    Comprehensions are treated as leaves.
    """
    yield from _decomp(t, ())


def _decomp(t: Term, path: tuple) -> Iterator[tuple]:
    yield Context(path), t
    if isinstance(t, List):
        items = t.items
        for j, u in enumerate(items):
            yield from _decomp(u, path + (ListStep(items[:j], items[j + 1 :]),))
    elif isinstance(t, Bag):
        items = t.items
        for j, u in enumerate(items):
            yield from _decomp(u, path + (BagStep(items[:j] + items[j + 1 :]),))


def print_context(ctx: Context) -> str:
    from .syntax import print_term

    text = "□"
    for step in reversed(ctx.steps):
        if isinstance(step, ListStep):
            parts = [print_term(x) for x in step.left] + [text] + [print_term(x) for x in step.right]
            text = "(" + " ".join(parts) + ")"
        else:
            text = "{" + " ".join([text] + [print_term(x) for x in step.rest]) + "}"
    return text

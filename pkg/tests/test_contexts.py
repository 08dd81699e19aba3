import random
from collections import Counter

from hypothesis import given, settings, strategies as st

from bruteforce import HOLE_MARK, positions
from mettasem.contexts import HOLE, decompositions, plug, print_context
from mettasem.generators import gen_small_term
from mettasem.syntax import parse_term as T
from mettasem.terms import Var, size, sym


def test_atom_has_only_the_trivial_decomposition():
    assert list(decompositions(T("a"))) == [(HOLE, T("a"))]


def test_preorder_decompositions():
    got = [(print_context(k), s) for k, s in decompositions(T("(g (f a))"))]
    assert got == [
        ("□", T("(g (f a))")),
        ("(□ (f a))", T("g")),
        ("(g □)", T("(f a)")),
        ("(g (□ a))", T("f")),
        ("(g (f □))", T("a")),
    ]


def test_plug():
    t = T("(f {a b} c)")
    assert plug(HOLE, t) is t
    (k, _), = [(k, s) for k, s in decompositions(T("(g x)")) if s == T("x")]
    assert plug(k, T("(a a)")) == T("(g (a a))")


def test_bag_positions_count_multiplicity():
    subs = [s for _, s in decompositions(T("{a a b}"))]
    assert Counter(subs) == Counter({T("{a a b}"): 1, T("a"): 2, T("b"): 1})


_ATOMS = [sym("a"), sym("b"), sym("f"), Var("x")]


def marked(k, s):
    return plug(k, HOLE_MARK), s


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_matches_direct_enumeration(seed):
    t = gen_small_term(random.Random(seed), 7, _ATOMS)
    ds = list(decompositions(t))
    assert len(ds) == size(t)
    assert all(plug(k, s) == t for k, s in ds)
    assert Counter(marked(k, s) for k, s in ds) == Counter(positions(t))

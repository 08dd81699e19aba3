import random

from hypothesis import given, settings, strategies as st

from bruteforce import ground_unifiers, ground_universe, substitute, variables
from mettasem.generators import gen_small_term
from mettasem.syntax import parse_term as T
from mettasem.terms import Var, sym
from mettasem.unify import (
    EMPTY,
    Substitution,
    apply,
    freshen,
    insensitive,
    match_equations,
    max_fresh_index,
    unifies,
    unify,
)


def test_single_binding():
    assert unify(T("(f $x)"), T("(f a)")) == {"x": T("a")}


def test_occurs_check():
    assert unify(T("$x"), T("(f $x)")) is None
    assert unify(T("(g $x $x)"), T("(g $y (h $y))")) is None


def test_bag_pairing():
    assert unify(T("{(g $x) b}"), T("{b (g c)}")) == {"x": T("c")}


def test_unifier_is_idempotent():
    s = unify(T("($x $y)"), T("($y (f a))"))
    assert apply(s, apply(s, T("($x $y)"))) == apply(s, T("($x $y)"))


def test_apply():
    assert apply(Substitution({"x": T("a")}), T("($x $x)")) == T("(a a)")
    t = T("(f {a $y})")
    assert apply(EMPTY, t) is t
    assert apply(Substitution({"x": T("b")}), T("{a $x}")) == T("{a b}")
    assert apply(Substitution({"x": T("b")}), T("{$x a}")) == T("{b a}")


def test_insensitive():
    assert not insensitive(T("(f a)"), [T("(= (f $x) $x)")])
    assert insensitive(T("b"), [])
    assert insensitive(T("(g a)"), [T("(= (f $x) $x)")])
    assert insensitive(T("(f a)"), [T("(f a)")])


def test_match_equations_in_kb_order():
    k = [T("(= (f $x) ($x $x))"), T("(= (f a) done)")]
    assert match_equations(T("(f a)"), k) == [({"x": T("a")}, T("($x $x)")), ({}, T("done"))]
    assert match_equations(T("(f a)"), [T("(= g h)")]) == []
    e = T("(= (f $x) $x)")
    hits = match_equations(T("(f a)"), [e, e])
    assert len(hits) == 2 and hits[0] == hits[1]


def test_freshen():
    t = freshen(T("(= (f $x) $y)"), 4)
    assert variables(t) == {"x#4", "y#4"}
    assert max_fresh_index([t, T("$z#9")]) == 9
    assert max_fresh_index([T("a")]) == 0


_ATOMS = [sym("a"), sym("b"), Var("x"), Var("y")]
_UNIVERSE = ground_universe([sym("a"), sym("b")], 3)


def _pair(seed):
    rng = random.Random(seed)
    return gen_small_term(rng, 5, _ATOMS), gen_small_term(rng, 5, _ATOMS)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_unifier_is_sound(seed):
    a, b = _pair(seed)
    s = unify(a, b)
    if s is not None:
        assert apply(s, a) == apply(s, b)
        assert unifies(a, b)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_failure_means_no_ground_unifier(seed):
    a, b = _pair(seed)
    found = next(ground_unifiers(a, b, _UNIVERSE), None)
    if unify(a, b) is None:
        assert found is None
    else:
        assert unifies(a, b)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_list_unifier_is_most_general(seed):
    rng = random.Random(seed)
    a = gen_small_term(rng, 5, _ATOMS, bags=False)
    b = gen_small_term(rng, 5, _ATOMS, bags=False)
    s = unify(a, b)
    for env in ground_unifiers(a, b, _UNIVERSE[:12]):
        assert s is not None
        for v in variables(a) | variables(b):
            assert substitute(apply(s, Var(v)), env) == env[v]

import pytest
from hypothesis import given, strategies as st

from mettasem.syntax import parse_term as T
from mettasem.terms import (
    UNIT_BAG,
    Bag,
    Int,
    bag_items,
    bag_remove_one,
    bag_union,
    cons,
    mk_bag,
    msort,
    term_order,
)


def test_int_order():
    assert term_order(Int(1), Int(2)) == -1
    assert term_order(Int(2), Int(1)) == 1


def test_bags_equal_regardless_of_order():
    assert term_order(T("{a b}"), T("{b a}")) == 0
    assert T("{a b}") == T("{b a}")
    assert hash(T("{a {c b}}")) == hash(T("{{b c} a}"))


def test_lists_are_ordered():
    assert term_order(T("(a b)"), T("(b a)")) != 0


@pytest.mark.parametrize("x, y, out", [
    ("{a}", "{a}", "{a a}"),
    ("{}", "{t}", "{t}"),
    ("{a b}", "{b}", "{a b b}"),
])
def test_bag_union(x, y, out):
    assert bag_union(T(x), T(y)) == T(out)


def test_bag_remove_one():
    assert bag_remove_one(T("{a a b}"), T("a")) == T("{a b}")
    assert bag_remove_one(T("{b}"), T("a")) is None
    assert bag_remove_one(T("{{y x}}"), T("{x y}")) is UNIT_BAG


def test_cons():
    assert cons(T("a"), T("(b c)")) == T("(a b c)")
    assert cons(T("a"), T("{}")) == T("{a}")
    assert cons(T("a"), T("()")) == T("(a)")
    with pytest.raises(TypeError):
        cons(T("a"), T("true"))


def test_empty_collections_are_units():
    with pytest.raises(ValueError):
        Bag(())
    assert mk_bag(()) is UNIT_BAG
    assert bag_items(UNIT_BAG) == ()


_atoms = st.sampled_from([T(x) for x in ("a", "b", "1", "true", '"s"', "(f a)", "{a b}", "$x")])


@given(st.lists(_atoms, max_size=6), st.lists(_atoms, max_size=6))
def test_union_is_commutative_and_counts_add(xs, ys):
    x, y = mk_bag(xs), mk_bag(ys)
    u = bag_union(x, y)
    assert u == bag_union(y, x)
    assert len(bag_items(u)) == len(xs) + len(ys)


@given(st.lists(_atoms, max_size=8))
def test_order_is_total_and_sort_is_stable_under_shuffle(xs):
    s = msort(xs)
    assert all(term_order(a, b) <= 0 for a, b in zip(s, s[1:]))
    assert msort(reversed(xs)) == s

import random

import pytest

from mettasem.generators import gen_state, gen_term, permuted
from mettasem.resources import key_id, sign
from mettasem.states import KeyId, RState, State
from mettasem.syntax import ParseError, parse_state, parse_term, parse_terms, print_state, print_term
from mettasem.terms import (
    EQ,
    UNIT_BAG,
    UNIT_LIST,
    Bag,
    Int,
    List,
    AtomSource,
    ListComp,
    ReceiptKind,
    Var,
    sym,
)


def test_equation_parses_to_nested_lists():
    t = parse_term("(= (f $x) ($x $x))")
    assert t == List([EQ, List([sym("f"), Var("x")]), List([Var("x"), Var("x")])])


def test_unit_literals():
    assert parse_term("{}") is UNIT_BAG
    assert parse_term("()") is UNIT_LIST


def test_list_comprehension():
    t = parse_term("( x | $a <- src . ($a) )")
    assert isinstance(t, ListComp)
    assert t.head == sym("x")
    (r,) = t.receipts
    assert r.kind is ReceiptKind.LINEAR
    (b,) = r.binds
    assert b.names == (Var("a"),)
    assert b.remainder is None
    assert b.source == AtomSource(sym("src"))
    assert t.body == (List([Var("a")]),)


def test_canonical_printing():
    assert print_term(Bag([sym("b"), sym("a")])) == "{a b}"
    assert print_term(UNIT_LIST) == "()"
    assert print_term(Int(-3)) == "-3"


def test_parse_state_sections():
    s = parse_state("i: {(f a)}\nk: {(= (f $x) ($x $x))}\n")
    assert s == State(i=(parse_term("(f a)"),), k=(parse_term("(= (f $x) ($x $x))"),))
    assert parse_state("") == State()


def test_parse_ledger_makes_rstate():
    s = parse_state("eos: {(kid:0x1122334455667788 10)}")
    assert isinstance(s, RState)
    assert s.eos == ((KeyId.from_hex("1122334455667788"), 10),)


def test_print_empty_state():
    assert print_state(State()) == "i: {}\nk: {}\nw: {}\no: {}\n"


def test_rstate_round_trip_with_signatures():
    p = b"alice"
    s = RState(i=(sign(p, parse_term("(g (f a))"), 3),), k=(parse_term("(= (f $x) ($x $x))"),),
               eos=((key_id(p), 100),))
    assert parse_state(print_state(s)) == s


@pytest.mark.parametrize("src", [
    "i: {(g (f a))} k: {(= (f $x) ($x $x))}",
    "",
    "eos: {(kid:0x1122334455667788 10)}",
    'w: {"a\\"b" 1.5 -0.0 7u `urn:x`} o: {{} () (+ 1 2)}',
])
def test_state_round_trip(src):
    s = parse_state(src)
    assert parse_state(print_state(s)) == s


def test_random_terms_round_trip():
    rng = random.Random(3)
    for _ in range(300):
        t = gen_term(rng)
        assert parse_term(print_term(t)) == t


def test_random_states_round_trip_and_permutation():
    rng = random.Random(4)
    for _ in range(100):
        s = gen_state(rng)
        assert parse_state(print_state(s)) == s
        assert print_state(permuted(s, rng)) == print_state(s)


def test_parse_terms_reads_several():
    assert parse_terms("a (b) {c}") == [sym("a"), List([sym("b")]), Bag([sym("c")])]


@pytest.mark.parametrize("src", ["(a", "{a", ")", '"open', "i: {a} i: {b}", "q: {a}", b"\xff\xfe"])
def test_malformed_input_raises_parse_error(src):
    with pytest.raises(ParseError):
        if isinstance(src, str) and ":" in src:
            parse_state(src)
        else:
            parse_term(src)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as exc:
        parse_term("(f (g a)")
    assert exc.value.render().startswith("1:")

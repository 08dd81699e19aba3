import random

import pytest

from mettasem import machine, resources
from mettasem.generators import fund, terminating_state
from mettasem.machine import Rule
from mettasem.resources import HmacSigner, cost_subst, cost_term, enabled_rb, key_id, run_rb, sign, verify
from mettasem.states import RState, SignedTerm
from mettasem.syntax import parse_state, print_state, parse_term as T
from mettasem.unify import Substitution

P = b"alice"
KID = key_id(P)
KB = (T("(= (f $x) ($x $x))"),)


def query_state(balance, eo=None):
    return RState(i=(sign(P, T("(g (f a))"), eo),), k=KB, eos=((KID, balance),))


def test_cost_term():
    assert cost_term(T("a")) == 1
    assert cost_term(T("(f a)")) == 3
    assert cost_term(T("{}")) == 1


def test_cost_subst():
    assert cost_subst(Substitution()) == 0
    assert cost_subst(Substitution({"x": T("a")})) == 1
    assert cost_subst(Substitution({"x": T("(f a)"), "y": T("b")})) == 4


def test_sign_and_verify():
    x = sign(P, T("(g a)"))
    assert verify(P, x)
    assert sign(P, T("(g a)")) == x
    assert key_id(b"bob") != KID
    assert sign(b"bob", T("(g a)")).kid != x.kid
    tampered = SignedTerm(T("(g b)"), x.kid, x.eo, x.tag)
    assert not verify(P, tampered)
    assert not verify(P, SignedTerm(x.term, x.kid, 5, x.tag))
    assert not verify(b"bob", x)


def test_empty_key_is_rejected():
    with pytest.raises(ValueError):
        sign(b"", T("a"))


def test_funded_query():
    (ct,) = enabled_rb(query_state(100), HmacSigner([P]))
    assert ct.label is Rule.QUERY
    assert ct.cost == 4
    assert ct.ledger_after == ((KID, 96),)
    (_, w), = [p for p in ct.produced if p[0] == "w"]
    assert w.term == T("(g (a a))") and w.kid == KID and w.eo is None
    assert verify(P, w)


def test_guard_is_strict():
    assert enabled_rb(query_state(4)) == []
    assert len(enabled_rb(query_state(5))) == 1
    assert resources.is_starved(query_state(4))


def test_inline_funds_combine_with_ledger():
    s = RState(i=(sign(P, T("(addAtom a)"), 10),), eos=((KID, 0),))
    (ct,) = enabled_rb(s)
    assert ct.cost == 1 and ct.inline == 10
    assert ct.ledger_after == ((KID, 9),)
    assert ct.next.k[0].term == T("a")
    assert len(enabled_rb(query_state(0, eo=4))) == 0
    assert len(enabled_rb(query_state(0, eo=5))) == 1


def test_unsigned_or_unknown_payer_is_blocked():
    assert enabled_rb(RState(i=(SignedTerm(T("(+ 1 2)")),), eos=((KID, 50),))) == []
    assert enabled_rb(RState(i=(sign(P, T("(+ 1 2)")),))) == []


def test_forged_items_are_blocked_under_a_real_keyring():
    x = sign(P, T("(+ 1 2)"))
    forged = SignedTerm(T("(+ 1 3)"), x.kid, x.eo, x.tag)
    assert resources.unverified_items(RState(i=(forged,)), HmacSigner([P])) == [forged]


def test_run_rb_matches_plain_observables():
    r = run_rb(query_state(100), signer=HmacSigner([P]))
    assert r.verdict == machine.QUIESCENT
    plain = machine.run(query_state(100).project())
    assert r.final.project().o == plain.final.o
    assert r.final.eos == ((KID, 100 - resources.total_cost(r.trace)),)
    assert resources.total_cost(r.trace) == 4 + 5


def test_run_rb_starves_and_exhausts():
    assert run_rb(query_state(0)).verdict == machine.STARVED
    loop = RState(i=(sign(P, T("loop")),), k=(T("(= loop loop)"),), eos=((KID, 10**6),))
    assert run_rb(loop, fuel=3).verdict == machine.FUEL_EXHAUSTED


def test_composite_charges_the_directive_key():
    bob = key_id(b"bob")
    s = RState(w=(sign(P, T("u")),), k=(sign(b"bob", T("(addAtom v)")),), eos=((KID, 5), (bob, 5)))
    (ct,) = [c for c in enabled_rb(s) if c.label is Rule.ADD_ATOM2]
    assert ct.debits == ((KID, 1), (bob, 1))
    assert dict(ct.ledger_after) == {KID: 4, bob: 4}


def test_duplicate_ledger_keys_are_rejected():
    with pytest.raises(ValueError):
        RState(eos=((KID, 1), (KID, 2)))
    assert parse_state(f"eos: {{({KID} 1) ({KID} 2)}}").eos == ((KID, 3),)


def test_conservation_on_random_funded_states():
    rng = random.Random(11)
    signer = HmacSigner([b"alice", b"bob"])
    for _ in range(40):
        s = fund(terminating_state(rng), rng, signer)
        r = run_rb(s, machine.Random(rng.randrange(1000)), 50, signer)
        before = s.total_ledger() + resources.total_inline(r.trace)
        assert before - r.final.total_ledger() == resources.total_cost(r.trace)
        assert parse_state(print_state(r.final)) == r.final

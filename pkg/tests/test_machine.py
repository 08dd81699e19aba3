import pytest

from oracles import STATE_PAIRS
from mettasem import machine
from mettasem.machine import Rule, enabled, run, step
from mettasem.syntax import parse_state as S, parse_term as T

QUERY = "i: {(g (f a))} k: {(= (f $x) ($x $x))}"
LOOP = "i: {loop} k: {(= loop loop)}"


def only(s, label):
    trs = [tr for tr in enabled(s) if tr.label is label]
    assert len(trs) == 1, trs
    return trs[0]


def test_every_rule_has_three_oracle_pairs():
    assert set(STATE_PAIRS) == {r.value for r in Rule}
    assert all(len(v) >= 3 for v in STATE_PAIRS.values())


@pytest.mark.parametrize("rule, before, after", [
    (rule, a, b) for rule, pairs in STATE_PAIRS.items() for a, b in pairs
])
def test_rule_oracle(rule, before, after):
    tr = only(S(before), Rule(rule))
    assert tr.next == S(after)


def test_query_example():
    (tr,) = enabled(S(QUERY))
    assert tr.label is Rule.QUERY
    assert tr.next.w == (T("(g (a a))"),) and tr.next.i == ()
    assert str(tr.context) == "(g □)"
    assert tr.substitutions[0][next(iter(tr.substitutions[0]))] == T("a")


def test_builtin_examples():
    assert only(S("i: {(+ 2 3)}"), Rule.NUM_ADD1).next.o == (T("5"),)
    assert only(S("i: {(+ true false)}"), Rule.BOOL_ADD1).next.o == (T("true"),)
    assert only(S("w: {done}"), Rule.OUTPUT).next.o == (T("done"),)


def test_no_rule_for_absent_or_mistyped_redexes():
    assert enabled(S("i: {(remAtom a)}")) == []
    assert enabled(S('i: {(+ 1 "a") (* "a" "b") (+ 1 1u)}')) == []
    assert enabled(S("i: {(+ 9223372036854775807 1)}")) == []
    assert machine.stuck_redexes(S("i: {(+ 9223372036854775807 1)}"))


def test_sensitive_workspace_items_do_not_output():
    assert [tr.label for tr in enabled(S("w: {(f a)} k: {(= (f $x) b)}"))] == [Rule.CHAIN]


def test_deterministic_order():
    s = S("i: {(+ 1 1)} w: {u (+ 2 2)} k: {(= (f $x) $x)}")
    labels = [tr.label for tr in enabled(s)]
    assert labels == [Rule.NUM_ADD1, Rule.NUM_ADD2, Rule.OUTPUT, Rule.OUTPUT]
    assert step(s).label is Rule.NUM_ADD1
    assert step(S(QUERY)).label is Rule.QUERY
    assert step(S("")) is None


def test_random_policy_is_reproducible():
    s = S("w: {a b c d e f g}")
    picks = [machine.Random(7).choose(enabled(s)).host for _ in range(2)]
    assert picks[0] == picks[1]
    runs = [run(s, machine.Random(7)).trace for _ in range(2)]
    assert [t.host for t in runs[0]] == [t.host for t in runs[1]]


def test_run_query_to_quiescence():
    r = run(S(QUERY), fuel=10)
    assert [t.label for t in r.trace] == [Rule.QUERY, Rule.OUTPUT]
    assert r.final.o == (T("(g (a a))"),)
    assert r.verdict == machine.QUIESCENT


def test_zero_fuel():
    r = run(S(QUERY), fuel=0)
    assert r.trace == () and r.verdict == machine.FUEL_EXHAUSTED
    assert run(S(""), fuel=0).verdict == machine.QUIESCENT


def test_divergent_kb_exhausts_fuel():
    r = run(S(LOOP), fuel=5)
    assert len(r.trace) == 5 and r.verdict == machine.FUEL_EXHAUSTED
    assert [t.label for t in r.trace] == [Rule.QUERY] + [Rule.CHAIN] * 4


def test_replay_reproduces_final_state():
    s = S("i: {(addAtom (= (h $x) (+ $x 1))) (h 2)}")
    r = run(s, machine.Random(1))
    assert machine.replay(s, r.trace) == r.final


def test_fresh_variables_avoid_stored_indices():
    s = S("i: {(f $x#1)} k: {(= (f $y) (g $y))}")
    (tr,) = [t for t in enabled(s) if t.context.is_hole]
    assert tr.next.w in ((T("(g $x#1)"),), (T("(g $y#2)"),))
    assert set(tr.substitutions[0]) <= {"x#1", "y#2"}


def test_trace_record_fields():
    (tr,) = enabled(S(QUERY))
    rec = tr.record(0)
    assert rec["rule"] == "Query" and rec["host"] == "(g (f a))" and rec["context"] == "(g □)"
    assert "w: {(g (a a))}" in rec["next"]


def test_nested_directives_are_bounded():
    s = S("k: {" + "(addAtom " * 10 + "a" + ")" * 10 + " (addAtom b)} w: {u}")
    with pytest.raises(machine.DirectiveDepthError):
        deep = S("w: {u} k: {" + " ".join(f"(addAtom d{j})" for j in range(10)) + "}")
        enabled(deep)
    assert enabled(s)

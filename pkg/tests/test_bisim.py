import random

from hypothesis import given, settings, strategies as st

from mettasem import bisim
from mettasem.bisim import LTS, barbs, bottom_sccs, explore_state, naive_weak_bisim, weak_bisim, weak_bisim_lts
from mettasem.generators import gen_lts_pair, gen_state, permuted
from mettasem.syntax import parse_state as S, parse_term as T

QUERY = "i: {(g (f a))} k: {(= (f $x) ($x $x))}"
LOOP = "i: {loop} k: {(= loop loop)}"


def lts(n, edges, marks):
    return LTS(0, tuple(range(n)), tuple((a, "tau", b) for a, b in edges),
               tuple(frozenset(m) for m in marks))


def test_explore_examples():
    e = explore_state(S(""))
    assert len(e.nodes) == 1 and e.edges == () and not e.truncated
    q = explore_state(S(QUERY))
    assert len(q.nodes) == 3 and len(q.edges) == 2
    assert [lab for _, lab, _ in q.edges] == ["Query", "Output"]


def test_loop_runs_past_the_depth_bound():
    e = explore_state(S(LOOP), max_depth=3)
    assert e.truncated
    assert e.complete and len(e.nodes) == 2
    cut = explore_state(S(LOOP), max_depth=1)
    assert cut.truncated and not cut.complete


def test_node_cap_marks_incomplete():
    e = explore_state(S("i: {(+ 1 1) (+ 2 2) (+ 3 3)}"), max_nodes=3)
    assert len(e.nodes) == 3 and not e.complete


def test_barbs():
    assert barbs(S("i: {q} w: {x}")) == (T("q"),)
    assert barbs(S("o: {a a}")) == (T("a"), T("a"))
    q = explore_state(S(QUERY))
    assert barbs(q.nodes[-1]) == (T("(g (a a))"),)


def test_weak_bisim_examples():
    rng = random.Random(0)
    s = gen_state(rng)
    assert weak_bisim(s, permuted(s, rng)).bisimilar
    r = weak_bisim(S("o: {a}"), S("o: {b}"))
    assert r.verdict == bisim.DISTINGUISHED and r.witness == ()
    x, y = r.final_pair
    assert r.union.barbs[x] != r.union.barbs[y]
    k = "k: {(= (f $x) $x)}"
    assert weak_bisim(S(f"w: {{u}} {k}"), S(f"o: {{u}} {k}")).bisimilar


def test_multiplicity_is_observable():
    assert not weak_bisim(S("o: {a}"), S("o: {a a}")).bisimilar


def test_truncation_gives_inconclusive_or_a_sound_witness():
    assert weak_bisim(S(LOOP), S(LOOP)).bisimilar
    assert weak_bisim(S(LOOP), S(QUERY), max_depth=1).verdict == bisim.INCONCLUSIVE
    r = weak_bisim(S("o: {a}"), S("i: {(+ 1 2)} w: {(+ 3 4)}"), max_depth=1)
    assert r.verdict == bisim.DISTINGUISHED


def test_witness_drives_to_a_barb_mismatch():
    # left may commit to p or q; right only ever reaches both
    a = lts(3, [(0, 1), (0, 2)], [(), ("p",), ("q",)])
    b = lts(3, [(0, 1), (1, 2)], [(), ("p",), ("q",)])
    r = weak_bisim_lts(a, b)
    assert r.verdict == bisim.DISTINGUISHED
    assert len(r.witness) >= 1
    u, reach = r.union, bisim.closure(r.union)
    wb = bisim.weak_barbs(u, reach)
    for step in r.witness:
        x, y = step.pair
        start = x if step.side == 1 else y
        assert step.path[0] == start
    x, y = r.final_pair
    assert wb[x] != wb[y]


def test_bottom_sccs():
    g = lts(5, [(0, 1), (1, 2), (2, 1), (0, 3)], [()] * 5)
    assert sorted(bottom_sccs(g)) == [(1, 2), (3,), (4,)]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_agrees_with_naive_fixed_point(seed):
    a, b = gen_lts_pair(random.Random(seed))
    fast = weak_bisim_lts(a, b).bisimilar
    assert fast == naive_weak_bisim(a, b)
    assert fast == weak_bisim_lts(b, a).bisimilar
    assert weak_bisim_lts(a, a).bisimilar

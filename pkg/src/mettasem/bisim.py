"""Bounded LTS exploration and weak barbed bisimulation.

Every rule is an internal move; the only observations are barbs.  A state's
barbs are the terms of its input and output registers, read as predicates
``(t, n)``: "at least n copies of t are visible".  Related states must agree
on the predicates each can reach, and every move of one must be answered by
zero or more moves of the other.  The checker runs partition refinement on
the reflexive-transitive closure of the step relation.
"""
from __future__ import annotations

from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Hashable, Optional

from . import machine
from .states import RState, State
from .terms import msort


@dataclass(frozen=True)
class LTS:
    root: Hashable
    nodes: tuple  # discovery order; nodes[0] is the root
    edges: tuple  # (src index, label, dst index)
    barbs: tuple  # per node, a frozenset of barb predicates
    truncated: bool = False  # some run from the root is longer than the depth bound
    complete: bool = True  # every reachable node was expanded

    def successors(self) -> list:
        out = [[] for _ in self.nodes]
        for a, _, b in self.edges:
            out[a].append(b)
        return out


def explore(
    root,
    successors: Callable,
    barb: Callable,
    max_nodes: int = 10_000,
    max_depth: int = 1_000,
    jobs: int = 1,
) -> LTS:
    """Breadth-first closure of ``root`` under ``successors``.

    ``successors(n)`` yields ``(label, m)`` pairs.  Nodes at ``max_depth`` are
    not expanded.  The result is incomplete when such a node has moves or a
    new node would exceed ``max_nodes``; it is truncated when it is incomplete
    or some run, cycles included, is longer than ``max_depth``.
    """
    if max_nodes < 1 or max_depth < 1:
        raise ValueError("bounds must be at least 1")
    index = {root: 0}
    nodes = [root]
    edges = []
    complete = True
    frontier = [root]
    depth = 0
    pool = ProcessPoolExecutor(jobs) if jobs > 1 else None
    try:
        while frontier:
            if depth >= max_depth:
                expansions = map(successors, frontier)
                if any(any(True for _ in succ) for succ in expansions):
                    complete = False
                break
            if pool is not None:
                expansions = list(pool.map(_listify, [successors] * len(frontier), frontier))
            else:
                expansions = [list(successors(n)) for n in frontier]
            nxt = []
            for n, succ in zip(frontier, expansions):
                src = index[n]
                for label, m in succ:
                    j = index.get(m)
                    if j is None:
                        if len(nodes) >= max_nodes:
                            complete = False
                            continue
                        j = index[m] = len(nodes)
                        nodes.append(m)
                        nxt.append(m)
                    edges.append((src, label, j))
            frontier = nxt
            depth += 1
    finally:
        if pool is not None:
            pool.shutdown()
    edges = tuple(dict.fromkeys(edges))
    truncated = not complete or _longest_run(len(nodes), edges) > max_depth
    return LTS(root, tuple(nodes), edges, tuple(barb(n) for n in nodes), truncated, complete)


def _longest_run(n: int, edges: tuple) -> float:
    """Length of the longest path from node 0; infinite when a cycle is reachable."""
    succ = [[] for _ in range(n)]
    for a, _, b in edges:
        succ[a].append(b)
    longest = [0] * n
    state = [0] * n  # 0 new, 1 on the stack, 2 done
    stack = [(0, iter(succ[0]))]
    state[0] = 1
    while stack:
        v, it = stack[-1]
        w = next(it, None)
        if w is None:
            stack.pop()
            state[v] = 2
            if stack:
                u = stack[-1][0]
                longest[u] = max(longest[u], longest[v] + 1)
            continue
        if state[w] == 1:
            return float("inf")
        if state[w] == 0:
            state[w] = 1
            stack.append((w, iter(succ[w])))
        else:
            longest[v] = max(longest[v], longest[w] + 1)
    return longest[0] if n else 0


def _listify(fn, n):
    return list(fn(n))


# -- machine states


def barbs(s) -> tuple:
    """Multiset union of the i and o registers, as a sorted tuple of terms."""
    if isinstance(s, RState):
        s = s.project()
    return msort(s.i + s.o)


def barb_predicates(items: tuple) -> frozenset:
    """``{(t, 1), ..., (t, m)}`` for every term ``t`` of multiplicity ``m``."""
    out = set()
    counts: dict = {}
    for t in items:
        counts[t] = counts.get(t, 0) + 1
        out.add((t, counts[t]))
    return frozenset(out)


def state_barbs(s) -> frozenset:
    return barb_predicates(barbs(s))


def ledger_barbs(s: RState) -> frozenset:
    return state_barbs(s) | {("eos", s.eos)}


def state_successors(s: State):
    return [(tr.label.value, tr.next) for tr in machine.enabled(s)]


def rstate_successors(s: RState):
    from .resources import enabled_rb

    return [(ct.label.value, ct.next) for ct in enabled_rb(s)]


def explore_state(s, max_nodes: int = 10_000, max_depth: int = 1_000, with_ledger: bool = False, jobs: int = 1) -> LTS:
    if isinstance(s, RState):
        barb = ledger_barbs if with_ledger else state_barbs
        return explore(s, rstate_successors, barb, max_nodes, max_depth, jobs)
    return explore(s, state_successors, state_barbs, max_nodes, max_depth, jobs)


# -- weak barbed bisimulation


BISIMILAR = "bisimilar"
DISTINGUISHED = "distinguished"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class WitnessStep:
    """One round: ``side`` (1 or 2) moves from ``pair`` along ``path`` and the other side answers with ``reply``."""

    pair: tuple
    side: int
    path: tuple
    reply: tuple
    after: tuple


@dataclass(frozen=True)
class BisimResult:
    verdict: str
    witness: tuple = ()  # WitnessSteps ending at ``final_pair``
    final_pair: Optional[tuple] = None  # a pair whose weak barbs differ
    union: Optional[LTS] = None
    offset: int = 0  # index of the second root in ``union``

    @property
    def bisimilar(self) -> bool:
        return self.verdict == BISIMILAR


def disjoint_union(a: LTS, b: LTS) -> tuple:
    off = len(a.nodes)
    nodes = tuple((0, n) for n in a.nodes) + tuple((1, n) for n in b.nodes)
    edges = a.edges + tuple((x + off, lab, y + off) for x, lab, y in b.edges)
    return LTS((0, a.root), nodes, edges, a.barbs + b.barbs, a.truncated or b.truncated, a.complete and b.complete), off


def closure(lts: LTS) -> list:
    """``reach[n]``: nodes reachable from ``n`` in zero or more steps."""
    succ = lts.successors()
    reach = []
    for n in range(len(lts.nodes)):
        seen = {n}
        stack = [n]
        while stack:
            x = stack.pop()
            for y in succ[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        reach.append(frozenset(seen))
    return reach


def weak_barbs(lts: LTS, reach: list) -> list:
    return [frozenset().union(*(lts.barbs[m] for m in reach[n])) for n in range(len(lts.nodes))]


def refine(lts: LTS, reach: Optional[list] = None) -> list:
    """Partition history: entry ``j`` maps each node to its block after ``j`` rounds."""
    reach = closure(lts) if reach is None else reach
    ids: dict = {}
    block = [ids.setdefault(b, len(ids)) for b in weak_barbs(lts, reach)]
    history = [block]
    while True:
        ids = {}
        new = [
            ids.setdefault((block[n], frozenset(block[m] for m in reach[n])), len(ids))
            for n in range(len(lts.nodes))
        ]
        if len(ids) == len(set(block)):
            return history
        history.append(new)
        block = new


def split_level(history: list, x: int, y: int) -> Optional[int]:
    for j, block in enumerate(history):
        if block[x] != block[y]:
            return j
    return None


def shortest_path(succ: list, src: int, dst: int) -> tuple:
    prev = {src: None}
    q = deque([src])
    while q:
        x = q.popleft()
        if x == dst:
            break
        for y in succ[x]:
            if y not in prev:
                prev[y] = x
                q.append(y)
    out = [dst]
    while prev[out[-1]] is not None:
        out.append(prev[out[-1]])
    return tuple(reversed(out))


def build_witness(lts: LTS, history: list, reach: list, x: int, y: int) -> tuple:
    """Attacker moves driving ``(x, y)`` to a pair with different weak barbs.

    At each round the defender answers with the reply that survives longest.
    """
    succ = lts.successors()
    steps = []
    lvl = split_level(history, x, y)
    while lvl:
        move = None
        for side, (a, b) in ((1, (x, y)), (2, (y, x))):
            replies = sorted(reach[b])
            for a2 in sorted(reach[a], key=lambda m: (len(shortest_path(succ, a, m)), m)):
                levels = [split_level(history, a2, b2) for b2 in replies]
                if all(lv is not None and lv < lvl for lv in levels):
                    best = replies[max(range(len(replies)), key=lambda i: (levels[i], -i))]
                    move = (side, a, a2, b, best)
                    break
            if move:
                break
        if move is None:
            raise AssertionError("refinement history is inconsistent")
        side, a, a2, b, b2 = move
        after = (a2, b2) if side == 1 else (b2, a2)
        steps.append(WitnessStep((x, y), side, shortest_path(succ, a, a2), shortest_path(succ, b, b2), after))
        x, y = after
        lvl = split_level(history, x, y)
    return tuple(steps), (x, y)


def weak_bisim_lts(a: LTS, b: LTS) -> BisimResult:
    u, off = disjoint_union(a, b)
    reach = closure(u)
    if not (a.complete and b.complete):
        return _truncated_verdict(a, b, u, off, reach)
    history = refine(u, reach)
    if history[-1][0] == history[-1][off]:
        return BisimResult(BISIMILAR, (), None, u, off)
    steps, final = build_witness(u, history, reach, 0, off)
    return BisimResult(DISTINGUISHED, steps, final, u, off)


def _truncated_verdict(a, b, u, off, reach) -> BisimResult:
    # Only a complete side has exact weak barbs.  A barb the truncated side
    # provably reaches but the complete side never shows separates the roots.
    wb = weak_barbs(u, reach)
    succ = u.successors()
    for side, (full, trunc), root_full, root_trunc in ((2, (a, b), 0, off), (1, (b, a), off, 0)):
        if not full.complete or trunc.complete:
            continue
        extra = wb[root_trunc] - wb[root_full]
        if extra:
            target = min((m for m in reach[root_trunc] if u.barbs[m] & extra), key=lambda m: len(shortest_path(succ, root_trunc, m)))
            path = shortest_path(succ, root_trunc, target)
            pair = (0, off)
            after = (root_full, target) if side == 2 else (target, root_full)
            step = WitnessStep(pair, side, path, (root_full,), after)
            return BisimResult(DISTINGUISHED, (step,), after, u, off)
    return BisimResult(INCONCLUSIVE, (), None, u, off)


def weak_bisim(s1, s2, max_nodes: int = 10_000, max_depth: int = 1_000, with_ledger: bool = False, jobs: int = 1) -> BisimResult:
    a = explore_state(s1, max_nodes, max_depth, with_ledger, jobs)
    b = explore_state(s2, max_nodes, max_depth, with_ledger, jobs)
    return weak_bisim_lts(a, b)


def naive_weak_bisim(a: LTS, b: LTS) -> bool:
    """Greatest fixed point straight from the definition: a barb shown now must be
    reachable by the partner, and each single step must be answered by zero or
    more steps into the relation."""
    u, off = disjoint_union(a, b)
    succ = u.successors()
    reach = closure(u)
    n = len(u.nodes)

    def weakly_has(y, pred):
        return any(pred in u.barbs[m] for m in reach[y])

    rel = {
        (x, y)
        for x in range(n)
        for y in range(n)
        if all(weakly_has(y, p) for p in u.barbs[x]) and all(weakly_has(x, p) for p in u.barbs[y])
    }
    changed = True
    while changed:
        changed = False
        for x, y in list(rel):
            ok = all(any((x2, y2) in rel for y2 in reach[y]) for x2 in succ[x]) and all(
                any((x2, y2) in rel for x2 in reach[x]) for y2 in succ[y]
            )
            if not ok:
                rel.discard((x, y))
                changed = True
    return (0, off) in rel


def bottom_sccs(lts: LTS) -> list:
    """Strongly connected components with no edge leaving them, as sorted index tuples."""
    succ = [sorted(set(x)) for x in lts.successors()]
    n = len(lts.nodes)
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list = []
    comp_of = [None] * n
    comps: list = []
    counter = 0
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] is None:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp_of[w] = len(comps)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(tuple(sorted(comp)))
    out = []
    for c, members in enumerate(comps):
        if all(comp_of[w] == c for v in members for w in succ[v]):
            out.append(members)
    return sorted(out)

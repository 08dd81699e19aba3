"""Differential checks between the machine and its compiled rho processes.

Both sides are explored exhaustively within bounds.  The observation of a
run that has stopped is its barb multiset, plus the ledger in the costed
form; comparing the sets of observations over bottom strongly connected
components covers quiescent states as well as starved cycles.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .. import bisim, resources
from ..states import RState, State
from ..terms import msort
from .compile import compile_meaning, free_channels
from .process import GroundLeaf, LedgerEntry, Output, Proc, components
from .reduce import is_pending, normalize, rho_steps


class TransliterationError(ValueError):
    """A barb channel carries something that is not the image of a MeTTa term."""


def rho_barbs(p: Proc, channels: Optional[dict] = None) -> tuple:
    """Sorted payload terms of top-level outputs on the i and o channels."""
    ch = channels or free_channels(False)
    watched = {ch["i"], ch["o"]}
    out = []
    for q in components(p):
        if isinstance(q, Output) and q.chan in watched:
            if not isinstance(q.payload, GroundLeaf):
                raise TransliterationError(f"payload {q.payload!r} is not a transliterated term")
            out.append(q.payload.term)
    return msort(out)


def rho_ledger(p: Proc, channels: dict) -> tuple:
    """Closed ledger entries on c, summed per key id and sorted."""
    totals: dict = {}
    for q in components(p):
        if isinstance(q, Output) and q.chan == channels["c"]:
            if not (isinstance(q.payload, LedgerEntry) and q.payload.expr.closed):
                raise TransliterationError(f"payload {q.payload!r} is not a ledger entry")
            e = q.payload
            totals[e.kid] = totals.get(e.kid, 0) + e.expr.const
    return tuple(sorted(totals.items()))


def _rho_succ(p: Proc):
    return rho_steps(p)


def explore_rho(p: Proc, max_nodes: int = 50_000, max_depth: int = 10_000, jobs: int = 1) -> bisim.LTS:
    return bisim.explore(normalize(p), _rho_succ, lambda q: None, max_nodes, max_depth, jobs)


def stopped_observations(lts: bisim.LTS, observe, keep=lambda node: True) -> frozenset:
    out = set()
    for comp in bisim.bottom_sccs(lts):
        for n in comp:
            node = lts.nodes[n]
            if keep(node):
                out.add(observe(node))
    return frozenset(out)


@dataclass(frozen=True)
class CorrectnessReport:
    metta_barbs: frozenset  # observations: barb tuples, or (barbs, ledger) pairs when costed
    rho_barbs: frozenset
    complete: bool  # both explorations expanded every reachable node
    agree: bool
    metta_nodes: int = 0
    rho_nodes: int = 0


def _metta_observe(resourced: bool):
    if resourced:
        return lambda s: (bisim.barbs(s), s.eos)
    return bisim.barbs


def _rho_observe(ch: dict, resourced: bool):
    if resourced:
        return lambda p: (rho_barbs(p, ch), rho_ledger(p, ch))
    return lambda p: rho_barbs(p, ch)


def metta_lts(s: Union[State, RState], fuel: int, signer=None, max_nodes: int = 50_000) -> bisim.LTS:
    if isinstance(s, RState):
        signer = signer or resources.NULL_SIGNER
        succ = lambda x: [(ct.label.value, ct.next) for ct in resources.enabled_rb(x, signer)]  # noqa: E731
        return bisim.explore(s, succ, lambda x: None, max_nodes, fuel)
    return bisim.explore(s, bisim.state_successors, lambda x: None, max_nodes, fuel)


def check_correctness(
    s: Union[State, RState],
    fuel: int = 1_000,
    max_nodes: int = 50_000,
    signer=None,
    jobs: int = 1,
) -> CorrectnessReport:
    """Compare stopped observations of ``s`` with those of its compiled process.

    ``fuel`` bounds the machine's exploration depth; the rho side gets a
    proportional bound since each rule firing takes several reductions.
    """
    if fuel < 1:
        raise ValueError("fuel must be at least 1")
    resourced = isinstance(s, RState)
    signer = signer or resources.NULL_SIGNER
    m = metta_lts(s, fuel, signer, max_nodes)
    ch = free_channels(resourced)
    r = explore_rho(compile_meaning(s, ch, signer), max_nodes, 16 * fuel, jobs)
    mo = stopped_observations(m, _metta_observe(resourced))
    ro = stopped_observations(r, _rho_observe(ch, resourced), lambda p: not is_pending(p))
    complete = m.complete and r.complete
    return CorrectnessReport(mo, ro, complete, complete and mo == ro, len(m.nodes), len(r.nodes))


def ledger_debit(before, after) -> int:
    """Total decrease of ledger balances from ``before`` to ``after`` (pairs or mappings)."""
    b = dict(before)
    a = dict(after)
    return sum(b.values()) - sum(a.values())


"""Reduction: COMM over join inputs, guard evaluation, and dispatch.

Processes are kept in a normal form: top-level ``new`` binders are opened
with names derived from a digest of the process, so reduction is a pure
function of the process, and inputs listening only on private names nobody
can ever send on are discarded.
"""
from __future__ import annotations

import hashlib
from typing import Iterator

from ..terms import Uri
from .process import (
    Bind,
    Dispatcher,
    Drop,
    Entry,
    Exact,
    GroundLeaf,
    IfPositive,
    Input,
    LedgerEntry,
    Like,
    Name,
    New,
    Output,
    Par,
    Proc,
    Quote,
    StateLeaf,
    components,
    open_new,
    par,
    subst,
)

COMM = "comm"
IF = "if"
DISPATCH = "dispatch"

NU_PREFIX = "nu:"


def fresh_name(label: str) -> Quote:
    return Quote(GroundLeaf(Uri(NU_PREFIX + label)))


def is_private(n: Name) -> bool:
    return (
        isinstance(n, Quote)
        and isinstance(n.proc, GroundLeaf)
        and isinstance(n.proc.value, Uri)
        and n.proc.value.value.startswith(NU_PREFIX)
    )


def _digest(p: Proc) -> str:
    return hashlib.sha256(repr(p.key).encode()).hexdigest()[:16]


def normalize(p: Proc) -> Proc:
    """Open top-level binders, then drop inputs that can never fire."""
    while True:
        comps = components(p)
        if not any(isinstance(q, New) for q in comps):
            break
        tag = _digest(p)
        out = []
        for j, q in enumerate(comps):
            if isinstance(q, New):
                out.append(open_new(q, fresh_name(f"{q.hint}/{tag}/{j}")))
            else:
                out.append(q)
        p = par(*out)
    return _collect(p)


def _names(x, acc: list) -> None:
    """Every name occurring in ``x``, as a flat list."""
    stack = [x]
    while stack:
        x = stack.pop()
        if isinstance(x, Quote):
            acc.append(x)
            stack.append(x.proc)
        elif isinstance(x, Name):
            acc.append(x)
        elif isinstance(x, Par):
            stack.extend(x.items)
        elif isinstance(x, Output):
            stack.extend((x.chan, x.payload))
        elif isinstance(x, Input):
            for pat, chan in x.binds:
                stack.append(chan)
                if isinstance(pat, Exact):
                    stack.append(pat.proc)
            stack.append(x.body)
        elif isinstance(x, New):
            stack.append(x.body)
        elif isinstance(x, Drop):
            stack.append(x.name)
        elif isinstance(x, IfPositive):
            stack.extend((x.then, x.other))
        elif isinstance(x, Dispatcher):
            stack.append(x.chan)
            stack.extend(x.regs)


def _collect(p: Proc) -> Proc:
    while True:
        comps = components(p)
        uses: dict = {}
        for q in comps:
            acc: list = []
            if isinstance(q, Input):
                heads = [chan for _, chan in q.binds]
                rest: list = []
                for pat, _ in q.binds:
                    if isinstance(pat, Exact):
                        _names(pat.proc, rest)
                _names(q.body, rest)
                for n in heads:
                    if is_private(n):
                        uses.setdefault(n, [0, 0])[0] += 1
                acc = rest
            else:
                _names(q, acc)
            for n in acc:
                if is_private(n):
                    uses.setdefault(n, [0, 0])[1] += 1
        dead = {n for n, (_, other) in uses.items() if other == 0}
        if not dead:
            return p
        keep = [q for q in comps if not (isinstance(q, Input) and any(c in dead for _, c in q.binds))]
        if len(keep) == len(comps):
            return p
        p = par(*keep)


# -- matching


def _match(pat, payload: Proc, names: dict, ints: dict) -> bool:
    if isinstance(pat, Bind):
        names[pat.var] = Quote(payload)
        return True
    if isinstance(pat, Exact):
        return pat.proc == payload
    if isinstance(pat, Like):
        if isinstance(payload, GroundLeaf) and payload.term == pat.term:
            names[pat.var] = Quote(payload)
            return True
        return False
    if isinstance(pat, Entry):
        if isinstance(payload, LedgerEntry) and payload.kid == pat.kid and payload.expr.closed:
            ints[pat.var] = payload.expr.const
            return True
        return False
    raise TypeError(pat)


def _assignments(binds, outputs_on, j, used, names, ints) -> Iterator[tuple]:
    if j == len(binds):
        yield tuple(used), dict(names), dict(ints)
        return
    pat, chan = binds[j]
    tried = set()
    for idx, out in outputs_on.get(chan, ()):
        if idx in used or out in tried:
            continue
        tried.add(out)
        n2, i2 = dict(names), dict(ints)
        if _match(pat, out.payload, n2, i2):
            yield from _assignments(binds, outputs_on, j + 1, used + [idx], n2, i2)


def rho_steps(p: Proc) -> list:
    """All one-step reducts of a normalized process as ``(kind, process)`` pairs.

    Order is deterministic and duplicates are removed.
    """
    comps = components(p)
    outputs_on: dict = {}
    for idx, q in enumerate(comps):
        if isinstance(q, Output):
            outputs_on.setdefault(q.chan, []).append((idx, q))
    found = []
    for idx, q in enumerate(comps):
        if isinstance(q, Input):
            for used, names, ints in _assignments(q.binds, outputs_on, 0, [], {}, {}):
                gone = set(used) | {idx}
                rest = [c for n, c in enumerate(comps) if n not in gone]
                found.append((COMM, par(*rest, subst(q.body, names, ints))))
        elif isinstance(q, IfPositive) and q.expr.closed:
            branch = q.then if q.expr.const > 0 else q.other
            rest = [c for n, c in enumerate(comps) if n != idx]
            found.append((IF, par(*rest, branch)))
        elif isinstance(q, Dispatcher):
            for j, out in outputs_on.get(q.chan, ()):
                if isinstance(out.payload, StateLeaf):
                    from .compile import eval_for_dispatcher

                    rest = [c for n, c in enumerate(comps) if n != j]
                    found.append((DISPATCH, par(*rest, eval_for_dispatcher(q, out.payload.state))))
    out, seen = [], set()
    for kind, nxt in found:
        nxt = normalize(nxt)
        if nxt not in seen:
            seen.add(nxt)
            out.append((kind, nxt))
    return out


def rho_step(p: Proc) -> list:
    """The one-step reducts of ``p``, in deterministic order."""
    return [q for _, q in rho_steps(normalize(p))]


def is_pending(p: Proc) -> bool:
    """True when ``p`` still has a guard or a dispatch request to settle."""
    comps = components(p)
    dispatch_chans = {q.chan for q in comps if isinstance(q, Dispatcher)}
    for q in comps:
        if isinstance(q, IfPositive):
            return True
        if isinstance(q, Output) and q.chan in dispatch_chans and isinstance(q.payload, StateLeaf):
            return True
    return False


def reduce_to_quiescence(p: Proc, fuel: int = 10_000, choose=None) -> tuple:
    """Follow one reduction path; returns ``(process, steps)``.

    ``choose(options)`` picks among reducts, first by default.
    """
    p = normalize(p)
    n = 0
    while n < fuel:
        options = rho_step(p)
        if not options:
            break
        p = choose(options) if choose else options[0]
        n += 1
    return p, n


"""MeTTa states to rho processes.

``compile_config`` lays register items out as outputs on one channel per
register.  ``compile_eval`` places one listener per enabled rule instance;
the listeners of a state compete for a private token, so exactly one of them
fires, and the fired listener hands the successor state to a dispatcher that
instantiates the successor's listeners.  In the costed form a listener also
joins on the ledger channel and guards its body with the balance check.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Optional, Union

from .. import machine, resources
from ..machine import Rule, Transition
from ..states import RState, SignedTerm, State
from ..terms import Term, Uri
from .process import (
    ZERO,
    Bind,
    Dispatcher,
    Drop,
    Entry,
    Exact,
    Expr,
    GroundLeaf,
    IfPositive,
    Input,
    LedgerEntry,
    Like,
    NameVar,
    Output,
    Proc,
    Quote,
    StateLeaf,
    new,
    news,
    par,
)

PLAIN_CHANNELS = ("i", "k", "w", "o")
RB_CHANNELS = ("i", "k", "w", "o", "c")


def free_channels(resourced: bool = False) -> dict:
    """Public channel names ``@«`chan:r`»`` for every register, the ledger (if costed) and dispatch."""
    regs = RB_CHANNELS if resourced else PLAIN_CHANNELS
    return {r: Quote(GroundLeaf(Uri(f"chan:{r}"))) for r in regs + ("e",)}


def leaf(x: Union[Term, SignedTerm]) -> GroundLeaf:
    if isinstance(x, SignedTerm) and not x.signed:
        return GroundLeaf(x.term)
    return GroundLeaf(x)


# -- configuration


def compile_config(s: Union[State, RState], channels: Optional[dict] = None) -> Proc:
    ch = channels or free_channels(isinstance(s, RState))
    outs = [Output(ch[r], leaf(x)) for r in PLAIN_CHANNELS for x in s.reg(r)]
    if isinstance(s, RState):
        outs.extend(Output(ch["c"], LedgerEntry(kid, Expr(e))) for kid, e in s.eos)
    return par(*outs)


# -- evaluation, plain


def _dispatch(ch: dict, nxt) -> Proc:
    return Output(ch["e"], StateLeaf(nxt))


def _gathered(ch: dict, bodies: list, tail: Proc) -> Proc:
    """``new s { bodies | for(r1 <- s & ...){ k!(*r1) | ... | tail } }``; ``bodies[j]`` sends on ``s``."""
    if not bodies:
        return tail
    n = len(bodies)
    s = NameVar("s")
    join = Input(
        [(Bind(f"r{j}"), s) for j in range(1, n + 1)],
        par(*(Output(ch["k"], Drop(NameVar(f"r{j}"))) for j in range(1, n + 1)), tail),
    )
    return new("s", "s", par(*(b(s) for b in bodies), join))


def _read_kb(ch: dict, item, j: int, emits: list):
    """Listener body taking ``item`` from k, emitting ``emits`` on w, and reporting on ``s``."""
    var = f"v{j}"
    pattern = Like(item.term, var) if isinstance(item, SignedTerm) else Like(item, var)

    def body(s):
        return Input([(pattern, ch["k"])], par(*(Output(ch["w"], leaf(u)) for u in emits), Output(s, Drop(NameVar(var)))))

    return body


def _rewrite_body(ch: dict, tr: Transition, produced: tuple, tail: Proc) -> Proc:
    """Query, Chain and Transform: one k-reader per matched item, then restore k and continue."""
    bodies = []
    pos = 0
    for j, (item, g) in enumerate(zip(tr.matched, tr.groups), start=1):
        bodies.append(_read_kb(ch, item, j, [x for _, x in produced[pos:pos + g]]))
        pos += g
    return _gathered(ch, bodies, tail)


def _rule_body(ch: dict, tr: Transition, produced: tuple, k_item, nxt) -> Proc:
    """What a fired listener for the non-composite ``tr`` runs after taking its redex."""
    tail = _dispatch(ch, nxt)
    label = tr.label
    if label in (Rule.QUERY, Rule.CHAIN, Rule.TRANSFORM):
        return _rewrite_body(ch, tr, produced, tail)
    outs = par(*(Output(ch[r], leaf(x)) for r, x in produced), tail)
    if label is Rule.REM_ATOM1:
        return Input([(Exact(leaf(k_item)), ch["k"])], outs)
    return outs


def _token(tok):
    return (Exact(ZERO), tok)


def _plain_listener(ch: dict, tr: Transition, tok) -> Proc:
    if tr.inner is not None:
        return _join_listener(ch, tr.consumed, tr.produced, tr.host, tr.next, tok)
    head = (Exact(leaf(tr.host)), ch[tr.register])
    k_item = tr.host.items[1] if tr.label is Rule.REM_ATOM1 else None
    return Input([head, _token(tok)], _rule_body(ch, tr, tr.produced, k_item, tr.next))


def _join_listener(ch: dict, consumed, produced, directive, nxt, tok, ledger=()) -> Proc:
    """Composite directive rules as one join: take the directive and every consumed item, emit the results."""
    binds = [(Exact(leaf(directive)), ch["k"])]
    binds.extend((Exact(leaf(x)), ch[r]) for r, x in consumed)
    before, after = ledger or ((), ())
    binds.extend((Exact(LedgerEntry(kid, Expr(e))), ch["c"]) for kid, e in before)
    binds.append(_token(tok))
    outs = [Output(ch["k"], leaf(directive))]
    outs.extend(Output(ch[r], leaf(x)) for r, x in produced)
    outs.extend(Output(ch["c"], LedgerEntry(kid, Expr(e))) for kid, e in after)
    return Input(binds, par(*outs, _dispatch(ch, nxt)))


def _with_token(listeners: list) -> Proc:
    if not listeners:
        return ZERO
    tok = NameVar("t")
    return new("t", "t", par(Output(tok, ZERO), *(lst(tok) for lst in listeners)))


def compile_eval(s: Union[State, RState], channels: Optional[dict] = None, signer=None) -> Proc:
    """One listener per enabled rule instance, competing for a shared token; Zero when none is enabled."""
    if isinstance(s, RState):
        return _compile_eval_rb(s, channels or free_channels(True), signer or resources.NULL_SIGNER)
    ch = channels or free_channels(False)
    return _with_token([lambda tok, tr=tr: _plain_listener(ch, tr, tok) for tr in machine.enabled(s)])


# -- evaluation, costed


def _rb_listener(ch: dict, s: RState, ct: resources.CostedTransition, tok) -> Proc:
    tr = ct.base
    payer = ct.consumed[0][1]
    k_item = ct.consumed[1][1] if tr.label is Rule.REM_ATOM1 else None
    var = "e1"
    head = (Exact(leaf(payer)), ch[tr.register])
    entry = (Entry(ct.payer, var), ch["c"])
    after = Output(ch["c"], LedgerEntry(ct.payer, Expr(ct.inline - ct.cost, var)))
    then = par(_rule_body(ch, tr, ct.produced, k_item, ct.next), after)
    restore = par(
        Output(ch[tr.register], leaf(payer)),
        Output(ch["c"], LedgerEntry(ct.payer, Expr(0, var))),
        _dispatch(ch, s),
    )
    return Input([head, entry, _token(tok)], IfPositive(Expr(ct.inline - ct.cost, var), then, restore))


def _rb_plain_instances(s: RState, signer) -> list:
    found = []
    for tr in machine._enabled(s.project(), 0, composites=False):
        found.extend(resources.costed_variants(s, tr, signer, guard=False))
    return found


def _compile_eval_rb(s: RState, ch: dict, signer) -> Proc:
    listeners = []
    for ct in _rb_plain_instances(s, signer):
        listeners.append(lambda tok, ct=ct: _rb_listener(ch, s, ct, tok))
    for ct in resources._composites(s, 0, signer):
        before = tuple((kid, e) for kid, e in ct.ledger_before if kid in dict(ct.debits))
        after = tuple((kid, e) for kid, e in ct.ledger_after if kid in dict(ct.debits))
        directive = next(x for x in s.k if x.term == ct.base.host and x.kid == ct.payer)
        listeners.append(
            lambda tok, ct=ct, d=directive, led=(before, after): _join_listener(
                ch, ct.consumed, ct.produced, d, ct.next, tok, led
            )
        )
    return _with_token(listeners)


# -- meaning


def _binders(resourced: bool, dispatch: bool) -> list:
    regs = RB_CHANNELS if resourced else PLAIN_CHANNELS
    out = [(r, f"chan.{r}") for r in regs]
    if dispatch:
        out.append(("e", "chan.e"))
    return out


def compile_meaning(s: Union[State, RState], channels: Optional[dict] = None, signer=None) -> Proc:
    """Configuration in parallel with evaluation and, when any rule is enabled, the dispatcher.

    Without ``channels`` the register channels are bound by ``new``.
    """
    resourced = isinstance(s, RState)
    signer = signer or resources.NULL_SIGNER
    bound = channels is None
    if bound:
        ch = {r: NameVar(v) for r, v in _binders(resourced, True)}
    else:
        ch = channels
    ev = compile_eval(s, ch, signer)
    regs = tuple(ch[r] for r in (RB_CHANNELS if resourced else PLAIN_CHANNELS))
    parts = [compile_config(s, ch), ev]
    if ev != ZERO:
        parts.append(Dispatcher(ch["e"], regs, ("rb" if resourced else "plain", signer)))
    body = par(*parts)
    if bound:
        body = news(_binders(resourced, ev != ZERO), body)
    return body


def compile_meaning_rb(s: RState, channels: Optional[dict] = None, signer=None) -> Proc:
    if not isinstance(s, RState):
        raise TypeError("compile_meaning_rb needs a resource-bounded state")
    return compile_meaning(s, channels, signer)


@lru_cache(maxsize=4096)
def _cached_eval(state, chans: tuple, mode: str, signer) -> Proc:
    return compile_eval(state, dict(chans), signer if mode == "rb" else None)


def eval_for_dispatcher(d: Dispatcher, state) -> Proc:
    """Evaluation listeners for ``state`` over the dispatcher's channels."""
    mode, signer = d.options
    names = RB_CHANNELS if mode == "rb" else PLAIN_CHANNELS
    chans = tuple(zip(names, d.regs)) + (("e", d.chan),)
    return _cached_eval(state, chans, mode, signer)

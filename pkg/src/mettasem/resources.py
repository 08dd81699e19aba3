"""Gas-metered semantics: signed terms, the EO ledger, and costed rules."""
from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional

from . import machine
from .machine import FUEL_EXHAUSTED, QUIESCENT, STARVED, Rule, Run, Transition, trace_record
from .states import NO_TAG, REGISTERS, KeyId, RState, SignedTerm
from .terms import ADD_ATOM, REM_ATOM, UNIT_LIST, Term, head_is, mdistinct, mremove, munion, size

EO_MIN, EO_MAX = -(2**63), 2**63 - 1


def cost_term(t: Term) -> int:
    return size(t)


def cost_subst(sigma: Mapping) -> int:
    return sum(size(t) for t in sigma.values())


def key_id(p: bytes) -> KeyId:
    return KeyId(hashlib.sha256(p).digest()[:8])


def _message(t: Term, eo: Optional[int], kid: KeyId) -> bytes:
    from .syntax import print_term

    eo_text = "_" if eo is None else str(eo)
    return b"\x00".join((print_term(t).encode("utf-8"), eo_text.encode("ascii"), kid.raw))


class HmacSigner:
    """Keyring signer: tags are HMAC-SHA256 under the private key bytes."""

    def __init__(self, keys: Iterable[bytes] = ()):
        self._keys: dict = {}
        for p in keys:
            self.add(p)

    def add(self, p: bytes) -> KeyId:
        if not p:
            raise ValueError("private key must be nonempty")
        kid = key_id(p)
        self._keys[kid] = bytes(p)
        return kid

    def can_sign(self, kid: KeyId) -> bool:
        return kid in self._keys

    def sign(self, p: bytes, t: Term, eo: Optional[int] = None) -> SignedTerm:
        kid = self.add(p)
        return self.sign_as(kid, t, eo)

    def sign_as(self, kid: KeyId, t: Term, eo: Optional[int] = None) -> SignedTerm:
        try:
            p = self._keys[kid]
        except KeyError:
            raise KeyError(f"no private key for {kid}") from None
        tag = hmac.new(p, _message(t, eo, kid), hashlib.sha256).digest()
        return SignedTerm(t, kid, eo, tag)

    def verify(self, x: SignedTerm) -> bool:
        if x.kid is None or x.kid not in self._keys:
            return False
        return hmac.compare_digest(self.sign_as(x.kid, x.term, x.eo).tag, x.tag)


class NullSigner:
    """All-zero tags; every signed item verifies.  Meant for tests."""

    def add(self, p: bytes) -> KeyId:
        return key_id(p)

    def can_sign(self, kid: KeyId) -> bool:
        return True

    def sign(self, p: bytes, t: Term, eo: Optional[int] = None) -> SignedTerm:
        return SignedTerm(t, key_id(p), eo, NO_TAG)

    def sign_as(self, kid: KeyId, t: Term, eo: Optional[int] = None) -> SignedTerm:
        return SignedTerm(t, kid, eo, NO_TAG)

    def verify(self, x: SignedTerm) -> bool:
        return x.kid is not None


NULL_SIGNER = NullSigner()


def sign(p: bytes, t: Term, eo: Optional[int] = None) -> SignedTerm:
    return HmacSigner([p]).sign(p, t, eo)


def verify(p: bytes, x: SignedTerm) -> bool:
    return HmacSigner([p]).verify(x)


def unverified_items(s: RState, signer) -> list:
    """Signed register items whose tag ``signer`` rejects."""
    return [x for r in REGISTERS for x in s.reg(r) if x.signed and not signer.verify(x)]


# -- costed transitions


@dataclass(frozen=True)
class CostedTransition:
    base: Transition  # the plain transition on the projected state
    cost: int
    payer: KeyId
    debits: tuple  # ((KeyId, amount), ...); sums to ``cost``
    inline: int  # inline EO consumed from the redex
    consumed: tuple  # ((register, SignedTerm), ...)
    produced: tuple
    ledger_before: tuple
    ledger_after: tuple
    next: RState
    inner: Optional["CostedTransition"] = None

    @property
    def label(self) -> Rule:
        return self.base.label

    @property
    def key(self):
        return (
            self.base.key,
            tuple(x.key for _, x in self.consumed),
            None if self.inner is None else self.inner.key,
        )

    def record(self, n: int) -> dict:
        from .syntax import print_state

        rec = trace_record(n, self.base)
        rec["next"] = print_state(self.next)
        rec["cost"] = self.cost
        rec["payer"] = str(self.payer)
        return rec


def _apply_signed(s: RState, consumed, produced, eos) -> RState:
    regs = {r: s.reg(r) for r in REGISTERS}
    for r, x in consumed:
        rest = mremove(regs[r], x)
        if rest is None:
            raise ValueError(f"{x!r} not present in register {r}")
        regs[r] = rest
    for r, x in produced:
        regs[r] = munion(regs[r], (x,))
    return RState(**regs, eos=eos)


def apply_costed(s: RState, ct: CostedTransition) -> RState:
    return _apply_signed(s, ct.consumed, ct.produced, ct.ledger_after)


def _candidates(s: RState, register: str, t: Term) -> list:
    return [x for x in mdistinct(s.reg(register)) if x.term == t]


def base_cost(tr: Transition) -> int:
    """The cost a non-composite rule instance would be charged."""
    label = tr.label
    if label in (Rule.QUERY, Rule.CHAIN, Rule.TRANSFORM):
        return sum(cost_subst(sig) for sig in tr.substitutions) + sum(cost_term(u) for u in tr.rewrites)
    if label in (Rule.ADD_ATOM1, Rule.REM_ATOM1):
        return cost_term(tr.host.items[1])
    if label is Rule.OUTPUT:
        return cost_term(tr.host)
    # builtins: #(b1) + #(b2)
    return cost_term(tr.host.items[1]) + cost_term(tr.host.items[2])


def _fund(ledger: dict, x: SignedTerm, cost: int, guard: bool = True):
    """``(available, inline)`` when ``x`` can pay ``cost``, else None."""
    if not x.signed or x.kid not in ledger:
        return None
    inline = x.eo or 0
    available = ledger[x.kid] + inline
    if guard and available - cost <= 0:
        return None
    return available, inline


def costed_variants(s: RState, tr: Transition, signer=None, guard: bool = True) -> Iterator[CostedTransition]:
    """Costed instances of a non-composite plain transition ``tr`` of ``s.project()``.

    With ``guard=False`` unfunded instances are produced too, with the
    ledger they would leave behind.
    """
    signer = NULL_SIGNER if signer is None else signer
    ledger = s.ledger
    c = base_cost(tr)
    for x in _candidates(s, tr.register, tr.host):
        funded = _fund(ledger, x, c, guard)
        if funded is None or not signer.can_sign(x.kid):
            continue
        available, inline = funded
        kid = x.kid
        k_choices = [None]
        if tr.label is Rule.REM_ATOM1:
            k_choices = _candidates(s, "k", tr.host.items[1])
        for kc in k_choices:
            consumed = [(tr.register, x)] + ([("k", kc)] if kc is not None else [])
            produced = [(r, signer.sign_as(kid, t, None)) for r, t in tr.produced]
            after = dict(ledger)
            after[kid] = available - c
            eos = tuple(sorted(after.items()))
            yield CostedTransition(
                tr, c, kid, ((kid, c),), inline, tuple(consumed), tuple(produced),
                s.eos, eos, _apply_signed(s, consumed, produced, eos),
            )


def _composites(s: RState, depth: int, signer) -> Iterator[CostedTransition]:
    for d in mdistinct(s.k):
        if head_is(d.term, ADD_ATOM, 2):
            label = Rule.ADD_ATOM2
        elif head_is(d.term, REM_ATOM, 2):
            label = Rule.REM_ATOM2
        else:
            continue
        if not d.signed or not signer.can_sign(d.kid):
            continue
        t = d.term.items[1]
        k_minus_d = mremove(s.k, d)
        removals = [None] if label is Rule.ADD_ATOM2 else _candidates(s.replace(k=k_minus_d), "k", t)
        for tx in removals:
            k1 = k_minus_d if tx is None else mremove(k_minus_d, tx)
            if depth >= machine.MAX_DIRECTIVE_DEPTH:
                raise machine.DirectiveDepthError(f"more than {machine.MAX_DIRECTIVE_DEPTH} nested directives")
            c_t = cost_term(t)
            for inner in _enabled_rb(s.replace(k=k1), depth + 1, signer):
                after = dict(inner.ledger_after)
                if d.kid not in after or after[d.kid] - c_t <= 0:
                    continue
                after[d.kid] -= c_t
                eos = tuple(sorted(after.items()))
                if label is Rule.ADD_ATOM2:
                    consumed = inner.consumed
                    produced = inner.produced + (("k", signer.sign_as(d.kid, t)), ("o", signer.sign_as(d.kid, UNIT_LIST)))
                    plain_consumed = inner.base.consumed
                    plain_produced = inner.base.produced + (("k", t), ("o", UNIT_LIST))
                    removed = (d.term,)
                else:
                    consumed = inner.consumed + (("k", tx),)
                    produced = inner.produced + (("o", signer.sign_as(d.kid, UNIT_LIST)),)
                    plain_consumed = inner.base.consumed + (("k", t),)
                    plain_produced = inner.base.produced + (("o", UNIT_LIST),)
                    removed = (d.term, t)
                base = machine._build(
                    s.project(), label, "k", d.term, machine.HOLE, d.term, inner.base.substitutions,
                    plain_consumed, plain_produced, removed, inner.base,
                )
                yield CostedTransition(
                    base, inner.cost + c_t, d.kid, inner.debits + ((d.kid, c_t),), inner.inline,
                    tuple(consumed), tuple(produced), s.eos, eos,
                    _apply_signed(s, consumed, produced, eos), inner,
                )


def _enabled_rb(s: RState, depth: int, signer) -> list:
    found = []
    for tr in machine._enabled(s.project(), depth, composites=False):
        found.extend(costed_variants(s, tr, signer))
    found.extend(_composites(s, depth, signer))
    rank = machine._RANK
    out, seen = [], set()
    for ct in sorted(found, key=lambda ct: rank[ct.label]):
        if ct.key not in seen:
            seen.add(ct.key)
            out.append(ct)
    return out


def enabled_rb(s: RState, signer=NULL_SIGNER) -> list:
    """Every funded rule instance at ``s``, deterministically ordered."""
    return _enabled_rb(s, 0, signer)


def is_starved(s: RState, signer=NULL_SIGNER) -> bool:
    return not enabled_rb(s, signer) and bool(machine.enabled(s.project()))


def run_rb(s: RState, policy=machine.DETERMINISTIC, fuel: int = 1000, signer=NULL_SIGNER) -> Run:
    if fuel < 0:
        raise ValueError("fuel must be nonnegative")
    trace = []
    cur = s
    while True:
        options = enabled_rb(cur, signer)
        if not options:
            verdict = STARVED if machine.enabled(cur.project()) else QUIESCENT
            return Run(tuple(trace), cur, verdict, s)
        if len(trace) >= fuel:
            return Run(tuple(trace), cur, FUEL_EXHAUSTED, s)
        ct = policy.choose(options)
        trace.append(ct)
        cur = ct.next


def total_inline(trace: Iterable[CostedTransition]) -> int:
    return sum(ct.inline for ct in trace)


def total_cost(trace: Iterable[CostedTransition]) -> int:
    return sum(ct.cost for ct in trace)

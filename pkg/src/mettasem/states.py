"""Machine states: the plain four-register ``State`` and the resource-bounded
``RState`` whose registers hold signed terms and which carries an EO ledger."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .terms import Term, msort, mk_bag

REGISTERS = ("i", "k", "w", "o")


@dataclass(frozen=True)
class State:
    """``<i, k, w, o>``; every register is a canonically sorted tuple."""

    i: tuple = ()
    k: tuple = ()
    w: tuple = ()
    o: tuple = ()

    def __post_init__(self):
        for r in REGISTERS:
            object.__setattr__(self, r, msort(getattr(self, r)))

    @property
    def key(self) -> tuple:
        return tuple(tuple(t.key for t in getattr(self, r)) for r in REGISTERS)

    def reg(self, r: str) -> tuple:
        return getattr(self, r)

    def replace(self, **regs) -> "State":
        d = {r: getattr(self, r) for r in REGISTERS}
        d.update(regs)
        return State(**d)

    def as_bags(self) -> tuple:
        return tuple(mk_bag(getattr(self, r)) for r in REGISTERS)

    def terms(self) -> Iterable[Term]:
        for r in REGISTERS:
            yield from getattr(self, r)


@dataclass(frozen=True, order=True)
class KeyId:
    """Eight-byte key identifier ``h(p)``, rendered as 16 hex digits."""

    raw: bytes

    def __post_init__(self):
        if len(self.raw) != 8:
            raise ValueError("KeyId must be exactly 8 bytes")

    @property
    def hex(self) -> str:
        return self.raw.hex()

    @classmethod
    def from_hex(cls, text: str) -> "KeyId":
        if text.startswith(("0x", "0X")):
            text = text[2:]
        return cls(bytes.fromhex(text))

    def __str__(self):
        return f"kid:0x{self.hex}"


NO_TAG = bytes(32)


@dataclass(frozen=True)
class SignedTerm:
    """A term with an optional EO (``None`` is the bottom annotation) under a key.

    ``kid=None`` marks an unsigned item; such an item can never pay for a step.
    """

    term: Term
    kid: Optional[KeyId] = None
    eo: Optional[int] = None
    tag: bytes = NO_TAG

    @property
    def key(self) -> tuple:
        return (
            self.term.key,
            b"" if self.kid is None else self.kid.raw,
            (0,) if self.eo is None else (1, self.eo),
            self.tag,
        )

    @property
    def signed(self) -> bool:
        return self.kid is not None


def unsigned(t: Term) -> SignedTerm:
    return SignedTerm(t)


@dataclass(frozen=True)
class RState:
    """Resource-bounded state: signed registers plus the ``eos`` ledger.

    The ledger is a sorted tuple of ``(KeyId, balance)`` with unique keys.
    """

    i: tuple = ()
    k: tuple = ()
    w: tuple = ()
    o: tuple = ()
    eos: tuple = ()

    def __post_init__(self):
        for r in REGISTERS:
            items = tuple(x if isinstance(x, SignedTerm) else SignedTerm(x) for x in getattr(self, r))
            object.__setattr__(self, r, msort(items))
        eos = self.eos.items() if isinstance(self.eos, Mapping) else self.eos
        eos = tuple(sorted((kid, int(e)) for kid, e in eos))
        kids = [kid for kid, _ in eos]
        if len(set(kids)) != len(kids):
            raise ValueError("duplicate KeyId in ledger")
        object.__setattr__(self, "eos", eos)

    @property
    def key(self) -> tuple:
        regs = tuple(tuple(x.key for x in getattr(self, r)) for r in REGISTERS)
        return regs + (tuple((kid.raw, e) for kid, e in self.eos),)

    @property
    def ledger(self) -> dict:
        return dict(self.eos)

    def reg(self, r: str) -> tuple:
        return getattr(self, r)

    def replace(self, **regs) -> "RState":
        d = {r: getattr(self, r) for r in REGISTERS + ("eos",)}
        d.update(regs)
        return RState(**d)

    def total_ledger(self) -> int:
        return sum(e for _, e in self.eos)

    def project(self) -> State:
        """Strip signatures and the ledger."""
        return State(*(tuple(x.term for x in getattr(self, r)) for r in REGISTERS))


def merge_ledger(entries: Iterable) -> tuple:
    """Combine duplicate ledger entries by EO addition."""
    acc: dict = {}
    for kid, e in entries:
        acc[kid] = acc.get(kid, 0) + e
    return tuple(sorted(acc.items()))

"""Concrete syntax: tokenizer, recursive-descent parser and canonical printer.

Lexical conventions
    ``$x`` variable, ``_`` wildcard, ``@t`` quoted name, ``true``/``false``,
    ``-3`` int, ``7u`` unsigned, ``1.5``/``2e3`` float (plus ``+inf.0``,
    ``-inf.0``, ``+nan.0``), ``"..."`` string, ```...``` URI.
    ``;`` starts a comment except inside a comprehension's receipts, where it
    separates receipts.

State files hold sections ``i:``, ``k:``, ``w:``, ``o:`` and optionally
``eos:``, each followed by one bag literal.  Items of a resource state may
carry an annotation ``t ^ (kid:0x<16 hex> <eo>|_ <64 hex tag>)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Union

from .states import REGISTERS, KeyId, RState, SignedTerm, State, merge_ledger
from .terms import (
    BUILTIN_BY_TEXT,
    UNIT_BAG,
    UNIT_LIST,
    WILDCARD,
    AtomSource,
    Bag,
    BagComp,
    Bind,
    Bool,
    Builtin,
    Float,
    Int,
    INT_MAX,
    INT_MIN,
    List,
    ListComp,
    Quote,
    Receipt,
    ReceiptKind,
    Remainder,
    SourceMode,
    Str,
    Sym,
    Term,
    UINT_MAX,
    UInt,
    Uri,
    Var,
    Wildcard,
    builtin,
)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int


class ParseError(Exception):
    def __init__(self, span: SourceSpan, message: str, expected: Optional[list] = None):
        self.span = span
        self.message = message or "parse error"
        self.expected = list(expected or [])
        super().__init__(self.render())

    def render(self) -> str:
        where = f"{self.span.line + 1}:{self.span.column + 1}"
        msg = f"{where}: {self.message}"
        if self.expected:
            msg += f" (expected {', '.join(self.expected)})"
        return msg


# ---------------------------------------------------------------------------
# lexer

_DELIMS = set("(){}\"`|&,;^")
_PUNCT = {"(": "(", ")": ")", "{": "{", "}": "}", "|": "|", "&": "&", ",": ",", "^": "^"}

_INT_RE = re.compile(r"-?[0-9]+\Z")
_UINT_RE = re.compile(r"[0-9]+u\Z")
_FLOAT_RE = re.compile(r"-?[0-9]+(\.[0-9]*([eE][+-]?[0-9]+)?|[eE][+-]?[0-9]+)\Z")
_SPECIAL_FLOATS = {"+inf.0": math.inf, "-inf.0": -math.inf, "+nan.0": math.nan}
_KID_RE = re.compile(r"kid:(?:0[xX])?([0-9a-fA-F]{16})\Z")
_HEX64_RE = re.compile(r"(?:0[xX])?([0-9a-fA-F]{64})\Z")


@dataclass(frozen=True)
class Token:
    kind: str  # punctuation char, ";", "word", "@", "str", "uri", "eof"
    text: str
    start: int
    end: int
    value: object = None


class Lexer:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0
        self._cache: dict = {}

    def span(self, start: int, end: Optional[int] = None) -> SourceSpan:
        end = start if end is None else end
        line = self.src.count("\n", 0, start)
        col = start - (self.src.rfind("\n", 0, start) + 1)
        return SourceSpan(start, end, line, col)

    def error(self, tok_or_pos, message, expected=None) -> ParseError:
        if isinstance(tok_or_pos, Token):
            return ParseError(self.span(tok_or_pos.start, tok_or_pos.end), message, expected)
        return ParseError(self.span(tok_or_pos), message, expected)

    def peek(self, receipts: bool = False) -> Token:
        ck = (self.pos, receipts)
        tok = self._cache.get(ck)
        if tok is None:
            tok = self._scan(self.pos, receipts)
            self._cache[ck] = tok
        return tok

    def next(self, receipts: bool = False) -> Token:
        tok = self.peek(receipts)
        self.pos = tok.end
        return tok

    def _scan(self, pos: int, receipts: bool) -> Token:
        src, n = self.src, len(self.src)
        while pos < n:
            c = src[pos]
            if c.isspace():
                pos += 1
            elif c == ";" and not receipts:
                nl = src.find("\n", pos)
                pos = n if nl < 0 else nl + 1
            else:
                break
        if pos >= n:
            return Token("eof", "", n, n)
        c = src[pos]
        if c == ";":
            return Token(";", ";", pos, pos + 1)
        if c in _PUNCT:
            return Token(c, c, pos, pos + 1)
        if c == '"':
            return self._scan_quoted(pos, '"', "str")
        if c == "`":
            return self._scan_quoted(pos, "`", "uri")
        if c == "@":
            return Token("@", "@", pos, pos + 1)
        end = pos
        while end < n and not src[end].isspace() and src[end] not in _DELIMS:
            end += 1
        return Token("word", src[pos:end], pos, end)

    def _scan_quoted(self, pos: int, quote: str, kind: str) -> Token:
        src, n = self.src, len(self.src)
        out = []
        j = pos + 1
        while True:
            if j >= n:
                raise self.error(pos, "unterminated literal", [repr(quote)])
            c = src[j]
            if c == quote:
                return Token(kind, src[pos : j + 1], pos, j + 1, "".join(out))
            if c == "\\":
                if j + 1 >= n:
                    raise self.error(j, "dangling escape")
                e = src[j + 1]
                if e in _ESCAPES:
                    out.append(_ESCAPES[e])
                    j += 2
                elif e == "u":
                    hexpart = src[j + 2 : j + 6]
                    if len(hexpart) != 4 or not all(h in "0123456789abcdefABCDEF" for h in hexpart):
                        raise self.error(j, "bad \\u escape")
                    out.append(chr(int(hexpart, 16)))
                    j += 6
                else:
                    raise self.error(j, f"unknown escape \\{e}")
            else:
                out.append(c)
                j += 1


_ESCAPES = {'"': '"', "\\": "\\", "`": "`", "n": "\n", "t": "\t", "r": "\r", "0": "\0"}


# ---------------------------------------------------------------------------
# parser


_ARROWS = {"<-": ReceiptKind.LINEAR, "<=": ReceiptKind.REPEATED, "<~": ReceiptKind.PEEK}


class Parser:
    def __init__(self, src: str):
        self.lx = Lexer(src)

    # -- terms

    def term(self) -> Term:
        tok = self.lx.next()
        k = tok.kind
        if k == "(":
            return self._compound(tok, ")", UNIT_LIST)
        if k == "{":
            return self._compound(tok, "}", UNIT_BAG)
        if k == "word":
            return self._word(tok)
        if k == "str":
            return Str(tok.value)
        if k == "uri":
            return Uri(tok.value)
        if k == "eof":
            raise self.lx.error(tok, "unexpected end of input", ["term"])
        raise self.lx.error(tok, f"unexpected {tok.text!r}", ["term"])

    def _compound(self, open_tok: Token, close: str, unit: Term) -> Term:
        if self.lx.peek().kind == close:
            self.lx.next()
            return unit
        head = self.term()
        if self.lx.peek().kind == "|":
            self.lx.next()
            return self._comprehension(head, close)
        items = [head]
        while True:
            tok = self.lx.peek()
            if tok.kind == close:
                self.lx.next()
                break
            if tok.kind == "eof":
                raise self.lx.error(tok, "unclosed " + open_tok.text, [repr(close)])
            items.append(self.term())
        return List(items) if close == ")" else Bag(items)

    def _comprehension(self, head: Term, close: str) -> Term:
        receipts = [self._receipt()]
        while True:
            tok = self.lx.next(receipts=True)
            if tok.kind == ";":
                receipts.append(self._receipt())
            elif tok.kind == "word" and tok.text == ".":
                break
            else:
                raise self.lx.error(tok, "bad receipt separator", ["';'", "'.'"])
        body = []
        while True:
            tok = self.lx.peek()
            if tok.kind == close:
                self.lx.next()
                break
            if tok.kind == "eof":
                raise self.lx.error(tok, "unclosed comprehension", [repr(close)])
            body.append(self.term())
        cls = ListComp if close == ")" else BagComp
        return cls(head, receipts, body)

    def _receipt(self) -> Receipt:
        binds = [self._bind()]
        kind = binds[0][0]
        while self.lx.peek(receipts=True).kind == "&":
            tok = self.lx.next(receipts=True)
            b = self._bind()
            if b[0] is not kind:
                raise self.lx.error(tok, "binds of one receipt must share an arrow")
            binds.append(b)
        return Receipt(kind, tuple(b[1] for b in binds))

    def _bind(self):
        names = []
        remainder = None
        tok = self.lx.peek(receipts=True)
        if not (tok.kind == "word" and (tok.text in _ARROWS or tok.text == "...")):
            names.append(self._name())
            while self.lx.peek(receipts=True).kind == ",":
                self.lx.next(receipts=True)
                names.append(self._name())
        tok = self.lx.peek(receipts=True)
        if tok.kind == "word" and tok.text == "...":
            self.lx.next(receipts=True)
            quoted = False
            if self.lx.peek(receipts=True).kind == "@":
                self.lx.next(receipts=True)
                quoted = True
            vt = self.lx.next(receipts=True)
            v = self._word(vt) if vt.kind == "word" else None
            if not isinstance(v, (Var, Wildcard)):
                raise self.lx.error(vt, "remainder needs a variable", ["$var", "_"])
            remainder = Remainder(v, quoted)
        tok = self.lx.next(receipts=True)
        if not (tok.kind == "word" and tok.text in _ARROWS):
            raise self.lx.error(tok, "expected a binding arrow", list(_ARROWS))
        kind = _ARROWS[tok.text]
        if kind is ReceiptKind.LINEAR:
            source = self._atom_source()
        else:
            source = self._source_name()
        return kind, Bind(tuple(names), remainder, source)

    def _name(self):
        tok = self.lx.next(receipts=True)
        if tok.kind == "@":
            return Quote(self.term())
        if tok.kind == "word":
            t = self._word(tok)
            if isinstance(t, (Var, Wildcard)):
                return t
        raise self.lx.error(tok, "expected a name", ["_", "$var", "@term"])

    def _source_name(self):
        tok = self.lx.next(receipts=True)
        if tok.kind == "@":
            return Quote(self.term())
        if tok.kind == "word":
            return self._word(tok)
        if tok.kind == "str":
            return Str(tok.value)
        if tok.kind == "uri":
            return Uri(tok.value)
        raise self.lx.error(tok, "expected a source", ["atom", "@term"])

    def _atom_source(self) -> AtomSource:
        name = self._source_name()
        tok = self.lx.peek(receipts=True)
        if tok.kind == "word" and tok.text == "?!":
            self.lx.next(receipts=True)
            return AtomSource(name, SourceMode.CONSUME)
        if tok.kind == "word" and tok.text == "!?":
            self.lx.next(receipts=True)
            op = self.lx.next()
            if op.kind != "(":
                raise self.lx.error(op, "expected argument list", ["'('"])
            args = []
            while self.lx.peek().kind != ")":
                if self.lx.peek().kind == "eof":
                    raise self.lx.error(self.lx.peek(), "unclosed argument list", ["')'"])
                args.append(self.term())
            self.lx.next()
            return AtomSource(name, SourceMode.SEND, tuple(args))
        return AtomSource(name)

    def _word(self, tok: Token) -> Term:
        text = tok.text
        if text == "_":
            return WILDCARD
        if text[0] == "$":
            if len(text) == 1:
                raise self.lx.error(tok, "empty variable name")
            return Var(text[1:])
        if text == "true":
            return Bool(True)
        if text == "false":
            return Bool(False)
        b = BUILTIN_BY_TEXT.get(text)
        if b is not None:
            return builtin(b)
        if _INT_RE.match(text):
            v = int(text) if len(text) < 40 else INT_MAX + 1
            if not INT_MIN <= v <= INT_MAX:
                raise self.lx.error(tok, "integer literal out of 64-bit range")
            return Int(v)
        if _UINT_RE.match(text):
            v = int(text[:-1]) if len(text) < 40 else UINT_MAX + 1
            if v > UINT_MAX:
                raise self.lx.error(tok, "unsigned literal out of 64-bit range")
            return UInt(v)
        if _FLOAT_RE.match(text):
            return Float(float(text))
        if text in _SPECIAL_FLOATS:
            return Float(_SPECIAL_FLOATS[text])
        return Sym(text)

    def expect_eof(self):
        tok = self.lx.peek()
        if tok.kind != "eof":
            raise self.lx.error(tok, "trailing input", ["end of input"])

    # -- states

    def state(self, mode: Optional[str] = None):
        sections: dict = {}
        annotated = False
        while True:
            tok = self.lx.next()
            if tok.kind == "eof":
                break
            label = tok.text[:-1] if tok.kind == "word" and tok.text.endswith(":") else None
            if label not in REGISTERS + ("eos",):
                raise self.lx.error(tok, "expected a section label", ["i:", "k:", "w:", "o:", "eos:"])
            if label in sections:
                raise self.lx.error(tok, f"duplicate section {label}:")
            if mode == "plain" and label == "eos":
                raise self.lx.error(tok, "eos: section in a four-register state")
            if label == "eos":
                sections[label] = self._ledger()
            else:
                items, ann = self._register(mode)
                annotated = annotated or ann
                sections[label] = items
        resource = mode == "rb" or "eos" in sections or annotated
        if not resource:
            return State(*(tuple(x.term for x in sections.get(r, ())) for r in REGISTERS))
        return RState(*(sections.get(r, ()) for r in REGISTERS), eos=sections.get("eos", ()))

    def _open_bag(self):
        tok = self.lx.next()
        if tok.kind != "{":
            raise self.lx.error(tok, "expected a bag literal", ["'{'"])
        return tok

    def _register(self, mode):
        self._open_bag()
        items = []
        annotated = False
        while True:
            tok = self.lx.peek()
            if tok.kind == "}":
                self.lx.next()
                return items, annotated
            if tok.kind == "eof":
                raise self.lx.error(tok, "unclosed register", ["'}'"])
            t = self.term()
            if self.lx.peek().kind == "^":
                caret = self.lx.next()
                if mode == "plain":
                    raise self.lx.error(caret, "signed term in a four-register state")
                items.append(self._annotation(t))
                annotated = True
            else:
                items.append(SignedTerm(t))

    def _kid(self, tok: Token) -> KeyId:
        m = _KID_RE.match(tok.text) if tok.kind == "word" else None
        if not m:
            raise self.lx.error(tok, "bad key id", ["kid:0x<16 hex digits>"])
        return KeyId.from_hex(m.group(1))

    def _eo(self, tok: Token, allow_bottom: bool) -> Optional[int]:
        if tok.kind == "word" and tok.text == "_" and allow_bottom:
            return None
        if tok.kind == "word" and _INT_RE.match(tok.text) and len(tok.text) < 40:
            v = int(tok.text)
            if INT_MIN <= v <= INT_MAX:
                return v
        raise self.lx.error(tok, "bad effort amount", ["integer"] + (["_"] if allow_bottom else []))

    def _annotation(self, t: Term) -> SignedTerm:
        tok = self.lx.next()
        if tok.kind != "(":
            raise self.lx.error(tok, "expected annotation", ["'('"])
        kid = self._kid(self.lx.next())
        eo = self._eo(self.lx.next(), allow_bottom=True)
        tag_tok = self.lx.next()
        m = _HEX64_RE.match(tag_tok.text) if tag_tok.kind == "word" else None
        if not m:
            raise self.lx.error(tag_tok, "bad tag", ["64 hex digits"])
        close = self.lx.next()
        if close.kind != ")":
            raise self.lx.error(close, "expected ')'", ["')'"])
        return SignedTerm(t, kid, eo, bytes.fromhex(m.group(1)))

    def _ledger(self):
        self._open_bag()
        entries = []
        while True:
            tok = self.lx.next()
            if tok.kind == "}":
                return merge_ledger(entries)
            if tok.kind != "(":
                raise self.lx.error(tok, "expected ledger entry", ["'('", "'}'"])
            kid = self._kid(self.lx.next())
            e = self._eo(self.lx.next(), allow_bottom=False)
            close = self.lx.next()
            if close.kind != ")":
                raise self.lx.error(close, "expected ')'", ["')'"])
            entries.append((kid, e))


def _decode(src: Union[str, bytes]) -> str:
    if isinstance(src, bytes):
        try:
            return src.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(SourceSpan(e.start, e.end, 0, e.start), "input is not valid UTF-8") from None
    return src


def _guard(fn, src):
    p = Parser(_decode(src))
    try:
        return fn(p)
    except RecursionError:
        raise p.lx.error(p.lx.pos, "nesting too deep") from None


def parse_term(src: Union[str, bytes]) -> Term:
    def go(p: Parser):
        t = p.term()
        p.expect_eof()
        return t

    return _guard(go, src)


def parse_terms(src: Union[str, bytes]) -> list:
    """A ``.metta`` file: whitespace-separated sequence of terms."""

    def go(p: Parser):
        out = []
        while p.lx.peek().kind != "eof":
            out.append(p.term())
        return out

    return _guard(go, src)


def parse_state(src: Union[str, bytes], mode: Optional[str] = None):
    """Parse a ``.mstate`` file.  ``mode`` may force ``"plain"`` or ``"rb"``."""
    return _guard(lambda p: p.state(mode), src)


# ---------------------------------------------------------------------------
# printer


def _escape(s: str, quote: str) -> str:
    out = [quote]
    for c in s:
        if c == quote or c == "\\":
            out.append("\\" + c)
        elif c == "\n":
            out.append("\\n")
        elif c == "\t":
            out.append("\\t")
        elif c == "\r":
            out.append("\\r")
        elif ord(c) < 0x20 or ord(c) == 0x7F:
            out.append(f"\\u{ord(c):04x}")
        else:
            out.append(c)
    out.append(quote)
    return "".join(out)


def _float_text(x: float) -> str:
    if math.isnan(x):
        return "+nan.0"
    if math.isinf(x):
        return "+inf.0" if x > 0 else "-inf.0"
    return repr(x)


def print_term(t: Term) -> str:
    out: list = []
    _emit(t, out)
    return "".join(out)


def _emit(t: Term, out: list) -> None:
    if isinstance(t, List):
        out.append("(")
        for n, u in enumerate(t.items):
            if n:
                out.append(" ")
            _emit(u, out)
        out.append(")")
    elif isinstance(t, Bag):
        out.append("{")
        for n, u in enumerate(t.items):
            if n:
                out.append(" ")
            _emit(u, out)
        out.append("}")
    elif t is UNIT_LIST:
        out.append("()")
    elif t is UNIT_BAG:
        out.append("{}")
    elif isinstance(t, Var):
        out.append("$" + t.name)
    elif isinstance(t, Wildcard):
        out.append("_")
    elif isinstance(t, Builtin):
        out.append(t.sym.value)
    elif isinstance(t, Sym):
        out.append(t.value)
    elif isinstance(t, Bool):
        out.append("true" if t.value else "false")
    elif isinstance(t, Int):
        out.append(str(t.value))
    elif isinstance(t, UInt):
        out.append(f"{t.value}u")
    elif isinstance(t, Float):
        out.append(_float_text(t.value))
    elif isinstance(t, Str):
        out.append(_escape(t.value, '"'))
    elif isinstance(t, Uri):
        out.append(_escape(t.value, "`"))
    elif isinstance(t, (ListComp, BagComp)):
        opn, cls = ("(", ")") if isinstance(t, ListComp) else ("{", "}")
        out.append(opn)
        _emit(t.head, out)
        out.append(" | ")
        out.append(" ; ".join(_receipt_text(r) for r in t.receipts))
        out.append(" .")
        for b in t.body:
            out.append(" ")
            _emit(b, out)
        out.append(cls)
    else:
        raise TypeError(f"cannot print {type(t).__name__}")


def _name_text(n) -> str:
    if isinstance(n, Quote):
        return "@" + print_term(n.term)
    return print_term(n)


def _receipt_text(r: Receipt) -> str:
    parts = []
    for b in r.binds:
        s = ", ".join(_name_text(n) for n in b.names)
        if b.remainder is not None:
            rem = "... " + ("@" if b.remainder.quoted else "") + print_term(b.remainder.var)
            s = f"{s} {rem}" if s else rem
        src = b.source
        if isinstance(src, AtomSource):
            st = _name_text(src.name)
            if src.mode is SourceMode.CONSUME:
                st += " ?!"
            elif src.mode is SourceMode.SEND:
                st += " !? (" + " ".join(print_term(a) for a in src.args) + ")"
        else:
            st = _name_text(src)
        arrow = r.kind.value
        parts.append(f"{s} {arrow} {st}" if s else f"{arrow} {st}")
    return " & ".join(parts)


def print_signed(x: SignedTerm) -> str:
    if x.kid is None:
        return print_term(x.term)
    eo = "_" if x.eo is None else str(x.eo)
    return f"{print_term(x.term)} ^ ({x.kid} {eo} {x.tag.hex()})"


def print_register(items: tuple) -> str:
    parts = [print_signed(x) if isinstance(x, SignedTerm) else print_term(x) for x in items]
    return "{" + " ".join(parts) + "}"


def print_ledger(eos: tuple) -> str:
    return "{" + " ".join(f"({kid} {e})" for kid, e in eos) + "}"


def print_state(s: Union[State, RState]) -> str:
    lines = [f"{r}: {print_register(s.reg(r))}" for r in REGISTERS]
    if isinstance(s, RState):
        lines.append(f"eos: {print_ledger(s.eos)}")
    return "\n".join(lines) + "\n"

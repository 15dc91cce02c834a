"""Parser for the textual formula grammar.

Variables are lowercase identifiers (an optional trailing prime marks
post-state counters in step relations); quantifiers are written `E x.` and
`A x.`; connectives are /\\, \\/, ~, ->; atoms compare linear terms with
<= < >= > = != or assert divisibility `k | t`.  `#` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError
from .syntax import (
    Formula,
    Term,
    conj,
    disj,
    dvd,
    eq,
    exists,
    forall,
    ge,
    gt,
    implies,
    le,
    lt,
    ne,
    neg,
    num,
    var,
)

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\r\n]+)
    | (?P<comment>\#[^\n]*)
    | (?P<num>[0-9]+)
    | (?P<quant>[EA])(?![a-z0-9])
    | (?P<var>[a-z][a-z0-9]*'?)
    | (?P<op><=|>=|!=|->|/\\|\\/|[<>=~|().+\-*])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str):
    toks = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def advance(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def accept(self, text: str) -> bool:
        t = self.peek()
        if t.kind == "op" and t.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> None:
        t = self.peek()
        if t.kind != "op" or t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.line, t.col)
        self.pos += 1

    def fail(self, message: str):
        t = self.peek()
        raise ParseError(message, t.line, t.col)

    # formula := disjunction ('->' formula)?
    def formula(self) -> Formula:
        lhs = self.disjunction()
        if self.accept("->"):
            return implies(lhs, self.formula())
        return lhs

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.accept("\\/"):
            parts.append(self.conjunction())
        return disj(parts) if len(parts) > 1 else parts[0]

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.accept("/\\"):
            parts.append(self.unary())
        return conj(parts) if len(parts) > 1 else parts[0]

    def unary(self) -> Formula:
        t = self.peek()
        if t.kind == "op" and t.text == "~":
            self.advance()
            return neg(self.unary())
        if t.kind == "quant":
            self.advance()
            v = self.peek()
            if v.kind != "var":
                self.fail("expected a variable after quantifier")
            self.advance()
            self.expect(".")
            body = self.formula()
            return exists(v.text, body) if t.text == "E" else forall(v.text, body)
        return self.atom()

    def atom(self) -> Formula:
        saved = self.pos
        try:
            return self.comparison()
        except ParseError as cmp_err:
            cmp_depth = self.pos
            self.pos = saved
            nxt = self.peek()
            if nxt.kind != "op" or nxt.text != "(":
                raise
            try:
                self.advance()
                f = self.formula()
                self.expect(")")
                return f
            except ParseError:
                # report whichever attempt got further into the input
                if cmp_depth > self.pos:
                    raise cmp_err from None
                raise

    def comparison(self) -> Formula:
        lhs = self.term()
        t = self.peek()
        if t.kind == "op" and t.text == "|":
            if lhs.coeffs or lhs.const < 2:
                raise ParseError("divisibility modulus must be a constant >= 2", t.line, t.col)
            self.advance()
            return dvd(lhs.const, self.term())
        ops = {"<=": le, "<": lt, ">=": ge, ">": gt, "=": eq, "!=": ne}
        if t.kind == "op" and t.text in ops:
            self.advance()
            return ops[t.text](lhs, self.term())
        raise ParseError(f"expected a comparison, found {t.text or 'end of input'!r}", t.line, t.col)

    def term(self) -> Term:
        total = self.factor()
        while True:
            if self.accept("+"):
                total = total.add(self.factor())
            elif self.accept("-"):
                total = total.sub(self.factor())
            else:
                return total

    def factor(self) -> Term:
        total = self.primary()
        while self.accept("*"):
            rhs = self.primary()
            if total.coeffs and rhs.coeffs:
                self.fail("only multiplication by integer constants is supported")
            if rhs.coeffs:
                total, rhs = rhs, total
            total = total.scale(rhs.const)
        return total

    def primary(self) -> Term:
        t = self.peek()
        if t.kind == "num":
            self.advance()
            return num(int(t.text))
        if t.kind == "var":
            self.advance()
            return var(t.text)
        if t.kind == "op" and t.text == "-":
            self.advance()
            return self.primary().neg()
        if t.kind == "op" and t.text == "(":
            self.advance()
            inner = self.term()
            self.expect(")")
            return inner
        raise ParseError(f"expected a term, found {t.text or 'end of input'!r}", t.line, t.col)


def parse_formula(text: str) -> Formula:
    toks = _tokenize(text)
    p = _Parser(toks)
    f = p.formula()
    tail = p.peek()
    if tail.kind != "eof":
        raise ParseError(f"unexpected trailing input {tail.text!r}", tail.line, tail.col)
    return f

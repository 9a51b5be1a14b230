"""Recursive-descent parser for the formula grammar.

::

    formula := quant | impl
    quant   := ("E" | "A") VAR "." formula
    impl    := or ("->" or)?
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "!" unary | quant | atom | "(" formula ")"
    atom    := term "=" term | term "!=" term | "R(" term "," term ")" | "true" | "false"
    term    := ELT ("·" | "*") term | "(" term ")" | VAR

Nested group applications are composed while parsing.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import FormulaSyntaxError, UnboundVariable, UnknownGroupElement
from ..group import FiniteGroup
from .formula import FALSE, TRUE, And, Eq, Exists, Forall, Formula, Implies, Not, Or, Rel, Term

_TOKEN = re.compile(r"\s*(?:(->|!=|[()=!&|.,·*<])|([A-Za-z_][A-Za-z0-9_']*))")


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(1) if m.group(1) else m.start(2)
        if m.group(1):
            toks.append(_Tok("op", "·" if m.group(1) == "*" else m.group(1), start))
        else:
            toks.append(_Tok("id", m.group(2), start))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, group: FiniteGroup, free: set[str] | None):
        self.toks = _tokenize(text)
        self.i = 0
        self.group = group
        self.free = free
        self.bound: list[str] = []

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text:
            raise FormulaSyntaxError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}",
                                     self.tok.pos)
        t = self.tok
        self.i += 1
        return t

    def formula(self) -> Formula:
        if self.tok.kind == "id" and self.tok.text in ("E", "A") and self.peek().kind == "id" \
                and self.peek(2).text == ".":
            return self.quant()
        return self.impl()

    def quant(self) -> Formula:
        q = self.tok.text
        self.i += 1
        var = self.tok.text
        self.i += 1
        self.expect(".")
        self.bound.append(var)
        try:
            body = self.formula()
        finally:
            self.bound.pop()
        return Exists(var, body) if q == "E" else Forall(var, body)

    def impl(self) -> Formula:
        left = self.disj()
        if self.tok.text == "->":
            self.i += 1
            return Implies(left, self.disj())
        return left

    def disj(self) -> Formula:
        args = [self.conj()]
        while self.tok.text == "|":
            self.i += 1
            args.append(self.conj())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conj(self) -> Formula:
        args = [self.unary()]
        while self.tok.text == "&":
            self.i += 1
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self) -> Formula:
        t = self.tok
        if t.text == "!":
            self.i += 1
            return Not(self.unary())
        if t.kind == "id" and t.text in ("E", "A") and self.peek().kind == "id" \
                and self.peek(2).text == ".":
            return self.quant()
        if t.text == "(":
            save = self.i
            try:
                return self.atom()
            except FormulaSyntaxError:
                self.i = save
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    def atom(self) -> Formula:
        t = self.tok
        if t.kind == "id" and t.text == "true":
            self.i += 1
            return TRUE
        if t.kind == "id" and t.text == "false":
            self.i += 1
            return FALSE
        if t.kind == "id" and t.text == "R" and self.peek().text == "(":
            self.i += 2
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(")")
            return Rel("R", a, b)
        a = self.term()
        op = self.tok
        if op.text == "=":
            self.i += 1
            return Eq(a, self.term())
        if op.text == "!=":
            self.i += 1
            return Not(Eq(a, self.term()))
        raise FormulaSyntaxError(f"expected '=' or '!=' after term, found {op.text or 'end of input'!r}",
                                 op.pos)

    def term(self) -> Term:
        t = self.tok
        if t.text == "(":
            self.i += 1
            inner = self.term()
            self.expect(")")
            return inner
        if t.kind != "id":
            raise FormulaSyntaxError(f"expected a term, found {t.text or 'end of input'!r}", t.pos)
        if self.peek().text == "·":
            try:
                g = self.group.index(t.text)
            except KeyError:
                raise UnknownGroupElement(f"unknown group element {t.text!r} at position {t.pos}") \
                    from None
            self.i += 2
            return self.term().apply(self.group, g)
        if t.text in ("E", "A", "R", "true", "false"):
            raise FormulaSyntaxError(f"reserved word {t.text!r} used as a variable", t.pos)
        self.i += 1
        var = t.text
        if self.free is not None and var not in self.bound and var not in self.free:
            raise UnboundVariable(f"variable {var!r} at position {t.pos} is not bound")
        return Term(var, self.group.identity)


def parse(text: str, group: FiniteGroup, free: set[str] | frozenset[str] | None = None) -> Formula:
    """Parse ``text``; with ``free`` given, any other unbound variable is an error."""
    p = _Parser(text, group, set(free) if free is not None else None)
    f = p.formula()
    if p.tok.kind != "eof":
        raise FormulaSyntaxError(f"unexpected {p.tok.text!r}", p.tok.pos)
    return f

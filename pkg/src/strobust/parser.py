"""Recursive-descent parser for the textual spec format.

Grammar (whitespace-insensitive, ``#`` starts a comment)::

    formula  := term ('||' term)*
    term     := factor ('&&' factor)*
    factor   := NAME ':' factor
              | 'G' interval factor | 'F' interval factor
              | '(' formula 'U' interval formula ')'
              | '(' formula ')'
              | atom
    interval := '[' INT (','|';') (INT|'inf') ']' | '{' INT '}' | '>=' INT
    atom     := 'true'
              | ('sd_out'|'sd_in') '(' region ['@' VAR (',' VAR)*] ')' CMP '0'
              | affine CMP affine
    region   := 'box(' ('[' NUM ',' NUM ']') (',' ...)* ')'
              | 'ball(' '[' NUM,... ']' ';' NUM ')'
              | 'halfspace(' '[' NUM,... ']' ';' NUM ')'
              | 'poly(' halfspace (',' halfspace)* ')'
              | 'union(' region (',' region)* ')'
    CMP      := '>' | '>=' | '<' | '<='

Strict comparisons are read as non-strict ones. ``<`` forms are normalised
so that every predicate reads ``h >= 0``.
"""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass

from .errors import DimensionError, NegationRejected, SpecSyntaxError
from .formula import (
    Always, And, Atom, Eventually, Interval, Linear, Or, Orientation,
    SignedDistance, TrueF, Until,
)
from .regions import Ball, Box, Halfspace, Polytope, Union

KEYWORDS = {"G", "F", "U", "true", "inf", "sd_out", "sd_in",
            "box", "ball", "halfspace", "poly", "union"}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>&&|\|\||>=|<=|[><()\[\]{},;:@*+\-])
  | (?P<bang>!)
""", re.VERBOSE)

_VAR = re.compile(r"x([0-9]+)$")


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text, source=None):
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise SpecSyntaxError(f"unexpected character {text[pos]!r}", line, col, source)
        kind = m.lastgroup
        tok = m.group()
        if kind == "bang":
            raise NegationRejected(
                "negation is not supported; rewrite the spec in positive normal form",
                line, col, source)
        if kind != "ws":
            tokens.append(Token(kind, tok, line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text, n, source):
        self.toks = tokenize(text, source)
        self.i = 0
        self.n = n
        self.source = source

    # -- token helpers

    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None, cls=SpecSyntaxError):
        tok = tok or self.tok
        return cls(msg, tok.line, tok.col, self.source)

    def at(self, text):
        return self.tok.kind in ("op", "name") and self.tok.text == text

    def accept(self, text):
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")

    def number(self):
        neg = False
        while self.tok.text in ("-", "+") and self.tok.kind == "op":
            neg ^= self.tok.text == "-"
            self.i += 1
        if self.tok.kind == "name" and self.tok.text == "inf":
            self.i += 1
            return -math.inf if neg else math.inf
        if self.tok.kind != "num":
            raise self.error(f"expected a number, found {self.tok.text or 'end of input'!r}")
        v = float(self.tok.text)
        self.i += 1
        return -v if neg else v

    def integer(self):
        tok = self.tok
        if tok.kind != "num" or not tok.text.isdigit():
            raise self.error(f"expected a non-negative integer, found {tok.text or 'end of input'!r}")
        self.i += 1
        return int(tok.text)

    def var(self):
        tok = self.tok
        m = _VAR.match(tok.text) if tok.kind == "name" else None
        if m is None:
            raise self.error(f"expected a variable like x1, found {tok.text or 'end of input'!r}")
        idx = int(m.group(1))
        if idx < 1:
            raise self.error("variables are numbered from x1", tok)
        if idx > self.n:
            raise self.error(
                f"x{idx} exceeds the signal dimension {self.n}", tok, DimensionError)
        self.i += 1
        return idx - 1

    # -- grammar

    def parse(self):
        f = self.formula()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return f

    def formula(self):
        parts = [self.term()]
        while self.accept("||"):
            parts.append(self.term())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def term(self):
        parts = [self.factor()]
        while self.accept("&&"):
            parts.append(self.factor())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def factor(self):
        tok = self.tok
        if (tok.kind == "name" and tok.text not in KEYWORDS
                and not _VAR.match(tok.text) and self.peek().text == ":"):
            self.i += 2
            inner = self.factor()
            if inner.label is not None:
                raise self.error("a subformula can carry only one label", tok)
            return _relabel(inner, tok.text)
        if self.at("G") or self.at("F"):
            self.i += 1
            iv = self.interval(allow_inf=True)
            child = self.factor()
            return Always(iv, child) if tok.text == "G" else Eventually(iv, child)
        if self.at("("):
            self.i += 1
            inner = self.formula()
            if self.at("U"):
                self.i += 1
                iv = self.interval(allow_inf=False)
                right = self.formula()
                self.expect(")")
                return Until(iv, inner, right)
            self.expect(")")
            return inner
        return self.atom()

    def interval(self, allow_inf):
        start = self.tok
        if self.accept(">="):
            if not allow_inf:
                raise self.error("until needs a bounded interval", start)
            return Interval(self.integer(), math.inf)
        if self.accept("{"):
            c = self.integer()
            self.expect("}")
            return Interval(c, c)
        self.expect("[")
        a = self.integer()
        if not (self.accept(",") or self.accept(";")):
            raise self.error("expected ',' inside the interval")
        if self.at("inf"):
            if not allow_inf:
                raise self.error("until needs a bounded interval")
            self.i += 1
            b = math.inf
        else:
            b = self.integer()
        self.expect("]")
        if a > b:
            raise self.error(f"empty interval [{a},{b}]", start)
        return Interval(a, b)

    def comparison(self):
        tok = self.tok
        if tok.kind == "op" and tok.text in (">", ">=", "<", "<="):
            self.i += 1
            return tok.text
        raise self.error(f"expected a comparison, found {tok.text or 'end of input'!r}")

    def atom(self):
        tok = self.tok
        if self.accept("true"):
            return TrueF()
        if self.at("sd_out") or self.at("sd_in"):
            return self.sd_atom()
        lhs = self.affine()
        cmp = self.comparison()
        rhs = self.affine()
        coef = [0.0] * self.n
        sign = 1.0 if cmp in (">", ">=") else -1.0
        for d, c in lhs[0].items():
            coef[d] += sign * c
        for d, c in rhs[0].items():
            coef[d] -= sign * c
        offset = sign * (lhs[1] - rhs[1])
        if not any(coef):
            raise self.error("comparison does not mention any variable", tok)
        return Atom(Linear(tuple(coef), offset))

    def affine(self):
        coefs, const = {}, 0.0
        sign = 1.0
        if self.tok.text in ("+", "-") and self.tok.kind == "op":
            sign = -1.0 if self.tok.text == "-" else 1.0
            self.i += 1
        while True:
            if self.tok.kind == "num":
                v = float(self.tok.text)
                self.i += 1
                if self.accept("*"):
                    d = self.var()
                    coefs[d] = coefs.get(d, 0.0) + sign * v
                else:
                    const += sign * v
            elif self.tok.kind == "name" and _VAR.match(self.tok.text):
                d = self.var()
                coefs[d] = coefs.get(d, 0.0) + sign
            else:
                raise self.error(
                    f"expected a number or variable, found {self.tok.text or 'end of input'!r}")
            if self.at("+"):
                sign = 1.0
            elif self.at("-"):
                sign = -1.0
            else:
                return coefs, const
            self.i += 1

    def sd_atom(self):
        fn = self.tok.text
        self.i += 1
        self.expect("(")
        start = self.tok
        region = self.region()
        dims = None
        if self.accept("@"):
            dims = [self.var()]
            while self.accept(","):
                dims.append(self.var())
            if len(dims) != region.dim:
                raise self.error(
                    f"region is {region.dim}-dimensional but {len(dims)} variables given", start)
        elif region.dim > self.n:
            raise self.error(
                f"{region.dim}-dimensional region on a {self.n}-dimensional signal",
                start, DimensionError)
        self.expect(")")
        cmp = self.comparison()
        zero = self.tok
        if self.number() != 0:
            raise self.error("region predicates compare against 0", zero)
        outside = (fn == "sd_out") == (cmp in (">", ">="))
        orient = Orientation.AVOID if outside else Orientation.REACH
        if isinstance(region, Union) and orient is Orientation.REACH:
            raise self.error("unions may only be avoided (use sd_out(...) > 0)", start)
        return Atom(SignedDistance(region, orient, None if dims is None else tuple(dims)))

    def vector(self):
        self.expect("[")
        vals = [self.number()]
        while self.accept(","):
            vals.append(self.number())
        self.expect("]")
        return vals

    def region(self):
        tok = self.tok
        kind = tok.text if tok.kind == "name" else None
        if kind not in ("box", "ball", "halfspace", "poly", "union"):
            raise self.error(f"expected a region, found {tok.text or 'end of input'!r}")
        self.i += 1
        self.expect("(")
        try:
            if kind == "box":
                bounds = [self.vector()]
                while self.accept(","):
                    bounds.append(self.vector())
                if any(len(b) != 2 for b in bounds):
                    raise self.error("box bounds are [lo,hi] pairs", tok)
                r = Box([b[0] for b in bounds], [b[1] for b in bounds])
            elif kind in ("ball", "halfspace"):
                vec = self.vector()
                self.expect(";")
                v = self.number()
                r = Ball(vec, v) if kind == "ball" else Halfspace(vec, v)
            else:
                members = [self.region()]
                while self.accept(","):
                    members.append(self.region())
                if kind == "poly":
                    if not all(isinstance(m, Halfspace) for m in members):
                        raise self.error("poly(...) takes halfspaces", tok)
                    r = Polytope(tuple(members))
                else:
                    r = Union(tuple(members))
        except ValueError as exc:
            raise self.error(str(exc), tok) from None
        self.expect(")")
        return r


def _relabel(node, label):
    return dataclasses.replace(node, label=label)


def parse_spec(text: str, n: int, source: str | None = None):
    """Parse ``text`` into a formula over an ``n``-dimensional signal."""
    if n < 1:
        raise ValueError("signal dimension must be positive")
    return _Parser(text, n, source).parse()

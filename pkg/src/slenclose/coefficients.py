"""
Coefficient functions built from polynomial and trigonometric terms.

All coefficients are exact rationals, so interval evaluation and the closed
form Gram integrals start from exact data. Text form accepted by the parser:

    4 + 4*cos(2x)          poly(1000,1)          8*cos(x)^2
    x^2 - 1/3*x            0 on [0,1/2]; 100 on [1/2,1]
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Literal, Optional, Sequence, Tuple, Union

from src.core.errors import ConfigError, DomainError
from src.ival import interval as iv
from src.ival.interval import Interval


@dataclass(frozen=True)
class Poly:
    coeff: Fraction
    degree: int


@dataclass(frozen=True)
class Trig:
    kind: Literal["sin", "cos"]
    omega: Fraction
    coeff: Fraction


Term = Union[Poly, Trig]


def _term_value(term: Term, x: Interval) -> Interval:
    if isinstance(term, Poly):
        return Interval.exact(term.coeff) * (x ** term.degree)
    arg = x * Interval.exact(term.omega)
    fn = iv.cos if term.kind == "cos" else iv.sin
    return Interval.exact(term.coeff) * fn(arg)


def evaluate_terms(terms: Sequence[Term], x: Interval) -> Interval:
    total = Interval(0.0)
    for term in terms:
        total = total + _term_value(term, x)
    return total


def derivative_terms(terms: Sequence[Term]) -> List[Term]:
    out: List[Term] = []
    for term in terms:
        if isinstance(term, Poly):
            if term.degree > 0:
                out.append(Poly(term.coeff * term.degree, term.degree - 1))
        elif term.kind == "cos":
            out.append(Trig("sin", term.omega, -term.coeff * term.omega))
        else:
            out.append(Trig("cos", term.omega, term.coeff * term.omega))
    return [t for t in out if t.coeff != 0]


@dataclass(frozen=True)
class Piece:
    """Terms valid on [start, end]; endpoints in the problem's length unit"""

    start: Fraction
    end: Fraction
    terms: Tuple[Term, ...]


@dataclass(frozen=True)
class CoefficientFn:
    pieces: Tuple[Piece, ...]

    @classmethod
    def constant(cls, value, start: Fraction, end: Fraction) -> "CoefficientFn":
        return cls((Piece(Fraction(start), Fraction(end), (Poly(Fraction(value), 0),)),))

    @property
    def is_single_piece(self) -> bool:
        return len(self.pieces) == 1

    @property
    def breakpoints(self) -> List[Fraction]:
        """Interior piece boundaries"""
        return [p.start for p in self.pieces[1:]]

    @property
    def is_constant(self) -> bool:
        return all(
            all(isinstance(t, Poly) and t.degree == 0 for t in p.terms) for p in self.pieces
        )

    def pieces_on(self, lo: Fraction, hi: Fraction) -> List[Piece]:
        """Pieces overlapping (lo, hi) in their interior, clipped to the cell"""
        out = []
        for p in self.pieces:
            start = max(p.start, lo)
            end = min(p.end, hi)
            if start < end:
                out.append(Piece(start, end, p.terms))
        return out

    def range_on(self, lo: Fraction, hi: Fraction, unit: Interval) -> Interval:
        """Enclosure of the function over x in unit*[lo, hi]"""
        ranges = []
        for p in self.pieces_on(lo, hi):
            x = Interval.exact(p.start).hull(Interval.exact(p.end)) * unit
            ranges.append(evaluate_terms(p.terms, x))
        if not ranges:
            raise DomainError("coefficient undefined on cell", lo=str(lo), hi=str(hi))
        return Interval.hull_of(ranges)

    def covers(self, lo: Fraction, hi: Fraction) -> bool:
        if not self.pieces:
            return False
        if self.pieces[0].start > lo or self.pieces[-1].end < hi:
            return False
        return all(a.end == b.start for a, b in zip(self.pieces, self.pieces[1:]))


# parsing

_NUMBER = r"\d+(?:\.\d+)?(?:/\d+)?"
_TOKEN = re.compile(
    rf"\s*(?:(?P<num>{_NUMBER})|(?P<name>poly|cos|sin|x)|(?P<op>\*\*|[-+*/^(),]))"
)


class _Parser:
    """Recursive descent over sums of products of numbers, x^k, poly(), cos(), sin()"""

    def __init__(self, text: str, field: Optional[str]):
        self.text = text
        self.field = field
        self.tokens = self._tokenize(text)
        self.pos = 0

    def _fail(self, message: str):
        raise ConfigError(f"{message} in coefficient {self.text!r}", field=self.field)

    def _tokenize(self, text: str) -> List[Tuple[str, str]]:
        tokens = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m or m.end() == pos:
                self._fail(f"unexpected character at position {pos}")
            kind = m.lastgroup
            tokens.append((kind, m.group(kind)))
            pos = m.end()
        return tokens

    def peek(self) -> Optional[Tuple[str, str]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def peek_value(self) -> Optional[str]:
        tok = self.peek()
        return tok[1] if tok else None

    def take(self, value: Optional[str] = None) -> Tuple[str, str]:
        tok = self.peek()
        if tok is None or (value is not None and tok[1] != value):
            self._fail(f"expected {value or 'more input'}")
        self.pos += 1
        return tok

    def parse(self) -> List[Term]:
        terms = self.expr()
        if self.peek() is not None:
            self._fail(f"unexpected {self.peek_value()!r}")
        return _collect(terms)

    def expr(self) -> List[Term]:
        sign = Fraction(1)
        if self.peek_value() in ("+", "-"):
            sign = Fraction(-1) if self.take()[1] == "-" else Fraction(1)
        terms = [_scale(t, sign) for t in self.product()]
        while self.peek_value() in ("+", "-"):
            sign = Fraction(-1) if self.take()[1] == "-" else Fraction(1)
            terms.extend(_scale(t, sign) for t in self.product())
        return terms

    def product(self) -> List[Term]:
        terms = self.factor()
        while True:
            nxt = self.peek()
            if nxt is None:
                return terms
            if nxt[1] == "*":
                self.take("*")
                terms = _multiply(terms, self.factor(), self)
            elif nxt[1] == "/":
                self.take("/")
                divisor = self._number()
                if divisor == 0:
                    self._fail("division by zero")
                terms = [_scale(t, 1 / divisor) for t in terms]
            elif nxt[0] in ("name", "num") or nxt[1] == "(":
                # implicit product such as 2x or 4cos(x)
                terms = _multiply(terms, self.factor(), self)
            else:
                return terms

    def factor(self) -> List[Term]:
        kind, value = self.peek() or (None, None)
        if kind == "num":
            return [Poly(self._number(), 0)]
        if value == "(":
            self.take("(")
            inner = self.expr()
            self.take(")")
            return inner
        if kind == "name":
            return self._atom()
        self._fail(f"unexpected {value!r}")

    def _number(self) -> Fraction:
        kind, value = self.take()
        if kind != "num":
            self._fail(f"expected a number, got {value!r}")
        return Fraction(value)

    def _power(self) -> int:
        if self.peek_value() in ("^", "**"):
            self.take()
            exponent = self._number()
            if exponent.denominator != 1:
                self._fail("exponent must be a non-negative integer")
            return int(exponent)
        return 1

    def _signed_number(self) -> Fraction:
        sign = Fraction(1)
        if self.peek_value() == "-":
            self.take("-")
            sign = Fraction(-1)
        value = self._number()
        if self.peek_value() == "/":
            self.take("/")
            value /= self._number()
        return sign * value

    def _atom(self) -> List[Term]:
        _, name = self.take()
        if name == "x":
            return [Poly(Fraction(1), self._power())]
        if name == "poly":
            self.take("(")
            coeff = self._signed_number()
            self.take(",")
            degree = self._number()
            self.take(")")
            if degree.denominator != 1:
                self._fail("poly degree must be an integer")
            return [Poly(coeff, int(degree))]
        self.take("(")
        omega = Fraction(1)
        if self.peek() and self.peek()[0] == "num":
            omega = self._number()
            if self.peek_value() == "/":
                self.take("/")
                omega /= self._number()
            if self.peek_value() == "*":
                self.take("*")
        self.take("x")
        self.take(")")
        power = self._power()
        if power == 1:
            return [Trig(name, omega, Fraction(1))]
        if power == 2:
            # cos^2 = (1 + cos 2u)/2, sin^2 = (1 - cos 2u)/2
            half = Fraction(1, 2)
            return [Poly(half, 0), Trig("cos", 2 * omega, half if name == "cos" else -half)]
        self._fail("trigonometric powers above 2 are not supported")


def _scale(term: Term, factor: Fraction) -> Term:
    if isinstance(term, Poly):
        return Poly(term.coeff * factor, term.degree)
    return Trig(term.kind, term.omega, term.coeff * factor)


def _multiply(left: List[Term], right: List[Term], parser: _Parser) -> List[Term]:
    out: List[Term] = []
    for a in left:
        for b in right:
            if isinstance(a, Poly) and isinstance(b, Poly):
                out.append(Poly(a.coeff * b.coeff, a.degree + b.degree))
            elif isinstance(a, Poly) and a.degree == 0:
                out.append(_scale(b, a.coeff))
            elif isinstance(b, Poly) and b.degree == 0:
                out.append(_scale(a, b.coeff))
            else:
                parser._fail("only constant multiples of trigonometric terms are supported")
    return out


def _collect(terms: List[Term]) -> List[Term]:
    """Merge like terms and drop zeros"""
    acc = {}
    order = []
    for t in terms:
        if isinstance(t, Trig) and t.omega == 0:
            t = Poly(t.coeff if t.kind == "cos" else Fraction(0), 0)
        if isinstance(t, Trig) and t.omega < 0:
            t = Trig(t.kind, -t.omega, t.coeff if t.kind == "cos" else -t.coeff)
        key = ("poly", t.degree) if isinstance(t, Poly) else (t.kind, t.omega)
        if key not in acc:
            order.append(key)
            acc[key] = t
        else:
            acc[key] = _add_coeff(acc[key], t)
    return [acc[k] for k in order if acc[k].coeff != 0]


def _add_coeff(a: Term, b: Term) -> Term:
    if isinstance(a, Poly):
        return Poly(a.coeff + b.coeff, a.degree)
    return Trig(a.kind, a.omega, a.coeff + b.coeff)


def parse_terms(text: str, field: Optional[str] = None) -> List[Term]:
    text = text.strip()
    if not text:
        raise ConfigError("empty coefficient", field=field)
    return _Parser(text, field).parse()


_PIECE = re.compile(r"^(?P<expr>.+?)\s+on\s+\[\s*(?P<lo>[^,\]]+)\s*,\s*(?P<hi>[^\]]+)\]\s*$")


def parse_coefficient(text: str, start: Fraction, end: Fraction, field: Optional[str] = None) -> CoefficientFn:
    """
    Parse a coefficient over [start, end]. Pieces are separated by ';' and
    written as `expr on [a,b]`; a single expression without a range covers
    the whole domain.
    """
    parts = [p.strip() for p in text.split(";") if p.strip()]
    if not parts:
        raise ConfigError("empty coefficient", field=field)
    if len(parts) == 1 and not _PIECE.match(parts[0]):
        return CoefficientFn((Piece(Fraction(start), Fraction(end), tuple(parse_terms(parts[0], field))),))
    pieces = []
    for part in parts:
        m = _PIECE.match(part)
        if not m:
            raise ConfigError(f"piece {part!r} needs an 'on [a,b]' range", field=field)
        try:
            lo, hi = Fraction(m.group("lo").strip()), Fraction(m.group("hi").strip())
        except ValueError as exc:
            raise ConfigError(f"bad piece range in {part!r}", field=field) from exc
        pieces.append(Piece(lo, hi, tuple(parse_terms(m.group("expr"), field))))
    pieces.sort(key=lambda p: p.start)
    fn = CoefficientFn(tuple(pieces))
    if not fn.covers(Fraction(start), Fraction(end)):
        raise ConfigError("coefficient pieces must tile the domain without gaps", field=field)
    return fn


def format_terms(terms: Sequence[Term]) -> str:
    parts = []
    for t in terms:
        if isinstance(t, Poly):
            parts.append(f"{t.coeff}" if t.degree == 0 else f"{t.coeff}*x^{t.degree}")
        else:
            parts.append(f"{t.coeff}*{t.kind}({t.omega}x)")
    return " + ".join(parts) if parts else "0"

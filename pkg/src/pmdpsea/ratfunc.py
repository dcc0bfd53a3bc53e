"""Exact multivariate rational functions in canonical form.

Every :class:`RationalFunction` is reduced on construction: numerator and
denominator share no non-unit factor, their integer coefficients are
jointly coprime, and the denominator's leading coefficient (graded lex
order) is positive.  Equal functions therefore have equal structure, which
is what wave deduplication relies on.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Callable, Mapping, Sequence, Tuple, Union

from . import polynomial as P
from .polynomial import Polynomial, Terms

Number = Union[int, Fraction]


class PoleError(ZeroDivisionError):
    """The denominator vanishes at the requested valuation."""


class ExpressionError(ValueError):
    """Malformed expression text or an unknown parameter name."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


def _canonical(num: Terms, den: Terms, nvars: int) -> Tuple[Terms, Terms]:
    if not den:
        raise ZeroDivisionError("rational function with zero denominator")
    if not num:
        return {}, P.const(1, nvars)
    num, mn = P.clear_denominators(num)
    den, md = P.clear_denominators(den)
    if mn != md:
        # num/den scaled by mn and md respectively; restore the ratio.
        num = P.scale(num, md)
        den = P.scale(den, mn)
    g = _common_factor(num, den)
    if g is not None:
        num = P.divide_exact(num, g)
        den = P.divide_exact(den, g)
    c = math.gcd(P.integer_content(num), P.integer_content(den))
    if den[P.leading(den)] < 0:
        c = -c
    if c != 1:
        num = {m: v // c for m, v in num.items()}
        den = {m: v // c for m, v in den.items()}
    return num, den


def _common_factor(num: Terms, den: Terms) -> Terms | None:
    # Fast paths first: constant sides, monomial sides, exact divisibility.
    if P._is_constant(den) or P._is_constant(num):
        return None
    if len(den) == 1 or len(num) == 1:
        g = P._monomial_gcd(num, den)
        return None if not any(next(iter(g))) else g
    if len(den) <= len(num):
        try:
            P.divide_exact(num, den)
            return P.primitive(den)
        except P.NotExactError:
            pass
    g = P._gcd(num, den)
    if P._is_constant(g):
        return None
    return g


class RationalFunction:
    """Quotient of two polynomials over an ordered parameter list."""

    __slots__ = ("num", "den", "parameters", "_hash", "_maxexp")

    def __init__(self, numerator, denominator=1, parameters: Sequence[str] | None = None):
        if isinstance(numerator, Polynomial):
            parameters = numerator.parameters if parameters is None else tuple(parameters)
            num = numerator.terms
        else:
            if parameters is None:
                raise ValueError("parameters required")
            parameters = tuple(parameters)
            num = dict(numerator) if isinstance(numerator, Mapping) else P.const(numerator, len(parameters))
        if isinstance(denominator, Polynomial):
            if denominator.parameters != parameters:
                raise ValueError("parameter lists differ")
            den = denominator.terms
        elif isinstance(denominator, Mapping):
            den = dict(denominator)
        else:
            den = P.const(denominator, len(parameters))
        num, den = _canonical(num, den, len(parameters))
        self._set(num, den, parameters)

    def _set(self, num: Terms, den: Terms, parameters: Tuple[str, ...]) -> None:
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "parameters", parameters)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_maxexp", None)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    def __reduce__(self):
        return (_rebuild, (self.num, self.den, self.parameters))

    @classmethod
    def _from_canonical(cls, num: Terms, den: Terms, parameters: Tuple[str, ...]) -> "RationalFunction":
        out = cls.__new__(cls)
        out._set(num, den, parameters)
        return out

    @classmethod
    def _make(cls, num: Terms, den: Terms, parameters: Tuple[str, ...]) -> "RationalFunction":
        num, den = _canonical(num, den, len(parameters))
        return cls._from_canonical(num, den, parameters)

    @classmethod
    def constant(cls, c: Number, parameters: Sequence[str]) -> "RationalFunction":
        c = Fraction(c)
        parameters = tuple(parameters)
        n = len(parameters)
        return cls._from_canonical(P.const(c.numerator, n), P.const(c.denominator, n), parameters)

    @classmethod
    def variable(cls, name: str, parameters: Sequence[str]) -> "RationalFunction":
        return cls(Polynomial.variable(name, parameters))

    # -- structure ----------------------------------------------------------

    @property
    def numerator(self) -> Polynomial:
        return Polynomial(self.num, self.parameters)

    @property
    def denominator(self) -> Polynomial:
        return Polynomial(self.den, self.parameters)

    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.num == self.den

    def is_constant(self) -> bool:
        return P._is_constant(self.den) and (not self.num or P._is_constant(self.num))

    def is_polynomial(self) -> bool:
        return P._is_constant(self.den)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        if not self.num:
            return Fraction(0)
        return Fraction(next(iter(self.num.values())), next(iter(self.den.values())))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.parameters == other.parameters and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            h = hash((self.parameters, frozenset(self.num.items()), frozenset(self.den.items())))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def __repr__(self):
        return f"RationalFunction({format_expression(self)!r}, {self.parameters!r})"

    def __str__(self):
        return format_expression(self)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.parameters != self.parameters:
                raise ValueError(f"parameter lists differ: {self.parameters} vs {other.parameters}")
            return other
        if isinstance(other, (int, Fraction)):
            return RationalFunction.constant(other, self.parameters)
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(self, other, P.add)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(self, other, P.sub)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(other, self, P.sub)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _mul(self, other.reciprocal())

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _mul(other, self.reciprocal())

    def __neg__(self):
        return RationalFunction._from_canonical(P.neg(self.num), self.den, self.parameters)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.reciprocal()
        k = abs(n)
        nv = len(self.parameters)
        # Powers of a reduced fraction stay reduced; only the sign needs care.
        num = P.power(base.num, k, nv)
        den = P.power(base.den, k, nv)
        return RationalFunction._from_canonical(num, den, self.parameters)

    def reciprocal(self) -> "RationalFunction":
        if not self.num:
            raise ZeroDivisionError("division by the zero function")
        num, den = self.den, self.num
        if den[P.leading(den)] < 0:
            num, den = P.neg(num), P.neg(den)
        return RationalFunction._from_canonical(num, den, self.parameters)

    # -- evaluation ---------------------------------------------------------

    def _max_exponents(self) -> Tuple[int, ...]:
        if self._maxexp is None:
            n = len(self.parameters)
            mx = [0] * n
            for terms in (self.num, self.den):
                for m in terms:
                    for i, e in enumerate(m):
                        if e > mx[i]:
                            mx[i] = e
            object.__setattr__(self, "_maxexp", tuple(mx))
        return self._maxexp

    def evaluate_tuple(self, values: Sequence[Number]) -> Fraction:
        """Exact value at a point given in parameter order.

        Coordinates a/d are cleared to integers by scaling both polynomials
        with the same product of d**maxexp, so the whole evaluation is done
        in integer arithmetic.
        """
        mx = self._max_exponents()
        pows_a = []
        pows_d = []
        for v, e in zip(values, mx):
            v = Fraction(v)
            a, d = v.numerator, v.denominator
            pa = [1] * (e + 1)
            pd = [1] * (e + 1)
            for k in range(1, e + 1):
                pa[k] = pa[k - 1] * a
                pd[k] = pd[k - 1] * d
            pows_a.append(pa)
            pows_d.append(pd)
        ranges = list(zip(pows_a, pows_d, mx))

        def scaled(terms: Terms) -> int:
            total = 0
            for m, c in terms.items():
                t = c
                for (pa, pd, e), k in zip(ranges, m):
                    t *= pa[k] * pd[e - k]
                total += t
            return total

        d = scaled(self.den)
        if d == 0:
            raise PoleError(f"pole of {self} at {tuple(str(Fraction(v)) for v in values)}")
        return Fraction(scaled(self.num), d)

    def __call__(self, valuation: Mapping[str, Number]) -> Fraction:
        return evaluate(self, valuation)

    def substitute(self, mapping: Mapping[str, "RationalFunction"], parameters: Sequence[str]) -> "RationalFunction":
        """Compose: replace each parameter by a rational function over ``parameters``.

        Parameters absent from ``mapping`` must exist in ``parameters`` and map to
        themselves.
        """
        parameters = tuple(parameters)
        images = []
        for name in self.parameters:
            if name in mapping:
                img = mapping[name]
                if img.parameters != parameters:
                    raise ValueError(f"image of {name} uses parameters {img.parameters}")
            else:
                img = RationalFunction.variable(name, parameters)
            images.append(img)

        def poly(terms: Terms) -> RationalFunction:
            total = RationalFunction.constant(0, parameters)
            for m, c in terms.items():
                t = RationalFunction.constant(c, parameters)
                for img, e in zip(images, m):
                    if e:
                        t = t * img ** e
                total = total + t
            return total

        return poly(self.num) / poly(self.den)


def _rebuild(num, den, parameters):
    return RationalFunction._from_canonical(num, den, parameters)


def _add(f: RationalFunction, g: RationalFunction, op: Callable[[Terms, Terms], Terms]) -> RationalFunction:
    params = f.parameters
    if not g.num:
        return f
    if not f.num:
        return g if op is P.add else -g
    if f.den == g.den:
        return RationalFunction._make(op(f.num, g.num), f.den, params)
    if P._is_constant(f.den) and P._is_constant(g.den):
        cf = next(iter(f.den.values()))
        cg = next(iter(g.den.values()))
        num = op(P.scale(f.num, cg), P.scale(g.num, cf))
        return RationalFunction._make(num, P.const(cf * cg, len(params)), params)
    # a/b + c/d = (a*(d/h) + c*(b/h)) / (b*d/h) with h = gcd(b, d)
    h = P._gcd(f.den, g.den) if not (P._is_constant(f.den) or P._is_constant(g.den)) else None
    if h is None or P._is_constant(h):
        num = op(P.mul(f.num, g.den), P.mul(g.num, f.den))
        den = P.mul(f.den, g.den)
    else:
        bf = P.divide_exact(f.den, h)
        dg = P.divide_exact(g.den, h)
        num = op(P.mul(f.num, dg), P.mul(g.num, bf))
        den = P.mul(bf, g.den)
    return RationalFunction._make(num, den, params)


def _mul(f: RationalFunction, g: RationalFunction) -> RationalFunction:
    params = f.parameters
    if not f.num or not g.num:
        return RationalFunction.constant(0, params)
    if f.is_one():
        return g
    if g.is_one():
        return f
    # cross-cancel before multiplying; both inputs are already reduced
    a, b = f.num, f.den
    c, d = g.num, g.den
    g1 = _common_factor(a, d)
    if g1 is not None:
        a, d = P.divide_exact(a, g1), P.divide_exact(d, g1)
    g2 = _common_factor(c, b)
    if g2 is not None:
        c, b = P.divide_exact(c, g2), P.divide_exact(b, g2)
    num = P.mul(a, c)
    den = P.mul(b, d)
    # only integer content and sign remain to be normalized
    num, den = _normalize_scalars(num, den)
    return RationalFunction._from_canonical(num, den, params)


def _normalize_scalars(num: Terms, den: Terms) -> Tuple[Terms, Terms]:
    num, mn = P.clear_denominators(num)
    den, md = P.clear_denominators(den)
    if mn != md:
        num = P.scale(num, md)
        den = P.scale(den, mn)
    c = math.gcd(P.integer_content(num), P.integer_content(den))
    if den[P.leading(den)] < 0:
        c = -c
    if c != 1:
        num = {m: v // c for m, v in num.items()}
        den = {m: v // c for m, v in den.items()}
    return num, den


_OPS = {
    "add": lambda f, g: f + g,
    "sub": lambda f, g: f - g,
    "mul": lambda f, g: f * g,
    "div": lambda f, g: f / g,
}


def combine(op: str, f: RationalFunction, g: RationalFunction) -> RationalFunction:
    """Apply ``add``, ``sub``, ``mul`` or ``div`` and return the canonical result."""
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    return fn(f, g)


def gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    return P.gcd(a, b)


def evaluate(f: RationalFunction, valuation: Mapping[str, Number]) -> Fraction:
    """Exact value of ``f`` at ``valuation``; raises :class:`PoleError` at a pole."""
    try:
        values = [valuation[name] for name in f.parameters]
    except KeyError as exc:
        raise KeyError(f"valuation does not assign parameter {exc.args[0]!r}") from None
    return f.evaluate_tuple(values)


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        value = m.group(kind)
        if value == "**":
            value = "^"
        tokens.append((kind, value, m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, parameters: Tuple[str, ...]):
        self.text = text
        self.parameters = parameters
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, v, pos = self.take()
        if v != value:
            raise ExpressionError(f"expected {value!r}, found {v or 'end of input'!r}", pos)

    def parse(self) -> RationalFunction:
        if self.peek()[0] == "end":
            raise ExpressionError("empty expression", 0)
        result = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected token {v!r}", pos)
        return result

    def expr(self) -> RationalFunction:
        left = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            right = self.term()
            left = left + right if op == "+" else left - right
        return left

    def term(self) -> RationalFunction:
        left = self.unary()
        while self.peek()[1] in ("*", "/"):
            op, pos = self.take()[1:]
            right = self.unary()
            if op == "*":
                left = left * right
            else:
                if right.is_zero():
                    raise ExpressionError("division by zero", pos)
                left = left / right
        return left

    def unary(self) -> RationalFunction:
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> RationalFunction:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, v, pos = self.take()
            if kind != "num" or not v.isdigit():
                raise ExpressionError("exponent must be an integer literal", pos)
            n = sign * int(v)
            if n < 0 and base.is_zero():
                raise ExpressionError("division by zero", pos)
            return base ** n
        return base

    def atom(self) -> RationalFunction:
        kind, v, pos = self.take()
        if kind == "num":
            return RationalFunction.constant(Fraction(v), self.parameters)
        if kind == "name":
            if v not in self.parameters:
                raise ExpressionError(f"unknown parameter {v!r}", pos)
            return RationalFunction.variable(v, self.parameters)
        if v == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ExpressionError(f"unexpected {v or 'end of input'!r}", pos)


def parse_expression(text: str, parameters: Sequence[str]) -> RationalFunction:
    """Parse ``text`` (rationals, parameter names, + - * / ^, parentheses)."""
    return _Parser(text, tuple(parameters)).parse()


_BARE = re.compile(r"^[A-Za-z0-9_^]+$")


def format_expression(f: RationalFunction) -> str:
    """Deterministic text that parses back to ``f``."""
    num = P.format_terms(f.num, f.parameters)
    if P._is_constant(f.den) and next(iter(f.den.values())) == 1:
        return num
    den = P.format_terms(f.den, f.parameters)
    if len(f.num) > 1:
        num = f"({num})"
    if not _BARE.match(den):
        den = f"({den})"
    return f"{num}/{den}"


def parse_rational(text: Union[str, int]) -> Fraction:
    """Parse an exact rational literal such as ``"3"``, ``"-1/2"`` or ``"0.25"``."""
    if isinstance(text, bool) or isinstance(text, float):
        raise ValueError(f"expected an exact rational, got {text!r}")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational literal: {text!r}") from None


def format_rational(x: Number) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is stored as a dict mapping exponent tuples (one entry per
declared parameter) to nonzero ``int`` or ``Fraction`` coefficients.  The
module-level helpers work on raw dicts, which keeps the hot loops of state
elimination free of wrapper objects; :class:`Polynomial` is the public,
immutable face of the same data.

The gcd is computed over Q (the result is primitive with integer
coefficients).  The fast route is the heuristic gcd: evaluate at a large
integer, recurse, interpolate, and keep the candidate only if it divides
both inputs.  When that gives up, content/primitive-part recursion on one
variable at a time with a subresultant pseudo-remainder sequence settles it.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Mapping, Sequence, Tuple, Union

Coeff = Union[int, Fraction]
Exps = Tuple[int, ...]
Terms = Dict[Exps, Coeff]


class NotExactError(ArithmeticError):
    """Raised when a polynomial division leaves a remainder."""


def grlex_key(exps: Exps) -> tuple:
    """Sort key for graded lexicographic order (larger key = larger monomial)."""
    return (sum(exps), exps)


def _norm_coeff(c: Coeff) -> Coeff:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _cdiv(x: Coeff, y: Coeff) -> Coeff:
    if isinstance(x, int) and isinstance(y, int):
        q, r = divmod(x, y)
        if r == 0:
            return q
        return Fraction(x, y)
    return _norm_coeff(Fraction(x) / y)


# -- raw dict arithmetic ---------------------------------------------------

def const(c: Coeff, nvars: int) -> Terms:
    c = _norm_coeff(c)
    return {(0,) * nvars: c} if c else {}


def add(a: Terms, b: Terms) -> Terms:
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, 0) + c
        if v:
            out[m] = _norm_coeff(v)
        else:
            out.pop(m, None)
    return out


def neg(a: Terms) -> Terms:
    return {m: -c for m, c in a.items()}


def sub(a: Terms, b: Terms) -> Terms:
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, 0) - c
        if v:
            out[m] = _norm_coeff(v)
        else:
            out.pop(m, None)
    return out


def scale(a: Terms, c: Coeff) -> Terms:
    c = _norm_coeff(c)
    if not c:
        return {}
    if c == 1:
        return dict(a)
    return {m: _norm_coeff(v * c) for m, v in a.items()}


def mul(a: Terms, b: Terms) -> Terms:
    if not a or not b:
        return {}
    if len(a) < len(b):
        a, b = b, a
    out: Terms = {}
    get = out.get
    for mb, cb in b.items():
        for ma, ca in a.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            out[m] = get(m, 0) + ca * cb
    return {m: _norm_coeff(c) for m, c in out.items() if c}


def power(a: Terms, n: int, nvars: int) -> Terms:
    if n < 0:
        raise ValueError("negative exponent")
    result = const(1, nvars)
    base = a
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def shift(a: Terms, exps: Exps, c: Coeff = 1) -> Terms:
    """Multiply by the monomial ``c * x^exps``."""
    return {tuple(x + y for x, y in zip(m, exps)): _norm_coeff(v * c) for m, v in a.items()}


def leading(a: Terms) -> Exps:
    """Leading monomial in graded lexicographic order."""
    return max(a, key=grlex_key)


def variables(a: Terms) -> set:
    out = set()
    for m in a:
        for i, e in enumerate(m):
            if e:
                out.add(i)
    return out


def degree_in(a: Terms, var: int) -> int:
    return max((m[var] for m in a), default=-1)


def coefficients_in(a: Terms, var: int) -> Dict[int, Terms]:
    """Split ``a`` as a polynomial in ``var`` with coefficients free of ``var``."""
    out: Dict[int, Terms] = {}
    for m, c in a.items():
        d = m[var]
        if d:
            m = m[:var] + (0,) + m[var + 1:]
        out.setdefault(d, {})[m] = c
    return out


def lead_coeff_in(a: Terms, var: int) -> Terms:
    d = degree_in(a, var)
    return {m[:var] + (0,) + m[var + 1:]: c for m, c in a.items() if m[var] == d}


def divide_exact(a: Terms, b: Terms) -> Terms:
    """Return ``a / b``; raise :class:`NotExactError` on a nonzero remainder."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return {}
    if len(b) == 1:
        (mb, cb), = b.items()
        out = {}
        for m, c in a.items():
            d = tuple(x - y for x, y in zip(m, mb))
            if min(d) < 0:
                raise NotExactError("monomial does not divide")
            out[d] = _cdiv(c, cb)
        return out
    lb = max(b)
    cb = b[lb]
    r = dict(a)
    q: Terms = {}
    while r:
        lr = max(r)
        d = tuple(x - y for x, y in zip(lr, lb))
        if min(d) < 0:
            raise NotExactError("leading term does not divide")
        c = _cdiv(r[lr], cb)
        q[d] = c
        r = sub(r, shift(b, d, c))
    return q


def integer_content(a: Terms) -> int:
    """gcd of the coefficients of an integer-coefficient polynomial."""
    g = 0
    for c in a.values():
        g = math.gcd(g, c)
        if g == 1:
            break
    return g


def clear_denominators(a: Terms) -> Tuple[Terms, int]:
    """Scale ``a`` to integer coefficients; return (scaled, multiplier)."""
    lcm = 1
    for c in a.values():
        if isinstance(c, Fraction):
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    if lcm == 1:
        return a, 1
    return {m: _norm_coeff(c * lcm) for m, c in a.items()}, lcm


def primitive(a: Terms) -> Terms:
    """Integer primitive part with positive leading coefficient."""
    if not a:
        return {}
    a, _ = clear_denominators(a)
    g = integer_content(a)
    if a[leading(a)] < 0:
        g = -g
    if g == 1:
        return dict(a)
    return {m: c // g for m, c in a.items()}


def _is_constant(a: Terms) -> bool:
    return len(a) == 1 and not any(next(iter(a)))


def _prem(a: Terms, b: Terms, var: int) -> Terms:
    """Pseudo-remainder of ``a`` by ``b`` as polynomials in ``var``."""
    n = degree_in(b, var)
    lcb = lead_coeff_in(b, var)
    nvars = len(next(iter(b)))
    e = degree_in(a, var) - n + 1
    r = a
    while r:
        dr = degree_in(r, var)
        if dr < n:
            break
        lcr = lead_coeff_in(r, var)
        k = [0] * nvars
        k[var] = dr - n
        r = sub(mul(lcb, r), mul(lcr, shift(b, tuple(k))))
        e -= 1
    if e > 0 and r:
        r = mul(power(lcb, e, nvars), r)
    return r


def _content_in(a: Terms, var: int) -> Terms:
    coeffs = sorted(coefficients_in(a, var).values(), key=len)
    g: Terms = {}
    for c in coeffs:
        g = _gcd(g, c)
        if _is_constant(g):
            break
    return g


def _subresultant_gcd(a: Terms, b: Terms, var: int) -> Terms:
    """Primitive (in ``var``) gcd of two polynomials primitive in ``var``."""
    nvars = len(next(iter(a)))
    if degree_in(a, var) < degree_in(b, var):
        a, b = b, a
    g: Terms = const(1, nvars)
    h: Terms = const(1, nvars)
    while True:
        d = degree_in(a, var) - degree_in(b, var)
        r = _prem(a, b, var)
        if not r:
            break
        if degree_in(r, var) == 0:
            return const(1, nvars)
        a = b
        b = divide_exact(r, mul(g, power(h, d, nvars)))
        g = lead_coeff_in(a, var)
        if d:
            h = divide_exact(power(g, d, nvars), power(h, d - 1, nvars))
    return divide_exact(b, _content_in(b, var))


_HEU_TRIES = 6


def _max_norm(a: Terms) -> int:
    return max(abs(c) for c in a.values())


def _eval_var(a: Terms, var: int, x: int) -> Terms:
    out: Terms = {}
    for m, c in a.items():
        e = m[var]
        if e:
            c = c * x ** e
            m = m[:var] + (0,) + m[var + 1:]
        out[m] = out.get(m, 0) + c
    return {m: c for m, c in out.items() if c}


def _interpolate(h: Terms, var: int, x: int) -> Terms:
    # Read h as x-adic digits (symmetric residues) in powers of var.
    out: Terms = {}
    half = x // 2
    i = 0
    while h:
        digit = {}
        for m, c in h.items():
            r = c % x
            if r > half:
                r -= x
            if r:
                digit[m] = r
        for m, r in digit.items():
            out[m[:var] + (i,) + m[var + 1:]] = r
        h = {m: (c - digit.get(m, 0)) // x for m, c in h.items()}
        h = {m: c for m, c in h.items() if c}
        i += 1
    return out


def _divides(d: Terms, a: Terms) -> bool:
    try:
        divide_exact(a, d)
    except NotExactError:
        return False
    return True


def _heu_gcd(a: Terms, b: Terms) -> Terms | None:
    """Heuristic gcd (Char, Geddes and Gonnet) of nonzero integer polynomials.

    Evaluates the highest variable at a large integer, recurses, and lifts the
    result back by x-adic interpolation.  Returns the gcd including integer
    content, or None when every evaluation point was unlucky.
    """
    ca, cb = integer_content(a), integer_content(b)
    cont = math.gcd(ca, cb)
    vs = variables(a) | variables(b)
    if not vs:
        return const(cont, len(next(iter(a))))
    if ca != 1:
        a = {m: c // ca for m, c in a.items()}
    if cb != 1:
        b = {m: c // cb for m, c in b.items()}
    var = max(vs)
    x = 2 * min(_max_norm(a), _max_norm(b)) + 29
    for _ in range(_HEU_TRIES):
        ea, eb = _eval_var(a, var, x), _eval_var(b, var, x)
        if ea and eb:
            h = _heu_gcd(ea, eb)
            if h is not None:
                g = primitive(_interpolate(h, var, x))
                if g and _divides(g, a) and _divides(g, b):
                    return g if cont == 1 else scale(g, cont)
        x = x * 73794 // 27011
    return None


def _gcd(a: Terms, b: Terms) -> Terms:
    # Both inputs are assumed to have integer coefficients; the result is
    # primitive up to sign.
    if not a:
        return primitive(b)
    if not b:
        return primitive(a)
    nvars = len(next(iter(a)))
    va, vb = variables(a), variables(b)
    common = va & vb
    if not common:
        return const(1, nvars)
    if len(a) == 1 or len(b) == 1:
        return _monomial_gcd(a, b)
    h = _heu_gcd(a, b)
    if h is not None:
        return primitive(h)
    return _prs_gcd(a, b, common)


def _prs_gcd(a: Terms, b: Terms, common: set) -> Terms:
    var = min(common, key=lambda i: (min(degree_in(a, i), degree_in(b, i)), i))
    ca = _content_in(a, var)
    cb = _content_in(b, var)
    c = _gcd(ca, cb)
    pa = a if _is_constant(ca) else divide_exact(a, ca)
    pb = b if _is_constant(cb) else divide_exact(b, cb)
    g = _subresultant_gcd(pa, pb, var)
    return primitive(mul(c, g))


def _monomial_gcd(a: Terms, b: Terms) -> Terms:
    # When one side is a single term, the gcd is the largest monomial dividing both.
    nvars = len(next(iter(a)))
    low = [min(m[i] for m in a) for i in range(nvars)]
    for i in range(nvars):
        low[i] = min(low[i], min(m[i] for m in b))
    return {tuple(low): 1}


def gcd_terms(a: Terms, b: Terms) -> Terms:
    """gcd over Q, returned primitive with positive leading coefficient.

    ``gcd(0, b)`` is the normalized ``b``; ``gcd(0, 0)`` is zero.
    """
    a, _ = clear_denominators(a)
    b, _ = clear_denominators(b)
    return primitive(_gcd(a, b))


# -- public wrapper --------------------------------------------------------

class Polynomial:
    """Immutable multivariate polynomial over a declared parameter list."""

    __slots__ = ("terms", "parameters", "_hash")

    def __init__(self, terms: Mapping[Exps, Coeff], parameters: Sequence[str]):
        parameters = tuple(parameters)
        clean = {}
        for m, c in terms.items():
            m = tuple(m)
            if len(m) != len(parameters):
                raise ValueError(f"monomial {m} does not match parameters {parameters}")
            if any(e < 0 for e in m):
                raise ValueError(f"negative exponent in {m}")
            c = _norm_coeff(Fraction(c) if not isinstance(c, (int, Fraction)) else c)
            if c:
                clean[m] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "parameters", parameters)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def constant(cls, c: Coeff, parameters: Sequence[str]) -> "Polynomial":
        return cls(const(c, len(parameters)), parameters)

    @classmethod
    def variable(cls, name: str, parameters: Sequence[str]) -> "Polynomial":
        parameters = tuple(parameters)
        exps = tuple(int(p == name) for p in parameters)
        if not any(exps):
            raise ValueError(f"unknown parameter {name!r}")
        return cls({exps: 1}, parameters)

    def _wrap(self, terms: Terms) -> "Polynomial":
        out = Polynomial.__new__(Polynomial)
        object.__setattr__(out, "terms", terms)
        object.__setattr__(out, "parameters", self.parameters)
        object.__setattr__(out, "_hash", None)
        return out

    def _check(self, other: "Polynomial") -> None:
        if other.parameters != self.parameters:
            raise ValueError("parameter lists differ")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self._wrap(const(other, len(self.parameters)))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(add(self.terms, other.terms))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(sub(self.terms, other.terms))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(sub(other.terms, self.terms))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(mul(self.terms, other.terms))

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(neg(self.terms))

    def __pow__(self, n: int):
        return self._wrap(power(self.terms, n, len(self.parameters)))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._wrap(const(other, len(self.parameters)))
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.parameters == other.parameters and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.parameters, frozenset(self.terms.items()))))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Polynomial({format_terms(self.terms, self.parameters)!r}, {self.parameters!r})"

    def __str__(self):
        return format_terms(self.terms, self.parameters)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or _is_constant(self.terms)

    def sorted_terms(self) -> list:
        """Terms in descending graded lexicographic order."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_coefficient(self) -> Coeff:
        return self.terms[leading(self.terms)] if self.terms else 0

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def divide_exact(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        return self._wrap(divide_exact(self.terms, other.terms))

    def evaluate(self, values: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            t = Fraction(c)
            for v, e in zip(values, m):
                if e:
                    t *= v ** e
            total += t
        return total


def gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Greatest common divisor, primitive with positive leading coefficient."""
    a._check(b)
    return a._wrap(gcd_terms(a.terms, b.terms))


def _format_monomial(m: Exps, parameters: Sequence[str]) -> str:
    parts = []
    for name, e in zip(parameters, m):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_terms(terms: Mapping[Exps, Coeff], parameters: Sequence[str]) -> str:
    """Render a polynomial deterministically.

    Terms follow descending graded lexicographic order, except that the
    largest positive term is moved to the front so the output avoids a
    leading minus sign whenever possible (``1 - p`` rather than ``-p + 1``).
    """
    if not terms:
        return "0"
    ordered = sorted(terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)
    first = next((i for i, (_, c) in enumerate(ordered) if c > 0), 0)
    if first:
        ordered.insert(0, ordered.pop(first))
    out = []
    for i, (m, c) in enumerate(ordered):
        mono = _format_monomial(m, parameters)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)

from fractions import Fraction

from hypothesis import strategies as st

from pmdpsea.polynomial import Polynomial
from pmdpsea.ratfunc import RationalFunction

PARAMS = ("x", "y", "z")


@st.composite
def polynomials(draw, parameters=PARAMS, max_terms=4, max_degree=3, allow_zero=True):
    n = len(parameters)
    count = draw(st.integers(min_value=0 if allow_zero else 1, max_value=max_terms))
    terms = {}
    for _ in range(count):
        exps = tuple(draw(st.integers(0, max_degree)) for _ in range(n))
        terms[exps] = terms.get(exps, 0) + draw(st.integers(-6, 6).filter(bool))
    poly = Polynomial(terms, parameters)
    if not allow_zero and poly.is_zero():
        poly = Polynomial.constant(draw(st.integers(1, 5)), parameters)
    return poly


@st.composite
def rational_functions(draw, parameters=PARAMS, max_terms=3, max_degree=2):
    num = draw(polynomials(parameters, max_terms, max_degree))
    den = draw(polynomials(parameters, max_terms, max_degree, allow_zero=False))
    return RationalFunction(num, den)


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=7)


@st.composite
def points(draw, n=len(PARAMS)):
    return tuple(draw(rationals) for _ in range(n))


def as_fraction(x):
    return Fraction(x)

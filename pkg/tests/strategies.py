"""Hypothesis strategies for random polynomials and rational functions."""

from fractions import Fraction

from hypothesis import strategies as st

from diffiety.expr import ONE, ZERO, Expr, jet, param, var

DIM1 = [var("x"), jet("u"), jet("u", 1), jet("v"), jet("v", 1), jet("v", 1, 1)]
Q = [jet("q", *(1,) * r) for r in range(5)]
LAMBDA = param("lambda")

coefficients = st.fractions(min_value=-6, max_value=6, max_denominator=4).filter(lambda c: c != 0)


@st.composite
def monomials(draw, atoms, max_degree=3):
    k = draw(st.integers(0, max_degree))
    m = ONE
    for a in draw(st.lists(st.sampled_from(atoms), min_size=k, max_size=k)):
        m = m * a
    return m


@st.composite
def polynomials(draw, atoms=DIM1, max_terms=4, max_degree=3):
    out = ZERO
    for _ in range(draw(st.integers(1, max_terms))):
        out = out + Expr.const(draw(coefficients)) * draw(monomials(atoms, max_degree))
    return out


@st.composite
def rationals(draw, atoms=DIM1):
    num = draw(polynomials(atoms))
    den = draw(polynomials(atoms, max_terms=3, max_degree=2).filter(lambda e: not e.is_zero))
    return num / den


@st.composite
def nonconstant(draw, atoms=DIM1, max_terms=4, max_degree=3):
    e = draw(polynomials(atoms, max_terms, max_degree))
    if e.is_constant:
        e = e + atoms[draw(st.integers(0, len(atoms) - 1))]
    return e


def frac(s) -> Fraction:
    return Fraction(s)

from fractions import Fraction

import pytest
from hypothesis import given

from formdeform.scalar_poly import (
    HomogeneousPolynomial as P,
    StructuralError,
    as_scalar,
    fmt_scalar,
    monomials,
    partial,
    poly_add,
    poly_mul,
    render_poly,
)
from strategies import polys

x1, x2 = P.variable(2, 0), P.variable(2, 1)


def test_additive_inverse_keeps_degree():
    z = poly_add(x1, x1.scale(-1))
    assert z.is_zero() and z.degree == 1


def test_add_disjoint_and_like_terms():
    assert render_poly(poly_add(x1 * x2, x2 * x2)) == "x1*x2 + x2^2"
    half = (x1 * x1).scale(Fraction(1, 2))
    assert poly_add(half, half) == x1 * x1


def test_mul_examples():
    assert poly_mul(x1, x2) == P.monomial((1, 1))
    assert poly_mul(x1 + x2, x1 - x2) == x1 * x1 - x2 * x2
    p = x1 * x2 + x2 * x2
    assert poly_mul(P.constant(2), p) == p


def test_partial_examples():
    assert partial(P.monomial((2, 1)), 0) == P.monomial((1, 1), 2)
    assert partial(P.monomial((3, 0)), 1).is_zero()
    assert partial(x1, 0) == P.constant(2, 1)


def test_partial_of_constant_is_zero():
    assert partial(P.constant(2, 5), 0).is_zero()


def test_mismatches_raise():
    with pytest.raises(StructuralError):
        x1 + x1 * x1
    with pytest.raises(StructuralError):
        x1 * P.variable(3, 0)
    with pytest.raises((StructuralError, IndexError)):
        partial(x1, 2)


def test_floats_rejected():
    with pytest.raises(TypeError):
        as_scalar(0.5)


def test_scalar_text():
    assert fmt_scalar(Fraction(-3, 6)) == "-1/2"
    assert fmt_scalar(Fraction(4, 2)) == "2"


def test_monomials_count_and_order():
    mons = monomials(3, 2)
    assert len(mons) == 6
    assert mons[0] == (2, 0, 0) and mons[-1] == (0, 0, 2)


@given(polys(), polys(), polys())
def test_ring_axioms(p, q, s):
    assert (p * q) * s == p * (q * s)
    if q.degree == s.degree:
        assert p * (q + s) == p * q + p * s


@given(polys())
def test_euler_identity(p):
    n = p.n
    if p.degree == 0:
        return
    total = sum((P.variable(n, i) * p.partial(i) for i in range(1, n)), P.variable(n, 0) * p.partial(0))
    assert total == p.scale(p.degree)

"""Property suites for fields, polynomials, matrices and univariate root finding.

sympy serves as the independent oracle; it is a test-only dependency.
"""

from fractions import Fraction

import pytest
import sympy
from sympy.polys.subresultants_qq_zz import sylvester
from hypothesis import given, settings, strategies as st

from cremona.field import GF, QQ, FieldError, rational_reconstruction
from cremona.matrix import nullspace, rank
from cremona.poly import (Polynomial, PolynomialError, divides, exact_div, gcd, monomials_of_degree,
                          resultant, to_string)
from cremona import univariate as uv

PROPS = settings(max_examples=1000, deadline=None, derandomize=True)
SYMS = sympy.symbols("x0 x1 x2")
P = 10007

coeffs_q = st.one_of(st.integers(-5, 5), st.fractions(min_value=-3, max_value=3, max_denominator=4))


def polys(nvars=3, max_deg=3, field=QQ, max_terms=5, coeff=coeffs_q):
    mons = [m for d in range(max_deg + 1) for m in monomials_of_degree(nvars, d)]
    return st.dictionaries(st.sampled_from(mons), coeff, max_size=max_terms).map(
        lambda d: Polynomial({m: field(c) for m, c in d.items()}, nvars, field))


def forms(nvars, deg, coeff=st.integers(-4, 4), max_terms=6):
    mons = monomials_of_degree(nvars, deg)
    return st.dictionaries(st.sampled_from(mons), coeff, max_size=max_terms).map(
        lambda d: Polynomial(d, nvars, QQ))


def to_sympy(f: Polynomial):
    xs = SYMS[:f.nvars]
    return sum((sympy.Rational(Fraction(c).numerator, Fraction(c).denominator)
                * sympy.Mul(*[x ** k for x, k in zip(xs, e)]) for e, c in f.terms.items()),
               sympy.Integer(0))


def from_sympy(expr, nvars) -> Polynomial:
    poly = sympy.Poly(sympy.expand(expr), *SYMS[:nvars])
    return Polynomial({m: Fraction(int(c.p), int(c.q)) for m, c in poly.terms()}, nvars, QQ)


# ---------------------------------------------------------------------------
# ring axioms


@PROPS
@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Polynomial.zero(3)


@PROPS
@given(polys(), polys())
def test_product_matches_oracle(a, b):
    assert a * b == from_sympy(to_sympy(a) * to_sympy(b), 3)


@PROPS
@given(polys(field=GF(P), coeff=st.integers(0, P - 1)), polys(field=GF(P), coeff=st.integers(0, P - 1)))
def test_ring_mod_p(a, b):
    pt = (3, 5, 7)
    assert (a * b).evaluate(pt) == a.evaluate(pt) * b.evaluate(pt) % P
    assert (a + b).evaluate(pt) == (a.evaluate(pt) + b.evaluate(pt)) % P


# ---------------------------------------------------------------------------
# Euler identity and derivatives


@PROPS
@given(st.integers(0, 4).flatmap(lambda d: st.tuples(st.just(d), forms(3, d))))
def test_euler_identity(pair):
    d, f = pair
    lhs = Polynomial.zero(3)
    for i, x in enumerate(Polynomial.gens(3)):
        lhs = lhs + x * f.diff(i)
    assert lhs == f.scale(d)


@settings(max_examples=200, deadline=None, derandomize=True)
@given(polys())
def test_derivative_matches_oracle(f):
    for i in range(3):
        assert f.diff(i) == from_sympy(sympy.diff(to_sympy(f), SYMS[i]), 3)


# ---------------------------------------------------------------------------
# nullspace


small = st.integers(-3, 3)


@PROPS
@given(st.integers(1, 4).flatmap(lambda r: st.integers(1, 5).flatmap(
    lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))))
def test_nullspace_over_q(rows):
    ncols = len(rows[0])
    ker = nullspace(rows, ncols, QQ)
    for v in ker:
        assert all(sum(Fraction(a) * b for a, b in zip(row, v)) == 0 for row in rows)
    oracle = sympy.Matrix(rows).rank()
    assert rank(rows, ncols, QQ) == oracle
    assert len(ker) == ncols - oracle
    if ker:
        assert rank(ker, ncols, QQ) == len(ker)


@PROPS
@given(st.lists(st.lists(st.integers(0, 12), min_size=5, max_size=5), min_size=1, max_size=6))
def test_nullspace_mod_p(rows):
    p = 13
    ker = nullspace(rows, 5, GF(p))
    for v in ker:
        assert all(sum(a * b for a, b in zip(row, v)) % p == 0 for row in rows)
    assert len(ker) + rank(rows, 5, GF(p)) == 5
    if ker:
        assert rank(ker, 5, GF(p)) == len(ker)


# ---------------------------------------------------------------------------
# gcd and resultants


@PROPS
@given(polys(2, 2, max_terms=3, coeff=st.integers(-3, 3)), polys(2, 2, max_terms=3, coeff=st.integers(-3, 3)),
       polys(2, 2, max_terms=3, coeff=st.integers(-3, 3)))
def test_gcd_contains_common_factor(a, b, c):
    if a.is_zero() or b.is_zero() or c.is_zero():
        return
    g = gcd(a * c, b * c)
    assert divides(c, g)
    assert divides(g, a * c) and divides(g, b * c)
    oracle = from_sympy(sympy.gcd(to_sympy(a * c), to_sympy(b * c)), 2)
    assert divides(g, oracle) and divides(oracle, g)


@settings(max_examples=300, deadline=None, derandomize=True)
@given(polys(2, 3, max_terms=4, coeff=st.integers(-3, 3)), polys(2, 3, max_terms=4, coeff=st.integers(-3, 3)))
def test_resultant_matches_oracle(a, b):
    if a.degree_in(1) < 1 or b.degree_in(1) < 1:
        return
    r = resultant(a, b, 1)
    # sympy.resultant can differ in sign from the Sylvester determinant; use the definition
    oracle = sylvester(to_sympy(a), to_sympy(b), SYMS[1]).det()
    assert r == from_sympy(oracle, 2)


def test_exact_div_and_errors():
    x, y, z = Polynomial.gens(3)
    f = (x + y) * (x - z)
    assert exact_div(f, x + y) == x - z
    with pytest.raises(PolynomialError):
        exact_div(f, x + 2 * y)
    with pytest.raises(PolynomialError):
        gcd(Polynomial.zero(3))
    with pytest.raises(FieldError):
        GF(10)


def test_to_string_canonical():
    x, y, z = Polynomial.gens(3)
    f = x * x - (y * z).scale(Fraction(1, 2)) + 3
    assert to_string(f, ["a", "b", "c"]) == "a^2 - 1/2*b*c + 3"


# ---------------------------------------------------------------------------
# univariate roots over F_p


@PROPS
@given(st.lists(st.integers(0, 100), min_size=1, max_size=9))
def test_roots_mod_p_match_exhaustive(coeffs):
    p = 101
    if not any(c % p for c in coeffs):
        return
    assert uv.roots_mod_p(coeffs, p, seed=1) == uv.roots_exhaustive(coeffs, p)


@PROPS
@given(st.lists(st.integers(0, P - 1), min_size=1, max_size=6, unique=True), st.integers(1, P - 1))
def test_roots_of_products(roots, lead):
    f = [lead]
    for r in roots:
        f = uv.mul(f, [(-r) % P, 1], P)
    assert uv.roots_mod_p(f, P, seed=7) == sorted(roots)


@PROPS
@given(st.lists(st.integers(-20, 20), min_size=2, max_size=5), st.lists(st.integers(-20, 20), min_size=2, max_size=5))
def test_univariate_resultant(a, b):
    p = 101
    a, b = uv.trim([c % p for c in a]), uv.trim([c % p for c in b])
    if len(a) < 2 or len(b) < 2:
        return
    xs = sympy.Symbol("t")
    oracle = sylvester(sum(c * xs ** i for i, c in enumerate(a)),
                       sum(c * xs ** i for i, c in enumerate(b)), xs).det()
    assert uv.resultant(a, b, p) == int(oracle) % p


def test_rational_reconstruction_roundtrip():
    p = (1 << 61) - 1
    for q in (Fraction(3, 7), Fraction(-22, 5), Fraction(1, 1)):
        a = q.numerator * pow(q.denominator, -1, p) % p
        assert rational_reconstruction(a, p) == q


def test_rational_roots():
    # (2t - 1)(t + 3)(t^2 + 1)
    coeffs = [-3, 5, -1, 5, 2]
    assert sorted(uv.rational_roots(coeffs)) == [Fraction(-3), Fraction(1, 2)]

"""Parser: grammar coverage, error positions and round trips through to_string."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cremona.field import GF, QQ
from cremona.parser import ParseError, format_rational, parse_point, parse_polynomial, parse_rational
from cremona.poly import Polynomial, monomials_of_degree, to_string

V = ["x0", "x1", "x2", "x3"]


def test_basic_expressions():
    x0, x1, x2, x3 = Polynomial.gens(4)
    assert parse_polynomial("x0*x1 - x2*x3", V) == x0 * x1 - x2 * x3
    assert parse_polynomial("(x0 + x1)^2", V) == (x0 + x1) ** 2
    assert parse_polynomial("-x0^2/4 + 3", V) == (x0 * x0).scale(Fraction(-1, 4)) + 3
    assert parse_polynomial("--x1", V) == x1
    assert parse_polynomial("2^3*x2", V) == x2.scale(8)


def test_precedence():
    x0, x1, _, _ = Polynomial.gens(4)
    assert parse_polynomial("-x0^2", V) == -(x0 * x0)
    assert parse_polynomial("x0 - x1 - x0", V) == -x1
    assert parse_polynomial("x0*x1/2", V) == (x0 * x1).scale(Fraction(1, 2))


def test_prime_field():
    f = parse_polynomial("x0/2", V, GF(7))
    assert f.coefficient((1, 0, 0, 0)) == 4


@pytest.mark.parametrize("src,pos", [
    ("", 0),
    ("2x0", 1),
    ("x0 x1", 3),
    ("x0^x1", 3),
    ("x0^2^3", 4),
    ("x0/x1", 3),
    ("x0/0", 3),
    ("(x0 + x1", 8),
    ("y7 + 1", 0),
    ("x0 $ x1", 3),
    ("x0 +", 4),
])
def test_errors_report_position(src, pos):
    with pytest.raises(ParseError) as info:
        parse_polynomial(src, V)
    assert info.value.pos == pos
    assert "^" in str(info.value)


def test_rationals_and_points():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational(-4) == -4
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-2, 3)) == "-2/3"
    for bad in ("1.5", "1/0", True, "x"):
        with pytest.raises(ValueError):
            parse_rational(bad)
    assert parse_point(["1/2", 0, 0, 1], 4) == (Fraction(1, 2), 0, 0, 1)
    with pytest.raises(ValueError):
        parse_point([0, 0, 0, 0], 4)
    with pytest.raises(ValueError):
        parse_point([1, 0], 4)


coeff = st.one_of(st.integers(-50, 50), st.fractions(min_value=-9, max_value=9, max_denominator=12))
mons = [m for d in range(5) for m in monomials_of_degree(4, d)]
poly4 = st.dictionaries(st.sampled_from(mons), coeff, max_size=8).map(
    lambda d: Polynomial({m: QQ(c) for m, c in d.items()}, 4, QQ))


@settings(max_examples=1000, deadline=None, derandomize=True)
@given(poly4)
def test_round_trip(f):
    text = to_string(f, V)
    assert parse_polynomial(text, V) == f
    assert to_string(parse_polynomial(text, V), V) == text

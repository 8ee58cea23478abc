"""Hint verification, hint corruption, and case classification."""

import random
from fractions import Fraction

import pytest
import sympy

from cremona.linsys import ConditionError, CurveParam
from cremona.parser import parse_polynomial
from cremona.pipeline import find_secants_on_S
from cremona.poly import Polynomial, monomials_of_degree
from cremona.surface import (CaseLabel, ConicHint, HintError, SurfaceInput, Unclassified, classify_case,
                             find_rational_points, verify_hints)

V = ["x0", "x1", "x2", "x3"]
CV = ["x", "y", "z", "w"]
X = Polynomial.gens(4)
TD = parse_polynomial("4*(x0*x2-x1^2)*(x1*x3-x2^2)-(x0*x3-x1*x2)^2", V)
DUPIN = parse_polynomial("(x^2+y^2+z^2-w^2)^2 + w^2*((w-x)^2+y^2-z^2)", CV)
MONOID = parse_polynomial("x0*(x1^3+x2^3-x3^3+x1*x2*x3) + x1^4-x2^4+x1*x2*x3^2", V)


def _double_line_surface(seed=1):
    rng = random.Random(seed)

    def rq():
        return Polynomial({m: rng.randint(-3, 3) for m in monomials_of_degree(4, 2)}, 4)
    return X[2] * X[2] * rq() + X[2] * X[3] * rq() + X[3] * X[3] * rq()


DLINE = _double_line_surface()
LINE01 = CurveParam.line((1, 0, 0, 0), (0, 1, 0, 0))


# ---------------------------------------------------------------------------
# independent truth oracles


def _params(count=16):
    return [(Fraction(1), Fraction(k, 3)) for k in range(-count // 2, count - count // 2)]


def _curve_is(S, curve, singular):
    polys = [S] + ([S.diff(i) for i in range(4)] if singular else [])
    for s, t in _params(4 * curve.degree + 4):
        pt = curve.point(s, t)
        if any(g.evaluate(pt) != 0 for g in polys):
            return False
    return True


def _point_is(S, pt, singular):
    if S.evaluate(pt) != 0:
        return False
    return not singular or all(S.diff(i).evaluate(pt) == 0 for i in range(4))


def _conic_is_double(S, conic, names):
    syms = sympy.symbols(names)

    def sp(f):
        return sum(sympy.Rational(Fraction(c).numerator, Fraction(c).denominator)
                   * sympy.Mul(*[v ** k for v, k in zip(syms, e)]) for e, c in f.terms.items())
    a, b = sp(conic.plane), sp(conic.quadric)
    G = sympy.groebner([a * a, a * b, b * b], *syms, order="grevlex")
    return G.reduce(sp(S))[1] == 0


# ---------------------------------------------------------------------------
# base inputs: every hint is valid


def base_inputs():
    secants = find_secants_on_S(TD, CurveParam.twisted_cubic(), 3).lines
    x, y, z, w = Polynomial.gens(4)
    return [
        ("tangent developable", SurfaceInput(TD, tuple(V), singular_curves=[CurveParam.twisted_cubic()],
                                             secants=list(secants),
                                             general_points=find_rational_points(TD, 2))),
        ("double line", SurfaceInput(DLINE, tuple(V), singular_curves=[LINE01])),
        ("dupin", SurfaceInput(DUPIN, tuple(CV), singular_curves=[ConicHint(w, x * x + y * y + z * z)],
                               singular_points=[(1, 0, 0, 1)], general_points=[(0, 0, 1, 1)])),
        ("monoid", SurfaceInput(MONOID, tuple(V), singular_points=[(1, 0, 0, 0)])),
    ]


def test_base_hints_verify():
    for name, inp in base_inputs():
        assert verify_hints(inp).verified, name


def _mutate_curve(curve, rng):
    comps = [dict(c.terms) for c in curve.components]
    e = curve.degree
    i = rng.randrange(len(comps))
    mon = (e - (k := rng.randrange(e + 1)), k)
    comps[i][mon] = comps[i].get(mon, 0) + rng.choice([-3, -2, -1, 1, 2, 3])
    return CurveParam(tuple(Polynomial(c, 2) for c in comps), curve.label)


def _mutate_point(pt, rng):
    pt = list(pt)
    pt[rng.randrange(4)] += rng.choice([-2, -1, 1, 2])
    return tuple(pt)


def _mutate_conic(conic, rng):
    which = rng.choice(["plane", "quadric"])
    f = getattr(conic, which)
    mons = monomials_of_degree(4, f.degree())
    g = f + Polynomial({rng.choice(mons): rng.choice([-1, 1, 2])}, 4)
    if g.is_zero():
        return None
    return ConicHint(g, conic.quadric) if which == "plane" else ConicHint(conic.plane, g)


def _mutants(rng):
    """Yield (input, truly_valid) pairs with exactly one hint mutated."""
    bases = base_inputs()
    while True:
        name, base = bases[rng.randrange(len(bases))]
        S = base.equation
        slots = [k for k in ("singular_curves", "singular_points", "secants", "general_points")
                 if getattr(base, k)]
        slot = rng.choice(slots)
        items = list(getattr(base, slot))
        j = rng.randrange(len(items))
        try:
            if slot == "singular_points" or slot == "general_points":
                new = _mutate_point(items[j], rng)
                if not any(new):
                    continue
                valid = _point_is(S, new, slot == "singular_points")
            elif isinstance(items[j], ConicHint):
                new = _mutate_conic(items[j], rng)
                if new is None:
                    continue
                valid = _conic_is_double(S, new, list(base.variables))
            else:
                new = _mutate_curve(items[j], rng)
                valid = _curve_is(S, new, slot == "singular_curves")
        except ConditionError:
            yield name, None, False  # rejected at construction
            continue
        items[j] = new
        kwargs = {k: list(getattr(base, k)) for k in ("singular_curves", "singular_points", "secants",
                                                      "general_points")}
        kwargs[slot] = items
        yield name, SurfaceInput(S, base.variables, **kwargs), valid


def test_hint_corruption_rejected():
    rng = random.Random(2024)
    invalid = accepted_invalid = 0
    for name, inp, valid in _mutants(rng):
        if valid:
            assert verify_hints(inp).verified, name  # no false rejection either
            continue
        invalid += 1
        if inp is not None:
            try:
                verify_hints(inp)
                accepted_invalid += 1
            except HintError:
                pass
        if invalid == 100:
            break
    assert accepted_invalid == 0


# ---------------------------------------------------------------------------
# input errors


@pytest.mark.parametrize("src", ["x0^2*x1 + x2", "x0^5 + x1^5 + x2^5 + x3^5", "(x0 + x1)^2*(x2^2 + x3^2)"])
def test_bad_equations(src):
    with pytest.raises(HintError):
        verify_hints(SurfaceInput(parse_polynomial(src, V)))


def test_wrong_ambient():
    with pytest.raises(HintError):
        verify_hints(SurfaceInput(parse_polynomial("x0*x1 - x2^2", V[:3])))


# ---------------------------------------------------------------------------
# classification


def _label(src, names=V, **hints):
    return classify_case(SurfaceInput(parse_polynomial(src, names), tuple(names), **hints)).label


def test_classification():
    assert _label("x0^3 + x1^3 + x2^3 + x3^3") == CaseLabel.LOW_DEGREE
    assert _label("x0^4 + x1^4 + x2^4") == CaseLabel.CONE
    assert classify_case(SurfaceInput(MONOID)).label == CaseLabel.MONOID
    assert classify_case(SurfaceInput(DUPIN, tuple(CV))).label == CaseLabel.CYCLIDE_EXTRA_NODE
    assert _label("(x^2+y^2+z^2-w^2)^2 + w^2*(x^2+2*y^2+3*z^2+5*w^2)", CV) == CaseLabel.CYCLIDE_SMOOTH
    assert classify_case(SurfaceInput(DLINE, singular_curves=[LINE01])).label == CaseLabel.DOUBLE_LINE
    assert classify_case(SurfaceInput(TD, singular_curves=[CurveParam.twisted_cubic()])).label \
        == CaseLabel.TWISTED_CUBIC
    assert _label("x0^2*x1^2 + x0*x1*x2*x3 + x2^4 + x3^4 + x1^2*x2*x3") == CaseLabel.ELLIPTIC_TYPE1
    assert _label("x0^2*x1^2 + x0*(x2^3 + x1*x2*x3) + x2^4 + x3^4 + x1^4") == CaseLabel.ELLIPTIC_TYPE2


def test_unclassified_and_override():
    with pytest.raises(Unclassified):
        classify_case(SurfaceInput(DLINE))
    with pytest.raises(Unclassified):
        classify_case(SurfaceInput(DLINE, case_override="Sextic"))
    cls = classify_case(SurfaceInput(DLINE, case_override="DoubleLine"))
    assert cls.label == CaseLabel.DOUBLE_LINE

"""Linear systems: dimension counts, independent post-hoc checks, monotonicity."""

import pytest
from hypothesis import given, settings, strategies as st

from cremona.field import GF
from cremona.linsys import (ConditionError, ContainsSurface, CurveMultiplicity, CurveParam,
                            CurveThroughSamples, IdealMembership, PointMultiplicity, ValuationOrder,
                            solve_system, span_contains, weighted_order)
from cremona.poly import Polynomial

X = Polynomial.gens(4)
LINE = CurveParam.line((0, 0, 1, 0), (0, 0, 0, 1))  # x0 = x1 = 0


def test_quadrics_through_line_and_point():
    sys7 = solve_system(4, 2, [CurveMultiplicity(LINE, 1)])
    assert len(sys7) == 7
    sys6 = solve_system(4, 2, [CurveMultiplicity(LINE, 1), PointMultiplicity((1, 0, 0, 0), 1)])
    assert len(sys6) == 6 and sys6.projective_dim == 5


def test_standard_counts():
    assert len(solve_system(4, 2, [CurveMultiplicity(CurveParam.twisted_cubic(), 1)])) == 3
    assert len(solve_system(4, 3, [PointMultiplicity((1, 0, 0, 0), 2)])) == 16
    assert len(solve_system(4, 4, [PointMultiplicity((0, 0, 0, 1), 3)])) == 25
    assert len(solve_system(4, 3, [])) == 20


def test_ideal_membership_matches_curve_multiplicity():
    a = solve_system(4, 4, [CurveMultiplicity(LINE, 2)])
    b = solve_system(4, 4, [IdealMembership((X[0], X[1]), 2)])
    assert len(a) == len(b) == 22
    assert all(span_contains(a.basis, f) for f in b.basis)


def test_contains_surface():
    q = X[0] * X[1] - X[2] * X[3]
    sys = solve_system(4, 3, [ContainsSurface(q)])
    assert len(sys) == 4
    assert all(span_contains(sys.basis, q * x) for x in X)


def test_valuation_order():
    # weights (2,1,1) at (1:0:0:0): x1 has order 2, x2 and x3 order 1
    f = X[0] * X[1] + X[2] * X[3]
    assert weighted_order(f, (1, 0, 0, 0), (2, 1, 1)) == 2
    sys = solve_system(4, 2, [ValuationOrder((1, 0, 0, 0), (2, 1, 1), 2)])
    assert len(sys) == 7


def test_condition_validation():
    with pytest.raises(ConditionError):
        solve_system(4, 2, [PointMultiplicity((1, 0, 0), 1)])
    with pytest.raises(ConditionError):
        solve_system(4, 2, [ValuationOrder((1, 1, 0, 0), (1, 1, 1), 2)])
    with pytest.raises(ConditionError):
        solve_system(4, 2, [CurveThroughSamples(())])
    with pytest.raises(ConditionError):
        CurveParam.from_coeffs([[1, 0], [1, 0], [0, 0], [0, 0]], "line")
    with pytest.raises(ConditionError):
        CurveParam.from_coeffs([[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 0]], "line")


def test_sample_count_guard():
    C = CurveParam.twisted_cubic(GF(101))
    pts = tuple(C.point(t, 1) for t in range(10))
    with pytest.raises(ConditionError):
        solve_system(4, 2, [CurveThroughSamples(pts, 3)], GF(101))
    pts = tuple(C.point(t, 1) for t in range(20))
    sys = solve_system(4, 2, [CurveThroughSamples(pts, 3)], GF(101))
    assert len(sys) == 3 and any("stabilized" in n for n in sys.notes)


# ---------------------------------------------------------------------------
# random condition sets

small = st.integers(-2, 2)
points = st.tuples(small, small, small, small).filter(any)


@st.composite
def conditions(draw):
    kind = draw(st.sampled_from(["point", "line", "valuation"]))
    if kind == "point":
        return PointMultiplicity(draw(points), draw(st.integers(1, 2)))
    if kind == "line":
        a, b = draw(points), draw(points)
        try:
            return CurveMultiplicity(CurveParam.line(a, b), draw(st.integers(1, 2)))
        except ConditionError:
            return PointMultiplicity(a, 1)
    i = draw(st.integers(0, 3))
    center = tuple(int(j == i) for j in range(4))
    return ValuationOrder(center, tuple(draw(st.integers(1, 2)) for _ in range(3)), draw(st.integers(1, 3)))


def independent_check(f, cond):
    """Re-derive the condition without calling the library's checker."""
    if isinstance(cond, PointMultiplicity):
        derivs = [f] if cond.m == 1 else [f] + [f.diff(i) for i in range(4)]
        return all(g.evaluate(cond.point) == 0 for g in derivs)
    if isinstance(cond, CurveMultiplicity):
        comps = list(cond.curve.components)
        derivs = [f] if cond.m == 1 else [f] + [f.diff(i) for i in range(4)]
        return all(g.is_zero() or g.compose(comps).is_zero() for g in derivs)
    c = cond.center.index(1)
    others = [j for j in range(4) if j != c]
    return all(sum(w * e[j] for w, j in zip(cond.weights, others)) >= cond.m for e in f.terms)


@settings(max_examples=150, deadline=None, derandomize=True)
@given(st.integers(2, 3), st.lists(conditions(), min_size=1, max_size=4))
def test_post_hoc_and_monotonicity(degree, conds):
    dims = []
    for k in range(len(conds) + 1):
        sys = solve_system(4, degree, conds[:k])
        for f in sys.basis:
            assert all(independent_check(f, c) for c in conds[:k])
        dims.append(sys.projective_dim)
    assert all(a >= b for a, b in zip(dims, dims[1:]))

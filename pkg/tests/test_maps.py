"""Rational maps: equivariance, normalization, fitting stability, birationality."""

import pytest
from hypothesis import given, settings, strategies as st

from cremona.field import GF
from cremona.maps import (BASE_POINT, ImageFitError, MapError, RationalMap, apply_map,
                          birationality_certificate, composition_factor, curve_points,
                          exact_image_forms, fit_image_forms, image_degree_estimate, is_normalized,
                          normalize_map, normalize_point, push_points, random_points, ratio_relation_degree,
                          sample_surface_points)
from cremona.poly import Polynomial, monomials_of_degree

P = 10007
X = Polynomial.gens(4)
FP = GF(P)


@st.composite
def maps_mod_p(draw):
    d = draw(st.integers(1, 3))
    mons = monomials_of_degree(4, d)
    forms = []
    for _ in range(draw(st.integers(2, 5))):
        terms = draw(st.dictionaries(st.sampled_from(mons), st.integers(1, P - 1), min_size=1, max_size=4))
        forms.append(Polynomial(terms, 4, FP))
    return RationalMap(tuple(forms))


pts = st.tuples(*[st.integers(0, P - 1)] * 4).filter(any)


@settings(max_examples=1000, deadline=None, derandomize=True)
@given(maps_mod_p(), pts, st.integers(1, P - 1))
def test_rescaling_equivariance(f, pt, lam):
    a = apply_map(f, pt)
    b = apply_map(f, tuple(lam * v % P for v in pt))
    if a is BASE_POINT:
        assert b is BASE_POINT
        return
    assert b == tuple(pow(lam, f.degree, P) * v % P for v in a)
    assert normalize_point(a, FP) == normalize_point(b, FP)


def test_normalize_removes_common_factor():
    h = X[0] + X[3]
    g = RationalMap((X[0] * X[1], X[1] * X[2], X[2] * X[3], X[3] * X[0]))
    f = RationalMap(tuple(h * q for q in g.forms))
    assert not is_normalized(f)
    n = normalize_map(f)
    assert n.normalized and is_normalized(n)
    assert all(set(a.terms) == set(b.terms) for a, b in zip(n.forms, g.forms))
    assert normalize_map(n).forms == n.forms


def test_map_validation():
    with pytest.raises(MapError):
        RationalMap((X[0], X[1] * X[1]))
    with pytest.raises(MapError):
        RationalMap((X[0] + X[1] * X[1], X[1]))
    with pytest.raises(MapError):
        RationalMap((Polynomial.zero(4), Polynomial.zero(4)))


def test_standard_cremona_inverse():
    f = RationalMap((X[1] * X[2] * X[3], X[0] * X[2] * X[3], X[0] * X[1] * X[3], X[0] * X[1] * X[2]),
                    True, "cremona")
    cert = birationality_certificate(f, trials=100, seed=3)
    assert cert.verdict == "certified_birational" and cert.inverse_exact
    assert cert.inverse_degree == 3
    h = composition_factor(f, cert.inverse)
    assert h.degree() == 8 and set(h.terms) == {(2, 2, 2, 2)}


def test_degenerate_map_rejected():
    f = RationalMap((X[0] * X[0], X[0] * X[1], Polynomial.zero(4), Polynomial.zero(4)))
    with pytest.raises(MapError):
        birationality_certificate(f)
    cert = birationality_certificate(normalize_map(f), trials=50)
    assert cert.verdict == "inconclusive" and cert.jacobian_rank < cert.expected_rank


def test_two_to_one_map_inconclusive():
    f = RationalMap((X[0] * X[0], X[1] * X[1], X[2] * X[2], X[3] * X[3]), True)
    cert = birationality_certificate(f, trials=100, fit_inverse=False)
    # random pairs almost never share a fiber; the ratio test catches the degree
    assert cert.collisions == 0
    assert cert.verdict == "inconclusive"
    assert ratio_relation_degree(f, P, seed=1, max_unknowns=120) is None


def _veronese_points(count, seed):
    # quadrics in three of the coordinates: the image is a Veronese surface in P^5
    y = Polynomial.gens(4, FP)
    q = [y[i] * y[j] for i in range(3) for j in range(i, 3)]
    f = RationalMap(tuple(q))
    src = [p for p in random_points(4, count, P, seed) if p[:3] != (0, 0, 0)]
    return push_points(f, src, P)[0]


def test_held_out_stability():
    first = fit_image_forms(_veronese_points(120, 1), 6, 2, P)
    second = fit_image_forms(_veronese_points(120, 2), 6, 2, P)
    assert len(first) == len(second) == 6
    fresh = _veronese_points(200, 9)
    assert all(g.evaluate(pt) == 0 for g in first for pt in fresh)
    pts = _veronese_points(120, 1)
    pts[-1] = (1, 2, 3, 4, 5, 6)
    with pytest.raises(ImageFitError):
        fit_image_forms(pts, 6, 2, P)
    with pytest.raises(ImageFitError):
        fit_image_forms(pts[:20], 6, 2, P)


def test_degree_estimates():
    cubic = X[0] ** 3 + X[1] ** 3 + X[2] ** 3 - X[3] ** 3 + X[0] * X[1] * X[2]
    pts = sample_surface_points(cubic, P, 80, 4, one_per_line=True).points
    assert image_degree_estimate(pts, 4, P, seed=1).degree == 3
    est = image_degree_estimate(_veronese_points(400, 5), 6, P, seed=2)
    assert est.degree == 4 and len(est.probes) == 10


def test_exact_image_of_monoid_projection():
    S = X[0] * X[1] - X[2] * X[3]
    f = RationalMap((X[1], X[2], X[3]), True)  # projection from (1:0:0:0)
    assert exact_image_forms(f, S, 1) == []
    g = RationalMap((X[0], X[1], X[2], X[3] + X[0]), True)
    forms = exact_image_forms(g, S, 2)
    assert len(forms) == 1
    back = forms[0].compose(list(g.forms))
    assert back == S or back == -S


def test_curve_points_lie_on_both_surfaces():
    F = X[0] * X[2] - X[1] * X[1]
    G = X[1] * X[3] - X[2] * X[2]
    out = curve_points(F, G, P, 40, seed=5)
    assert len(out) == 40
    Fp, Gp = F.to_field(FP), G.to_field(FP)
    assert all(Fp.evaluate(q) == 0 and Gp.evaluate(q) == 0 for q in out)
    assert len(set(out)) == 40


def test_sampling_is_deterministic():
    S = X[0] ** 4 + X[1] ** 4 - X[2] ** 4 + X[0] * X[1] * X[2] * X[3]
    a = sample_surface_points(S, P, 30, seed=11)
    b = sample_surface_points(S, P, 30, seed=11)
    assert a.points == b.points and a.verify()

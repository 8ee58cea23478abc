"""Effective thresholds on the catalog models."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cremona.threshold import (CATALOG, INFINITY, NOT_EFFECTIVE, PicardModel, ThresholdError,
                               UnsupportedModel, corollary_certificate, effective_threshold,
                               get_model, monotonicity_check)

TABLE = [
    ("p3", (1,), Fraction(1, 4)),
    ("blowup-p3-pt", (1, -1), Fraction(0)),
    ("p3", (3,), Fraction(3, 4)),
    ("p1xp2", (3, 2), Fraction(2, 3)),
    ("wps1112", (4,), Fraction(4, 5)),
]


@pytest.mark.parametrize("model,cls,rho", TABLE)
def test_catalog_values(model, cls, rho):
    got = effective_threshold(get_model(model), cls)
    assert got == rho and isinstance(got, Fraction)


def test_quadric_cone_cubic_section():
    assert effective_threshold(get_model("quadric-cone-q4"), (3, -1)) == Fraction(2, 3)
    assert corollary_certificate(get_model("quadric-cone-q4"), (3, -1)).certifies_ce_to_plane


def test_degenerate_values():
    assert effective_threshold(get_model("p3"), (-1,)) == NOT_EFFECTIVE
    trivial = PicardModel("anti", 1, (1,), ((1,),))
    assert effective_threshold(trivial, (2,)) == INFINITY
    cert = corollary_certificate(get_model("p3"), (4,))
    assert cert.rho == 1 and not cert.certifies_ce_to_plane


def test_errors():
    with pytest.raises(ThresholdError):
        get_model("p4")
    with pytest.raises(ThresholdError):
        effective_threshold(get_model("p1xp2"), (1,))
    with pytest.raises(UnsupportedModel):
        PicardModel("bad", 2, (-1, -1), ((1, 0), (2, 0)))


def test_monotonicity():
    p3, bl = get_model("p3"), get_model("blowup-p3-pt")
    res = monotonicity_check([(p3, (4,)), (p3, (8,))])
    assert res[0].status == "holds"
    res = monotonicity_check([(p3, (8,)), (bl, (1, -1))])
    assert res[0].status == "violated"
    res = monotonicity_check([(p3, (1,)), (p3, (8,))])
    assert res[0].status == "not applicable"
    res = monotonicity_check([(p3, (8,)), (p3, (4,))], source_canonical=False)
    assert res[0].status == "not applicable"


@settings(max_examples=300, deadline=None, derandomize=True)
@given(st.sampled_from(sorted(CATALOG)), st.data())
def test_threshold_is_supremum(name, data):
    model = CATALOG[name]
    cls = [data.draw(st.integers(-3, 8)) for _ in range(model.rank)]
    rho = effective_threshold(model, cls)
    if rho == NOT_EFFECTIVE:
        assert not model.is_effective(cls)
        return
    assert model.is_effective(cls)
    at = [Fraction(h) + rho * k for h, k in zip(cls, model.canonical_class)]
    past = [Fraction(h) + (rho + Fraction(1, 1000)) * k for h, k in zip(cls, model.canonical_class)]
    assert model.is_effective(at)
    assert not model.is_effective(past)

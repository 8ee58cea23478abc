"""Effective thresholds on models with a known Picard lattice.

A model records its canonical class and a simplicial effective cone in a
fixed basis. The threshold of a class H is the largest m with H + mK in the
cone; writing H and K in ray coordinates reduces this to a minimum of ratios.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .field import QQ
from .matrix import inverse, rank


class ThresholdError(ValueError):
    pass


class UnsupportedModel(ThresholdError):
    pass


INFINITY = "+infinity"
NOT_EFFECTIVE = "not effective"

Threshold = Union[Fraction, str]


@dataclass(frozen=True)
class PicardModel:
    name: str
    rank: int
    canonical_class: tuple
    effective_cone: tuple  # extreme rays, each a tuple of length rank
    class_basis_doc: str = ""

    def __post_init__(self):
        object.__setattr__(self, "canonical_class", tuple(QQ(v) for v in self.canonical_class))
        rays = tuple(tuple(QQ(v) for v in r) for r in self.effective_cone)
        object.__setattr__(self, "effective_cone", rays)
        if len(self.canonical_class) != self.rank:
            raise ThresholdError("canonical class has the wrong length")
        if any(len(r) != self.rank for r in rays):
            raise ThresholdError("ray of the wrong length")
        if len(rays) != self.rank or rank([list(r) for r in rays], self.rank, QQ) != self.rank:
            raise UnsupportedModel(f"{self.name}: effective cone is not simplicial")

    def ray_coordinates(self, cls: Sequence) -> list:
        """Coordinates of a class in the basis of extreme rays."""
        if len(cls) != self.rank:
            raise ThresholdError(f"class {tuple(cls)} has length {len(cls)}, model rank is {self.rank}")
        # columns are rays: solve R c = cls
        cols = [[self.effective_cone[j][i] for j in range(self.rank)] for i in range(self.rank)]
        inv = inverse(cols, QQ)
        return [QQ(sum(a * QQ(b) for a, b in zip(row, cls))) for row in inv]

    def is_effective(self, cls: Sequence) -> bool:
        return all(c >= 0 for c in self.ray_coordinates(cls))


@dataclass(frozen=True)
class DivisorClass:
    coordinates: tuple

    def __post_init__(self):
        object.__setattr__(self, "coordinates", tuple(QQ(v) for v in self.coordinates))


def effective_threshold(model: PicardModel, H) -> Threshold:
    """sup{m : H + mK effective}; ``INFINITY`` or ``NOT_EFFECTIVE`` in the degenerate cases."""
    coords = H.coordinates if isinstance(H, DivisorClass) else tuple(QQ(v) for v in H)
    h = model.ray_coordinates(coords)
    k = model.ray_coordinates(model.canonical_class)
    if any(c < 0 for c in h):
        return NOT_EFFECTIVE
    ratios = [Fraction(hi) / -ki for hi, ki in zip(h, k) if ki < 0]
    if not ratios:
        return INFINITY
    return min(ratios)


def format_threshold(rho: Threshold) -> str:
    if isinstance(rho, str):
        return rho
    rho = Fraction(rho)
    return str(rho.numerator) if rho.denominator == 1 else f"{rho.numerator}/{rho.denominator}"


@dataclass(frozen=True)
class CorollaryCertificate:
    certifies_ce_to_plane: bool
    rho: Threshold
    good_model_asserted_by: str

    def to_json(self) -> dict:
        return {
            "certifies_CE_to_plane": self.certifies_ce_to_plane,
            "rho": format_threshold(self.rho),
            "good_model_asserted_by": self.good_model_asserted_by,
        }


def corollary_certificate(model: PicardModel, H, asserted_by: str = "caller") -> CorollaryCertificate:
    """Plane criterion 0 < rho < 1, on a model the caller vouches is good."""
    rho = effective_threshold(model, H)
    ok = not isinstance(rho, str) and 0 < rho < 1
    return CorollaryCertificate(ok, rho, asserted_by)


@dataclass(frozen=True)
class MonotonicityResult:
    source: str
    target: str
    rho_source: Threshold
    rho_target: Threshold
    status: str  # holds | violated | not applicable


def _at_least(a: Threshold, b: Threshold) -> bool:
    if a == INFINITY:
        return True
    if b == INFINITY or isinstance(a, str) or isinstance(b, str):
        return False
    return a >= b


def monotonicity_check(pairs: Sequence[tuple], source_canonical: bool = True) -> list[MonotonicityResult]:
    """Check rho(target) >= rho(source) along declared birational links.

    ``pairs`` holds consecutive (model, class) entries; each adjacent pair is
    one link. The inequality is only claimed when the source ambient space is
    declared to have canonical singularities and rho(source) >= 1.
    """
    out = []
    for (m1, h1), (m2, h2) in zip(pairs, pairs[1:]):
        r1, r2 = effective_threshold(m1, h1), effective_threshold(m2, h2)
        if not source_canonical or isinstance(r1, str) and r1 != INFINITY \
                or not isinstance(r1, str) and r1 < 1:
            status = "not applicable"
        else:
            status = "holds" if _at_least(r2, r1) else "violated"
        out.append(MonotonicityResult(m1.name, m2.name, r1, r2, status))
    return out


CATALOG = {
    "p3": PicardModel(
        "p3", 1, (-4,), ((1,),),
        "basis: hyperplane class h; K = -4h"),
    "blowup-p3-pt": PicardModel(
        "blowup-p3-pt", 2, (-4, 2), ((0, 1), (1, -1)),
        "basis: (h, e) with h the pulled-back plane and e the exceptional divisor; "
        "K = -4h + 2e; rays e and h - e (strict transform of a plane through the point)"),
    "p1xp2": PicardModel(
        "p1xp2", 2, (-2, -3), ((1, 0), (0, 1)),
        "basis: (a, b) pulled back from O(1) on the two factors; type (i, j) = ia + jb; "
        "K = (-2, -3)"),
    "wps1112": PicardModel(
        "wps1112", 1, (-5,), ((1,),),
        "basis: O(1) on P(1,1,1,2); K = O(-5); hyperplanes of the cone over the Veronese "
        "surface pull back to O(2), so a quadric section is O(4)"),
    "quadric-cone-q4": PicardModel(
        "quadric-cone-q4", 2, (-3, 0), ((0, 1), (1, -1)),
        "small resolution T of the rank-4 quadric cone in P^4, realized as the scroll "
        "P(O + O(1) + O(1)) over P^1; basis (H, F) with H the tautological class (pullback "
        "of a hyperplane) and F a fiber (pullback of one family of planes); K = -3H; "
        "rays F and H - F (the other family of planes); a cubic section through the "
        "plane class F is S_T = 3H - F"),
}


def get_model(name: str) -> PicardModel:
    try:
        return CATALOG[name]
    except KeyError:
        raise ThresholdError(f"unknown model {name!r}; choose from {', '.join(sorted(CATALOG))}") from None

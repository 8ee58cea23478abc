"""Quartic surface inputs: hint verification, singular points and case classification."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from enum import Enum
from typing import Sequence

from .field import QQ, Field
from .linsys import CurveParam, ideal_membership_certificate
from .matrix import rank
from .poly import Polynomial, divides, exact_div, gcd
from .univariate import rational_roots


class HintError(ValueError):
    pass


class Unclassified(RuntimeError):
    pass


class CaseLabel(str, Enum):
    MONOID = "Monoid"
    DOUBLE_LINE = "DoubleLine"
    DOUBLE_CONIC = "DoubleConic"
    TWISTED_CUBIC = "TwistedCubic"
    ELLIPTIC_TYPE1 = "EllipticType1"
    ELLIPTIC_TYPE2 = "EllipticType2"
    CYCLIDE_EXTRA_NODE = "CyclideExtraNode"
    CYCLIDE_SMOOTH = "CyclideSmooth"
    CONE = "Cone"
    LOW_DEGREE = "LowDegree"


@dataclass(frozen=True)
class ConicHint:
    """A conic given by the plane and a quadric cutting it."""

    plane: Polynomial
    quadric: Polynomial


@dataclass
class SurfaceInput:
    equation: Polynomial
    variables: tuple = ("x0", "x1", "x2", "x3")
    singular_curves: list = dc_field(default_factory=list)  # CurveParam or ConicHint
    singular_points: list = dc_field(default_factory=list)
    secants: list = dc_field(default_factory=list)
    gamma: CurveParam | None = None
    residual_quadric: Polynomial | None = None
    general_points: list = dc_field(default_factory=list)
    case_override: str | None = None
    verified: bool = False

    @property
    def field(self) -> Field:
        return self.equation.field

    @property
    def degree(self) -> int:
        return self.equation.degree()


# ---------------------------------------------------------------------------
# local invariants


def _indices_of_order(nvars: int, k: int):
    for e in itertools.product(range(k + 1), repeat=nvars):
        if sum(e) == k:
            yield e


def multiplicity_at(S: Polynomial, point: Sequence) -> int:
    """Order of vanishing of S at a point (0 if the point is off S)."""
    for k in range(S.degree() + 1):
        for alpha in _indices_of_order(S.nvars, k):
            if S.diff_multi(alpha).evaluate(point) != 0:
                return k
    return S.degree() + 1


def is_singular_point(S: Polynomial, point: Sequence) -> bool:
    return S.evaluate(point) == 0 and all(S.diff(i).evaluate(point) == 0 for i in range(S.nvars))


def curve_on_surface(S: Polynomial, curve: CurveParam) -> bool:
    comps = list(curve.components if curve.field == S.field else curve.to_field(S.field).components)
    return S.compose(comps).is_zero()


def curve_in_singular_locus(S: Polynomial, curve: CurveParam) -> bool:
    comps = list(curve.components if curve.field == S.field else curve.to_field(S.field).components)
    polys = [S] + [S.diff(i) for i in range(S.nvars)]
    return all(g.is_zero() or g.compose(comps).is_zero() for g in polys)


def conic_in_singular_locus(S: Polynomial, conic: ConicHint) -> bool:
    """S lies in the square of the conic's ideal (the conic is a double curve)."""
    return ideal_membership_certificate(S, (conic.plane, conic.quadric), 2) is not None


def has_repeated_factor(S: Polynomial) -> bool:
    """Nontrivial gcd with a partial derivative means a multiple component."""
    for i in range(S.nvars):
        d = S.diff(i)
        if not d.is_zero() and not gcd(S, d).is_constant():
            return True
    return False


def cone_vertex(S: Polynomial):
    """A vertex if S is a cone (partials linearly dependent), else None."""
    from .linsys import monomial_basis
    from .matrix import left_nullspace
    d = S.degree()
    if d < 1:
        return None
    mons = monomial_basis(S.nvars, d - 1)
    rows = [[S.diff(i).terms.get(m, 0) for m in mons] for i in range(S.nvars)]
    ker = left_nullspace(rows, len(mons), S.field)
    return tuple(ker[0]) if ker else None


def small_points(nvars: int, bound: int):
    """Primitive integer points with max |coordinate| <= bound, by increasing height."""
    for h in range(0, bound + 1):
        for pt in itertools.product(range(-h, h + 1), repeat=nvars):
            if max(map(abs, pt)) != h or not any(pt):
                continue
            first = next(v for v in pt if v)
            if first < 0:
                continue
            if math.gcd(*pt) != 1:
                continue
            yield pt


def find_rational_points(S: Polynomial, count: int = 5, bound: int = 4, avoid=None) -> list[tuple]:
    """Rational points of V(S), lowest height first.

    Scans lines parallel to a coordinate axis through small integer points and
    keeps the rational roots; ``avoid`` rejects points by predicate.
    """
    if S.field.p:
        raise ValueError("rational point search needs a surface over Q")
    n = S.nvars
    found, seen = [], set()

    def keep(pt):
        pt = tuple(QQ(v) for v in pt)
        if not any(pt):
            return False
        lead = next(v for v in pt if v)
        norm = tuple(QQ.div(v, lead) for v in pt)
        if norm in seen or (avoid is not None and avoid(norm)):
            return False
        seen.add(norm)
        found.append(norm)
        return len(found) >= count

    for pt in small_points(n, bound):
        if S.evaluate(pt) == 0 and keep(pt):
            return found
    for h in range(1, bound + 1):
        for v in range(n):
            for rest in itertools.product(range(-h, h + 1), repeat=n - 1):
                if max(map(abs, rest)) != h:
                    continue
                fixed = list(rest[:v]) + [None] + list(rest[v:])
                coeffs = [0] * (S.degree_in(v) + 1)
                for e, c in S.terms.items():
                    val = c
                    for i, k in enumerate(e):
                        if i != v and k:
                            val *= fixed[i] ** k
                    coeffs[e[v]] += val
                if not any(coeffs):
                    continue
                for r in rational_roots(coeffs):
                    pt = list(fixed)
                    pt[v] = r
                    if keep(pt):
                        return found
    return found


def find_singular_points(S: Polynomial, bound: int = 3, min_mult: int = 2, avoid=None) -> list[tuple]:
    """Small-height integer points of multiplicity >= min_mult."""
    out = []
    for pt in small_points(S.nvars, bound):
        if S.evaluate(pt) != 0:
            continue
        if avoid is not None and avoid(pt):
            continue
        if multiplicity_at(S, pt) >= min_mult:
            out.append(tuple(QQ(v) if not S.field.p else v % S.field.p for v in pt))
    return out


# ---------------------------------------------------------------------------
# coordinate frames


def frame_matrix(points: Sequence[Sequence], fld: Field = QQ) -> list[list]:
    """Invertible matrix whose leading columns are the given points, completed by unit vectors."""
    n = len(points[0])
    cols = [[fld(v) for v in p] for p in points]
    if rank(cols, n, fld) != len(cols):
        raise ValueError("frame points are linearly dependent")
    for j in range(n):
        if len(cols) == n:
            break
        unit = [int(i == j) for i in range(n)]
        if rank(cols + [unit], n, fld) == len(cols) + 1:
            cols.append(unit)
    return [[cols[c][r] for c in range(n)] for r in range(n)]


def change_coordinates(S: Polynomial, A: Sequence[Sequence]) -> Polynomial:
    """S'(x) = S(A x)."""
    return S.linear_substitute(A)


# ---------------------------------------------------------------------------
# hint verification


def verify_hints(inp: SurfaceInput) -> SurfaceInput:
    S = inp.equation
    if S.nvars != 4:
        raise HintError(f"expected a surface in P^3 (4 variables), got {S.nvars}")
    if not S.is_homogeneous():
        raise HintError("the equation is not homogeneous")
    if S.degree() < 1 or S.degree() > 4:
        raise HintError(f"degree {S.degree()} is out of scope (1 to 4)")
    if has_repeated_factor(S):
        raise HintError("the equation has a repeated factor")
    fld = S.field
    for k, c in enumerate(inp.singular_curves):
        if isinstance(c, ConicHint):
            if not conic_in_singular_locus(S, c):
                raise HintError(f"singular curve hint #{k} (conic by equations) is not a double curve of S")
        elif not curve_in_singular_locus(S, c):
            raise HintError(f"singular curve hint #{k} ({c.label}) is not in the singular locus of S")
    for k, pt in enumerate(inp.singular_points):
        pt = tuple(fld(v) for v in pt)
        if not is_singular_point(S, pt):
            raise HintError(f"singular point hint #{k} {pt} is not a singular point of S")
    for k, line in enumerate(inp.secants):
        if line.degree != 1:
            raise HintError(f"secant hint #{k} is not a line")
        if not curve_on_surface(S, line):
            raise HintError(f"secant hint #{k} does not lie on S")
    if inp.gamma is not None and not curve_on_surface(S, inp.gamma):
        raise HintError("the curve hint gamma does not lie on S")
    for k, pt in enumerate(inp.general_points):
        if S.evaluate(tuple(fld(v) for v in pt)) != 0:
            raise HintError(f"general point hint #{k} is not on S")
    inp.verified = True
    return inp


# ---------------------------------------------------------------------------
# normal forms


def cyclide_q(S: Polynomial):
    """q with S = (x^2+y^2+z^2-w^2)^2 + w^2 q, variables ordered (x, y, z, w); else None."""
    if S.nvars != 4 or S.degree() != 4:
        return None
    x, y, z, w = Polynomial.gens(4, S.field)
    rest = S - (x * x + y * y + z * z - w * w) ** 2
    w2 = w * w
    if rest.is_zero() or not divides(w2, rest):
        return None
    return exact_div(rest, w2)


def elliptic_type(S: Polynomial):
    """1 or 2 if S is in the bracketed normal form at [1,0,0,0] with x1 the double-plane
    coordinate, else None.

    Type 1: x0^2 x1^2 + x0 x1 Q2(x2,x3) + F4(x1,x2,x3); type 2 has x0 (c x2^3 + x1 Q2).
    A nonzero rescaling of the leading coefficient is allowed.
    """
    if S.nvars != 4 or S.degree() != 4 or S.degree_in(0) != 2:
        return None
    parts = {}
    for e, c in S.terms.items():
        parts.setdefault(e[0], {})[(0,) + e[1:]] = c
    lead = Polynomial(parts.get(2, {}), 4, S.field)
    x1 = Polynomial.var(1, 4, S.field)
    if lead.is_zero() or len(lead.terms) != 1 or (0, 2, 0, 0) not in lead.terms:
        return None
    mid = Polynomial(parts.get(1, {}), 4, S.field)
    if mid.is_zero():
        return None
    # the x0 coefficient modulo x1
    red = Polynomial({e: c for e, c in mid.terms.items() if e[1] == 0}, 4, S.field)
    rest = mid - red
    if red.is_zero():
        # type 1 also needs the x0 x1 coefficient to involve only x2, x3
        q = exact_div(rest, x1)
        return 1 if all(e[1] == 0 for e in q.terms) else None
    if len(red.terms) == 1 and (0, 0, 3, 0) in red.terms:
        q = exact_div(rest, x1) if not rest.is_zero() else rest
        return 2 if all(e[1] == 0 for e in q.terms) else None
    return None


# ---------------------------------------------------------------------------
# classification


@dataclass
class Classification:
    label: CaseLabel
    evidence: list
    point: tuple | None = None
    curve: object = None


def classify_case(inp: SurfaceInput, search_bound: int = 2) -> Classification:
    """Dispatch on verified evidence; hints are verified first if needed."""
    if not inp.verified:
        verify_hints(inp)
    S = inp.equation
    d = S.degree()
    if inp.case_override:
        try:
            label = CaseLabel(inp.case_override)
        except ValueError:
            raise Unclassified(f"unknown case override {inp.case_override!r}; "
                               f"choose from {', '.join(c.value for c in CaseLabel)}") from None
        return Classification(label, [f"case override {label.value} supplied by the user"])
    if d <= 3:
        return Classification(CaseLabel.LOW_DEGREE, [f"degree {d}"])
    v = cone_vertex(S)
    if v is not None:
        return Classification(CaseLabel.CONE, [f"partial derivatives are dependent; vertex {v}"], v)
    # a point of multiplicity 3
    candidates = [tuple(S.field(c) for c in p) for p in inp.singular_points]
    candidates += [tuple(int(i == j) for j in range(4)) for i in range(4)]
    for pt in candidates:
        if S.evaluate(pt) == 0 and multiplicity_at(S, pt) >= d - 1:
            return Classification(CaseLabel.MONOID, [f"point {pt} has multiplicity {d - 1}"], pt)
    if not S.field.p:
        found = find_singular_points(S, search_bound, d - 1)
        if found:
            return Classification(CaseLabel.MONOID, [f"point {found[0]} has multiplicity {d - 1}"],
                                  found[0])
    q = cyclide_q(S)
    if q is not None:
        ev = ["equation has the shape (x^2+y^2+z^2-w^2)^2 + w^2 q; the conic w = x^2+y^2+z^2 = 0 is double"]
        on_c = _on_cyclide_conic
        nodes = [p for p in candidates[:len(inp.singular_points)] if not on_c(p)]
        if not nodes and not S.field.p:
            nodes = find_singular_points(S, search_bound, 2, avoid=on_c)
        if nodes:
            return Classification(CaseLabel.CYCLIDE_EXTRA_NODE, ev + [f"extra node at {nodes[0]}"], nodes[0])
        return Classification(CaseLabel.CYCLIDE_SMOOTH, ev + ["no singular point off the conic found"])
    for c in inp.singular_curves:
        if isinstance(c, ConicHint):
            return Classification(CaseLabel.DOUBLE_CONIC, ["verified double conic (by equations)"], curve=c)
        label = {1: CaseLabel.DOUBLE_LINE, 2: CaseLabel.DOUBLE_CONIC, 3: CaseLabel.TWISTED_CUBIC}.get(c.degree)
        if label is not None:
            return Classification(label, [f"verified double {c.label} from hint"], curve=c)
    t = elliptic_type(S)
    if t is not None:
        label = CaseLabel.ELLIPTIC_TYPE1 if t == 1 else CaseLabel.ELLIPTIC_TYPE2
        return Classification(label, [f"normal form of type ({t}) at [1,0,0,0]"], (1, 0, 0, 0))
    raise Unclassified("no case established: supply singular_curves or singular_points hints "
                       "(singular loci are not decomposed automatically)")


def _on_cyclide_conic(pt) -> bool:
    x, y, z, w = pt
    return w == 0 and x * x + y * y + z * z == 0

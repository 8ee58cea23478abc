"""Linear systems of forms cut out by base conditions.

Every condition is turned into linear equations on the coefficients of a
form of fixed degree written in the monomial basis; the system is the exact
kernel of the stacked equations. After solving, every basis element is
re-checked against every condition by direct substitution, which does not
reuse the row-generation code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence, Union

from .field import QQ, Field
from .matrix import nullspace, rank
from .poly import Polynomial, gcd, monomials_of_degree, divides


class ConditionError(ValueError):
    pass


_LABEL_DEGREES = {"line": 1, "conic": 2, "twisted_cubic": 3, "rational_quartic": 4}
_LABEL_SPAN = {"line": 2, "conic": 3, "twisted_cubic": 4}


@dataclass(frozen=True)
class CurveParam:
    """A rational curve given by binary forms in (s, t) of a common degree."""

    components: tuple
    label: str = "custom"

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ConditionError("curve needs at least one component")
        nonzero = [c for c in comps if not c.is_zero()]
        if not nonzero:
            raise ConditionError("all components vanish")
        degs = {c.degree() for c in nonzero}
        if len(degs) != 1 or any(c.nvars != 2 or not c.is_homogeneous() for c in comps):
            raise ConditionError("components must be binary forms of one common degree")
        e = degs.pop()
        if self.label not in _LABEL_DEGREES and self.label != "custom":
            raise ConditionError(f"unknown curve label {self.label!r}")
        if self.label in _LABEL_DEGREES and _LABEL_DEGREES[self.label] != e:
            raise ConditionError(f"a {self.label} must have degree {_LABEL_DEGREES[self.label]}, got {e}")
        g = gcd(nonzero)
        if not g.is_constant():
            raise ConditionError(
                f"parametrization is not reduced: components share the factor {g}")
        if self.label in _LABEL_SPAN:
            span = rank([[c.coefficient((e - i, i)) for i in range(e + 1)] for c in comps],
                        e + 1, comps[0].field)
            if span != _LABEL_SPAN[self.label]:
                raise ConditionError(
                    f"parametrization labelled {self.label} spans a linear space of "
                    f"dimension {span - 1}; the curve is degenerate")

    @property
    def degree(self) -> int:
        return max(c.degree() for c in self.components)

    @property
    def field(self) -> Field:
        return self.components[0].field

    def point(self, s, t) -> tuple:
        return tuple(c.evaluate((s, t)) for c in self.components)

    def to_field(self, fld: Field) -> "CurveParam":
        return CurveParam(tuple(c.to_field(fld) for c in self.components), self.label)

    @classmethod
    def from_coeffs(cls, rows: Sequence[Sequence], label: str = "custom", fld: Field = QQ) -> "CurveParam":
        """Each row lists the coefficients of s^e, s^(e-1) t, ..., t^e."""
        comps = []
        for row in rows:
            e = len(row) - 1
            comps.append(Polynomial({(e - i, i): c for i, c in enumerate(row)}, 2, fld))
        return cls(tuple(comps), label)

    @classmethod
    def line(cls, a: Sequence, b: Sequence, fld: Field = QQ) -> "CurveParam":
        """The line s*a + t*b."""
        return cls.from_coeffs([[x, y] for x, y in zip(a, b)], "line", fld)

    @classmethod
    def twisted_cubic(cls, fld: Field = QQ) -> "CurveParam":
        return cls.from_coeffs([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
                               "twisted_cubic", fld)

    def tangent_line(self, s, t) -> "CurveParam":
        """Tangent line at the parameter (s:t), spanned by the point and a derivative."""
        pt = self.point(s, t)
        for var in (1, 0):
            d = tuple(c.diff(var).evaluate((s, t)) if c.degree() > 0 else 0 for c in self.components)
            if rank([pt, d], len(pt), self.field) == 2:
                return CurveParam.line(pt, d, self.field)
        raise ConditionError("curve is singular at the requested parameter")


@dataclass(frozen=True)
class PointMultiplicity:
    point: tuple
    m: int = 1


@dataclass(frozen=True)
class CurveMultiplicity:
    curve: CurveParam
    m: int = 1


@dataclass(frozen=True)
class CurveThroughSamples:
    points: tuple
    curve_degree: int | None = None


@dataclass(frozen=True)
class ValuationOrder:
    center: tuple
    weights: tuple
    m: int


@dataclass(frozen=True)
class ContainsSurface:
    """The form vanishes on the hypersurface ``surface`` (is divisible by it)."""

    surface: Polynomial


@dataclass(frozen=True)
class IdealMembership:
    """The form lies in ``(generators)^power``.

    For a complete-intersection curve this is multiplicity ``power`` along it;
    used for curves without a rational parametrization over the base field.
    """

    generators: tuple
    power: int = 1


LinearCondition = Union[PointMultiplicity, CurveMultiplicity, CurveThroughSamples,
                        ValuationOrder, ContainsSurface, IdealMembership]


def _validate(cond, nvars):
    m = getattr(cond, "m", 1)
    if m < 1:
        raise ConditionError("multiplicity must be at least 1")
    if isinstance(cond, PointMultiplicity) and len(cond.point) != nvars:
        raise ConditionError("point has the wrong number of coordinates")
    if isinstance(cond, CurveMultiplicity) and len(cond.curve.components) != nvars:
        raise ConditionError("curve lives in the wrong ambient space")
    if isinstance(cond, CurveThroughSamples):
        if not cond.points:
            raise ConditionError("sample list is empty")
        if any(len(p) != nvars for p in cond.points):
            raise ConditionError("sample point has the wrong number of coordinates")
    if isinstance(cond, ValuationOrder):
        if len(cond.center) != nvars or len(cond.weights) != nvars - 1:
            raise ConditionError("valuation needs a center in P^n and n weights")
        if any(not isinstance(w, int) or w <= 0 for w in cond.weights):
            raise ConditionError("weights must be positive integers")
        if sum(1 for c in cond.center if c) != 1:
            raise ConditionError("valuation centers must be coordinate points; "
                                 "move the point to a coordinate point first")
    if isinstance(cond, IdealMembership) and (not cond.generators or cond.power < 1):
        raise ConditionError("ideal membership needs generators and a positive power")


def monomial_basis(num_vars: int, degree: int) -> list[tuple]:
    return monomials_of_degree(num_vars, degree)


def _multi_indices(nvars: int, below: int):
    for order in range(below):
        for alpha in monomials_of_degree(nvars, order):
            yield alpha


def _falling(e: int, k: int) -> int:
    return math.perm(e, k) if k <= e else 0


def condition_rows(cond: LinearCondition, degree: int, nvars: int = 4, field: Field = QQ) -> list[list]:
    """Linear equations on the coefficients (in :func:`monomial_basis` order)."""
    _validate(cond, nvars)
    basis = monomial_basis(nvars, degree)
    p = field.p
    rows: list[list] = []
    if isinstance(cond, PointMultiplicity):
        pt = [field(v) for v in cond.point]
        for alpha in _multi_indices(nvars, cond.m):
            row = []
            for e in basis:
                coef = 1
                for ei, ai, xi in zip(e, alpha, pt):
                    if ai > ei:
                        coef = 0
                        break
                    coef *= _falling(ei, ai) * (xi ** (ei - ai) if not p else pow(xi, ei - ai, p))
                row.append(coef % p if p else field(coef))
            rows.append(row)
    elif isinstance(cond, CurveMultiplicity):
        curve = cond.curve if cond.curve.field == field else cond.curve.to_field(field)
        comps = curve.components
        one = Polynomial.constant(1, 2, field)
        pow_cache = [{0: one} for _ in comps]

        def cpow(i, k):
            cache = pow_cache[i]
            if k not in cache:
                cache[k] = cpow(i, k - 1) * comps[i]
            return cache[k]

        for alpha in _multi_indices(nvars, cond.m):
            if sum(alpha) > degree:
                continue
            out_deg = curve.degree * (degree - sum(alpha))
            images = []
            for e in basis:
                coef = 1
                for ei, ai in zip(e, alpha):
                    coef *= _falling(ei, ai)
                if coef == 0:
                    images.append(None)
                    continue
                img = Polynomial.constant(coef, 2, field)
                for i, (ei, ai) in enumerate(zip(e, alpha)):
                    if ei - ai:
                        img = img * cpow(i, ei - ai)
                images.append(img)
            for k in range(out_deg + 1):
                key = (out_deg - k, k)
                rows.append([img.terms.get(key, 0) if img is not None else 0 for img in images])
    elif isinstance(cond, CurveThroughSamples):
        for pt in cond.points:
            pt = [field(v) for v in pt]
            row = []
            for e in basis:
                v = 1
                for xi, ei in zip(pt, e):
                    if ei:
                        v = v * (pow(xi, ei, p) if p else xi ** ei)
                row.append(v % p if p else field(v))
            rows.append(row)
    elif isinstance(cond, ValuationOrder):
        c = next(i for i, v in enumerate(cond.center) if v)
        others = [i for i in range(nvars) if i != c]
        for j, e in enumerate(basis):
            order = sum(w * e[i] for w, i in zip(cond.weights, others))
            if order < cond.m:
                row = [0] * len(basis)
                row[j] = 1
                rows.append(row)
    elif isinstance(cond, ContainsSurface):
        rows = _annihilator(_ideal_span([cond.surface], 1, degree, nvars, field), len(basis), field)
    elif isinstance(cond, IdealMembership):
        rows = _annihilator(_ideal_span(cond.generators, cond.power, degree, nvars, field),
                            len(basis), field)
    else:
        raise ConditionError(f"unknown condition {cond!r}")
    return rows


def _power_products(gens, power):
    """All products of ``power`` generators (with repetition)."""
    from itertools import combinations_with_replacement
    out = []
    for combo in combinations_with_replacement(range(len(gens)), power):
        f = gens[combo[0]]
        for i in combo[1:]:
            f = f * gens[i]
        out.append(f)
    return out


def _ideal_span(gens, power, degree, nvars, field) -> list[Polynomial]:
    gens = [g if g.field == field else g.to_field(field) for g in gens]
    span = []
    for g in _power_products(gens, power):
        if not g.is_homogeneous():
            raise ConditionError("ideal generators must be homogeneous")
        d = g.degree()
        if d > degree:
            continue
        for mono in monomials_of_degree(nvars, degree - d):
            span.append(g * Polynomial.monomial(mono, 1, field))
    return span


def _annihilator(span: list[Polynomial], ncols: int, field: Field) -> list[list]:
    if not span:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    basis = monomial_basis(span[0].nvars, span[0].degree())
    vecs = [[f.terms.get(m, 0) for m in basis] for f in span]
    return nullspace(vecs, ncols, field)


def condition_matrix(conditions: Sequence[LinearCondition], degree: int, nvars: int = 4,
                     field: Field = QQ) -> list[list]:
    rows = []
    for cond in conditions:
        rows.extend(condition_rows(cond, degree, nvars, field))
    return rows


@dataclass
class LinearSystemBasis:
    degree: int
    num_vars: int
    basis: list
    conditions: tuple = ()
    field: Field = QQ
    notes: list = dc_field(default_factory=list)

    @property
    def projective_dim(self) -> int:
        return len(self.basis) - 1

    def __len__(self):
        return len(self.basis)

    def contains(self, f: Polynomial) -> bool:
        """Exact span membership by a rank comparison."""
        return span_contains(self.basis, f)

    def verify(self) -> bool:
        return all(check_condition(f, c) for f in self.basis for c in self.conditions)


def span_contains(basis: Sequence[Polynomial], f: Polynomial) -> bool:
    if f.is_zero():
        return True
    if not basis:
        return False
    mons = monomial_basis(f.nvars, f.degree())
    vecs = [[g.terms.get(m, 0) for m in mons] for g in basis]
    r0 = rank(vecs, len(mons), f.field)
    return rank(vecs + [[f.terms.get(m, 0) for m in mons]], len(mons), f.field) == r0


def solve_system(num_vars: int, degree: int, conditions: Sequence[LinearCondition],
                 field: Field = QQ) -> LinearSystemBasis:
    """Exact basis of the forms of ``degree`` satisfying every condition.

    An infeasible system is returned as an empty basis.
    """
    conditions = tuple(conditions)
    ncols = math.comb(degree + num_vars - 1, num_vars - 1)
    rows = condition_matrix(conditions, degree, num_vars, field)
    notes = []
    for cond in conditions:
        if isinstance(cond, CurveThroughSamples):
            notes.append(_sample_stability(cond, degree, num_vars, field, rows, ncols))
    kernel = nullspace(rows, ncols, field) if rows else [
        [int(i == j) for j in range(ncols)] for i in range(ncols)]
    mons = monomial_basis(num_vars, degree)
    basis = [Polynomial({m: c for m, c in zip(mons, v) if c}, num_vars, field) for v in kernel]
    result = LinearSystemBasis(degree, num_vars, basis, conditions, field, notes)
    if basis and rank([[f.terms.get(m, 0) for m in mons] for f in basis], ncols, field) != len(basis):
        raise ConditionError("kernel basis is not linearly independent")
    if not result.verify():
        raise ConditionError("post-hoc verification of the linear system failed")
    return result


def _sample_stability(cond, degree, nvars, field, all_rows, ncols) -> str:
    """Check that the last five samples no longer raise the rank."""
    pts = cond.points
    need = 2 * cond.curve_degree * degree + 1 if cond.curve_degree else None
    if need is not None and len(pts) < need:
        raise ConditionError(f"{len(pts)} samples on a degree-{cond.curve_degree} curve; "
                             f"at least {need} are required")
    if len(pts) <= 5:
        return "sample rank stabilization not checked (too few samples)"
    head = CurveThroughSamples(tuple(pts[:-5]))
    r_head = rank(condition_rows(head, degree, nvars, field), ncols, field)
    r_all = rank(condition_rows(cond, degree, nvars, field), ncols, field)
    if r_head != r_all:
        raise ConditionError("sample conditions did not stabilize; supply more points")
    return f"sample rank stabilized at {r_all} over the last 5 points"


# ---------------------------------------------------------------------------
# independent post-hoc checks


def check_condition(f: Polynomial, cond: LinearCondition) -> bool:
    nvars = f.nvars
    fld = f.field
    if f.is_zero():
        return True
    if isinstance(cond, PointMultiplicity):
        pt = [fld(v) for v in cond.point]
        for alpha in _multi_indices(nvars, cond.m):
            if f.diff_multi(alpha).evaluate(pt) != 0:
                return False
        return True
    if isinstance(cond, CurveMultiplicity):
        curve = cond.curve if cond.curve.field == fld else cond.curve.to_field(fld)
        for alpha in _multi_indices(nvars, cond.m):
            g = f.diff_multi(alpha)
            if not g.is_zero() and not g.compose(list(curve.components)).is_zero():
                return False
        return True
    if isinstance(cond, CurveThroughSamples):
        return all(f.evaluate(pt) == 0 for pt in cond.points)
    if isinstance(cond, ValuationOrder):
        return weighted_order(f, cond.center, cond.weights) >= cond.m
    if isinstance(cond, ContainsSurface):
        s = cond.surface if cond.surface.field == fld else cond.surface.to_field(fld)
        return divides(s, f)
    if isinstance(cond, IdealMembership):
        return ideal_membership_certificate(f, cond.generators, cond.power) is not None
    raise ConditionError(f"unknown condition {cond!r}")


def weighted_order(f: Polynomial, center: Sequence, weights: Sequence[int]) -> int:
    """Weighted order of f at a coordinate point, in the chart where it is the origin."""
    c = next(i for i, v in enumerate(center) if v)
    others = [i for i in range(f.nvars) if i != c]
    if f.is_zero():
        return math.inf
    return min(sum(w * e[i] for w, i in zip(weights, others)) for e in f.terms)


def ideal_membership_certificate(f: Polynomial, gens: Sequence[Polynomial], power: int = 1):
    """Cofactors proving f in (gens)^power, verified by multiplication; None if absent."""
    fld = f.field
    gens = [g if g.field == fld else g.to_field(fld) for g in gens]
    d = f.degree()
    prods = [g for g in _power_products(gens, power) if g.degree() <= d]
    spanning = []
    for g in prods:
        for mono in monomials_of_degree(f.nvars, d - g.degree()):
            spanning.append((g, mono))
    if not spanning:
        return None
    mons = monomial_basis(f.nvars, d)
    cols = [(g * Polynomial.monomial(mono, 1, fld)) for g, mono in spanning]
    # solve sum c_j cols_j = f via the kernel of [cols | -f]
    rows = [[col.terms.get(m, 0) for col in cols] + [-f.terms.get(m, 0) if not fld.p
                                                      else (-f.terms.get(m, 0)) % fld.p]
            for m in mons]
    ker = nullspace(rows, len(cols) + 1, fld)
    sol = next((v for v in ker if v[-1]), None)
    if sol is None:
        return None
    scale = fld.inv(sol[-1])
    cofactors = {}
    total = Polynomial.zero(f.nvars, fld)
    for (g, mono), c in zip(spanning, sol[:-1]):
        if c:
            c = fld(c * scale)
            term = Polynomial.monomial(mono, c, fld)
            cofactors.setdefault(g, Polynomial.zero(f.nvars, fld))
            cofactors[g] = cofactors[g] + term
            total = total + g * term
    return cofactors if total == f else None


__all__ = [
    "CurveParam", "PointMultiplicity", "CurveMultiplicity", "CurveThroughSamples",
    "ValuationOrder", "ContainsSurface", "IdealMembership", "LinearSystemBasis",
    "ConditionError", "monomial_basis", "condition_rows", "condition_matrix", "solve_system",
    "check_condition", "weighted_order", "span_contains", "ideal_membership_certificate",
]

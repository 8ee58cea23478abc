"""Linearization of rational quartic surfaces by explicit chains of Cremona maps.

Each case builds a linear system, emits the associated map and certifies the
image of the surface. Exact mode keeps every map over Q and checks the final
plane by exact divisibility; certificate mode works over GF(p) where the
required general points need not be rational.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

from .field import DEFAULT_PRIME, GF, Field, FieldError
from .linsys import (ConditionError, CurveMultiplicity, CurveParam, IdealMembership,
                     LinearSystemBasis, PointMultiplicity, solve_system)
from .maps import (BASE_POINT, DegenerateMapError, ImageFitError, Inconclusive,
                   RationalMap, SamplingError, _check_inverse, apply_map, birationality_certificate,
                   exact_image_forms, fit_image_forms, jacobian_rank, normalize_map, normalize_point,
                   proportional, push_points, random_points, sample_surface_points)
from .matrix import inverse
from .poly import Polynomial, divides, exact_div, to_string
from .report import (CERTIFIED, CERTIFIED_BY_THRESHOLD, INCONCLUSIVE, OUT_OF_SCOPE, CaseReport,
                     CaseStep, target_names)
from .surface import (CaseLabel, Classification, ConicHint, SurfaceInput, cone_vertex,
                      find_rational_points, find_singular_points, frame_matrix, is_singular_point,
                      multiplicity_at, classify_case, verify_hints)
from .threshold import CATALOG, corollary_certificate
from .univariate import rational_roots, roots_mod_p

log = logging.getLogger(__name__)


class StepFailed(RuntimeError):
    """A certification step did not pass; the report becomes inconclusive."""


class MonoidError(ValueError):
    pass


@dataclass
class PipelineOptions:
    prime: int = DEFAULT_PRIME
    seed: int = 0
    samples: int = 200
    mode: str = "exact"  # exact | certificate
    trials: int = 200
    search_bound: int = 3
    recursion_budget: int = 4

    def __post_init__(self):
        if self.mode not in ("exact", "certificate"):
            raise ValueError(f"mode must be 'exact' or 'certificate', got {self.mode!r}")
        GF(self.prime)


@dataclass
class Outcome:
    """Steps emitted so far and how the chain ended."""

    steps: list = dc_field(default_factory=list)
    final: dict = dc_field(default_factory=dict)
    status: str = INCONCLUSIVE
    notes: list = dc_field(default_factory=list)


def _mode_name(fld: Field) -> str:
    return "certificate-F_p" if fld.p else "exact-Q"


def _prime_for(S: Polynomial, opts: PipelineOptions) -> int:
    return S.field.p or opts.prime


# ---------------------------------------------------------------------------
# image checks


def image_fit(f: RationalMap, S: Polynomial, opts: PipelineOptions, expected: int,
              salt: int = 0, max_points: int | None = None, held_out: int = 50) -> dict:
    """Fit the image of V(S) at degrees 1..expected over GF(p).

    Passes when no form vanishes below ``expected`` and exactly one form does at
    ``expected`` (hypersurface targets) or at least one does (higher codimension).
    Every degree is fitted on half the samples and checked on the other half,
    so at least ``held_out`` points confirm each verdict.
    """
    p = _prime_for(S, opts)
    nv = f.target_dim + 1
    need = 2 * math.comb(expected + nv - 1, nv - 1)
    count = max(need + 20, 100 if expected == 1 else 0, 2 * held_out + 2)
    if max_points:
        count = min(count, max_points)
    try:
        pts = sample_surface_points(S, p, count + 40, opts.seed + salt).points
        imgs, rejected = push_points(f, pts, p)
    except (SamplingError, FieldError) as exc:
        raise StepFailed(f"image sampling failed: {exc}") from exc
    imgs = list(dict.fromkeys(imgs))
    if len(imgs) < need:
        raise StepFailed(f"only {len(imgs)} distinct image points; {need} needed")
    result = {"target_dim": f.target_dim, "samples": len(imgs), "base_point_rejections": rejected}
    for d in range(1, expected + 1):
        try:
            forms = fit_image_forms(imgs, nv, d, p)
        except ImageFitError as exc:
            raise StepFailed(str(exc)) from exc
        if d < expected and forms:
            raise StepFailed(f"image satisfies a form of degree {d} < {expected}")
        if d == expected:
            if not forms or (nv == 4 and len(forms) != 1):
                raise StepFailed(f"expected one degree-{expected} form on the image, found {len(forms)}")
            result.update({"image_degree": expected, "fitted_forms": forms,
                           "held_out_checks": len(imgs) - len(imgs) // 2,
                           "lower_degrees_empty": True})
    return result


def fresh_plane_check(S: Polynomial, maps: Sequence[RationalMap], plane: Polynomial,
                      opts: PipelineOptions, count: int = 100) -> dict:
    """Push fresh samples of S through the chain and evaluate the plane."""
    p = _prime_for(S, opts)
    fld = GF(p)
    pts = sample_surface_points(S, p, count, opts.seed + 9173).points
    ok, skipped = 0, 0
    plane_p = plane.to_field(fld) if plane.field != fld else plane
    maps_p = [m.to_field(fld) if m.field != fld else m for m in maps]
    for pt in pts:
        cur = pt
        for m in maps_p:
            cur = apply_map(m, cur)
            if cur is BASE_POINT:
                break
        if cur is BASE_POINT:
            skipped += 1
            continue
        if plane_p.evaluate(cur) != 0:
            raise StepFailed("a fresh sample does not map into the final plane")
        ok += 1
    return {"fresh_samples_on_plane": ok, "base_point_skips": skipped, "prime": p}


def exact_chain_check(S: Polynomial, maps: Sequence[RationalMap], plane: Polynomial) -> bool:
    """S divides the plane form pulled back through the whole chain."""
    g = plane
    for m in reversed(maps):
        g = m.pullback(g)
    return divides(S, g)


# ---------------------------------------------------------------------------
# monoids


def monoid_map(S: Polynomial, point: Sequence) -> tuple[RationalMap, RationalMap, list]:
    """Map and closed-form inverse for a point of multiplicity deg(S) - 1.

    After moving the point to e0, S = x0 F + G with F, G free of x0; the map is
    (F x1, ..., F xn, S) and the inverse is (y_n F(y') - G(y'), y0 F(y'), ...).
    """
    fld = S.field
    n = S.nvars
    A = frame_matrix([point], fld)
    Sp = S.linear_substitute(A)
    if Sp.degree_in(0) > 1:
        raise MonoidError(f"point {tuple(point)} does not have multiplicity {S.degree() - 1}")
    F = Polynomial({(0,) + e[1:]: c for e, c in Sp.terms.items() if e[0] == 1}, n, fld)
    G = Polynomial({e: c for e, c in Sp.terms.items() if e[0] == 0}, n, fld)
    if F.is_zero():
        raise MonoidError("the point has multiplicity deg(S): S is a cone over it")
    xs = Polynomial.gens(n, fld)
    Ainv = inverse(A, fld)
    forms = [(F * xs[i]).linear_substitute(Ainv) for i in range(1, n)] + [S]
    ys = xs
    sub = [Polynomial.zero(n, fld)] + ys[: n - 1]
    Fy, Gy = F.compose(sub), G.compose(sub)
    gp = [ys[n - 1] * Fy - Gy] + [ys[i] * Fy for i in range(n - 1)]
    inv = []
    for i in range(n):
        acc = Polynomial.zero(n, fld)
        for j in range(n):
            if A[i][j]:
                acc = acc + gp[j].scale(A[i][j])
        inv.append(acc)
    return (normalize_map(RationalMap(tuple(forms), False, "monoid")),
            RationalMap(tuple(inv), False, "monoid inverse"), A)


def monoid_step(S: Polynomial, point: Sequence, opts: PipelineOptions, names=None,
                salt: int = 0) -> tuple[CaseStep, Polynomial]:
    """One monoid step; returns the step and the plane (in target coordinates)."""
    f, g, A = monoid_map(S, point)
    n = S.nvars
    checks: dict = {"vertex": tuple(point)}
    plane = Polynomial.var(n - 1, n, S.field)
    if not divides(S, f.forms[-1]):
        raise StepFailed("the last form of the monoid map is not a multiple of S")
    checks["exact_plane_pullback"] = f"{target_names(n)[-1]} o map is a multiple of S"
    fit = image_fit(f, S, opts, 1, salt)
    form = fit["fitted_forms"][0]
    if set(form.terms) != {tuple(int(i == n - 1) for i in range(n))}:
        raise StepFailed(f"fitted image hyperplane {form} is not the expected one")
    checks["image"] = fit
    cert = birationality_certificate(f, trials=opts.trials, seed=opts.seed + salt,
                                     prime=_prime_for(S, opts))
    checks["injectivity"] = cert
    if cert.verdict == "inconclusive":
        raise StepFailed("monoid map failed the injectivity certificate")
    closed = {"forms": [to_string(h, target_names(n)) for h in g.forms]}
    if cert.inverse_exact:
        # the fitted inverse is exact; the closed form only has to agree with it
        closed["agrees_with_exact_inverse_at_samples"] = _same_map_at_samples(
            g, cert.inverse, _prime_for(S, opts), opts.seed + salt)
        ok = closed["agrees_with_exact_inverse_at_samples"] > 0
    else:
        closed["exact"] = ok = _check_inverse(f, g)
    checks["closed_form_inverse"] = closed
    if not ok:
        raise StepFailed("closed-form monoid inverse failed its check")
    step = CaseStep("monoid", f, checks, f.degree, names, A, _mode_name(S.field))
    return step, plane


def _same_map_at_samples(g: RationalMap, h: RationalMap, prime: int, seed: int, count: int = 30) -> int:
    """Number of random points where g and h agree projectively; 0 on any disagreement."""
    fld = GF(prime)
    gp, hp = g.to_field(fld), h.to_field(fld)
    agree = 0
    for y in random_points(g.source_dim + 1, count, prime, seed + 577):
        a, b = apply_map(gp, y), apply_map(hp, y)
        if a is BASE_POINT or b is BASE_POINT:
            continue
        if not proportional(a, b, fld):
            return 0
        agree += 1
    return agree


def monoid_chain(S: Polynomial, point, opts: PipelineOptions, names=None, salt=0) -> Outcome:
    step, plane = monoid_step(S, point, opts, names, salt)
    return Outcome([step], {"kind": "plane", "plane_form": plane}, CERTIFIED)


# ---------------------------------------------------------------------------
# low degree


def sampled_smoothness(S: Polynomial, opts: PipelineOptions, count: int | None = None, salt=0) -> dict:
    p = _prime_for(S, opts)
    pts = sample_surface_points(S, p, count or opts.samples, opts.seed + 311 + salt).points
    Sp = S.to_field(GF(p)) if S.field != GF(p) else S
    bad = sum(1 for pt in pts if jacobian_rank([Sp], pt, p) == 0)
    return {"samples": len(pts), "singular_samples": bad,
            "statement": "no singular point found at samples" if not bad else f"{bad} singular samples"}


def _smooth_rational_point(S: Polynomial, opts: PipelineOptions, hints=()) -> tuple | None:
    def smooth(pt):
        return S.evaluate(pt) == 0 and not is_singular_point(S, pt)
    for pt in hints:
        pt = tuple(S.field(v) for v in pt)
        if smooth(pt):
            return pt
    if S.field.p:
        pts = sample_surface_points(S, S.field.p, 20, opts.seed + 53).points
        return next((pt for pt in pts if smooth(pt)), None)
    found = find_rational_points(S, 1, opts.search_bound + 1, avoid=lambda pt: is_singular_point(S, pt))
    return found[0] if found else None


def linearize_low_degree(S: Polynomial, opts: PipelineOptions, names=None,
                         singular_hints=(), point_hints=(), salt=0, allow_fp=True) -> Outcome:
    """Degree 1: already a plane. Degree 2: monoid from a smooth point.
    Degree 3: monoid from a double point, else the threshold certificate for cubics."""
    d = S.degree()
    if d == 1:
        return Outcome([], {"kind": "plane", "plane_form": S}, CERTIFIED, ["the surface is a plane"])
    if cone_vertex(S) is not None:
        return Outcome([], {"kind": "out_of_scope"}, OUT_OF_SCOPE,
                       [f"degree-{d} cone; cones are out of scope"])
    if d == 2:
        pt = _smooth_rational_point(S, opts, point_hints)
        if pt is None:
            if not allow_fp:
                return Outcome([], {}, INCONCLUSIVE, ["no rational point on the quadric found"])
            Sp = S.to_field(GF(opts.prime))
            pt = _smooth_rational_point(Sp, opts)
            out = monoid_chain(Sp, pt, opts, names, salt)
            out.notes.append("no rational point found; monoid step taken over GF(p)")
            return out
        return monoid_chain(S, pt, opts, names, salt)
    if d == 3:
        cands = [tuple(S.field(v) for v in pt) for pt in singular_hints]
        if not S.field.p:
            cands += find_singular_points(S, opts.search_bound)
        for pt in cands:
            if S.evaluate(pt) == 0 and multiplicity_at(S, pt) == 2:
                out = monoid_chain(S, pt, opts, names, salt)
                out.notes.append(f"cubic with double point {pt}")
                return out
        smooth = sampled_smoothness(S, opts, salt=salt)
        cert = corollary_certificate(CATALOG["p3"], [3], "smooth cubic surface (sampled)")
        return Outcome([], {"kind": "rho_certificate", "model": "p3", "class": [3],
                            "certificate": cert, "smoothness": smooth,
                            "statement": "certificate by the threshold criterion 0 < rho < 1"},
                       CERTIFIED_BY_THRESHOLD if cert.certifies_ce_to_plane and not smooth["singular_samples"]
                       else INCONCLUSIVE,
                       ["no double point found among hints and small-height points"])
    raise ValueError(f"degree {d} is not low")


# ---------------------------------------------------------------------------
# general points and generic steps


def general_point(S: Polynomial, opts: PipelineOptions, hints=(), avoid=None, salt=0):
    """A point of S satisfying ``avoid`` = False: hints, then small rational points,
    then (certificate mode) a seeded F_p sample. Returns (point, field)."""
    for pt in hints:
        pt = tuple(S.field(v) for v in pt)
        if S.evaluate(pt) == 0 and not (avoid and avoid(pt)):
            return pt, S.field
    if not S.field.p and opts.mode == "exact":
        found = find_rational_points(S, 1, opts.search_bound + 1, avoid=avoid)
        if found:
            return found[0], S.field
    p = _prime_for(S, opts)
    fld = GF(p)
    Sp = S if S.field == fld else S.to_field(fld)
    pts = sample_surface_points(Sp, p, 10, opts.seed + 71 + salt,
                                avoid=(lambda q: avoid(q)) if avoid else None).points
    return pts[0], fld


def system_map(system: LinearSystemBasis, label: str) -> RationalMap:
    if not system.basis:
        raise StepFailed(f"the linear system for {label} is empty")
    return normalize_map(RationalMap(tuple(system.basis), False, label))


def _to(fld: Field, obj):
    if isinstance(obj, Polynomial):
        return obj if obj.field == fld else obj.to_field(fld)
    if isinstance(obj, CurveParam):
        return obj if obj.field == fld else obj.to_field(fld)
    if isinstance(obj, ConicHint):
        return ConicHint(_to(fld, obj.plane), _to(fld, obj.quadric))
    return tuple(fld(v) for v in obj)


def _continue_low(S: Polynomial, f: RationalMap, image: Polynomial, opts, prev_steps, singular_images,
                  salt) -> Outcome:
    """Hand the image surface to the low-degree step and glue the chains together."""
    rest = linearize_low_degree(image, opts, None, singular_images, (), salt)
    out = Outcome(prev_steps + rest.steps, rest.final, rest.status, rest.notes)
    return out


def _finish(S: Polynomial, out: Outcome, opts: PipelineOptions) -> Outcome:
    """Attach chain-level certificates to a plane ending."""
    if out.status != CERTIFIED or out.final.get("kind") != "plane":
        return out
    maps = [s.map for s in out.steps if s.map is not None]
    plane = out.final["plane_form"]
    fields = {m.field for m in maps} | {plane.field}
    if maps and fields == {S.field}:
        out.final["exact_chain_check"] = exact_chain_check(S, maps, plane)
        if not out.final["exact_chain_check"]:
            out.status = INCONCLUSIVE
            out.notes.append("exact pullback of the final plane is not a multiple of S")
            return out
    try:
        out.final["fresh_sample_check"] = fresh_plane_check(S, maps, plane, opts)
    except StepFailed as exc:
        out.status = INCONCLUSIVE
        out.notes.append(str(exc))
    return out


def _singular_images(f: RationalMap, points) -> list:
    out = []
    for pt in points:
        try:
            img = apply_map(f, tuple(f.field(v) for v in pt))
        except (FieldError, ZeroDivisionError):
            continue
        if img is not BASE_POINT:
            out.append(normalize_point(img, f.field))
    return out


# ---------------------------------------------------------------------------
# double conic


def linearize_double_conic(inp: SurfaceInput, conic, opts: PipelineOptions) -> Outcome:
    S = inp.equation
    gp, fld = general_point(S, opts, inp.general_points, _off_curve_predicate(conic, S.field))
    S_f = _to(fld, S)
    conic_f = _to(fld, conic)
    cond = (IdealMembership((conic_f.plane, conic_f.quadric), 1) if isinstance(conic_f, ConicHint)
            else CurveMultiplicity(conic_f, 1))
    system = solve_system(4, 2, [cond, PointMultiplicity(gp, 1)], fld)
    checks: dict = {"general_point": gp, "projective_dim": system.projective_dim}
    if len(system.basis) != 4:
        raise StepFailed(f"quadrics through the conic and a point: expected 4, got {len(system.basis)}")
    f = system_map(system, "quadrics through conic and point")
    cert = birationality_certificate(f, trials=opts.trials, seed=opts.seed, prime=opts.prime)
    checks["injectivity"] = cert
    if cert.verdict == "inconclusive":
        raise StepFailed("quadric map failed the injectivity certificate")
    checks["image"] = image_fit(f, S_f, opts, 3, salt=1)
    if fld.p:
        cubic = checks["image"]["fitted_forms"][0]
    else:
        forms = exact_image_forms(f, S, 3, opts.seed)
        if not forms:
            raise StepFailed("no exact cubic through the image of S")
        cubic = forms[0]
        checks["exact_image"] = {"form": cubic, "certified_by": "S divides the pullback"}
    step = CaseStep("quadrics through the double conic", f, checks, 2, list(inp.variables),
                    field_mode=_mode_name(fld))
    on_conic = _off_curve_predicate(conic, S.field)
    sources = list(inp.singular_points)
    if not fld.p:
        sources += find_singular_points(S, opts.search_bound, avoid=on_conic)
    sing = _singular_images(f, sources)
    out = _continue_low(S_f, f, cubic, opts, [step], sing, salt=2)
    return _finish(S_f, out, opts)


def _off_curve_predicate(curve, fld: Field):
    """Predicate: the point lies on a conic hint or a parametrized curve."""
    if isinstance(curve, ConicHint):
        plane, quad = _to(fld, curve.plane), _to(fld, curve.quadric)
        return lambda pt: plane.evaluate(pt) == 0 and quad.evaluate(pt) == 0
    ideal = [_to(fld, g) for g in _curve_ideal_forms(curve)]
    return lambda pt: all(g.evaluate(pt) == 0 for g in ideal)


def _curve_ideal_forms(curve: CurveParam) -> list[Polynomial]:
    """Quadrics (and planes) through a parametrized curve: they cut it out for e <= 3."""
    out = []
    for d in (1, 2):
        out += solve_system(4, d, [CurveMultiplicity(curve, 1)], curve.field).basis
    return out


# ---------------------------------------------------------------------------
# twisted cubic


@dataclass
class SecantSearch:
    lines: list
    parameters: list
    secant_polynomial: Polynomial | None = None
    diagonal_multiplicity: int = 0
    fp_witnesses: list = dc_field(default_factory=list)

    def to_json(self) -> dict:
        return {"lines_found": len(self.lines), "parameters": self.parameters,
                "secant_polynomial": self.secant_polynomial,
                "diagonal_multiplicity": self.diagonal_multiplicity,
                "fp_witnesses": self.fp_witnesses[:10]}


def _params_by_height(bound: int) -> list[Fraction]:
    seen, out = set(), []
    for h in range(bound + 1):
        for num in range(-h, h + 1):
            for den in range(1, h + 1):
                if max(abs(num), den) != h and h:
                    continue
                q = Fraction(num, den)
                if q not in seen:
                    seen.add(q)
                    out.append(q)
    if Fraction(0) not in seen:
        out.insert(0, Fraction(0))
    return out


def secant_polynomial(S: Polynomial, gamma: CurveParam) -> tuple[Polynomial, int]:
    """c(t, u): the s1^2 s2^2 coefficient of S(s1 G(1,t) + s2 G(1,u)), and the
    multiplicity of the diagonal t = u in it. Returns (c / (t-u)^k, k)."""
    fld = S.field
    s1, s2, t, u = Polynomial.gens(4, fld)
    one = Polynomial.constant(1, 4, fld)
    comps = gamma.components if gamma.field == fld else gamma.to_field(fld).components
    subs = []
    for c in comps:
        ct = c.compose([one, t])
        cu = c.compose([one, u])
        subs.append(s1 * ct + s2 * cu)
    full = S.compose(subs)
    coeff: dict = {}
    for e, v in full.terms.items():
        if (e[0], e[1]) in ((4, 0), (3, 1), (1, 3), (0, 4)):
            raise ValueError("S is not double along the curve")
        if e[0] == 2 and e[1] == 2:
            coeff[(e[2], e[3])] = v
    c = Polynomial(coeff, 2, fld)
    if c.is_zero():
        return c, -1
    tt, uu = Polynomial.gens(2, fld)
    diag = tt - uu
    k = 0
    while divides(diag, c):
        c = exact_div(c, diag)
        k += 1
    return c, k


def find_secants_on_S(S: Polynomial, gamma: CurveParam, want: int = 3, height: int = 3,
                      prime: int = DEFAULT_PRIME, scan: int = 200) -> SecantSearch:
    """Lines through two points (or tangent lines) of the curve lying on S.

    Rational candidates come lowest height first: tangent lines at small
    parameters, then secants with t of small height and u a rational root of
    the secant polynomial. Every candidate is verified by exact substitution.
    Without enough rational lines, an F_p scan records witnesses.
    """
    from .surface import curve_on_surface
    fld = S.field
    c, k = secant_polynomial(S, gamma)
    res = SecantSearch([], [], c if k >= 0 else None, k)
    params = _params_by_height(height)
    cands = []
    homog = [(1, q) for q in params] + [(0, 1)]
    for s, t in homog:
        try:
            line = gamma.tangent_line(fld(s), fld(t))
        except ConditionError:
            continue
        h = max(abs(Fraction(t).numerator), Fraction(t).denominator) if s else 1
        cands.append((h, ("tangent", (s, t)), line))
    if k >= 0 and not c.is_zero():
        for t in params:
            uni = c.compose([Polynomial.constant(t, 1, fld), Polynomial.var(0, 1, fld)])
            coeffs = [0] * (uni.degree() + 1) if not uni.is_zero() else []
            for (e,), v in uni.terms.items():
                coeffs[e] = v
            if not coeffs or fld.p:
                continue
            for uval in rational_roots(coeffs):
                if uval == t:
                    continue
                a = gamma.point(1, t)
                b = gamma.point(1, uval)
                line = CurveParam.line(a, b, fld)
                h = max(_height(t), _height(uval))
                cands.append((h, ("secant", (t, uval)), line))
    cands.sort(key=lambda item: item[0])
    seen = set()
    for h, tag, line in cands:
        key = _line_key(line)
        if key in seen:
            continue
        if curve_on_surface(S, line):
            seen.add(key)
            res.lines.append(line)
            res.parameters.append(tag)
    if len(res.lines) < want and k >= 0 and not c.is_zero():
        fp = GF(prime)
        cp = c.to_field(fp) if c.field != fp else c
        for tv in range(min(scan, prime)):
            uni = cp.compose([Polynomial.constant(tv, 1, fp), Polynomial.var(0, 1, fp)])
            if uni.is_zero():
                continue
            coeffs = [0] * (uni.degree() + 1)
            for (e,), v in uni.terms.items():
                coeffs[e] = v
            if len(coeffs) < 2:
                continue
            for uv in roots_mod_p(coeffs, prime):
                if uv != tv:
                    res.fp_witnesses.append((tv, uv))
    return res


def _height(q) -> int:
    q = Fraction(q)
    return max(abs(q.numerator), q.denominator)


def _line_key(line: CurveParam):
    """Canonical key of the line: RREF of its two spanning points."""
    from .matrix import rref
    pts = [line.point(1, 0), line.point(0, 1)]
    red, _ = rref(pts, len(pts[0]), line.field)
    return tuple(tuple(r) for r in red)


def linearize_twisted_cubic(inp: SurfaceInput, gamma: CurveParam, opts: PipelineOptions) -> Outcome:
    S = inp.equation
    fld = S.field
    notes = []
    search = None
    lines = list(inp.secants)
    if len(lines) < 3:
        search = find_secants_on_S(S, gamma, 3, prime=opts.prime)
        for line in search.lines:
            if all(_line_key(line) != _line_key(m) for m in lines):
                lines.append(line)
    if len(lines) < 3:
        msg = "fewer than 3 lines of the secant family found on S; supply secants hints"
        if search is not None and search.fp_witnesses:
            msg += f" ({len(search.fp_witnesses)} witnesses over GF({opts.prime}))"
        return Outcome([], {}, INCONCLUSIVE, [msg])
    system = None
    chosen = None
    import itertools
    for trio in itertools.combinations(lines[:8], 3):
        conds = [CurveMultiplicity(gamma, 1)] + [CurveMultiplicity(l, 1) for l in trio]
        sysm = solve_system(4, 3, conds, fld)
        if len(sysm.basis) == 4:
            system, chosen = sysm, trio
            break
    if system is None:
        return Outcome([], {}, INCONCLUSIVE, ["no triple of lines gives a system of projective dimension 3"])
    f = system_map(system, "cubics through the twisted cubic and three lines")
    checks: dict = {"projective_dim": system.projective_dim,
                    "lines": [[to_string(c, ["s", "t"]) for c in l.components] for l in chosen]}
    if search is not None:
        checks["secant_search"] = search
    cert = birationality_certificate(f, trials=max(opts.trials, 500), seed=opts.seed, prime=opts.prime)
    checks["injectivity"] = cert
    if cert.verdict == "inconclusive":
        raise StepFailed("cubic map failed the injectivity certificate")
    checks["image"] = image_fit(f, S, opts, 2, salt=1, max_points=None)
    if fld.p:
        quadric = checks["image"]["fitted_forms"][0]
    else:
        forms = exact_image_forms(f, S, 2, opts.seed)
        if not forms:
            raise StepFailed("no exact quadric through the image of S")
        quadric = forms[0]
        checks["exact_image"] = {"form": quadric, "certified_by": "S divides the pullback"}
    step = CaseStep("cubics through the double twisted cubic and three lines", f, checks, 3,
                    list(inp.variables), field_mode=_mode_name(fld))
    # rational points of the quadric: images of small points of S, then a direct search
    hints = []
    if not fld.p:
        for pt in find_rational_points(S, 6, 3):
            img = apply_map(f, pt)
            if img is not BASE_POINT:
                hints.append(img)
    rest = linearize_low_degree(quadric, opts, None, (), hints, salt=2)
    out = Outcome([step] + rest.steps, rest.final, rest.status, notes + rest.notes)
    return _finish(S, out, opts)


# ---------------------------------------------------------------------------
# dispatch


def run_pipeline(inp: SurfaceInput, opts: PipelineOptions | None = None) -> CaseReport:
    opts = opts or PipelineOptions()
    verify_hints(inp)
    cls = classify_case(inp, min(opts.search_bound, 2))
    names = list(inp.variables)
    report = CaseReport(cls.label.value, INCONCLUSIVE, evidence=list(cls.evidence), seed=opts.seed,
                        prime=opts.prime, variables=tuple(names))
    try:
        out = _dispatch(inp, cls, opts)
    except (StepFailed, Inconclusive, SamplingError, DegenerateMapError, MonoidError) as exc:
        out = Outcome([], {}, INCONCLUSIVE, [f"{type(exc).__name__}: {exc}"])
    for step in out.steps:
        if step.source_names is None and step.map is not None and step.map.source_dim == 3 \
                and step is out.steps[0]:
            step.source_names = names
    report.steps = out.steps
    report.final = out.final
    report.status = out.status
    report.notes += out.notes
    modes = {s.field_mode for s in out.steps}
    report.field_mode = "certificate-F_p" if "certificate-F_p" in modes else "exact-Q"
    return report


def _dispatch(inp: SurfaceInput, cls: Classification, opts: PipelineOptions) -> Outcome:
    S = inp.equation
    label = cls.label
    if label == CaseLabel.CONE:
        return Outcome([], {"kind": "out_of_scope"}, OUT_OF_SCOPE,
                       ["cones are out of scope: their general plane section is a rational curve, "
                        "handled by separate results on cones"])
    if label == CaseLabel.LOW_DEGREE:
        out = linearize_low_degree(S, opts, list(inp.variables), inp.singular_points,
                                   inp.general_points)
        return _finish(S, out, opts) if not out.steps or out.steps[0].map.field == S.field else out
    if label == CaseLabel.MONOID:
        pt = cls.point or next(iter(inp.singular_points), None)
        if pt is None:
            raise StepFailed("monoid case without a point of multiplicity d-1")
        return _finish(S, monoid_chain(S, pt, opts, list(inp.variables)), opts)
    if label == CaseLabel.DOUBLE_CONIC:
        conic = cls.curve or next((c for c in inp.singular_curves
                                   if isinstance(c, ConicHint) or c.degree == 2), None)
        if conic is None:
            raise StepFailed("double conic case needs a conic hint")
        return linearize_double_conic(inp, conic, opts)
    if label == CaseLabel.TWISTED_CUBIC:
        gamma = cls.curve or next((c for c in inp.singular_curves
                                   if isinstance(c, CurveParam) and c.degree == 3), None)
        if gamma is None:
            raise StepFailed("twisted cubic case needs the curve as a hint")
        return linearize_twisted_cubic(inp, gamma, opts)
    if label == CaseLabel.DOUBLE_LINE:
        from .elliptic import linearize_double_line
        line = cls.curve or next((c for c in inp.singular_curves
                                  if isinstance(c, CurveParam) and c.degree == 1), None)
        if line is None:
            raise StepFailed("double line case needs the line as a hint")
        return linearize_double_line(S, line, opts, inp.general_points, list(inp.variables))
    if label in (CaseLabel.ELLIPTIC_TYPE1, CaseLabel.ELLIPTIC_TYPE2):
        from .elliptic import linearize_elliptic
        return linearize_elliptic(inp, 1 if label == CaseLabel.ELLIPTIC_TYPE1 else 2, opts)
    if label in (CaseLabel.CYCLIDE_EXTRA_NODE, CaseLabel.CYCLIDE_SMOOTH):
        from .cyclide import linearize_cyclide
        return linearize_cyclide(inp, cls, opts)
    raise StepFailed(f"no construction for case {label.value}")

"""Rational maps between projective spaces and finite-field certificates.

Images are implicitized by interpolation: push sampled points through a map,
find the forms of a given degree vanishing on half of them, and confirm those
forms on the other half. Exact statements over Q are recovered from several
word-size primes by CRT and rational reconstruction, then checked by exact
polynomial identities.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Sequence

from .field import DEFAULT_PRIME, GF, QQ, Field, FieldError, rational_reconstruction
from .matrix import nullspace, rank
from .poly import (Polynomial, compose_all, divides, exact_div, gcd,
                   monomials_of_degree)
from .univariate import roots_mod_p, roots_with_multiplicity

log = logging.getLogger(__name__)

# word-size primes for multimodular lifting (numpy elimination path)
LIFT_PRIMES = (2147483647, 2147483629, 2147483587, 2147483579, 2147483563)


class MapError(ValueError):
    pass


class SamplingError(RuntimeError):
    pass


class ImageFitError(RuntimeError):
    pass


class DegenerateMapError(RuntimeError):
    pass


class Inconclusive(RuntimeError):
    pass


class _BasePoint:
    """Returned by :func:`apply_map` when every form vanishes."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BASE_POINT"

    def __bool__(self):
        return False


BASE_POINT = _BasePoint()


@dataclass(frozen=True)
class RationalMap:
    forms: tuple
    normalized: bool = False
    label: str = ""

    def __post_init__(self):
        forms = tuple(self.forms)
        object.__setattr__(self, "forms", forms)
        if not forms:
            raise MapError("a map needs at least one form")
        if all(f.is_zero() for f in forms):
            raise MapError("all forms vanish")
        nv, fld = forms[0].nvars, forms[0].field
        degs = {f.degree() for f in forms if not f.is_zero()}
        if len(degs) != 1:
            raise MapError(f"forms have different degrees {sorted(degs)}")
        for f in forms:
            if f.nvars != nv or f.field != fld:
                raise MapError("forms live in different rings")
            if not f.is_homogeneous():
                raise MapError(f"form {f} is not homogeneous")

    @property
    def source_dim(self) -> int:
        return self.forms[0].nvars - 1

    @property
    def target_dim(self) -> int:
        return len(self.forms) - 1

    @property
    def degree(self) -> int:
        return max(f.degree() for f in self.forms)

    @property
    def field(self) -> Field:
        return self.forms[0].field

    def __call__(self, point):
        return apply_map(self, point)

    def to_field(self, fld: Field) -> "RationalMap":
        return RationalMap(tuple(f.to_field(fld) for f in self.forms), self.normalized, self.label)

    def after(self, inner: "RationalMap") -> "RationalMap":
        """The composite ``self o inner`` (not normalized)."""
        if inner.target_dim != self.source_dim:
            raise MapError("dimension mismatch in composition")
        return RationalMap(tuple(compose_all(self.forms, inner.forms)), False,
                           f"{self.label} o {inner.label}".strip(" o"))

    def pullback(self, g: Polynomial) -> Polynomial:
        return g.compose(list(self.forms))


def normalize_map(f: RationalMap) -> RationalMap:
    """Divide the forms by their gcd (remove the fixed component)."""
    g = gcd([h for h in f.forms if not h.is_zero()])
    if g.is_constant():
        return RationalMap(f.forms, True, f.label)
    forms = tuple(exact_div(h, g) if not h.is_zero() else h for h in f.forms)
    return RationalMap(forms, True, f.label)


def is_normalized(f: RationalMap) -> bool:
    return gcd([h for h in f.forms if not h.is_zero()]).is_constant()


def apply_map(f: RationalMap, point: Sequence):
    vals = tuple(h.evaluate(point) for h in f.forms)
    if all(v == 0 for v in vals):
        return BASE_POINT
    return vals


def normalize_point(pt: Sequence, fld: Field) -> tuple:
    """Projective representative whose first nonzero coordinate is 1."""
    lead = next((v for v in pt if v), None)
    if lead is None:
        raise MapError("the zero vector is not a projective point")
    inv = fld.inv(lead)
    if fld.p:
        return tuple(v * inv % fld.p for v in pt)
    return tuple(fld(v * inv) for v in pt)


def proportional(a: Sequence, b: Sequence, fld: Field) -> bool:
    return normalize_point(a, fld) == normalize_point(b, fld)


# ---------------------------------------------------------------------------
# linear maps


def linear_map(matrix: Sequence[Sequence], fld: Field = QQ, label: str = "linear") -> RationalMap:
    """x -> M x as a map P^(cols-1) -> P^(rows-1)."""
    ncols = len(matrix[0])
    gens = Polynomial.gens(ncols, fld)
    forms = []
    for row in matrix:
        acc = Polynomial.zero(ncols, fld)
        for a, g in zip(row, gens):
            if a:
                acc = acc + g.scale(a)
        forms.append(acc)
    return RationalMap(tuple(forms), True, label)


def projection_matrix(center: Sequence, fld: Field) -> list[list]:
    """Rows span the linear forms vanishing at ``center``."""
    center = [fld(c) for c in center]
    if not any(center):
        raise MapError("projection center is the zero vector")
    return nullspace([center], len(center), fld)


def compose_projection(f: RationalMap, center: Sequence) -> RationalMap:
    """Project the image of f away from a point of its target."""
    if len(center) != f.target_dim + 1:
        raise MapError(f"center has {len(center)} coordinates; target is P^{f.target_dim}")
    proj = linear_map(projection_matrix(center, f.field), f.field, "projection")
    return normalize_map(RationalMap(proj.after(f).forms, False, f"proj o {f.label}"))


def coordinate_change_to(point: Sequence, fld: Field = QQ) -> list[list]:
    """Invertible matrix A with A e0 = point (A's columns: point, then unit vectors)."""
    n = len(point)
    point = [fld(v) for v in point]
    k = next((i for i, v in enumerate(point) if v), None)
    if k is None:
        raise MapError("zero vector")
    units = [i for i in range(n) if i != k]
    cols = [point] + [[int(i == j) for i in range(n)] for j in units]
    return [[cols[c][r] for c in range(n)] for r in range(n)]


def apply_matrix(matrix: Sequence[Sequence], pt: Sequence, fld: Field) -> tuple:
    p = fld.p
    out = []
    for row in matrix:
        s = sum(a * b for a, b in zip(row, pt))
        out.append(s % p if p else fld(s))
    return tuple(out)


# ---------------------------------------------------------------------------
# sampling


@dataclass
class SampledSurface:
    equation: Polynomial
    points: list
    prime: int
    seed: int
    extra_forms: list = dc_field(default_factory=list)

    def verify(self) -> bool:
        fld = GF(self.prime)
        eqs = [self.equation] + list(self.extra_forms)
        eqs = [e if e.field == fld else e.to_field(fld) for e in eqs]
        return all(e.evaluate(pt) == 0 for e in eqs for pt in self.points)


def random_points(nvars: int, count: int, prime: int, seed: int,
                  avoid: Callable[[tuple], bool] | None = None) -> list[tuple]:
    """Distinct random points of P^(nvars-1) over GF(prime)."""
    fld = GF(prime)
    rng = random.Random(seed)
    out, seen = [], set()
    budget = 100 * count + 100
    while len(out) < count and budget:
        budget -= 1
        pt = tuple(rng.randrange(prime) for _ in range(nvars))
        if not any(pt):
            continue
        pt = normalize_point(pt, fld)
        if pt in seen or (avoid is not None and avoid(pt)):
            continue
        seen.add(pt)
        out.append(pt)
    if len(out) < count:
        raise SamplingError(f"only {len(out)} of {count} points found; try a larger prime")
    return out


def sample_surface_points(S: Polynomial, prime: int = DEFAULT_PRIME, count: int = 100,
                          seed: int = 0, avoid: Callable[[tuple], bool] | None = None,
                          one_per_line: bool = False) -> SampledSurface:
    """Points of V(S) over GF(prime): fix all coordinates but one, solve for the last.

    ``one_per_line`` keeps a single root per sampled line, so that no two
    points share a coordinate line (collinear samples can fake relations).
    """
    fld = GF(prime)
    try:
        Sp = S if S.field == fld else S.to_field(fld)
    except FieldError as exc:
        raise SamplingError(f"cannot reduce the equation mod {prime}: {exc}") from exc
    if Sp.is_zero():
        raise SamplingError(f"equation vanishes identically mod {prime}")
    n = S.nvars
    rng = random.Random(seed)
    live = sorted(Sp.variables()) or list(range(n))
    out, seen = [], set()
    budget = 100 * count
    while len(out) < count and budget:
        budget -= 1
        v = rng.choice(live)
        fixed = [rng.randrange(prime) for _ in range(n)]
        # univariate in x_v: coefficients from the terms of Sp
        coeffs = [0] * (Sp.degree_in(v) + 1)
        for e, c in Sp.terms.items():
            val = c
            for i, k in enumerate(e):
                if i != v and k:
                    val = val * pow(fixed[i], k, prime) % prime
            coeffs[e[v]] = (coeffs[e[v]] + val) % prime
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            continue  # the whole line lies on S; skip it
        roots = roots_mod_p(coeffs, prime, seed=rng.randrange(1 << 30))
        if one_per_line and roots:
            roots = [rng.choice(roots)]
        for r in roots:
            pt = list(fixed)
            pt[v] = r
            if not any(pt):
                continue
            pt = normalize_point(pt, fld)
            if pt in seen or (avoid is not None and avoid(pt)):
                continue
            seen.add(pt)
            out.append(pt)
            if len(out) == count:
                break
    if len(out) < count:
        raise SamplingError(f"found {len(out)} of {count} points within the retry budget; "
                            "try a larger prime")
    return SampledSurface(S, out, prime, seed)


def push_points(f: RationalMap, points: Sequence, prime: int) -> tuple[list, int]:
    """Images of the points that are not base points, and the number rejected."""
    fld = GF(prime)
    fp = f if f.field == fld else f.to_field(fld)
    out, rejected = [], 0
    for pt in points:
        img = apply_map(fp, pt)
        if img is BASE_POINT:
            rejected += 1
            continue
        out.append(normalize_point(img, fld))
    return out, rejected


# ---------------------------------------------------------------------------
# implicitization by interpolation


def evaluation_rows(points: Sequence, nvars: int, degree: int, prime: int | None) -> list[list]:
    mons = monomials_of_degree(nvars, degree)
    rows = []
    for pt in points:
        powers = [[1] * (degree + 1) for _ in range(nvars)]
        for i in range(nvars):
            for k in range(1, degree + 1):
                v = powers[i][k - 1] * pt[i]
                powers[i][k] = v % prime if prime else v
        row = []
        for e in mons:
            v = 1
            for i, k in enumerate(e):
                if k:
                    v = v * powers[i][k]
                    if prime:
                        v %= prime
            row.append(v)
        rows.append(row)
    return rows


@dataclass
class ImageCertificate:
    target_degree: int
    fitted_forms: list
    sample_count: int
    residual_checks: int
    lower_degrees_empty: bool = True

    def to_json(self, names=None) -> dict:
        from .poly import to_string
        return {
            "target_degree": self.target_degree,
            "fitted_forms": [to_string(f, names) for f in self.fitted_forms],
            "sample_count": self.sample_count,
            "residual_checks": self.residual_checks,
        }


def fit_image_forms(points: Sequence, ambient_vars: int, degree: int, prime: int | None = None,
                    field: Field | None = None) -> list[Polynomial]:
    """Forms of ``degree`` vanishing on the points, confirmed on held-out points.

    Half of the points (at least the monomial count) fit; the rest verify.
    """
    if field is None:
        field = GF(prime) if prime else QQ
    p = field.p
    nmon = math.comb(degree + ambient_vars - 1, ambient_vars - 1)
    if len(points) < 2 * nmon:
        raise ImageFitError(f"need at least {2 * nmon} points to fit degree {degree} "
                            f"in {ambient_vars} variables, got {len(points)}")
    half = len(points) // 2
    fit, held = points[:half], points[half:]
    kernel = nullspace(evaluation_rows(fit, ambient_vars, degree, p), nmon, field)
    mons = monomials_of_degree(ambient_vars, degree)
    forms = [Polynomial({m: c for m, c in zip(mons, v) if c}, ambient_vars, field) for v in kernel]
    for f in forms:
        for pt in held:
            if f.evaluate(pt) != 0:
                raise ImageFitError(f"fitted degree-{degree} form fails on a held-out point; "
                                    "sampling bug or too few points")
    return forms


def image_certificate(points: Sequence, ambient_vars: int, degree: int, prime: int) -> ImageCertificate:
    """Fit at ``degree`` and record that no lower degree vanishes on the points."""
    lower_empty = True
    for d in range(1, degree):
        need = 2 * math.comb(d + ambient_vars - 1, ambient_vars - 1)
        if len(points) >= need and fit_image_forms(points[:need], ambient_vars, d, prime):
            lower_empty = False
    forms = fit_image_forms(points, ambient_vars, degree, prime)
    return ImageCertificate(degree, forms, len(points), len(points) - len(points) // 2, lower_empty)


def fit_minimal_degree(points: Sequence, ambient_vars: int, prime: int, max_degree: int = 8):
    """Lowest degree at which a form vanishes on the points, with its forms."""
    for d in range(1, max_degree + 1):
        need = 2 * math.comb(d + ambient_vars - 1, ambient_vars - 1)
        if len(points) < need:
            raise Inconclusive(f"{len(points)} points cannot certify degree {d} ({need} needed)")
        forms = fit_image_forms(points[:need], ambient_vars, d, prime)
        if forms:
            return d, forms
    raise Inconclusive(f"no vanishing form up to degree {max_degree}")


def lift_kernel_vector(solver: Callable[[int], list], primes: Sequence[int] = LIFT_PRIMES,
                       min_primes: int = 2) -> list | None:
    """CRT + rational reconstruction of a kernel vector computed modulo several primes.

    ``solver(p)`` returns a normalized vector mod p (or None). Vectors whose
    support disagrees with the majority are dropped as unlucky.
    """
    modulus, acc, support = 1, None, None
    used = 0
    for p in primes:
        vec = solver(p)
        if vec is None:
            continue
        sup = tuple(i for i, v in enumerate(vec) if v)
        if support is None:
            support, acc = sup, [0] * len(vec)
        elif sup != support:
            continue
        for i in support:
            t = (vec[i] - acc[i]) * pow(modulus, -1, p) % p
            acc[i] += modulus * t
        modulus *= p
        used += 1
        if used >= min_primes:
            out = [0] * len(acc)
            ok = True
            for i in support:
                q = rational_reconstruction(acc[i], modulus)
                if q is None:
                    ok = False
                    break
                out[i] = QQ(q)
            if ok:
                return out
    return None


def exact_image_forms(f: RationalMap, S: Polynomial, degree: int, seed: int = 0,
                      expected: int | None = None) -> list[Polynomial]:
    """Forms over Q of ``degree`` vanishing on f(V(S)), certified by exact divisibility.

    Each candidate g satisfies: S divides g o f. Only a one-dimensional space of
    such forms is lifted; returns [] if none exists.
    """
    nv = f.target_dim + 1
    nmon = math.comb(degree + nv - 1, nv - 1)
    mons = monomials_of_degree(nv, degree)

    def solve(p):
        samples = sample_surface_points(S, p, 2 * nmon + 10, seed).points
        imgs, _ = push_points(f, samples, p)
        kernel = nullspace(evaluation_rows(imgs, nv, degree, p), nmon, GF(p))
        if len(kernel) != 1:
            return None
        return kernel[0]

    vec = lift_kernel_vector(solve)
    if vec is None:
        return []
    g = Polynomial({m: c for m, c in zip(mons, vec) if c}, nv, QQ)
    if not divides(S.to_field(QQ), f.pullback(g)):
        return []
    return [g.content_integer()]


# ---------------------------------------------------------------------------
# birationality


@dataclass
class BirationalityCertificate:
    verdict: str  # certified_birational | certified_generically_injective | inconclusive
    trials: int
    base_rejections: int
    jacobian_rank: int
    expected_rank: int
    collisions: int
    inverse: RationalMap | None = None
    inverse_exact: bool = False
    inverse_degree: int | None = None
    notes: list = dc_field(default_factory=list)

    def to_json(self, names=None) -> dict:
        from .poly import to_string
        out = {
            "verdict": self.verdict,
            "trials": self.trials,
            "base_point_rejections": self.base_rejections,
            "jacobian_rank": self.jacobian_rank,
            "expected_rank": self.expected_rank,
            "collisions": self.collisions,
            "inverse_exact": self.inverse_exact,
        }
        if self.inverse is not None:
            out["inverse_degree"] = self.inverse_degree
            out["inverse_forms"] = [to_string(g, names) for g in self.inverse.forms]
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def jacobian_rank(forms: Sequence[Polynomial], point: Sequence, prime: int,
                  tangent: Sequence[Sequence] | None = None) -> int:
    """Rank of the Jacobian at a point (optionally restricted to tangent vectors)."""
    fld = GF(prime)
    forms = [f if f.field == fld else f.to_field(fld) for f in forms]
    n = forms[0].nvars
    jac = [[f.diff(i).evaluate(point) for i in range(n)] for f in forms]
    if tangent is not None:
        jac = [[sum(r[i] * t[i] for i in range(n)) % prime for t in tangent] for r in jac]
        return rank(jac, len(tangent), fld)
    return rank(jac, n, fld)


def tangent_basis(S: Polynomial, point: Sequence, prime: int) -> list[list]:
    """Basis of the tangent space of the affine cone over V(S) at a point."""
    fld = GF(prime)
    Sp = S if S.field == fld else S.to_field(fld)
    grad = [Sp.diff(i).evaluate(point) for i in range(S.nvars)]
    return nullspace([grad], S.nvars, fld)


def birationality_certificate(f: RationalMap, domain: SampledSurface | None = None,
                              trials: int = 200, seed: int = 0, prime: int = DEFAULT_PRIME,
                              fit_inverse: bool = True, max_inverse_unknowns: int = 1400,
                              max_ratio_unknowns: int = 500
                              ) -> BirationalityCertificate:
    """Probabilistic certificate of generic injectivity (and, on P^n, an inverse).

    1. Jacobian rank at random points equals the domain dimension + 1, so
       fibers are finite.
    2. ``trials`` random pairs of distinct points have distinct images.
    3. For P^n -> P^n, forms g with g(f(x)) proportional to x are fitted by
       interpolation in increasing degree; over Q the lifted inverse is
       checked by the exact identities g_i(f) x_j = g_j(f) x_i.

    Pair sampling alone cannot see a map of degree k > 1 (two random points
    share a fiber with probability about k/p^n), so on P^n a certified
    verdict also needs ``ratio_relation_degree`` to succeed.
    """
    if not f.normalized and not is_normalized(f):
        raise MapError("birationality certificate expects a normalized map")
    fld = GF(prime)
    fp = f.to_field(fld) if f.field != fld else f
    rng = random.Random(seed)
    nvars = f.source_dim + 1

    def draw(k):
        if domain is None:
            return random_points(nvars, k, prime, rng.randrange(1 << 30))
        pool = domain.points
        return [pool[rng.randrange(len(pool))] for _ in range(k)]

    # 1: Jacobian rank
    expected = nvars if domain is None else 3
    jr = 0
    for pt in draw(5):
        if apply_map(fp, pt) is BASE_POINT:
            continue
        tan = tangent_basis(domain.equation, pt, prime) if domain is not None else None
        jr = max(jr, jacobian_rank(fp.forms, pt, prime, tan))
    # 2: pair test
    base, collisions, done = 0, 0, 0
    attempts = 0
    while done < trials and attempts < 100 * trials:
        attempts += 1
        a, b = draw(2)
        if a == b:
            continue
        ia, ib = apply_map(fp, a), apply_map(fp, b)
        if ia is BASE_POINT or ib is BASE_POINT:
            base += 1
            continue
        done += 1
        if proportional(ia, ib, fld):
            collisions += 1
    if done == 0:
        raise DegenerateMapError("every sample hit the base locus")
    cert = BirationalityCertificate("inconclusive", done, base, jr, expected, collisions)
    if jr < expected:
        cert.notes.append("Jacobian rank too small: positive-dimensional fibers")
        return cert
    if collisions:
        cert.notes.append(f"{collisions} colliding pairs")
        return cert
    if domain is None:
        e = ratio_relation_degree(fp, prime, seed, max_ratio_unknowns)
        if e is None:
            cert.notes.append("no relation A(f) l1 = B(f) l2 within the unknown budget: "
                              "the map may have degree > 1 onto its image")
            return cert
        cert.notes.append(f"a generic ratio of linear forms is a degree-{e} function on the image")
    cert.verdict = "certified_generically_injective"
    if fit_inverse and domain is None and f.target_dim == f.source_dim:
        _fit_inverse(f, cert, prime, seed, max_inverse_unknowns)
    return cert


def ratio_relation_degree(f: RationalMap, prime: int, seed: int = 0, max_unknowns: int = 500):
    """Least e with forms A, B of degree e and A(f) l1 = B(f) l2, A(f) != 0, for random l1, l2.

    The ratio l1/l2 of general linear forms then lies in the function field
    of the image; when it does, the map has degree 1 onto its image. A map
    of degree k > 1 admits no such relation at any e. Returns None when the
    unknown count exceeds ``max_unknowns`` first.
    """
    fld = GF(prime)
    fp = f if f.field == fld else f.to_field(fld)
    rng = random.Random(seed + 4099)
    nv, nt = f.source_dim + 1, f.target_dim + 1
    l1 = [rng.randrange(prime) for _ in range(nv)]
    l2 = [rng.randrange(prime) for _ in range(nv)]
    for e in range(1, 64):
        nm = math.comb(e + nt - 1, nt - 1)
        if 2 * nm > max_unknowns:
            return None
        count = 2 * nm + 20
        imgs, srcs = [], []
        for x in random_points(nv, 3 * count, prime, rng.randrange(1 << 30)):
            y = apply_map(fp, x)
            if y is BASE_POINT:
                continue
            imgs.append(y)
            srcs.append(x)
            if len(imgs) == count:
                break
        ev = evaluation_rows(imgs, nt, e, prime)
        r1 = rank(ev, nm, fld)
        rows = []
        for row, x in zip(ev, srcs):
            a = sum(c * v for c, v in zip(l1, x)) % prime
            b = sum(c * v for c, v in zip(l2, x)) % prime
            rows.append([v * a % prime for v in row] + [(-v * b) % prime for v in row])
        if rank(rows, 2 * nm, fld) < 2 * r1:
            return e
    return None


def _inverse_equations(imgs, srcs, nv, e, p):
    """Rows of g_i(y) x_k - g_k(y) x_i = 0 for unknown g, one pivot k per sample."""
    mons = monomials_of_degree(nv, e)
    nm = len(mons)
    ev = evaluation_rows(imgs, nv, e, p)
    rows = []
    for row_y, x in zip(ev, srcs):
        k = next(i for i, v in enumerate(x) if v)
        for i in range(nv):
            if i == k:
                continue
            r = [0] * (nv * nm)
            for j, val in enumerate(row_y):
                r[i * nm + j] = val * x[k] % p if p else val * x[k]
                r[k * nm + j] = (-val * x[i]) % p if p else -val * x[i]
            rows.append(r)
    return rows, mons


def _fit_inverse(f: RationalMap, cert: BirationalityCertificate, prime: int, seed: int, budget: int):
    nv = f.source_dim + 1
    cap = f.degree ** (nv - 2) if nv > 2 else 1
    for e in range(1, cap + 1):
        nm = math.comb(e + nv - 1, nv - 1)
        unknowns = nv * nm
        if unknowns > budget:
            cert.notes.append(f"inverse search stopped at degree {e}: {unknowns} unknowns")
            return
        nsamp = unknowns // (nv - 1) + 12

        def solve(p, _e=e, _n=nsamp):
            src = random_points(nv, _n + 20, p, seed + 7919 * _e)
            imgs, srcs = [], []
            fp = f.to_field(GF(p)) if f.field != GF(p) else f
            for x in src:
                y = apply_map(fp, x)
                if y is BASE_POINT:
                    continue
                imgs.append(y)
                srcs.append(x)
            rows, _ = _inverse_equations(imgs[:_n], srcs[:_n], nv, _e, p)
            ker = nullspace(rows, nv * math.comb(_e + nv - 1, nv - 1), GF(p))
            if len(ker) != 1:
                return None
            g = _vector_to_map(ker[0], nv, _e, GF(p))
            checked = 0
            for x, y in zip(srcs[_n:], imgs[_n:]):
                back = apply_map(g, y)
                if back is BASE_POINT:  # x lies where g o f vanishes identically
                    continue
                if not proportional(back, x, GF(p)):
                    return None
                checked += 1
            return ker[0] if checked >= 10 else None

        if f.field.p:
            vec = solve(f.field.p)
            if vec is None:
                continue
            g = _vector_to_map(vec, nv, e, f.field)
            cert.inverse, cert.inverse_degree = g, e
            cert.inverse_exact = _check_inverse(f, g)
            cert.verdict = "certified_birational"
            return
        if solve(prime) is None:
            continue
        vec = lift_kernel_vector(solve)
        if vec is None:
            cert.notes.append(f"inverse of degree {e} found mod p but did not lift to Q")
            cert.inverse_degree = e
            cert.verdict = "certified_birational"
            return
        g = _vector_to_map(vec, nv, e, QQ)
        if _check_inverse(f, g):
            cert.inverse, cert.inverse_degree, cert.inverse_exact = g, e, True
            cert.verdict = "certified_birational"
            return
        cert.notes.append(f"lifted degree-{e} inverse failed the exact identity check")
        return


def _vector_to_map(vec, nv, e, fld) -> RationalMap:
    mons = monomials_of_degree(nv, e)
    nm = len(mons)
    forms = tuple(Polynomial({m: vec[i * nm + j] for j, m in enumerate(mons) if vec[i * nm + j]},
                             nv, fld) for i in range(nv))
    return RationalMap(forms, False, "inverse")


def _check_inverse(f: RationalMap, g: RationalMap) -> bool:
    """Exact check that g o f = (common factor) * identity."""
    if not f.field.p:
        # projective identities survive rescaling; integers multiply much faster than fractions
        f = RationalMap(_integral(f.forms), f.normalized, f.label)
        g = RationalMap(_integral(g.forms), g.normalized, g.label)
    comp = g.after(f).forms
    xs = Polynomial.gens(f.source_dim + 1, f.field)
    k = next(i for i, c in enumerate(comp) if not c.is_zero())
    for i in range(len(comp)):
        if i != k and comp[i] * xs[k] != comp[k] * xs[i]:
            return False
    return True


def _integral(forms: Sequence[Polynomial]) -> tuple:
    """The forms times one common integer that clears every denominator."""
    den = 1
    for h in forms:
        for c in h.terms.values():
            if isinstance(c, Fraction):
                den = den * c.denominator // math.gcd(den, c.denominator)
    return tuple(h.scale(den) for h in forms) if den > 1 else tuple(forms)


def composition_factor(f: RationalMap, g: RationalMap) -> Polynomial:
    """For an exact inverse g of f: the polynomial h with g o f = h * identity."""
    comp = g.after(f).forms
    xs = Polynomial.gens(f.source_dim + 1, f.field)
    k = next(i for i, c in enumerate(comp) if not c.is_zero())
    return exact_div(comp[k], xs[k])


# ---------------------------------------------------------------------------
# degrees of image surfaces


def random_line(nvars: int, prime: int, rng: random.Random) -> tuple[tuple, tuple]:
    while True:
        a = tuple(rng.randrange(prime) for _ in range(nvars))
        b = tuple(rng.randrange(prime) for _ in range(nvars))
        if rank([a, b], nvars, GF(prime)) == 2:
            return a, b


def restrict_to_line(F: Polynomial, a: Sequence, b: Sequence) -> Polynomial:
    """Binary form F(s a + t b)."""
    fld = F.field
    s, t = Polynomial.gens(2, fld)
    subs = [s.scale(x) + t.scale(y) for x, y in zip(a, b)]
    return F.compose(subs)


@dataclass
class DegreeEstimate:
    degree: int
    probes: list
    fitted_form: Polynomial | None = None
    projection: list | None = None


def image_degree_estimate(points: Sequence, ambient_vars: int, prime: int = DEFAULT_PRIME,
                          seed: int = 0, max_degree: int = 8, probes: int = 10) -> DegreeEstimate:
    """Degree of a surface known by sample points in P^(ambient_vars-1).

    Surfaces in P^N with N > 3 are first sent to P^3 by a random linear
    projection (birational onto a hypersurface of the same degree). The
    minimal-degree vanishing form is then cut with random lines: each probe
    counts intersection points with multiplicity as the degree of the
    restricted binary form, split into F_p-rational roots and the rest.
    """
    rng = random.Random(seed)
    fld = GF(prime)
    proj = None
    pts = list(points)
    if ambient_vars > 4:
        while True:
            proj = [[rng.randrange(prime) for _ in range(ambient_vars)] for _ in range(4)]
            if rank(proj, ambient_vars, fld) == 4:
                break
        pts = []
        for pt in points:
            img = apply_matrix(proj, pt, fld)
            if any(img):
                pts.append(normalize_point(img, fld))
    elif ambient_vars < 4:
        raise Inconclusive("surface degree needs an ambient space of dimension at least 3")
    d, forms = fit_minimal_degree(pts, 4, prime, max_degree)
    if len(forms) != 1:
        raise Inconclusive(f"{len(forms)} independent forms at degree {d}: not a surface")
    F = forms[0]
    counts = []
    for _ in range(probes):
        a, b = random_line(4, prime, rng)
        restricted = restrict_to_line(F, a, b)
        if restricted.is_zero():
            counts.append(None)
            continue
        # dehomogenize t = 1 and count roots (with multiplicity) plus the point at s = inf
        coeffs = [0] * (d + 1)
        for (i, j), c in restricted.terms.items():
            coeffs[i] = c
        at_inf = 0
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
            at_inf += 1
        rational = sum(roots_with_multiplicity(coeffs, prime).values()) if len(coeffs) > 1 else 0
        nonrational = (len(coeffs) - 1) - rational
        counts.append(rational + nonrational + at_inf)
    if any(c != d for c in counts):
        raise Inconclusive(f"line probes disagree: {counts}")
    return DegreeEstimate(d, counts, F, proj)


def is_smooth_at(forms: Sequence[Polynomial], point: Sequence, prime: int, codim: int) -> bool:
    """Jacobian criterion: rank of the fitted forms' Jacobian equals the codimension."""
    return jacobian_rank(forms, point, prime) >= codim


# ---------------------------------------------------------------------------
# points of space curves


def _restrict_to_plane(F: Polynomial, P1, P2, P3, prime: int) -> dict:
    """F(a P1 + P2 + c P3) as {(i, j): coeff of a^i c^j} over GF(prime)."""
    fld = GF(prime)
    a, c = Polynomial.gens(2, fld)
    one = Polynomial.constant(1, 2, fld)
    subs = [a.scale(x) + one.scale(y) + c.scale(z) for x, y, z in zip(P1, P2, P3)]
    Fp = F if F.field == fld else F.to_field(fld)
    return Fp.compose(subs).terms


def _column(terms: dict, aval: int, p: int) -> list:
    """Coefficients in c after substituting a = aval."""
    deg = max((j for _, j in terms), default=0)
    out = [0] * (deg + 1)
    for (i, j), v in terms.items():
        out[j] = (out[j] + v * pow(aval, i, p)) % p
    return out


def curve_points(F: Polynomial, G: Polynomial, prime: int, count: int, seed: int = 0,
                 avoid: Callable[[tuple], bool] | None = None, max_planes: int = 2000) -> list[tuple]:
    """Points of V(F, G) in P^3 over GF(prime) from random plane sections.

    On each plane the resultant in one coordinate is interpolated from values
    at deg F * deg G + 1 abscissae; its roots are lifted by univariate gcds.
    """
    from .univariate import gcd as ugcd, interpolate, resultant as ures, roots_mod_p as uroots
    p = prime
    fld = GF(p)
    rng = random.Random(seed)
    bound = F.degree() * G.degree()
    out, seen = [], set()
    for _ in range(max_planes):
        if len(out) >= count:
            break
        P1, P2, P3 = (tuple(rng.randrange(p) for _ in range(4)) for _ in range(3))
        if rank([P1, P2, P3], 4, fld) < 3:
            continue
        tf = _restrict_to_plane(F, P1, P2, P3, p)
        tg = _restrict_to_plane(G, P1, P2, P3, p)
        xs = list(range(1, bound + 2))
        ys = [ures(_column(tf, x, p), _column(tg, x, p), p) for x in xs]
        res = interpolate(xs, ys, p)
        if not res or len(res) == 1:
            continue
        for aval in uroots(res, p, rng.randrange(1 << 30)):
            g = ugcd(_column(tf, aval, p), _column(tg, aval, p), p)
            if len(g) < 2:
                continue
            for cval in uroots(g, p, rng.randrange(1 << 30)):
                pt = tuple((aval * x + y + cval * z) % p for x, y, z in zip(P1, P2, P3))
                if not any(pt):
                    continue
                pt = normalize_point(pt, fld)
                if pt in seen or (avoid is not None and avoid(pt)):
                    continue
                seen.add(pt)
                out.append(pt)
    if len(out) < count:
        raise SamplingError(f"found {len(out)} of {count} curve points; try a larger prime")
    return out[:count]

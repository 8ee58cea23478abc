"""Quartics with a double line, and quartics with an elliptic double point.

Both routes work in certificate mode over GF(p): the general points they
project from are sampled, and every image is known through interpolation.

Double line l: quadrics through l and a general point x map P^3 onto the
Segre threefold P^1 x P^2 in P^5, and S onto a surface of degree 7. If that
surface shows no singular point the threshold criterion on P^1 x P^2 closes
the case; otherwise projecting from a singular point lands on a rank-4
quadric in P^4 and a quintic surface, and a further singular point leads to
a cubic surface.

Elliptic point of type (a): quadrics of weighted order a+1 at [1,0,0,0] map
P^3 onto X_a in P^(7-a). Projections from a node, then from two general
surface points, bring S to a quartic double along a line.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

from .field import GF, Field
from .linsys import (CurveMultiplicity, CurveParam, PointMultiplicity, ValuationOrder, solve_system,
                     span_contains, weighted_order)
from .maps import (BASE_POINT, ImageFitError, Inconclusive, apply_map, apply_matrix,
                   birationality_certificate, compose_projection, fit_image_forms,
                   image_degree_estimate, jacobian_rank, linear_map, normalize_point,
                   projection_matrix, push_points, random_points, sample_surface_points)
from .matrix import nullspace, rank
from .pipeline import (Outcome, PipelineOptions, StepFailed, _to, general_point, linearize_low_degree,
                       system_map)
from .poly import Polynomial
from .report import CERTIFIED_BY_THRESHOLD, INCONCLUSIVE, CaseStep
from .surface import SurfaceInput, find_singular_points
from .threshold import CATALOG, corollary_certificate
from . import univariate as uv

MODE = "certificate-F_p"
ELLIPTIC_CENTER = (1, 0, 0, 0)
TYPE1_WEIGHTS = (2, 1, 1)


# ---------------------------------------------------------------------------
# sampled geometry of images


def surface_images(S: Polynomial, f, prime: int, count: int, seed: int, avoid=None) -> list:
    """Distinct images under f of sampled points of V(S)."""
    out: list = []
    seen: set = set()
    batch = count + 40
    for attempt in range(4):
        pts = sample_surface_points(S, prime, batch, seed + 1000 * attempt, avoid,
                                   one_per_line=True).points
        imgs, _ = push_points(f, pts, prime)
        for q in imgs:
            if q not in seen:
                seen.add(q)
                out.append(q)
        if len(out) >= count:
            return out[:count]
        batch *= 2
    raise StepFailed(f"only {len(out)} distinct image points of the surface; {count} needed")


def space_images(f, prime: int, count: int, seed: int) -> list:
    pts = random_points(f.source_dim + 1, count + 20, prime, seed)
    imgs, _ = push_points(f, pts, prime)
    imgs = list(dict.fromkeys(imgs))
    if len(imgs) < count:
        raise StepFailed(f"only {len(imgs)} distinct images of general points")
    return imgs[:count]


def relation_count(points: Sequence, nvars: int, degree: int, prime: int) -> list:
    """Forms of ``degree`` vanishing on the points (fit on half, verified on the rest)."""
    try:
        return fit_image_forms(points, nvars, degree, prime)
    except ImageFitError as exc:
        raise StepFailed(str(exc)) from exc


def quadric_matrix(Q: Polynomial, prime: int) -> list[list]:
    """Symmetric matrix of 2Q (p odd)."""
    n = Q.nvars
    M = [[0] * n for _ in range(n)]
    for e, c in Q.terms.items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        i, j = idx
        if i == j:
            M[i][i] = (2 * c) % prime
        else:
            M[i][j] = M[j][i] = c % prime
    return M


def quadric_rank(Q: Polynomial, prime: int) -> int:
    return rank(quadric_matrix(Q, prime), Q.nvars, GF(prime))


def sampled_smoothness_of_image(points: Sequence, nvars: int, codim: int, prime: int,
                                test: int = 40, max_degree: int = 4) -> dict:
    """Jacobian rank of low-degree forms through the image, at sampled image points.

    Forms of increasing degree are fitted until every test point has rank
    ``codim``; a point below that rank at every degree tried is reported.
    """
    tests = list(points[:test])
    last: dict = {}
    for d in range(2, max_degree + 1):
        need = 2 * math.comb(d + nvars - 1, nvars - 1)
        if len(points) < need:
            break
        forms = relation_count(points, nvars, d, prime)
        ranks = [jacobian_rank(forms, q, prime) for q in tests]
        last = {"fitted_degree": d, "forms": len(forms), "samples": len(tests),
                "min_rank": min(ranks) if ranks else None, "codim": codim}
        if ranks and min(ranks) >= codim:
            last["statement"] = "no singular point found at samples"
            last["smooth_at_samples"] = True
            return last
    last["smooth_at_samples"] = False
    last["statement"] = "full Jacobian rank not reached at every sample"
    return last


def is_singular_image(points: Sequence, nvars: int, codim: int, q, prime: int, degree: int) -> bool:
    forms = relation_count(points, nvars, degree, prime)
    return jacobian_rank(forms, q, prime) < codim


def degree_of(points, nvars, opts, salt, max_degree=8) -> int:
    try:
        est = image_degree_estimate(points, nvars, opts.prime, opts.seed + salt, max_degree, probes=10)
    except (Inconclusive, ImageFitError) as exc:
        raise StepFailed(f"image degree not established: {exc}") from exc
    return est.degree, est.probes


def _images_of(f, pts, prime):
    fld = GF(prime)
    out = []
    for pt in pts:
        img = apply_map(f, tuple(fld(v) for v in pt))
        if img is not BASE_POINT:
            out.append(normalize_point(img, fld))
    return out


def _projection_step(name: str, center, fld: Field, checks: dict) -> tuple[CaseStep, list]:
    P = projection_matrix(center, fld)
    step = CaseStep(name, linear_map(P, fld, "projection"), checks, 1, field_mode=MODE)
    return step, P


# ---------------------------------------------------------------------------
# double line


def _line_forms(line: CurveParam) -> list:
    """Two linear forms cutting the line."""
    fld = line.field
    a, b = line.point(1, 0), line.point(0, 1)
    return nullspace([list(a), list(b)], 4, fld)


def linearize_double_line(S: Polynomial, line: CurveParam, opts: PipelineOptions,
                          general_points=(), names=None, singular_points=(),
                          budget: int | None = None) -> Outcome:
    """Quadrics through the double line l and a general point x; see module docstring."""
    budget = opts.recursion_budget if budget is None else budget
    if budget <= 0:
        return Outcome([], {}, INCONCLUSIVE, ["recursion budget exhausted in the double-line case"])
    p = opts.prime
    fld = GF(p)
    Sp = _to(fld, S)
    lp = _to(fld, line)
    lforms = _line_forms(lp)

    def on_line(q):
        return all(sum(a * b for a, b in zip(row, q)) % p == 0 for row in lforms)

    hints = [tuple(fld(v) for v in pt) for pt in general_points]
    x, _ = general_point(Sp, opts, hints, avoid=on_line, salt=7)
    checks: dict = {"general_point": x}
    without = solve_system(4, 2, [CurveMultiplicity(lp, 1)], fld)
    lam = solve_system(4, 2, [CurveMultiplicity(lp, 1), PointMultiplicity(x, 1)], fld)
    checks["quadrics_through_line"] = len(without.basis)
    checks["quadrics_through_line_and_point"] = len(lam.basis)
    if len(lam.basis) != 6:
        raise StepFailed(f"quadrics through the line and x: {len(lam.basis)} forms, expected 6")
    f = system_map(lam, "quadrics through a double line and a point")
    cert = birationality_certificate(f, trials=opts.trials, seed=opts.seed, prime=p, fit_inverse=False)
    checks["injectivity"] = cert
    if cert.verdict == "inconclusive":
        raise StepFailed("the quadric map is not generically injective on samples")
    three = space_images(f, p, 120, opts.seed + 11)
    if relation_count(three[:24], 6, 1, p):
        raise StepFailed("the image of P^3 lies in a hyperplane")
    segre = relation_count(three, 6, 2, p)
    checks["threefold_quadric_relations"] = len(segre)
    if len(segre) != 3:
        raise StepFailed(f"image of P^3 has {len(segre)} quadric relations; the Segre threefold has 3")
    imgs = surface_images(Sp, f, p, 340, opts.seed + 13, avoid=on_line)
    deg, probes = degree_of(imgs, 6, opts, 17)
    checks["surface_degree"] = deg
    checks["degree_probes"] = probes
    if deg != 7:
        raise StepFailed(f"image surface has degree {deg}, expected 7")
    smooth = sampled_smoothness_of_image(imgs, 6, 3, p, max_degree=3)
    checks["sampled_smoothness"] = smooth
    step = CaseStep("quadrics through the double line and a point", f, checks, 2, names, field_mode=MODE)
    steps = [step]

    sing_src = [tuple(fld(v) for v in pt) for pt in singular_points]
    if not S.field.p:
        sing_src += [tuple(fld(v) for v in pt)
                     for pt in find_singular_points(S, opts.search_bound, 2,
                                                    avoid=lambda q: on_line(tuple(fld(v) for v in q)))]
    sing_src = [q for q in dict.fromkeys(sing_src) if not on_line(q)]
    sing_img = [q for q in _images_of(f, sing_src, p)
                if is_singular_image(imgs, 6, 3, q, p, smooth.get("fitted_degree", 3))]
    if not sing_img:
        if not smooth.get("smooth_at_samples"):
            return Outcome(steps, {}, INCONCLUSIVE, ["image surface smoothness not established"])
        cert = corollary_certificate(CATALOG["p1xp2"], [3, 2], "divisor of type (3,2) on P^1 x P^2 "
                                     "with no singular point found at samples or known nodes")
        final = {"kind": "rho_certificate", "model": "p1xp2", "class": [3, 2], "certificate": cert,
                 "statement": "certificate by the threshold criterion 0 < rho < 1"}
        status = CERTIFIED_BY_THRESHOLD if cert.certifies_ce_to_plane else INCONCLUSIVE
        return Outcome(steps, final, status, ["no singular point of the image surface found"])

    # project from a singular point y of the image surface
    y = sing_img[0]
    g = compose_projection(f, y)
    three4 = space_images(g, p, 80, opts.seed + 19)
    quads = relation_count(three4, 5, 2, p)
    if len(quads) != 1:
        raise StepFailed(f"image threefold in P^4 has {len(quads)} quadric relations, expected 1")
    Q = quads[0]
    qrank = quadric_rank(Q, p)
    imgs4 = surface_images(Sp, g, p, 200, opts.seed + 23, avoid=on_line)
    deg4, probes4 = degree_of(imgs4, 5, opts, 29)
    pchecks = {"center": y, "quadric": Q, "quadric_rank": qrank, "surface_degree": deg4,
               "degree_probes": probes4}
    if qrank != 4 or deg4 != 5:
        raise StepFailed(f"projection from the node: quadric rank {qrank}, surface degree {deg4}; "
                         "expected 4 and 5")
    vertex = nullspace(quadric_matrix(Q, p), 5, fld)[0]
    pchecks["vertex"] = normalize_point(vertex, fld)
    pstep, P = _projection_step("projection from a singular point", y, fld, pchecks)
    steps.append(pstep)
    rest_src = [q for q in sing_src if normalize_point(apply_map(f, q), fld) != y]
    zs = [z for z in _images_of(g, rest_src, p) if z != pchecks["vertex"]]
    if not zs:
        smooth4 = sampled_smoothness_of_image(imgs4, 5, 2, p, max_degree=3)
        pchecks["sampled_smoothness"] = smooth4
        cert = corollary_certificate(CATALOG["quadric-cone-q4"], [3, -1],
                                     "strict transform on the small resolution of the quadric cone")
        final = {"kind": "rho_certificate", "model": "quadric-cone-q4", "class": [3, -1],
                 "certificate": cert, "statement": "certificate by the threshold criterion 0 < rho < 1"}
        ok = cert.certifies_ce_to_plane and smooth4.get("smooth_at_samples")
        return Outcome(steps, final, CERTIFIED_BY_THRESHOLD if ok else INCONCLUSIVE,
                       ["no further singular point known on the quintic surface"])
    z = zs[0]
    h = compose_projection(g, z)
    imgs3 = surface_images(Sp, h, p, 80, opts.seed + 31, avoid=on_line)
    cub = relation_count(imgs3, 4, 3, p)
    lower = relation_count(imgs3, 4, 2, p)
    if len(cub) != 1 or lower:
        raise StepFailed("projection from a second singular point does not give a cubic surface")
    zstep, _ = _projection_step("projection from a second singular point", z, fld,
                                {"center": z, "image_degree": 3, "cubic": cub[0]})
    steps.append(zstep)
    left = [q for q in rest_src if normalize_point(apply_map(g, q), fld) != z]
    rest = linearize_low_degree(cub[0], opts, None, _images_of(h, left, p), (), salt=37)
    return Outcome(steps + rest.steps, rest.final, rest.status, rest.notes)


# ---------------------------------------------------------------------------
# elliptic double points


def build_lambda_a(S: Polynomial, a: int, fld: Field):
    """Quadrics of weighted order a+1 at [1,0,0,0]; returns (system, info).

    Type (1) uses weights (2,1,1) on (x1, x2, x3). For type (2) the weights
    (entries 1..3) are searched: 6 quadrics, inside the type-(1) system, and a
    generically injective map, with S of order at least 6 = 2(a+1) so that
    its image is cut by a quadric. Ties go to the highest order on S, then to
    the smallest weight sum.
    """
    Sp = _to(fld, S)
    lam1 = solve_system(4, 2, [ValuationOrder(ELLIPTIC_CENTER, TYPE1_WEIGHTS, 2)], fld)
    if a == 1:
        if len(lam1.basis) != 7:
            raise StepFailed(f"type (1) system has {len(lam1.basis)} forms, expected 7")
        return lam1, {"weights": list(TYPE1_WEIGHTS), "order": 2, "basis_size": 7,
                      "surface_weighted_order": weighted_order(Sp, ELLIPTIC_CENTER, TYPE1_WEIGHTS)}
    if a != 2:
        raise ValueError("a must be 1 or 2")
    cands, low = [], []
    for wts in itertools.product(range(1, 4), repeat=3):
        sys2 = solve_system(4, 2, [ValuationOrder(ELLIPTIC_CENTER, wts, 3)], fld)
        if len(sys2.basis) != 6 or not all(span_contains(lam1.basis, g) for g in sys2.basis):
            continue
        cert = birationality_certificate(system_map(sys2, "type (2) candidate"), trials=60,
                                         prime=fld.p, fit_inverse=False)
        if cert.verdict == "inconclusive":
            continue
        order = weighted_order(Sp, ELLIPTIC_CENTER, wts)
        (cands if order >= 6 else low).append((-order, sum(wts), wts, sys2))
    if not cands:
        seen = ", ".join(f"{list(c[2])}: order {-c[0]}" for c in sorted(low, key=lambda c: c[:3]))
        raise StepFailed("no weights give 6 quadrics inside the type (1) system, an injective map "
                         f"and order 6 on S; type (2) weights are not determined ({seen})")
    cands.sort(key=lambda c: c[:3])
    order, _, wts, sys2 = cands[0]
    prods = [g * h for g, h in itertools.combinations_with_replacement(sys2.basis, 2)]
    return sys2, {"weights": list(wts), "order": 3, "basis_size": 6,
                  "codim_in_type1_system": len(lam1.basis) - len(sys2.basis),
                  "surface_weighted_order": -order, "surface_in_sym2": span_contains(prods, Sp),
                  "candidates": [list(c[2]) for c in cands]}


def find_double_line(F: Polynomial, plane, v, prime: int) -> tuple[list, list]:
    """Lines in ``plane`` through ``v`` lying on V(F); and those along which F is singular."""
    fld = GF(prime)
    basis = nullspace([list(plane)], 4, fld)
    others = [b for b in basis if rank([list(v), b], 4, fld) == 2]
    a = others[0]
    b = next(c for c in others[1:] if rank([list(v), a, c], 4, fld) == 3)
    d = F.degree()
    ts = list(range(1, d + 3))
    coeff_vals: dict = {}
    for t in ts:
        pt = [(ai + t * bi) % prime for ai, bi in zip(a, b)]
        r = _restrict(F, v, pt)
        for i in range(d + 1):
            coeff_vals.setdefault(i, []).append(r.get(i, 0))
    g: list = []
    for i, ys in coeff_vals.items():
        g = uv.gcd(g, uv.interpolate(ts, ys, prime), prime) if g else uv.trim(uv.interpolate(ts, ys, prime))
    lines = []
    if not g:
        raise StepFailed("every line of the pencil lies on the surface")
    for t in uv.roots_mod_p(g, prime):
        lines.append(tuple((ai + t * bi) % prime for ai, bi in zip(a, b)))
    if all(_restrict(F, v, b).get(i, 0) == 0 for i in range(d + 1)):
        lines.append(tuple(b))
    double = [w for w in lines
              if all(not any(_restrict(F.diff(k), v, w).values()) for k in range(4))]
    return lines, double


def _restrict(F: Polynomial, u, w) -> dict:
    """F(s u + t w) as {power of t: coefficient}; F is a form so this determines it."""
    out: dict = {}
    for (i, j), c in _binary(F, u, w).terms.items():
        out[j] = c
    return {k: c for k, c in out.items() if c}


def _binary(F, u, w):
    from .maps import restrict_to_line
    return restrict_to_line(F, u, w)


def linearize_elliptic(inp: SurfaceInput, a: int, opts: PipelineOptions) -> Outcome:
    p = opts.prime
    fld = GF(p)
    S = inp.equation
    Sp = _to(fld, S)
    lam, info = build_lambda_a(S, a, fld)
    f = system_map(lam, f"quadrics of weighted order {a + 1} at the elliptic point")
    checks: dict = {"valuation": info}
    cert = birationality_certificate(f, trials=opts.trials, seed=opts.seed, prime=p, fit_inverse=False)
    checks["injectivity"] = cert
    if cert.verdict == "inconclusive":
        raise StepFailed("the weighted quadric map is not generically injective on samples")
    nv = 8 - a
    three = space_images(f, p, 160, opts.seed + 41)
    checks["threefold_quadric_relations"] = len(relation_count(three, nv, 2, p))
    expect_rel = {1: 6, 2: 3}[a]
    if checks["threefold_quadric_relations"] != expect_rel:
        raise StepFailed(f"image threefold has {checks['threefold_quadric_relations']} quadric "
                         f"relations, expected {expect_rel}")

    def off_plane(q):  # the plane x1 = 0 is contracted
        return q[1] % p == 0

    imgs = surface_images(Sp, f, p, 340, opts.seed + 43, avoid=off_plane)
    deg, probes = degree_of(imgs, nv, opts, 47)
    checks["surface_degree"] = deg
    checks["degree_probes"] = probes
    expect_deg = {1: 8, 2: 6}[a]
    if deg != expect_deg:
        raise StepFailed(f"image surface has degree {deg}, expected {expect_deg}")
    names = list(inp.variables)
    steps = [CaseStep(f"quadrics of weighted order {a + 1} at the elliptic point", f, checks, 2, names,
                      field_mode=MODE)]
    sing_src = [tuple(fld(v) for v in pt) for pt in inp.singular_points]
    if not S.field.p:
        sing_src += [tuple(fld(v) for v in pt) for pt in find_singular_points(S, opts.search_bound, 2)]
    sing_src = [q for q in dict.fromkeys(sing_src) if not off_plane(q)]
    g = f
    if a == 1:
        nodes = _images_of(f, sing_src, p)
        if not nodes:
            smooth = sampled_smoothness_of_image(imgs, 7, 4, p, max_degree=2)
            checks["sampled_smoothness"] = smooth
            c = corollary_certificate(CATALOG["wps1112"], [4], "image surface in the Veronese cone "
                                      "with no singular point found at samples or known nodes")
            final = {"kind": "rho_certificate", "model": "wps1112", "class": [4], "certificate": c,
                     "statement": "certificate by the threshold criterion 0 < rho < 1"}
            ok = c.certifies_ce_to_plane and smooth.get("smooth_at_samples")
            return Outcome(steps, final, CERTIFIED_BY_THRESHOLD if ok else INCONCLUSIVE,
                           ["no singular point of the image surface found"])
        x = nodes[0]
        g = compose_projection(f, x)
        imgs5 = surface_images(Sp, g, p, 260, opts.seed + 53, avoid=off_plane)
        d5, pr5 = degree_of(imgs5, 6, opts, 59)
        rel5 = relation_count(space_images(g, p, 100, opts.seed + 61), 6, 2, p)
        pc = {"center": x, "surface_degree": d5, "degree_probes": pr5,
              "threefold_quadric_relations": len(rel5)}
        if d5 != 6:
            raise StepFailed(f"projection from the node gives degree {d5}, expected 6")
        steps.append(_projection_step("projection from a node of the image surface", x, fld, pc)[0])
        sing_src = [q for q in sing_src if normalize_point(apply_map(f, q), fld) != x]
    # two projections from general surface points: P^5 -> P^4 -> P^3
    gen = surface_images(Sp, g, p, 2, opts.seed + 67, avoid=off_plane)
    x2 = gen[0]
    h = compose_projection(g, x2)
    quads = relation_count(space_images(h, p, 80, opts.seed + 71), 5, 2, p)
    if len(quads) != 1:
        raise StepFailed(f"image threefold in P^4 has {len(quads)} quadric relations, expected 1")
    Q = quads[0]
    imgs4 = surface_images(Sp, h, p, 200, opts.seed + 73, avoid=off_plane)
    d4, pr4 = degree_of(imgs4, 5, opts, 79)
    qc = {"center": x2, "quadric": Q, "quadric_rank": quadric_rank(Q, p), "surface_degree": d4,
          "degree_probes": pr4}
    if qc["quadric_rank"] != 4 or d4 != 5:
        raise StepFailed(f"projection from a general point: quadric rank {qc['quadric_rank']}, "
                         f"surface degree {d4}; expected 4 and 5")
    vertex = normalize_point(nullspace(quadric_matrix(Q, p), 5, fld)[0], fld)
    qc["vertex"] = vertex
    steps.append(_projection_step("projection from a general point of the surface", x2, fld, qc)[0])
    y = next(q for q in imgs4[100:] if q != vertex and Q.evaluate(q) == 0)
    k = compose_projection(h, y)
    imgs3 = surface_images(Sp, k, p, 120, opts.seed + 83, avoid=off_plane)
    if relation_count(imgs3, 4, 3, p):
        raise StepFailed("the last projection drops the degree below 4")
    quart = relation_count(imgs3, 4, 4, p)
    if len(quart) != 1:
        raise StepFailed(f"{len(quart)} quartic forms vanish on the last image, expected 1")
    F = quart[0]
    P = projection_matrix(y, fld)
    grad = [Q.diff(i).evaluate(y) for i in range(5)]
    hyper = nullspace([grad], 5, fld)
    plane_pts = [apply_matrix(P, hpt, fld) for hpt in hyper]
    plane = nullspace(plane_pts, 4, fld)
    if len(plane) != 1:
        raise StepFailed("the tangent hyperplane does not project to a plane")
    v3 = apply_matrix(P, vertex, fld)
    lines, double = find_double_line(F, plane[0], v3, p)
    yc = {"center": y, "surface_degree": 4, "quartic": F, "tangent_plane": plane[0],
          "vertex_image": normalize_point(v3, fld), "lines_in_pencil": len(lines),
          "double_lines": len(double)}
    steps.append(_projection_step("projection from a second general point", y, fld, yc)[0])
    if not double:
        raise StepFailed("no double line found in the pencil through the vertex image")
    line = CurveParam.line(tuple(v3), double[0], fld)
    rest = linearize_double_line(F, line, opts, (), None,
                                 _images_of(k, sing_src, p), opts.recursion_budget - 1)
    return Outcome(steps + rest.steps, rest.final, rest.status,
                   ["degree ledger " + " -> ".join(str(d) for d in
                                                   ([6] if a == 1 else [deg]) + [d4, 4])] + rest.notes)

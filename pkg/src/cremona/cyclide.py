"""Cyclides (x^2+y^2+z^2-w^2)^2 + w^2 q = 0, double along the conic w = x^2+y^2+z^2 = 0.

With an extra node p, a quadric Q through the conic and p meets S in twice the
conic plus a residual quartic curve R = V(Q, Q2); quartics double along the
conic and at p, through R and one more point of S, map S onto a plane.
Without a node, the construction needs a rational quartic curve on S and uses
sextics with triple base conditions instead.
"""

from __future__ import annotations

import itertools
import random

from .field import GF, QQ, Field
from .linsys import (CurveMultiplicity, CurveThroughSamples, IdealMembership,
                     PointMultiplicity, ideal_membership_certificate, solve_system, span_contains)
from .maps import (BASE_POINT, SamplingError, apply_map, birationality_certificate, curve_points,
                   exact_image_forms, jacobian_rank, sample_surface_points, tangent_basis)
from .pipeline import (Outcome, PipelineOptions, StepFailed, _finish, _mode_name, _to, image_fit,
                       system_map)
from .poly import Polynomial, divides, exact_div, gcd, resultant, to_string
from .report import CERTIFIED, INCONCLUSIVE, CaseStep
from .surface import Classification, SurfaceInput, cyclide_q, find_rational_points


def conic_forms(fld: Field = QQ) -> tuple[Polynomial, Polynomial]:
    x, y, z, w = Polynomial.gens(4, fld)
    return w, x * x + y * y + z * z


def on_conic(pt) -> bool:
    x, y, z, w = pt
    return w == 0 and x * x + y * y + z * z == 0


def residual_of(Q: Polynomial, S: Polynomial):
    """For Q = lam*K + w*l through the conic: Q2 with S = w^2 Q2 (mod Q), else None."""
    fld = S.field
    w, K = conic_forms(fld)
    q = cyclide_q(S)
    if q is None:
        return None
    cof = ideal_membership_certificate(Q, (w, K), 1)
    if cof is None:
        return None
    lam = cof.get(K)
    lam = lam.terms.get((0, 0, 0, 0), 0) if lam is not None else 0
    if lam == 0:
        return None
    ell = exact_div(Q - K.scale(lam), w)
    # on Q: K = -w l / lam, so K - w^2 = -w (l + lam w) / lam
    m = ell + w.scale(lam)
    Q2 = m * m + q.scale(lam * lam)
    if not divides(Q, S.scale(lam * lam) - w * w * Q2):
        return None
    return Q2


def quadric_candidates(p, fld: Field = QQ, height: int = 2):
    """Quadrics K + w*l through p, l with small integer coefficients, lowest height first."""
    x, y, z, w = Polynomial.gens(4, fld)
    K = x * x + y * y + z * z
    Kp = K.evaluate(p)
    if p[3] == 0:
        return
    target = fld.div(-Kp, p[3])
    gens = [x, y, z, w]
    seen = set()
    for h in range(0, height + 1):
        for coeffs in itertools.product(range(-h, h + 1), repeat=4):
            if max(map(abs, coeffs)) != h or coeffs in seen:
                continue
            seen.add(coeffs)
            if sum(c * v for c, v in zip(coeffs, p)) != target:
                continue
            ell = Polynomial.zero(4, fld)
            for c, g in zip(coeffs, gens):
                if c:
                    ell = ell + g.scale(c)
            yield K + w * ell


def curve_degree_ci(F: Polynomial, G: Polynomial, prime: int, seed: int = 0) -> int:
    """Degree of the curve V(F, G) from a random plane section (resultant degree)."""
    fld = GF(prime)
    rng = random.Random(seed)
    a, b, c = Polynomial.gens(3, fld)
    while True:
        P = [[rng.randrange(prime) for _ in range(4)] for _ in range(3)]
        subs = [a.scale(P[0][i]) + b.scale(P[1][i]) + c.scale(P[2][i]) for i in range(4)]
        f, g = F.to_field(fld).compose(subs), G.to_field(fld).compose(subs)
        if f.degree_in(2) == F.degree() and g.degree_in(2) == G.degree():
            r = resultant(f, g, 2)
            return r.degree() if not r.is_zero() else -1


def linearize_cyclide(inp: SurfaceInput, cls: Classification, opts: PipelineOptions) -> Outcome:
    if cls.point is not None:
        return linearize_cyclide_node(inp, tuple(cls.point), opts)
    return linearize_cyclide_smooth(inp, opts)


def linearize_cyclide_node(inp: SurfaceInput, p, opts: PipelineOptions) -> Outcome:
    S = inp.equation
    fld = S.field
    w, K = conic_forms(fld)
    if not (S.evaluate(p) == 0 and all(S.diff(i).evaluate(p) == 0 for i in range(4))) or on_conic(p):
        raise StepFailed(f"{p} is not a singular point off the conic")
    if inp.residual_quadric is not None:
        Q = inp.residual_quadric
        if Q.evaluate(p) != 0:
            raise StepFailed("the residual quadric hint does not pass through the node")
        candidates = [Q]
        origin = "hint"
    else:
        candidates = list(quadric_candidates(p, fld))
        origin = "lowest-height quadric through the conic and the node"
    notes = []
    for Q in candidates:
        Q2 = residual_of(Q, S)
        if Q2 is None or not gcd(Q, Q2).is_constant():
            if origin == "hint":
                raise StepFailed("the residual quadric hint does not contain the conic "
                                 "or does not cut a residual curve")
            continue
        try:
            out = _node_system(inp, p, Q, Q2, opts)
        except StepFailed as exc:
            notes.append(f"quadric {Q}: {exc}")
            if origin == "hint":
                raise
            continue
        names = list(inp.variables)
        out.steps[0].checks["residual_quadric"] = {"Q": to_string(Q, names), "Q2": to_string(Q2, names),
                                                   "origin": origin}
        out.notes = notes + out.notes
        return out
    return Outcome([], {}, INCONCLUSIVE, notes + ["no quadric through the conic and the node worked"])


def _node_system(inp: SurfaceInput, p, Q, Q2, opts: PipelineOptions) -> Outcome:
    S = inp.equation
    fld = S.field
    w, K = conic_forms(fld)

    def avoid(pt):
        return on_conic(pt) or tuple(pt) == tuple(p) or (Q.evaluate(pt) == 0 and Q2.evaluate(pt) == 0)

    q_pt = None
    for pt in inp.general_points:
        pt = tuple(fld(v) for v in pt)
        if not avoid(pt):
            q_pt = pt
            break
    if q_pt is None and not fld.p:
        found = find_rational_points(S, 1, opts.search_bound + 1, avoid=lambda pt: avoid(pt)
                                     or _proportional(pt, p))
        q_pt = found[0] if found else None
    if q_pt is None:
        raise StepFailed("no rational point of S off the conic, the node and R; supply general_points")
    checks: dict = {"node": p, "general_point": q_pt,
                    "residual_curve_degree": curve_degree_ci(Q, Q2, opts.prime, opts.seed)}
    if checks["residual_curve_degree"] != 4:
        raise StepFailed(f"residual curve has degree {checks['residual_curve_degree']}, expected 4")
    conds = [IdealMembership((w, K), 2), PointMultiplicity(p, 2), IdealMembership((Q, Q2), 1),
             PointMultiplicity(q_pt, 1)]
    system = solve_system(4, 4, conds, fld)
    checks["projective_dim"] = system.projective_dim
    if len(system.basis) != 4:
        raise StepFailed(f"quartic system has projective dimension {system.projective_dim}, expected 3")
    f = system_map(system, "quartics double along the conic and the node, through R and a point")
    cert = birationality_certificate(f, trials=max(opts.trials, 500), seed=opts.seed, prime=opts.prime,
                                     fit_inverse=False)
    checks["injectivity"] = cert
    if cert.verdict == "inconclusive":
        raise StepFailed("quartic map failed the injectivity certificate")
    checks["image"] = image_fit(f, S, opts, 1, salt=1, max_points=None, held_out=100)
    if fld.p:
        plane = checks["image"]["fitted_forms"][0]
    else:
        forms = exact_image_forms(f, S, 1, opts.seed)
        if not forms:
            raise StepFailed("no exact plane contains the image of S")
        plane = forms[0]
        checks["exact_image"] = {"form": plane, "certified_by": "S divides the pullback"}
    step = CaseStep("quartics through C^2, p^2, R and a point", f, checks, 4, list(inp.variables),
                    field_mode=_mode_name(fld))
    out = Outcome([step], {"kind": "plane", "plane_form": plane}, CERTIFIED)
    return _finish(S, out, opts)


def _proportional(a, b) -> bool:
    return all(a[i] * b[j] == a[j] * b[i] for i in range(4) for j in range(i + 1, 4))


def cone_over_conic(p, fld: Field) -> Polynomial:
    """The cone over the conic with vertex p (p off the plane w = 0)."""
    x, y, z, w = Polynomial.gens(4, fld)
    pw = fld(p[3])
    if pw == 0:
        raise StepFailed("the vertex lies on the plane of the conic")
    proj = [x.scale(pw) - w.scale(fld(p[0])), y.scale(pw) - w.scale(fld(p[1])),
            z.scale(pw) - w.scale(fld(p[2]))]
    return proj[0] * proj[0] + proj[1] * proj[1] + proj[2] * proj[2]


def linearize_cyclide_smooth(inp: SurfaceInput, opts: PipelineOptions) -> Outcome:
    """Sextic construction; needs a rational quartic curve on S (hint ``gamma``)."""
    gamma = inp.gamma
    if gamma is None:
        return Outcome([], {}, INCONCLUSIVE, [
            "no node off the conic and no rational quartic curve on S supplied; whether every "
            "such cyclide carries a real rational quartic curve is not known, so none is guessed"])
    if gamma.degree != 4:
        raise StepFailed("the curve hint must be a rational quartic")
    p = opts.prime
    fld = GF(p)
    S = _to(fld, inp.equation)
    w, K = conic_forms(fld)
    gam = _to(fld, gamma)
    # a general point of the curve, off the conic and off the plane w = 0
    rng = random.Random(opts.seed)
    for _ in range(100):
        t = rng.randrange(p)
        pt = gam.point(1, t)
        if any(pt) and pt[3] != 0:
            break
    else:
        raise StepFailed("could not pick a point of the curve off the plane of the conic")
    from .maps import normalize_point
    p0 = normalize_point(pt, fld)
    checks: dict = {"curve_point": p0}
    sigma = solve_system(4, 6, [IdealMembership((w, K), 3), PointMultiplicity(p0, 3),
                                CurveMultiplicity(gam, 1)], fld)
    checks["sigma_projective_dim"] = sigma.projective_dim
    if len(sigma.basis) < 2:
        raise StepFailed("the sextic system through the curve is too small")
    D = Polynomial.zero(4, fld)
    for g in sigma.basis:
        D = D + g.scale(rng.randrange(1, p))
    cubics = solve_system(4, 3, [CurveMultiplicity(gam, 1)], fld).basis

    def avoid(q):
        return on_conic(q) or all(c.evaluate(q) == 0 for c in cubics) or q == p0

    npts = 2 * 8 * 6 + 1 + 10
    try:
        rpts = curve_points(S, D, p, npts, opts.seed + 5, avoid)
    except SamplingError as exc:
        raise StepFailed(f"residual curve sampling failed: {exc}") from exc
    lam = solve_system(4, 6, [IdealMembership((w, K), 3), PointMultiplicity(p0, 3),
                              CurveThroughSamples(tuple(rpts), 8)], fld)
    checks["projective_dim"] = lam.projective_dim
    checks["residual_samples"] = len(rpts)
    E = cone_over_conic(p0, fld)
    checks["cone_plus_surface_in_system"] = span_contains(lam.basis, E * S)
    if not checks["cone_plus_surface_in_system"]:
        raise StepFailed("E + S is not in the sextic system")
    if len(lam.basis) != 4:
        raise StepFailed(f"sextic system has projective dimension {lam.projective_dim}, expected 3")
    f = system_map(lam, "sextics through C^3, p^3 and the residual curve")
    cert = birationality_certificate(f, trials=opts.trials, seed=opts.seed, prime=p, fit_inverse=False)
    checks["injectivity"] = cert
    if cert.verdict == "inconclusive":
        raise StepFailed("sextic map failed the injectivity certificate")
    checks["image"] = image_fit(f, S, opts, 1, salt=1)
    plane = checks["image"]["fitted_forms"][0]
    e_pts = sample_surface_points(E, p, 20, opts.seed + 17, avoid=on_conic).points
    ranks = []
    for q in e_pts:
        if apply_map(f, q) is BASE_POINT:
            continue
        ranks.append(jacobian_rank(f.forms, q, p, tangent_basis(E, q, p)))
    checks["cone_image_rank"] = max(ranks) if ranks else None
    if not ranks or max(ranks) > 2:
        raise StepFailed("the cone over the conic is not contracted")
    step = CaseStep("sextics through C^3, p^3 and the residual curve", f, checks, 6,
                    list(inp.variables), field_mode="certificate-F_p")
    out = Outcome([step], {"kind": "plane", "plane_form": plane}, CERTIFIED)
    return _finish(S, out, opts)

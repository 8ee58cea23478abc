"""Elliptic-point and double-line chains, with a brute-force Veronese-cone oracle."""

import random
from fractions import Fraction

from cremona.elliptic import build_lambda_a, relation_count, space_images
from cremona.field import QQ
from cremona.linsys import CurveParam
from cremona.matrix import rank
from cremona.parser import parse_polynomial
from cremona.pipeline import run_pipeline, system_map
from cremona.poly import Polynomial, monomials_of_degree
from cremona.report import CERTIFIED_BY_THRESHOLD, INCONCLUSIVE
from cremona.surface import SurfaceInput

V = ["x0", "x1", "x2", "x3"]
P = 10007
TYPE1 = "x0^2*x1^2 + x0*x1*x2*x3 + x2^4 + x3^4 + x1^2*x2*x3"
TYPE2 = "x0^2*x1^2 + x0*(x2^3 + x1*x2*x3) + x2^4 + x3^4 + x1^2*x2*x3"


def veronese_cone_quadric_relations() -> int:
    """Exact count: quadrics in y_ij (i <= j < 3) and t vanishing on (u_i u_j, t)."""
    u = Polynomial.gens(4)  # u0, u1, u2, t
    coords = [u[i] * u[j] for i in range(3) for j in range(i, 3)] + [u[3]]
    images = []
    for e in monomials_of_degree(7, 2):
        m = Polynomial.constant(1, 4)
        for c, k in zip(coords, e):
            if k:
                m = m * c ** k
        images.append(m)
    support = sorted({e for m in images for e in m.terms})
    rows = [[m.terms.get(e, 0) for e in support] for m in images]
    return len(images) - rank(rows, len(support), QQ)


def test_veronese_cone_oracle():
    assert veronese_cone_quadric_relations() == 6


def test_lambda_one():
    S = parse_polynomial(TYPE1, V)
    system, info = build_lambda_a(S, 1, QQ)
    assert len(system.basis) == 7 and system.verify()
    assert tuple(info["weights"]) == (2, 1, 1)
    pts = space_images(system_map(system, "lambda1"), P, 120, 4)
    assert len(relation_count(pts, 7, 2, P)) == veronese_cone_quadric_relations()


def test_type1_chain():
    rep = run_pipeline(SurfaceInput(parse_polynomial(TYPE1, V)))
    assert rep.status == CERTIFIED_BY_THRESHOLD
    degrees = [s.checks.get("surface_degree") for s in rep.steps]
    assert degrees[:4] == [8, 6, 5, 4]
    assert rep.steps[2].checks["quadric_rank"] == 4 and rep.steps[2].target_dim == 4
    assert rep.steps[3].checks["double_lines"] == 1
    assert "degree ledger 6 -> 5 -> 4" in rep.notes
    assert rep.final["model"] == "p1xp2" and list(rep.final["class"]) == [3, 2]


def test_type2_reports_the_open_step():
    rep = run_pipeline(SurfaceInput(parse_polynomial(TYPE2, V)))
    assert rep.status == INCONCLUSIVE
    assert any("type (2) weights" in n for n in rep.notes)


def _double_line_surface(seed):
    rng = random.Random(seed)
    x = Polynomial.gens(4)

    def rq():
        return Polynomial({m: rng.randint(-3, 3) for m in monomials_of_degree(4, 2)}, 4)
    return x[2] * x[2] * rq() + x[2] * x[3] * rq() + x[3] * x[3] * rq()


def test_double_line_chain():
    line = CurveParam.line((1, 0, 0, 0), (0, 1, 0, 0))
    rep = run_pipeline(SurfaceInput(_double_line_surface(1), singular_curves=[line]))
    assert rep.status == CERTIFIED_BY_THRESHOLD
    c = rep.steps[0].checks
    assert c["quadrics_through_line"] == 7 and c["quadrics_through_line_and_point"] == 6
    assert c["threefold_quadric_relations"] == 3
    assert c["surface_degree"] == 7 and c["degree_probes"] == [7] * 10
    assert rep.final["certificate"].rho == Fraction(2, 3)

"""Shared surface generators."""

import random

from cremona.field import QQ
from cremona.matrix import inverse
from cremona.poly import Polynomial, monomials_of_degree
from cremona.surface import cone_vertex, has_repeated_factor, multiplicity_at


def _form_in_last3(rng, deg):
    mons = [(0,) + m for m in monomials_of_degree(3, deg)]
    return Polynomial({m: rng.randint(-3, 3) for m in mons}, 4)


def _unimodular(rng):
    """Random integer matrix of determinant 1 (product of elementary moves)."""
    A = [[int(i == j) for j in range(4)] for i in range(4)]
    for _ in range(6):
        i, j = rng.sample(range(4), 2)
        c = rng.choice([-1, 1, 2])
        A = [row[:] for row in A]
        for k in range(4):
            A[i][k] += c * A[j][k]
    return A


def random_monoid(seed: int, degree: int):
    """(S, point): S has a rational point of multiplicity degree - 1, hidden by a coordinate change."""
    rng = random.Random(seed)
    x0 = Polynomial.var(0, 4)
    while True:
        F = _form_in_last3(rng, degree - 1)
        G = _form_in_last3(rng, degree)
        if F.is_zero() or G.is_zero():
            continue
        S0 = x0 * F + G
        A = _unimodular(rng)
        S = S0.linear_substitute(A)
        if has_repeated_factor(S) or cone_vertex(S) is not None:
            continue
        Ainv = inverse(A, QQ)
        pt = tuple(QQ(row[0]) for row in Ainv)
        assert multiplicity_at(S, pt) == degree - 1
        return S, pt


MONOID_CASES = [(1000 + k, 2 + k % 3) for k in range(20)]


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])

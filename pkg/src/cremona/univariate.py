"""Dense univariate polynomials over GF(p) and root finding.

Coefficient lists are little-endian: ``[a0, a1, ..., an]`` is
``a0 + a1 x + ... + an x^n``; the zero polynomial is ``[]``.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .field import LIFT_PRIME, GF, QQ, rational_reconstruction
from .poly import Polynomial, PolynomialError


def trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def add(a, b, p):
    n = max(len(a), len(b))
    return trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def sub(a, b, p):
    n = max(len(a), len(b))
    return trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim([v % p for v in out])


def divmod_(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    inv = pow(b[-1], -1, p)
    db = len(b) - 1
    if len(a) - 1 < db:
        return [], trim(a)
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1 - db, -1, -1):
        c = a[k + db] * inv % p
        q[k] = c
        if c:
            for j in range(db + 1):
                a[k + j] = (a[k + j] - c * b[j]) % p
    return trim(q), trim(a[:db])


def monic(a, p):
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [v * inv % p for v in a]


def gcd(a, b, p):
    a, b = trim(list(a)), trim(list(b))
    while b:
        a, b = b, divmod_(a, b, p)[1]
    return monic(a, p)


def powmod(base, e, mod, p):
    result = [1]
    base = divmod_(base, mod, p)[1]
    while e:
        if e & 1:
            result = divmod_(mul(result, base, p), mod, p)[1]
        e >>= 1
        if e:
            base = divmod_(mul(base, base, p), mod, p)[1]
    return result


def evaluate(a, x, p):
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


def derivative(a, p):
    return trim([(i * c) % p for i, c in enumerate(a)][1:])


def _as_coeffs(f, p):
    if isinstance(f, Polynomial):
        if f.nvars != 1:
            raise PolynomialError("expected a univariate polynomial")
        if f.field.p is None:
            f = f.to_field(GF(p))
        elif f.field.p != p:
            raise PolynomialError("polynomial lives over a different prime field")
        coeffs = [0] * (f.degree() + 1)
        for (k,), c in f.terms.items():
            coeffs[k] = c
        return trim(coeffs)
    return trim([int(c) % p for c in f])


def roots_mod_p(f, p: int, seed: int = 0) -> list[int]:
    """Distinct roots in GF(p) of a nonzero univariate polynomial, sorted.

    Splits gcd(f, x^p - x) by Cantor-Zassenhaus with a seeded RNG.
    """
    a = _as_coeffs(f, p)
    if not a:
        raise PolynomialError("the zero polynomial has every element as a root")
    if len(a) == 1:
        return []
    xp = powmod([0, 1], p, a, p)
    g = gcd(a, sub(xp, [0, 1], p), p)
    rng = random.Random(seed)
    out: list[int] = []
    _split_linear(g, p, rng, out)
    return sorted(out)


def _split_linear(g, p, rng, out):
    deg = len(g) - 1
    if deg <= 0:
        return
    if deg == 1:
        out.append((-g[0]) * pow(g[1], -1, p) % p)
        return
    while True:
        shift = rng.randrange(p)
        h = powmod([shift, 1], (p - 1) // 2, g, p)
        d = gcd(g, sub(h, [1], p), p)
        if 0 < len(d) - 1 < deg:
            _split_linear(d, p, rng, out)
            _split_linear(divmod_(g, d, p)[0], p, rng, out)
            return


def roots_exhaustive(f, p: int) -> list[int]:
    a = _as_coeffs(f, p)
    if not a:
        raise PolynomialError("the zero polynomial has every element as a root")
    return [x for x in range(p) if evaluate(a, x, p) == 0]


def roots_with_multiplicity(f, p: int, seed: int = 0) -> dict[int, int]:
    a = _as_coeffs(f, p)
    out = {}
    for r in roots_mod_p(a, p, seed):
        m = 0
        cur = a
        while cur:
            q, rem = divmod_(cur, [(-r) % p, 1], p)
            if rem:
                break
            m += 1
            cur = q
        out[r] = m
    return out


def rational_roots(coeffs: Sequence, seed: int = 0) -> list[Fraction]:
    """Rational roots of a univariate polynomial with rational coefficients.

    Roots modulo a 61-bit prime are lifted by rational reconstruction and kept
    only if they are exact roots, so numerators and denominators are limited to
    about 2^30.
    """
    c = [QQ(v) for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    if not c:
        raise PolynomialError("the zero polynomial has every element as a root")
    out = []
    shift = 0
    while c and c[0] == 0:
        c.pop(0)
        shift += 1
    if shift:
        out.append(Fraction(0))
    if len(c) <= 1:
        return out
    p = LIFT_PRIME
    fld = GF(p)
    try:
        modp = [fld(v) for v in c]
    except Exception:
        return out
    if modp[-1] == 0:
        return out
    for r in roots_mod_p(modp, p, seed):
        q = rational_reconstruction(r, p)
        if q is None:
            continue
        val = 0
        for coef in reversed(c):
            val = val * q + coef
        if val == 0:
            out.append(q)
    return sorted(set(out))


def resultant(a, b, p: int) -> int:
    """Resultant of two nonzero polynomials over GF(p) by the Euclidean recurrence."""
    a, b = trim([v % p for v in a]), trim([v % p for v in b])
    if not a or not b:
        return 0
    res = 1
    while True:
        m, n = len(a) - 1, len(b) - 1
        if n == 0:
            return res * pow(b[0], m, p) % p
        r = divmod_(a, b, p)[1]
        if not r:
            return 0
        if (m * n) % 2:
            res = -res
        res = res * pow(b[-1], m - (len(r) - 1), p) % p
        a, b = b, r


def interpolate(xs: Sequence[int], ys: Sequence[int], p: int) -> list:
    """Coefficients of the polynomial of degree < len(xs) through the points (Newton form)."""
    n = len(xs)
    coef = [y % p for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            den = (xs[i] - xs[i - j]) % p
            coef[i] = (coef[i] - coef[i - 1]) * pow(den, -1, p) % p
    out = [0]
    for i in range(n - 1, -1, -1):
        # out = out * (x - xs[i]) + coef[i]
        shifted = [0] + out
        for k in range(len(out)):
            shifted[k] = (shifted[k] - xs[i] * out[k]) % p
        shifted[0] = (shifted[0] + coef[i]) % p
        out = shifted
    return trim(out)

"""Sparse multivariate polynomials over QQ or GF(p).

A polynomial is a map from exponent tuples to nonzero field elements. Term
order is graded lexicographic with ``x0 > x1 > ...``.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

from .field import QQ, Field, FieldError


class PolynomialError(ValueError):
    pass


def monomial_key(exps: tuple) -> tuple:
    return (sum(exps), exps)


def monomials_of_degree(nvars: int, degree: int) -> list[tuple]:
    """All exponent tuples of total degree ``degree``, in decreasing grlex order."""
    if degree < 0:
        raise PolynomialError("degree must be non-negative")
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(key=monomial_key, reverse=True)
    return out


class Polynomial:
    __slots__ = ("terms", "nvars", "field", "_hash")

    def __init__(self, terms: dict | None = None, nvars: int = 1, field: Field = QQ, *, _clean=True):
        self.nvars = nvars
        self.field = field
        self._hash = None
        if not terms:
            self.terms = {}
            return
        if _clean:
            conv = field
            clean = {}
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nvars:
                    raise PolynomialError(f"exponent {e} has wrong arity for {nvars} variables")
                c = conv(c)
                if c != 0:
                    clean[e] = c
            self.terms = clean
        else:
            self.terms = terms

    # constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int, field: Field = QQ) -> "Polynomial":
        return cls({}, nvars, field)

    @classmethod
    def constant(cls, c, nvars: int, field: Field = QQ) -> "Polynomial":
        return cls({(0,) * nvars: c}, nvars, field)

    @classmethod
    def var(cls, i: int, nvars: int, field: Field = QQ) -> "Polynomial":
        if not 0 <= i < nvars:
            raise PolynomialError(f"variable index {i} out of range")
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): 1}, nvars, field)

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1, field: Field = QQ) -> "Polynomial":
        return cls({tuple(exps): c}, len(exps), field)

    @classmethod
    def gens(cls, nvars: int, field: Field = QQ) -> list["Polynomial"]:
        return [cls.var(i, nvars, field) for i in range(nvars)]

    def _new(self, terms: dict) -> "Polynomial":
        return Polynomial(terms, self.nvars, self.field, _clean=False)

    # basic queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, i: int) -> int:
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def leading_monomial(self) -> tuple:
        if not self.terms:
            raise PolynomialError("zero polynomial has no leading term")
        return max(self.terms, key=monomial_key)

    def leading_coefficient(self):
        return self.terms[self.leading_monomial()]

    def coefficient(self, exps: Sequence[int]):
        return self.terms.get(tuple(exps), 0)

    def variables(self) -> set[int]:
        used = set()
        for e in self.terms:
            used.update(i for i, k in enumerate(e) if k)
        return used

    # arithmetic ---------------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.nvars != other.nvars:
            raise PolynomialError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
        if self.field != other.field:
            raise PolynomialError(f"field mismatch: {self.field} vs {other.field}")

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Polynomial.constant(other, self.nvars, self.field)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        p = self.field.p
        for e, c in other.terms.items():
            v = terms.get(e, 0) + c
            if p:
                v %= p
            if v:
                terms[e] = v
            else:
                terms.pop(e, None)
        return self._new(terms)

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        if p:
            return self._new({e: p - c for e, c in self.terms.items()})
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(self.terms) < len(other.terms):
            a, b = self.terms, other.terms
        else:
            a, b = other.terms, self.terms
        p = self.field.p
        # pack exponent vectors into integers so that a monomial product is one addition
        n = self.nvars
        base = max((sum(e) for e in a), default=0) + max((sum(e) for e in b), default=0) + 1
        weights = [base ** i for i in range(n)]

        def pack(terms):
            return [(sum(k * w for k, w in zip(e, weights)), c) for e, c in terms.items()]
        packed: dict = {}
        get = packed.get
        pb = pack(b)
        for ka, ca in pack(a):
            for kb, cb in pb:
                k = ka + kb
                packed[k] = get(k, 0) + ca * cb
        out = {}
        for k, c in packed.items():
            e = []
            for _ in range(n):
                k, r = divmod(k, base)
                e.append(r)
            out[tuple(e)] = c
        if p:
            out = {e: c % p for e, c in out.items() if c % p}
        else:
            out = {e: (c.numerator if isinstance(c, Fraction) and c.denominator == 1 else c)
                   for e, c in out.items() if c}
        return self._new(out)

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        c = self.field(c)
        if c == 0:
            return self._new({})
        p = self.field.p
        if p:
            return self._new({e: v * c % p for e, v in self.terms.items()})
        return self._new({e: QQ(v * c) for e, v in self.terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise PolynomialError("exponent must be a non-negative integer")
        result = Polynomial.constant(1, self.nvars, self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = Polynomial.constant(other, self.nvars, self.field)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (self.nvars == other.nvars and self.field == other.field
                and self.terms == other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self.field, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({to_string(self)!r}, nvars={self.nvars}, field={self.field})"

    def __str__(self):
        return to_string(self)

    # calculus and evaluation -------------------------------------------------------

    def diff(self, i: int) -> "Polynomial":
        if not 0 <= i < self.nvars:
            raise PolynomialError(f"variable index {i} out of range")
        p = self.field.p
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                v = c * k
                if p:
                    v %= p
                    if not v:
                        continue
                ne = list(e)
                ne[i] = k - 1
                out[tuple(ne)] = v
        return self._new(out)

    def diff_multi(self, alpha: Sequence[int]) -> "Polynomial":
        f = self
        for i, k in enumerate(alpha):
            for _ in range(k):
                f = f.diff(i)
        return f

    def __call__(self, *point):
        return self.evaluate(point)

    def evaluate(self, point: Sequence):
        if len(point) != self.nvars:
            raise PolynomialError(f"point has {len(point)} coordinates, expected {self.nvars}")
        fld = self.field
        pt = [fld(v) for v in point]
        p = fld.p
        powers = [dict() for _ in pt]
        total = 0
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    cache = powers[i]
                    v = cache.get(k)
                    if v is None:
                        v = pow(pt[i], k, p) if p else pt[i] ** k
                        cache[k] = v
                    term = term * v
                    if p:
                        term %= p
            total += term
        if p:
            return total % p
        return fld(total)

    def compose(self, subs: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute ``subs[i]`` for variable ``i``; all substitutes share a ring."""
        return compose_all([self], subs)[0]

    def linear_substitute(self, matrix: Sequence[Sequence]) -> "Polynomial":
        """Return f(A x), where row i of ``matrix`` gives the new x_i."""
        gens = Polynomial.gens(self.nvars, self.field)
        subs = []
        for row in matrix:
            acc = Polynomial.zero(self.nvars, self.field)
            for j, a in enumerate(row):
                if a:
                    acc = acc + gens[j].scale(a)
            subs.append(acc)
        return self.compose(subs)

    def to_field(self, field: Field) -> "Polynomial":
        return Polynomial({e: field(c) for e, c in self.terms.items()}, self.nvars, field)

    def extend(self, nvars: int, positions: Sequence[int] | None = None) -> "Polynomial":
        """Embed into a ring with ``nvars`` variables; variable i goes to positions[i]."""
        if positions is None:
            positions = range(self.nvars)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for i, k in zip(positions, e):
                ne[i] += k
            out[tuple(ne)] = c
        return Polynomial(out, nvars, self.field, _clean=False)

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        return self.scale(self.field.inv(self.leading_coefficient()))

    def content_integer(self) -> "Polynomial":
        """Over QQ: scale to a primitive integer polynomial with positive leading coefficient."""
        if self.field.p or not self.terms:
            return self.monic()
        import math
        dens = 1
        for c in self.terms.values():
            if isinstance(c, Fraction):
                dens = dens * c.denominator // math.gcd(dens, c.denominator)
        ints = [int(c * dens) for c in self.terms.values()]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        f = self.scale(Fraction(dens, g))
        if f.leading_coefficient() < 0:
            f = -f
        return f

    def homogeneous_part(self, d: int) -> "Polynomial":
        return self._new({e: c for e, c in self.terms.items() if sum(e) == d})


# ---------------------------------------------------------------------------
# division, gcd, resultants


def divmod_poly(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Multivariate division by a single divisor in grlex order.

    The remainder is zero iff ``b`` divides ``a``.
    """
    a._check(b)
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    fld = a.field
    p = fld.p
    lm = b.leading_monomial()
    lc_inv = fld.inv(b.terms[lm])
    rest = [(e, c) for e, c in b.terms.items() if e != lm]
    work = dict(a.terms)
    heap = [(-sum(e), tuple(-x for x in e)) for e in work]
    heapq.heapify(heap)
    quot: dict = {}
    rem: dict = {}
    while heap:
        _, neg = heapq.heappop(heap)
        e = tuple(-x for x in neg)
        c = work.pop(e, 0)
        if not c:
            continue  # stale heap entry
        if all(x >= y for x, y in zip(e, lm)):
            shift = tuple(x - y for x, y in zip(e, lm))
            q = c * lc_inv
            q = q % p if p else fld(q)
            quot[shift] = q
            for be, bc in rest:
                ne = tuple(x + y for x, y in zip(be, shift))
                old = work.get(ne, 0)
                v = old - q * bc
                if p:
                    v %= p
                if v:
                    work[ne] = v if p else fld(v)
                    if not old:
                        heapq.heappush(heap, (-sum(ne), tuple(-x for x in ne)))
                else:
                    work.pop(ne, None)
        else:
            rem[e] = c
    return (Polynomial(quot, a.nvars, fld, _clean=False),
            Polynomial(rem, a.nvars, fld, _clean=False))


def exact_div(a: Polynomial, b: Polynomial) -> Polynomial:
    q, r = divmod_poly(a, b)
    if r:
        raise PolynomialError("division is not exact")
    return q


def divides(b: Polynomial, a: Polynomial) -> bool:
    return divmod_poly(a, b)[1].is_zero()


def _split(f: Polynomial, v: int) -> dict[int, Polynomial]:
    """View f as a polynomial in x_v with coefficients free of x_v."""
    parts: dict[int, dict] = {}
    for e, c in f.terms.items():
        k = e[v]
        ne = e[:v] + (0,) + e[v + 1:]
        parts.setdefault(k, {})[ne] = c
    return {k: Polynomial(t, f.nvars, f.field, _clean=False) for k, t in parts.items()}


def _join(parts: dict[int, Polynomial], v: int, nvars: int, field: Field) -> Polynomial:
    out = {}
    for k, poly in parts.items():
        for e, c in poly.terms.items():
            out[e[:v] + (k,) + e[v + 1:]] = c
    return Polynomial(out, nvars, field, _clean=False)


def _monomial_gcd(m: Polynomial, f: Polynomial) -> Polynomial:
    (me,) = m.terms
    low = list(me)
    for e in f.terms:
        low = [min(x, y) for x, y in zip(low, e)]
    return Polynomial({tuple(low): 1}, f.nvars, f.field)


def _content(f: Polynomial, v: int) -> Polynomial:
    g = None
    for coeff in sorted(_split(f, v).values(), key=len):
        g = coeff if g is None else _gcd2(g, coeff)
        if g.is_constant():
            break
    return g.monic()


def _gcd2(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_constant() or b.is_constant():
        return Polynomial.constant(1, a.nvars, a.field)
    if len(a.terms) == 1:
        return _monomial_gcd(a, b)
    if len(b.terms) == 1:
        return _monomial_gcd(b, a)
    va, vb = a.variables(), b.variables()
    # a variable present in only one argument: gcd lies in its coefficients
    for v in sorted(va ^ vb):
        if v in va:
            return _gcd2(_content(a, v), b)
        return _gcd2(a, _content(b, v))
    v = max(va, key=lambda i: (min(a.degree_in(i), b.degree_in(i)) > 0, -a.degree_in(i)))
    ca, cb = _content(a, v), _content(b, v)
    cg = _gcd2(ca, cb)
    pa, pb = exact_div(a, ca), exact_div(b, cb)
    if pa.degree_in(v) < pb.degree_in(v):
        pa, pb = pb, pa
    while not pb.is_zero() and pb.degree_in(v) > 0:
        r = _prem(pa, pb, v)
        pa, pb = pb, (r if r.is_zero() else exact_div(r, _content(r, v)))
    g = pa if pb.is_zero() else Polynomial.constant(1, a.nvars, a.field)
    if g.degree_in(v) > 0:
        g = exact_div(g, _content(g, v))
    return (g * cg).monic()


def _prem(a: Polynomial, b: Polynomial, v: int) -> Polynomial:
    db = b.degree_in(v)
    bparts = _split(b, v)
    lcb = bparts[db]
    tail = _join({k: c for k, c in bparts.items() if k != db}, v, b.nvars, b.field)
    r = a
    while not r.is_zero() and r.degree_in(v) >= db:
        rparts = _split(r, v)
        dr = r.degree_in(v)
        lcr = rparts.pop(dr)
        shift = [0] * r.nvars
        shift[v] = dr - db
        xk = Polynomial({tuple(shift): 1}, r.nvars, r.field)
        r = _join(rparts, v, r.nvars, r.field) * lcb - lcr * tail * xk
    return r


def gcd(*polys: Polynomial) -> Polynomial:
    """Monic greatest common divisor of one or more polynomials."""
    if len(polys) == 1 and not isinstance(polys[0], Polynomial):
        polys = tuple(polys[0])
    if not polys:
        raise PolynomialError("gcd of an empty list")
    nonzero = [f for f in polys if not f.is_zero()]
    if not nonzero:
        raise PolynomialError("gcd of all-zero input")
    nonzero.sort(key=lambda f: (f.degree(), len(f)))
    g = nonzero[0].monic()
    pair = _gcd2 if g.field.p else _gcd_rational
    for f in nonzero[1:]:
        if g.is_constant():
            break
        g = pair(g, f)
    return g


_GCD_PRIMES = []


def _gcd_primes():
    if not _GCD_PRIMES:
        from .field import _is_probable_prime
        n = (1 << 61) - 1
        while len(_GCD_PRIMES) < 12:
            if _is_probable_prime(n):
                _GCD_PRIMES.append(n)
            n -= 2
    return _GCD_PRIMES


def _gcd_rational(a: Polynomial, b: Polynomial) -> Polynomial:
    """gcd over QQ by images modulo large primes, CRT and rational reconstruction.

    Every candidate is confirmed by exact division, so unlucky primes can only
    cost time; after the prime budget the classical recursion is used.
    """
    from .field import GF, rational_reconstruction
    if a.is_zero() or b.is_zero() or a.is_constant() or b.is_constant() \
            or len(a.terms) == 1 or len(b.terms) == 1:
        return _gcd2(a, b)
    best_lm = None
    modulus = 1
    residues: dict = {}
    for p in _gcd_primes():
        fld = GF(p)
        try:
            ap, bp = a.to_field(fld), b.to_field(fld)
        except FieldError:
            continue
        if ap.leading_monomial() != a.leading_monomial() or bp.leading_monomial() != b.leading_monomial():
            continue
        gp = _gcd2(ap, bp)
        lm = monomial_key(gp.leading_monomial())
        if gp.is_constant():
            return Polynomial.constant(1, a.nvars, a.field)
        if best_lm is not None and lm > best_lm:
            continue  # unlucky prime: its gcd image is too large
        if best_lm is None or lm < best_lm or set(gp.terms) != set(residues):
            best_lm, modulus, residues = lm, 1, {e: 0 for e in gp.terms}
        for e, c in gp.terms.items():
            r = residues[e]
            # CRT: combine r mod modulus with c mod p
            t = (c - r) * pow(modulus, -1, p) % p
            residues[e] = r + modulus * t
        modulus *= p
        cand = {}
        for e, r in residues.items():
            q = rational_reconstruction(r, modulus)
            if q is None:
                break
            cand[e] = q
        else:
            g = Polynomial(cand, a.nvars, QQ)
            if divides(g, a) and divides(g, b):
                return g.monic()
    return _gcd2(a, b)


def resultant(f: Polynomial, g: Polynomial, v: int) -> Polynomial:
    """Sylvester resultant with respect to x_v.

    Convention: determinant of the Sylvester matrix whose first deg_v(g) rows
    hold the shifted coefficients of f (leading coefficient first) and whose
    last deg_v(f) rows hold those of g. With this convention
    ``Res(x - a, x - b) = a - b`` and ``Res(x^2 + b x + c, 2x + b) = 4c - b^2``.
    """
    f._check(g)
    m, n = f.degree_in(v), g.degree_in(v)
    if m <= 0 or n <= 0:
        raise PolynomialError("resultant needs positive degree in the eliminated variable")
    zero = Polynomial.zero(f.nvars, f.field)
    fp, gp = _split(f, v), _split(g, v)
    fc = [fp.get(m - i, zero) for i in range(m + 1)]
    gc = [gp.get(n - i, zero) for i in range(n + 1)]
    size = m + n
    rows = []
    for i in range(n):
        rows.append([zero] * i + fc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + gc + [zero] * (size - n - 1 - i))
    return _bareiss_det(rows)


def _bareiss_det(rows: list[list[Polynomial]]) -> Polynomial:
    n = len(rows)
    a = [list(r) for r in rows]
    one = Polynomial.constant(1, a[0][0].nvars, a[0][0].field)
    sign = 1
    prev = one
    for k in range(n - 1):
        if a[k][k].is_zero():
            for i in range(k + 1, n):
                if not a[i][k].is_zero():
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return one - one
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = exact_div(num, prev) if not num.is_zero() else num
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign == 1 else -det


# ---------------------------------------------------------------------------
# formatting


def _fmt_coeff(c, field: Field) -> str:
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def to_string(f: Polynomial, names: Sequence[str] | None = None) -> str:
    """Canonical expression string, re-parseable by :mod:`cremona.parser`."""
    if names is None:
        names = [f"x{i}" for i in range(f.nvars)]
    if not f.terms:
        return "0"
    pieces = []
    for e in sorted(f.terms, key=monomial_key, reverse=True):
        c = f.terms[e]
        neg = (not f.field.p) and c < 0
        mag = -c if neg else c
        factors = []
        for i, k in enumerate(e):
            if k == 1:
                factors.append(names[i])
            elif k > 1:
                factors.append(f"{names[i]}^{k}")
        if mag != 1 or not factors:
            factors.insert(0, _fmt_coeff(mag, f.field))
        body = "*".join(factors)
        if not pieces:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(pieces)


def coefficient_vector(f: Polynomial, basis: Sequence[tuple]) -> list:
    return [f.terms.get(m, 0) for m in basis]


def from_coefficients(coeffs: Iterable, basis: Sequence[tuple], field: Field = QQ) -> Polynomial:
    basis = list(basis)
    nvars = len(basis[0]) if basis else 0
    return Polynomial({m: c for m, c in zip(basis, coeffs) if c}, nvars, field)


def check_same_ring(polys: Sequence[Polynomial]):
    if not polys:
        raise PolynomialError("empty polynomial list")
    for f in polys[1:]:
        polys[0]._check(f)
    return polys[0].nvars, polys[0].field


__all__ = [
    "Polynomial", "PolynomialError", "FieldError", "monomial_key", "monomials_of_degree",
    "divmod_poly", "exact_div", "divides", "gcd", "resultant", "to_string",
    "coefficient_vector", "from_coefficients",
]


def compose_all(polys: Sequence[Polynomial], subs: Sequence[Polynomial]) -> list[Polynomial]:
    """``[f.compose(subs) for f in polys]`` with one cache of powers and partial products."""
    nvars = polys[0].nvars if polys else len(subs)
    if len(subs) != nvars or any(f.nvars != nvars for f in polys):
        raise PolynomialError(f"need {nvars} substitutes, got {len(subs)}")
    if not subs:
        return list(polys)
    ring = subs[0]
    for sub in subs[1:]:
        ring._check(sub)
    if any(f.field != ring.field for f in polys):
        raise PolynomialError("substitutes live over a different field")
    one = Polynomial.constant(1, ring.nvars, ring.field)
    powers = [{0: one, 1: sub} for sub in subs]

    def power(i, k):
        cache = powers[i]
        if k not in cache:
            half = power(i, k // 2)
            sq = half * half
            cache[k] = sq * subs[i] if k % 2 else sq
        return cache[k]

    # prefix products share work across monomials with common leading exponents
    prefix: dict = {(): one}

    def mono(e):
        if e in prefix:
            return prefix[e]
        head = mono(e[:-1])
        k = e[-1]
        val = head if k == 0 else head * power(len(e) - 1, k)
        prefix[e] = val
        return val

    p = ring.field.p
    out = []
    for f in polys:
        acc: dict = {}
        for e, c in f.terms.items():
            for me, mc in mono(e).terms.items():
                acc[me] = acc.get(me, 0) + c * mc
        if p:
            acc = {e: v % p for e, v in acc.items() if v % p}
        else:
            acc = {e: QQ(v) for e, v in acc.items() if v}
        out.append(Polynomial(acc, ring.nvars, ring.field, _clean=False))
    return out

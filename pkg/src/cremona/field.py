"""Exact ground fields: the rationals and prime fields F_p.

Elements are plain Python scalars. Over ``QQ`` an element is an ``int`` or a
``fractions.Fraction`` (always reduced, positive denominator); over ``GF(p)``
it is an ``int`` in ``[0, p)``. Keeping them native avoids a wrapper object in
the inner loops of polynomial arithmetic.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

DEFAULT_PRIME = 10007
# 2**61 - 1; used where coefficients must be lifted back to Q.
LIFT_PRIME = 2305843009213693951


class FieldError(ValueError):
    pass


class Field:
    """Base class; see :data:`QQ` and :func:`GF`."""

    p: int | None = None

    def __call__(self, value):
        raise NotImplementedError

    @property
    def is_prime(self) -> bool:
        return self.p is not None


class RationalField(Field):
    p = None

    def __call__(self, value):
        if isinstance(value, bool):
            raise FieldError("bool is not a field element")
        if isinstance(value, int):
            return value
        if isinstance(value, Fraction):
            return value.numerator if value.denominator == 1 else value
        if isinstance(value, str):
            return self(Fraction(value))
        raise FieldError(f"cannot coerce {value!r} into QQ")

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self(Fraction(1, 1) / a)

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero")
        return self(Fraction(a) / b)

    def reduce(self, a):
        return a

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


class PrimeField(Field):
    def __init__(self, p: int):
        if p < 3 or p % 2 == 0 or p >= 1 << 62 or not _is_probable_prime(p):
            raise FieldError(f"{p} is not an odd prime below 2^62")
        self.p = p

    def __call__(self, value):
        if isinstance(value, bool):
            raise FieldError("bool is not a field element")
        if isinstance(value, int):
            return value % self.p
        if isinstance(value, Fraction):
            den = value.denominator % self.p
            if den == 0:
                raise FieldError(f"denominator of {value} vanishes mod {self.p}")
            return value.numerator * pow(den, -1, self.p) % self.p
        if isinstance(value, str):
            return self(Fraction(value))
        raise FieldError(f"cannot coerce {value!r} into GF({self.p})")

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    def reduce(self, a):
        return a % self.p

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


QQ = RationalField()


@functools.lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def rational_reconstruction(a: int, p: int) -> Fraction | None:
    """Return n/d with n = a*d mod p and |n|, d <= sqrt(p/2), or None."""
    a %= p
    bound = math.isqrt(p // 2)
    r0, r1 = p, a
    s0, s1 = 0, 1
    while r1 > bound:
        quo = r0 // r1
        r0, r1 = r1, r0 - quo * r1
        s0, s1 = s1, s0 - quo * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    frac = Fraction(r1, s1)
    if (frac.numerator - a * frac.denominator) % p:
        return None
    return frac

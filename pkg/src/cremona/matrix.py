"""Dense exact matrices: row reduction, rank and kernels over QQ or GF(p)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .field import QQ, Field

# below this, products of two residues fit in int64
_NUMPY_PRIME_LIMIT = 1 << 31


@dataclass(frozen=True)
class Matrix:
    rows: tuple
    ncols: int
    field: Field = QQ

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], field: Field = QQ, ncols: int | None = None) -> "Matrix":
        rows = tuple(tuple(field(v) for v in r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("cannot infer column count of an empty matrix")
            ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        return cls(rows, ncols, field)

    @classmethod
    def identity(cls, n: int, field: Field = QQ) -> "Matrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], field)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field: Field = QQ) -> "Matrix":
        return cls(tuple((0,) * ncols for _ in range(nrows)), ncols, field)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def __matmul__(self, vec):
        return mat_vec(self.rows, vec, self.field)

    def rref(self):
        return rref(self.rows, self.ncols, self.field)

    def rank(self) -> int:
        return rank(self.rows, self.ncols, self.field)

    def nullspace(self) -> list[list]:
        return nullspace(self.rows, self.ncols, self.field)


def mat_vec(rows, vec, field: Field):
    p = field.p
    out = []
    for r in rows:
        s = sum(a * b for a, b in zip(r, vec))
        out.append(s % p if p else field(s))
    return out


def rref(rows: Sequence[Sequence], ncols: int, field: Field = QQ) -> tuple[list[list], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    p = field.p
    if p and p < _NUMPY_PRIME_LIMIT:
        return _rref_numpy(rows, ncols, p)
    m = [list(r) for r in rows if any(r)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        if p:
            inv = pow(lead, -1, p)
            m[r] = [v * inv % p for v in m[r]]
        else:
            m[r] = [Fraction(v) / lead if v else 0 for v in m[r]]
        prow = m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                if p:
                    m[i] = [(a - f * b) % p for a, b in zip(m[i], prow)]
                else:
                    m[i] = [a - f * b for a, b in zip(m[i], prow)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    out = [[field(v) for v in row] for row in m[:r]]
    return out, pivots


def _rref_numpy(rows, ncols, p):
    if not len(rows):
        return [], []
    a = np.array([[int(v) % p for v in r] for r in rows], dtype=np.int64).reshape(-1, ncols)
    pivots = []
    r = 0
    nrows = a.shape[0]
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if not len(nz):
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = a[r] * inv % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if len(hit):
            a[hit] = (a[hit] - (col[hit, None] * a[r][None, :]) % p) % p
        pivots.append(c)
        r += 1
    return [[int(v) for v in row] for row in a[:r]], pivots


def rank(rows: Sequence[Sequence], ncols: int, field: Field = QQ) -> int:
    return len(rref(rows, ncols, field)[1])


def nullspace(rows: Sequence[Sequence], ncols: int, field: Field = QQ) -> list[list]:
    """Basis of the right kernel, one vector per free column."""
    reduced, pivots = rref(rows, ncols, field)
    p = field.p
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [0] * ncols
        v[free] = 1
        for row, pc in zip(reduced, pivots):
            val = row[free]
            if val:
                v[pc] = (-val) % p if p else field(-val)
        basis.append(v)
    return basis


def left_nullspace(rows: Sequence[Sequence], ncols: int, field: Field = QQ) -> list[list]:
    """Vectors y with y^T M = 0."""
    rows = list(rows)
    cols = [[rows[i][j] for i in range(len(rows))] for j in range(ncols)]
    return nullspace(cols, len(rows), field)


def inverse(rows: Sequence[Sequence], field: Field = QQ) -> list[list]:
    n = len(rows)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(rows)]
    reduced, pivots = rref(aug, 2 * n, field)
    if pivots[:n] != list(range(n)) or len(reduced) < n:
        raise ValueError("matrix is singular")
    return [row[n:] for row in reduced[:n]]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence], field: Field = QQ) -> list[list]:
    p = field.p
    bt = list(zip(*b))
    out = []
    for r in a:
        row = []
        for col in bt:
            s = sum(x * y for x, y in zip(r, col))
            row.append(s % p if p else field(s))
        out.append(row)
    return out

"""Dense matrices over Q_p with per-entry precision tracking."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .padic import INF, PadicNumber, PrecisionError, deserialize, serialize


@dataclass(frozen=True)
class PadicMatrix:
    p: int
    rows: tuple[tuple[PadicNumber, ...], ...]

    def __post_init__(self):
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise ValueError("ragged matrix")
        for r in self.rows:
            for x in r:
                if x.p != self.p:
                    raise ValueError("entries must share the prime")

    # -- constructors ---------------------------------------------------------
    @classmethod
    def from_entries(cls, entries: Iterable[Iterable[PadicNumber]]) -> PadicMatrix:
        rows = tuple(tuple(r) for r in entries)
        return cls(rows[0][0].p, rows)

    @classmethod
    def from_rationals(cls, entries, p: int, N: int) -> PadicMatrix:
        return cls(p, tuple(tuple(PadicNumber.from_rational(x, p, N) for x in r) for r in entries))

    @classmethod
    def from_residues(cls, entries, p: int, N: int, shift: int = 0) -> PadicMatrix:
        """Integers read modulo p^N, then divided by p^shift."""
        scale = PadicNumber.from_int(p**shift, p, N + 2 * shift) if shift else None
        rows = []
        for r in entries:
            row = []
            for x in r:
                y = PadicNumber.from_residue(int(x), p, N)
                row.append(y / scale if scale is not None else y)
            rows.append(tuple(row))
        return cls(p, tuple(rows))

    @classmethod
    def identity(cls, n: int, p: int, N: int) -> PadicMatrix:
        return cls.from_rationals([[int(i == j) for j in range(n)] for i in range(n)], p, N)

    @classmethod
    def zeros(cls, m: int, n: int, p: int, N: int) -> PadicMatrix:
        return cls.from_rationals([[0] * n for _ in range(m)], p, N)

    # -- shape / access -------------------------------------------------------
    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> list[PadicNumber]:
        return [r[j] for r in self.rows]

    def transpose(self) -> PadicMatrix:
        return PadicMatrix(self.p, tuple(zip(*self.rows)))

    T = property(transpose)

    def min_prec(self) -> int:
        return min(x.prec for r in self.rows for x in r)

    def min_val(self):
        return min(x.val for r in self.rows for x in r)

    def add_bigoh(self, N: int) -> PadicMatrix:
        return PadicMatrix(self.p, tuple(tuple(x.add_bigoh(N) for x in r) for r in self.rows))

    def to_rationals(self) -> list[list[Fraction]]:
        return [[x.lift() for x in r] for r in self.rows]

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other: PadicMatrix) -> PadicMatrix:
        return PadicMatrix(self.p, tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other: PadicMatrix) -> PadicMatrix:
        return PadicMatrix(self.p, tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __neg__(self) -> PadicMatrix:
        return PadicMatrix(self.p, tuple(tuple(-a for a in r) for r in self.rows))

    def scale(self, c) -> PadicMatrix:
        return PadicMatrix(self.p, tuple(tuple(a * c for a in r) for r in self.rows))

    def __matmul__(self, other: PadicMatrix) -> PadicMatrix:
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = r[0] * c[0]
                for a, b in zip(r[1:], c[1:]):
                    acc = acc + a * b
                row.append(acc)
            out.append(tuple(row))
        return PadicMatrix(self.p, tuple(out))

    def apply(self, vec: Sequence[PadicNumber]) -> list[PadicNumber]:
        out = []
        for r in self.rows:
            acc = r[0] * vec[0]
            for a, b in zip(r[1:], vec[1:]):
                acc = acc + a * b
            out.append(acc)
        return out

    def trace(self) -> PadicNumber:
        acc = self.rows[0][0]
        for i in range(1, self.nrows):
            acc = acc + self.rows[i][i]
        return acc

    def __eq__(self, other):
        if not isinstance(other, PadicMatrix):
            return NotImplemented
        return self.nrows == other.nrows and all(
            a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s)
        )

    __hash__ = None

    # -- linear algebra -------------------------------------------------------
    def solve(self, B: PadicMatrix) -> PadicMatrix:
        """X with A X = B; full pivoting on minimal valuation."""
        return padic_linear_solve(self, B)

    def inverse(self) -> PadicMatrix:
        return padic_linear_solve(self, PadicMatrix.identity(self.nrows, self.p, self.min_prec() + 64))

    def det(self) -> PadicNumber:
        n = self.nrows
        a = [list(r) for r in self.rows]
        sign = 1
        det = None
        for k in range(n):
            piv = min(range(k, n), key=lambda i: a[i][k].val)
            if a[piv][k].is_zero():
                return PadicNumber.zero(self.p, min(x.prec for r in a[k:] for x in r[k:]))
            if piv != k:
                a[k], a[piv] = a[piv], a[k]
                sign = -sign
            det = a[k][k] if det is None else det * a[k][k]
            inv = a[k][k].inverse()
            for i in range(k + 1, n):
                m = a[i][k] * inv
                for j in range(k + 1, n):
                    a[i][j] = a[i][j] - m * a[k][j]
        return det if sign == 1 else -det

    def charpoly(self) -> list[PadicNumber]:
        """Coefficients c_0..c_n of det(t I - A) (division-free Berkowitz)."""
        return _berkowitz(self)


def padic_linear_solve(A: PadicMatrix, B: PadicMatrix) -> PadicMatrix:
    n = A.nrows
    if A.ncols != n:
        raise ValueError("A must be square")
    if B.nrows != n:
        raise ValueError("shape mismatch")
    a = [list(r) + list(s) for r, s in zip(A.rows, B.rows)]
    m = A.ncols + B.ncols
    perm = list(range(n))  # column permutation of the unknowns
    for k in range(n):
        best = None
        for i in range(k, n):
            for j in range(k, n):
                x = a[i][j]
                if not x.is_zero() and (best is None or x.val < a[best[0]][best[1]].val):
                    best = (i, j)
        if best is None:
            raise PrecisionError("matrix is singular to working precision")
        i, j = best
        a[k], a[i] = a[i], a[k]
        if j != k:
            for r in a:
                r[k], r[j] = r[j], r[k]
            perm[k], perm[j] = perm[j], perm[k]
        inv = a[k][k].inverse()
        a[k] = [x * inv for x in a[k]]
        for i in range(n):
            if i != k and not a[i][k].is_zero():
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    X = [None] * n
    for k in range(n):
        X[perm[k]] = tuple(a[k][n:m])
    return PadicMatrix(A.p, tuple(X))


def _berkowitz(A: PadicMatrix) -> list[PadicNumber]:
    n = A.nrows
    p = A.p
    N = A.min_prec() + 64
    one = PadicNumber.from_int(1, p, N)
    zero = PadicNumber.zero(p, N)
    a = A.rows
    # polynomial coefficients highest-degree first, as in the classic formulation
    vect = [one, -a[0][0]]
    for r in range(1, n):
        R = [a[r][j] for j in range(r)]  # row r, columns < r
        C = [a[i][r] for i in range(r)]  # column r, rows < r
        Asub = [list(a[i][:r]) for i in range(r)]
        # Toeplitz column: 1, -a_rr, -R C, -R A C, -R A^2 C, ...
        col = [one, -a[r][r]]
        v = C
        for _ in range(r):
            s = zero
            for x, y in zip(R, v):
                s = s + x * y
            col.append(-s)
            v = [sum((Asub[i][j] * v[j] for j in range(r)), zero) for i in range(r)]
        new = []
        for i in range(r + 2):
            s = zero
            for j in range(min(i, r) + 1):
                if i - j < len(col):
                    s = s + col[i - j] * vect[j]
            new.append(s)
        vect = new
    return list(reversed(vect))


def serialize_matrix(M: PadicMatrix) -> list[list[str]]:
    return [[serialize(x) for x in r] for r in M.rows]


def deserialize_matrix(rows: list[list[str]]) -> PadicMatrix:
    return PadicMatrix.from_entries([[deserialize(x) for x in r] for r in rows])

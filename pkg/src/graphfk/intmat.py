"""Exact integer matrices: Smith normal form, integer kernels and integer solving.

Everything here works on Python ints, so entries never overflow.  Matrices
are immutable; the Smith decomposition is computed once per matrix and
cached on the instance.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence


class IntMatrix:
    """Immutable row-major integer matrix.

    Zero-row and zero-column matrices are allowed, so the shape is stored
    explicitly rather than inferred from the data.
    """

    __slots__ = ("rows", "cols", "_data", "_snf", "_hash")

    def __init__(self, data: Iterable[Iterable[int]] = (), rows: Optional[int] = None,
                 cols: Optional[int] = None):
        body = tuple(tuple(int(x) for x in row) for row in data)
        if rows is None:
            rows = len(body)
        if cols is None:
            cols = len(body[0]) if body else 0
        if not body and cols == 0:
            body = tuple(() for _ in range(rows))
        if len(body) != rows:
            raise ValueError(f"expected {rows} rows, got {len(body)}")
        for row in body:
            if len(row) != cols:
                raise ValueError("ragged matrix rows")
        self.rows = rows
        self.cols = cols
        self._data = body
        self._snf = None
        self._hash = None

    # construction helpers

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        """Matrix whose columns are the given vectors (each of length `rows`)."""
        for c in columns:
            if len(c) != rows:
                raise ValueError("column length mismatch")
        return cls([[c[i] for c in columns] for i in range(rows)], rows, len(columns))

    @classmethod
    def diagonal(cls, entries: Sequence[int], rows: Optional[int] = None,
                 cols: Optional[int] = None) -> "IntMatrix":
        rows = len(entries) if rows is None else rows
        cols = len(entries) if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(entries):
            out[i][i] = d
        return cls(out, rows, cols)

    # access

    def __getitem__(self, idx):
        i, j = idx
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self._data)

    def columns(self) -> list:
        return [self.column(j) for j in range(self.cols)]

    def tolist(self) -> list:
        return [list(r) for r in self._data]

    @property
    def shape(self) -> tuple:
        return (self.rows, self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._data))
        return self._hash

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()!r}, rows={self.rows}, cols={self.cols})"

    # arithmetic

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = other.columns()
        return IntMatrix(
            [[sum(a * b for a, b in zip(r, c)) for c in ocols] for r in self._data],
            self.rows, other.cols)

    def apply(self, v: Sequence[int]) -> tuple:
        """Matrix-vector product."""
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self._data)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)],
                         self.rows, self.cols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-a for a in r] for r in self._data], self.rows, self.cols)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix([[k * a for a in r] for r in self._data], self.rows, self.cols)

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix([list(c) for c in self.columns()], self.cols, self.rows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix([[self._data[i][j] for j in cols] for i in rows], len(rows), len(cols))

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return IntMatrix([a + b for a, b in zip(self._data, other._data)],
                         self.rows, self.cols + other.cols)

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return IntMatrix(self._data + other._data, self.rows + other.rows, self.cols)

    def is_zero(self) -> bool:
        return all(a == 0 for r in self._data for a in r)

    # derived invariants

    def smith(self) -> "Smith":
        if self._snf is None:
            self._snf = _smith(self)
        return self._snf

    @property
    def rank(self) -> int:
        return self.smith().rank


class Smith:
    """Result of a Smith decomposition ``U @ A @ V == D``.

    ``Uinv`` is kept as well since cokernel generators are read off its
    columns.
    """

    __slots__ = ("U", "D", "V", "Uinv", "rank", "diagonal")

    def __init__(self, U, D, V, Uinv, rank, diagonal):
        self.U, self.D, self.V, self.Uinv = U, D, V, Uinv
        self.rank = rank
        self.diagonal = diagonal


def _smith(A: IntMatrix) -> Smith:
    m, n = A.rows, A.cols
    a = A.tolist()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    # Row ops act on U (rows) and Uinv (inverse column op); column ops on V.
    def row_addmul(dst, src, q):  # row_dst -= q * row_src
        if q == 0:
            return
        ra, rs = a[dst], a[src]
        for k in range(n):
            ra[k] -= q * rs[k]
        ud, us = U[dst], U[src]
        for k in range(m):
            ud[k] -= q * us[k]
        for r in Ui:
            r[src] += q * r[dst]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def row_neg(i):
        a[i] = [-x for x in a[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    def col_addmul(dst, src, q):  # col_dst -= q * col_src
        if q == 0:
            return
        for r in a:
            r[dst] -= q * r[src]
        for r in V:
            r[dst] -= q * r[src]

    def col_swap(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    t = 0
    while t < min(m, n):
        # smallest non-zero pivot in the trailing block keeps entries small
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            row_swap(i, t)
        if j != t:
            col_swap(j, t)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    row_addmul(i, t, a[i][t] // p)
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j]:
                    col_addmul(j, t, a[t][j] // p)
                    if a[t][j]:
                        dirty = True
            if dirty:
                # a remainder is smaller than the pivot: move it into place
                best = None
                for i in range(t, m):
                    if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                        best = (abs(a[i][t]), i, t)
                for j in range(t, n):
                    if a[t][j] and (best is None or abs(a[t][j]) < best[0]):
                        best = (abs(a[t][j]), t, j)
                _, i, j = best
                if i != t:
                    row_swap(i, t)
                if j != t:
                    col_swap(j, t)
                continue
            # divisibility: fold an offending row into the pivot row
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_addmul(t, bad, -1)
        if a[t][t] < 0:
            row_neg(t)
        t += 1

    rank = t
    diag = tuple(a[i][i] for i in range(rank))
    return Smith(IntMatrix(U, m, m), IntMatrix(a, m, n), IntMatrix(V, n, n),
                 IntMatrix(Ui, m, m), rank, diag)


def smith_normal_form(A: IntMatrix):
    """Return ``(U, D, V)`` with ``U @ A @ V == D``.

    U and V are unimodular, D is diagonal with non-negative entries
    ``d1 | d2 | ...`` and the zero entries trail the non-zero ones.
    """
    s = A.smith()
    return s.U, s.D, s.V


def kernel_basis(A: IntMatrix) -> IntMatrix:
    """Columns form a basis of the lattice ``{x : A x = 0}``."""
    s = A.smith()
    return s.V.submatrix(range(A.cols), range(s.rank, A.cols))


def solve(A: IntMatrix, b: Sequence[int]) -> Optional[tuple]:
    """An integer ``x`` with ``A x = b``, or None if there is none."""
    if len(b) != A.rows:
        raise ValueError(f"right-hand side has length {len(b)}, matrix has {A.rows} rows")
    s = A.smith()
    c = s.U.apply(b)
    y = [0] * A.cols
    for i, ci in enumerate(c):
        if i < s.rank:
            d = s.diagonal[i]
            if ci % d:
                return None
            y[i] = ci // d
        elif ci:
            return None
    return s.V.apply(y)


def unsolvable_row(A: IntMatrix, b: Sequence[int]) -> Optional[int]:
    """Index of a row of ``D y = U b`` with no integer solution, if any.

    This is the certificate behind a ``None`` from :func:`solve`: the row
    either has pivot ``d`` not dividing its right-hand side, or lies below
    the rank and has a non-zero right-hand side.
    """
    s = A.smith()
    c = s.U.apply(b)
    for i, ci in enumerate(c):
        if i < s.rank:
            if ci % s.diagonal[i]:
                return i
        elif ci:
            return i
    return None


def solve_columns(A: IntMatrix, B: IntMatrix) -> Optional[IntMatrix]:
    """Integer X with ``A X = B``, or None."""
    cols = []
    for c in B.columns():
        x = solve(A, c)
        if x is None:
            return None
        cols.append(x)
    return IntMatrix.from_columns(cols, A.cols) if cols else IntMatrix.zeros(A.cols, 0)


def column_span_basis(A: IntMatrix) -> IntMatrix:
    """A basis (as columns) of the lattice spanned by the columns of A."""
    s = A.smith()
    cols = [tuple(d * x for x in s.Uinv.column(i)) for i, d in enumerate(s.diagonal)]
    return IntMatrix.from_columns(cols, A.rows) if cols else IntMatrix.zeros(A.rows, 0)


def det(A: IntMatrix) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    if A.rows != A.cols:
        raise ValueError("determinant of a non-square matrix")
    n = A.rows
    if n == 0:
        return 1
    M = A.tolist()
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]

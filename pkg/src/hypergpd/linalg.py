"""Dense exact linear algebra over ZZ and QQ.

Everything here works with ``fractions.Fraction`` (or plain ``int`` for the
integer routines); no floating point is used anywhere in the package.  The
matrices involved are small (desk scale), so the implementations favour
simplicity and total correctness over asymptotics.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


class Mat:
    """Immutable dense matrix with exact rational entries."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Iterable[Iterable[Fraction]]):
        self.rows = rows
        self.cols = cols
        self.data = tuple(tuple(Fraction(x) for x in row) for row in data)
        if len(self.data) != rows or any(len(r) != cols for r in self.data):
            raise ValueError("shape mismatch")

    @classmethod
    def from_rows(cls, data: Sequence[Sequence]) -> "Mat":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls(rows, cols, data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Mat":
        return cls(rows, cols, [[Fraction(0)] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls(n, n, [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        return isinstance(other, Mat) and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __repr__(self):
        return f"Mat({self.rows}x{self.cols})"

    def __add__(self, other: "Mat") -> "Mat":
        assert (self.rows, self.cols) == (other.rows, other.cols)
        return Mat(self.rows, self.cols,
                   [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)])

    def __sub__(self, other: "Mat") -> "Mat":
        return self + other.scale(-1)

    def __neg__(self) -> "Mat":
        return self.scale(-1)

    def scale(self, c) -> "Mat":
        c = Fraction(c)
        return Mat(self.rows, self.cols, [[c * x for x in row] for row in self.data])

    def __mul__(self, other: "Mat") -> "Mat":
        assert self.cols == other.rows, (self.cols, other.rows)
        ot = other.transpose().data
        return Mat(self.rows, other.cols,
                   [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in ot]
                    for row in self.data])

    def transpose(self) -> "Mat":
        return Mat(self.cols, self.rows,
                   [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.data for x in row)

    def hstack(self, other: "Mat") -> "Mat":
        assert self.rows == other.rows
        return Mat(self.rows, self.cols + other.cols,
                   [r1 + r2 for r1, r2 in zip(self.data, other.data)])

    def vstack(self, other: "Mat") -> "Mat":
        assert self.cols == other.cols
        return Mat(self.rows + other.rows, self.cols, self.data + other.data)

    def col(self, j: int) -> tuple:
        return tuple(self.data[i][j] for i in range(self.rows))

    def apply(self, v: Sequence) -> tuple:
        """Matrix times column vector."""
        assert len(v) == self.cols
        return tuple(sum((a * Fraction(b) for a, b in zip(row, v)), Fraction(0))
                     for row in self.data)

    # -- Gaussian elimination over QQ ------------------------------------

    def rref(self) -> tuple["Mat", list[int]]:
        """Reduced row echelon form and pivot column indices."""
        m = [list(row) for row in self.data]
        pivots: list[int] = []
        r = 0
        for c in range(self.cols):
            if r == self.rows:
                break
            pr = next((i for i in range(r, self.rows) if m[i][c] != 0), None)
            if pr is None:
                continue
            m[r], m[pr] = m[pr], m[r]
            pv = m[r][c]
            m[r] = [x / pv for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
        return Mat(self.rows, self.cols, m), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> list[tuple]:
        """Basis (list of column vectors) of the rational kernel."""
        R, pivots = self.rref()
        free = [j for j in range(self.cols) if j not in pivots]
        basis = []
        for j in free:
            v = [Fraction(0)] * self.cols
            v[j] = Fraction(1)
            for r, c in enumerate(pivots):
                v[c] = -R.data[r][j]
            basis.append(tuple(v))
        return basis

    def solve(self, b: Sequence) -> tuple | None:
        """One solution of self * x = b, or None if inconsistent."""
        aug = self.hstack(Mat(self.rows, 1, [[Fraction(x)] for x in b]))
        R, pivots = aug.rref()
        if self.cols in pivots:
            return None
        x = [Fraction(0)] * self.cols
        for r, c in enumerate(pivots):
            x[c] = R.data[r][self.cols]
        return tuple(x)

    def column_space_contains(self, b: Sequence) -> bool:
        return self.solve(b) is not None

    def inverse(self) -> "Mat":
        assert self.rows == self.cols
        aug = self.hstack(Mat.identity(self.rows))
        R, pivots = aug.rref()
        if pivots != list(range(self.rows)):
            raise ValueError("matrix not invertible")
        return Mat(self.rows, self.rows, [row[self.rows:] for row in R.data])


def mat_from_cols(cols: Sequence[Sequence], rows: int) -> Mat:
    if not cols:
        return Mat.zeros(rows, 0)
    return Mat(rows, len(cols), [[Fraction(c[i]) for c in cols] for i in range(rows)])


def sparse_nullspace(rows: list[dict], ncols: int) -> list[dict]:
    """Nullspace basis of a sparse system; rows map column index -> Fraction.

    Returns solutions as sparse dicts.  Suited to the large, very sparse
    systems arising from naturality conditions.
    """
    # sparse row echelon with partial column bookkeeping
    pivots: dict[int, dict] = {}  # pivot column -> normalized row
    for row in rows:
        r = {k: Fraction(v) for k, v in row.items() if v != 0}
        while r:
            c = min(r)
            if c in pivots:
                f = r[c]
                for k, v in pivots[c].items():
                    r[k] = r.get(k, Fraction(0)) - f * v
                    if r[k] == 0:
                        del r[k]
            else:
                pv = r[c]
                pivots[c] = {k: v / pv for k, v in r.items()}
                break
    # back-substitute to reduced form
    for c in sorted(pivots, reverse=True):
        row = pivots[c]
        for c2 in sorted(pivots):
            if c2 <= c:
                continue
            if c2 in row:
                f = row[c2]
                for k, v in pivots[c2].items():
                    row[k] = row.get(k, Fraction(0)) - f * v
                    if row[k] == 0:
                        del row[k]
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        sol = {fc: Fraction(1)}
        for c, row in pivots.items():
            v = row.get(fc)
            if v:
                sol[c] = -v
        basis.append(sol)
    return basis


# -- Integer forms --------------------------------------------------------


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def _addmul_col(m, dst, src, k):
    for row in m:
        row[dst] += k * row[src]


def column_hnf_with_transform(A: Mat) -> tuple[list[list[int]], list[list[int]]]:
    """Column-style Hermite reduction: returns (H, U) with A*U = H, U unimodular.

    Entries of A must be integers.  Zero columns of H are pushed to the right,
    so the kernel lattice of A is spanned by the corresponding columns of U.
    """
    assert A.is_integral()
    m = [[int(x) for x in row] for row in A.data]
    n = A.cols
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    row = 0
    col = 0
    while row < A.rows and col < n:
        piv = None
        for j in range(col, n):
            if m[row][j] != 0 and (piv is None or abs(m[row][j]) < abs(m[row][piv])):
                piv = j
        if piv is None:
            row += 1
            continue
        _swap_cols(m, col, piv)
        _swap_cols(U, col, piv)
        # clear the rest of this row by repeated remainder steps
        while True:
            done = True
            for j in range(col + 1, n):
                if m[row][j] != 0:
                    q = m[row][j] // m[row][col]
                    _addmul_col(m, j, col, -q)
                    _addmul_col(U, j, col, -q)
                    if m[row][j] != 0:
                        _swap_cols(m, col, j)
                        _swap_cols(U, col, j)
                        done = False
            if done:
                break
        if m[row][col] < 0:
            for r in m:
                r[col] = -r[col]
            for r in U:
                r[col] = -r[col]
        row += 1
        col += 1
    return m, U


def integer_kernel_basis(A: Mat) -> list[tuple]:
    """Basis of {x in ZZ^cols : A x = 0}; a saturated (pure) sublattice."""
    H, U = column_hnf_with_transform(A)
    basis = []
    for j in range(A.cols):
        if all(H[i][j] == 0 for i in range(A.rows)):
            basis.append(tuple(Fraction(U[i][j]) for i in range(A.cols)))
    return basis


def smith_invariants(A: Mat) -> list[int]:
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix."""
    assert A.is_integral()
    m = [[int(x) for x in row] for row in A.data]
    rows, cols = A.rows, A.cols
    invariants = []
    top = 0
    while True:
        piv = None
        for i in range(top, rows):
            for j in range(top, cols):
                if m[i][j] != 0 and (piv is None or abs(m[i][j]) < abs(m[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        pi, pj = piv
        m[top], m[pi] = m[pi], m[top]
        for row in m:
            row[top], row[pj] = row[pj], row[top]
        dirty = False
        for i in range(top + 1, rows):
            if m[i][top] != 0:
                q = m[i][top] // m[top][top]
                m[i] = [a - q * b for a, b in zip(m[i], m[top])]
                if m[i][top] != 0:
                    dirty = True
        for j in range(top + 1, cols):
            if m[top][j] != 0:
                q = m[top][j] // m[top][top]
                for i in range(rows):
                    m[i][j] -= q * m[i][top]
                if m[top][j] != 0:
                    dirty = True
        if dirty:
            continue
        # divisibility fix-up: pivot must divide everything below-right
        bad = None
        for i in range(top + 1, rows):
            for j in range(top + 1, cols):
                if m[i][j] % m[top][top] != 0:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            m[top] = [a + b for a, b in zip(m[top], m[bad])]
            continue
        invariants.append(abs(m[top][top]))
        top += 1
        if top == rows or top == cols:
            break
    return invariants

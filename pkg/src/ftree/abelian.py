"""Exact integer linear algebra: Smith normal form, H1 invariants, pairings.

All arithmetic uses Python's arbitrary-precision integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import FtreeError


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple  # row-major tuple of tuples

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise FtreeError("matrix dimensions do not match entries")
        object.__setattr__(self, "entries", tuple(tuple(int(x) for x in r) for r in self.entries))

    @staticmethod
    def from_rows(rows, cols=None):
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return IntMatrix(len(rows), cols, tuple(tuple(r) for r in rows))

    @staticmethod
    def identity(n):
        return IntMatrix(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @staticmethod
    def zero(rows, cols):
        return IntMatrix(rows, cols, tuple(tuple(0 for _ in range(cols)) for _ in range(rows)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def transpose(self):
        return IntMatrix(self.cols, self.rows,
                         tuple(tuple(self.entries[i][j] for i in range(self.rows))
                               for j in range(self.cols)))

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise FtreeError("dimension mismatch in matrix product")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                row.append(sum(self.entries[i][k] * other.entries[k][j] for k in range(self.cols)))
            out.append(tuple(row))
        return IntMatrix(self.rows, other.cols, tuple(out))

    def __neg__(self):
        return IntMatrix(self.rows, self.cols, tuple(tuple(-x for x in r) for r in self.entries))

    def diagonal(self):
        return [self.entries[i][i] for i in range(min(self.rows, self.cols))]


def det(m):
    """Determinant by fraction-free Bareiss elimination (exact)."""
    if m.rows != m.cols:
        raise FtreeError("determinant of non-square matrix")
    n = m.rows
    a = [list(r) for r in m.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def smith_normal_form(m):
    """Return (U, D, V) with U*M*V = D, U and V unimodular, D diagonal,
    nonnegative, each diagonal entry dividing the next."""
    r, c = m.rows, m.cols
    a = [list(row) for row in m.entries]
    u = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    v = [[1 if i == j else 0 for j in range(c)] for i in range(c)]

    def row_op(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for row in a:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    n = min(r, c)
    for t in range(n):
        # locate smallest nonzero |entry| in the remaining block
        pivot = None
        for i in range(t, r):
            for j in range(t, c):
                x = a[i][j]
                if x != 0 and (pivot is None or abs(x) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        while True:
            i0, j0 = pivot
            if i0 != t:
                swap_rows(t, i0)
            if j0 != t:
                swap_cols(t, j0)
            done = True
            for i in range(t + 1, r):
                q = a[i][t] // a[t][t]
                if q:
                    row_op(i, t, q)
                if a[i][t]:
                    done = False
            for j in range(t + 1, c):
                q = a[t][j] // a[t][t]
                if q:
                    col_op(j, t, q)
                if a[t][j]:
                    done = False
            if done:
                break
            pivot = (t, t)
            for i in range(t, r):
                for j in range(t, c):
                    x = a[i][j]
                    if x != 0 and abs(x) < abs(a[pivot[0]][pivot[1]]):
                        pivot = (i, j)
        if a[t][t] < 0:
            negate_row(t)

    # enforce the divisibility chain d_k | d_{k+1}
    changed = True
    while changed:
        changed = False
        for t in range(n - 1):
            dt, dn = a[t][t], a[t + 1][t + 1]
            if dt == 0 and dn != 0:
                swap_rows(t, t + 1)
                swap_cols(t, t + 1)
                changed = True
                continue
            if dt != 0 and dn % dt != 0:
                # col_t += col_{t+1}; then clear the 2x2 block again
                col_op(t, t + 1, -1)
                _clear_block(a, u, v, t)
                changed = True
        for t in range(n):
            if a[t][t] < 0:
                negate_row(t)

    d = [[a[i][j] if i == j else 0 for j in range(c)] for i in range(r)]
    return (IntMatrix.from_rows(u, r), IntMatrix.from_rows(d, c), IntMatrix.from_rows(v, c))


def _clear_block(a, u, v, t):
    """Re-diagonalize rows/cols t, t+1 after a divisibility fix-up."""
    r, c = len(a), len(a[0]) if a else 0

    def row_op(i, j, q):
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):
        for row in a:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    while True:
        pivot = None
        for i in (t, t + 1):
            for j in (t, t + 1):
                if i < r and j < c and a[i][j] != 0:
                    if pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]]):
                        pivot = (i, j)
        if pivot is None:
            return
        if pivot[0] != t:
            swap_rows(t, pivot[0])
        if pivot[1] != t:
            swap_cols(t, pivot[1])
        done = True
        if t + 1 < r:
            q = a[t + 1][t] // a[t][t]
            if q:
                row_op(t + 1, t, q)
            if a[t + 1][t]:
                done = False
        if t + 1 < c:
            q = a[t][t + 1] // a[t][t]
            if q:
                col_op(t + 1, t, q)
            if a[t][t + 1]:
                done = False
        if done:
            return


@dataclass(frozen=True)
class AbelianInvariants:
    free_rank: int
    torsion: tuple  # sorted, each dividing the next

    def __post_init__(self):
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise FtreeError("torsion coefficients must form a divisibility chain")

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def relation_matrix(p):
    """Exponent-sum matrix: rows = relators, cols = generators."""
    rows = []
    for rel in p.relators:
        row = [0] * p.num_generators
        for x in rel:
            row[abs(x) - 1] += 1 if x > 0 else -1
        rows.append(tuple(row))
    return IntMatrix(len(p.relators), p.num_generators, tuple(rows))


def abelian_invariants(p):
    m = relation_matrix(p)
    if m.rows == 0:
        return AbelianInvariants(p.num_generators, ())
    _, d, _ = smith_normal_form(m)
    diag = d.diagonal()
    nonzero = [x for x in diag if x != 0]
    torsion = tuple(x for x in nonzero if x > 1)
    return AbelianInvariants(p.num_generators - len(nonzero), torsion)


@dataclass(frozen=True)
class PairingForm:
    matrix: IntMatrix
    basis_note: str = ""

    def __post_init__(self):
        m = self.matrix
        if m.rows != m.cols:
            raise FtreeError("pairing matrix must be square")
        if m.transpose() != -m:
            raise FtreeError("pairing matrix must be skew-symmetric")

    @property
    def size(self):
        return self.matrix.rows


def standard_symplectic(genus):
    """Block form with I(a_i, b_i) = 1 in the basis a1,b1,...,ag,bg."""
    if genus < 0:
        raise FtreeError("genus must be >= 0")
    n = 2 * genus
    rows = [[0] * n for _ in range(n)]
    for i in range(genus):
        rows[2 * i][2 * i + 1] = 1
        rows[2 * i + 1][2 * i] = -1
    return PairingForm(IntMatrix.from_rows(rows, n), "a1,b1,...,ag,bg")


def preserves_pairing(mmap, j_src, j_dst):
    """True iff M^T * J_dst * M == J_src."""
    if mmap.rows != mmap.cols or mmap.rows != j_dst.size or j_src.size != j_dst.size:
        raise FtreeError("dimension mismatch")
    return (mmap.transpose() @ j_dst.matrix) @ mmap == j_src.matrix

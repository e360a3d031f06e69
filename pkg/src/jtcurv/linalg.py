"""Small exact linear algebra layer: dense matrices over Fraction (or float)
and symmetric bilinear forms with congruence-based signature computation.

Everything here is pure; matrices are plain lists of lists and are never
mutated after construction by the public helpers.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import FLOAT, RATIONAL, close, is_exact, iszero


class DegenerateFormError(ValueError):
    """Raised when an operation requires a nondegenerate bilinear form."""


class SingularMatrixError(ValueError):
    """Raised when a matrix inverse/solve hits a singular matrix."""


def zeros(r, c):
    return [[Fraction(0)] * c for _ in range(r)]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    out = [[0] * p for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        row = out[i]
        for k in range(m):
            a = Ai[k]
            if a == 0:
                continue
            Bk = B[k]
            for j in range(p):
                b = Bk[j]
                if b != 0:
                    row[j] += a * b
    return [[Fraction(x) if not isinstance(x, float) else x for x in row] for row in out]


def mat_vec(A, v):
    out = []
    for row in A:
        s = 0
        for a, x in zip(row, v):
            if a != 0 and x != 0:
                s += a * x
        out.append(s)
    return tuple(out)


def transpose(A):
    return [list(col) for col in zip(*A)]


def mat_eq(A, B, rel=None):
    if len(A) != len(B) or len(A[0]) != len(B[0]):
        return False
    for ra, rb in zip(A, B):
        for a, b in zip(ra, rb):
            if rel is None:
                if a != b:
                    return False
            elif not close(a, b, rel=rel):
                return False
    return True


def _pivot_ok(x):
    return (x != 0) if is_exact(x) else abs(x) > 1e-12


def mat_inv(A):
    """Gauss-Jordan inverse; exact for Fraction entries."""
    n = len(A)
    M = [list(row) + list(identity(n)[i]) for i, row in enumerate(A)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if _pivot_ok(M[r][col]):
                piv = r
                break
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [x / p for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


def rref(A):
    """Reduced row echelon form; returns (rref_rows, pivot_columns)."""
    M = [list(row) for row in A]
    if not M:
        return [], []
    rows, cols = len(M), len(M[0])
    pivots = []
    r = 0
    for c in range(cols):
        piv = None
        for rr in range(r, rows):
            if _pivot_ok(M[rr][c]):
                piv = rr
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        p = M[r][c]
        M[r] = [x / p for x in M[r]]
        for rr in range(rows):
            if rr != r and M[rr][c] != 0:
                f = M[rr][c]
                M[rr] = [x - f * y for x, y in zip(M[rr], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M[:r] + [[Fraction(0)] * cols for _ in range(rows - r)], pivots


def rank(A):
    return len(rref(A)[1])


def row_space_basis(vectors):
    """Exact row-reduced basis of the span of the given vectors."""
    if not vectors:
        return []
    R, pivots = rref([list(v) for v in vectors])
    return [tuple(R[i]) for i in range(len(pivots))]


def in_span(vector, basis):
    """True if vector lies in the span of a row-reduced basis."""
    v = list(vector)
    for b in basis:
        lead = next((j for j, x in enumerate(b) if _pivot_ok(x)), None)
        if lead is not None and v[lead] != 0:
            f = v[lead] / b[lead]
            v = [x - f * y for x, y in zip(v, b)]
    return all(iszero(x) for x in v)


def nullspace_basis(A):
    """Exact basis for the right nullspace of A."""
    R, pivots = rref(A)
    cols = len(A[0]) if A else 0
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][fc]
        basis.append(tuple(v))
    return basis


def solve(A, b):
    """One exact solution of A x = b (possibly underdetermined).

    Raises SingularMatrixError when the system is inconsistent.
    """
    rows = [list(ra) + [bb] for ra, bb in zip(A, b)]
    R, pivots = rref(rows)
    cols = len(A[0]) if A else 0
    if cols in pivots:
        raise SingularMatrixError("inconsistent linear system")
    x = [Fraction(0)] * cols
    for r, pc in enumerate(pivots):
        x[pc] = R[r][cols]
    return tuple(x)


class BilinearForm:
    """A symmetric bilinear form given by its Gram matrix."""

    def __init__(self, entries):
        self.n = len(entries)
        self.entries = [list(row) for row in entries]
        for i in range(self.n):
            for j in range(i):
                if not close(self.entries[i][j], self.entries[j][i]):
                    raise ValueError("bilinear form matrix must be symmetric")

    @property
    def mode(self):
        for row in self.entries:
            for x in row:
                if isinstance(x, float):
                    return FLOAT
        return RATIONAL

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def apply(self, u, v):
        s = 0
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            row = self.entries[i]
            for j, vj in enumerate(v):
                if vj != 0 and row[j] != 0:
                    s += ui * row[j] * vj
        return s

    def signature(self):
        """(p, q) = (negative, positive) inertia via symmetric congruence.

        Exact Gaussian congruence reduction: no eigenvalue iteration.
        """
        M = [list(row) for row in self.entries]
        n = self.n
        p = q = 0
        for k in range(n):
            if not _pivot_ok(M[k][k]):
                # search a later diagonal pivot
                swap = next((r for r in range(k + 1, n) if _pivot_ok(M[r][r])), None)
                if swap is not None:
                    for r in range(n):
                        M[r][k], M[r][swap] = M[r][swap], M[r][k]
                    M[k], M[swap] = M[swap], M[k]
                else:
                    # fully isotropic diagonal: fold an off-diagonal entry in
                    off = next((c for c in range(k + 1, n) if _pivot_ok(M[k][c])), None)
                    if off is None:
                        raise DegenerateFormError("degenerate bilinear form")
                    for r in range(n):
                        M[r][k] = M[r][k] + M[r][off]
                    for c in range(n):
                        M[k][c] = M[k][c] + M[off][c]
            piv = M[k][k]
            if piv < 0:
                p += 1
            else:
                q += 1
            for r in range(k + 1, n):
                if M[r][k] != 0:
                    f = M[r][k] / piv
                    for c in range(n):
                        M[r][c] -= f * M[k][c]
                    for c in range(n):
                        M[c][r] -= f * M[c][k]
        return (p, q)

    def inverse(self):
        try:
            return BilinearForm(mat_inv(self.entries))
        except SingularMatrixError as e:
            raise DegenerateFormError(str(e)) from e

    def __eq__(self, other):
        return isinstance(other, BilinearForm) and mat_eq(self.entries, other.entries)

    def __repr__(self):
        return f"BilinearForm({self.entries!r})"


def signature(form: BilinearForm):
    return form.signature()


def invert_form(form: BilinearForm) -> BilinearForm:
    return form.inverse()

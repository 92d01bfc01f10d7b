"""Exact linear algebra over the rationals.

Vectors are tuples of Fractions (plain ints are accepted and coerced),
matrices are tuples of row tuples.  Everything is immutable and exact;
there is no floating point anywhere in the package.

Elimination uses the first nonzero entry as pivot so echelon forms,
nullspace bases and solutions are reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

Vec = tuple[Fraction, ...]
Mat = tuple[Vec, ...]
IntVec = tuple[int, ...]


def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def vec(entries: Sequence) -> Vec:
    return tuple(frac(e) for e in entries)


def mat(rows: Sequence[Sequence]) -> Mat:
    out = tuple(vec(r) for r in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise ValueError("inconsistent row lengths")
    return out


def zero_vec(n: int) -> Vec:
    return (Fraction(0),) * n


def identity(n: int) -> Mat:
    return tuple(
        tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
    )


def dot(u: Sequence, v: Sequence) -> Fraction:
    if len(u) != len(v):
        raise ValueError("length mismatch in dot product")
    return sum((frac(a) * frac(b) for a, b in zip(u, v)), Fraction(0))


def vec_add(u: Sequence, v: Sequence) -> Vec:
    return tuple(frac(a) + frac(b) for a, b in zip(u, v))


def vec_sub(u: Sequence, v: Sequence) -> Vec:
    return tuple(frac(a) - frac(b) for a, b in zip(u, v))


def vec_scale(c, v: Sequence) -> Vec:
    c = frac(c)
    return tuple(c * frac(a) for a in v)


def is_zero_vec(v: Sequence) -> bool:
    return all(frac(a) == 0 for a in v)


def mat_vec(A: Sequence[Sequence], x: Sequence) -> Vec:
    return tuple(dot(row, x) for row in A)


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Mat:
    Bt = transpose(B)
    return tuple(tuple(dot(row, col) for col in Bt) for row in A)


def transpose(A: Sequence[Sequence]) -> Mat:
    if not A:
        return ()
    return tuple(tuple(frac(A[i][j]) for i in range(len(A))) for j in range(len(A[0])))


def int_vec(v: Sequence) -> IntVec:
    out = []
    for e in v:
        f = frac(e)
        if f.denominator != 1:
            raise ValueError(f"expected integer entries, got {e}")
        out.append(f.numerator)
    return tuple(out)


def primitive(v: Sequence[int]) -> IntVec:
    """Divide an integer vector by the gcd of its entries, keeping direction."""
    w = int_vec(v)
    g = 0
    for e in w:
        g = gcd(g, abs(e))
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(e // g for e in w)


def _rows_as_lists(A: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[frac(e) for e in row] for row in A]


def rref(A: Sequence[Sequence], ncols: int | None = None) -> tuple[Mat, tuple[int, ...]]:
    """Reduced row echelon form and pivot column indices.

    Pivot choice: scanning columns left to right, the first row (from the
    current one down) with a nonzero entry is used.
    """
    rows = _rows_as_lists(A)
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    r = 0
    pivots: list[int] = []
    for col in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = rows[r][col]
        rows[r] = [e / pv for e in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return tuple(tuple(row) for row in rows), tuple(pivots)


def rank(A: Sequence[Sequence]) -> int:
    if not A:
        return 0
    return len(rref(A)[1])


def nullspace(A: Sequence[Sequence], ncols: int | None = None) -> tuple[Vec, ...]:
    """Basis of the right kernel, one vector per free column.

    Each basis vector carries 1 in its own free column and 0 in every
    other free column (the reduced-echelon convention), so the result is
    canonical for a given matrix.
    """
    if ncols is None:
        if not A:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(A[0])
    R, pivots = rref(A, ncols)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for j in free:
        x = [Fraction(0)] * ncols
        x[j] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -R[i][j]
        basis.append(tuple(x))
    return tuple(basis)


@dataclass(frozen=True)
class LinearSolution:
    """One exact solution of A x = b together with a kernel basis."""

    solution: Vec
    nullspace: tuple[Vec, ...]


def solve_linear(A: Sequence[Sequence], b: Sequence, ncols: int | None = None) -> LinearSolution | None:
    """Solve A x = b exactly; None means the system is infeasible."""
    rows = _rows_as_lists(A)
    rhs = [frac(e) for e in b]
    if len(rows) != len(rhs):
        raise ValueError("row count does not match right-hand side")
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for an empty system")
        ncols = len(rows[0])
    aug = [row + [rhs[i]] for i, row in enumerate(rows)]
    R, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = R[i][ncols]
    return LinearSolution(tuple(x), nullspace([r[:ncols] for r in rows] or [], ncols))


def solve_square(A: Sequence[Sequence], b: Sequence) -> Vec | None:
    """Unique solution of a square invertible system, else None."""
    sol = solve_linear(A, b)
    if sol is None or sol.nullspace:
        return None
    return sol.solution


def det(A: Sequence[Sequence]) -> Fraction:
    rows = _rows_as_lists(A)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    result = Fraction(1)
    for col in range(n):
        pivot_row = None
        for i in range(col, n):
            if rows[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            rows[col], rows[pivot_row] = rows[pivot_row], rows[col]
            sign = -sign
        pv = rows[col][col]
        result *= pv
        for i in range(col + 1, n):
            if rows[i][col] != 0:
                factor = rows[i][col] / pv
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[col])]
    return result * sign


def invert(A: Sequence[Sequence]) -> Mat | None:
    rows = _rows_as_lists(A)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("inverse of a non-square matrix")
    aug = [row + [Fraction(1 if i == j else 0) for j in range(n)] for i, row in enumerate(rows)]
    R, pivots = rref(aug, 2 * n)
    if tuple(pivots[:n]) != tuple(range(n)) or len(pivots) < n:
        return None
    return tuple(tuple(R[i][n:]) for i in range(n))


def in_row_span(A: Sequence[Sequence], v: Sequence) -> bool:
    rows = [tuple(row) for row in A]
    base = rank(rows) if rows else 0
    return rank(rows + [tuple(v)]) == base


def integer_kernel_basis(rows: Sequence[Sequence[int]], n: int) -> list[IntVec]:
    """Lattice basis of {x in Z^n : A x = 0} for an integer matrix A.

    Column reduction by unimodular operations, tracked on an identity
    matrix; the tracker columns over the zero columns of the reduced
    matrix form the kernel basis.  The kernel of an integer matrix is a
    saturated sublattice, so this basis spans it over Z.
    """
    A = [[int(frac(e)) for e in row] for row in rows]
    for row in A:
        if len(row) != n:
            raise ValueError("row length does not match n")
    cols = [[A[i][j] for i in range(len(A))] for j in range(n)]
    U = [[1 if i == j else 0 for i in range(n)] for j in range(n)]  # U[j] = column j
    c = 0
    for r in range(len(A)):
        while True:
            nz = [j for j in range(c, n) if cols[j][r] != 0]
            if len(nz) <= 1:
                break
            j_min = min(nz, key=lambda j: abs(cols[j][r]))
            for j in nz:
                if j == j_min:
                    continue
                q = cols[j][r] // cols[j_min][r]
                cols[j] = [a - q * b for a, b in zip(cols[j], cols[j_min])]
                U[j] = [a - q * b for a, b in zip(U[j], U[j_min])]
        nz = [j for j in range(c, n) if cols[j][r] != 0]
        if nz:
            j = nz[0]
            cols[c], cols[j] = cols[j], cols[c]
            U[c], U[j] = U[j], U[c]
            c += 1
            if c == n:
                break
    return [tuple(U[j]) for j in range(c, n)]


def unimodular_inverse(U: Sequence[Sequence[int]]) -> tuple[IntVec, ...]:
    """Integer inverse of a unimodular integer matrix."""
    inv = invert(U)
    if inv is None:
        raise ValueError("matrix is singular")
    out = tuple(int_vec(row) for row in inv)
    return out

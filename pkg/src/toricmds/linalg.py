"""Exact linear algebra over the rationals and over the integers.

Everything here works with plain Python ints and fractions.Fraction; there is
no floating point anywhere. Vectors are tuples, matrices are sequences of row
tuples. Integer routines (Hermite reduction, saturated kernels) are what the
lattice computations in the toric layer rely on, so they must return canonical
output for a given input: same input, byte-identical result.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vec = tuple[int, ...]


def vec_gcd(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def primitive(v: Sequence[int]) -> Vec:
    """Divide an integer vector by the gcd of its entries.

    The zero vector is returned unchanged. Direction is preserved; callers
    that need an orientation-free normal fix the sign themselves.
    """
    g = vec_gcd(v)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


def primitive_fraction(v: Sequence[Fraction | int]) -> Vec:
    """Scale a rational vector to the primitive integer vector on its ray."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    return primitive([int(x * den) for x in fr])


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b, strict=True))


def vadd(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vsub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vscale(c, a: Sequence) -> tuple:
    return tuple(c * x for x in a)


def vneg(a: Sequence) -> tuple:
    return tuple(-x for x in a)


def is_zero(a: Sequence) -> bool:
    return all(x == 0 for x in a)


def _echelon(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q. Returns (rref rows, pivot columns)."""
    mat = [[Fraction(x) for x in row] for row in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(_echelon(rows)[1])


def kernel(rows: Sequence[Sequence], ncols: int | None = None) -> list[tuple[Fraction, ...]]:
    """Basis of {x : A x = 0} over Q, one vector per free column."""
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(rows[0])
    red, pivots = _echelon(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(tuple(v))
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> tuple[Fraction, ...] | None:
    """One rational solution of A x = b, or None if the system is inconsistent."""
    if not rows:
        return tuple() if all(Fraction(x) == 0 for x in rhs) else None
    ncols = len(rows[0])
    aug = [list(row) + [b] for row, b in zip(rows, rhs, strict=True)]
    red, pivots = _echelon(aug)
    for r, pc in enumerate(pivots):
        if pc == ncols:
            return None
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    return tuple(x)


def det(rows: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix (Bareiss, fraction free)."""
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if piv is None:
                return 0
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _exgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, p, q) with p*a + q*b = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def hermite_with_transform(rows: Sequence[Sequence[int]]) -> tuple[list[Vec], list[Vec]]:
    """Row Hermite normal form with its unimodular transform.

    Returns (H, T) with T * rows == H, T unimodular. H is in canonical form:
    row echelon, positive pivots, entries above a pivot reduced into [0, pivot).
    Zero rows of H are pushed to the bottom.
    """
    m = [list(r) for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    t = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        t[r], t[piv] = t[piv], t[r]
        for i in range(r + 1, nr):
            while m[i][c] != 0:
                g, p, q = _exgcd(m[r][c], m[i][c])
                a_div, b_div = m[r][c] // g, m[i][c] // g
                new_r = [p * x + q * y for x, y in zip(m[r], m[i])]
                new_i = [-b_div * x + a_div * y for x, y in zip(m[r], m[i])]
                m[r], m[i] = new_r, new_i
                tr = [p * x + q * y for x, y in zip(t[r], t[i])]
                ti = [-b_div * x + a_div * y for x, y in zip(t[r], t[i])]
                t[r], t[i] = tr, ti
        if m[r][c] < 0:
            m[r] = [-x for x in m[r]]
            t[r] = [-x for x in t[r]]
        for i in range(r):
            f = m[i][c] // m[r][c]
            if f != 0:
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
                t[i] = [x - f * y for x, y in zip(t[i], t[r])]
        r += 1
        if r == nr:
            break
    return [tuple(row) for row in m], [tuple(row) for row in t]


def hermite(rows: Sequence[Sequence[int]]) -> list[Vec]:
    """Canonical row Hermite form with zero rows dropped."""
    h, _ = hermite_with_transform(rows)
    return [row for row in h if not is_zero(row)]


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int | None = None) -> list[Vec]:
    """Canonical basis of the saturated lattice {x in Z^m : A x = 0}.

    Saturated means every integer point of the rational kernel is an integer
    combination of the basis. Implemented through the Hermite transform of the
    transpose: the transform rows aligned with zero rows of the form are a
    basis, and a final Hermite pass makes the result canonical.
    """
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(rows[0])
    if not rows:
        return [tuple(1 if i == j else 0 for j in range(ncols)) for i in range(ncols)]
    transpose = [[row[i] for row in rows] for i in range(ncols)]
    h, t = hermite_with_transform(transpose)
    basis = [t[i] for i in range(len(h)) if is_zero(h[i])]
    return hermite(basis) if basis else []


class RationalMatrix:
    """Immutable exact-rational matrix with the kernel/image/rank trio."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Sequence[Sequence], ncols: int | None = None):
        self.rows: tuple[tuple[Fraction, ...], ...] = tuple(
            tuple(Fraction(x) for x in row) for row in rows
        )
        self.nrows = len(self.rows)
        if self.rows:
            widths = {len(r) for r in self.rows}
            if len(widths) != 1:
                raise ValueError("ragged rows")
            self.ncols = widths.pop()
            if ncols is not None and ncols != self.ncols:
                raise ValueError("ncols does not match rows")
        else:
            if ncols is None:
                raise ValueError("ncols required for an empty matrix")
            self.ncols = ncols

    def rank(self) -> int:
        return rank(self.rows)

    def kernel(self) -> list[tuple[Fraction, ...]]:
        return kernel(self.rows, self.ncols)

    def image(self) -> list[tuple[Fraction, ...]]:
        """Basis of the row space (rref rows, pivots normalized to 1)."""
        red, _ = _echelon(self.rows)
        return [tuple(r) for r in red]

    def integer_kernel(self) -> list[Vec]:
        # Clearing denominators row by row does not change the kernel.
        cleared = []
        for row in self.rows:
            den = 1
            for x in row:
                den = den * x.denominator // gcd(den, x.denominator)
            cleared.append([int(x * den) for x in row])
        return integer_kernel(cleared, self.ncols)

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalMatrix) and self.rows == other.rows \
            and self.ncols == other.ncols

    def __hash__(self) -> int:
        return hash((self.rows, self.ncols))

    def __repr__(self) -> str:
        return f"RationalMatrix({self.nrows}x{self.ncols})"

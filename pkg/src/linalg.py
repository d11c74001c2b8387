"""
Exact linear algebra over Z, Q, GF(p) and norm-Euclidean rings.

Integer systems are solved through sympy's Smith decomposition over ZZ; the
generic Euclidean Smith decomposition below is what `homalg` runs for
cyclotomic integers (and for Z when it needs the inverse transforms too).
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd, lcm
from typing import Any, Generic, Protocol, TypeVar

import structlog
from sympy import ZZ
from sympy.polys.domains import GF
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from errors import InvariantViolation

logger = structlog.get_logger(__name__)

T = TypeVar("T")

Matrix = list[list[Any]]


class EuclideanRing(Protocol[T]):
    """Operations the Smith decomposition needs beyond +, -, *."""

    name: str

    def zero(self) -> T: ...

    def one(self) -> T: ...

    def is_zero(self, a: T) -> bool: ...

    def size(self, a: T) -> int: ...

    def divmod(self, a: T, b: T) -> tuple[T, T]: ...

    def normalize(self, a: T) -> tuple[T, T]:
        """Return (canonical associate c, unit u) with c = u * a."""
        ...

    def unit_inverse(self, u: T) -> T: ...

    def is_unit(self, a: T) -> bool: ...


class IntegerRing:
    """The integers as a Euclidean ring."""

    name = "z"

    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return 1

    def is_zero(self, a: int) -> bool:
        return a == 0

    def size(self, a: int) -> int:
        return abs(a)

    def divmod(self, a: int, b: int) -> tuple[int, int]:
        return divmod(a, b)

    def normalize(self, a: int) -> tuple[int, int]:
        return (-a, -1) if a < 0 else (a, 1)

    def unit_inverse(self, u: int) -> int:
        return u

    def is_unit(self, a: int) -> bool:
        return a in (1, -1)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, IntegerRing)

    def __hash__(self) -> int:
        return hash(self.name)

    def __repr__(self) -> str:
        return "IntegerRing()"


def identity(n: int, ring: EuclideanRing[Any]) -> Matrix:
    return [[ring.one() if i == j else ring.zero() for j in range(n)] for i in range(n)]


def mat_mul(a: Matrix, b: Matrix, ring: EuclideanRing[Any]) -> Matrix:
    """Product of two matrices with entries in `ring`."""
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out: Matrix = []
    for row in a:
        new_row = []
        for j in range(cols):
            acc = ring.zero()
            for k in range(inner):
                if not ring.is_zero(row[k]) and not ring.is_zero(b[k][j]):
                    acc = acc + row[k] * b[k][j]
            new_row.append(acc)
        out.append(new_row)
    return out


@dataclass(frozen=True)
class SmithResult(Generic[T]):
    """U·M·V = D with U, V invertible; the inverses are carried along."""

    diagonal: Matrix
    left: Matrix
    right: Matrix
    left_inverse: Matrix
    right_inverse: Matrix
    rank: int

    @property
    def invariants(self) -> list[Any]:
        return [self.diagonal[k][k] for k in range(self.rank)]

    def verify(self, original: Matrix, ring: EuclideanRing[Any]) -> bool:
        """Re-check every identity by exact multiplication."""
        rows = len(original)
        cols = len(original[0]) if original else len(self.right)
        if mat_mul(mat_mul(self.left, original, ring), self.right, ring) != self.diagonal:
            return False
        if mat_mul(self.left, self.left_inverse, ring) != identity(rows, ring):
            return False
        if mat_mul(self.right, self.right_inverse, ring) != identity(cols, ring):
            return False
        diag = self.invariants
        for k in range(1, len(diag)):
            _, r = ring.divmod(diag[k], diag[k - 1])
            if not ring.is_zero(r):
                return False
        return all(
            ring.is_zero(self.diagonal[i][j])
            for i in range(rows)
            for j in range(cols)
            if i != j or i >= self.rank
        )


class _SmithState:
    """Working copies of M, U, U⁻¹, V, V⁻¹ with paired elementary moves."""

    def __init__(self, matrix: Matrix, cols: int, ring: EuclideanRing[Any]) -> None:
        self.ring = ring
        self.a = [list(row) for row in matrix]
        self.m = len(matrix)
        self.n = cols
        self.u = identity(self.m, ring)
        self.u_inv = identity(self.m, ring)
        self.v = identity(self.n, ring)
        self.v_inv = identity(self.n, ring)

    def swap_rows(self, i: int, j: int) -> None:
        if i == j:
            return
        self.a[i], self.a[j] = self.a[j], self.a[i]
        self.u[i], self.u[j] = self.u[j], self.u[i]
        for row in self.u_inv:
            row[i], row[j] = row[j], row[i]

    def swap_cols(self, i: int, j: int) -> None:
        if i == j:
            return
        for row in self.a:
            row[i], row[j] = row[j], row[i]
        for row in self.v:
            row[i], row[j] = row[j], row[i]
        self.v_inv[i], self.v_inv[j] = self.v_inv[j], self.v_inv[i]

    def add_row(self, target: int, source: int, q: Any) -> None:
        """row_target += q * row_source."""
        for mat in (self.a, self.u):
            src = mat[source]
            dst = mat[target]
            for k in range(len(dst)):
                dst[k] = dst[k] + q * src[k]
        for row in self.u_inv:
            row[source] = row[source] - row[target] * q

    def add_col(self, target: int, source: int, q: Any) -> None:
        """col_target += q * col_source."""
        for mat in (self.a, self.v):
            for row in mat:
                row[target] = row[target] + q * row[source]
        src = self.v_inv[target]
        dst = self.v_inv[source]
        for k in range(len(dst)):
            dst[k] = dst[k] - q * src[k]

    def scale_row(self, i: int, unit: Any) -> None:
        inverse = self.ring.unit_inverse(unit)
        self.a[i] = [unit * x for x in self.a[i]]
        self.u[i] = [unit * x for x in self.u[i]]
        for row in self.u_inv:
            row[i] = row[i] * inverse


def smith_decomposition(
    matrix: Sequence[Sequence[Any]], ring: EuclideanRing[Any], cols: int | None = None
) -> SmithResult[Any]:
    """
    Smith normal form over a Euclidean ring with both transforms and inverses.

    `cols` must be given for matrices with zero rows.
    """
    n = cols if cols is not None else (len(matrix[0]) if matrix else 0)
    st = _SmithState([list(r) for r in matrix], n, ring)
    size = ring.size
    t = 0
    while t < min(st.m, st.n):
        pivot = _min_entry(st, t, t)
        if pivot is None:
            break
        st.swap_rows(t, pivot[0])
        st.swap_cols(t, pivot[1])
        while True:
            clean = True
            for i in range(t + 1, st.m):
                if not ring.is_zero(st.a[i][t]):
                    q, r = ring.divmod(st.a[i][t], st.a[t][t])
                    st.add_row(i, t, -q)
                    clean = clean and ring.is_zero(r)
            for j in range(t + 1, st.n):
                if not ring.is_zero(st.a[t][j]):
                    q, r = ring.divmod(st.a[t][j], st.a[t][t])
                    st.add_col(j, t, -q)
                    clean = clean and ring.is_zero(r)
            if not clean:
                best = _min_line_entry(st, t)
                if best is not None and size(best[2]) < size(st.a[t][t]):
                    st.swap_rows(t, best[0])
                    st.swap_cols(t, best[1])
                continue
            bad = _non_divisible_row(st, t)
            if bad is None:
                break
            st.add_row(t, bad, ring.one())
        t += 1
    rank = t
    for k in range(rank):
        _, unit = ring.normalize(st.a[k][k])
        st.scale_row(k, unit)
    result = SmithResult(
        diagonal=st.a,
        left=st.u,
        right=st.v,
        left_inverse=st.u_inv,
        right_inverse=st.v_inv,
        rank=rank,
    )
    logger.debug("smith_decomposition", ring=ring.name, rows=st.m, cols=st.n, rank=rank)
    return result


def _min_entry(st: _SmithState, r0: int, c0: int) -> tuple[int, int] | None:
    best: tuple[int, int] | None = None
    best_size = 0
    for i in range(r0, st.m):
        for j in range(c0, st.n):
            x = st.a[i][j]
            if st.ring.is_zero(x):
                continue
            s = st.ring.size(x)
            if best is None or s < best_size:
                best, best_size = (i, j), s
    return best


def _min_line_entry(st: _SmithState, t: int) -> tuple[int, int, Any] | None:
    best: tuple[int, int, Any] | None = None
    for i in range(t + 1, st.m):
        x = st.a[i][t]
        if not st.ring.is_zero(x) and (best is None or st.ring.size(x) < st.ring.size(best[2])):
            best = (i, t, x)
    for j in range(t + 1, st.n):
        x = st.a[t][j]
        if not st.ring.is_zero(x) and (best is None or st.ring.size(x) < st.ring.size(best[2])):
            best = (t, j, x)
    return best


def _non_divisible_row(st: _SmithState, t: int) -> int | None:
    pivot = st.a[t][t]
    for i in range(t + 1, st.m):
        for j in range(t + 1, st.n):
            x = st.a[i][j]
            if st.ring.is_zero(x):
                continue
            _, r = st.ring.divmod(x, pivot)
            if not st.ring.is_zero(r):
                return i
    return None


# ---------------------------------------------------------------------------
# Integer and rational systems
# ---------------------------------------------------------------------------


def _integer_rows(rows: Sequence[Sequence[Fraction | int]]) -> list[list[int]]:
    """Scale each row of a rational matrix to integers (row-wise, keeps solutions)."""
    out = []
    for row in rows:
        den = 1
        for x in row:
            den = lcm(den, Fraction(x).denominator)
        out.append([int(Fraction(x) * den) for x in row])
    return out


def _smith_zz(
    rows: list[list[int]], cols: int
) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    dm = DomainMatrix([[ZZ(x) for x in row] for row in rows], (len(rows), cols), ZZ)
    d, s, t = smith_normal_decomp(dm)
    as_int = lambda m: [[int(x) for x in row] for row in m.to_list()]  # noqa: E731
    return as_int(d), as_int(s), as_int(t)


def solve_integer(
    a: Sequence[Sequence[Fraction | int]], b: Sequence[Fraction | int], cols: int | None = None
) -> list[int] | None:
    """
    Find x ∈ Zⁿ with A·x = b, or None when no integer solution exists.

    Rows may be rational; each equation is scaled to integers first.
    """
    n = cols if cols is not None else (len(a[0]) if a else 0)
    if not a:
        return [0] * n
    augmented = _integer_rows([list(row) + [rhs] for row, rhs in zip(a, b, strict=True)])
    rows = [row[:-1] for row in augmented]
    rhs = [row[-1] for row in augmented]
    d, s, t = _smith_zz(rows, n)
    c = [sum(s[i][k] * rhs[k] for k in range(len(rhs))) for i in range(len(rhs))]
    y = [0] * n
    for i in range(len(rhs)):
        di = d[i][i] if i < n else 0
        if di == 0:
            if c[i] != 0:
                return None
            continue
        if c[i] % di:
            return None
        y[i] = c[i] // di
    return [sum(t[i][k] * y[k] for k in range(n)) for i in range(n)]


def integer_kernel(
    a: Sequence[Sequence[Fraction | int]], cols: int | None = None
) -> list[list[int]]:
    """Z-basis of {x ∈ Zⁿ : A·x = 0}; the lattice returned is saturated."""
    n = cols if cols is not None else (len(a[0]) if a else 0)
    if not a:
        return [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    rows = _integer_rows(a)
    d, _, t = _smith_zz(rows, n)
    free = [k for k in range(n) if k >= len(rows) or d[k][k] == 0]
    return [[t[i][k] for i in range(n)] for k in free]


def solve_rational(
    a: Sequence[Sequence[Fraction | int]], b: Sequence[Fraction | int], cols: int | None = None
) -> list[Fraction] | None:
    """Exact Gauss-Jordan elimination over Q; free variables are set to 0."""
    n = cols if cols is not None else (len(a[0]) if a else 0)
    rows = [[Fraction(x) for x in row] + [Fraction(rhs)] for row, rhs in zip(a, b, strict=True)]
    pivots: list[int] = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r], strict=True)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    if any(row[-1] != 0 for row in rows[r:]):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = rows[i][-1]
    return x


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    """Rank of an integer matrix reduced modulo the prime p."""
    if not rows:
        return 0
    return int(DomainMatrix.from_list([[x % p for x in row] for row in rows], GF(p)).rank())


# ---------------------------------------------------------------------------
# Lattice enumeration
# ---------------------------------------------------------------------------


def _quadratic_decomposition(gram: Sequence[Sequence[Fraction | int]]) -> list[list[Fraction]]:
    """Q(x) = Σ q_ii (x_i + Σ_{j>i} q_ij x_j)²; requires a positive-definite Gram matrix."""
    n = len(gram)
    q = [[Fraction(x) for x in row] for row in gram]
    for i in range(n):
        if q[i][i] <= 0:
            raise InvariantViolation("Gram matrix is not positive definite")
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for m in range(k, n):
                q[k][m] -= q[k][i] * q[i][m]
    return q


def short_vectors(
    gram: Sequence[Sequence[Fraction | int]], bound: Fraction | int
) -> list[tuple[int, ...]]:
    """All integer vectors x with xᵀ·G·x ≤ bound (Fincke–Pohst, exact)."""
    n = len(gram)
    q = _quadratic_decomposition(gram)
    found: list[tuple[int, ...]] = []
    x = [0] * n

    def search(i: int, remaining: Fraction) -> None:
        if i < 0:
            found.append(tuple(x))
            return
        center = -sum((q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        start = floor(center)
        for direction, first in ((1, start + 1), (-1, start)):
            k = first
            while True:
                cost = q[i][i] * (k - center) ** 2
                if cost > remaining:
                    break
                x[i] = k
                search(i - 1, remaining - cost)
                k += direction
        x[i] = 0

    search(n - 1, Fraction(bound))
    return sorted(found)


def content(values: Sequence[int]) -> int:
    """gcd of a list of integers (0 for the empty or all-zero list)."""
    g = 0
    for v in values:
        g = gcd(g, v)
    return g

"""
Finitely presented modules over Z and norm-Euclidean cyclotomic integers.

A module is given by a relation matrix: rows are relations, columns are
generators. Everything is computed from Smith decompositions: invariant
factors, tensor products, Tor_1 and the ends of the Künneth sequence.
"""

from __future__ import annotations

import json
import random
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import floor
from typing import Any

import structlog

from config import get_settings
from cyclotomic import CycNum, cyc_one, cyc_zero, zeta
from errors import InputError, InvariantViolation, RingMismatchError, UnsupportedRingError
from linalg import EuclideanRing, IntegerRing, Matrix, SmithResult, smith_decomposition
from models import SESSummary

logger = structlog.get_logger(__name__)

SUPPORTED_LEVELS = (1, 3, 4, 5, 8, 12)

# Units of infinite order generating the free part of the unit group together with
# the roots of unity, as power-basis coefficients.
_FUNDAMENTAL_UNITS: dict[int, tuple[int, ...]] = {
    5: (1, 1, 0, 0),  # 1 + ζ
    8: (1, 1, 0, -1),  # 1 + ζ + ζ⁷ = 1 + √2
    12: (1, -1, 0, 0),  # 1 − ζ
}


class CyclotomicIntegers:
    """Z[ζ_n] for a norm-Euclidean level n, elements as CycNum."""

    def __init__(self, n: int) -> None:
        if n == 2:
            n = 1
        if n not in SUPPORTED_LEVELS:
            raise UnsupportedRingError(
                f"Z[zeta_{n}] is not in the supported list {list(SUPPORTED_LEVELS)}"
            )
        self.n = n
        self.name = f"zeta{n}"
        self._roots = self._roots_of_unity()
        coeffs = _FUNDAMENTAL_UNITS.get(n)
        self._fundamental = CycNum.from_coeffs(n, coeffs) if coeffs else None

    def _roots_of_unity(self) -> list[CycNum]:
        powers = [zeta(self.n, j) for j in range(self.n)]
        if self.n % 2:
            powers += [-x for x in powers]
        return powers

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CyclotomicIntegers) and other.n == self.n

    def __hash__(self) -> int:
        return hash(self.name)

    def __repr__(self) -> str:
        return f"CyclotomicIntegers({self.n})"

    def zero(self) -> CycNum:
        return cyc_zero(self.n)

    def one(self) -> CycNum:
        return cyc_one(self.n)

    def is_zero(self, a: CycNum) -> bool:
        return a.is_zero()

    def size(self, a: CycNum) -> int:
        return abs(int(a.norm()))

    def is_unit(self, a: CycNum) -> bool:
        return not a.is_zero() and self.size(a) == 1

    def unit_inverse(self, u: CycNum) -> CycNum:
        return u.inverse()

    def divmod(self, a: CycNum, b: CycNum) -> tuple[CycNum, CycNum]:
        """Quotient by coefficient rounding, then the best neighbour if needed."""
        if b.is_zero():
            raise ZeroDivisionError("division by zero in Z[zeta]")
        exact = a / b
        rounded = [floor(c + Fraction(1, 2)) for c in exact.coeffs]
        q = CycNum.from_coeffs(self.n, rounded)
        r = a - q * b
        limit = self.size(b)
        if self.size(r) < limit:
            return q, r
        best = (self.size(r), q, r)
        for step in product((-1, 0, 1), repeat=len(rounded)):
            cand = CycNum.from_coeffs(self.n, [x + s for x, s in zip(rounded, step, strict=True)])
            rem = a - cand * b
            if self.size(rem) < best[0]:
                best = (self.size(rem), cand, rem)
        if best[0] >= limit:
            raise InvariantViolation(f"no Euclidean quotient for {a} by {b} in {self.name}")
        return best[1], best[2]

    def normalize(self, a: CycNum) -> tuple[CycNum, CycNum]:
        """
        (c, u) with c = u·a the canonical associate: least Tr(c·c̄), then least
        coefficient vector, over roots of unity times powers of the fundamental unit.
        """
        if a.is_zero():
            return a, self.one()
        shifts = [self.one()]
        if self._fundamental is not None:
            shifts = self._unit_descent(a)
        best: tuple[tuple[Fraction, tuple[Fraction, ...]], CycNum, CycNum] | None = None
        for shift in shifts:
            for root in self._roots:
                u = root * shift
                c = u * a
                key = (c.size(), c.coeffs)
                if best is None or key < best[0]:
                    best = (key, c, u)
        assert best is not None
        return best[1], best[2]

    def _unit_descent(self, a: CycNum) -> list[CycNum]:
        """Powers ε^k minimizing Tr(ε^k a · conj); the size is convex in k."""
        assert self._fundamental is not None
        eps, inv = self._fundamental, self._fundamental.inverse()
        shift = self.one()
        current = a.size()
        for step in (eps, inv):
            while True:
                trial = shift * step
                size = (trial * a).size()
                if size >= current:
                    break
                shift, current = trial, size
        ties = [shift]
        for step in (eps, inv):
            trial = shift * step
            if (trial * a).size() == current:
                ties.append(trial)
        return ties

    def element(self, value: Any) -> CycNum:
        """An int, or a coefficient list in powers of ζ (any length)."""
        if isinstance(value, bool):
            raise InputError(f"not a ring element: {value!r}")
        if isinstance(value, int):
            return CycNum.rational_const(self.n, value)
        if isinstance(value, list) and all(
            isinstance(c, int) and not isinstance(c, bool) for c in value
        ):
            return CycNum.from_poly(self.n, value or [0])
        raise InputError(f"not an element of {self.name}: {value!r}")

    def render(self, a: CycNum) -> str:
        return str(a)


def _integer_element(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"not an integer: {value!r}")
    return value


def parse_ring(text: str) -> EuclideanRing[Any]:
    """`z` for the integers, `zeta<n>` for Z[ζ_n]."""
    name = text.strip().lower()
    if name in ("z", "zz", "integers"):
        return IntegerRing()
    if name.startswith("zeta") and name[4:].isdigit():
        return CyclotomicIntegers(int(name[4:]))
    raise UnsupportedRingError(f"unknown ring {text!r}")


def ring_element(ring: EuclideanRing[Any], value: Any) -> Any:
    if isinstance(ring, CyclotomicIntegers):
        return ring.element(value)
    return _integer_element(value)


def render(ring: EuclideanRing[Any], a: Any) -> str:
    return ring.render(a) if isinstance(ring, CyclotomicIntegers) else str(a)


def ring_label(ring: EuclideanRing[Any]) -> str:
    if isinstance(ring, CyclotomicIntegers):
        return "Z" if ring.n == 1 else f"Z[zeta_{ring.n}]"
    return "Z"


# ---------------------------------------------------------------------------
# Modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModuleInvariants:
    """Non-unit invariant factors (canonical associates, dividing chain) and free rank."""

    torsion: tuple[Any, ...]
    rank: int


@dataclass(frozen=True)
class FPModule:
    """R^generators modulo the row span of `relations`."""

    ring: EuclideanRing[Any]
    relations: tuple[tuple[Any, ...], ...]
    generators: int

    def __post_init__(self) -> None:
        for row in self.relations:
            if len(row) != self.generators:
                raise InputError(
                    f"relation has {len(row)} entries, expected {self.generators}"
                )

    @classmethod
    def from_rows(
        cls, ring: EuclideanRing[Any], rows: Sequence[Sequence[Any]], generators: int | None = None
    ) -> FPModule:
        n = generators if generators is not None else (len(rows[0]) if rows else 0)
        return cls(ring, tuple(tuple(r) for r in rows), n)

    @classmethod
    def free(cls, ring: EuclideanRing[Any], rank: int) -> FPModule:
        return cls(ring, (), rank)

    @classmethod
    def cyclic(cls, ring: EuclideanRing[Any], d: Any) -> FPModule:
        """R/(d)."""
        return cls(ring, ((d,),), 1)

    @classmethod
    def zero(cls, ring: EuclideanRing[Any]) -> FPModule:
        return cls(ring, (), 0)

    @cached_property
    def smith(self) -> SmithResult[Any]:
        matrix = [list(r) for r in self.relations]
        result = smith_decomposition(matrix, self.ring, cols=self.generators)
        if get_settings().check_transforms and not result.verify(matrix, self.ring):
            raise InvariantViolation("Smith transforms failed re-verification")
        return result

    def invariants(self) -> ModuleInvariants:
        diag = self.smith.invariants
        torsion = tuple(d for d in diag if not self.ring.is_unit(d))
        return ModuleInvariants(torsion, self.generators - self.smith.rank)

    @property
    def rank(self) -> int:
        return self.invariants().rank

    def torsion_order(self) -> int:
        total = 1
        for d in self.invariants().torsion:
            total *= self.ring.size(d)
        return total

    def is_zero(self) -> bool:
        inv = self.invariants()
        return inv.rank == 0 and not inv.torsion

    def is_isomorphic(self, other: FPModule) -> bool:
        _same_ring(self, other)
        return self.invariants() == other.invariants()

    def canonical(self) -> FPModule:
        """The diagonal presentation ⊕ R/(d_i) ⊕ R^rank."""
        inv = self.invariants()
        size = len(inv.torsion) + inv.rank
        zero = self.ring.zero()
        rows = [
            tuple(d if j == i else zero for j in range(size)) for i, d in enumerate(inv.torsion)
        ]
        return FPModule(self.ring, tuple(rows), size)

    def describe(self) -> list[str]:
        """Invariant factors as text: one entry per torsion summand, then the free part."""
        inv = self.invariants()
        out = [render(self.ring, d) for d in inv.torsion]
        if inv.rank:
            out.append(f"free^{inv.rank}")
        return out

    def random_unimodular_moves(self, seed: int, moves: int = 6) -> tuple[FPModule, list[str]]:
        """An isomorphic presentation reached by recorded elementary row and column moves."""
        rng = random.Random(seed)
        rows = [list(r) for r in self.relations]
        n = self.generators
        log: list[str] = []
        for _ in range(moves):
            kind = rng.choice(("row_add", "col_add", "row_swap", "col_swap", "row_extra"))
            k = ring_element(self.ring, rng.choice((-2, -1, 1, 2)))
            if kind == "row_add" and len(rows) > 1:
                i, j = rng.sample(range(len(rows)), 2)
                rows[i] = [a + k * b for a, b in zip(rows[i], rows[j], strict=True)]
                log.append(f"row {i} += {k} * row {j}")
            elif kind == "col_add" and n > 1:
                i, j = rng.sample(range(n), 2)
                for row in rows:
                    row[i] = row[i] + k * row[j]
                log.append(f"col {i} += {k} * col {j}")
            elif kind == "row_swap" and len(rows) > 1:
                i, j = rng.sample(range(len(rows)), 2)
                rows[i], rows[j] = rows[j], rows[i]
                log.append(f"swap rows {i}, {j}")
            elif kind == "col_swap" and n > 1:
                i, j = rng.sample(range(n), 2)
                for row in rows:
                    row[i], row[j] = row[j], row[i]
                log.append(f"swap cols {i}, {j}")
            elif kind == "row_extra" and rows:
                j = rng.randrange(len(rows))
                rows.append([k * b for b in rows[j]])
                log.append(f"append {k} * row {j}")
        return FPModule.from_rows(self.ring, rows, n), log


def parse_module(ring: EuclideanRing[Any], text: str) -> FPModule:
    """A JSON array of relation rows; `[]` is the zero module, `[[0]]` is R."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"matrix is not valid JSON: {exc}") from exc
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise InputError("matrix must be a JSON array of rows")
    rows = [[ring_element(ring, v) for v in r] for r in data]
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise InputError("matrix rows have different lengths")
    return FPModule.from_rows(ring, rows)


def _same_ring(M: FPModule, N: FPModule) -> None:
    if M.ring != N.ring:
        raise RingMismatchError(f"{M.ring!r} and {N.ring!r} differ")


def _block_diagonal(modules: Sequence[FPModule], ring: EuclideanRing[Any]) -> FPModule:
    total = sum(m.generators for m in modules)
    zero = ring.zero()
    rows: list[tuple[Any, ...]] = []
    offset = 0
    for m in modules:
        for r in m.relations:
            rows.append((zero,) * offset + r + (zero,) * (total - offset - m.generators))
        offset += m.generators
    return FPModule(ring, tuple(rows), total)


def tensor(M: FPModule, N: FPModule) -> FPModule:
    """Relations A ⊗ 1 stacked over 1 ⊗ B on generators m ⊗ n, canonicalized."""
    _same_ring(M, N)
    ring = M.ring
    m, n = M.generators, N.generators
    zero = ring.zero()
    rows: list[list[Any]] = []
    for a in M.relations:
        for j in range(n):
            rows.append([a[i] if jj == j else zero for i in range(m) for jj in range(n)])
    for i in range(m):
        for b in N.relations:
            rows.append([b[jj] if ii == i else zero for ii in range(m) for jj in range(n)])
    return FPModule.from_rows(ring, rows, m * n).canonical()


def _row_kernel(matrix: Matrix, ring: EuclideanRing[Any], cols: int) -> list[list[Any]]:
    """A basis of {v : v·matrix = 0}: the rows of U past the rank."""
    smith = smith_decomposition(matrix, ring, cols=cols)
    return [list(smith.left[i]) for i in range(smith.rank, len(matrix))]


def _torsion_part(N: FPModule, d: Any) -> FPModule:
    """N[d] = {x : d·x = 0}, presented over a basis of its preimage in R^n."""
    ring = N.ring
    n = N.generators
    if n == 0:
        return FPModule.zero(ring)
    zero = ring.zero()
    stacked = [[d if i == j else zero for j in range(n)] for i in range(n)]
    stacked += [[-x for x in row] for row in N.relations]
    preimage = [v[:n] for v in _row_kernel(stacked, ring, n)]
    smith = smith_decomposition(preimage, ring, cols=n)
    r = smith.rank
    scales = [smith.diagonal[i][i] for i in range(r)]
    relations = []
    for b in N.relations:
        image = [sum((b[k] * smith.right[k][j] for k in range(n)), zero) for j in range(n)]
        coords = []
        for j, s in enumerate(scales):
            q, rem = ring.divmod(image[j], s)
            if not ring.is_zero(rem):
                raise InvariantViolation("relation does not lie in the d-torsion preimage")
            coords.append(q)
        if any(not ring.is_zero(x) for x in image[r:]):
            raise InvariantViolation("relation has a component outside the preimage")
        relations.append(tuple(coords))
    return FPModule(ring, tuple(relations), r)


def tor1(M: FPModule, N: FPModule) -> FPModule:
    """
    Tor_1(M, N) from the resolution 0 → R^k → R^k → M_tors → 0 of M's invariant
    factors: the kernel of diag(d_i) ⊗ N, i.e. ⊕ N[d_i].
    """
    _same_ring(M, N)
    parts = [_torsion_part(N, d) for d in M.invariants().torsion]
    result = _block_diagonal(parts, M.ring).canonical()
    logger.debug("tor1_computed", ring=M.ring.name, invariants=result.describe())
    return result


def _gcd(ring: EuclideanRing[Any], a: Any, b: Any) -> Any:
    while not ring.is_zero(b):
        _, r = ring.divmod(a, b)
        a, b = b, r
    return ring.normalize(a)[0]


def tor1_by_invariants(M: FPModule, N: FPModule) -> FPModule:
    """⊕_{i,j} R/(gcd(d_i, e_j)) over the torsion invariants of M and N."""
    _same_ring(M, N)
    ring = M.ring
    parts = [
        FPModule.cyclic(ring, _gcd(ring, d, e))
        for d in M.invariants().torsion
        for e in N.invariants().torsion
    ]
    return _block_diagonal(parts, ring).canonical()


def is_flat(M: FPModule) -> bool:
    """Free modules are exactly the flat ones; cross-checked against Tor_1(M, M) = 0."""
    free = not M.invariants().torsion
    if free != tor1(M, M).is_zero():
        raise InvariantViolation("flatness and Tor_1(M, M) = 0 disagree")
    return free


def kunneth_ends(M: FPModule, N: FPModule) -> tuple[FPModule, FPModule]:
    """(M ⊗ N, Tor_1(M, N)), the outer terms of the Künneth sequence."""
    return tensor(M, N), tor1(M, N)


@dataclass(frozen=True)
class SESReport:
    left: FPModule
    right: FPModule
    middle: FPModule
    rank_additive: bool
    torsion_multiplicative: bool
    split_forced: bool

    @property
    def consistent(self) -> bool:
        return self.rank_additive and self.torsion_multiplicative and self.split_forced

    def summary(self) -> SESSummary:
        return SESSummary(
            ring=ring_label(self.left.ring),
            left=self.left.describe(),
            middle=self.middle.describe(),
            right=self.right.describe(),
            exact=self.consistent,
        )


def verify_ses(ends: tuple[FPModule, FPModule], middle: FPModule) -> SESReport:
    """Necessary conditions for 0 → left → middle → right → 0: rank and torsion order."""
    left, right = ends
    _same_ring(left, middle)
    _same_ring(right, middle)
    rank_ok = middle.rank == left.rank + right.rank
    torsion_ok = middle.torsion_order() == left.torsion_order() * right.torsion_order()
    # with a zero quotient the middle term is the left one
    forced = not right.is_zero() or middle.is_isomorphic(left)
    report = SESReport(left, right, middle, rank_ok, torsion_ok, forced)
    logger.debug("ses_checked", ring=middle.ring.name, consistent=report.consistent)
    return report


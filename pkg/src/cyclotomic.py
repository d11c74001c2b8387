"""
Exact arithmetic in cyclotomic fields Q(ζ_n).

Elements are stored in the power basis 1, ζ, ..., ζ^{φ(n)−1} as an integer
numerator vector over one positive common denominator. Products reduce through
a per-level table of ζ^k mod Φ_n, so no polynomial division happens at runtime.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd

import structlog
from sympy import Matrix, Poly, cyclotomic_poly, factorint, symbols, totient
from sympy.matrices.normalforms import hermite_normal_form

from errors import DivisibilityError, InputError, InvariantViolation
from linalg import integer_kernel, solve_integer, solve_rational

logger = structlog.get_logger(__name__)

T = symbols("t")

Scalar = int | Fraction


# ---------------------------------------------------------------------------
# Cyclotomic polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CyclotomicPoly:
    """Φ_n with integer coefficients, constant term first."""

    index: int
    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def evaluate(self, x: Scalar) -> Scalar:
        acc: Scalar = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def as_poly(self) -> Poly:
        return Poly(list(reversed(self.coeffs)), T)

    def __str__(self) -> str:
        return format_poly(self.coeffs)


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> CyclotomicPoly:
    """Φ_n; Π_{d|n} Φ_d = tⁿ − 1."""
    if n < 1:
        raise InputError(f"cyclotomic index must be positive, got {n}")
    coeffs = Poly(cyclotomic_poly(n, T), T).all_coeffs()
    return CyclotomicPoly(n, tuple(int(c) for c in reversed(coeffs)))


def euler_phi(n: int) -> int:
    return int(totient(n))


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def prime_power(n: int) -> tuple[int, int] | None:
    """(p, m) with n = p^m, m ≥ 1; None otherwise."""
    factors = factorint(n)
    if len(factors) != 1:
        return None
    ((p, m),) = factors.items()
    return int(p), int(m)


def format_poly(coeffs: Sequence[Scalar], var: str = "t") -> str:
    """Render as ``a0 + a1*t + a2*t^2``; zero terms are omitted."""
    terms = []
    for i, c in enumerate(coeffs):
        c = Fraction(c)
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            text = str(c)
        elif c == 1:
            text = mono
        elif c == -1:
            text = f"-{mono}"
        else:
            text = f"{c}*{mono}"
        terms.append(text)
    if not terms:
        return "0"
    out = terms[0]
    for term in terms[1:]:
        out += f" - {term[1:]}" if term.startswith("-") else f" + {term}"
    return out


# ---------------------------------------------------------------------------
# Field elements
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row k is ζ_n^k reduced mod Φ_n, for 0 ≤ k < n."""
    phi = cyclotomic(n)
    deg = phi.degree
    rows = []
    v = [1] + [0] * (deg - 1)
    for _ in range(n):
        rows.append(tuple(v))
        top = v[-1]
        v = [0] + v[:-1]
        if top:
            # ζ^deg = −(c_0 + ... + c_{deg−1} ζ^{deg−1})
            v = [x - top * c for x, c in zip(v, phi.coeffs[:-1], strict=True)]
    return tuple(rows)


@lru_cache(maxsize=None)
def unit_residues(n: int) -> tuple[int, ...]:
    return tuple(j for j in range(1, n + 1) if gcd(j, n) == 1) if n > 1 else (1,)


def _normalize(num: Sequence[int], den: int) -> tuple[tuple[int, ...], int]:
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den < 0:
        num, den = [-x for x in num], -den
    g = den
    for x in num:
        g = gcd(g, x)
    if g > 1:
        num, den = [x // g for x in num], den // g
    return tuple(num), den


def _common(values: Iterable[Scalar]) -> tuple[list[int], int]:
    fracs = [Fraction(v) for v in values]
    den = 1
    for f in fracs:
        den = den * f.denominator // gcd(den, f.denominator)
    return [int(f * den) for f in fracs], den


@dataclass(frozen=True)
class CycNum:
    """An element of Q(ζ_level)."""

    level: int
    num: tuple[int, ...]
    den: int = 1

    # -- construction --------------------------------------------------------

    @classmethod
    def from_coeffs(cls, level: int, coeffs: Sequence[Scalar]) -> CycNum:
        """From power-basis coefficients (length φ(level))."""
        if len(coeffs) != euler_phi(level):
            raise InputError(f"level {level} needs {euler_phi(level)} coefficients")
        num, den = _common(coeffs)
        return cls(level, *_normalize(num, den))

    @classmethod
    def from_poly(cls, level: int, coeffs: Sequence[Scalar]) -> CycNum:
        """Evaluate Σ c_k t^k at t = ζ_level (any length; exponents wrap mod level)."""
        table = _power_table(level)
        num, den = _common(coeffs)
        acc = [0] * euler_phi(level)
        for k, c in enumerate(num):
            if c:
                for i, x in enumerate(table[k % level]):
                    acc[i] += c * x
        return cls(level, *_normalize(acc, den))

    @classmethod
    def rational_const(cls, level: int, value: Scalar) -> CycNum:
        v = Fraction(value)
        return cls(level, (v.numerator,) + (0,) * (euler_phi(level) - 1), v.denominator)

    # -- views ----------------------------------------------------------------

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.den) for x in self.num)

    @property
    def degree(self) -> int:
        return len(self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_integral(self) -> bool:
        return self.den == 1

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise InputError(f"{self} is not rational")
        return Fraction(self.num[0], self.den)

    def __str__(self) -> str:
        return format_poly(self.coeffs, var=f"z{self.level}")

    # -- ring operations -------------------------------------------------------

    def _coerce(self, other: object) -> CycNum | None:
        if isinstance(other, CycNum):
            if other.level != self.level:
                raise InputError(f"level mismatch: {self.level} vs {other.level}")
            return other
        if isinstance(other, int | Fraction):
            return CycNum.rational_const(self.level, other)
        return None

    def __add__(self, other: object) -> CycNum:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        num = [a * o.den + b * self.den for a, b in zip(self.num, o.num, strict=True)]
        return CycNum(self.level, *_normalize(num, self.den * o.den))

    __radd__ = __add__

    def __neg__(self) -> CycNum:
        return CycNum(self.level, tuple(-x for x in self.num), self.den)

    def __sub__(self, other: object) -> CycNum:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> CycNum:
        return (-self) + other

    def __mul__(self, other: object) -> CycNum:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        table = _power_table(self.level)
        acc = [0] * self.degree
        for i, a in enumerate(self.num):
            if not a:
                continue
            for j, b in enumerate(o.num):
                if b:
                    ab = a * b
                    for k, x in enumerate(table[(i + j) % self.level]):
                        if x:
                            acc[k] += ab * x
        return CycNum(self.level, *_normalize(acc, self.den * o.den))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> CycNum:
        if k < 0:
            return self.inverse() ** (-k)
        result = CycNum.rational_const(self.level, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other: object) -> CycNum:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    # -- Galois structure -------------------------------------------------------

    def galois(self, j: int) -> CycNum:
        """σ_j: ζ ↦ ζ^j, for j coprime to the level."""
        n = self.level
        if gcd(j, n) != 1:
            raise InputError(f"{j} is not coprime to {n}")
        table = _power_table(n)
        acc = [0] * self.degree
        for i, a in enumerate(self.num):
            if a:
                for k, x in enumerate(table[(i * j) % n]):
                    acc[k] += a * x
        return CycNum(n, tuple(acc), self.den)

    def conjugate(self) -> CycNum:
        return self.galois(-1)

    @cached_property
    def _other_conjugates(self) -> CycNum:
        result = CycNum.rational_const(self.level, 1)
        for j in unit_residues(self.level)[1:]:
            result = result * self.galois(j)
        return result

    def norm(self) -> Fraction:
        """Product of all Galois conjugates."""
        return (self * self._other_conjugates).rational()

    def trace(self) -> Fraction:
        total = CycNum.rational_const(self.level, 0)
        for j in unit_residues(self.level):
            total = total + self.galois(j)
        return total.rational()

    def size(self) -> Fraction:
        """Tr(x·x̄), a positive-definite quadratic form."""
        return (self * self.conjugate()).trace()

    def inverse(self) -> CycNum:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self._other_conjugates * (1 / self.norm())

    # -- change of level -----------------------------------------------------

    def embed(self, m: int) -> CycNum:
        """The same number viewed at level m (level | m)."""
        if m % self.level:
            raise DivisibilityError(f"{self.level} does not divide {m}")
        step = m // self.level
        coeffs = [0] * (self.level * step)
        for i, a in enumerate(self.num):
            coeffs[i * step] = a
        return CycNum.from_poly(m, coeffs) * Fraction(1, self.den)

    def descend(self, d: int) -> CycNum:
        """The same number at level d (d | level); raises when it is not in Q(ζ_d)."""
        n = self.level
        if n % d:
            raise DivisibilityError(f"{d} does not divide {n}")
        if d == n:
            return self
        columns = [zeta(d, i).embed(n).coeffs for i in range(euler_phi(d))]
        matrix = [[col[r] for col in columns] for r in range(self.degree)]
        solution = solve_rational(matrix, list(self.coeffs), cols=len(columns))
        if solution is None:
            raise InputError(f"{self} does not lie in Q(zeta_{d})")
        return CycNum.from_coeffs(d, solution)


def zeta(n: int, k: int = 1) -> CycNum:
    """ζ_n^k."""
    return CycNum(n, _power_table(n)[k % n])


def cyc_zero(n: int) -> CycNum:
    return CycNum.rational_const(n, 0)


def cyc_one(n: int) -> CycNum:
    return CycNum.rational_const(n, 1)


def norm(x: CycNum) -> Fraction:
    return x.norm()


# ---------------------------------------------------------------------------
# Q[t]/(tⁿ − 1) and the idempotents ψ_k
# ---------------------------------------------------------------------------


def cyclic_convolve(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """Product in Z[t]/(tⁿ − 1) on coefficient vectors of length n."""
    out = [0] * n
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[(i + j) % n] += x * y
    return out


def _n_power_denominator(den: int, n: int) -> bool:
    primes = set(factorint(n)) if n > 1 else set()
    return set(factorint(den)) <= primes


@dataclass(frozen=True)
class RationalCyclicPoly:
    """An element of Z[t, 1/n]/(tⁿ − 1) as n rational coefficients."""

    modulus: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.modulus:
            raise InputError(f"need {self.modulus} coefficients, got {len(self.coeffs)}")
        for c in self.coeffs:
            if not _n_power_denominator(c.denominator, self.modulus):
                raise InvariantViolation(
                    f"denominator {c.denominator} does not divide a power of {self.modulus}"
                )

    @classmethod
    def from_values(cls, modulus: int, values: Sequence[Scalar]) -> RationalCyclicPoly:
        padded = [Fraction(v) for v in values] + [Fraction(0)] * (modulus - len(values))
        folded = [Fraction(0)] * modulus
        for k, v in enumerate(padded):
            folded[k % modulus] += v
        return cls(modulus, tuple(folded))

    def __add__(self, other: RationalCyclicPoly) -> RationalCyclicPoly:
        return RationalCyclicPoly(
            self.modulus, tuple(a + b for a, b in zip(self.coeffs, other.coeffs, strict=True))
        )

    def __sub__(self, other: RationalCyclicPoly) -> RationalCyclicPoly:
        return RationalCyclicPoly(
            self.modulus, tuple(a - b for a, b in zip(self.coeffs, other.coeffs, strict=True))
        )

    def __mul__(self, other: RationalCyclicPoly) -> RationalCyclicPoly:
        if other.modulus != self.modulus:
            raise InputError("modulus mismatch")
        an, ad = _common(self.coeffs)
        bn, bd = _common(other.coeffs)
        prod = cyclic_convolve(an, bn, self.modulus)
        return RationalCyclicPoly(self.modulus, tuple(Fraction(x, ad * bd) for x in prod))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __str__(self) -> str:
        return format_poly(self.coeffs)


@lru_cache(maxsize=None)
def psi_idempotent(k: int, n: int) -> RationalCyclicPoly:
    """ψ_k = t(tⁿ − 1)·Φ_k′ / (n·Φ_k) reduced mod tⁿ − 1."""
    if n < 1 or k < 1 or n % k:
        raise DivisibilityError(f"{k} does not divide {n}")
    phi = cyclotomic(k).as_poly()
    quotient, remainder = Poly(T**n - 1, T).div(phi)
    if not remainder.is_zero:
        raise InvariantViolation(f"Phi_{k} does not divide t^{n} - 1")
    numerator = (Poly(T, T) * quotient * phi.diff(T)).all_coeffs()
    ascending = [Fraction(int(c), n) for c in reversed(numerator)]
    psi = RationalCyclicPoly.from_values(n, ascending)
    logger.debug("psi_idempotent", k=k, n=n, psi=str(psi))
    return psi


# ---------------------------------------------------------------------------
# Fixed sublattices under Galois subgroups
# ---------------------------------------------------------------------------


def galois_matrix(n: int, j: int) -> list[list[int]]:
    """Matrix of σ_j on the power basis (column i is σ_j(ζ^i))."""
    columns = [zeta(n, i).galois(j).num for i in range(euler_phi(n))]
    return [[col[r] for col in columns] for r in range(euler_phi(n))]


def fixed_sublattice(n: int, W: Iterable[int]) -> list[CycNum]:
    """
    Z-basis of Z[ζ_n]^W in column Hermite normal form.

    The basis is the integer kernel of the stacked maps σ_j − id, reduced to HNF
    so that equal lattices always return identical bases.
    """
    ws = sorted({j % n if n > 1 else 0 for j in W})
    for j in ws:
        if gcd(j, n) != 1:
            raise InputError(f"{j} is not coprime to {n}")
    size = euler_phi(n)
    stacked: list[list[int]] = []
    for j in ws:
        sigma = galois_matrix(n, j)
        stacked.extend(
            [sigma[r][c] - (1 if r == c else 0) for c in range(size)] for r in range(size)
        )
    kernel = integer_kernel(stacked, cols=size) if stacked else []
    if not stacked:
        kernel = [[1 if i == c else 0 for i in range(size)] for c in range(size)]
    columns = Matrix(size, len(kernel), lambda r, c: kernel[c][r])
    hnf = hermite_normal_form(columns)
    basis = [CycNum(n, tuple(int(hnf[r, c]) for r in range(size))) for c in range(hnf.shape[1])]
    logger.debug("fixed_sublattice", level=n, group=ws, rank=len(basis))
    return basis


def lattice_coordinates(basis: Sequence[CycNum], x: CycNum) -> list[int] | None:
    """Integer coordinates of x in the given basis, or None when x is not in the lattice."""
    if not basis:
        return [] if x.is_zero() else None
    matrix = [[b.coeffs[r] for b in basis] for r in range(x.degree)]
    return solve_integer(matrix, list(x.coeffs), cols=len(basis))

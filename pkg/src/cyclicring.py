"""
The representation ring of a cyclic group, R(Z/n) = Z[t]/(tⁿ − 1), together with
its restriction and induction maps, the projections to Z[ζ_{p^m}] and to
Z[t]/(t^{p^{m−1}} − 1, p), and the p-local splitting of R(Z/p^m).
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import structlog
from sympy import factorint, isprime

from cyclotomic import (
    CycNum,
    RationalCyclicPoly,
    cyclic_convolve,
    cyclotomic,
    format_poly,
    prime_power,
    psi_idempotent,
)
from errors import DivisibilityError, InputError, NotPrimePowerError
from linalg import rank_mod_p

logger = structlog.get_logger(__name__)


def _normalize(num: Sequence[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        num, den = [-x for x in num], -den
    g = den
    for x in num:
        g = gcd(g, x)
    if g > 1:
        num, den = [x // g for x in num], den // g
    return tuple(num), den


@dataclass(frozen=True)
class CyclicRingElem:
    """
    Σ (num[j]/den)·t^j in Q[t]/(tⁿ − 1).

    Integral elements have den == 1; localized elements carry their denominator
    explicitly and stay in lowest terms.
    """

    modulus: int
    num: tuple[int, ...]
    den: int = 1

    @classmethod
    def from_coeffs(cls, modulus: int, coeffs: Sequence[int | Fraction]) -> CyclicRingElem:
        """Coefficients of t⁰, t¹, ...; exponents at or above the modulus wrap around."""
        if modulus < 1:
            raise InputError(f"modulus must be positive, got {modulus}")
        fracs = [Fraction(c) for c in coeffs]
        den = 1
        for f in fracs:
            den = den * f.denominator // gcd(den, f.denominator)
        folded = [0] * modulus
        for k, f in enumerate(fracs):
            folded[k % modulus] += int(f * den)
        return cls(modulus, *_normalize(folded, den))

    @classmethod
    def constant(cls, modulus: int, value: int | Fraction) -> CyclicRingElem:
        return cls.from_coeffs(modulus, [value])

    @classmethod
    def t_power(cls, modulus: int, k: int = 1) -> CyclicRingElem:
        coeffs = [0] * modulus
        coeffs[k % modulus] = 1
        return cls(modulus, tuple(coeffs))

    @classmethod
    def from_rational_poly(cls, poly: RationalCyclicPoly) -> CyclicRingElem:
        return cls.from_coeffs(poly.modulus, poly.coeffs)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.den) for x in self.num)

    def is_integral(self) -> bool:
        return self.den == 1

    def is_zero(self) -> bool:
        return not any(self.num)

    def dimension(self) -> Fraction:
        """f(1), the ring map R(Z/n) → Z."""
        return Fraction(sum(self.num), self.den)

    def denominator_primes(self) -> set[int]:
        return set(factorint(self.den))

    def __str__(self) -> str:
        return format_poly(self.coeffs)

    def _coerce(self, other: object) -> CyclicRingElem | None:
        if isinstance(other, CyclicRingElem):
            if other.modulus != self.modulus:
                raise InputError(f"modulus mismatch: {self.modulus} vs {other.modulus}")
            return other
        if isinstance(other, int | Fraction):
            return CyclicRingElem.constant(self.modulus, other)
        return None

    def __add__(self, other: object) -> CyclicRingElem:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        num = [a * o.den + b * self.den for a, b in zip(self.num, o.num, strict=True)]
        return CyclicRingElem(self.modulus, *_normalize(num, self.den * o.den))

    __radd__ = __add__

    def __neg__(self) -> CyclicRingElem:
        return CyclicRingElem(self.modulus, tuple(-x for x in self.num), self.den)

    def __sub__(self, other: object) -> CyclicRingElem:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> CyclicRingElem:
        return (-self) + other

    def __mul__(self, other: object) -> CyclicRingElem:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        prod = cyclic_convolve(self.num, o.num, self.modulus)
        return CyclicRingElem(self.modulus, *_normalize(prod, self.den * o.den))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> CyclicRingElem:
        if k < 0:
            raise InputError("negative powers are not defined in R(Z/n)")
        result = CyclicRingElem.constant(self.modulus, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result


@dataclass(frozen=True)
class ModularCyclicElem:
    """An element of Z[t]/(tᵐ − 1, p), coefficients in 0..p−1."""

    modulus: int
    prime: int
    coeffs: tuple[int, ...]

    def __add__(self, other: ModularCyclicElem) -> ModularCyclicElem:
        p = self.prime
        summed = tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs, strict=True))
        return ModularCyclicElem(self.modulus, p, summed)

    def __mul__(self, other: ModularCyclicElem) -> ModularCyclicElem:
        prod = cyclic_convolve(self.coeffs, other.coeffs, self.modulus)
        return ModularCyclicElem(self.modulus, self.prime, tuple(x % self.prime for x in prod))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def multiplication_matrix(self) -> list[list[int]]:
        m = self.modulus
        # column j holds f·t^j
        columns = [self.coeffs[-j:] + self.coeffs[:-j] if j else self.coeffs for j in range(m)]
        return [[columns[c][r] for c in range(m)] for r in range(m)]

    def is_unit(self) -> bool:
        return rank_mod_p(self.multiplication_matrix(), self.prime) == self.modulus

    def __str__(self) -> str:
        return f"[{format_poly(self.coeffs)}] mod {self.prime}"


# ---------------------------------------------------------------------------
# Restriction and induction
# ---------------------------------------------------------------------------


def res_cyclic(f: CyclicRingElem, d: int) -> CyclicRingElem:
    """Restriction to the subgroup of order d: t ↦ t with exponents reduced mod d."""
    if d < 1 or f.modulus % d:
        raise DivisibilityError(f"{d} does not divide {f.modulus}")
    folded = [0] * d
    for k, c in enumerate(f.num):
        folded[k % d] += c
    return CyclicRingElem(d, *_normalize(folded, f.den))


def ind_cyclic(h: CyclicRingElem, n: int) -> CyclicRingElem:
    """Induction from Z/d to Z/n: t_d^j ↦ Σ_i t^{j + d·i}."""
    d = h.modulus
    if n < 1 or n % d:
        raise DivisibilityError(f"{d} does not divide {n}")
    out = [0] * n
    for j, c in enumerate(h.num):
        if c:
            for i in range(n // d):
                out[j + d * i] += c
    return CyclicRingElem(n, tuple(out), h.den)


def _require_prime_power(n: int, *, allow_one: bool = False) -> tuple[int, int]:
    if n == 1 and allow_one:
        return 1, 0
    pm = prime_power(n)
    if pm is None:
        raise NotPrimePowerError(f"{n} is not a prime power")
    return pm


def component(f: CyclicRingElem, k: int) -> CycNum:
    """The image of f in Q(ζ_k) under t ↦ ζ_k, for k | n."""
    if f.modulus % k:
        raise DivisibilityError(f"{k} does not divide {f.modulus}")
    return CycNum.from_poly(k, f.coeffs)


def mod_phi(f: CyclicRingElem) -> CycNum:
    """Reduction modulo Φ_{p^m}, landing in Z[ζ_{p^m}] (or Q(ζ) for localized f)."""
    _require_prime_power(f.modulus, allow_one=True)
    return component(f, f.modulus)


def power_basis_lift(a: CycNum, n: int | None = None) -> CyclicRingElem:
    """The lift Σ a_i ζ^i ↦ Σ a_i t^i into Q[t]/(tⁿ − 1), n defaulting to the level."""
    modulus = n if n is not None else a.level
    return CyclicRingElem.from_coeffs(modulus, a.coeffs)


# ---------------------------------------------------------------------------
# Reduction modulo p
# ---------------------------------------------------------------------------


def _require_prime(p: int) -> None:
    if not isprime(p):
        raise InputError(f"{p} is not prime")


def _mod_p_coeffs(coeffs: Sequence[Fraction], p: int) -> tuple[int, ...]:
    out = []
    for c in coeffs:
        if c.denominator % p == 0:
            raise DivisibilityError(f"denominator {c.denominator} is divisible by {p}")
        out.append(c.numerator * pow(c.denominator, -1, p) % p)
    return tuple(out)


def reduce_mod_p(f: CyclicRingElem, p: int) -> ModularCyclicElem:
    """The class [f] in Z[t]/(tⁿ − 1, p)."""
    _require_prime(p)
    return ModularCyclicElem(f.modulus, p, _mod_p_coeffs(f.coeffs, p))


def pi_map(x: CycNum) -> ModularCyclicElem:
    """
    Z[ζ_{p^m}] → Z[t]/(t^{p^{m−1}} − 1, p).

    Lift through the power basis, fold exponents mod p^{m−1}, reduce mod p.
    Well defined because Φ_{p^m} ≡ p modulo t^{p^{m−1}} − 1.
    """
    p, m = _require_prime_power(x.level)
    sub = p ** (m - 1)
    return reduce_mod_p(res_cyclic(power_basis_lift(x), sub), p)


def unit_in_modular_quotient(f: CyclicRingElem, p: int) -> bool:
    """Whether [f] is invertible in Z[t]/(tᵐ − 1, p)."""
    return reduce_mod_p(f, p).is_unit()


# ---------------------------------------------------------------------------
# The p-local splitting R(Z/p^m)[1/p] = Z[ζ_{p^m}, 1/p] × R(Z/p^{m−1})[1/p]
# ---------------------------------------------------------------------------


def _require_p_local(f: CyclicRingElem, p: int) -> None:
    if not f.denominator_primes() <= {p}:
        raise DivisibilityError(f"{f} has denominators that are not powers of {p}")


def phi_over_p(n: int) -> CyclicRingElem:
    p, _ = _require_prime_power(n)
    return CyclicRingElem.from_coeffs(n, [Fraction(c, p) for c in cyclotomic(n).coeffs])


def split_idempotent(n: int) -> CyclicRingElem:
    """e = 1 − Φ_{p^m}/p: maps to (1, 0) under (mod_phi, res)."""
    return 1 - phi_over_p(n)


def split_decomposition(f: CyclicRingElem) -> tuple[CycNum, CyclicRingElem]:
    """(mod_phi(f), res(f)) for f in R(Z/p^m) with p-power denominators."""
    p, m = _require_prime_power(f.modulus)
    _require_p_local(f, p)
    return mod_phi(f), res_cyclic(f, p ** (m - 1))


def unsplit(a: CycNum, b: CyclicRingElem) -> CyclicRingElem:
    """Inverse of split_decomposition: e·lift(a) + (Φ/p)·section(b)."""
    n = a.level
    p, m = _require_prime_power(n)
    if b.modulus != p ** (m - 1):
        raise DivisibilityError(f"second component must live mod {p ** (m - 1)}")
    for part in (power_basis_lift(a), b):
        _require_p_local(part, p)
    section = CyclicRingElem.from_coeffs(n, b.coeffs)
    return split_idempotent(n) * power_basis_lift(a) + phi_over_p(n) * section


def cyclic_lift(f: CycNum, h: CyclicRingElem) -> CyclicRingElem:
    """
    An integral f̃ ∈ R(Z/p^m) with mod_phi(f̃) = f and res(f̃) = h.

    Needs f ∈ Z[ζ_{p^m}], h ∈ R(Z/p^{m−1}) and π(f) = [h].
    """
    n = f.level
    p, m = _require_prime_power(n)
    if not f.is_integral() or not h.is_integral():
        raise DivisibilityError("cyclic_lift needs integral inputs")
    if h.modulus != p ** (m - 1):
        raise DivisibilityError(f"h must live mod {p ** (m - 1)}")
    big_f = power_basis_lift(f)
    gap = res_cyclic(big_f, h.modulus) - h
    if any(c % p for c in gap.num):
        raise DivisibilityError(f"pi({f}) differs from [{h}] mod {p}")
    correction = CyclicRingElem(h.modulus, tuple(c // p for c in gap.num))
    return big_f - ind_cyclic(correction, n)


def f_part(x: CyclicRingElem, n: int | None = None) -> CyclicRingElem:
    """ψ_n·x: the summand of x supported on the faithful characters."""
    modulus = n if n is not None else x.modulus
    if modulus != x.modulus:
        raise DivisibilityError(f"f_part needs modulus {x.modulus}")
    return CyclicRingElem.from_rational_poly(psi_idempotent(modulus, modulus)) * x


def split_localized(x: CyclicRingElem) -> list[CycNum]:
    """Components in Q(ζ_{p^m}), Q(ζ_{p^{m−1}}), ..., Q for x ∈ R(Z/p^m)[1/p]."""
    parts = []
    current = x
    while current.modulus > 1:
        a, current = split_decomposition(current)
        parts.append(a)
    parts.append(CycNum.rational_const(1, current.dimension()))
    return parts


def join_localized(parts: Sequence[CycNum]) -> CyclicRingElem:
    """Inverse of split_localized."""
    if not parts or parts[-1].level != 1:
        raise InputError("the last component must be rational (level 1)")
    current = CyclicRingElem.constant(1, parts[-1].rational())
    for a in reversed(parts[:-1]):
        current = unsplit(a, current)
    return current

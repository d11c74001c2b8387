"""
Multiplicative subsets of representation rings and unit certification.

A unit query has three outcomes. `unit` carries a cofactor g and exponents e with
f·g = Π s_i^{e_i}; `nonunit` carries an evaluation obstruction at one conjugacy
class; `undecided` means the bounded witness search ran out.
"""

from __future__ import annotations

import threading
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import structlog
from sympy import factorint

from characters import (
    ClassFunction,
    VirtualCharacter,
    character_table,
    conjugate_cf,
    restrict_cf,
    to_cyclic,
)
from config import get_settings
from cyclicring import join_localized, split_localized
from cyclotomic import CycNum, prime_power
from errors import InputError, InvariantViolation
from groups import PermGroup, Permutation, conjugate_subgroup, cyclic_class_representatives
from linalg import solve_integer
from models import KGroupDescription, UnitVerdict, Verdict

logger = structlog.get_logger(__name__)


def _as_class_function(f: ClassFunction | VirtualCharacter) -> ClassFunction:
    return f.class_function if isinstance(f, VirtualCharacter) else f


@dataclass(frozen=True)
class MultSet:
    """The multiplicative set generated by `generators` in R(group)."""

    group: PermGroup
    generators: tuple[ClassFunction, ...] = ()

    def __post_init__(self) -> None:
        for g in self.generators:
            if g.group != self.group:
                raise InputError("generator lives on a different group")
            if g.is_zero() or g.degree() == 0:
                raise InputError("multiplicative set generators need non-zero dimension")

    @classmethod
    def of(
        cls, group: PermGroup, generators: Iterable[ClassFunction | VirtualCharacter]
    ) -> MultSet:
        return cls(group, tuple(_as_class_function(g) for g in generators))

    def power_product(self, exponents: Sequence[int]) -> ClassFunction:
        """Π s_i^{e_i}."""
        total = ClassFunction.constant(self.group, 1)
        for g, e in zip(self.generators, exponents, strict=True):
            if e:
                total = total * g**e
        return total

    @property
    def product(self) -> ClassFunction:
        return self.power_product([1] * len(self.generators))

    def dimensions(self) -> list[int]:
        return [int(g.degree()) for g in self.generators]

    def coordinates(self) -> list[list[int]]:
        return [list(VirtualCharacter.from_class_function(g).coords) for g in self.generators]


def divisible_primes(S: MultSet) -> list[int]:
    """Primes dividing some product of generator dimensions."""
    total = 1
    for d in S.dimensions():
        total *= abs(d)
    return sorted(int(p) for p in factorint(total))


def restricted_profile(S: MultSet, H: PermGroup) -> MultSet:
    """The set generated by the restrictions of S's generators to H."""
    return MultSet(H, tuple(restrict_cf(g, H) for g in S.generators))


def conjugated_profile(S: MultSet, g: Permutation) -> MultSet:
    return MultSet(conjugate_subgroup(S.group, g), tuple(conjugate_cf(s, g) for s in S.generators))


# ---------------------------------------------------------------------------
# Witnesses and certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitWitness:
    """f·cofactor = Π s_i^{exponents[i]} in R(H)."""

    cofactor: ClassFunction
    exponents: tuple[int, ...]

    def verify(self, f: ClassFunction, S: MultSet) -> bool:
        return f * self.cofactor == S.power_product(self.exponents)

    def times(self, other: UnitWitness) -> UnitWitness:
        exps = tuple(a + b for a, b in zip(self.exponents, other.exponents, strict=True))
        return UnitWitness(self.cofactor * other.cofactor, exps)

    def power(self, k: int) -> UnitWitness:
        return UnitWitness(self.cofactor**k, tuple(k * e for e in self.exponents))

    def restricted(self, H: PermGroup) -> UnitWitness:
        return UnitWitness(restrict_cf(self.cofactor, H), self.exponents)

    def conjugated(self, g: Permutation) -> UnitWitness:
        return UnitWitness(conjugate_cf(self.cofactor, g), self.exponents)

    def describe(self) -> str:
        parts = [f"s{i}^{e}" for i, e in enumerate(self.exponents) if e]
        return " * ".join(parts) if parts else "1"


@dataclass(frozen=True)
class NonunitCertificate:
    """
    An evaluation obstruction at one conjugacy class c.

    `zero_value`: f(c) = 0 while no generator vanishes at c.
    `norm_prime`: the prime divides N(f(c)) but no N(s(c)).
    """

    kind: str
    class_index: int
    representative: Permutation
    prime: int | None = None

    def verify(self, f: ClassFunction, S: MultSet) -> bool:
        c = self.class_index
        gens = [g.values[c] for g in S.generators]
        if any(v.is_zero() for v in gens):
            return False
        value = f.values[c]
        if self.kind == "zero_value":
            return value.is_zero()
        if self.prime is None or value.is_zero():
            return False
        p = self.prime
        return _norm_int(value) % p == 0 and all(_norm_int(v) % p for v in gens)

    def describe(self) -> str:
        where = self.representative.cycle_notation()
        if self.kind == "zero_value":
            return f"value 0 at class of {where}"
        return f"{self.prime} divides the norm of the value at class of {where}"


@dataclass(frozen=True)
class UnitAnswer:
    verdict: UnitVerdict
    bound: int
    witness: UnitWitness | None = None
    certificate: NonunitCertificate | None = None
    restriction_witnesses: dict[str, UnitWitness] = field(default_factory=dict)

    @property
    def is_unit(self) -> bool:
        return self.verdict is UnitVerdict.UNIT

    @property
    def is_nonunit(self) -> bool:
        return self.verdict is UnitVerdict.NONUNIT

    def describe(self) -> str:
        if self.witness is not None:
            return f"f * g = {self.witness.describe()}"
        if self.certificate is not None:
            return self.certificate.describe()
        if self.restriction_witnesses:
            return "unit on every cyclic subgroup"
        return f"no witness up to P^(2^{self.bound})"


def _norm_int(v: CycNum) -> int:
    n = v.norm()
    if n.denominator != 1:
        raise InvariantViolation(f"norm of an algebraic integer is not integral: {n}")
    return abs(int(n))


def nonunit_certificate(f: ClassFunction, S: MultSet) -> NonunitCertificate | None:
    """First class (in class order) that obstructs f from dividing an element of S."""
    G = f.group
    for c, cls in enumerate(G.classes):
        gens = [g.values[c] for g in S.generators]
        if any(v.is_zero() for v in gens):
            continue
        value = f.values[c]
        if value.is_zero():
            return NonunitCertificate("zero_value", c, cls.representative)
        n = _norm_int(value)
        gen_norm = 1
        for v in gens:
            gen_norm *= _norm_int(v)
        for p in sorted(factorint(n)):
            if gen_norm % p:
                return NonunitCertificate("norm_prime", c, cls.representative, int(p))
    return None


def _search_exponents(bound: int, start: int = 0) -> list[int]:
    return [start] + [start + 2**i for i in range(bound + 1)]


def divide(f: ClassFunction, s: ClassFunction) -> ClassFunction | None:
    """A virtual character g with f·g = s, or None."""
    G = f.group
    free = [c for c, v in enumerate(f.values) if v.is_zero()]
    if any(not s.values[c].is_zero() for c in free):
        return None
    if not free:
        quotient = ClassFunction(G, tuple(b / a for a, b in zip(f.values, s.values, strict=True)))
        coords = character_table(G).coordinates(quotient)
        return quotient if all(x.denominator == 1 for x in coords) else None
    table = character_table(G)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for c, (a, b) in enumerate(zip(f.values, s.values, strict=True)):
        if c in free:
            continue
        target = (b / a).coeffs
        for r, t in enumerate(target):
            rows.append([chi.values[c].coeffs[r] for chi in table.irreducibles])
            rhs.append(t)
    solution = solve_integer(rows, rhs, cols=len(table))
    if solution is None:
        return None
    return VirtualCharacter.from_coords(G, solution).class_function


def is_unit(
    f: ClassFunction | VirtualCharacter, S: MultSet, bound: int | None = None, start: int = 0
) -> UnitAnswer:
    """
    Decide whether f becomes invertible in R(H)_S.

    Witnesses are searched among P^e for e = start and start + 2^i, i <= bound.
    """
    f = _as_class_function(f)
    B = get_settings().unit_bound if bound is None else bound
    if B < 0 or start < 0:
        raise InputError("the search bound and start must be non-negative")
    if f.group != S.group:
        raise InputError("element and multiplicative set live on different groups")
    certificate = nonunit_certificate(f, S)
    if certificate is not None:
        return UnitAnswer(UnitVerdict.NONUNIT, B, certificate=certificate)
    P = S.product
    power = ClassFunction.constant(f.group, 1)
    done = 0
    for e in _search_exponents(B, start):
        power = power * P ** (e - done) if e > done else power
        done = e
        g = divide(f, power)
        if g is not None:
            witness = UnitWitness(g, (e,) * len(S.generators))
            return UnitAnswer(UnitVerdict.UNIT, B, witness=witness)
    logger.warning("unit_query_undecided", subgroup=f.group.label, bound=B)
    return UnitAnswer(UnitVerdict.UNDECIDED, B)


def is_unit_by_restriction(
    f: ClassFunction | VirtualCharacter, S: MultSet, bound: int | None = None
) -> UnitAnswer:
    """f is a unit iff every restriction to a cyclic subgroup is one."""
    f = _as_class_function(f)
    B = get_settings().unit_bound if bound is None else bound
    witnesses: dict[str, UnitWitness] = {}
    undecided = False
    for L in cyclic_class_representatives(f.group):
        answer = is_unit(restrict_cf(f, L), restricted_profile(S, L), B)
        if answer.is_nonunit:
            return UnitAnswer(UnitVerdict.NONUNIT, B, certificate=answer.certificate)
        if answer.witness is None:
            undecided = True
            continue
        witnesses[L.label] = answer.witness
    if undecided:
        return UnitAnswer(UnitVerdict.UNDECIDED, B, restriction_witnesses=witnesses)
    return UnitAnswer(UnitVerdict.UNIT, B, restriction_witnesses=witnesses)


class UnitProfile:
    """
    Memoized unit queries against one multiplicative set and its restrictions.

    Decided answers are final and shared; undecided ones are recomputed.
    """

    def __init__(self, base: MultSet) -> None:
        self.base = base
        self._answers: dict[tuple[frozenset[Permutation], tuple[CycNum, ...]], UnitAnswer] = {}
        self._profiles: dict[frozenset[Permutation], MultSet] = {}
        self._lock = threading.Lock()

    @property
    def divisible_primes(self) -> list[int]:
        return divisible_primes(self.base)

    def profile(self, H: PermGroup) -> MultSet:
        with self._lock:
            cached = self._profiles.get(H.element_set)
        if cached is None:
            cached = restricted_profile(self.base, H)
            with self._lock:
                self._profiles.setdefault(H.element_set, cached)
        return cached

    def query(self, f: ClassFunction, bound: int | None = None, start: int = 0) -> UnitAnswer:
        B = get_settings().unit_bound if bound is None else bound
        key = (f.group.element_set, f.values)
        with self._lock:
            known = self._answers.get(key)
        if known is not None:
            return known
        answer = is_unit(f, self.profile(f.group), B, start)
        if answer.verdict is not UnitVerdict.UNDECIDED:
            with self._lock:
                self._answers.setdefault(key, answer)
        return answer


# ---------------------------------------------------------------------------
# Model K-groups and invariant comparison
# ---------------------------------------------------------------------------


def _summands(H: PermGroup, primes: Sequence[int]) -> list[str]:
    pm = prime_power(H.order)
    if pm is None or not H.is_cyclic or pm[0] not in primes:
        return []
    p, m = pm
    return [f"Z[zeta_{p ** j}, 1/{p}]" if j else f"Z[1/{p}]" for j in range(m, -1, -1)]


def check_splitting(S: MultSet, H: PermGroup) -> bool:
    """The p-local splitting of R(Z/p^m)[1/p] round-trips on the restricted generators."""
    for g in restricted_profile(S, H).generators:
        x = to_cyclic(g)
        if join_localized(split_localized(x)) != x:
            return False
    return True


def model_kgroups(S: MultSet) -> list[KGroupDescription]:
    """K_0 = R(H) localized at the restricted profile and K_1 = 0, for every subgroup H."""
    primes = divisible_primes(S)
    out = []
    root = S.group.root
    for H in root.subgroups_of(S.group):
        restricted = restricted_profile(S, H)
        gens = restricted.coordinates()
        k0 = f"R({H.label})" if not gens else f"R({H.label})[S^-1], S generated by {len(gens)}"
        out.append(
            KGroupDescription(
                subgroup=H.label,
                order=H.order,
                k0=k0,
                k1="0",
                generators=gens,
                divisible_primes=primes,
                summands=_summands(H, primes),
            )
        )
    logger.debug("model_kgroups", group=S.group.label, subgroups=len(out))
    return out


@dataclass(frozen=True)
class CertificateComparison:
    verdict: Verdict
    side: str | None = None
    generator_index: int | None = None
    answer: UnitAnswer | None = None
    undecided_count: int = 0

    def describe(self) -> str:
        if self.verdict is Verdict.DISTINCT and self.answer is not None:
            return f"generator {self.generator_index} of {self.side}: {self.answer.describe()}"
        return self.verdict.value


def certificates_equal(
    S1: MultSet, S2: MultSet, bound: int | None = None
) -> CertificateComparison:
    """Compare saturations by mutual unit checks of the generators."""
    if S1.group != S2.group:
        raise InputError("multiplicative sets live on different groups")
    undecided = 0
    for side, source, target in (("first", S1, S2), ("second", S2, S1)):
        for i, g in enumerate(source.generators):
            answer = is_unit(g, target, bound)
            if answer.is_nonunit:
                return CertificateComparison(Verdict.DISTINCT, side, i, answer)
            if not answer.is_unit:
                undecided += 1
    verdict = Verdict.UNDECIDED if undecided else Verdict.EQUAL
    return CertificateComparison(verdict, undecided_count=undecided)

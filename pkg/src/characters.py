"""
Virtual characters of finite permutation groups.

Class functions store one cyclotomic value per conjugacy class, at the level of
the ambient (root) group's exponent, so restriction, induction and conjugation
between subgroups never change the field the values live in.
"""

from __future__ import annotations

import threading
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product

import structlog
from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form

from cyclicring import CyclicRingElem
from cyclotomic import CycNum, cyc_one, cyc_zero, euler_phi, zeta
from errors import ContainmentError, InputError, InvariantViolation, NotCyclicError
from groups import (
    PermGroup,
    Permutation,
    Subgroup,
    conjugate_subgroup,
    double_cosets,
    intersection,
    normalizer,
    subgroup_class_representatives,
    subgroups,
)
from linalg import short_vectors

logger = structlog.get_logger(__name__)

Scalar = int | Fraction


# ---------------------------------------------------------------------------
# Class functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassFunction:
    """A function on `group` constant on its conjugacy classes."""

    group: PermGroup
    values: tuple[CycNum, ...]

    @classmethod
    def from_function(
        cls, group: PermGroup, fn: Callable[[Permutation], CycNum]
    ) -> ClassFunction:
        return cls(group, tuple(fn(c.representative) for c in group.classes))

    @classmethod
    def constant(cls, group: PermGroup, value: Scalar) -> ClassFunction:
        v = CycNum.rational_const(group.value_level, value)
        return cls(group, (v,) * len(group.classes))

    @classmethod
    def from_rationals(cls, group: PermGroup, values: Sequence[Scalar]) -> ClassFunction:
        if len(values) != len(group.classes):
            raise InputError(f"expected {len(group.classes)} class values, got {len(values)}")
        level = group.value_level
        return cls(group, tuple(CycNum.rational_const(level, v) for v in values))

    def value(self, g: Permutation) -> CycNum:
        return self.values[self.group.class_index[g]]

    def degree(self) -> Fraction:
        """Value at the identity (the first class)."""
        return self.values[0].rational()

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values)

    def _other(self, other: object) -> ClassFunction | None:
        if isinstance(other, ClassFunction):
            if other.group != self.group:
                raise InputError("class functions live on different groups")
            return other
        if isinstance(other, int | Fraction):
            return ClassFunction.constant(self.group, other)
        return None

    def __add__(self, other: object) -> ClassFunction:
        o = self._other(other)
        if o is None:
            return NotImplemented
        summed = tuple(a + b for a, b in zip(self.values, o.values, strict=True))
        return ClassFunction(self.group, summed)

    __radd__ = __add__

    def __neg__(self) -> ClassFunction:
        return ClassFunction(self.group, tuple(-v for v in self.values))

    def __sub__(self, other: object) -> ClassFunction:
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> ClassFunction:
        return (-self) + other

    def __mul__(self, other: object) -> ClassFunction:
        if isinstance(other, CycNum):
            return ClassFunction(self.group, tuple(v * other for v in self.values))
        o = self._other(other)
        if o is None:
            return NotImplemented
        pointwise = tuple(a * b for a, b in zip(self.values, o.values, strict=True))
        return ClassFunction(self.group, pointwise)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> ClassFunction:
        return ClassFunction(self.group, tuple(v**k for v in self.values))

    def describe(self) -> list[list[str]]:
        """Values as lists of coefficient strings (power basis at the value level)."""
        return [[str(c) for c in v.coeffs] for v in self.values]


def trivial_character(group: PermGroup) -> ClassFunction:
    return ClassFunction.constant(group, 1)


def regular_character(group: PermGroup) -> ClassFunction:
    values = [group.order] + [0] * (len(group.classes) - 1)
    return ClassFunction.from_rationals(group, values)


def inner_product(a: ClassFunction, b: ClassFunction) -> CycNum:
    """⟨a, b⟩ = |G|⁻¹ Σ_g a(g)·b(g⁻¹)."""
    if a.group != b.group:
        raise InputError("inner product of class functions on different groups")
    G = a.group
    total = cyc_zero(G.value_level)
    for i, cls in enumerate(G.classes):
        total = total + a.values[i] * b.values[G.inverse_class[i]] * cls.size
    return total * Fraction(1, G.order)


def _rational_inner(a: ClassFunction, b: ClassFunction) -> Fraction:
    value = inner_product(a, b)
    if not value.is_rational():
        raise InputError("class function is not a rational combination of characters")
    return value.rational()


# ---------------------------------------------------------------------------
# Restriction, induction and conjugation
# ---------------------------------------------------------------------------


def _require_contained(inner: PermGroup, outer: PermGroup) -> None:
    if not inner.element_set <= outer.element_set:
        raise ContainmentError(f"{inner.label} is not contained in {outer.label}")


@lru_cache(maxsize=None)
def _fusion(K: PermGroup, H: PermGroup) -> tuple[int, ...]:
    """Index of the H-class containing each K-class."""
    return tuple(H.class_index[c.representative] for c in K.classes)


def restrict_cf(f: ClassFunction, K: PermGroup) -> ClassFunction:
    _require_contained(K, f.group)
    fusion = _fusion(K, f.group)
    return ClassFunction(K, tuple(f.values[j] for j in fusion))


def induce_cf(f: ClassFunction, H: PermGroup) -> ClassFunction:
    """(Ind f)(g) = |C_H(g)| Σ_{K-classes d ⊆ class(g)} f(d)/|C_K(d)|."""
    K = f.group
    _require_contained(K, H)
    fusion = _fusion(K, H)
    level = H.value_level
    sums = [cyc_zero(level) for _ in H.classes]
    for i, cls in enumerate(K.classes):
        sums[fusion[i]] = sums[fusion[i]] + f.values[i] * cls.size
    values = tuple(
        s * Fraction(H.order, cls.size * K.order) for s, cls in zip(sums, H.classes, strict=True)
    )
    return ClassFunction(H, values)


def conjugate_cf(f: ClassFunction, g: Permutation) -> ClassFunction:
    """con_g: the class function on gHg⁻¹ with (con f)(ghg⁻¹) = f(h)."""
    H = f.group
    if g not in H.root:
        raise ContainmentError(f"{g} is not an element of {H.root.label}")
    target = conjugate_subgroup(H, g)
    gi = g.inverse()
    values = tuple(f.value(gi * c.representative * g) for c in target.classes)
    return ClassFunction(target, values)


# ---------------------------------------------------------------------------
# Linear characters and character tables
# ---------------------------------------------------------------------------


def linear_characters(H: PermGroup) -> list[ClassFunction]:
    """All homomorphisms H → μ_e (e the value level) as class functions."""
    e = H.value_level
    if H.order == 1:
        return [trivial_character(H)]
    if H.is_cyclic:
        h, n = H.cyclic_generator, H.order
        power = {h**k: k for k in range(n)}
        return [
            ClassFunction.from_function(H, lambda x, a=a: zeta(e, a * power[x] * (e // n)))
            for a in range(n)
        ]
    gens = H.generators
    orders = [g.order() for g in gens]
    chars = []
    for choice in product(*(range(o) for o in orders)):
        images = [c * (e // o) for c, o in zip(choice, orders, strict=True)]
        exponents = _extend_homomorphism(H, gens, images, e)
        if exponents is not None:
            chars.append(ClassFunction.from_function(H, lambda x, ex=exponents: zeta(e, ex[x])))
    return chars


def _extend_homomorphism(
    H: PermGroup, gens: Sequence[Permutation], images: Sequence[int], e: int
) -> dict[Permutation, int] | None:
    exponents = {H.identity: 0}
    queue = [H.identity]
    while queue:
        x = queue.pop()
        for g, a in zip(gens, images, strict=True):
            y = g * x
            value = (exponents[x] + a) % e
            known = exponents.get(y)
            if known is None:
                exponents[y] = value
                queue.append(y)
            elif known != value:
                return None
    return exponents


@dataclass(frozen=True, eq=False)
class CharacterTable:
    """Irreducible characters ordered by (degree, value vector)."""

    group: PermGroup
    irreducibles: tuple[ClassFunction, ...]

    @property
    def degrees(self) -> list[int]:
        return [int(chi.degree()) for chi in self.irreducibles]

    def __len__(self) -> int:
        return len(self.irreducibles)

    def coordinates(self, f: ClassFunction) -> list[Fraction]:
        """Rational coordinates of f in the irreducible basis."""
        return [_rational_inner(f, chi) for chi in self.irreducibles]

    def check_orthogonality(self) -> bool:
        """Row and column orthogonality, exactly."""
        irr = self.irreducibles
        for i, a in enumerate(irr):
            for j, b in enumerate(irr):
                if inner_product(a, b) != cyc_one(self.group.value_level) * int(i == j):
                    return False
        G = self.group
        for c, cls in enumerate(G.classes):
            for d in range(len(G.classes)):
                total = cyc_zero(G.value_level)
                for chi in irr:
                    total = total + chi.values[c] * chi.values[d].conjugate()
                expected = Fraction(G.order, cls.size) if c == d else 0
                if total != CycNum.rational_const(G.value_level, expected):
                    return False
        return True


_TABLES: dict[tuple[int, frozenset[Permutation], int], CharacterTable] = {}
_TABLES_LOCK = threading.RLock()


def character_table(G: PermGroup) -> CharacterTable:
    """The complete table of irreducible characters of G (cached per group and level)."""
    key = (G.degree, G.element_set, G.value_level)
    with _TABLES_LOCK:
        table = _TABLES.get(key)
        if table is None:
            table = _build_table(G)
            _TABLES[key] = table
    return table


def _sort_key(chi: ClassFunction) -> tuple[Fraction, tuple[tuple[Fraction, ...], ...]]:
    return chi.degree(), tuple(v.coeffs for v in chi.values)


def _table_seeds(G: PermGroup) -> list[ClassFunction]:
    seeds = []
    for H in subgroup_class_representatives(G):
        for lam in linear_characters(H):
            seeds.append(induce_cf(lam, G))
    return seeds


def _build_table(G: PermGroup) -> CharacterTable:
    irr = [trivial_character(G)]
    target = G.order
    found = lambda: sum(int(chi.degree()) ** 2 for chi in irr)  # noqa: E731
    pool = _table_seeds(G)
    product_rounds = 0
    while found() < target:
        progress = False
        remaining = []
        for chi in pool:
            residual = chi
            for psi in irr:
                residual = residual - psi * inner_product(chi, psi)
            if residual.is_zero():
                continue
            if _rational_inner(residual, residual) == 1:
                if residual not in irr:
                    irr.append(residual)
                progress = True
            else:
                remaining.append(residual)
        pool = remaining
        if not progress:
            if product_rounds >= 2 or not pool:
                break
            product_rounds += 1
            pool = pool + [a * b for a in irr for b in pool[: len(irr) + 4]]
    if found() < target:
        irr.extend(_lattice_irreducibles(G, irr, pool))
    if found() != target:
        raise InvariantViolation(f"character table of {G.label} is incomplete")
    irr.sort(key=_sort_key)
    logger.debug("character_table_built", group=G.label, degrees=[int(c.degree()) for c in irr])
    return CharacterTable(G, tuple(irr))


def _lattice_irreducibles(
    G: PermGroup, known: list[ClassFunction], pool: list[ClassFunction]
) -> list[ClassFunction]:
    """Norm-one vectors of positive degree in the lattice spanned by the residuals."""
    residuals = []
    for chi in pool:
        r = chi
        for psi in known:
            r = r - psi * inner_product(chi, psi)
        if not r.is_zero():
            residuals.append(r)
    if not residuals:
        return []
    level = G.value_level
    width = euler_phi(level)
    flat = [[c for v in r.values for c in v.coeffs] for r in residuals]
    columns = Matrix(len(flat[0]), len(flat), lambda i, j: int(flat[j][i]))
    hnf = hermite_normal_form(columns)
    basis = []
    for j in range(hnf.shape[1]):
        column = [int(hnf[i, j]) for i in range(hnf.shape[0])]
        if any(column):
            values = tuple(
                CycNum(level, tuple(column[k * width : (k + 1) * width]))
                for k in range(len(G.classes))
            )
            basis.append(ClassFunction(G, values))
    gram = [[_rational_inner(a, b) for b in basis] for a in basis]
    found = []
    for x in short_vectors(gram, 1):
        if not any(x):
            continue
        chi = ClassFunction.constant(G, 0)
        for coeff, b in zip(x, basis, strict=True):
            chi = chi + b * coeff
        if chi.degree() > 0 and chi not in found:
            found.append(chi)
    logger.info(
        "character_table_lattice_fallback", group=G.label, rank=len(basis), found=len(found)
    )
    return found


# ---------------------------------------------------------------------------
# Virtual characters
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class VirtualCharacter:
    """An element of R(G) in the irreducible basis of its group's table."""

    table: CharacterTable
    coords: tuple[int, ...]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VirtualCharacter):
            return NotImplemented
        return self.group == other.group and self.coords == other.coords

    def __hash__(self) -> int:
        return hash((self.group, self.coords))

    @classmethod
    def from_class_function(cls, f: ClassFunction) -> VirtualCharacter:
        table = character_table(f.group)
        coords = table.coordinates(f)
        if any(c.denominator != 1 for c in coords):
            raise InvariantViolation(f"class function has non-integral coordinates {coords}")
        return cls(table, tuple(int(c) for c in coords))

    @classmethod
    def from_coords(cls, group: PermGroup, coords: Sequence[int]) -> VirtualCharacter:
        table = character_table(group)
        if len(coords) != len(table):
            raise InputError(f"expected {len(table)} coordinates, got {len(coords)}")
        return cls(table, tuple(int(c) for c in coords))

    @property
    def group(self) -> PermGroup:
        return self.table.group

    @cached_property
    def class_function(self) -> ClassFunction:
        total = ClassFunction.constant(self.group, 0)
        for c, chi in zip(self.coords, self.table.irreducibles, strict=True):
            if c:
                total = total + chi * c
        return total

    def degree(self) -> int:
        return sum(c * d for c, d in zip(self.coords, self.table.degrees, strict=True))

    def __add__(self, other: VirtualCharacter) -> VirtualCharacter:
        return VirtualCharacter.from_class_function(self.class_function + other.class_function)

    def __sub__(self, other: VirtualCharacter) -> VirtualCharacter:
        return VirtualCharacter.from_class_function(self.class_function - other.class_function)

    def __mul__(self, other: VirtualCharacter) -> VirtualCharacter:
        return VirtualCharacter.from_class_function(self.class_function * other.class_function)


def coordinates(f: ClassFunction) -> list[Fraction]:
    return character_table(f.group).coordinates(f)


def is_virtual_character(f: ClassFunction) -> bool:
    try:
        return all(c.denominator == 1 for c in coordinates(f))
    except InputError:
        return False


def _lift_op(
    f: ClassFunction | VirtualCharacter, op: Callable[[ClassFunction], ClassFunction]
) -> ClassFunction | VirtualCharacter:
    if isinstance(f, VirtualCharacter):
        return VirtualCharacter.from_class_function(op(f.class_function))
    return op(f)


def restrict(f: ClassFunction | VirtualCharacter, K: PermGroup) -> ClassFunction | VirtualCharacter:
    """res: the values of f on the subgroup K."""
    return _lift_op(f, lambda cf: restrict_cf(cf, K))


def induce(f: ClassFunction | VirtualCharacter, H: PermGroup) -> ClassFunction | VirtualCharacter:
    """Frobenius induction to the supergroup H."""
    return _lift_op(f, lambda cf: induce_cf(cf, H))


def conjugate_map(
    f: ClassFunction | VirtualCharacter, g: Permutation
) -> ClassFunction | VirtualCharacter:
    """con_g onto g·H·g⁻¹."""
    return _lift_op(f, lambda cf: conjugate_cf(cf, g))


def mackey_double_coset(
    L: PermGroup, H: PermGroup, K: PermGroup, f: ClassFunction | VirtualCharacter
) -> ClassFunction | VirtualCharacter:
    """Σ_{x ∈ L\\H/K} I^L_{L ∩ xKx⁻¹} ∘ con_x ∘ res^{x⁻¹Lx ∩ K}_K (f)."""
    return _lift_op(f, lambda cf: _mackey_double_coset_cf(L, H, K, cf))


def _mackey_double_coset_cf(
    L: PermGroup, H: PermGroup, K: PermGroup, f: ClassFunction
) -> ClassFunction:
    _require_contained(L, H)
    _require_contained(K, H)
    if f.group != K:
        raise ContainmentError(f"class function does not live on {K.label}")
    total = ClassFunction.constant(L, 0)
    for x in double_cosets(L, H, K):
        inner = intersection(conjugate_subgroup(L, x.inverse()), K)
        # con_x lands on L ∩ xKx⁻¹
        piece = conjugate_cf(restrict_cf(f, inner), x)
        total = total + induce_cf(piece, L)
    return total


def permutation_character(G: PermGroup, H: PermGroup) -> ClassFunction:
    """1_H induced to G: the character of the coset action G/H."""
    return induce_cf(trivial_character(H), G)


# ---------------------------------------------------------------------------
# Cyclic subgroups and the Weyl action
# ---------------------------------------------------------------------------


def weyl_action(G: PermGroup, H: PermGroup) -> tuple[int, ...]:
    """Exponents a (1 ≤ a ≤ |H|) with g·h·g⁻¹ = h^a for g in N_G(H), h generating H."""
    if not H.is_cyclic:
        raise NotCyclicError(f"{H.label} is not cyclic")
    h = H.cyclic_generator
    powers = {h**a: a for a in range(1, H.order + 1)}
    return tuple(sorted({powers[h.conjugate_by(g)] for g in normalizer(G, H).elements}))


def _check_generator(H: PermGroup, generator: Permutation | None) -> Permutation:
    if not H.is_cyclic:
        raise NotCyclicError(f"{H.label} is not cyclic")
    if generator is None:
        return H.cyclic_generator
    if generator not in H or generator.order() != H.order:
        raise NotCyclicError(f"{generator} does not generate {H.label}")
    return generator


def to_cyclic(f: ClassFunction, generator: Permutation | None = None) -> CyclicRingElem:
    """f as Σ c_j t^j, t the character sending the generator to ζ_n."""
    H = f.group
    h = _check_generator(H, generator)
    n, e = H.order, H.value_level
    values = [f.value(h**k) for k in range(n)]
    coeffs = []
    for j in range(n):
        total = cyc_zero(e)
        for k, v in enumerate(values):
            total = total + v * zeta(e, -j * k * (e // n))
        coeffs.append(total.rational() / n)
    return CyclicRingElem.from_coeffs(n, coeffs)


def from_cyclic(
    x: CyclicRingElem, H: PermGroup, generator: Permutation | None = None
) -> ClassFunction:
    """Inverse of to_cyclic."""
    if x.modulus != H.order:
        raise InputError(f"element lives mod {x.modulus}, subgroup has order {H.order}")
    h = _check_generator(H, generator)
    n, e = H.order, H.value_level
    power = {h**k: k for k in range(n)}

    def value(g: Permutation) -> CycNum:
        k = power[g]
        total = cyc_zero(e)
        for j, c in enumerate(x.coeffs):
            if c:
                total = total + zeta(e, j * k * (e // n)) * c
        return total

    return ClassFunction.from_function(H, value)


# ---------------------------------------------------------------------------
# Mackey families and the axiom audit
# ---------------------------------------------------------------------------


@dataclass
class MackeyFamily:
    """A family (f_H) of class functions indexed by subgroups, for one prime."""

    prime: int
    entries: dict[PermGroup, ClassFunction] = field(default_factory=dict)

    def __getitem__(self, H: PermGroup) -> ClassFunction:
        return self.entries[H]

    def __setitem__(self, H: PermGroup, f: ClassFunction) -> None:
        self.entries[H] = f

    def __contains__(self, H: object) -> bool:
        return H in self.entries

    def members(self) -> list[PermGroup]:
        return sorted(self.entries, key=lambda H: (H.order, H.elements))

    def power(self, k: int) -> MackeyFamily:
        return MackeyFamily(self.prime, {H: f**k for H, f in self.entries.items()})


@dataclass
class AuditTally:
    relation: str
    checked: int = 0
    failed: int = 0
    first_failure: str | None = None

    def record(self, ok: bool, context: Callable[[], str]) -> None:
        self.checked += 1
        if not ok:
            self.failed += 1
            if self.first_failure is None:
                self.first_failure = context()

    @property
    def passed(self) -> bool:
        return self.failed == 0


MACKEY_RELATIONS = (
    "identities",
    "res_transitive",
    "ind_transitive",
    "con_composition",
    "con_ind",
    "con_res",
    "double_coset",
    "frobenius_left",
    "frobenius_right",
    "reciprocity",
)


def _irr(H: PermGroup) -> tuple[ClassFunction, ...]:
    return character_table(H).irreducibles


def mackey_audit(G: PermGroup) -> dict[str, AuditTally]:
    """Check every Mackey relation and both Frobenius formulas on irreducible bases."""
    tally = {name: AuditTally(name) for name in MACKEY_RELATIONS}
    lattice = subgroups(G)
    below = {H: [K for K in lattice if K.element_set <= H.element_set] for H in lattice}
    elements = G.elements
    for H in lattice:
        for chi in _irr(H):
            ok = induce_cf(chi, H) == chi and restrict_cf(chi, H) == chi
            ok = ok and all(conjugate_cf(chi, h) == chi for h in H.elements)
            tally["identities"].record(ok, lambda: f"{H.label}")
            for g in elements:
                once = conjugate_cf(chi, g)
                for g2 in G.generators:
                    tally["con_composition"].record(
                        conjugate_cf(once, g2) == conjugate_cf(chi, g2 * g),
                        lambda: f"{H.label} by {g} then {g2}",
                    )
        for K in below[H]:
            _audit_pair(G, H, K, below, tally)
    for name, t in tally.items():
        logger.info(
            "mackey_relation_checked",
            group=G.label,
            relation=name,
            checked=t.checked,
            failed=t.failed,
        )
    return tally


def _audit_pair(
    G: PermGroup,
    H: PermGroup,
    K: PermGroup,
    below: dict[Subgroup, list[Subgroup]],
    tally: dict[str, AuditTally],
) -> None:
    irr_h, irr_k = _irr(H), _irr(K)
    where = lambda: f"K={K.label} in H={H.label}"  # noqa: E731
    for L in below[K]:
        for chi in irr_h:
            tally["res_transitive"].record(
                restrict_cf(restrict_cf(chi, K), L) == restrict_cf(chi, L), where
            )
        for chi in _irr(L):
            tally["ind_transitive"].record(
                induce_cf(induce_cf(chi, K), H) == induce_cf(chi, H), where
            )
    for L in below[H]:
        for chi in irr_k:
            tally["double_coset"].record(
                restrict_cf(induce_cf(chi, H), L) == _mackey_double_coset_cf(L, H, K, chi),
                lambda: f"L={L.label}, {where()}",
            )
    for g in G.elements:
        for chi in irr_k:
            tally["con_ind"].record(
                conjugate_cf(induce_cf(chi, H), g)
                == induce_cf(conjugate_cf(chi, g), conjugate_subgroup(H, g)),
                where,
            )
        for chi in irr_h:
            tally["con_res"].record(
                conjugate_cf(restrict_cf(chi, K), g)
                == restrict_cf(conjugate_cf(chi, g), conjugate_subgroup(K, g)),
                where,
            )
    for x in irr_h:
        for y in irr_k:
            tally["frobenius_left"].record(
                x * induce_cf(y, H) == induce_cf(restrict_cf(x, K) * y, H), where
            )
            tally["frobenius_right"].record(
                induce_cf(y, H) * x == induce_cf(y * restrict_cf(x, K), H), where
            )
            tally["reciprocity"].record(
                inner_product(induce_cf(y, H), x) == inner_product(y, restrict_cf(x, K)), where
            )

"""
Finite permutation groups: canonical element order, the full subgroup lattice,
conjugacy, normalizers and double cosets.

Everything downstream (characters, Mackey families, Brauer coefficients) reads
groups through this module, so every enumeration here is deterministic: elements
sort lexicographically by image tuple, subgroups by (order, element list).
"""

from __future__ import annotations

import re
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from math import factorial, lcm

import structlog
from sympy import factorint

from config import get_settings
from errors import ContainmentError, InputError, NotCyclicError, NotEppoError, OrderCapError

logger = structlog.get_logger(__name__)

CATALOG_PATTERN = re.compile(r"^(C|D|Q|S|A)([0-9]+)$")
_CYCLE_PATTERN = re.compile(r"\(([^()]*)\)")
_CYCLES_TEXT = re.compile(r"^\s*(\([0-9\s]*\)\s*)+$")


@dataclass(frozen=True, order=True)
class Permutation:
    """A bijection of {0..n-1}; `images[i]` is the image of i."""

    images: tuple[int, ...]

    @classmethod
    def from_images(cls, images: Iterable[int]) -> Permutation:
        """Validated constructor."""
        imgs = tuple(images)
        if sorted(imgs) != list(range(len(imgs))):
            raise InputError(f"not a permutation of 0..{len(imgs) - 1}: {imgs}")
        return cls(imgs)

    @classmethod
    def identity(cls, degree: int) -> Permutation:
        return cls(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, text: str, degree: int | None = None) -> Permutation:
        """Parse disjoint-cycle notation such as ``"(0 1 2)(3 4)"``; ``"()"`` is the identity."""
        if not _CYCLES_TEXT.match(text):
            raise InputError(f"malformed cycle notation: {text!r}")
        cycles = [[int(tok) for tok in body.split()] for body in _CYCLE_PATTERN.findall(text)]
        points = [x for cycle in cycles for x in cycle]
        if len(points) != len(set(points)):
            raise InputError(f"cycles are not disjoint: {text!r}")
        needed = max(points, default=-1) + 1
        n = max(needed, degree or 0, 1)
        images = list(range(n))
        for cycle in cycles:
            for i, x in enumerate(cycle):
                images[x] = cycle[(i + 1) % len(cycle)]
        return cls(tuple(images))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point]

    def __mul__(self, other: Permutation) -> Permutation:
        # (self * other)(i) = self(other(i))
        mine = self.images
        return Permutation(tuple(mine[j] for j in other.images))

    def __pow__(self, k: int) -> Permutation:
        if k < 0:
            return self.inverse() ** (-k)
        result = Permutation.identity(self.degree)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> Permutation:
        inv = [0] * len(self.images)
        for i, x in enumerate(self.images):
            inv[x] = i
        return Permutation(tuple(inv))

    def conjugate_by(self, g: Permutation) -> Permutation:
        """g · self · g⁻¹."""
        return g * self * g.inverse()

    def extend(self, degree: int) -> Permutation:
        if degree <= self.degree:
            return self
        return Permutation(self.images + tuple(range(self.degree, degree)))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(len(self.images)):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            x = self.images[start]
            while x != start:
                cycle.append(x)
                seen.add(x)
                x = self.images[x]
            if len(cycle) > 1:
                out.append(tuple(cycle))
        return out

    def order(self) -> int:
        return lcm(1, *(len(c) for c in self.cycles()))

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.images))

    def cycle_notation(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + " ".join(str(x) for x in c) + ")" for c in cycles)

    def __str__(self) -> str:
        return self.cycle_notation()


@dataclass(frozen=True)
class ConjugacyClass:
    representative: Permutation
    elements: tuple[Permutation, ...]
    element_order: int

    @property
    def size(self) -> int:
        return len(self.elements)


def is_prime_power(n: int) -> bool:
    """True for p^k with k ≥ 1."""
    return n > 1 and len(factorint(n)) == 1


def _closure(generators: Sequence[Permutation], degree: int, cap: int) -> list[Permutation]:
    identity = Permutation.identity(degree)
    seen = {identity}
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for g in generators:
            y = g * x
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise OrderCapError(f"group order exceeds the cap of {cap}")
                queue.append(y)
    return sorted(seen)


class PermGroup:
    """
    A finite group of permutations of {0..degree-1}.

    Equality and hashing go through the element set, so a group and any
    subgroup object with the same elements are interchangeable as keys.
    """

    def __init__(
        self,
        generators: Sequence[Permutation],
        degree: int | None = None,
        *,
        name: str | None = None,
        elements: Sequence[Permutation] | None = None,
        cap: int | None = None,
    ) -> None:
        deg = degree if degree is not None else max((g.degree for g in generators), default=1)
        deg = max(deg, 1)
        self.degree = deg
        self.name = name
        gens = tuple(g.extend(deg) for g in generators)
        self._generators: tuple[Permutation, ...] | None = gens if generators else None
        if elements is None:
            limit = cap if cap is not None else get_settings().order_cap
            elements = _closure([g for g in gens if not g.is_identity()], deg, limit)
        self.elements: tuple[Permutation, ...] = tuple(elements)

    # -- identity -----------------------------------------------------------

    @cached_property
    def element_set(self) -> frozenset[Permutation]:
        return frozenset(self.elements)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PermGroup):
            return NotImplemented
        return self.degree == other.degree and self.element_set == other.element_set

    def __hash__(self) -> int:
        return hash((self.degree, self.element_set))

    def __contains__(self, g: object) -> bool:
        return g in self.element_set

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.label}>"

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        gens = "; ".join(g.cycle_notation() for g in self.generators)
        return f"<{gens}> (order {self.order})"

    # -- basic invariants ----------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def identity(self) -> Permutation:
        return Permutation.identity(self.degree)

    @property
    def generators(self) -> tuple[Permutation, ...]:
        if self._generators is None:
            self._generators = _greedy_generators(self.elements)
        return self._generators

    @cached_property
    def exponent(self) -> int:
        return lcm(1, *(g.order() for g in self.elements))

    @property
    def root(self) -> PermGroup:
        return self

    @property
    def value_level(self) -> int:
        """Cyclotomic level used for class-function values of this group and its subgroups."""
        return self.root.exponent

    @cached_property
    def is_abelian(self) -> bool:
        gens = self.generators
        return all(a * b == b * a for a in gens for b in gens)

    @cached_property
    def is_cyclic(self) -> bool:
        return any(g.order() == self.order for g in self.elements)

    @cached_property
    def cyclic_generator(self) -> Permutation:
        """Canonical generator: the first element (canonical order) of full order."""
        for g in self.elements:
            if g.order() == self.order:
                return g
        raise NotCyclicError(f"{self.label} is not cyclic")

    # -- conjugacy -----------------------------------------------------------

    @cached_property
    def classes(self) -> tuple[ConjugacyClass, ...]:
        """Conjugacy classes sorted by their minimal element; the identity class is first."""
        gens = self.generators
        inverses = [g.inverse() for g in gens]
        assigned: set[Permutation] = set()
        classes = []
        for x in self.elements:
            if x in assigned:
                continue
            orbit = {x}
            queue = deque([x])
            while queue:
                y = queue.popleft()
                for g, gi in zip(gens, inverses, strict=True):
                    z = g * y * gi
                    if z not in orbit:
                        orbit.add(z)
                        queue.append(z)
            assigned |= orbit
            members = tuple(sorted(orbit))
            classes.append(ConjugacyClass(members[0], members, members[0].order()))
        return tuple(classes)

    @cached_property
    def class_index(self) -> dict[Permutation, int]:
        return {g: i for i, cls in enumerate(self.classes) for g in cls.elements}

    @cached_property
    def inverse_class(self) -> tuple[int, ...]:
        return tuple(self.class_index[c.representative.inverse()] for c in self.classes)

    # -- subgroup lattice ----------------------------------------------------

    @cached_property
    def subgroups(self) -> tuple[Subgroup, ...]:
        return tuple(Subgroup(self, H.elements, H.generators) for H in _lattice(self))

    @cached_property
    def _subgroup_lookup(self) -> dict[frozenset[Permutation], Subgroup]:
        return {H.element_set: H for H in self.root.subgroups}

    def canonical(self, H: PermGroup) -> Subgroup:
        """The lattice object with the same elements as H (an enumerated subgroup)."""
        try:
            return self.root._subgroup_lookup[H.element_set]
        except KeyError as exc:
            raise ContainmentError(f"{H.label} is not a subgroup of {self.root.label}") from exc

    @cached_property
    def whole(self) -> Subgroup:
        return self.canonical(self)

    def subgroups_of(self, H: PermGroup) -> list[Subgroup]:
        """Enumerated subgroups contained in H, in canonical order."""
        return [K for K in self.root.subgroups if K.element_set <= H.element_set]

    def subgroup_generated(self, generators: Sequence[Permutation]) -> Subgroup:
        """The subgroup generated by elements of this group."""
        for g in generators:
            if g.extend(self.degree) not in self.element_set:
                raise ContainmentError(f"{g} is not an element of {self.label}")
        elems = _closure([g.extend(self.degree) for g in generators], self.degree, self.order)
        return self.canonical(PermGroup([], self.degree, elements=elems))


class Subgroup(PermGroup):
    """A subgroup of `parent`; conjugacy here is conjugacy inside the subgroup itself."""

    def __init__(
        self,
        parent: PermGroup,
        elements: Sequence[Permutation],
        generators: Sequence[Permutation] = (),
    ) -> None:
        super().__init__(generators, parent.degree, elements=sorted(elements))
        self.parent = parent
        if self.order == 0 or parent.order % self.order:
            raise ContainmentError("subgroup order does not divide the parent order")

    @property
    def root(self) -> PermGroup:
        return self.parent.root

    @property
    def label(self) -> str:
        if self.element_set == self.root.element_set:
            return self.root.label
        if self.order == 1:
            return "{e}"
        gens = ", ".join(g.cycle_notation() for g in self.generators)
        return f"<{gens}>"


@dataclass(frozen=True)
class SubgroupFamily:
    """All p-subgroups (`members`) and the cyclic ones among them."""

    prime: int
    members: tuple[Subgroup, ...]
    cyclic_members: tuple[Subgroup, ...]
    p_exponent: int


def _greedy_generators(elements: Sequence[Permutation]) -> tuple[Permutation, ...]:
    if len(elements) <= 1:
        return ()
    degree = elements[0].degree
    gens: list[Permutation] = []
    span: set[Permutation] = {Permutation.identity(degree)}
    for g in elements:
        if g in span:
            continue
        gens.append(g)
        span = set(_closure(gens, degree, len(elements)))
        if len(span) == len(elements):
            break
    return tuple(gens)


def _lattice(G: PermGroup) -> list[PermGroup]:
    cap = get_settings().order_cap
    if G.order > cap:
        raise OrderCapError(f"order {G.order} exceeds the cap of {cap}")
    deg = G.degree
    gens_of: dict[frozenset[Permutation], tuple[Permutation, ...]] = {}
    cyclic: list[tuple[frozenset[Permutation], Permutation]] = []
    for g in G.elements:
        elems = frozenset(_closure([g], deg, G.order))
        if elems not in gens_of:
            gens_of[elems] = () if g.is_identity() else (g,)
            cyclic.append((elems, g))
    queue = deque(gens_of)
    while queue:
        S = queue.popleft()
        for C, c in cyclic:
            if C <= S:
                continue
            gens = gens_of[S] + (c,)
            J = frozenset(_closure(gens, deg, G.order))
            if J not in gens_of:
                gens_of[J] = gens
                queue.append(J)
    ordered = sorted(gens_of, key=lambda s: (len(s), sorted(s)))
    logger.debug("subgroups_enumerated", group=G.label, order=G.order, count=len(ordered))
    return [PermGroup(gens_of[s], deg, elements=sorted(s)) for s in ordered]


# ---------------------------------------------------------------------------
# Catalog and parsing
# ---------------------------------------------------------------------------


def _catalog_order(kind: str, n: int) -> int:
    if kind in ("C", "Q"):
        return n
    if kind == "D":
        return 2 * n
    if kind == "S":
        return factorial(n)
    return max(factorial(n) // 2, 1)


def _catalog_generators(kind: str, n: int) -> tuple[list[Permutation], int]:
    cyc = lambda text, deg: Permutation.from_cycles(text, deg)  # noqa: E731
    if kind == "C":
        return [Permutation(tuple((i + 1) % n for i in range(n)))], n
    if kind == "D":
        if n == 1:
            return [cyc("(0 1)", 2)], 2
        if n == 2:
            return [cyc("(0 1)(2 3)", 4), cyc("(0 2)(1 3)", 4)], 4
        rotation = Permutation(tuple((i + 1) % n for i in range(n)))
        reflection = Permutation(tuple((-i) % n for i in range(n)))
        return [rotation, reflection], n
    if kind == "Q":
        return _dicyclic_generators(n), n
    if kind == "S":
        if n <= 1:
            return [], 1
        if n == 2:
            return [cyc("(0 1)", 2)], 2
        return [cyc("(0 1)", n), Permutation(tuple((i + 1) % n for i in range(n)))], n
    if n < 3:
        return [], max(n, 1)
    return [cyc(f"(0 1 {i})", n) for i in range(2, n)], n


def _dicyclic_generators(n: int) -> list[Permutation]:
    """Left-regular action of ⟨a, x | a^(n/2), x² = a^(n/4), x a x⁻¹ = a⁻¹⟩ on n points."""
    half = n // 2
    quarter = n // 4

    def mul(u: tuple[int, int], v: tuple[int, int]) -> tuple[int, int]:
        (k1, j1), (k2, j2) = u, v
        if j1 == 0:
            return ((k1 + k2) % half, j2)
        if j2 == 1:
            return ((k1 - k2 + quarter) % half, 0)
        return ((k1 - k2) % half, 1)

    index = lambda u: u[0] + u[1] * half  # noqa: E731
    points = [(k, j) for j in (0, 1) for k in range(half)]
    gens = []
    for g in ((1, 0), (0, 1)):
        images = [0] * n
        for u in points:
            images[index(u)] = index(mul(g, u))
        gens.append(Permutation(tuple(images)))
    return gens


def catalog_group(name: str) -> PermGroup:
    """
    Build a catalog group: Cn (cyclic, n points), Dn (dihedral of order 2n on n points;
    D1 = C2, D2 = Klein four on 4 points), Qn (dicyclic of order n, n divisible by 4,
    regular action), Sn and An (natural action on n points).
    """
    match = CATALOG_PATTERN.match(name.strip())
    if not match:
        raise InputError(f"unknown group identifier {name!r}; expected ^(C|D|Q|S|A)[0-9]+$")
    kind, n = match.group(1), int(match.group(2))
    if n < 1:
        raise InputError(f"group parameter must be positive: {name!r}")
    if kind == "Q" and (n % 4 or n < 4):
        raise InputError(f"dicyclic groups need an order divisible by 4: {name!r}")
    cap = get_settings().order_cap
    order = _catalog_order(kind, n)
    if order > cap:
        raise OrderCapError(f"{name} has order {order}, above the cap of {cap}")
    gens, degree = _catalog_generators(kind, n)
    G = PermGroup(gens, degree, name=name.strip())
    logger.debug("catalog_group_built", name=G.name, order=G.order, degree=degree)
    return G


def parse_group(text: str) -> PermGroup:
    """A catalog identifier or a ';'-separated list of generators in cycle notation."""
    text = text.strip()
    if CATALOG_PATTERN.match(text):
        return catalog_group(text)
    parts = [p for p in (s.strip() for s in text.split(";")) if p]
    if not parts:
        raise InputError("empty group description")
    gens = [Permutation.from_cycles(p) for p in parts]
    degree = max(g.degree for g in gens)
    return PermGroup([g.extend(degree) for g in gens], degree, name=text)


def parse_subgroup(G: PermGroup, text: str) -> Subgroup:
    """Subgroup of G generated by ';'-separated cycle-notation elements."""
    parts = [p for p in (s.strip() for s in text.split(";")) if p]
    if not parts:
        raise InputError("empty subgroup description")
    gens = [Permutation.from_cycles(p, G.degree) for p in parts]
    if any(g.degree > G.degree for g in gens):
        raise ContainmentError(f"{text!r} moves points outside the group's domain")
    return G.subgroup_generated(gens)


# ---------------------------------------------------------------------------
# Lattice operations
# ---------------------------------------------------------------------------


def subgroups(G: PermGroup) -> list[Subgroup]:
    """All subgroups of G sorted by (order, element list)."""
    return G.subgroups_of(G) if isinstance(G, Subgroup) else list(G.subgroups)


def _require_contained(inner: PermGroup, outer: PermGroup) -> None:
    if not inner.element_set <= outer.element_set:
        raise ContainmentError(f"{inner.label} is not contained in {outer.label}")


def conjugate_subgroup(H: PermGroup, g: Permutation) -> Subgroup:
    """g H g⁻¹ as an enumerated subgroup of H's root group."""
    gi = g.inverse()
    elems = frozenset(g * h * gi for h in H.elements)
    return H.root._subgroup_lookup[elems]


def intersection(A: PermGroup, B: PermGroup) -> Subgroup:
    return A.root._subgroup_lookup[A.element_set & B.element_set]


def normalizer(E: PermGroup, H: PermGroup) -> Subgroup:
    """N_E(H) = {g ∈ E : gHg⁻¹ = H}."""
    _require_contained(H, E)
    hs = H.element_set
    gens = H.generators
    elems = [g for g in E.elements if all(g * h * g.inverse() in hs for h in gens)]
    return E.root._subgroup_lookup[frozenset(elems)]


def double_coset_decomposition(
    L: PermGroup, middle: PermGroup, H: PermGroup
) -> list[tuple[Permutation, frozenset[Permutation]]]:
    """(minimal representative, double coset L·x·H) pairs partitioning `middle`."""
    _require_contained(L, middle)
    _require_contained(H, middle)
    seen: set[Permutation] = set()
    out = []
    for x in middle.elements:
        if x in seen:
            continue
        coset = frozenset(l * x * h for l in L.elements for h in H.elements)
        seen |= coset
        out.append((x, coset))
    return out


def double_cosets(L: PermGroup, middle: PermGroup, H: PermGroup) -> list[Permutation]:
    """One canonical (minimal-element) representative per double coset L\\middle/H."""
    return [x for x, _ in double_coset_decomposition(L, middle, H)]


def eppo_witness(G: PermGroup) -> Permutation | None:
    """First element (canonical order) whose order is neither 1 nor a prime power."""
    for g in G.elements:
        k = g.order()
        if k > 1 and not is_prime_power(k):
            return g
    return None


def is_eppo(G: PermGroup) -> bool:
    """Every element has prime-power order."""
    return eppo_witness(G) is None


def p_exponent(n: int, p: int) -> int:
    r = 0
    while n % p == 0:
        n //= p
        r += 1
    return r


def index_p_subgroup(H: PermGroup, p: int) -> Subgroup:
    """For cyclic H of p-power order > 1, the unique subgroup of index p."""
    if not H.is_cyclic:
        raise NotCyclicError(f"{H.label} is not cyclic")
    return H.root.subgroup_generated([H.cyclic_generator**p])


def prime_subgroup_families(G: PermGroup, *, allow_non_eppo: bool = False) -> list[SubgroupFamily]:
    """
    For each prime p dividing |G| (increasing): every p-subgroup and the cyclic ones.

    On a non-EPPO group the families are still the p-subgroups, but they no longer
    cover every elementary subgroup; that needs `allow_non_eppo=True`.
    """
    if not allow_non_eppo and not is_eppo(G):
        raise NotEppoError(f"{G.label} is not an EPPO group")
    families = []
    lattice = subgroups(G)
    for p in sorted(factorint(G.order)):
        members = tuple(H for H in lattice if H.order == 1 or set(factorint(H.order)) == {p})
        cyclic = tuple(H for H in members if H.is_cyclic)
        families.append(SubgroupFamily(p, members, cyclic, p_exponent(G.order, p)))
    logger.debug(
        "prime_subgroup_families",
        group=G.label,
        primes=[f.prime for f in families],
        sizes=[len(f.members) for f in families],
    )
    return families


def cyclic_class_representatives(E: PermGroup) -> list[Subgroup]:
    """One representative (canonical first) per E-conjugacy class of cyclic subgroups of E."""
    reps: list[Subgroup] = []
    covered: set[frozenset[Permutation]] = set()
    for H in E.root.subgroups_of(E):
        if not H.is_cyclic or H.element_set in covered:
            continue
        reps.append(H)
        for g in E.elements:
            covered.add(conjugate_subgroup(H, g).element_set)
    return reps


def subgroup_class_representatives(G: PermGroup) -> list[Subgroup]:
    """One representative per G-conjugacy class of subgroups of G."""
    reps: list[Subgroup] = []
    covered: set[frozenset[Permutation]] = set()
    for H in subgroups(G):
        if H.element_set in covered:
            continue
        reps.append(H)
        for g in G.elements:
            covered.add(conjugate_subgroup(H, g).element_set)
    return reps

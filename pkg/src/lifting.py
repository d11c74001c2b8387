"""
Lifting units from a cyclic subgroup to the whole group.

For an EPPO group G, a multiplicative profile S on R(G), a cyclic p-subgroup K
and a unit f at K, the pipeline builds one compatible family (f_H) per prime
over the p-subgroups of G and glues them with Brauer coefficients into
f̃ = Σ Ind(φ_H·f_H), whose restriction to K is a multiple of f.

Families carry unit witnesses for their cyclic entries. Witnesses are composed
(products, powers, restriction, conjugation) wherever an entry is built from
certified units; the bounded search only runs on freshly lifted entries.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

import structlog
from sympy import factorint

from characters import (
    AuditTally,
    ClassFunction,
    MackeyFamily,
    VirtualCharacter,
    character_table,
    conjugate_cf,
    coordinates,
    from_cyclic,
    induce_cf,
    is_virtual_character,
    restrict_cf,
    to_cyclic,
    weyl_action,
)
from cyclicring import CyclicRingElem, cyclic_lift, split_decomposition, unsplit
from cyclotomic import cyc_one, fixed_sublattice, lattice_coordinates
from errors import (
    ContainmentError,
    InputError,
    InvariantViolation,
    NotAUnitError,
    NotCyclicError,
    NotEppoError,
    UndecidedError,
)
from groups import (
    PermGroup,
    Subgroup,
    conjugate_subgroup,
    cyclic_class_representatives,
    index_p_subgroup,
    intersection,
    is_eppo,
    normalizer,
    p_exponent,
    prime_subgroup_families,
    subgroup_class_representatives,
    subgroups,
)
from linalg import solve_integer
from localization import MultSet, UnitProfile, UnitWitness, divide, divisible_primes
from models import VerificationEntry

logger = structlog.get_logger(__name__)


@dataclass
class WitnessedFamily(MackeyFamily):
    """A Mackey family whose cyclic entries carry unit witnesses."""

    witnesses: dict[PermGroup, UnitWitness] = field(default_factory=dict)

    def put(self, H: PermGroup, f: ClassFunction, witness: UnitWitness | None = None) -> None:
        self.entries[H] = f
        if witness is not None:
            self.witnesses[H] = witness

    def power(self, k: int) -> WitnessedFamily:
        return WitnessedFamily(
            self.prime,
            {H: f**k for H, f in self.entries.items()},
            {H: w.power(k) for H, w in self.witnesses.items()},
        )

    def times(self, other: WitnessedFamily) -> WitnessedFamily:
        entries = {H: f * other.entries[H] for H, f in self.entries.items()}
        witnesses = {
            H: w.times(other.witnesses[H])
            for H, w in self.witnesses.items()
            if H in other.witnesses
        }
        return WitnessedFamily(self.prime, entries, witnesses)

    def hint(self, H: PermGroup) -> int:
        """Largest witness exponent at H, a starting point for searches one level up."""
        w = self.witnesses.get(H)
        return max(w.exponents, default=0) if w is not None else 0


@dataclass(frozen=True)
class BrauerDecomposition:
    """Σ_H Ind(φ_H) = 1 over representatives of the prime-power-order subgroups."""

    group: PermGroup
    entries: dict[Subgroup, VirtualCharacter]

    def total(self) -> ClassFunction:
        acc = ClassFunction.constant(self.group, 0)
        for H, phi in self.entries.items():
            acc = acc + induce_cf(phi.class_function, self.group)
        return acc

    def verify(self) -> bool:
        return self.total() == ClassFunction.constant(self.group, 1)


@dataclass
class LiftResult:
    f_tilde: VirtualCharacter
    families: list[WitnessedFamily]
    multiplier: CyclicRingElem
    primes: list[int]
    brauer: BrauerDecomposition
    verification: list[VerificationEntry] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return all(entry.passed for entry in self.verification)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _p_members(G: PermGroup, p: int) -> tuple[list[Subgroup], list[Subgroup]]:
    """All p-subgroups of G and the cyclic ones, in lattice order."""
    for fam in prime_subgroup_families(G):
        if fam.prime == p:
            return list(fam.members), list(fam.cyclic_members)
    raise InputError(f"{p} does not divide the order of {G.label}")


def _trivial(G: PermGroup) -> Subgroup:
    return subgroups(G)[0]


def _contained(H: PermGroup, K: PermGroup) -> bool:
    return H.element_set <= K.element_set


def _certify(
    x: ClassFunction, profile: UnitProfile, bound: int | None, hint: int = 0
) -> UnitWitness:
    answer = profile.query(x, bound, start=hint)
    if answer.witness is not None:
        return answer.witness
    where = x.group.label
    if answer.is_nonunit:
        raise NotAUnitError(f"not a unit at {where}: {answer.describe()}")
    raise UndecidedError(f"unit query at {where} undecided: {answer.describe()}")


def _congruent_one(f: ClassFunction, modulus: int) -> bool:
    return all(c.denominator == 1 and c % modulus == 0 for c in coordinates(f - 1))


def _as_class_function(f: ClassFunction | CyclicRingElem, K: PermGroup) -> ClassFunction:
    if isinstance(f, CyclicRingElem):
        return from_cyclic(f, K)
    if f.group != K:
        raise InputError(f"element lives on {f.group.label}, not on {K.label}")
    return f


def _symmetrize(
    entries: Mapping[PermGroup, ClassFunction],
    witnesses: Mapping[PermGroup, UnitWitness],
    G: PermGroup,
    p: int,
    k: int,
) -> WitnessedFamily:
    """f_H ← Π_{g∈G} con_g(f_{H^g}^k) with H^g = g⁻¹Hg."""
    powered = {H: f**k for H, f in entries.items()}
    out = WitnessedFamily(p)
    for H in entries:
        acc = ClassFunction.constant(H, 1)
        witness: UnitWitness | None = None
        for g in G.elements:
            source = conjugate_subgroup(H, g.inverse())
            acc = acc * conjugate_cf(powered[source], g)
            if source in witnesses:
                w = witnesses[source].power(k).conjugated(g)
                witness = w if witness is None else witness.times(w)
        out.put(H, acc, witness if H in witnesses else None)
    return out


# ---------------------------------------------------------------------------
# Prime order and Brauer coefficients
# ---------------------------------------------------------------------------


def reorder_primes(G: PermGroup, S: MultSet) -> tuple[list[int], int]:
    """Primes of |G| with the profile's divisible primes first; also their count."""
    primes = sorted(int(p) for p in factorint(G.order))
    inverted = set(divisible_primes(S))
    divisible = [p for p in primes if p in inverted]
    rest = [p for p in primes if p not in inverted]
    return divisible + rest, len(divisible)


def brauer_coefficients(G: PermGroup) -> BrauerDecomposition:
    """Integer φ_H on prime-power-order subgroup classes with Σ Ind(φ_H) = 1."""
    if not is_eppo(G):
        raise NotEppoError(f"{G.label} is not an EPPO group")
    table = character_table(G)
    reps = [
        H for H in subgroup_class_representatives(G)
        if H.order == 1 or len(factorint(H.order)) == 1
    ]
    columns: list[list[Fraction]] = []
    labels: list[tuple[Subgroup, ClassFunction]] = []
    for H in reps:
        for chi in character_table(H).irreducibles:
            columns.append(table.coordinates(induce_cf(chi, G)))
            labels.append((H, chi))
    matrix = [[col[r] for col in columns] for r in range(len(table))]
    target = table.coordinates(ClassFunction.constant(G, 1))
    solution = solve_integer(matrix, target, cols=len(columns))
    if solution is None:
        raise InvariantViolation(f"no Brauer decomposition of 1 found for {G.label}")
    sums: dict[Subgroup, ClassFunction] = {H: ClassFunction.constant(H, 0) for H in reps}
    for (H, chi), c in zip(labels, solution, strict=True):
        if c:
            sums[H] = sums[H] + chi * c
    entries = {
        H: VirtualCharacter.from_class_function(phi)
        for H, phi in sums.items()
        if not phi.is_zero()
    }
    decomposition = BrauerDecomposition(G, entries)
    if not decomposition.verify():
        raise InvariantViolation(f"Brauer coefficients for {G.label} do not sum to 1")
    logger.debug("brauer_coefficients", group=G.label, subgroups=[H.label for H in entries])
    return decomposition


# ---------------------------------------------------------------------------
# The f_E formula and the family checks
# ---------------------------------------------------------------------------


def _fe_term(
    entries: Mapping[PermGroup, ClassFunction], E: PermGroup, H: Subgroup, p: int
) -> ClassFunction:
    """(f_H − 1)/|N_E(H)/H| − I^H_{pH}((f_{pH} − 1)/|N_E(H)/pH|)."""
    n = normalizer(E, H).order
    sub = index_p_subgroup(H, p)
    lower = (entries[sub] - 1) * Fraction(sub.order, n)
    return (entries[H] - 1) * Fraction(H.order, n) - induce_cf(lower, H)


def fe_formula(
    entries: Mapping[PermGroup, ClassFunction], E: PermGroup, p: int, *, exact: bool = True
) -> ClassFunction:
    """
    The element of R(E) determined by the cyclic entries of a family.

    f_E = 1 + I^E_e((f_e − 1)/|E|) + Σ_{H ∈ C_E, H ≠ e} I^E_H(term_H), C_E one cyclic
    subgroup per E-class. With `exact`, every term must be a virtual character.
    """
    trivial = _trivial(E)
    head = (entries[trivial] - 1) * Fraction(1, E.order)
    total = induce_cf(head, E) + 1
    for H in cyclic_class_representatives(E):
        if H.order == 1:
            continue
        term = _fe_term(entries, E, H, p)
        if exact and not is_virtual_character(term):
            raise InvariantViolation(f"inexact division in the term for {H.label} in {E.label}")
        total = total + induce_cf(term, E)
    if exact and not is_virtual_character(total):
        raise InvariantViolation(f"extension to {E.label} is not a virtual character")
    return total


def audit_family(family: MackeyFamily, G: PermGroup) -> dict[str, AuditTally]:
    """Exhaustive (res) and (con) checks over every pair of members and every g in G."""
    tally = {"res": AuditTally("res"), "con": AuditTally("con")}
    members = family.members()
    for H in members:
        f = family[H]
        for L in members:
            if L != H and _contained(L, H):
                tally["res"].record(
                    restrict_cf(f, L) == family[L], lambda: f"{L.label} in {H.label}"
                )
        for g in G.elements:
            target = conjugate_subgroup(H, g)
            tally["con"].record(
                conjugate_cf(f, g) == family[target], lambda: f"{H.label} by {g}"
            )
    return tally


def check_cyclic_terms_vanish(family: MackeyFamily, G: PermGroup, p: int) -> AuditTally:
    """For cyclic H ⊄ L inside E, the E-term of H restricts to zero on H ∩ L."""
    tally = AuditTally("cyclic_terms_vanish")
    X, _ = _p_members(G, p)
    for E in X:
        lattice = E.root.subgroups_of(E)
        for H in lattice:
            if not H.is_cyclic or H.order == 1:
                continue
            term = _fe_term(family.entries, E, H, p)
            for L in lattice:
                if _contained(H, L):
                    continue
                meet = intersection(H, L)
                tally.record(
                    restrict_cf(term, meet).is_zero(),
                    lambda: f"H={H.label}, L={L.label} in E={E.label}",
                )
    return tally


def check_fe_consistency(family: MackeyFamily, G: PermGroup, p: int) -> AuditTally:
    """The f_E formula evaluated on any L ⊆ E agrees with res^L_E(f_E)."""
    tally = AuditTally("fe_consistency")
    X, _ = _p_members(G, p)
    for E in X:
        f = family[E]
        for L in E.root.subgroups_of(E):
            direct = fe_formula(family.entries, L, p, exact=False)
            tally.record(
                direct == restrict_cf(f, L) and direct == family[L],
                lambda: f"{L.label} in {E.label}",
            )
    return tally


def _require_passed(tally: AuditTally, what: str) -> None:
    if not tally.passed:
        raise InvariantViolation(
            f"{what}: {tally.relation} failed {tally.failed}/{tally.checked}"
            f" ({tally.first_failure})"
        )


# ---------------------------------------------------------------------------
# Families for primes that are not inverted
# ---------------------------------------------------------------------------


def pre_family(
    G: PermGroup,
    p: int,
    K: PermGroup,
    f: ClassFunction | CyclicRingElem,
    profile: UnitProfile,
    bound: int | None = None,
) -> tuple[WitnessedFamily, int]:
    """
    A family over the cyclic p-subgroups with (res), entries ≡ 1 mod p and f_K a
    multiple of f. Returns it with N such that f_e = res^e(f)^N.
    """
    if p in profile.divisible_primes:
        raise InputError(f"{p} is inverted by the profile; use p_divisible_lift")
    f = _as_class_function(f, K)
    witness_f = _certify(f, profile, bound)
    _, Y = _p_members(G, p)
    trivial = Y[0]
    family = WitnessedFamily(p)
    N = p - 1
    family.put(trivial, restrict_cf(f, trivial) ** N, witness_f.restricted(trivial).power(N))
    r = 1
    while any(L.order == p**r for L in Y):
        fresh: dict[Subgroup, tuple[ClassFunction, UnitWitness]] = {}
        for L in (L for L in Y if L.order == p**r):
            if _contained(L, K):
                fresh[L] = (restrict_cf(f, L) ** N, witness_f.restricted(L).power(N))
                continue
            h = L.cyclic_generator
            sub = index_p_subgroup(L, p)
            below = to_cyclic(family[sub], h**p)
            lifted = from_cyclic(cyclic_lift(cyc_one(L.order), below), L, h)
            fresh[L] = (lifted, _certify(lifted, profile, bound, family.hint(sub)))
        q = p**r
        family = family.power(q)
        for L, (x, w) in fresh.items():
            family.put(L, x**q, w.power(q))
        N *= q
        r += 1
    for H, x in family.entries.items():
        if not _congruent_one(x, p):
            raise InvariantViolation(f"entry at {H.label} is not 1 mod {p}")
    logger.debug("pre_family_built", group=G.label, prime=p, members=len(Y), exponent=N)
    return family, N


def stabilize_family(family: WitnessedFamily, G: PermGroup, p: int, r: int) -> WitnessedFamily:
    """Symmetrize under conjugation; entries become ≡ 1 mod p^r."""
    out = _symmetrize(family.entries, family.witnesses, G, p, p ** (r - 1))
    for H, x in out.entries.items():
        if not _congruent_one(x, p**r):
            raise InvariantViolation(f"stabilized entry at {H.label} is not 1 mod {p}^{r}")
    return out


def extend_to_p_groups(
    family: WitnessedFamily, G: PermGroup, p: int, *, exact: bool = True
) -> WitnessedFamily:
    """Fill in the non-cyclic p-subgroups with the f_E formula."""
    X, Y = _p_members(G, p)
    out = WitnessedFamily(p, dict(family.entries), dict(family.witnesses))
    cyclic = set(Y)
    for E in X:
        if E not in cyclic:
            out.put(E, fe_formula(family.entries, E, p, exact=exact))
    return out


def lift_not_divisible(
    G: PermGroup,
    p: int,
    K: PermGroup,
    f: ClassFunction | CyclicRingElem,
    profile: UnitProfile,
    bound: int | None = None,
) -> tuple[WitnessedFamily, int]:
    """pre_family, then symmetrize and extend; also returns N with f_e = res^e(f)^N."""
    family, N = pre_family(G, p, K, f, profile, bound)
    r = p_exponent(G.order, p)
    family = stabilize_family(family, G, p, r)
    N *= G.order * p ** (r - 1)
    _require_passed(check_cyclic_terms_vanish(family, G, p), f"family for {p}")
    return extend_to_p_groups(family, G, p), N


# ---------------------------------------------------------------------------
# Families for inverted primes
# ---------------------------------------------------------------------------


def _scale_integral(
    entries: Mapping[PermGroup, ClassFunction], p: int
) -> tuple[dict[PermGroup, ClassFunction], int]:
    """Multiply by the least p^N making every entry a virtual character."""
    N = 0
    for H, x in entries.items():
        for c in coordinates(x):
            v = p_exponent(c.denominator, p)
            if p**v != c.denominator:
                raise InvariantViolation(f"entry at {H.label} has denominators prime to {p}")
            N = max(N, v)
    return {H: x * p**N for H, x in entries.items()}, N


def _certify_cyclic(
    entries: Mapping[PermGroup, ClassFunction],
    Y: list[Subgroup],
    p: int,
    profile: UnitProfile,
    bound: int | None,
) -> WitnessedFamily:
    family = WitnessedFamily(p, dict(entries))
    for L in Y:
        hint = family.hint(index_p_subgroup(L, p)) if L.order > 1 else 0
        family.witnesses[L] = _certify(entries[L], profile, bound, hint)
    return family


def integer_lift(
    G: PermGroup,
    p: int,
    r: int,
    a: int,
    profile: UnitProfile,
    bound: int | None = None,
) -> WitnessedFamily:
    """A family over the p-subgroups with ψ_e = p^r·a, built from ψ'_H = unsplit(1, ψ'_{pH})."""
    if p not in profile.divisible_primes:
        raise InputError(f"{p} is not inverted by the profile")
    X, Y = _p_members(G, p)
    trivial = Y[0]
    _certify(ClassFunction.constant(trivial, a), profile, bound)
    local: dict[PermGroup, ClassFunction] = {trivial: ClassFunction.constant(trivial, a)}
    for L in Y[1:]:
        h = L.cyclic_generator
        below = to_cyclic(local[index_p_subgroup(L, p)], h**p)
        x = unsplit(cyc_one(L.order), below)
        top, rest = split_decomposition(x)
        if top != cyc_one(L.order) or rest != below:
            raise InvariantViolation(f"integer lift at {L.label} does not split as (1, res)")
        local[L] = from_cyclic(x, L, h)
    cyclic = set(Y)
    for E in X:
        if E not in cyclic:
            local[E] = fe_formula(local, E, p, exact=False)
    scaled = {H: x * p**r for H, x in local.items()}
    for H, x in scaled.items():
        if not is_virtual_character(x):
            raise InvariantViolation(f"p^r does not clear the denominators at {H.label}")
    family = _certify_cyclic(scaled, Y, p, profile, bound)
    logger.debug("integer_lift_built", group=G.label, prime=p, r=r, a=a)
    return family


def cyclic_components(entries: Mapping[PermGroup, ClassFunction], L: PermGroup) -> ClassFunction:
    """The class function x ↦ f_{⟨x⟩}(x) on L."""
    root = L.root
    return ClassFunction.from_function(
        L, lambda x: entries[root.subgroup_generated([x])].value(x)
    )


def check_cyclic_components(
    entries: Mapping[PermGroup, ClassFunction], L: PermGroup, p: int
) -> bool:
    """Generator values are Weyl-invariant and lie in p-power multiples of the fixed lattice."""
    for H in cyclic_class_representatives(L):
        if H.order == 1:
            continue
        value = entries[H].value(H.cyclic_generator).descend(H.order)
        W = weyl_action(L, H)
        if any(value.galois(j) != value for j in W):
            return False
        scale = max((p_exponent(c.denominator, p) for c in value.coeffs), default=0)
        if lattice_coordinates(fixed_sublattice(H.order, W), value * p**scale) is None:
            return False
    return True


def p_divisible_lift(
    G: PermGroup,
    p: int,
    K: PermGroup,
    f: ClassFunction | CyclicRingElem,
    profile: UnitProfile,
    bound: int | None = None,
) -> WitnessedFamily:
    """A family over the p-subgroups with f_K a multiple of f, for an inverted prime p."""
    if p not in profile.divisible_primes:
        raise InputError(f"{p} is not inverted by the profile")
    f = _as_class_function(f, K)
    _certify(f, profile, bound)
    X, Y = _p_members(G, p)
    trivial = Y[0]
    local: dict[PermGroup, ClassFunction] = {trivial: restrict_cf(f, trivial)}
    for L in Y[1:]:
        if _contained(L, K):
            local[L] = restrict_cf(f, L)
            continue
        h = L.cyclic_generator
        below = to_cyclic(local[index_p_subgroup(L, p)], h**p)
        local[L] = from_cyclic(unsplit(cyc_one(L.order), below), L, h)
    symmetric = _symmetrize(local, {}, G, p, 1).entries
    cyclic = set(Y)
    for E in X:
        if E in cyclic:
            continue
        if not check_cyclic_components(symmetric, E, p):
            raise InvariantViolation(f"cyclic components over {E.label} are not Weyl-invariant")
        symmetric[E] = cyclic_components(symmetric, E)
    scaled, N = _scale_integral(symmetric, p)
    family = _certify_cyclic(scaled, Y, p, profile, bound)
    logger.debug("p_divisible_lift_built", group=G.label, prime=p, scale_exponent=N)
    return family


# ---------------------------------------------------------------------------
# Matching families and gluing
# ---------------------------------------------------------------------------


def _common_value(family: WitnessedFamily) -> int:
    value = family[_trivial_key(family)].degree()
    if value.denominator != 1:
        raise InvariantViolation("identity entry is not an integer")
    return int(value)


def _trivial_key(family: MackeyFamily) -> PermGroup:
    return family.members()[0]


def build_families(
    G: PermGroup,
    K: PermGroup,
    f: ClassFunction,
    profile: UnitProfile,
    bound: int | None = None,
) -> tuple[list[int], dict[int, WitnessedFamily]]:
    """One family per prime, all with the same identity entry and f_K a multiple of f."""
    primes, n = reorder_primes(G, profile.base)
    divisible, rest = primes[:n], primes[n:]
    r = {p: p_exponent(G.order, p) for p in primes}
    pk = primes[0] if K.order == 1 else int(next(iter(factorint(K.order))))
    target = 1
    for p in divisible:
        target *= p ** r[p]
    families: dict[int, WitnessedFamily] = {}
    trivial = _trivial(G)
    if pk in divisible:
        lifted = p_divisible_lift(G, pk, K, f, profile, bound)
        psi = integer_lift(G, pk, r[pk], target // pk ** r[pk], profile, bound)
        families[pk] = lifted.times(psi)
        pending = rest
    else:
        first, _ = lift_not_divisible(G, pk, K, f, profile, bound)
        if target > 1:
            base = ClassFunction.constant(trivial, target)
            second, _ = lift_not_divisible(G, pk, trivial, base, profile, bound)
            first = first.times(second)
        families[pk] = first
        pending = [p for p in rest if p != pk]
    common = _common_value(families[pk])
    for p in divisible:
        if p == pk:
            continue
        if common % p ** r[p]:
            raise InvariantViolation(f"{p}^{r[p]} does not divide the common value")
        families[p] = integer_lift(G, p, r[p], common // p ** r[p], profile, bound)
    for p in pending:
        base = ClassFunction.constant(trivial, common)
        family, N = lift_not_divisible(G, p, trivial, base, profile, bound)
        for q in list(families):
            families[q] = families[q].power(N)
        families[p] = family
        common = common**N
        logger.debug("families_matched", prime=p, exponent=N)
    return primes, families


def assemble_and_glue(
    G: PermGroup,
    K: PermGroup,
    f: ClassFunction | CyclicRingElem,
    profile: UnitProfile,
    bound: int | None = None,
) -> LiftResult:
    """Build the per-prime families and glue them into f̃ with res^K(f̃) a multiple of f."""
    if not is_eppo(G):
        raise NotEppoError(f"{G.label} is not an EPPO group")
    if profile.base.group != G:
        raise InputError("the profile lives on a different group")
    if not _contained(K, G):
        raise ContainmentError(f"{K.label} is not a subgroup of {G.label}")
    if not K.is_cyclic:
        raise NotCyclicError(f"{K.label} is not cyclic")
    K = G.root.canonical(K)
    f = _as_class_function(f, K)
    logger.info("lift_started", group=G.label, subgroup=K.label, order=G.order)
    log: list[VerificationEntry] = []
    lookup: dict[PermGroup, tuple[ClassFunction, UnitWitness | None]] = {}
    brauer = brauer_coefficients(G)
    log.append(VerificationEntry(check="brauer_identity", passed=brauer.verify()))
    if G.order == 1:
        primes: list[int] = []
        families: dict[int, WitnessedFamily] = {}
        lookup[K] = (f, _certify(f, profile, bound))
    else:
        primes, families = build_families(G, K, f, profile, bound)
        for p in primes:
            for H, x in families[p].entries.items():
                lookup.setdefault(H, (x, families[p].witnesses.get(H)))
        for p in primes:
            family = families[p]
            for name, tally in audit_family(family, G).items():
                log.append(_tally_entry(f"family_{p}_{name}", tally))
            log.append(_tally_entry(f"family_{p}_fe", check_fe_consistency(family, G, p)))
        values = {_common_value(families[p]) for p in primes}
        log.append(VerificationEntry(check="common_identity_value", passed=len(values) == 1))
    total = ClassFunction.constant(G, 0)
    for H, phi in brauer.entries.items():
        total = total + induce_cf(phi.class_function * lookup[H][0], G)
    f_tilde = VirtualCharacter.from_class_function(total)
    log.extend(_check_restrictions(G, total, lookup, profile))
    entry_k, witness_k = lookup[K]
    quotient = divide(f, entry_k)
    if quotient is None or witness_k is None:
        raise InvariantViolation(f"the family entry at {K.label} is not a multiple of f")
    multiplier_witness = UnitWitness(f * witness_k.cofactor, witness_k.exponents)
    log.append(
        VerificationEntry(
            check="restriction_is_multiple",
            passed=restrict_cf(total, K) == quotient * f
            and multiplier_witness.verify(quotient, profile.profile(K)),
            detail=f"res to {K.label} = m * f with m a unit",
        )
    )
    result = LiftResult(
        f_tilde=f_tilde,
        families=[families[p] for p in primes],
        multiplier=to_cyclic(quotient),
        primes=primes,
        brauer=brauer,
        verification=log,
    )
    if not result.verified:
        failed = [entry.check for entry in log if not entry.passed]
        raise InvariantViolation(f"lift verification failed: {', '.join(failed)}")
    logger.info("lift_glued", group=G.label, primes=primes, checks=len(log))
    return result


def _tally_entry(check: str, tally: AuditTally) -> VerificationEntry:
    detail = f"{tally.checked} checked"
    if tally.first_failure is not None:
        detail += f", first failure {tally.first_failure}"
    return VerificationEntry(check=check, passed=tally.passed, detail=detail)


def _check_restrictions(
    G: PermGroup,
    total: ClassFunction,
    lookup: Mapping[PermGroup, tuple[ClassFunction, UnitWitness | None]],
    profile: UnitProfile,
) -> list[VerificationEntry]:
    """res^L(f̃) = f_L with a valid unit witness, for every cyclic L."""
    entries = []
    for L in subgroups(G):
        if not L.is_cyclic:
            continue
        x, witness = lookup[L]
        equal = restrict_cf(total, L) == x
        unit = witness is not None and witness.verify(x, profile.profile(L))
        entries.append(
            VerificationEntry(
                check="cyclic_restriction",
                passed=equal and unit,
                detail=f"{L.label}: witness {witness.describe() if witness else 'missing'}",
            )
        )
    return entries

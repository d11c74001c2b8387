"""
Tests for multiplicative sets, unit certification and the model K-groups.
"""

from __future__ import annotations

import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from characters import ClassFunction, restrict_cf, trivial_character
from errors import InputError
from groups import PermGroup, Permutation, parse_subgroup
from localization import (
    MultSet,
    UnitProfile,
    UnitWitness,
    certificates_equal,
    check_splitting,
    conjugated_profile,
    divide,
    divisible_primes,
    is_unit,
    is_unit_by_restriction,
    model_kgroups,
    nonunit_certificate,
    restricted_profile,
)
from models import UnitVerdict, Verdict


def const(G: PermGroup, value: int) -> ClassFunction:
    return ClassFunction.constant(G, value)


def fixed_points(s3: PermGroup) -> ClassFunction:
    """Permutation character of S3 on three points."""
    return ClassFunction.from_rationals(s3, [3, 1, 0])


class TestMultSet:
    """Tests for MultSet construction and its invariants."""

    def test_rejects_dimension_zero(self, s3: PermGroup) -> None:
        """Test that a generator of dimension zero is refused."""
        with pytest.raises(InputError):
            MultSet(s3, (ClassFunction.from_rationals(s3, [0, 2, 0]),))

    def test_rejects_foreign_generator(self, s3: PermGroup, c4: PermGroup) -> None:
        """Test that generators must live on the set's group."""
        with pytest.raises(InputError):
            MultSet(s3, (const(c4, 2),))

    def test_divisible_primes(self, s3: PermGroup) -> None:
        """Test the primes dividing generator dimensions."""
        assert divisible_primes(MultSet(s3, (const(s3, 6),))) == [2, 3]
        assert divisible_primes(MultSet(s3, (fixed_points(s3),))) == [3]
        assert divisible_primes(MultSet(s3)) == []

    def test_power_product(self, s3: PermGroup) -> None:
        """Test Π s_i^{e_i}."""
        S = MultSet(s3, (const(s3, 2), const(s3, 3)))
        assert S.power_product([2, 1]) == const(s3, 12)
        assert S.product == const(s3, 6)

    def test_restricted_profile(self, s3: PermGroup) -> None:
        """Test restriction of every generator."""
        c3 = parse_subgroup(s3, "(0 1 2)")
        S = restricted_profile(MultSet(s3, (fixed_points(s3),)), c3)
        assert S.group == c3
        assert S.generators[0] == restrict_cf(fixed_points(s3), c3)

    def test_conjugated_profile(self, s3: PermGroup) -> None:
        """Test that conjugation moves the set to gHg⁻¹."""
        c2 = parse_subgroup(s3, "(0 1)")
        S = MultSet(c2, (const(c2, 2),))
        moved = conjugated_profile(S, Permutation.from_cycles("(1 2)", 3))
        assert moved.group == parse_subgroup(s3, "(0 2)")


class TestCertificates:
    """Tests for nonunit certificates and exact division."""

    def test_norm_prime(self, s3: PermGroup) -> None:
        """Test that 2 is not a unit when only 3 is inverted."""
        S = MultSet(s3, (const(s3, 3),))
        cert = nonunit_certificate(const(s3, 2), S)
        assert cert is not None
        assert cert.kind == "norm_prime"
        assert cert.prime == 2
        assert cert.verify(const(s3, 2), S)

    def test_zero_value(self, s3: PermGroup) -> None:
        """Test the obstruction at a class where f vanishes."""
        S = MultSet(s3, (const(s3, 3),))
        cert = nonunit_certificate(fixed_points(s3), S)
        assert cert is not None
        assert cert.kind == "zero_value"
        assert cert.class_index == 2
        assert cert.verify(fixed_points(s3), S)

    def test_no_certificate_for_generator(self, s3: PermGroup) -> None:
        """Test that a generator is never obstructed."""
        S = MultSet(s3, (fixed_points(s3),))
        assert nonunit_certificate(fixed_points(s3), S) is None

    def test_divide(self, s3: PermGroup) -> None:
        """Test exact division in R(G)."""
        assert divide(const(s3, 2), const(s3, 6)) == const(s3, 3)
        assert divide(const(s3, 2), const(s3, 3)) is None

    def test_divide_with_zero_values(self, s3: PermGroup) -> None:
        """Test division when the divisor vanishes on a class."""
        f = fixed_points(s3)
        g = divide(f, f)
        assert g is not None
        assert f * g == f


class TestIsUnit:
    """Tests for the bounded unit query."""

    def test_unit_with_witness(self, s3: PermGroup) -> None:
        """Test that 2 becomes a unit after inverting 2."""
        S = MultSet(s3, (const(s3, 2),))
        answer = is_unit(const(s3, 2), S)
        assert answer.verdict is UnitVerdict.UNIT
        assert answer.witness is not None
        assert answer.witness.verify(const(s3, 2), S)

    def test_generator_is_unit(self, s3: PermGroup) -> None:
        """Test that a generator with vanishing values is a unit of its own localization."""
        S = MultSet(s3, (fixed_points(s3),))
        answer = is_unit(fixed_points(s3), S)
        assert answer.is_unit
        assert answer.witness is not None
        assert answer.witness.exponents == (1,)

    def test_nonunit(self, s3: PermGroup) -> None:
        """Test the certificate path."""
        answer = is_unit(const(s3, 2), MultSet(s3, (const(s3, 3),)))
        assert answer.is_nonunit
        assert answer.certificate is not None

    def test_undecided_within_bound(self, c2: PermGroup) -> None:
        """Test that 4 needs P^2 when P = 2."""
        S = MultSet(c2, (const(c2, 2),))
        assert is_unit(const(c2, 4), S, bound=0).verdict is UnitVerdict.UNDECIDED
        assert is_unit(const(c2, 4), S, bound=1).is_unit

    def test_start_hint(self, c2: PermGroup) -> None:
        """Test that the search can begin at a later exponent."""
        S = MultSet(c2, (const(c2, 2),))
        answer = is_unit(const(c2, 4), S, bound=0, start=2)
        assert answer.is_unit
        assert answer.witness is not None
        assert answer.witness.exponents == (2,)

    def test_negative_bound(self, c2: PermGroup) -> None:
        """Test that negative bounds are refused."""
        with pytest.raises(InputError):
            is_unit(const(c2, 1), MultSet(c2), bound=-1)

    def test_default_bound_from_settings(
        self, c2: PermGroup, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        """Test that UNIT_BOUND feeds the default bound."""
        monkeypatch.setenv("UNIT_BOUND", "0")
        answer = is_unit(const(c2, 4), MultSet(c2, (const(c2, 2),)))
        assert answer.bound == 0
        assert answer.verdict is UnitVerdict.UNDECIDED

    def test_group_mismatch(self, s3: PermGroup, c2: PermGroup) -> None:
        """Test that f and S must share a group."""
        with pytest.raises(InputError):
            is_unit(const(c2, 1), MultSet(s3))

    def test_by_restriction(self, s3: PermGroup) -> None:
        """Test the cyclic-subgroup criterion on S3."""
        S = MultSet(s3, (fixed_points(s3),))
        answer = is_unit_by_restriction(fixed_points(s3), S)
        assert answer.is_unit
        assert len(answer.restriction_witnesses) == 3

    def test_by_restriction_nonunit(self, s3: PermGroup) -> None:
        """Test that one obstructed restriction decides."""
        answer = is_unit_by_restriction(const(s3, 2), MultSet(s3, (const(s3, 3),)))
        assert answer.is_nonunit


class TestWitnessAlgebra:
    """Tests for composing unit witnesses."""

    def test_times_and_power(self, s3: PermGroup) -> None:
        """Test that products and powers of witnesses stay valid."""
        S = MultSet(s3, (const(s3, 2),))
        w = is_unit(const(s3, 2), S).witness
        assert w is not None
        assert w.times(w).verify(const(s3, 4), S)
        assert w.power(3).verify(const(s3, 8), S)

    def test_restricted(self, s3: PermGroup) -> None:
        """Test restriction of a witness."""
        c3 = parse_subgroup(s3, "(0 1 2)")
        S = MultSet(s3, (const(s3, 2),))
        w = UnitWitness(trivial_character(s3), (1,))
        assert w.restricted(c3).verify(const(c3, 2), restricted_profile(S, c3))

    def test_describe(self, s3: PermGroup) -> None:
        """Test the witness summary."""
        assert UnitWitness(trivial_character(s3), (0, 2)).describe() == "s1^2"
        assert UnitWitness(trivial_character(s3), (0,)).describe() == "1"


class TestUnitProfile:
    """Tests for the memoized profile."""

    def test_decided_answers_are_cached(self, s3: PermGroup) -> None:
        """Test that a decided query is answered from the cache."""
        profile = UnitProfile(MultSet(s3, (const(s3, 2),)))
        first = profile.query(const(s3, 2))
        assert profile.query(const(s3, 2)) is first
        assert profile.divisible_primes == [2]

    def test_undecided_answers_are_not_cached(self, c2: PermGroup) -> None:
        """Test that undecided queries are recomputed."""
        profile = UnitProfile(MultSet(c2, (const(c2, 2),)))
        first = profile.query(const(c2, 4), bound=0)
        assert first.verdict is UnitVerdict.UNDECIDED
        assert profile.query(const(c2, 4), bound=1).is_unit

    def test_subgroup_queries(self, s3: PermGroup) -> None:
        """Test that queries on subgroups use the restricted set."""
        c3 = parse_subgroup(s3, "(0 1 2)")
        profile = UnitProfile(MultSet(s3, (fixed_points(s3),)))
        assert profile.profile(c3).group == c3
        assert profile.query(restrict_cf(fixed_points(s3), c3)).is_unit


class TestModelKGroups:
    """Tests for the model K-groups and the splitting check."""

    def test_one_entry_per_subgroup(self, s3: PermGroup) -> None:
        """Test K_0 and K_1 for every subgroup of S3."""
        entries = model_kgroups(MultSet(s3, (const(s3, 2),)))
        assert len(entries) == 6
        assert all(e.k1 == "0" for e in entries)
        assert all(e.divisible_primes == [2] for e in entries)

    def test_summands(self, s3: PermGroup) -> None:
        """Test the 2-local splitting on the order-two subgroups only."""
        entries = model_kgroups(MultSet(s3, (const(s3, 2),)))
        by_order = {e.order: e for e in entries}
        assert by_order[2].summands == ["Z[zeta_2, 1/2]", "Z[1/2]"]
        assert by_order[3].summands == []

    def test_check_splitting(self, s3: PermGroup) -> None:
        """Test the round trip on a cyclic 2-subgroup."""
        c2 = parse_subgroup(s3, "(0 1)")
        assert check_splitting(MultSet(s3, (const(s3, 2),)), c2)


class TestCertificateComparison:
    """Tests for certificates_equal."""

    def test_equal(self, s3: PermGroup) -> None:
        """Test that ⟨2⟩ and ⟨4⟩ have the same saturation."""
        result = certificates_equal(MultSet(s3, (const(s3, 2),)), MultSet(s3, (const(s3, 4),)))
        assert result.verdict is Verdict.EQUAL

    def test_distinct(self, s3: PermGroup) -> None:
        """Test that ⟨2⟩ and ⟨3⟩ differ, with the first generator as witness."""
        result = certificates_equal(MultSet(s3, (const(s3, 2),)), MultSet(s3, (const(s3, 3),)))
        assert result.verdict is Verdict.DISTINCT
        assert result.side == "first"
        assert result.generator_index == 0

    def test_distinct_from_six(self, s3: PermGroup) -> None:
        """Test that ⟨2⟩ and ⟨6⟩ differ through a checkable certificate on 6."""
        S2, S6 = MultSet(s3, (const(s3, 2),)), MultSet(s3, (const(s3, 6),))
        result = certificates_equal(S2, S6)
        assert result.verdict is Verdict.DISTINCT
        assert result.side == "second"
        assert result.answer is not None and result.answer.certificate is not None
        assert result.answer.certificate.prime == 3
        assert result.answer.certificate.verify(const(s3, 6), S2)

    def test_redundant_generator(self, s3: PermGroup) -> None:
        """Test that ⟨2⟩ and ⟨2, 4⟩ are equal."""
        result = certificates_equal(
            MultSet(s3, (const(s3, 2),)), MultSet(s3, (const(s3, 2), const(s3, 4)))
        )
        assert result.verdict is Verdict.EQUAL

    def test_undecided(self, s3: PermGroup) -> None:
        """Test an undecided comparison under a tight bound."""
        result = certificates_equal(
            MultSet(s3, (const(s3, 2),)), MultSet(s3, (const(s3, 16),)), bound=0
        )
        assert result.verdict is Verdict.UNDECIDED
        assert result.undecided_count == 1

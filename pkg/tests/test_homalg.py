"""
Tests for finitely presented modules, tensor products and Tor_1.
"""

from __future__ import annotations

import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cyclotomic import CycNum, zeta
from errors import InputError, RingMismatchError, UnsupportedRingError
from homalg import (
    CyclotomicIntegers,
    FPModule,
    is_flat,
    kunneth_ends,
    parse_module,
    parse_ring,
    ring_label,
    tensor,
    tor1,
    tor1_by_invariants,
    verify_ses,
)
from linalg import IntegerRing

ZZ = IntegerRing()


def zmod(*invariants: int) -> FPModule:
    """⊕ Z/(d) as a diagonal presentation."""
    n = len(invariants)
    rows = [[d if i == j else 0 for j in range(n)] for i, d in enumerate(invariants)]
    return FPModule.from_rows(ZZ, rows, n)


class TestRings:
    """Tests for ring parsing and the cyclotomic Euclidean rings."""

    def test_parse_ring(self) -> None:
        """Test the ring names."""
        assert parse_ring("Z") == ZZ
        assert parse_ring("zeta4") == CyclotomicIntegers(4)
        assert ring_label(parse_ring("zeta4")) == "Z[zeta_4]"
        assert ring_label(parse_ring("integers")) == "Z"

    def test_level_two_is_the_integers(self) -> None:
        """Test that Z[ζ_2] is stored as level 1."""
        assert CyclotomicIntegers(2).n == 1

    @pytest.mark.parametrize("name", ["zeta7", "zeta23", "gaussian"])
    def test_unsupported(self, name: str) -> None:
        """Test that rings outside the supported list are refused."""
        with pytest.raises(UnsupportedRingError):
            parse_ring(name)

    def test_divmod(self) -> None:
        """Test a = q·b + r with N(r) < N(b) in Z[i]."""
        R = CyclotomicIntegers(4)
        a = CycNum.from_coeffs(4, [7, 3])
        b = CycNum.from_coeffs(4, [2, 1])
        q, r = R.divmod(a, b)
        assert q * b + r == a
        assert R.size(r) < R.size(b)

    def test_divmod_by_zero(self) -> None:
        """Test that division by zero is refused."""
        R = CyclotomicIntegers(4)
        with pytest.raises(ZeroDivisionError):
            R.divmod(R.one(), R.zero())

    def test_associates_normalize_together(self) -> None:
        """Test that unit multiples share a canonical associate."""
        R = CyclotomicIntegers(4)
        a = CycNum.from_coeffs(4, [1, 1])
        c, u = R.normalize(a)
        assert c == u * a
        assert R.normalize(zeta(4) * a)[0] == c

    def test_fundamental_unit_is_absorbed(self) -> None:
        """Test that 2·(1 + ζ_5) normalizes like 2 in Z[ζ_5]."""
        R = CyclotomicIntegers(5)
        two = R.element(2)
        eps = R.element([1, 1])
        assert R.is_unit(eps)
        assert R.normalize(two * eps)[0] == R.normalize(two)[0]

    def test_element_parsing(self) -> None:
        """Test ints, coefficient lists and rejects."""
        R = CyclotomicIntegers(4)
        assert R.element(3) == CycNum.rational_const(4, 3)
        assert R.element([0, 0, 1]) == -R.one()
        with pytest.raises(InputError):
            R.element(True)
        with pytest.raises(InputError):
            R.element("i")


class TestModules:
    """Tests for FPModule invariants."""

    def test_invariant_factors(self) -> None:
        """Test the textbook Smith form 2 | 6 | 12."""
        M = parse_module(ZZ, "[[2, 4, 4], [-6, 6, 12], [10, -4, -16]]")
        assert M.describe() == ["2", "6", "12"]
        assert M.torsion_order() == 144

    def test_units_drop_out(self) -> None:
        """Test that Z/2 ⊕ Z/3 is cyclic of order 6."""
        assert zmod(2, 3).describe() == ["6"]

    def test_free_and_zero(self) -> None:
        """Test [[0]] = Z and [] = 0."""
        assert parse_module(ZZ, "[[0]]").describe() == ["free^1"]
        assert parse_module(ZZ, "[]").is_zero()
        assert FPModule.free(ZZ, 2).rank == 2

    def test_mixed(self) -> None:
        """Test torsion next to a free summand."""
        M = FPModule.from_rows(ZZ, [[4, 0]], 2)
        assert M.describe() == ["4", "free^1"]

    @pytest.mark.parametrize(
        "text", ["[[1, 2]", '{"a": 1}', "[[1, 2], [3]]", "[[true]]", "[[1.5]]"]
    )
    def test_bad_input(self, text: str) -> None:
        """Test malformed matrices."""
        with pytest.raises(InputError):
            parse_module(ZZ, text)

    def test_relation_width(self) -> None:
        """Test that relation rows must match the generator count."""
        with pytest.raises(InputError):
            FPModule(ZZ, ((1, 2),), 3)

    def test_canonical_is_isomorphic(self) -> None:
        """Test the diagonal presentation."""
        M = parse_module(ZZ, "[[2, 4], [6, 8]]")
        assert M.canonical().is_isomorphic(M)

    def test_random_moves_preserve_invariants(self) -> None:
        """Test that recorded unimodular moves keep the module."""
        M = parse_module(ZZ, "[[2, 4, 4], [-6, 6, 12], [10, -4, -16]]")
        for seed in range(5):
            moved, log = M.random_unimodular_moves(seed)
            assert moved.is_isomorphic(M), log

    def test_gaussian_module(self) -> None:
        """Test Z[i]/(2) has order 4 and one invariant factor."""
        R = parse_ring("zeta4")
        M = parse_module(R, "[[2]]")
        assert len(M.invariants().torsion) == 1
        assert M.torsion_order() == 4


class TestTensorAndTor:
    """Tests for tensor products and Tor_1."""

    def test_tensor_of_cyclic(self) -> None:
        """Test Z/4 ⊗ Z/6 = Z/2 and Z/2 ⊗ Z/3 = 0."""
        assert tensor(zmod(4), zmod(6)).describe() == ["2"]
        assert tensor(zmod(2), zmod(3)).is_zero()

    def test_tensor_with_free(self) -> None:
        """Test Z ⊗ M = M."""
        M = zmod(2, 4)
        assert tensor(FPModule.free(ZZ, 1), M).is_isomorphic(M)

    def test_tor_of_cyclic(self) -> None:
        """Test Tor_1(Z/4, Z/6) = Z/2."""
        assert tor1(zmod(4), zmod(6)).describe() == ["2"]

    def test_tor_vanishes_on_free(self) -> None:
        """Test Tor_1(Z, M) = 0."""
        assert tor1(FPModule.free(ZZ, 2), zmod(4)).is_zero()

    def test_tor_symmetry_and_oracle(self) -> None:
        """Test Tor_1(M, N) ≅ Tor_1(N, M) ≅ ⊕ Z/gcd(d_i, e_j)."""
        M = zmod(2, 4)
        N = FPModule.from_rows(ZZ, [[4, 0]], 2)
        forward = tor1(M, N)
        assert forward.describe() == ["2", "4"]
        assert forward.is_isomorphic(tor1(N, M))
        assert forward.is_isomorphic(tor1_by_invariants(M, N))

    def test_tor_presentation_independent(self) -> None:
        """Test that a different presentation of M gives the same Tor_1."""
        M = parse_module(ZZ, "[[2, 4], [6, 8]]")
        N = zmod(6)
        moved, _ = M.random_unimodular_moves(3)
        assert tor1(M, N).is_isomorphic(tor1(moved, N))

    def test_tor_over_gaussian_integers(self) -> None:
        """Test Tor_1(R/(2), R/(1 + i)) = R/(1 + i) in Z[i]."""
        R = parse_ring("zeta4")
        result = tor1(parse_module(R, "[[2]]"), parse_module(R, "[[[1, 1]]]"))
        assert result.torsion_order() == 2

    def test_flatness(self) -> None:
        """Test that only torsion-free modules are flat."""
        assert is_flat(FPModule.free(ZZ, 3))
        assert not is_flat(zmod(2))

    def test_ring_mismatch(self) -> None:
        """Test that modules over different rings do not mix."""
        with pytest.raises(RingMismatchError):
            tensor(zmod(2), parse_module(parse_ring("zeta4"), "[[2]]"))


class TestShortExactSequences:
    """Tests for verify_ses and the Künneth ends."""

    def test_consistent_middle(self) -> None:
        """Test Z/2 → Z/2 ⊕ Z/2 → Z/2."""
        ends = kunneth_ends(zmod(4), zmod(6))
        report = verify_ses(ends, zmod(2, 2))
        assert report.consistent
        summary = report.summary()
        assert summary.ring == "Z"
        assert summary.middle == ["2", "2"]

    def test_wrong_order(self) -> None:
        """Test that Z/3 cannot sit between Z/2 and Z/2."""
        report = verify_ses(kunneth_ends(zmod(4), zmod(6)), zmod(3))
        assert not report.torsion_multiplicative
        assert not report.consistent

    def test_zero_quotient_forces_isomorphism(self) -> None:
        """Test that 0 → Z/4 → M → 0 needs M ≅ Z/4."""
        report = verify_ses((zmod(4), FPModule.zero(ZZ)), zmod(2, 2))
        assert report.rank_additive
        assert report.torsion_multiplicative
        assert not report.split_forced

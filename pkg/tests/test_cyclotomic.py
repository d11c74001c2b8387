"""
Tests for cyclotomic polynomials, cyclotomic field arithmetic and the ψ idempotents.
"""

from __future__ import annotations

import os
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Poly, symbols

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cyclotomic import (
    CycNum,
    RationalCyclicPoly,
    cyc_one,
    cyclotomic,
    divisors,
    euler_phi,
    fixed_sublattice,
    format_poly,
    lattice_coordinates,
    norm,
    prime_power,
    psi_idempotent,
    zeta,
)
from errors import DivisibilityError, InputError, InvariantViolation

t = symbols("t")


class TestCyclotomicPolynomials:
    """Tests for Φ_n."""

    @pytest.mark.parametrize(
        ("n", "coeffs"),
        [(1, (-1, 1)), (2, (1, 1)), (4, (1, 0, 1)), (6, (1, -1, 1)), (12, (1, 0, -1, 0, 1))],
    )
    def test_small_indices(self, n: int, coeffs: tuple[int, ...]) -> None:
        """Test Φ_n against known coefficient lists."""
        assert cyclotomic(n).coeffs == coeffs

    def test_product_over_divisors(self) -> None:
        """Test that the Φ_d for d | 12 multiply to t^12 − 1."""
        total = Poly(1, t)
        for d in divisors(12):
            total = total * cyclotomic(d).as_poly()
        assert total == Poly(t**12 - 1, t)

    def test_degree_is_totient(self) -> None:
        """Test deg Φ_n = φ(n)."""
        for n in range(1, 25):
            assert cyclotomic(n).degree == euler_phi(n)

    def test_non_positive_index(self) -> None:
        """Test that Φ_0 is refused."""
        with pytest.raises(InputError):
            cyclotomic(0)

    def test_evaluate(self) -> None:
        """Test Φ_p(1) = p."""
        assert cyclotomic(7).evaluate(1) == 7

    def test_prime_power(self) -> None:
        """Test prime power detection."""
        assert prime_power(8) == (2, 3)
        assert prime_power(6) is None
        assert prime_power(1) is None


class TestCycNum:
    """Tests for exact arithmetic in Q(ζ_n)."""

    def test_zeta_powers(self) -> None:
        """Test ζ_4² = −1 and ζ_n^n = 1."""
        assert zeta(4) ** 2 == -cyc_one(4)
        assert zeta(5) ** 5 == cyc_one(5)
        assert zeta(6, 7) == zeta(6)

    def test_norm_of_one_minus_zeta(self) -> None:
        """Test N(1 − ζ_3) = 3 and N(1 − ζ_4) = 2."""
        assert norm(1 - zeta(3)) == 3
        assert norm(1 - zeta(4)) == 2

    def test_inverse(self) -> None:
        """Test x · x⁻¹ = 1."""
        x = CycNum.from_coeffs(5, [2, 1, 0, -1])
        assert x * x.inverse() == cyc_one(5)

    def test_division_by_zero(self) -> None:
        """Test that 0 has no inverse."""
        with pytest.raises(ZeroDivisionError):
            CycNum.rational_const(3, 0).inverse()

    def test_sqrt_two(self) -> None:
        """Test (ζ_8 + ζ_8⁻¹)² = 2."""
        s = zeta(8) + zeta(8, -1)
        assert s * s == CycNum.rational_const(8, 2)

    def test_galois_and_trace(self) -> None:
        """Test σ_j and the trace of ζ_p."""
        assert zeta(5).galois(2) == zeta(5, 2)
        assert zeta(5).trace() == -1
        assert zeta(4).conjugate() == zeta(4, 3)

    def test_galois_needs_unit_residue(self) -> None:
        """Test that σ_2 is refused at level 4."""
        with pytest.raises(InputError):
            zeta(4).galois(2)

    def test_level_mismatch(self) -> None:
        """Test that levels must agree."""
        with pytest.raises(InputError):
            zeta(3) + zeta(4)

    def test_embed_and_descend(self) -> None:
        """Test changing level."""
        assert zeta(3).embed(6) == zeta(6) ** 2
        assert zeta(6).descend(3) == -zeta(3, 2)
        with pytest.raises(InputError):
            zeta(4).descend(2)

    def test_from_coeffs_length(self) -> None:
        """Test that the coefficient count must be φ(level)."""
        with pytest.raises(InputError):
            CycNum.from_coeffs(5, [1, 2])

    def test_size_of_one(self) -> None:
        """Test Tr(1·1) = φ(n)."""
        assert cyc_one(5).size() == 4

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(
        st.lists(st.integers(-5, 5), min_size=4, max_size=4),
        st.lists(st.integers(-5, 5), min_size=4, max_size=4),
    )
    def test_norm_is_multiplicative(self, a: list[int], b: list[int]) -> None:
        """Property: N(xy) = N(x)N(y) in Q(ζ_5)."""
        x = CycNum.from_coeffs(5, a)
        y = CycNum.from_coeffs(5, b)
        assert (x * y).norm() == x.norm() * y.norm()


class TestFormatting:
    """Tests for format_poly."""

    def test_signs_and_powers(self) -> None:
        """Test term rendering."""
        assert format_poly([1, -1, 0, 2]) == "1 - t + 2*t^3"

    def test_zero(self) -> None:
        """Test the zero polynomial."""
        assert format_poly([0, 0]) == "0"

    def test_fractions(self) -> None:
        """Test rational coefficients."""
        assert format_poly([Fraction(1, 2), Fraction(-1, 2)]) == "1/2 - 1/2*t"


class TestPsiIdempotents:
    """Tests for ψ_k in Q[t]/(tⁿ − 1)."""

    def test_psi_one_two(self) -> None:
        """Test ψ_1 = (1 + t)/2 and ψ_2 = (1 − t)/2 for n = 2."""
        half = Fraction(1, 2)
        assert psi_idempotent(1, 2).coeffs == (half, half)
        assert psi_idempotent(2, 2).coeffs == (half, -half)

    @pytest.mark.parametrize("n", range(1, 25))
    def test_complete_orthogonal_system(self, n: int) -> None:
        """Test that the ψ_k are idempotent, orthogonal and sum to 1."""
        psis = [psi_idempotent(k, n) for k in divisors(n)]
        one = RationalCyclicPoly.from_values(n, [1])
        total = psis[0]
        for p in psis[1:]:
            total = total + p
        assert total.coeffs == one.coeffs
        for i, a in enumerate(psis):
            assert (a * a).coeffs == a.coeffs
            for b in psis[i + 1 :]:
                assert (a * b).is_zero()

    def test_k_must_divide_n(self) -> None:
        """Test that ψ_3 mod t² − 1 is refused."""
        with pytest.raises(DivisibilityError):
            psi_idempotent(3, 2)

    def test_denominators_divide_powers_of_n(self) -> None:
        """Test that a denominator 3 is refused mod t² − 1."""
        with pytest.raises(InvariantViolation):
            RationalCyclicPoly(2, (Fraction(1, 3), Fraction(0)))


class TestFixedSublattice:
    """Tests for Galois-fixed sublattices of Z[ζ_n]."""

    def test_real_subring_of_level_five(self) -> None:
        """Test that Z[ζ_5]^{±1} has rank 2 and contains ζ + ζ⁻¹ but not ζ."""
        basis = fixed_sublattice(5, [1, 4])
        assert len(basis) == 2
        assert lattice_coordinates(basis, zeta(5) + zeta(5, 4)) is not None
        assert lattice_coordinates(basis, zeta(5)) is None

    def test_full_galois_group(self) -> None:
        """Test that the full Galois group fixes exactly Z."""
        basis = fixed_sublattice(4, [1, 3])
        assert basis == [cyc_one(4)]

    def test_trivial_group(self) -> None:
        """Test that the trivial group fixes everything."""
        assert len(fixed_sublattice(8, [1])) == 4

    def test_requires_units(self) -> None:
        """Test that non-units mod n are refused."""
        with pytest.raises(InputError):
            fixed_sublattice(6, [2])

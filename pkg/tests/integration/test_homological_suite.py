"""
Integration tests for Tor_1 over a seeded corpus of presentations, the flatness
criterion Tor_1(M, M) = 0, and the Künneth sequence checks over Z[ζ_3].
"""

from __future__ import annotations

import os
import random
import sys
from typing import Any

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", "src"))

from homalg import (
    CyclotomicIntegers,
    FPModule,
    is_flat,
    kunneth_ends,
    tensor,
    tor1,
    tor1_by_invariants,
    verify_ses,
)
from linalg import EuclideanRing, IntegerRing

pytestmark = [pytest.mark.integration, pytest.mark.slow]

RINGS: list[EuclideanRing[Any]] = [IntegerRing(), CyclotomicIntegers(3), CyclotomicIntegers(5)]

# diagonal entries: integers for Z, coefficient lists in powers of ζ otherwise
POOLS: dict[str, list[Any]] = {
    "Z": [0, 1, 2, 3, 4, 6, 9],
    "cyclotomic": [0, 1, 2, 3, 4, [1, -1], [2, 1], [1, 0, 1]],
}


def element(ring: EuclideanRing[Any], value: Any) -> Any:
    if isinstance(ring, CyclotomicIntegers):
        return ring.element(value)
    return value


def random_module(ring: EuclideanRing[Any], rng: random.Random) -> FPModule:
    """⊕ R/(d_i) with one or two summands drawn from the pool."""
    pool = POOLS["cyclotomic" if isinstance(ring, CyclotomicIntegers) else "Z"]
    entries = [element(ring, rng.choice(pool)) for _ in range(rng.randint(1, 2))]
    zero = ring.zero()
    rows = [[d if i == j else zero for j in range(len(entries))] for i, d in enumerate(entries)]
    return FPModule.from_rows(ring, rows, len(entries))


def corpus() -> list[tuple[int, FPModule, FPModule]]:
    out = []
    for seed in range(200):
        rng = random.Random(seed)
        ring = RINGS[seed % len(RINGS)]
        out.append((seed, random_module(ring, rng), random_module(ring, rng)))
    return out


CORPUS = corpus()


class TestTorCorpus:
    """Tor_1 on 200 seeded presentations over Z, Z[ζ_3] and Z[ζ_5]."""

    def test_presentation_independence(self) -> None:
        """Test that recorded unimodular moves never change Tor_1."""
        for seed, M, N in CORPUS:
            moved, log = M.random_unimodular_moves(seed)
            assert tor1(M, N).is_isomorphic(tor1(moved, N)), (seed, log)

    def test_symmetry_and_oracle(self) -> None:
        """Test Tor_1(M, N) ≅ Tor_1(N, M) ≅ ⊕ R/gcd(d_i, e_j)."""
        for seed, M, N in CORPUS:
            result = tor1(M, N)
            assert result.is_isomorphic(tor1(N, M)), seed
            assert result.is_isomorphic(tor1_by_invariants(M, N)), seed

    def test_flat_iff_self_tor_vanishes(self) -> None:
        """Test Tor_1(M, M) = 0 exactly when M is flat, on both presentations."""
        for seed, M, _ in CORPUS:
            moved, _ = M.random_unimodular_moves(seed)
            for module in (M, moved):
                assert tor1(module, module).is_zero() == is_flat(module), seed


class TestKunnethSequences:
    """verify_ses on the cases with a known answer."""

    def test_free_factor(self) -> None:
        """Test that with N free the middle term is M ⊗ N."""
        R = CyclotomicIntegers(3)
        M = FPModule.cyclic(R, R.element(2))
        N = FPModule.free(R, 2)
        left, right = kunneth_ends(M, N)
        assert right.is_zero()
        assert verify_ses((left, right), tensor(M, N)).consistent
        assert not verify_ses((left, right), M).consistent

    def test_lambda_torsion(self) -> None:
        """Test R/(λ) ⊗ R/(λ) over Z[ζ_3], λ = 1 − ζ_3: the middle has order 9."""
        R = CyclotomicIntegers(3)
        lam = R.element([1, -1])
        M = FPModule.cyclic(R, lam)
        left, right = kunneth_ends(M, M)
        assert left.torsion_order() == 3
        assert right.torsion_order() == 3
        split = FPModule.from_rows(R, [[lam, R.zero()], [R.zero(), lam]], 2)
        nonsplit = FPModule.cyclic(R, lam * lam)
        for middle in (split, nonsplit):
            report = verify_ses((left, right), middle)
            assert report.consistent
            assert middle.torsion_order() == 9

    def test_zero_module(self) -> None:
        """Test that only the zero middle term fits between two zero ends."""
        R = CyclotomicIntegers(3)
        ends = kunneth_ends(FPModule.zero(R), FPModule.cyclic(R, R.element(2)))
        assert verify_ses(ends, FPModule.zero(R)).consistent
        assert not verify_ses(ends, FPModule.cyclic(R, R.element(2))).consistent

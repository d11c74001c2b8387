"""
Integration tests for the full lifting pipeline on small EPPO groups.

These run the per-prime families, the Mackey audits and the gluing step end to
end and re-check the lift from the outside.
"""

from __future__ import annotations

import json
import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", "src"))

from characters import ClassFunction, from_cyclic, restrict_cf
from cli import parse_profile, run
from cyclicring import CyclicRingElem
from groups import PermGroup, Subgroup, catalog_group, parse_subgroup
from lifting import LiftResult, assemble_and_glue
from localization import MultSet, UnitProfile

pytestmark = [pytest.mark.integration, pytest.mark.slow]


def element_subgroup(G: PermGroup, order: int) -> Subgroup:
    """The subgroup generated by the first element of the given order."""
    g = next(x for x in G.elements if x.order() == order)
    return G.subgroup_generated([g])


def assert_restricts_to_multiple(result: LiftResult, K: PermGroup, f: ClassFunction) -> None:
    assert result.verified, [e.check for e in result.verification if not e.passed]
    m = from_cyclic(result.multiplier, K)
    assert restrict_cf(result.f_tilde.class_function, K) == m * f


class TestLiftingPipeline:
    """End-to-end lifts."""

    def test_regular_character_of_c3_in_s3(self, s3: PermGroup) -> None:
        """Test lifting 1 + t + t² with the permutation character inverted."""
        c3 = parse_subgroup(s3, "(0 1 2)")
        x = CyclicRingElem.from_coeffs(3, [1, 1, 1])
        profile = UnitProfile(parse_profile(s3, "values:3,1,0"))
        result = assemble_and_glue(s3, c3, x, profile)
        assert_restricts_to_multiple(result, c3, from_cyclic(x, c3))
        assert result.primes == [3, 2]

    def test_q8_with_two_inverted(self, q8: PermGroup) -> None:
        """Test the inverted-prime path on a 2-group."""
        K = element_subgroup(q8, 4)
        t = CyclicRingElem.t_power(4)
        profile = UnitProfile(MultSet(q8, (ClassFunction.constant(q8, 2),)))
        result = assemble_and_glue(q8, K, t, profile)
        assert_restricts_to_multiple(result, K, from_cyclic(t, K))

    def test_rotation_in_d4(self) -> None:
        """Test lifting the rotation character of the dihedral group of order 8."""
        G = catalog_group("D4")
        K = element_subgroup(G, 4)
        t = CyclicRingElem.t_power(4)
        profile = UnitProfile(MultSet(G, (ClassFunction.constant(G, 1),)))
        result = assemble_and_glue(G, K, t, profile)
        assert_restricts_to_multiple(result, K, from_cyclic(t, K))
        assert result.primes == [2]

    def test_order_three_in_a4(self, a4: PermGroup) -> None:
        """Test two non-inverted primes on A4."""
        K = parse_subgroup(a4, "(0 1 2)")
        t = CyclicRingElem.t_power(3)
        profile = UnitProfile(MultSet(a4, (ClassFunction.constant(a4, 1),)))
        result = assemble_and_glue(a4, K, t, profile)
        assert_restricts_to_multiple(result, K, from_cyclic(t, K))
        assert len(result.families) == 2

    def test_two_on_c3_in_a4(self, a4: PermGroup) -> None:
        """Test lifting 2 from ⟨(0 1 2)⟩ with 2 inverted."""
        K = parse_subgroup(a4, "(0 1 2)")
        x = CyclicRingElem.constant(3, 2)
        profile = UnitProfile(MultSet(a4, (ClassFunction.constant(a4, 2),)))
        result = assemble_and_glue(a4, K, x, profile)
        assert_restricts_to_multiple(result, K, from_cyclic(x, K))

    def test_two_on_c4_in_s4(self) -> None:
        """Test lifting 2 from a four-cycle subgroup of S4 with 2 inverted."""
        G = catalog_group("S4")
        K = element_subgroup(G, 4)
        x = CyclicRingElem.constant(4, 2)
        profile = UnitProfile(MultSet(G, (ClassFunction.constant(G, 2),)))
        result = assemble_and_glue(G, K, x, profile)
        assert_restricts_to_multiple(result, K, from_cyclic(x, K))

    def test_cli_lift(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Test the lift command on the regular character of C3."""
        code = run(
            [
                "lift",
                "--group",
                "S3",
                "--subgroup",
                "(0 1 2)",
                "--element",
                "1 + t + t^2",
                "--profile",
                "values:3,1,0",
            ]
        )
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert all(entry["passed"] for entry in doc["verification"])

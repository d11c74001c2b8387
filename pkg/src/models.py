"""
Pydantic models for workbench results.

Every CLI command emits a CommandResult (or an ErrorResult); the output
fragments below give the JSON shape of the structured parts.
"""

from __future__ import annotations

from enum import Enum
from typing import Any

from pydantic import BaseModel, Field

SCHEMA_VERSION = "1.0"


class UnitVerdict(str, Enum):
    """Three-valued answer of a unit query."""

    UNIT = "unit"
    NONUNIT = "nonunit"
    UNDECIDED = "undecided"  # search bound reached


class Verdict(str, Enum):
    """Comparison of two multiplicative sets up to saturation."""

    EQUAL = "equal"
    DISTINCT = "distinct"
    UNDECIDED = "undecided"


class VerificationEntry(BaseModel):
    """One re-checked post-condition."""

    check: str = Field(..., description="Name of the identity or invariant checked")
    passed: bool = Field(..., description="Whether it held exactly")
    detail: str | None = Field(None, description="Context for the check or the failure")

    class Config:
        """Pydantic configuration."""

        extra = "forbid"


class ClassInfo(BaseModel):
    """A conjugacy class as printed by `chartab` and `group`."""

    representative: str = Field(..., description="Minimal element in cycle notation")
    size: int = Field(..., description="Number of elements in the class")
    order: int = Field(..., description="Order of the elements in the class")


class CharacterRow(BaseModel):
    """An irreducible character: per class, power-basis coefficients at the value level."""

    degree: int = Field(..., description="Value at the identity")
    values: list[list[str]] = Field(..., description="Cyclotomic coefficient arrays per class")


class GroupSummary(BaseModel):
    """Basic invariants of a permutation group."""

    name: str = Field(..., description="Identifier or generator list as given")
    order: int = Field(..., description="Group order")
    degree: int = Field(..., description="Number of points acted on")
    generators: list[str] = Field(default_factory=list, description="Generators, cycle notation")
    exponent: int = Field(..., description="Least common multiple of the element orders")
    is_abelian: bool = Field(..., description="Whether the group is abelian")
    is_cyclic: bool = Field(..., description="Whether the group is cyclic")
    is_eppo: bool = Field(..., description="Whether every element has prime-power order")
    classes: list[ClassInfo] = Field(default_factory=list, description="Conjugacy classes")
    subgroup_count: int = Field(..., description="Number of subgroups")


class KGroupDescription(BaseModel):
    """Equivariant K-groups of the model action on one subgroup."""

    subgroup: str = Field(..., description="Subgroup label")
    order: int = Field(..., description="Subgroup order")
    k0: str = Field(..., description="K_0 as a localized representation ring")
    k1: str = Field("0", description="K_1 (always zero for the model action)")
    generators: list[list[int]] = Field(
        default_factory=list, description="Restricted generators in the irreducible basis"
    )
    divisible_primes: list[int] = Field(default_factory=list, description="Inverted primes")
    summands: list[str] = Field(
        default_factory=list, description="p-local splitting for cyclic p-subgroups"
    )


class SESSummary(BaseModel):
    """Invariant factors of the three terms of a short exact sequence."""

    ring: str = Field(..., description="Ground ring name")
    left: list[str] = Field(..., description="Invariant factors of the kernel term")
    middle: list[str] = Field(..., description="Invariant factors of the middle term")
    right: list[str] = Field(..., description="Invariant factors of the quotient term")
    exact: bool = Field(..., description="Whether exactness was verified")


class CommandResult(BaseModel):
    """Top-level JSON document written by every successful command."""

    schema_version: str = Field(SCHEMA_VERSION, description="Result schema version")
    command: str = Field(..., description="Subcommand that produced this result")
    inputs: dict[str, Any] = Field(default_factory=dict, description="Normalized inputs")
    outputs: dict[str, Any] = Field(default_factory=dict, description="Command outputs")
    verification: list[VerificationEntry] = Field(
        default_factory=list, description="Re-checked post-conditions"
    )
    timing_ms: int | None = Field(None, description="Wall-clock time, only when requested")

    class Config:
        """Pydantic configuration."""

        extra = "forbid"

    @property
    def all_passed(self) -> bool:
        """True when every verification entry passed."""
        return all(entry.passed for entry in self.verification)


class ErrorDetail(BaseModel):
    """Machine-readable description of a failure."""

    type: str = Field(..., description="Error kind, e.g. 'input' or 'not_a_unit'")
    message: str = Field(..., description="Human-readable message")


class ErrorResult(BaseModel):
    """JSON document written when a command fails."""

    schema_version: str = Field(SCHEMA_VERSION, description="Result schema version")
    command: str | None = Field(None, description="Subcommand, when it could be parsed")
    error: ErrorDetail = Field(..., description="What went wrong")
    exit_code: int = Field(..., description="Process exit code")

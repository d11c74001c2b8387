"""
Exception hierarchy for the workbench.

Library code raises these; the CLI maps them onto exit codes.
"""

from __future__ import annotations


class WorkbenchError(Exception):
    """Base class for every error raised by the workbench."""

    exit_code: int = 3
    kind: str = "error"


class InputError(WorkbenchError, ValueError):
    """Malformed user input: identifiers, cycle notation, polynomials, matrices."""

    kind = "input"


class OrderCapError(WorkbenchError):
    """A group (or enumeration) would exceed the configured order cap."""

    kind = "order_cap"


class ContainmentError(WorkbenchError):
    """A subgroup is not contained in the group an operation requires."""

    kind = "containment"


class NotCyclicError(WorkbenchError):
    """An operation that needs a cyclic subgroup received a non-cyclic one."""

    kind = "not_cyclic"


class NotPrimePowerError(WorkbenchError):
    """A modulus or level that must be a prime power is not."""

    kind = "not_prime_power"


class DivisibilityError(WorkbenchError):
    """A divisor condition (k | n, p-power denominators, ...) is violated."""

    kind = "divisibility"


class RingMismatchError(WorkbenchError):
    """Two modules or matrices live over different rings."""

    kind = "ring_mismatch"


class UnsupportedRingError(WorkbenchError):
    """Cyclotomic level outside the norm-Euclidean list."""

    kind = "unsupported_ring"


class NotEppoError(WorkbenchError):
    """The group has an element whose order is not a prime power."""

    kind = "not_eppo"


class NotAUnitError(WorkbenchError):
    """Verified negative: the element is certified not to be a unit."""

    exit_code = 1
    kind = "not_a_unit"


class UndecidedError(WorkbenchError):
    """A unit query hit the search bound; the pipeline refuses to guess."""

    exit_code = 2
    kind = "undecided"


class InvariantViolation(WorkbenchError):
    """An exact identity that must hold did not. Always a bug."""

    kind = "internal"

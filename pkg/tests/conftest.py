"""
Pytest fixtures and configuration.

This module provides shared fixtures for all tests. Groups are built from the
catalog once per session; the settings cache is reset around each test so
environment overrides made with monkeypatch take effect.
"""

from __future__ import annotations

import os
import sys
from collections.abc import Generator

import pytest

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))
os.environ.setdefault("WORKBENCH_ENV", "testing")

from config import get_settings  # noqa: E402
from groups import PermGroup, catalog_group  # noqa: E402


@pytest.fixture(autouse=True)
def fresh_settings() -> Generator[None, None, None]:
    """Drop cached settings before and after every test."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(scope="session")
def c2() -> PermGroup:
    """Cyclic group of order 2."""
    return catalog_group("C2")


@pytest.fixture(scope="session")
def c4() -> PermGroup:
    """Cyclic group of order 4."""
    return catalog_group("C4")


@pytest.fixture(scope="session")
def c6() -> PermGroup:
    """Cyclic group of order 6 (not EPPO)."""
    return catalog_group("C6")


@pytest.fixture(scope="session")
def s3() -> PermGroup:
    """Symmetric group on three points."""
    return catalog_group("S3")


@pytest.fixture(scope="session")
def q8() -> PermGroup:
    """Quaternion group as a regular permutation group."""
    return catalog_group("Q8")


@pytest.fixture(scope="session")
def a4() -> PermGroup:
    """Alternating group on four points."""
    return catalog_group("A4")

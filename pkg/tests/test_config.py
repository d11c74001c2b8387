"""
Tests for configuration module.

Tests validate that settings are properly loaded from environment variables.
"""

from __future__ import annotations

import os
import sys
from unittest.mock import patch

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from config import Settings, get_settings


class TestSettings:
    """Tests for Settings configuration class."""

    def test_default_values(self) -> None:
        """Test that default values are set correctly."""
        with patch.dict(os.environ, {}, clear=True):
            settings = Settings(_env_file=None)
            assert settings.workbench_env == "development"
            assert settings.order_cap == 5000
            assert settings.unit_bound == 8
            assert settings.default_seed == 0
            assert settings.verify_transforms is False
            assert settings.include_timing is False
            assert settings.log_level == "WARNING"
            assert settings.log_format == "console"

    def test_env_normalization(self) -> None:
        """Test that workbench_env is normalized to lowercase."""
        with patch.dict(os.environ, {"WORKBENCH_ENV": "PRODUCTION"}, clear=True):
            settings = Settings(_env_file=None)
            assert settings.workbench_env == "production"
            assert settings.is_testing is False

    def test_testing_forces_transform_checks(self) -> None:
        """Test that testing mode always re-verifies Smith transforms."""
        with patch.dict(os.environ, {"WORKBENCH_ENV": "testing"}, clear=True):
            settings = Settings(_env_file=None)
            assert settings.is_testing is True
            assert settings.check_transforms is True

    def test_transform_checks_opt_in(self) -> None:
        """Test that VERIFY_TRANSFORMS turns checks on outside testing."""
        env = {"WORKBENCH_ENV": "development", "VERIFY_TRANSFORMS": "true"}
        with patch.dict(os.environ, env, clear=True):
            assert Settings(_env_file=None).check_transforms is True
        with patch.dict(os.environ, {"WORKBENCH_ENV": "development"}, clear=True):
            assert Settings(_env_file=None).check_transforms is False

    def test_unit_bound_from_env(self) -> None:
        """Test loading the witness search bound from the environment."""
        with patch.dict(os.environ, {"UNIT_BOUND": "12"}, clear=True):
            assert Settings(_env_file=None).unit_bound == 12

    def test_unit_bound_validation(self) -> None:
        """Test that the search bound is limited to 0..16."""
        with patch.dict(os.environ, {"UNIT_BOUND": "17"}, clear=True):
            with pytest.raises(ValueError):
                Settings(_env_file=None)
        with patch.dict(os.environ, {"UNIT_BOUND": "-1"}, clear=True):
            with pytest.raises(ValueError):
                Settings(_env_file=None)

    def test_order_cap_validation(self) -> None:
        """Test that the order cap must be positive."""
        with patch.dict(os.environ, {"ORDER_CAP": "0"}, clear=True):
            with pytest.raises(ValueError):
                Settings(_env_file=None)

    def test_log_level_lowercase_accepted(self) -> None:
        """Test that log level names are upper-cased."""
        with patch.dict(os.environ, {"LOG_LEVEL": "debug"}, clear=True):
            assert Settings(_env_file=None).log_level == "DEBUG"

    def test_log_level_validation(self) -> None:
        """Test that log level must be valid."""
        with patch.dict(os.environ, {"LOG_LEVEL": "VERBOSE"}, clear=True):
            with pytest.raises(ValueError):
                Settings(_env_file=None)

    def test_log_format_options(self) -> None:
        """Test log format options."""
        with patch.dict(os.environ, {"LOG_FORMAT": "json"}, clear=True):
            assert Settings(_env_file=None).log_format == "json"


class TestGetSettings:
    """Tests for get_settings function."""

    def test_get_settings_returns_settings_instance(self) -> None:
        """Test that get_settings returns a Settings instance."""
        get_settings.cache_clear()
        settings = get_settings()
        assert isinstance(settings, Settings)

    def test_get_settings_is_cached(self) -> None:
        """Test that get_settings returns cached instance."""
        get_settings.cache_clear()
        settings1 = get_settings()
        settings2 = get_settings()
        assert settings1 is settings2

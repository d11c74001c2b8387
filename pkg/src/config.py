"""
Workbench configuration using pydantic-settings.

Environment variables can be set directly or via .env file.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Workbench settings with environment variable support."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    workbench_env: Literal["development", "production", "testing"] = Field(
        default="development",
        description="Runtime environment mode",
    )

    # Group enumeration
    order_cap: int = Field(
        default=5000,
        ge=1,
        description="Largest group order the workbench will enumerate",
    )

    # Unit certification
    unit_bound: int = Field(
        default=8,
        ge=0,
        le=16,
        description="Witness search bound B: exponents of the generator product up to 2**B",
    )

    # Sampled checks
    default_seed: int = Field(
        default=0,
        ge=0,
        description="Seed for sampled property checks and random presentations",
    )
    verify_transforms: bool = Field(
        default=False,
        description="Re-verify Smith form transforms by multiplication on every call",
    )

    # Output
    include_timing: bool = Field(
        default=False,
        description="Report wall-clock timing in CLI results (breaks byte-identical output)",
    )

    # Logging Configuration
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="WARNING",
        description="Workbench log level",
    )
    log_format: Literal["json", "console"] = Field(
        default="console",
        description="Log output format",
    )

    @field_validator("workbench_env", mode="before")
    @classmethod
    def validate_workbench_env(cls, v: str) -> str:
        """Normalize environment value."""
        if isinstance(v, str):
            return v.lower()
        return v

    @field_validator("log_level", mode="before")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Accept lower-case level names."""
        if isinstance(v, str):
            return v.upper()
        return v

    @property
    def is_testing(self) -> bool:
        """Check if running in testing mode."""
        return self.workbench_env == "testing"

    @property
    def check_transforms(self) -> bool:
        """Smith transforms are always re-verified in testing mode."""
        return self.verify_transforms or self.is_testing


@lru_cache
def get_settings() -> Settings:
    """
    Get cached workbench settings.

    Uses lru_cache to ensure settings are only loaded once.
    """
    return Settings()

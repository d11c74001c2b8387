"""Test package for the repring workbench."""


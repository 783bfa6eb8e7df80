"""
Tests for src/version.py: version constants, release registry and utilities.
"""

import re
from unittest.mock import patch

import pytest

import src.version as version_module
from src.version import (
    CACHE_FORMAT_VERSION,
    VERSION_HISTORY,
    __description__,
    __title__,
    __version__,
    __version_info__,
    get_cache_format,
    get_commands,
    get_full_version_string,
    get_version,
    get_version_info,
)


# =============================================================================
# Version Constants
# =============================================================================

@pytest.mark.unit
class TestVersionConstants:
    """Verify version string format and metadata values."""

    def test_version_format_is_semver(self):
        assert re.match(r"^\d+\.\d+\.\d+$", __version__)

    def test_version_info_matches_version_string(self):
        assert __version_info__ == tuple(int(x) for x in __version__.split("."))
        assert all(isinstance(x, int) for x in __version_info__)

    def test_title(self):
        assert __title__ == "Vertex-Frequency Analysis"

    def test_description_is_set(self):
        assert __description__

    def test_current_version_is_registered(self):
        assert __version__ in VERSION_HISTORY


# =============================================================================
# Utility Functions
# =============================================================================

@pytest.mark.unit
class TestUtilities:
    """get_version and friends."""

    def test_get_version(self):
        assert get_version() == __version__

    def test_get_version_info(self):
        assert get_version_info() == __version_info__

    def test_full_version_string(self):
        assert get_full_version_string() == f"Vertex-Frequency Analysis v{__version__}"


# =============================================================================
# Release Registry
# =============================================================================

@pytest.mark.unit
class TestReleaseRegistry:
    """Commands and cache formats accumulated across releases."""

    def test_every_entry_has_required_keys(self):
        for entry in VERSION_HISTORY.values():
            assert {"description", "commands", "cache_format", "changes"} <= set(entry)

    def test_current_commands(self):
        assert set(get_commands()) == {
            "gen-graph", "spectrum", "spectrogram", "frame-report", "reconstruct",
            "cluster", "check-bounds",
        }

    def test_commands_in_release_order(self):
        assert list(get_commands())[0] == "gen-graph"
        assert list(get_commands())[-1] == "check-bounds"

    def test_older_version_hides_later_commands(self):
        with patch.object(version_module, "__version_info__", (0, 1, 0)):
            commands = version_module.get_commands()
        assert "cluster" not in commands
        assert "spectrogram" in commands

    def test_cache_format(self):
        assert get_cache_format() == CACHE_FORMAT_VERSION == 1

"""
Vertex-Frequency Analysis toolkit - Version information.

This module provides version information for the toolkit and the registry
of CLI commands and spectrum-cache formats introduced by each release.
The version follows semantic versioning (MAJOR.MINOR.PATCH).

Usage:
    from src.version import __version__, get_version

    print(f"Vertex-Frequency Analysis v{__version__}")
    print(get_version())
"""

from typing import Any, Dict, List, Tuple


__version__ = "0.2.0"
__version_info__ = tuple(int(x) for x in __version__.split("."))

# Metadata
__title__ = "Vertex-Frequency Analysis"
__description__ = "Windowed graph Fourier transforms, localization bounds and spectral clustering"
__license__ = "MIT"


# =============================================================================
# Release Registry
# =============================================================================
#
# Each version entry contains:
#   - description: Human-readable description of the version
#   - commands: CLI subcommands added by this version
#   - cache_format: spectrum-cache layout version (bumped when files change)
#   - changes: List of changes in this version
#
# vfa.py reads the command list from here - do NOT duplicate it elsewhere.
# =============================================================================

VERSION_HISTORY: Dict[str, Dict[str, Any]] = {
    "0.1.0": {
        "description": "Graph generation, spectra and the windowed graph Fourier transform",
        "commands": {
            "gen-graph": "Generate a path, ring, comet, random regular, sensor or swiss-roll graph",
            "spectrum": "Eigendecompose a graph Laplacian (cached)",
            "spectrogram": "Windowed transform of a signal, written as CSV, PGM and JSON",
            "frame-report": "Frame bounds of heat windows over a list of graphs",
            "reconstruct": "Transform a signal and invert the transform",
        },
        "cache_format": 1,
        "changes": [
            "Initial release",
        ],
    },
    "0.2.0": {
        "description": "Localization bounds and clustering",
        "commands": {
            "cluster": "Spectral or signal-adapted clustering",
            "check-bounds": "Evaluate localization and concentration bounds",
        },
        "cache_format": 1,
        "changes": [
            "Add check-bounds command",
            "Add cluster command with signal-adapted features",
            "Normalized-Laplacian variants of translation and modulation",
        ],
    },
}


def _version_key(version: str) -> Tuple[int, ...]:
    return tuple(int(x) for x in version.split("."))


# =============================================================================
# Version Utility Functions
# =============================================================================

def get_version() -> str:
    """Return the current version string."""
    return __version__


def get_version_info() -> tuple:
    """Return the version as a tuple of integers (major, minor, patch)."""
    return __version_info__


def get_full_version_string() -> str:
    """Return a full version string with title."""
    return f"{__title__} v{__version__}"


def _released_versions() -> List[str]:
    return [v for v in sorted(VERSION_HISTORY, key=_version_key)
            if _version_key(v) <= __version_info__]


def get_commands() -> Dict[str, str]:
    """
    CLI subcommands available in the current version.

    Accumulates commands from all versions up to and including the current
    one, in release order.
    """
    commands: Dict[str, str] = {}
    for version in _released_versions():
        commands.update(VERSION_HISTORY[version].get("commands", {}))
    return commands


def get_cache_format() -> int:
    """Spectrum-cache layout version of the current release."""
    return int(VERSION_HISTORY[_released_versions()[-1]]["cache_format"])


CACHE_FORMAT_VERSION = get_cache_format()

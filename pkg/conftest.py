"""Pytest configuration and shared fixtures."""

from pathlib import Path

import pytest


def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line(
        "markers",
        "slow: larger (p,q,r) pipelines and full verify runs (deselect with '-m \"not slow\"')",
    )


@pytest.fixture(autouse=True)
def setup_logging():
    """Setup logging for tests."""
    import logging
    logging.basicConfig(level=logging.DEBUG)


@pytest.fixture
def fixtures_dir() -> Path:
    """Directory of the sample series, spec and family files."""
    return Path(__file__).parent / "fixtures"

"""Shared fixtures."""

import pytest

from catalan_functionals.config import reset_settings


@pytest.fixture(autouse=True)
def default_settings():
    """Every test starts from the packaged defaults."""
    reset_settings()
    yield
    reset_settings()

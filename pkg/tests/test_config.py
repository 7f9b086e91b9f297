"""Tests for packaged defaults and user overrides."""

import pytest

from catalan_functionals.config import DEFAULTS, load_settings, reset_settings, setting
from catalan_functionals.errors import ArgumentError


def test_defaults():
    """Packaged defaults are readable by dotted key."""
    assert setting("exact_moments.max_k") == 6
    assert setting("integrals.tol") == pytest.approx(1e-12)
    assert setting("montecarlo.histogram_range") == [-5.0, 5.0]
    assert DEFAULTS["output"]["digits"] == 17


def test_unknown_key():
    with pytest.raises(ArgumentError):
        setting("series.nope")


class TestOverrides:
    """User YAML merged over the defaults."""

    def test_merge(self, tmp_path):
        path = tmp_path / "settings.yaml"
        path.write_text("series:\n  cutoff: 5000\n", encoding="utf-8")
        load_settings(path)
        assert setting("series.cutoff") == 5000
        assert setting("series.terms") == 4
        reset_settings()
        assert setting("series.cutoff") == 1000

    def test_unknown_setting_rejected(self, tmp_path):
        path = tmp_path / "settings.yaml"
        path.write_text("series:\n  cutof: 5000\n", encoding="utf-8")
        with pytest.raises(ArgumentError):
            load_settings(path)

    def test_section_must_be_mapping(self, tmp_path):
        path = tmp_path / "settings.yaml"
        path.write_text("series: 3\n", encoding="utf-8")
        with pytest.raises(ArgumentError):
            load_settings(path)

    def test_defaults_untouched(self, tmp_path):
        """Loading a file never mutates the packaged defaults."""
        path = tmp_path / "settings.yaml"
        path.write_text("numeric:\n  prec_bits: 256\n", encoding="utf-8")
        load_settings(path)
        assert DEFAULTS["numeric"]["prec_bits"] == 128

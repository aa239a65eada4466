"""Property-based tests for configuration management.

Properties covered:
  Property 1 – Configuration file round-trip preserves structure
  Property 2 – Configuration validation detects out-of-range values
  Property 3 – Missing configuration fields trigger default values
"""
import os
import tempfile
from fractions import Fraction

import pytest
import yaml

from hypothesis import given, settings, strategies as st

from app.models import CapsConfig, Config, HarnessConfig, LoggingConfig


# ---------------------------------------------------------------------------
# Hypothesis strategies
# ---------------------------------------------------------------------------

positive = st.integers(min_value=1, max_value=100_000)
magnitudes = st.fractions(min_value=Fraction(1, 10**6), max_value=Fraction(999, 1000), max_denominator=10**6)

valid_config_strategy = st.builds(
    Config,
    caps=st.builds(
        CapsConfig,
        rauzy_cap=positive,
        recursion_cap=positive,
        orbit_cap=positive,
        keane_depth=positive,
        partition_depth=st.integers(min_value=0, max_value=64),
    ),
    harness=st.builds(
        HarnessConfig,
        n=st.integers(min_value=1, max_value=12),
        sample_count=st.integers(min_value=0, max_value=10_000),
        seed=st.integers(min_value=0, max_value=2**31),
        rauzy_cap=positive,
        orbit_cap=positive,
        perturbation_magnitude=magnitudes,
        trials=st.integers(min_value=0, max_value=1000),
        exhaustive=st.booleans(),
        workers=st.integers(min_value=1, max_value=16),
    ),
    logging=st.builds(LoggingConfig, level=st.sampled_from(["DEBUG", "INFO", "WARNING", "ERROR"])),
)


def _dump(data: dict) -> str:
    f = tempfile.NamedTemporaryFile(mode="w", suffix=".yaml", delete=False)
    yaml.dump(data, f)
    f.close()
    return f.name


# ---------------------------------------------------------------------------
# Property 2: Configuration validation detects out-of-range values
# ---------------------------------------------------------------------------

@given(cap=st.integers(max_value=0), name=st.sampled_from(["rauzy_cap", "recursion_cap", "orbit_cap", "keane_depth"]))
@settings(max_examples=100)
@pytest.mark.property_test
def test_nonpositive_caps_always_reported(cap, name):
    """Property 2 (partial): Caps below one are always flagged."""
    config = Config.default()
    setattr(config.caps, name, cap)
    errors = config.validate()
    assert any(name in e for e in errors)


@given(magnitude=st.one_of(st.fractions(max_value=0), st.fractions(min_value=1)))
@settings(max_examples=100)
@pytest.mark.property_test
def test_magnitude_outside_unit_interval_always_reported(magnitude):
    """Property 2 (partial): Perturbation sizes outside (0, 1) are always flagged."""
    config = Config.default()
    config.harness.perturbation_magnitude = magnitude
    assert any("perturbation_magnitude" in e for e in config.validate())


@given(config=valid_config_strategy)
@settings(max_examples=100)
@pytest.mark.property_test
def test_valid_config_has_no_errors(config):
    """Property 2 (partial): Valid config produces no errors."""
    assert config.validate() == []


# ---------------------------------------------------------------------------
# Property 1: Configuration file round-trip preserves structure
# ---------------------------------------------------------------------------

@given(config=valid_config_strategy)
@settings(max_examples=100)
@pytest.mark.property_test
def test_config_roundtrip_preserves_structure(config):
    """Property 1: Serialise to YAML and parse back produces equivalent config."""
    path = _dump(config.to_dict())
    try:
        loaded = Config.load(path)
        assert loaded.caps == config.caps
        assert loaded.harness == config.harness
        assert loaded.logging.level == config.logging.level
    finally:
        os.unlink(path)


# ---------------------------------------------------------------------------
# Property 3: Missing configuration fields trigger default values
# ---------------------------------------------------------------------------

@pytest.mark.property_test
def test_empty_config_file_uses_all_defaults():
    """Property 3: An empty config file produces a fully-defaulted Config."""
    path = _dump({})
    try:
        config = Config.load(path)
        defaults = Config.default()
        assert config.caps == defaults.caps
        assert config.harness == defaults.harness
        assert config.logging.level == defaults.logging.level
    finally:
        os.unlink(path)


@given(
    rauzy_cap=positive,
    n=st.integers(min_value=1, max_value=12),
)
@settings(max_examples=100)
@pytest.mark.property_test
def test_partial_config_merges_with_defaults(rauzy_cap, n):
    """Property 3: Partial config merges provided values with defaults for missing sections."""
    path = _dump({"caps": {"rauzy_cap": rauzy_cap}, "harness": {"n": n}})
    try:
        config = Config.load(path)
        assert config.caps.rauzy_cap == rauzy_cap
        assert config.harness.n == n
        # Default for unspecified fields and sections
        assert config.caps.orbit_cap == 5000
        assert config.harness.sample_count == 100
        assert config.logging.level == "INFO"
    finally:
        os.unlink(path)

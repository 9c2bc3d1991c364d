"""Shared fixtures for ofdm-ici tests."""

import os
import sys

import pytest

# Add project root to path so `ofdm_ici` package is importable
PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)


@pytest.fixture
def tmp_config_dir(tmp_path, monkeypatch):
    """Redirect all config paths to a temp directory."""
    import ofdm_ici.channel.profiles as profiles_mod
    import ofdm_ici.config as config_mod

    config_dir = tmp_path / "config"
    config_dir.mkdir()
    profiles_dir = config_dir / "profiles"
    profiles_dir.mkdir()

    monkeypatch.setattr(config_mod, "CONFIG_DIR", str(config_dir))
    monkeypatch.setattr(config_mod, "CONFIG_FILE", str(config_dir / "config.json"))
    monkeypatch.setattr(config_mod, "USER_PROFILES_DIR", str(profiles_dir))
    monkeypatch.setattr(profiles_mod, "USER_PROFILES_DIR", str(profiles_dir))
    monkeypatch.delenv(config_mod.ENV_OUTPUT_DIR, raising=False)
    monkeypatch.delenv(config_mod.ENV_THREADS, raising=False)

    return tmp_path


@pytest.fixture(autouse=True)
def reset_singletons():
    """Reset the config and profile registry singletons after each test."""
    yield
    import ofdm_ici.channel.profiles as profiles_mod
    import ofdm_ici.config as config_mod
    config_mod._config = None
    profiles_mod.reset_profile_registry()


@pytest.fixture
def small_cfg():
    """LTE spacing and CP with a 16-subcarrier used set, 4-QAM, no noise."""
    from ofdm_ici.core.ofdm import LTE_CP_LENGTH, LTE_SUBCARRIER_SPACING, OfdmConfig

    return OfdmConfig(
        subcarrier_spacing=LTE_SUBCARRIER_SPACING,
        cp_length=LTE_CP_LENGTH,
        used_subcarriers=tuple(range(-8, 0)) + tuple(range(1, 9)),
    )


@pytest.fixture
def two_path_channel():
    """Two paths inside the LTE CP with Doppler shifts of a few percent of 1/T."""
    from ofdm_ici.core.ofdm import ChannelRealization, PathParams

    return ChannelRealization(
        paths=(
            PathParams(delay=0.0, doppler=600.0, amplitude=0.8 + 0.1j),
            PathParams(delay=1.5e-6, doppler=-450.0, amplitude=-0.3 + 0.4j),
        ),
        label="two-path",
    )

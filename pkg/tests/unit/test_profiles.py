"""Tests for tap profiles and the profile registry."""

import json
import logging

import pytest

from ofdm_ici.channel.profiles import (
    DIRECT,
    JAKES,
    ProfileRegistry,
    Tap,
    TapProfile,
    builtin_profile,
    get_profile_registry,
    profile_from_dict,
    profile_to_dict,
)
from ofdm_ici.errors import InvalidConfigError, UnknownProfileError


def _write_profile(directory, name, taps, description="user"):
    doc = {"name": name, "version": 1, "description": description,
           "taps": [{"delay_ns": d, "power_db": p} for d, p in taps]}
    (directory / f"{name}.json").write_text(json.dumps(doc))


class TestBuiltinProfiles:
    def test_tap_counts(self, tmp_config_dir):
        assert len(builtin_profile("tux").taps) == 20
        assert len(builtin_profile("rax").taps) == 10
        assert len(builtin_profile("itu_vehicular").taps) == 6

    def test_rax_has_direct_first_tap(self, tmp_config_dir):
        rax = builtin_profile("rax")
        assert rax.taps[0].spectrum == DIRECT
        assert all(t.spectrum == JAKES for t in rax.taps[1:])

    def test_all_fit_lte_cp(self, tmp_config_dir):
        for name in ("tux", "rax", "itu_vehicular"):
            assert builtin_profile(name).max_delay < 72 / 15.36e6

    def test_normalized_powers_sum_to_one(self, tmp_config_dir):
        for name in ("tux", "rax", "itu_vehicular"):
            assert builtin_profile(name).normalized_powers().sum() == pytest.approx(1.0, abs=1e-12)

    def test_itu_vehicular_delay_spread(self, tmp_config_dir):
        profile = builtin_profile("itu_vehicular")
        assert profile.mean_excess_delay == pytest.approx(254.35e-9, rel=1e-3)
        assert profile.rms_delay_spread == pytest.approx(370.39e-9, rel=1e-3)

    def test_unknown_profile(self, tmp_config_dir):
        with pytest.raises(UnknownProfileError) as exc:
            builtin_profile("pedestrian")
        assert "itu_vehicular" in str(exc.value)

    def test_unknown_is_key_error(self):
        assert issubclass(UnknownProfileError, KeyError)


class TestTapProfile:
    def test_delays_must_increase(self):
        with pytest.raises(InvalidConfigError):
            TapProfile("bad", (Tap(0.0, 0.0), Tap(0.0, -3.0)))

    def test_no_taps(self):
        with pytest.raises(InvalidConfigError):
            TapProfile("empty", ())

    def test_bad_spectrum(self):
        with pytest.raises(InvalidConfigError):
            Tap(0.0, 0.0, spectrum="flat")

    def test_single_tap_spread_is_zero(self):
        profile = TapProfile("one", (Tap(1e-6, -3.0),))
        assert profile.rms_delay_spread == 0.0
        assert profile.mean_excess_delay == pytest.approx(1e-6)


class TestProfileDicts:
    def test_from_dict(self):
        profile = profile_from_dict({
            "name": "two", "taps": [{"delay_ns": 0, "power_db": 0},
                                    {"delay_ns": 500, "power_db": -3, "spectrum": "jakes"}],
        })
        assert profile.delays[1] == pytest.approx(5e-7)
        assert profile.version == 1

    def test_to_dict_and_back(self, tmp_config_dir):
        rax = builtin_profile("rax")
        assert profile_from_dict(profile_to_dict(rax)) == rax

    @pytest.mark.parametrize("doc", [
        {"taps": []},
        {"name": "x"},
        {"name": "x", "taps": [{"power_db": 0}]},
        {"name": "x", "taps": [{"delay_ns": "soon", "power_db": 0}]},
        {"name": "x", "taps": [{"delay_ns": 0, "power_db": 0, "spectrum": "flat"}]},
    ])
    def test_malformed(self, doc):
        with pytest.raises(InvalidConfigError):
            profile_from_dict(doc)


class TestProfileRegistry:
    def test_user_profile_overrides_builtin(self, tmp_config_dir):
        user_dir = tmp_config_dir / "config" / "profiles"
        _write_profile(user_dir, "tux", [(0, 0.0), (100, -3.0)])
        reg = ProfileRegistry()
        assert len(reg.get("tux").taps) == 2
        assert reg.get("tux").description == "user"

    def test_user_profile_added(self, tmp_config_dir):
        _write_profile(tmp_config_dir / "config" / "profiles", "flat", [(0, 0.0)])
        reg = ProfileRegistry()
        assert "flat" in reg.names()
        assert {"tux", "rax", "itu_vehicular"} <= set(reg.names())

    def test_bad_file_skipped_with_warning(self, tmp_config_dir, caplog):
        user_dir = tmp_config_dir / "config" / "profiles"
        (user_dir / "broken.json").write_text("{not json")
        with caplog.at_level(logging.WARNING, logger="ofdm_ici.channel.profiles"):
            reg = ProfileRegistry()
        assert "broken.json" in caplog.text
        assert "tux" in reg.names()

    def test_non_json_files_ignored(self, tmp_path):
        (tmp_path / "notes.txt").write_text("hello")
        reg = ProfileRegistry(user_dir=str(tmp_path))
        assert "notes" not in reg.names()

    def test_missing_user_dir(self):
        reg = ProfileRegistry(user_dir="/nonexistent/profiles")
        assert "itu_vehicular" in reg.names()

    def test_register(self):
        reg = ProfileRegistry(user_dir="/nonexistent/profiles")
        reg.register(TapProfile("custom", (Tap(0.0, 0.0),)))
        assert reg.get("custom").name == "custom"

    def test_get_available_sorted(self):
        reg = ProfileRegistry(user_dir="/nonexistent/profiles")
        names = [p.name for p in reg.get_available()]
        assert names == sorted(names)

    def test_singleton(self, tmp_config_dir):
        assert get_profile_registry() is get_profile_registry()

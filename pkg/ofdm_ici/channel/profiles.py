"""Power-delay profiles and their registry.

Profiles are JSON data files. Built-in profiles live in the repo's
profiles/ directory; user profiles in ~/.config/ofdm-ici/profiles/ with
the same file format override built-ins of the same name.

File format::

    {"name": "tux", "version": 1, "description": "...", "source": "...",
     "taps": [{"delay_ns": 0, "power_db": -5.7, "spectrum": "jakes"}, ...]}
"""

import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np

from ..config import USER_PROFILES_DIR
from ..errors import InvalidConfigError, UnknownProfileError

logger = logging.getLogger(__name__)

# Built-in profiles directory (in the repo, alongside ofdm_ici/)
BUILTIN_PROFILES_DIR = os.path.join(
    os.path.dirname(os.path.dirname(os.path.dirname(__file__))),
    "profiles",
)

JAKES = "jakes"
DIRECT = "direct"
SPECTRA = (JAKES, DIRECT)

PROFILE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Tap:
    delay: float        # seconds
    power_db: float     # average power
    spectrum: str = JAKES

    def __post_init__(self):
        if self.spectrum not in SPECTRA:
            raise InvalidConfigError(f"tap spectrum must be one of {SPECTRA}, got {self.spectrum!r}")
        if not self.delay >= 0:
            raise InvalidConfigError(f"tap delay must be >= 0, got {self.delay}")


@dataclass(frozen=True)
class TapProfile:
    """A tapped-delay-line power-delay profile."""
    name: str
    taps: tuple[Tap, ...]
    description: str = ""
    source: str = ""
    version: int = PROFILE_FORMAT_VERSION

    def __post_init__(self):
        taps = tuple(self.taps)
        object.__setattr__(self, "taps", taps)
        if not taps:
            raise InvalidConfigError(f"profile {self.name!r} has no taps")
        delays = [t.delay for t in taps]
        if any(b <= a for a, b in zip(delays, delays[1:])):
            raise InvalidConfigError(f"profile {self.name!r}: tap delays must be strictly increasing")

    @property
    def delays(self) -> np.ndarray:
        return np.array([t.delay for t in self.taps])

    @property
    def max_delay(self) -> float:
        return self.taps[-1].delay

    def normalized_powers(self) -> np.ndarray:
        """Linear tap powers scaled to sum to 1."""
        linear = 10.0 ** (np.array([t.power_db for t in self.taps]) / 10.0)
        return linear / linear.sum()

    @property
    def mean_excess_delay(self) -> float:
        return float(np.dot(self.normalized_powers(), self.delays))

    @property
    def rms_delay_spread(self) -> float:
        p = self.normalized_powers()
        mean = np.dot(p, self.delays)
        return float(np.sqrt(max(np.dot(p, self.delays ** 2) - mean ** 2, 0.0)))


def profile_from_dict(data: dict) -> TapProfile:
    """Build a TapProfile from the JSON file structure."""
    try:
        taps = tuple(
            Tap(delay=float(t["delay_ns"]) * 1e-9,
                power_db=float(t["power_db"]),
                spectrum=t.get("spectrum", JAKES))
            for t in data["taps"]
        )
        return TapProfile(
            name=data["name"],
            taps=taps,
            description=data.get("description", ""),
            source=data.get("source", ""),
            version=int(data.get("version", PROFILE_FORMAT_VERSION)),
        )
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, InvalidConfigError):
            raise
        raise InvalidConfigError(f"malformed profile definition: {e}") from e


def profile_to_dict(profile: TapProfile) -> dict:
    return {
        "name": profile.name,
        "version": profile.version,
        "description": profile.description,
        "source": profile.source,
        "taps": [
            {"delay_ns": round(t.delay * 1e9, 6), "power_db": t.power_db, "spectrum": t.spectrum}
            for t in profile.taps
        ],
    }


class ProfileRegistry:
    """Registry of available tap profiles."""

    def __init__(self, user_dir: str | None = None):
        self._profiles: dict[str, TapProfile] = {}
        self._user_dir = USER_PROFILES_DIR if user_dir is None else user_dir
        self._load_profiles()

    def _load_profiles(self):
        # Load built-in first, then user (user overrides built-in)
        for profiles_dir in (BUILTIN_PROFILES_DIR, self._user_dir):
            self._scan_profiles_dir(profiles_dir)

    def _scan_profiles_dir(self, profiles_dir: str):
        if not os.path.isdir(profiles_dir):
            return

        for entry in sorted(os.listdir(profiles_dir)):
            if not entry.endswith(".json"):
                continue
            path = os.path.join(profiles_dir, entry)
            try:
                with open(path, "r", encoding="utf-8") as f:
                    profile = profile_from_dict(json.load(f))
            except (OSError, UnicodeDecodeError, json.JSONDecodeError, InvalidConfigError) as e:
                logger.warning("Skipping profile file %s: %s", path, e)
                continue
            if profile.name in self._profiles:
                logger.debug("Profile %s overridden by %s", profile.name, path)
            self._profiles[profile.name] = profile

    def register(self, profile: TapProfile):
        """Register a profile programmatically."""
        self._profiles[profile.name] = profile

    def get(self, name: str) -> TapProfile:
        try:
            return self._profiles[name]
        except KeyError:
            raise UnknownProfileError(
                f"unknown profile {name!r}; available: {', '.join(self.names())}"
            ) from None

    def names(self) -> list[str]:
        return sorted(self._profiles)

    def get_available(self) -> list[TapProfile]:
        return [self._profiles[n] for n in self.names()]


_registry: ProfileRegistry | None = None


def get_profile_registry() -> ProfileRegistry:
    """Get the profile registry (lazy-loaded singleton)."""
    global _registry
    if _registry is None:
        _registry = ProfileRegistry()
    return _registry


def reset_profile_registry():
    global _registry
    _registry = None


def builtin_profile(name: str) -> TapProfile:
    """A shipped profile: tux, rax or itu_vehicular (or a user override)."""
    return get_profile_registry().get(name)

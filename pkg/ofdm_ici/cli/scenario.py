"""Scenario documents: strict JSON describing one study run.

Every key is optional except where noted; omitted keys fall back to the
LTE 10 MHz downlink numerology, the ITU-R vehicular profile at
v_max T = 0.05 and E_b/N0 = 50 dB. Unknown keys, duplicate keys and
subcarriers outside S are rejected with the offending key path. The full
schema is documented in docs/specs/2026-10-17-scenario-format.md.
"""

import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any

from ..config import OUTPUT_FORMATS
from ..core.analytic import noise_density_for
from ..core.modem import bits_per_symbol
from ..core.ofdm import LTE_CP_LENGTH, LTE_SUBCARRIER_SPACING, OfdmConfig
from ..errors import InvalidConfigError, InvalidOrderError, ScenarioError
from ..sim.bootstrap import MIN_RESAMPLES
from ..sim.montecarlo import SWEEP_AXES
from ..sim.rng import SEED_MAX
from .outputs import MANIFEST_VERSION_KEY

STUDIES = ("coefficients", "normality", "instantaneous", "average_sweep", "validate")

SCENARIO_KEYS = {"name", "study", "seed", "ofdm", "constellation_orders", "ebno_db",
                 "channel", "params", "output"}
OFDM_KEYS = {"subcarrier_spacing", "cp_length", "subcarriers", "symbol_variance"}
RANGE_KEYS = {"min", "max", "exclude_dc"}
CHANNEL_KEYS = {"profile", "normalized_doppler", "n_sinusoids", "file"}
OUTPUT_KEYS = {"dir", "formats"}

PARAM_KEYS = {
    "coefficients": {"symbols", "subcarriers", "realizations"},
    "normality": {"symbols", "subcarriers", "realizations", "samples", "kurtosis_subcarriers",
                  "kurtosis_dopplers", "histogram_bins", "dump_samples"},
    "instantaneous": {"symbols", "subcarriers", "realizations", "iterations", "min_error_bits",
                      "bootstrap_resamples", "confidence"},
    "average_sweep": {"symbols", "subcarriers", "realizations", "iterations", "min_error_bits",
                      "bootstrap_resamples", "confidence", "axis", "grid"},
    "validate": {"iterations", "samples", "calibration_seeds"},
}


@dataclass(frozen=True)
class ChannelSource:
    """Exactly one of: built-in profiles with Doppler settings, or a realization file."""
    profiles: tuple[str, ...] = ("itu_vehicular",)
    normalized_doppler: float = 0.05
    n_sinusoids: int = 8
    file: str | None = None


@dataclass(frozen=True)
class StudyParams:
    symbols: tuple[int, ...] = (0,)
    subcarriers: tuple[int, ...] = (150, 300)
    realizations: int | None = None    # None: desk or full scale from AppConfig
    iterations: int | None = None
    samples: int = 1000
    min_error_bits: int = 10
    bootstrap_resamples: int = 1000
    confidence: float = 0.95
    axis: str = "ebno_db"
    grid: tuple[float, ...] = (10.0, 20.0, 30.0, 40.0, 50.0)
    kurtosis_subcarriers: tuple[int, ...] = ()
    kurtosis_dopplers: tuple[float, ...] = ()
    histogram_bins: int = 0
    dump_samples: bool = False
    calibration_seeds: int = 20


@dataclass(frozen=True)
class Scenario:
    name: str
    study: str
    ofdm: OfdmConfig
    constellation_orders: tuple[int, ...] = (4, 16, 64)
    ebno_db: float = 50.0
    channel: ChannelSource = field(default_factory=ChannelSource)
    params: StudyParams = field(default_factory=StudyParams)
    output_dir: str | None = None
    formats: tuple[str, ...] = ("csv",)
    seed: int = 0

    def config_for(self, order: int) -> OfdmConfig:
        """The OFDM config for one constellation order, N0 from ebno_db."""
        return self.ofdm.with_changes(
            constellation_order=order,
            noise_density=noise_density_for(self.ebno_db, order, self.ofdm.symbol_variance),
        )

    def with_changes(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        """Canonical JSON form; parse_scenario(json.dumps(s.to_dict())) == s."""
        channel: dict[str, Any]
        if self.channel.file is not None:
            channel = {"file": self.channel.file}
        else:
            profile = self.channel.profiles
            channel = {
                "profile": profile[0] if len(profile) == 1 else list(profile),
                "normalized_doppler": self.channel.normalized_doppler,
                "n_sinusoids": self.channel.n_sinusoids,
            }
        params = {k: list(v) if isinstance(v, tuple) else v
                  for k, v in asdict(self.params).items()
                  if k in PARAM_KEYS[self.study] and v is not None}
        doc = {
            "name": self.name,
            "study": self.study,
            "seed": self.seed,
            "ofdm": {
                "subcarrier_spacing": self.ofdm.subcarrier_spacing,
                "cp_length": self.ofdm.cp_length,
                "subcarriers": _subcarriers_to_json(self.ofdm.used_subcarriers),
                "symbol_variance": self.ofdm.symbol_variance,
            },
            "constellation_orders": list(self.constellation_orders),
            "ebno_db": self.ebno_db,
            "channel": channel,
            "params": params,
            "output": {"formats": list(self.formats)},
        }
        if self.output_dir is not None:
            doc["output"]["dir"] = self.output_dir
        return doc


def _subcarriers_to_json(subcarriers: tuple[int, ...]):
    lo, hi = min(subcarriers), max(subcarriers)
    if subcarriers == tuple(range(lo, hi + 1)):
        return {"min": lo, "max": hi, "exclude_dc": False}
    if lo < 0 < hi and subcarriers == tuple(range(lo, 0)) + tuple(range(1, hi + 1)):
        return {"min": lo, "max": hi, "exclude_dc": True}
    return list(subcarriers)


# -- parsing helpers ---------------------------------------------------------

def _reject_duplicates(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise ScenarioError(f"duplicate key {key!r}", key)
        out[key] = value
    return out


def _check_keys(obj, allowed: set, path: str):
    if not isinstance(obj, dict):
        raise ScenarioError("expected an object", path)
    unknown = sorted(set(obj) - allowed)
    if unknown:
        where = f"{path}.{unknown[0]}" if path else unknown[0]
        raise ScenarioError(f"unknown key (allowed: {', '.join(sorted(allowed))})", where)


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"expected an integer, got {value!r}", path)
    if minimum is not None and value < minimum:
        raise ScenarioError(f"must be >= {minimum}, got {value}", path)
    return value


def _float(value, path: str, minimum: float | None = None, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"expected a number, got {value!r}", path)
    value = float(value)
    if not math.isfinite(value):
        raise ScenarioError("must be finite", path)
    if positive and not value > 0:
        raise ScenarioError(f"must be > 0, got {value}", path)
    if minimum is not None and value < minimum:
        raise ScenarioError(f"must be >= {minimum}, got {value}", path)
    return value


def _list(value, path: str, item, nonempty: bool = True) -> tuple:
    if not isinstance(value, list):
        raise ScenarioError(f"expected a list, got {value!r}", path)
    if nonempty and not value:
        raise ScenarioError("must not be empty", path)
    return tuple(item(v, f"{path}[{i}]") for i, v in enumerate(value))


def _subcarriers(value, path: str) -> tuple[int, ...]:
    if isinstance(value, dict):
        _check_keys(value, RANGE_KEYS, path)
        lo = _int(value.get("min", -300), _join(path, "min"))
        hi = _int(value.get("max", 300), _join(path, "max"))
        exclude_dc = value.get("exclude_dc", True)
        if not isinstance(exclude_dc, bool):
            raise ScenarioError("expected true or false", _join(path, "exclude_dc"))
        result = tuple(k for k in range(lo, hi + 1) if not (exclude_dc and k == 0))
        if not result:
            raise ScenarioError("range is empty", path)
        return result
    result = _list(value, path, _int)
    if len(set(result)) != len(result):
        raise ScenarioError("contains duplicate subcarriers", path)
    return result


def _parse_ofdm(doc: dict) -> OfdmConfig:
    _check_keys(doc, OFDM_KEYS, "ofdm")
    try:
        return OfdmConfig(
            subcarrier_spacing=_float(doc.get("subcarrier_spacing", LTE_SUBCARRIER_SPACING),
                                      "ofdm.subcarrier_spacing", positive=True),
            cp_length=_float(doc.get("cp_length", LTE_CP_LENGTH), "ofdm.cp_length", minimum=0.0),
            used_subcarriers=_subcarriers(doc.get("subcarriers", {"min": -300, "max": 300}),
                                          "ofdm.subcarriers"),
            symbol_variance=_float(doc.get("symbol_variance", 1.0), "ofdm.symbol_variance",
                                   positive=True),
        )
    except InvalidConfigError as e:
        raise ScenarioError(str(e), "ofdm") from None


def _parse_channel(doc: dict) -> ChannelSource:
    _check_keys(doc, CHANNEL_KEYS, "channel")
    if "file" in doc:
        extra = sorted(set(doc) - {"file"})
        if extra:
            raise ScenarioError("a realization file excludes profile settings", f"channel.{extra[0]}")
        if not isinstance(doc["file"], str) or not doc["file"]:
            raise ScenarioError("expected a file path", "channel.file")
        return ChannelSource(profiles=(), file=doc["file"])

    profile = doc.get("profile", "itu_vehicular")
    if isinstance(profile, str):
        profiles = (profile,)
    else:
        profiles = _list(profile, "channel.profile", _str)
    return ChannelSource(
        profiles=profiles,
        normalized_doppler=_float(doc.get("normalized_doppler", 0.05),
                                  "channel.normalized_doppler", minimum=0.0),
        n_sinusoids=_int(doc.get("n_sinusoids", 8), "channel.n_sinusoids", minimum=1),
    )


def _str(value, path: str) -> str:
    if not isinstance(value, str) or not value:
        raise ScenarioError(f"expected a non-empty string, got {value!r}", path)
    return value


def _order(value, path: str) -> int:
    value = _int(value, path)
    try:
        bits_per_symbol(value)
    except InvalidOrderError as e:
        raise ScenarioError(str(e), path) from None
    return value


def _parse_params(doc: dict, study: str) -> StudyParams:
    _check_keys(doc, PARAM_KEYS[study], "params")
    values: dict[str, Any] = {}
    p = "params"
    if "symbols" in doc:
        values["symbols"] = _list(doc["symbols"], f"{p}.symbols", lambda v, q: _int(v, q, 0))
    if "subcarriers" in doc:
        values["subcarriers"] = _list(doc["subcarriers"], f"{p}.subcarriers", _int)
    for key, minimum in (("realizations", 1), ("iterations", 1), ("samples", 3),
                         ("min_error_bits", 0), ("bootstrap_resamples", MIN_RESAMPLES),
                         ("histogram_bins", 0), ("calibration_seeds", 1)):
        if key in doc:
            values[key] = _int(doc[key], f"{p}.{key}", minimum)
    if "confidence" in doc:
        c = _float(doc["confidence"], f"{p}.confidence")
        if not 0 < c < 1:
            raise ScenarioError(f"must be in (0, 1), got {c}", f"{p}.confidence")
        values["confidence"] = c
    if "axis" in doc:
        if doc["axis"] not in SWEEP_AXES:
            raise ScenarioError(f"must be one of {SWEEP_AXES}", f"{p}.axis")
        values["axis"] = doc["axis"]
    if "grid" in doc:
        values["grid"] = _list(doc["grid"], f"{p}.grid", _float)
    if "kurtosis_subcarriers" in doc:
        values["kurtosis_subcarriers"] = _list(doc["kurtosis_subcarriers"],
                                               f"{p}.kurtosis_subcarriers", _int, nonempty=False)
    if "kurtosis_dopplers" in doc:
        values["kurtosis_dopplers"] = _list(doc["kurtosis_dopplers"], f"{p}.kurtosis_dopplers",
                                            lambda v, q: _float(v, q, minimum=0.0), nonempty=False)
    if "dump_samples" in doc:
        if not isinstance(doc["dump_samples"], bool):
            raise ScenarioError("expected true or false", f"{p}.dump_samples")
        values["dump_samples"] = doc["dump_samples"]
    params = StudyParams(**values)
    if params.axis == "normalized_doppler" and any(v < 0 for v in params.grid):
        raise ScenarioError("normalized Doppler values must be >= 0", f"{p}.grid")
    return params


def _check_subcarriers(s: Scenario):
    for key in ("subcarriers", "kurtosis_subcarriers"):
        for i, l in enumerate(getattr(s.params, key)):
            if not s.ofdm.uses(l):
                raise ScenarioError(f"subcarrier {l} is not in the used-subcarrier set",
                                    f"params.{key}[{i}]")


def scenario_from_dict(doc: dict, study: str | None = None) -> Scenario:
    """Validate a decoded document. study, if given, must agree with the document."""
    if isinstance(doc, dict) and MANIFEST_VERSION_KEY in doc:
        if "scenario" not in doc:
            raise ScenarioError("manifest has no embedded scenario", "scenario")
        doc = doc["scenario"]
    _check_keys(doc, SCENARIO_KEYS, "")

    doc_study = doc.get("study")
    if doc_study is not None and doc_study not in STUDIES:
        raise ScenarioError(f"must be one of {STUDIES}", "study")
    if study is not None and doc_study is not None and doc_study != study:
        raise ScenarioError(f"document is a {doc_study!r} scenario, not {study!r}", "study")
    study = study or doc_study
    if study is None:
        raise ScenarioError("no study given", "study")

    output = doc.get("output", {})
    _check_keys(output, OUTPUT_KEYS, "output")
    formats = _list(output.get("formats", ["csv"]), "output.formats", _str)
    for i, fmt in enumerate(formats):
        if fmt not in OUTPUT_FORMATS:
            raise ScenarioError(f"must be one of {OUTPUT_FORMATS}", f"output.formats[{i}]")
    output_dir = output.get("dir")
    if output_dir is not None:
        output_dir = _str(output_dir, "output.dir")

    seed = _int(doc.get("seed", 0), "seed", 0)
    if seed > SEED_MAX:
        raise ScenarioError("must fit in 64 bits", "seed")

    scenario = Scenario(
        name=_str(doc.get("name", study), "name"),
        study=study,
        ofdm=_parse_ofdm(doc.get("ofdm", {})),
        constellation_orders=_list(doc.get("constellation_orders", [4, 16, 64]),
                                   "constellation_orders", _order),
        ebno_db=_float(doc.get("ebno_db", 50.0), "ebno_db"),
        channel=_parse_channel(doc.get("channel", {})),
        params=_parse_params(doc.get("params", {}), study),
        output_dir=output_dir,
        formats=formats,
        seed=seed,
    )
    _check_subcarriers(scenario)
    return scenario


def parse_scenario(text: str, study: str | None = None) -> Scenario:
    """Parse and validate a scenario (or manifest) JSON document."""
    try:
        doc = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    return scenario_from_dict(doc, study)


def load_scenario(path: str, study: str | None = None) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file: {e}") from None
    return parse_scenario(text, study)


def default_scenario(study: str) -> Scenario:
    """LTE 10 MHz numerology, ITU-R vehicular at v_max T = 0.05."""
    return scenario_from_dict({}, study)

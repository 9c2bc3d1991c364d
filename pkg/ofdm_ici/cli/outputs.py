"""Result tables, dumps and the run manifest.

CSV is canonical; with the json format each table is mirrored to
<name>.json. Every numeric cell is finite, the literal "discarded" (None) or
"n/a" for a value that does not exist for that row.
Column schemas are documented in docs/specs/2026-10-17-output-tables.md.
"""

import csv
import hashlib
import io
import json
import logging
import math
import os
import platform
from dataclasses import dataclass, field

import numpy as np
import scipy

from .. import __version__
from ..channel.realization_io import save_realization
from ..core.ofdm import ChannelRealization
from ..errors import OutputError

logger = logging.getLogger(__name__)

TABLE_SCHEMA_VERSION = 1
MANIFEST_VERSION = 1
MANIFEST_VERSION_KEY = "manifest_version"
MANIFEST_NAME = "manifest.json"
DISCARDED = "discarded"
NOT_AVAILABLE = "n/a"

STATUS_COMPLETE = "complete"
STATUS_FAILED = "failed"


@dataclass
class Table:
    name: str
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise OutputError(f"table {self.name}: expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(values)


def _native(value):
    """Plain Python scalar for a cell; None means discarded."""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            raise OutputError(f"refusing to write non-finite value {value!r}")
        return value
    raise OutputError(f"unsupported cell type {type(value).__name__}")


def format_cell(value) -> str:
    value = _native(value)
    if value is None:
        return DISCARDED
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def table_to_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def table_to_json(table: Table) -> str:
    rows = [[DISCARDED if v is None else v for v in map(_native, row)] for row in table.rows]
    doc = {"schema_version": TABLE_SCHEMA_VERSION, "table": table.name,
           "columns": list(table.columns), "rows": rows}
    return json.dumps(doc, indent=1) + "\n"


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def versions() -> dict:
    return {
        "ofdm_ici": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


class RunOutputs:
    """Everything one run writes into its output directory.

    Only the orchestrating thread writes; nothing here is thread-safe.
    """

    def __init__(self, out_dir: str, formats: tuple[str, ...] = ("csv",)):
        self.out_dir = out_dir
        self.formats = formats
        self.files: list[str] = []
        os.makedirs(out_dir, exist_ok=True)

    def _path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def _write(self, name: str, text: str) -> str:
        path = self._path(name)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        self.files.append(name)
        logger.debug("Wrote %s", path)
        return path

    def write_table(self, table: Table) -> str:
        path = self._write(f"{table.name}.csv", table_to_csv(table))
        if "json" in self.formats:
            self._write(f"{table.name}.json", table_to_json(table))
        logger.info("Table %s: %d rows", table.name, len(table.rows))
        return path

    def write_text(self, name: str, text: str) -> str:
        return self._write(name, text)

    def write_realization(self, chan: ChannelRealization, index: int) -> str:
        name = f"channel_{index}.txt"
        save_realization(chan, self._path(name))
        self.files.append(name)
        return self._path(name)

    def write_manifest(self, scenario: dict, status: str, threads: int, error: str = "",
                       profiles: dict | None = None) -> str:
        """manifest.json: scenario echo, seed, versions and file checksums.

        profiles maps each named channel profile to its full definition as
        loaded for this run, so user overrides are recorded too.
        """
        partial = status != STATUS_COMPLETE
        manifest = {
            MANIFEST_VERSION_KEY: MANIFEST_VERSION,
            "status": status,
            "study": scenario.get("study"),
            "seed": scenario.get("seed"),
            "threads": threads,
            "table_schema_version": TABLE_SCHEMA_VERSION,
            "versions": versions(),
            "scenario": scenario,
            "files": [
                {"name": name, "sha256": sha256_file(self._path(name)), "partial": partial}
                for name in self.files
            ],
        }
        if profiles:
            manifest["profiles"] = profiles
        if error:
            manifest["error"] = error
        path = self._path(MANIFEST_NAME)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")
        return path


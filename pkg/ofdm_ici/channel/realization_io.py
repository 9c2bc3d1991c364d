"""Text codec for channel realizations.

One path per line, comma separated, with an optional header row:

    # ofdm-ici channel realization v1
    # label: itu_vehicular v_max=750Hz sinusoids=8 seed=42
    delay_s,doppler_hz,amp_re,amp_im
    0.0,-612.3581307470658,0.2601418035187961,-0.11239186318880297

Lines starting with '#' are comments; "# label: ..." sets the label.
Floats are written with repr() so a save/load round trip is bit exact.
"""

import math
import os

from ..core.ofdm import ChannelRealization, PathParams
from ..errors import EmptyRealizationError, InvalidConfigError, RealizationParseError

MAGIC = "# ofdm-ici channel realization v1"
FIELDS = ("delay_s", "doppler_hz", "amp_re", "amp_im")
HEADER = ",".join(FIELDS)
_LABEL_PREFIX = "# label:"


def dumps_realization(chan: ChannelRealization) -> str:
    """Serialize a realization to the text format."""
    lines = [MAGIC]
    if chan.label:
        lines.append(f"{_LABEL_PREFIX} {' '.join(chan.label.splitlines())}")
    lines.append(HEADER)
    for p in chan.paths:
        lines.append(",".join(repr(float(v)) for v in
                              (p.delay, p.doppler, p.amplitude.real, p.amplitude.imag)))
    return "\n".join(lines) + "\n"


def loads_realization(text: str) -> ChannelRealization:
    """Parse the text format; errors carry the 1-based line and field name."""
    label = ""
    paths: list[PathParams] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith(_LABEL_PREFIX):
                label = line[len(_LABEL_PREFIX):].strip()
            continue
        cells = [c.strip() for c in line.split(",")]
        if tuple(cells) == FIELDS:
            continue
        if len(cells) != len(FIELDS):
            raise RealizationParseError(
                f"expected {len(FIELDS)} fields, got {len(cells)}", line=lineno,
                field=FIELDS[min(len(cells), len(FIELDS) - 1)],
            )
        values = []
        for name, cell in zip(FIELDS, cells):
            try:
                value = float(cell)
            except ValueError:
                raise RealizationParseError(f"not a number: {cell!r}", line=lineno, field=name) from None
            if not math.isfinite(value):
                raise RealizationParseError(f"not finite: {cell!r}", line=lineno, field=name)
            values.append(value)
        delay, doppler, re, im = values
        try:
            paths.append(PathParams(delay, doppler, complex(re, im)))
        except InvalidConfigError as e:
            raise RealizationParseError(str(e), line=lineno, field="delay_s") from None
    if not paths:
        raise EmptyRealizationError("channel realization file contains no paths")
    return ChannelRealization(paths=tuple(paths), label=label)


def save_realization(chan: ChannelRealization, path: str):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_realization(chan))


def load_realization(path: str) -> ChannelRealization:
    with open(path, "r", encoding="utf-8") as f:
        return loads_realization(f.read())

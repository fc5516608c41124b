"""ASCII point-cloud-data (.pcd) reader and writer.

Only the ``DATA ascii`` variant is supported. The writer adds a
``# frame_id <id>`` comment so the sensor name survives a round trip.
"""

import logging
from pathlib import Path
from typing import NamedTuple

import numpy as np
import pandas as pd

from src.errors import CloudParseError
from src.geometry import PointCloud


logger = logging.getLogger(__name__)

_REQUIRED_KEYS = ("FIELDS", "SIZE", "TYPE", "WIDTH", "HEIGHT", "POINTS", "DATA")
_XYZ = ("x", "y", "z")


class CloudFile(NamedTuple):
    path: Path
    fields: tuple[str, ...]
    cloud: PointCloud
    dropped_rows: int = 0


class _Header(NamedTuple):
    entries: dict[str, tuple[int, list[str]]]
    frame_id: str | None
    data_line: int


def write_cloud(cloud: PointCloud, path: Path) -> None:
    """Write x/y/z as 4-byte-float fields, values printed with 9 significant digits."""
    n = len(cloud)
    header = [
        "# .PCD v0.7 - Point Cloud Data file format",
        f"# frame_id {cloud.frame_id}",
        "VERSION 0.7",
        "FIELDS x y z",
        "SIZE 4 4 4",
        "TYPE F F F",
        "COUNT 1 1 1",
        f"WIDTH {n}",
        "HEIGHT 1",
        "VIEWPOINT 0 0 0 1 0 0 0",
        f"POINTS {n}",
        "DATA ascii",
    ]
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="ascii") as f:
        f.write("\n".join(header) + "\n")
        np.savetxt(f, cloud.points, fmt="%.9g")


def _read_header(path: Path, lines: list[str]) -> _Header:
    entries: dict[str, tuple[int, list[str]]] = {}
    frame_id = None
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            tokens = line[1:].split()
            if len(tokens) == 2 and tokens[0] == "frame_id":
                frame_id = tokens[1]
            continue
        key, *values = line.split()
        entries[key.upper()] = (number, values)
        if key.upper() == "DATA":
            return _Header(entries, frame_id, number)
    raise CloudParseError(str(path), len(lines), "header has no DATA line")


def _integer(path: Path, header: _Header, key: str) -> int:
    line, values = header.entries[key]
    if len(values) != 1 or not values[0].isdigit():
        raise CloudParseError(str(path), line, f"{key} must be one non-negative integer")
    return int(values[0])


def _validate_header(path: Path, header: _Header) -> tuple[str, ...]:
    for key in _REQUIRED_KEYS:
        if key not in header.entries:
            raise CloudParseError(str(path), header.data_line, f"header is missing {key}")

    fields_line, fields = header.entries["FIELDS"]
    missing = [axis for axis in _XYZ if axis not in fields]
    if missing:
        raise CloudParseError(str(path), fields_line, f"FIELDS lacks {', '.join(missing)}")

    counts = header.entries.get("COUNT", (fields_line, ["1"] * len(fields)))
    for key, (line, values) in (
        ("SIZE", header.entries["SIZE"]),
        ("TYPE", header.entries["TYPE"]),
        ("COUNT", counts),
    ):
        if len(values) != len(fields):
            raise CloudParseError(
                str(path), line, f"{key} lists {len(values)} entries for {len(fields)} fields"
            )
    if any(count != "1" for count in counts[1]):
        raise CloudParseError(str(path), counts[0], "multi-count fields are not supported")

    sizes = dict(zip(fields, header.entries["SIZE"][1], strict=True))
    types = dict(zip(fields, header.entries["TYPE"][1], strict=True))
    for axis in _XYZ:
        if types[axis].upper() != "F" or sizes[axis] not in ("4", "8"):
            raise CloudParseError(
                str(path),
                header.entries["TYPE"][0],
                f"field {axis} must be a 4- or 8-byte float",
            )

    data_values = header.entries["DATA"][1]
    if data_values != ["ascii"]:
        raise CloudParseError(
            str(path), header.data_line, f"only DATA ascii is supported, got {' '.join(data_values)}"
        )

    width = _integer(path, header, "WIDTH")
    height = _integer(path, header, "HEIGHT")
    points = _integer(path, header, "POINTS")
    if width * height != points:
        raise CloudParseError(
            str(path),
            header.entries["POINTS"][0],
            f"POINTS {points} does not equal WIDTH x HEIGHT = {width * height}",
        )
    return tuple(fields)


def _read_body(path: Path, fields: tuple[str, ...], lines: list[str], skip: int) -> pd.DataFrame:
    row_lines = [number for number, raw in enumerate(lines[skip:], start=skip + 1) if raw.strip()]
    for number in row_lines:
        tokens = len(lines[number - 1].split())
        if tokens != len(fields):
            raise CloudParseError(
                str(path), number, f"expected {len(fields)} values, found {tokens}"
            )
    if not row_lines:
        return pd.DataFrame(columns=list(fields), dtype=float)

    try:
        body = pd.read_csv(
            path,
            sep=r"\s+",
            header=None,
            names=list(fields),
            index_col=False,
            skiprows=skip,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
        )
    except pd.errors.ParserError as error:
        raise CloudParseError(str(path), row_lines[0], f"malformed data row ({error})") from error

    values = body.apply(pd.to_numeric, errors="coerce")
    raw_nan = body.apply(lambda column: column.str.lower().isin(["nan", "-nan"]))
    bad = (values.isna() & ~raw_nan).to_numpy()
    if bad.any():
        row = int(np.flatnonzero(bad.any(axis=1))[0])
        raise CloudParseError(
            str(path), row_lines[row], f"expected {len(fields)} numeric values"
        )
    return values


def read_cloud_file(path: Path) -> CloudFile:
    """Parse ``path``; rows with a NaN coordinate are dropped and counted."""
    with path.open(encoding="ascii", errors="replace") as f:
        lines = f.read().splitlines()

    header = _read_header(path, lines)
    fields = _validate_header(path, header)
    declared = _integer(path, header, "POINTS")

    body = _read_body(path, fields, lines, header.data_line)
    if len(body) != declared:
        raise CloudParseError(
            str(path),
            header.entries["POINTS"][0],
            f"header declares {declared} points, body has {len(body)}",
        )

    xyz = body[list(_XYZ)].to_numpy(dtype=np.float64)
    finite = np.isfinite(xyz).all(axis=1)
    dropped = int(len(xyz) - np.count_nonzero(finite))
    if dropped:
        logger.warning("%s: dropped %d rows with NaN coordinates", path, dropped)

    frame_id = header.frame_id or path.stem
    return CloudFile(path, fields, PointCloud(xyz[finite], frame_id), dropped)


def read_cloud(path: Path) -> PointCloud:
    return read_cloud_file(path).cloud

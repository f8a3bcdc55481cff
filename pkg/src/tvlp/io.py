"""File formats: PGM images (P2/P5), CSV signal profiles, JSON reports.

PGM stores 8-bit data under an affine map of a declared [lo, hi] range; the
range is recorded in a header comment so round trips lose only quantisation
(at most range/255 per pixel). CSV profiles are comma-separated with a
header row and 17 significant digits, so they round-trip at full float64
precision.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .grids import Image2D


class FileFormatError(ValueError):
    """Malformed input file; the message carries position information."""


# --- PGM ---------------------------------------------------------------------


def write_pgm(
    img: Image2D,
    path: str | Path,
    lo: float = 0.0,
    hi: float = 1.0,
    fmt: str = "P5",
) -> None:
    """Write an image as 8-bit PGM, mapping [lo, hi] affinely onto 0..255."""
    if fmt not in ("P2", "P5"):
        raise ValueError("fmt must be 'P2' or 'P5'")
    if not hi > lo:
        raise ValueError("need hi > lo")
    n, m = img.shape
    scaled = np.clip((img.values - lo) / (hi - lo) * 255.0, 0.0, 255.0)
    pixels = np.rint(scaled).astype(np.uint8)
    header = f"{fmt}\n# range {lo:.17g} {hi:.17g}\n# spacing {img.spacing:.17g}\n{m} {n}\n255\n"
    path = Path(path)
    if fmt == "P5":
        path.write_bytes(header.encode("ascii") + pixels.tobytes())
    else:
        body = "\n".join(" ".join(str(v) for v in row) for row in pixels)
        path.write_text(header + body + "\n", encoding="ascii")


def _tokenize_pgm(data: bytes):
    # yields (token, offset); comments run to end of line
    i = 0
    while i < len(data):
        c = data[i : i + 1]
        if c.isspace():
            i += 1
        elif c == b"#":
            j = data.find(b"\n", i)
            i = len(data) if j < 0 else j + 1
        else:
            j = i
            while j < len(data) and not data[j : j + 1].isspace():
                j += 1
            yield data[i:j], i
            i = j


def read_pgm(path: str | Path) -> tuple[Image2D, tuple[float, float]]:
    """Read a P2/P5 PGM written by `write_pgm`; returns (image, (lo, hi)).

    Files from other writers are accepted too; the range defaults to (0, 1)
    and the spacing to 1 when the header comments are absent.
    """
    path = Path(path)
    data = path.read_bytes()
    lo, hi, spacing = 0.0, 1.0, 1.0
    for line in data.split(b"\n"):
        if line.startswith(b"# range "):
            parts = line.split()
            lo, hi = float(parts[2]), float(parts[3])
        elif line.startswith(b"# spacing "):
            spacing = float(line.split()[2])
    toks = _tokenize_pgm(data)
    try:
        magic, off = next(toks)
    except StopIteration:
        raise FileFormatError(f"{path}: empty file") from None
    if magic not in (b"P2", b"P5"):
        raise FileFormatError(f"{path}: offset {off}: not a PGM file (magic {magic!r})")
    try:
        m, _ = next(toks)
        n, _ = next(toks)
        maxval, off_mv = next(toks)
        m, n, maxval = int(m), int(n), int(maxval)
    except (StopIteration, ValueError) as exc:
        raise FileFormatError(f"{path}: malformed header: {exc}") from None
    if maxval != 255:
        raise FileFormatError(f"{path}: offset {off_mv}: only maxval 255 is supported")
    if magic == b"P5":
        # pixel data starts one whitespace byte after the maxval token
        start = off_mv + len(str(maxval)) + 1
        raw = data[start : start + n * m]
        if len(raw) < n * m:
            raise FileFormatError(f"{path}: truncated pixel data ({len(raw)} of {n * m} bytes)")
        pixels = np.frombuffer(raw, dtype=np.uint8, count=n * m).reshape(n, m)
    else:
        vals = []
        for tok, off in toks:
            try:
                vals.append(int(tok))
            except ValueError:
                raise FileFormatError(f"{path}: offset {off}: bad pixel token {tok!r}") from None
        if len(vals) != n * m:
            raise FileFormatError(f"{path}: expected {n * m} pixels, found {len(vals)}")
        pixels = np.array(vals, dtype=np.uint8).reshape(n, m)
    values = lo + pixels.astype(np.float64) / 255.0 * (hi - lo)
    return Image2D(values, spacing=spacing), (lo, hi)


# --- CSV profiles --------------------------------------------------------------


def write_csv_profile(path: str | Path, columns: dict[str, np.ndarray]) -> None:
    """Write named columns (x first by convention) at full precision."""
    if not columns:
        raise ValueError("no columns to write")
    names = list(columns)
    arrays = [np.asarray(columns[k], dtype=np.float64).ravel() for k in names]
    length = arrays[0].size
    if any(a.size != length for a in arrays):
        raise ValueError("all columns must share one length")
    lines = [",".join(names)]
    for i in range(length):
        lines.append(",".join(f"{a[i]:.17g}" for a in arrays))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_csv_profile(path: str | Path) -> dict[str, np.ndarray]:
    """Read a profile written by `write_csv_profile`."""
    path = Path(path)
    text = path.read_text(encoding="ascii")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FileFormatError(f"{path}: empty file")
    names = [c.strip() for c in lines[0].split(",")]
    cols: list[list[float]] = [[] for _ in names]
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != len(names):
            raise FileFormatError(
                f"{path}: line {lineno}: expected {len(names)} fields, got {len(parts)}"
            )
        for c, val in zip(cols, parts):
            try:
                c.append(float(val))
            except ValueError:
                raise FileFormatError(f"{path}: line {lineno}: bad number {val!r}") from None
    return {name: np.array(c) for name, c in zip(names, cols)}


def csv_to_signal(path: str | Path, column: str | None = None) -> Image2D:
    """Load a 1D signal from a CSV profile as a one-column image.

    Uses the given column, else the first non-x column. The spacing is
    inferred from the x column when present.
    """
    cols = read_csv_profile(path)
    if column is None:
        candidates = [k for k in cols if k != "x"]
        if not candidates:
            raise FileFormatError(f"{path}: no data column found")
        column = candidates[0]
    if column not in cols:
        raise FileFormatError(f"{path}: no column named {column!r}")
    spacing = 1.0
    if "x" in cols and cols["x"].size >= 2:
        spacing = float(cols["x"][1] - cols["x"][0])
        if not spacing > 0:
            raise FileFormatError(f"{path}: x column is not increasing")
    return Image2D(cols[column][:, None], spacing=spacing)


# --- JSON reports --------------------------------------------------------------


def write_json_report(path: str | Path, report: dict) -> None:
    """Write a report dict as stable (sorted, indented) JSON."""
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_json_report(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: line {exc.lineno} col {exc.colno}: {exc.msg}") from None

"""Config files, CSV outputs and snapshot / codebook files.

Configs are flat ``key = value`` text, one pair per line, ``#`` starts a
comment.  Lists are comma separated, booleans are ``true``/``false`` and
``none`` clears an optional value.  Floats are written with 17 significant
digits so every double survives a round trip.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .channel import ChannelVector
from .codebooks import Codebook
from .experiments import CoverageGrid, ExperimentSpec, ResultRecord


class ConfigError(ValueError):
    """Malformed or unknown configuration entry."""


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def _parse_float(s: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"not a number: {s!r}") from None


def _parse_int(s: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise ConfigError(f"not an integer: {s!r}") from None


def _parse_bool(s: str) -> bool:
    low = s.lower()
    if low not in ("true", "false"):
        raise ConfigError(f"booleans are true/false, got {s!r}")
    return low == "true"


def _field_parsers() -> dict[str, Any]:
    parsers = {}
    for f in dataclasses.fields(ExperimentSpec):
        t = str(f.type)
        if t.startswith("tuple[str"):
            parsers[f.name] = lambda s: tuple(p.strip() for p in s.split(",") if p.strip())
        elif t.startswith("tuple[float"):
            parsers[f.name] = lambda s: tuple(_parse_float(p) for p in s.split(",") if p.strip())
        elif t == "bool":
            parsers[f.name] = _parse_bool
        elif t.startswith("int"):
            parsers[f.name] = _parse_int
        else:
            parsers[f.name] = _parse_float
    return parsers


def parse_config(text: str) -> dict[str, Any]:
    "Parse ``key = value`` text into typed ExperimentSpec keyword arguments."
    parsers = _field_parsers()
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in parsers:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate config key {key!r}")
        out[key] = None if value.lower() == "none" else parsers[key](value)
    return out


def load_spec(path: str | Path | None = None, **overrides: Any) -> ExperimentSpec:
    kwargs = parse_config(Path(path).read_text(encoding="utf-8")) if path else {}
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ExperimentSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def dump_config(spec: ExperimentSpec) -> str:
    lines = []
    for f in dataclasses.fields(spec):
        v = getattr(spec, f.name)
        if v is None:
            s = "none"
        elif isinstance(v, bool):
            s = "true" if v else "false"
        elif isinstance(v, tuple):
            s = ",".join(fmt(x) if isinstance(x, float) else str(x) for x in v)
        elif isinstance(v, float):
            s = fmt(v)
        else:
            s = str(v)
        lines.append(f"{f.name} = {s}")
    return "\n".join(lines) + "\n"


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def write_rates(path: str | Path, records: Sequence[ResultRecord]) -> None:
    _write_rows(Path(path), ("scheme", "snr_db", "mean_rate", "ci95"),
                ((r.scheme, r.snr_db, r.mean_rate, r.ci95) for r in records))


def write_heatmap(path: str | Path, grid: CoverageGrid) -> None:
    rows = []
    for scheme, values in grid.r_cover.items():
        for i, x in enumerate(grid.x):
            for j, z in enumerate(grid.z):
                rows.append((float(x), float(z), scheme, float(values[i, j])))
    _write_rows(Path(path), ("x", "z", "scheme", "r_cover"), rows)


def write_overhead(path: str | Path, table: Sequence[tuple[str, int]]) -> None:
    _write_rows(Path(path), ("scheme", "slots_used"), table)


def write_meta(path: str | Path, spec: ExperimentSpec, notes: Sequence[str]) -> None:
    meta = {"seed": spec.seed, "notes": list(notes), "config": dump_config(spec).splitlines()}
    Path(path).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def write_snapshot(path: str | Path, ch: ChannelVector) -> None:
    _write_rows(Path(path), ("n", "re", "im"),
                ((n, float(v.real), float(v.imag)) for n, v in enumerate(ch.samples, 1)))


def read_snapshot(path: str | Path) -> ChannelVector:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or set(rows[0]) != {"n", "re", "im"}:
        raise ConfigError(f"{path}: snapshot CSV needs columns n, re, im")
    rows.sort(key=lambda r: int(r["n"]))
    if [int(r["n"]) for r in rows] != list(range(1, len(rows) + 1)):
        raise ConfigError(f"{path}: antenna indices must run 1..N without gaps")
    return ChannelVector(np.array([complex(float(r["re"]), float(r["im"])) for r in rows]), "snapshot")


CODEBOOK_COLUMNS = ("scheme", "codeword_index", "ring_index", "u", "p1", "n", "re", "im")


def write_codebook(path: str | Path, book: Codebook) -> None:
    def rows():
        for k in range(len(book)):
            u, p1, ring = float(book.u[k]), float(book.p1[k]), int(book.ring[k])
            for i, v in enumerate(book.weights[k]):
                yield (book.scheme, k, ring, u, p1, i + 1, float(v.real), float(v.imag))

    _write_rows(Path(path), CODEBOOK_COLUMNS, rows())


def read_codebook(path: str | Path, overhead: int | None = None) -> Codebook:
    "Reload a codebook dump; ``overhead`` defaults to the number of codewords."
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CODEBOOK_COLUMNS:
            raise ConfigError(f"{path}: unexpected codebook header {header}")
        rows = list(reader)
    k = max(int(r[1]) for r in rows) + 1
    n = max(int(r[5]) for r in rows)
    weights = np.empty((k, n), dtype=complex)
    u, p1, ring = np.empty(k), np.empty(k), np.empty(k, dtype=int)
    for r in rows:
        i, j = int(r[1]), int(r[5]) - 1
        weights[i, j] = complex(float(r[6]), float(r[7]))
        u[i], p1[i], ring[i] = float(r[3]), float(r[4]), int(r[2])
    scheme = rows[0][0]
    return Codebook(weights, scheme, k if overhead is None else overhead, u, p1, ring)

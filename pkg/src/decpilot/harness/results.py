"""Metric records and their CSV / JSON-lines serialization."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import DecPilotError

CSV_FIELDS = (
    "policy",
    "ebn0_db",
    "ber",
    "bler",
    "effective_rate",
    "est_error_variance",
    "blocks_run",
    "bit_errors",
    "block_errors",
    "crc_accept_rate",
)
_INT_FIELDS = {"blocks_run", "bit_errors", "block_errors"}


class ResultsIOError(DecPilotError, OSError):
    pass


def _same(a, b) -> bool:
    if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
        return True
    return a == b


@dataclass(eq=False)
class MetricRecord:
    policy: str
    ebn0_db: float
    ber: float
    bler: float
    effective_rate: float
    est_error_variance: float
    blocks_run: int
    bit_errors: int
    block_errors: int
    crc_accept_rate: float  # NaN without a CRC

    # diagnostics, not serialized
    data_blocks: int = 0
    info_bits_per_block: int = 0
    pilot_updates: int = 0
    codeword_errors: int = 0
    codeword_bit_errors: int = 0
    n: int = 0
    abandoned: int = 0
    realization_checksum: str = ""
    block_bit_errors: list[int] = field(default_factory=list, repr=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MetricRecord):
            return NotImplemented
        return all(_same(getattr(self, f), getattr(other, f)) for f in CSV_FIELDS)

    def row(self) -> dict:
        return {f: getattr(self, f) for f in CSV_FIELDS}


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)  # shortest string that round-trips exactly
    return str(value)


def _coerce(name: str, text):
    if name == "policy":
        return str(text)
    if name in _INT_FIELDS:
        return int(text)
    return float(text)


def records_to_csv(records: Sequence[MetricRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in records:
        w.writerow([_fmt(getattr(r, f)) for f in CSV_FIELDS])
    return buf.getvalue()


def records_to_jsonl(records: Sequence[MetricRecord]) -> str:
    lines = []
    for r in records:
        # JSON has no NaN literal; write null
        obj = {f: (None if isinstance(v, float) and math.isnan(v) else v) for f, v in r.row().items()}
        lines.append(json.dumps(obj, allow_nan=False))
    return "".join(line + "\n" for line in lines)


def emit_results(records: Iterable[MetricRecord], fmt: str, path: str | Path) -> None:
    records = list(records)
    if fmt == "csv":
        text = records_to_csv(records)
    elif fmt in ("jsonl", "jsonlines"):
        text = records_to_jsonl(records)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise ResultsIOError(f"cannot write results to {path}: {exc}") from exc


def parse_csv(text: str) -> list[MetricRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_FIELDS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [MetricRecord(**{k: _coerce(k, v) for k, v in row.items()}) for row in reader]


def parse_jsonl(text: str) -> list[MetricRecord]:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        out.append(MetricRecord(**{k: (math.nan if obj[k] is None else _coerce(k, obj[k])) for k in CSV_FIELDS}))
    return out


def load_results(path: str | Path) -> list[MetricRecord]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ResultsIOError(f"cannot read results from {path}: {exc}") from exc
    return parse_jsonl(text) if path.suffix in (".jsonl", ".json") else parse_csv(text)


def write_manifest(path: str | Path, *, config_digest: str, seed: int, version: str, extra: dict | None = None) -> Path:
    """Sidecar ``<out>.manifest.json`` recording what produced a results file."""
    path = Path(path)
    sidecar = path.with_name(path.name + ".manifest.json")
    payload = {"config_sha256": config_digest, "seed": seed, "version": version}
    if extra:
        payload.update(extra)
    try:
        sidecar.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise ResultsIOError(f"cannot write manifest {sidecar}: {exc}") from exc
    return sidecar


__all__ = [
    "CSV_FIELDS",
    "MetricRecord",
    "ResultsIOError",
    "emit_results",
    "load_results",
    "parse_csv",
    "parse_jsonl",
    "records_to_csv",
    "records_to_jsonl",
    "write_manifest",
]


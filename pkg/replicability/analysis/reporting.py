"""Result tables, summaries and the run manifest."""

from __future__ import annotations

import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import pandas as pd

from replicability import __version__
from replicability.config.paths import MANIFEST_FILENAME, build_output_file, build_result_filename
from replicability.domain.results import DeclineBand, FdpResult, IntervalEstimate, ShiftResult, percent

MANIFEST_SCHEMA_VERSION = 1
CSV_FLOAT_FORMAT = "%.17g"
HEADLINE_RHOS = (0.0, 0.25)

Record = dict[str, Any]


@dataclass(frozen=True)
class RunManifest:
    """Provenance of one command run, written next to its data files."""

    schema_version: int
    command: str
    configuration: dict[str, Any]
    input_sha256: str | None
    tool_version: str
    seed: int | None
    generated_at_utc: str

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def file_sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def build_run_manifest(
    *,
    command: str,
    configuration: Mapping[str, Any],
    input_path: str | Path | None = None,
    seed: int | None = None,
) -> RunManifest:
    return RunManifest(
        schema_version=MANIFEST_SCHEMA_VERSION,
        command=command,
        configuration=dict(configuration),
        input_sha256=file_sha256(input_path) if input_path is not None else None,
        tool_version=__version__,
        seed=seed,
        generated_at_utc=datetime.now(timezone.utc).isoformat(),
    )


def json_safe(value: Any) -> Any:
    """Make a value JSON-serializable: inf -> 'inf', nan -> None, tuples -> lists."""
    if isinstance(value, float):
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, Mapping):
        return {str(key): json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(item) for item in value]
    if hasattr(value, "item") and callable(value.item):
        return json_safe(value.item())
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def to_json(data: Any) -> str:
    return json.dumps(json_safe(data), ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def to_csv(records: Sequence[Record]) -> str:
    buffer = io.StringIO()
    pd.DataFrame(list(records)).to_csv(buffer, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def serialize_table(records: Sequence[Record], output_format: str, extra: Mapping[str, Any] | None = None) -> str:
    """CSV of the records, or a JSON document with the records under 'rows'."""
    if output_format == "csv":
        return to_csv(records)
    document: dict[str, Any] = {"rows": list(records)}
    if extra:
        document.update(extra)
    return to_json(document)


def write_text(output_dir: str | Path, filename: str, text: str) -> str:
    path = build_output_file(output_dir, filename)
    Path(path).write_text(text, encoding="utf-8")
    return path


def write_table(
    records: Sequence[Record],
    *,
    output_dir: str | Path,
    stem: str,
    output_format: str,
    extra: Mapping[str, Any] | None = None,
) -> str:
    return write_text(output_dir, build_result_filename(stem, output_format), serialize_table(records, output_format, extra))


def write_run_manifest(manifest: RunManifest, *, output_dir: str | Path) -> str:
    return write_text(output_dir, MANIFEST_FILENAME, to_json(manifest.to_dict()))


def fdp_records(results: Iterable[FdpResult]) -> list[Record]:
    records = []
    for result in results:
        record = result.to_dict()
        record["summary"] = result.summary()
        records.append(record)
    return records


def _interval_columns(prefix: str, interval: IntervalEstimate) -> Record:
    return {
        f"{prefix}_lo": interval.lo,
        f"{prefix}_hi": interval.hi,
        f"{prefix}_flags": ";".join(interval.flags),
    }


def shift_records(results: Iterable[ShiftResult]) -> list[Record]:
    records = []
    for result in results:
        record: Record = {
            "study_id": result.study_id,
            "z_o": result.z_o,
            "z_r": result.z_r,
            "k_o": result.k_o,
            "k_r": result.k_r,
            "pvalue_adjusted": result.pvalue_adjusted,
            "pvalue_unadjusted": result.pvalue_unadjusted,
        }
        record.update(_interval_columns("ci_shift", result.ci_shift))
        record.update(_interval_columns("ci_shift_unadjusted", result.ci_shift_unadjusted))
        record.update(_interval_columns("predictive_z", result.predictive_z))
        record.update(_interval_columns("predictive_effect", result.predictive_effect))
        record["flags"] = ";".join(result.flags)
        for name, rejected in result.rejections.items():
            record[f"rejected_{name}"] = rejected
        records.append(record)
    return records


def decline_records(band: DeclineBand) -> list[Record]:
    return [asdict(row) for row in band.rows]


def decline_summary(band: DeclineBand) -> dict[str, Any]:
    """Headline numbers at rho = 0 and rho = 0.25 when they are on the grid."""
    summary: dict[str, Any] = {
        "m": band.m,
        "lambda": band.lambda_,
        "confidence": band.confidence,
        "nonmonotone_studies": list(band.nonmonotone_ids),
        "headline": {},
    }
    for rho in HEADLINE_RHOS:
        try:
            row = band.row_at(rho)
        except KeyError:
            continue
        summary["headline"][f"{rho:g}"] = {
            "under": row.under,
            "over": row.over,
            "ci_lo": row.ci_lo,
            "ci_hi": row.ci_hi,
            "under_count": max(0.0, band.m - row.b / (1.0 - band.lambda_)),
            "under_percent": percent(row.under),
            "over_percent": percent(row.over),
            "ci_lo_percent": percent(row.ci_lo),
            "ci_hi_percent": percent(row.ci_hi),
        }
    return summary


def records_from(rows: Iterable[Any], **columns: Any) -> list[Record]:
    """asdict() each dataclass row and prepend constant columns, e.g. report='level'."""
    records = []
    for row in rows:
        record: Record = dict(columns)
        record.update(asdict(row))
        records.append(record)
    return records

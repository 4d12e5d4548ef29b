"""
Parser for the study table CSV.

One row per arm: each study_id needs exactly one ``original`` and one
``replication`` row. Header problems raise SchemaError; problems inside a row
are collected into the EligibilityReport and the study is marked malformed.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from replicability.domain.study import ArmRole, Sidedness, StudyArm, StudyCandidate, TestFamily
from replicability.errors import InvalidArgumentError, SchemaError, StudyParseError
from replicability.validation.eligibility import STATUS_MALFORMED, EligibilityReport

logger = logging.getLogger(__name__)

SUPPORTED_SCHEMA_VERSIONS = ("1",)
STUDY_COLUMNS = (
    "study_id",
    "arm",
    "test_family",
    "statistic",
    "df",
    "n_total",
    "n_group1",
    "n_group2",
    "n_covariates",
    "reported_p",
    "sidedness",
    "direction",
    "k_override",
)
INTEGER_COLUMNS = ("df", "n_total", "n_group1", "n_group2", "n_covariates")
ZERO_P_CLAMP = 1e-15

_DIRECTION_ALIASES = {
    "1": 1,
    "+1": 1,
    "+": 1,
    "positive": 1,
    "-1": -1,
    "-": -1,
    "negative": -1,
}

# Design fields each family needs when no k_override is supplied.
_DESIGN_FIELDS: dict[TestFamily, tuple[str, ...]] = {
    TestFamily.Z: ("n_total",),
    TestFamily.T_ONE_SAMPLE: ("n_total",),
    TestFamily.T_TWO_SAMPLE: ("n_group1", "n_group2"),
    TestFamily.CORRELATION: ("n_total",),
    TestFamily.PARTIAL_CORRELATION: ("n_total",),
}
# Fields required regardless of k_override.
_REQUIRED_FIELDS: dict[TestFamily, tuple[str, ...]] = {
    TestFamily.T_ONE_SAMPLE: ("df",),
    TestFamily.T_TWO_SAMPLE: ("df",),
    TestFamily.F1: ("df",),
    TestFamily.CORRELATION: ("n_total",),
    TestFamily.PARTIAL_CORRELATION: ("n_total", "n_covariates"),
}


@dataclass
class _RowProblems:
    line: int
    study_id: str
    errors: list[tuple[str, str | None]] = field(default_factory=list)

    def add(self, message: str, column: str | None = None) -> None:
        self.errors.append((message, column))


def parse_studies(path: str | Path, schema_version: str = "1") -> tuple[list[StudyCandidate], EligibilityReport]:
    """Return the well-formed study candidates and a report of every row problem."""
    if str(schema_version) not in SUPPORTED_SCHEMA_VERSIONS:
        supported = ", ".join(SUPPORTED_SCHEMA_VERSIONS)
        raise SchemaError(f"Unsupported schema version {schema_version!r}. Supported versions: {supported}")

    text = Path(path).read_text(encoding="utf-8-sig")
    frame = _read_frame(text)
    _check_header(frame)

    line_numbers = [index + 1 for index, raw in enumerate(text.splitlines()) if raw.strip()]
    report = EligibilityReport()
    arms: dict[str, dict[ArmRole, tuple[StudyArm, int]]] = {}
    malformed: set[str] = set()
    order: list[str] = []

    for position, row in enumerate(frame.itertuples(index=False)):
        record = {column: str(value).strip() for column, value in zip(frame.columns, row)}
        line = line_numbers[position + 1] if position + 1 < len(line_numbers) else position + 2
        study_id = record["study_id"]
        problems = _RowProblems(line=line, study_id=study_id)

        if not study_id:
            report.add_error("missing field study_id", line=line, column="study_id")
            continue
        if study_id not in arms:
            arms[study_id] = {}
            order.append(study_id)

        role = _parse_role(record["arm"], problems)
        arm = _parse_arm(record, problems, report)
        if role is not None and role in arms[study_id]:
            problems.add(f"duplicate {role.value} arm", "arm")

        if problems.errors or arm is None or role is None:
            for message, column in problems.errors:
                report.add_error(message, line=line, column=column, study_id=study_id)
            malformed.add(study_id)
            continue
        arms[study_id][role] = (arm, line)

    candidates: list[StudyCandidate] = []
    for study_id in order:
        by_role = arms[study_id]
        if study_id not in malformed:
            for role in ArmRole:
                if role not in by_role:
                    line = next(iter(by_role.values()))[1] if by_role else None
                    report.add_error(f"missing {role.value} arm", line=line, column="arm", study_id=study_id)
                    malformed.add(study_id)
        if study_id in malformed:
            report.set_status(study_id, STATUS_MALFORMED)
            continue
        original, line = by_role[ArmRole.ORIGINAL]
        replication, _ = by_role[ArmRole.REPLICATION]
        candidates.append(StudyCandidate(study_id, original, replication, line))

    logger.info("Parsed %d studies (%d malformed) from %s", len(order), len(malformed), path)
    return candidates, report


def _read_frame(text: str) -> pd.DataFrame:
    try:
        frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError as exc:
        raise SchemaError("The study table is empty; a header row is required.") from exc
    except pd.errors.ParserError as exc:
        raise StudyParseError(f"Could not read the study table: {exc}") from exc
    frame.columns = [str(column).strip() for column in frame.columns]
    return frame.fillna("")


def _check_header(frame: pd.DataFrame) -> None:
    for column in frame.columns:
        if column not in STUDY_COLUMNS:
            raise SchemaError(f"Unknown column {column!r} in the study table header.")
    missing = [column for column in STUDY_COLUMNS if column not in frame.columns]
    if missing:
        raise SchemaError(f"Missing column {missing[0]!r} in the study table header.")


def _parse_role(value: str, problems: _RowProblems) -> ArmRole | None:
    try:
        return ArmRole(value.lower())
    except ValueError:
        problems.add(f"unknown arm {value!r} (expected original or replication)", "arm")
        return None


def _parse_float(record: dict[str, str], column: str, problems: _RowProblems) -> float | None:
    raw = record[column]
    if raw == "":
        return None
    try:
        return float(raw)
    except ValueError:
        problems.add(f"non-numeric value {raw!r}", column)
        return None


def _parse_int(record: dict[str, str], column: str, problems: _RowProblems) -> int | None:
    value = _parse_float(record, column, problems)
    if value is None:
        return None
    if not value.is_integer():
        problems.add(f"expected an integer, got {record[column]!r}", column)
        return None
    return int(value)


def _parse_direction(raw: str, problems: _RowProblems) -> int | None:
    if raw == "":
        return None
    direction = _DIRECTION_ALIASES.get(raw.lower())
    if direction is None:
        problems.add(f"unknown direction {raw!r} (expected +1 or -1)", "direction")
    return direction


def _parse_arm(record: dict[str, str], problems: _RowProblems, report: EligibilityReport) -> StudyArm | None:
    try:
        family = TestFamily(record["test_family"])
    except ValueError:
        problems.add(f"unknown test_family {record['test_family']!r}", "test_family")
        return None

    statistic = _parse_float(record, "statistic", problems)
    reported_p = _parse_float(record, "reported_p", problems)
    integers = {column: _parse_int(record, column, problems) for column in INTEGER_COLUMNS}
    k_override = _parse_float(record, "k_override", problems)
    direction = _parse_direction(record["direction"], problems)

    sidedness = Sidedness.TWO_SIDED
    if record["sidedness"]:
        try:
            sidedness = Sidedness(record["sidedness"].lower())
        except ValueError:
            problems.add(f"unknown sidedness {record['sidedness']!r}", "sidedness")

    if statistic is None and record["statistic"] == "":
        problems.add("missing field statistic", "statistic")
    if reported_p is None and record["reported_p"] == "":
        problems.add("missing field reported_p", "reported_p")

    required = list(_REQUIRED_FIELDS.get(family, ()))
    if k_override is None:
        if family is TestFamily.F1:
            if integers["n_total"] is None and (integers["n_group1"] is None or integers["n_group2"] is None):
                required.append("n_total")
        else:
            required.extend(_DESIGN_FIELDS.get(family, ()))
    for column in dict.fromkeys(required):
        if integers.get(column) is None and record[column] == "":
            problems.add(f"missing field {column}", column)

    if reported_p is not None:
        if reported_p == 0.0:
            report.add_warning(
                f"reported_p of 0 clamped to {ZERO_P_CLAMP:g}",
                line=problems.line,
                column="reported_p",
                study_id=problems.study_id,
            )
            reported_p = ZERO_P_CLAMP
        elif not 0.0 < reported_p <= 1.0:
            problems.add(f"reported_p {reported_p} outside (0, 1]", "reported_p")
    if statistic is not None and family.is_correlation and not -1.0 < statistic < 1.0:
        problems.add(f"correlation {statistic} outside (-1, 1)", "statistic")
    if statistic is not None and family is TestFamily.F1 and statistic < 0:
        problems.add(f"F statistic {statistic} is negative", "statistic")

    if problems.errors:
        return None
    try:
        return StudyArm(
            test_family=family,
            statistic=statistic,
            reported_p=reported_p,
            sidedness=sidedness,
            df=integers["df"],
            n_total=integers["n_total"],
            n_group1=integers["n_group1"],
            n_group2=integers["n_group2"],
            n_covariates=integers["n_covariates"] or 0,
            direction=direction,
            k_override=k_override,
        )
    except InvalidArgumentError as exc:
        problems.add(str(exc))
        return None

"""
Synthetic study tables drawn from the selection model.

Originals are sampled from the truncated law (significant at alpha0 by
construction), replications from the untruncated law with a possibly
declined effect. Families rotate through z, t, F(1, df) and correlation so
every standardization path of the parser is exercised.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.special import ndtr

from replicability.config.scenarios import SimConfig
from replicability.domain.study import StudyArm, TestFamily
from replicability.parsing.studies import STUDY_COLUMNS
from replicability.simulation.harness import cutoff_for, sample_selected_scores, stream
from replicability.standardization import k_factor

logger = logging.getLogger(__name__)

FAMILY_ROTATION = (
    TestFamily.Z,
    TestFamily.T_TWO_SAMPLE,
    TestFamily.T_ONE_SAMPLE,
    TestFamily.F1,
    TestFamily.CORRELATION,
)
NULL_PROBABILITY = 0.3
# Every n-th study gets small groups so its df falls below the usual threshold.
SMALL_SAMPLE_EVERY = 12
SMALL_GROUP_SIZE = 12
REPLICATION_SIZE_FACTOR = 2
STATISTIC_FORMAT = "%.12g"


@dataclass(frozen=True)
class FixtureSummary:
    path: str
    n_studies: int
    n_rows: int
    small_sample_studies: int


def _design(family: TestFamily, group_size: int) -> StudyArm:
    """Arm carrying only the design fields; statistic and p are filled in later."""
    n_total = 2 * group_size
    if family is TestFamily.T_TWO_SAMPLE:
        return StudyArm(family, 0.0, 1.0, df=n_total - 2, n_total=n_total, n_group1=group_size, n_group2=group_size)
    if family is TestFamily.T_ONE_SAMPLE:
        return StudyArm(family, 0.0, 1.0, df=group_size - 1, n_total=group_size)
    if family is TestFamily.F1:
        return StudyArm(family, 0.0, 1.0, df=n_total - 2, n_total=n_total, n_group1=group_size, n_group2=group_size)
    return StudyArm(family, 0.0, 1.0, n_total=n_total)


def _with_score(arm: StudyArm, z: float) -> StudyArm:
    reported_p = max(2.0 * float(ndtr(-abs(z))), 1e-300)
    if arm.test_family is TestFamily.F1:
        return replace(arm, statistic=z * z, reported_p=reported_p, direction=1 if z > 0 else -1)
    if arm.test_family is TestFamily.CORRELATION:
        return replace(arm, statistic=math.tanh(z / math.sqrt(arm.n_total - 3)), reported_p=reported_p)
    return replace(arm, statistic=z, reported_p=reported_p)


def _row(study_id: str, role: str, arm: StudyArm) -> dict[str, object]:
    return {
        "study_id": study_id,
        "arm": role,
        "test_family": arm.test_family.value,
        "statistic": arm.statistic,
        "df": arm.df,
        "n_total": arm.n_total,
        "n_group1": arm.n_group1,
        "n_group2": arm.n_group2,
        "n_covariates": arm.n_covariates if arm.test_family.is_correlation else None,
        "reported_p": arm.reported_p,
        "sidedness": arm.sidedness.value,
        "direction": {1: "+1", -1: "-1"}.get(arm.direction, ""),
        "k_override": None,
    }


def fixture_frame(cfg: SimConfig) -> pd.DataFrame:
    """Build the study table as a DataFrame with the parser's column order."""
    rng = stream(cfg.seed, 4)
    cutoff = cutoff_for(cfg.alpha0)
    thetas = np.asarray(cfg.theta_grid, dtype=float)
    declines = np.asarray(cfg.decline_fractions, dtype=float)
    rows: list[dict[str, object]] = []
    for index in range(cfg.n_studies):
        study_id = f"S{index + 1:03d}"
        family = FAMILY_ROTATION[index % len(FAMILY_ROTATION)]
        small = (index + 1) % SMALL_SAMPLE_EVERY == 0
        if small:
            family = TestFamily.T_TWO_SAMPLE
            group_size = SMALL_GROUP_SIZE
        else:
            group_size = int(rng.integers(20, 81))

        original = _design(family, group_size)
        replication = _design(family, REPLICATION_SIZE_FACTOR * group_size)
        k_o, k_r = k_factor(original), k_factor(replication)

        is_null = rng.random() < NULL_PROBABILITY
        theta_o = 0.0 if is_null else float(rng.choice(thetas)) * float(rng.choice([-1.0, 1.0]))
        theta_r = (1.0 - float(rng.choice(declines))) * theta_o
        z_o = float(sample_selected_scores(np.array([k_o * theta_o]), cutoff, rng)[0])
        z_r = k_r * theta_r + float(rng.standard_normal())

        rows.append(_row(study_id, "original", _with_score(original, z_o)))
        rows.append(_row(study_id, "replication", _with_score(replication, z_r)))

    frame = pd.DataFrame(rows, columns=list(STUDY_COLUMNS))
    for column in ("df", "n_total", "n_group1", "n_group2", "n_covariates"):
        frame[column] = frame[column].astype("Int64")
    return frame


def generate_fixture(cfg: SimConfig, path: str | Path) -> FixtureSummary:
    """Write a schema-conformant study table to ``path``."""
    frame = fixture_frame(cfg)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=STATISTIC_FORMAT)
    small = sum(1 for index in range(cfg.n_studies) if (index + 1) % SMALL_SAMPLE_EVERY == 0)
    logger.info("Wrote %d synthetic studies to %s", cfg.n_studies, path)
    return FixtureSummary(path=str(path), n_studies=cfg.n_studies, n_rows=len(frame), small_sample_studies=small)

"""
Score tables and their CSV files.

In memory, scores are held in a wide DataFrame: one row per pair with the
columns sample_id_a, sample_id_b, label, then one column per matcher and an
optional 'fused' column. On disk, raw scores use the long layout
sample_id_a,sample_id_b,label,matcher_id,score and fused scores the layout
sample_id_a,sample_id_b,label,fused_score.
"""

import logging
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from ..data import GENUINE, IMPOSTOR
from .fusion import fuse_columns
from .records import FUSED, FusionConfig, MatchingError, ScoreRecord

logger = logging.getLogger(__name__)

KEY_COLUMNS = ["sample_id_a", "sample_id_b", "label"]
LONG_COLUMNS = KEY_COLUMNS + ["matcher_id", "score"]
FUSED_COLUMNS = KEY_COLUMNS + ["fused_score"]
FLOAT_FORMAT = "%.17g"


def matcher_columns(table: pd.DataFrame) -> List[str]:
    return [c for c in table.columns if c not in KEY_COLUMNS and c != FUSED]


def check_complete(table: pd.DataFrame, matcher_ids: Sequence[str]) -> None:
    """Raise naming the first pair that lacks a score of any matcher."""
    for matcher_id in matcher_ids:
        if matcher_id not in table.columns:
            raise MatchingError(f"no scores for matcher '{matcher_id}'")
        missing = table[matcher_id].isna().to_numpy()
        if missing.any():
            row = table.iloc[int(np.flatnonzero(missing)[0])]
            raise MatchingError(
                f"record {row['sample_id_a']}/{row['sample_id_b']} has no score for matcher '{matcher_id}'"
            )


def fuse_table(table: pd.DataFrame, cfg: FusionConfig) -> pd.DataFrame:
    """Copy of the table with a 'fused' column."""
    check_complete(table, cfg.matcher_ids)
    fused = fuse_columns({m: table[m].to_numpy(dtype=np.float64) for m in cfg.matcher_ids}, cfg)
    out = table.copy()
    out[FUSED] = fused
    return out


def records_to_table(records: Sequence[ScoreRecord], matcher_ids: Optional[Sequence[str]] = None) -> pd.DataFrame:
    if matcher_ids is None:
        matcher_ids = list(dict.fromkeys(m for r in records for m in r.matcher_scores))
    data = {
        "sample_id_a": [r.sample_id_a for r in records],
        "sample_id_b": [r.sample_id_b for r in records],
        "label": [r.label for r in records],
    }
    for matcher_id in matcher_ids:
        data[matcher_id] = [r.matcher_scores.get(matcher_id, np.nan) for r in records]
    if any(r.fused_score is not None for r in records):
        data[FUSED] = [np.nan if r.fused_score is None else r.fused_score for r in records]
    return pd.DataFrame(data)


def table_to_records(table: pd.DataFrame) -> List[ScoreRecord]:
    matchers = matcher_columns(table)
    has_fused = FUSED in table.columns
    records = []
    for row in table.itertuples(index=False, name=None):
        values = dict(zip(table.columns, row))
        scores = {m: float(values[m]) for m in matchers if not pd.isna(values[m])}
        fused = values.get(FUSED) if has_fused else None
        records.append(ScoreRecord(
            sample_id_a=str(values["sample_id_a"]),
            sample_id_b=str(values["sample_id_b"]),
            label=str(values["label"]),
            matcher_scores=scores,
            fused_score=None if fused is None or pd.isna(fused) else float(fused),
        ))
    return records


def to_long(table: pd.DataFrame, matcher_ids: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """Pair-major long layout: every matcher of pair 1, then pair 2, ..."""
    matcher_ids = list(matcher_ids) if matcher_ids is not None else matcher_columns(table)
    long = table.melt(id_vars=KEY_COLUMNS, value_vars=matcher_ids, var_name="matcher_id", value_name="score")
    n = len(table)
    # melt is matcher-major; reorder to pair-major
    order = np.arange(len(long)).reshape(len(matcher_ids), n).T.ravel()
    return long.iloc[order].reset_index(drop=True)[LONG_COLUMNS]


def from_long(long: pd.DataFrame) -> pd.DataFrame:
    """Inverse of to_long; pair and matcher order follow first appearance."""
    keys = long[KEY_COLUMNS].drop_duplicates(subset=["sample_id_a", "sample_id_b"]).reset_index(drop=True)
    matchers = list(pd.unique(long["matcher_id"]))
    try:
        wide = long.pivot(index=["sample_id_a", "sample_id_b"], columns="matcher_id", values="score")
    except ValueError as e:
        raise MatchingError(f"duplicate (pair, matcher) rows in score file: {e}") from e
    table = keys.join(wide[matchers], on=["sample_id_a", "sample_id_b"])
    table.columns.name = None
    return table


def _check_labels(df: pd.DataFrame, path) -> None:
    bad = ~df["label"].isin([GENUINE, IMPOSTOR])
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0]) + 1
        raise MatchingError(f"{path}: row {row}: label must be genuine or impostor")


def save_scores(table: pd.DataFrame, path, matcher_ids: Optional[Sequence[str]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    to_long(table, matcher_ids).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def load_scores(path) -> pd.DataFrame:
    """Read a long score file into a wide table."""
    df = pd.read_csv(path, dtype={"sample_id_a": str, "sample_id_b": str, "label": str, "matcher_id": str},
                     keep_default_na=False)
    if list(df.columns) != LONG_COLUMNS:
        raise MatchingError(f"{path}: score file header must be {','.join(LONG_COLUMNS)}")
    _check_labels(df, path)
    df["score"] = pd.to_numeric(df["score"], errors="raise").astype(np.float64)
    return from_long(df)


def save_fused(table: pd.DataFrame, path) -> Path:
    if FUSED not in table.columns:
        raise MatchingError("table has no fused scores")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    out = table[KEY_COLUMNS + [FUSED]].rename(columns={FUSED: "fused_score"})
    out.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def load_fused(path) -> pd.DataFrame:
    df = pd.read_csv(path, dtype={"sample_id_a": str, "sample_id_b": str, "label": str}, keep_default_na=False)
    if list(df.columns) != FUSED_COLUMNS:
        raise MatchingError(f"{path}: fused score file header must be {','.join(FUSED_COLUMNS)}")
    _check_labels(df, path)
    df["fused_score"] = pd.to_numeric(df["fused_score"], errors="raise").astype(np.float64)
    return df.rename(columns={"fused_score": FUSED})

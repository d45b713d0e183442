"""
Verification protocol: subject-level splits and all-against-all pair lists.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterator, NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd

from .manifest import Attribute, Gaze, Manifest, ManifestError, Variant

logger = logging.getLogger(__name__)

GENUINE = "genuine"
IMPOSTOR = "impostor"
PAIR_COLUMNS = ["sample_id_a", "sample_id_b", "label"]


class ProtocolError(ValueError):
    """Raised when a split or pair list cannot be produced."""


class SubjectOrdering(Enum):
    LEXICOGRAPHIC = "lexicographic"
    MANIFEST_ORDER = "manifest_order"


class Pair(NamedTuple):
    sample_id_a: str
    sample_id_b: str
    label: str


@dataclass
class PairList:
    """
    Canonically ordered comparison pairs.

    Stored column-wise so that UBIPr-scale lists (millions of pairs) stay
    compact; iteration yields Pair tuples.
    """
    sample_id_a: np.ndarray
    sample_id_b: np.ndarray
    genuine: np.ndarray
    protocol_descriptor: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.genuine)

    def __iter__(self) -> Iterator[Pair]:
        for a, b, g in zip(self.sample_id_a, self.sample_id_b, self.genuine):
            yield Pair(str(a), str(b), GENUINE if g else IMPOSTOR)

    @property
    def labels(self) -> np.ndarray:
        return np.where(self.genuine, GENUINE, IMPOSTOR)

    def counts(self) -> Tuple[int, int]:
        """(n_genuine, n_impostor)"""
        n_genuine = int(np.count_nonzero(self.genuine))
        return n_genuine, len(self) - n_genuine

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "sample_id_a": self.sample_id_a.astype(str),
            "sample_id_b": self.sample_id_b.astype(str),
            "label": self.labels,
        }, columns=PAIR_COLUMNS)


def split_subjects(
    m: Manifest,
    fraction: float = 0.5,
    ordering: SubjectOrdering = SubjectOrdering.LEXICOGRAPHIC,
) -> Tuple[Manifest, Manifest]:
    """
    Partition a manifest by subject.

    The first ceil(fraction * S) subjects under the chosen ordering form the
    training half, the rest the evaluation half.

    Returns:
    - (train, eval) manifests
    """
    if not 0.0 < fraction < 1.0:
        raise ProtocolError(f"split fraction must lie in (0, 1), got {fraction}")
    ordering = SubjectOrdering(ordering)

    subjects = m.subjects
    if ordering is SubjectOrdering.LEXICOGRAPHIC:
        subjects = sorted(subjects)

    n_train = math.ceil(fraction * len(subjects))
    if n_train == 0 or n_train == len(subjects):
        raise ProtocolError(
            f"fraction {fraction} over {len(subjects)} subjects leaves one side empty"
        )

    train_subjects = set(subjects[:n_train])
    train = m.select((r for r in m.samples if r.subject_id in train_subjects), suffix="-train")
    evaluation = m.select((r for r in m.samples if r.subject_id not in train_subjects), suffix="-eval")

    logger.info(f"Split {len(subjects)} subjects: {n_train} train ({len(train)} samples), "
                f"{len(subjects) - n_train} eval ({len(evaluation)} samples)")
    return train, evaluation


def _attribute_codes(m: Manifest, records) -> np.ndarray:
    """Integer attribute code per record; -1 marks values the filter never matches."""
    if m.attribute_of_interest is Attribute.EYEGLASSES:
        return np.array([1 if r.eyeglasses else 0 for r in records], dtype=np.int64)
    order = {g: i for i, g in enumerate(Gaze)}
    return np.array([-1 if r.gaze is Gaze.UNKNOWN else order[r.gaze] for r in records], dtype=np.int64)


def generate_pairs(
    m: Manifest,
    attribute_differing_only: bool = False,
    variant: Optional[Variant] = None,
) -> PairList:
    """
    All-against-all unordered pairs of a manifest.

    Pairs are labelled genuine when both samples share a class (subject and
    eye side). With attribute_differing_only, only pairs whose attribute of
    interest differs are kept; a gaze of "unknown" never counts as different.

    Parameters:
    - m: manifest to enumerate
    - attribute_differing_only: keep only attribute-differing pairs
    - variant: restrict to one variant (all records when None)

    Returns:
    - PairList with sample_id_a < sample_id_b, in lexicographic row-major order
    """
    records = list(m.samples) if variant is None else [r for r in m.samples if r.variant is Variant(variant)]
    if len(records) < 2:
        raise ProtocolError(f"need at least 2 samples to build pairs, got {len(records)}")

    records.sort(key=lambda r: r.sample_id)
    ids = np.array([r.sample_id for r in records], dtype=object)
    classes = np.array([r.class_id for r in records], dtype=object)

    ia, ib = np.triu_indices(len(records), k=1)
    genuine = classes[ia] == classes[ib]

    if attribute_differing_only:
        codes = _attribute_codes(m, records)
        keep = (codes[ia] != codes[ib]) & (codes[ia] >= 0) & (codes[ib] >= 0)
        ia, ib, genuine = ia[keep], ib[keep], genuine[keep]

    pairs = PairList(
        sample_id_a=ids[ia],
        sample_id_b=ids[ib],
        genuine=np.asarray(genuine, dtype=bool),
        protocol_descriptor={
            "dataset": m.dataset_name,
            "attribute": m.attribute_of_interest.value,
            "attribute_differing_only": bool(attribute_differing_only),
            "variant": None if variant is None else Variant(variant).value,
            "n_samples": len(records),
        },
    )
    n_genuine, n_impostor = pairs.counts()
    logger.info(f"Generated {len(pairs)} pairs ({n_genuine} genuine, {n_impostor} impostor)")
    return pairs


def save_pairs(pairs: PairList, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pairs.to_frame().to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    return path


def load_pairs(path) -> PairList:
    """Read a pair list CSV written by save_pairs."""
    df = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    if list(df.columns) != PAIR_COLUMNS:
        raise ManifestError(f"pair file header must be {','.join(PAIR_COLUMNS)}")
    bad = ~df["label"].isin([GENUINE, IMPOSTOR])
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0]) + 1
        raise ManifestError(f"label must be genuine or impostor, got '{df['label'].iloc[row - 1]}'", row=row)
    return PairList(
        sample_id_a=df["sample_id_a"].to_numpy(dtype=object),
        sample_id_b=df["sample_id_b"].to_numpy(dtype=object),
        genuine=(df["label"] == GENUINE).to_numpy(),
        protocol_descriptor={"source": str(path)},
    )

"""
Data module: manifest ingestion, subject splits and pair generation.
"""

from .manifest import (
    Attribute,
    Gaze,
    IrisBox,
    Manifest,
    ManifestError,
    SampleRecord,
    Variant,
    load_manifest,
    save_manifest,
)
from .protocol import (
    GENUINE,
    IMPOSTOR,
    Pair,
    PairList,
    ProtocolError,
    SubjectOrdering,
    generate_pairs,
    load_pairs,
    save_pairs,
    split_subjects,
)

__all__ = [
    "Attribute",
    "Gaze",
    "IrisBox",
    "Manifest",
    "ManifestError",
    "SampleRecord",
    "Variant",
    "load_manifest",
    "save_manifest",
    "GENUINE",
    "IMPOSTOR",
    "Pair",
    "PairList",
    "ProtocolError",
    "SubjectOrdering",
    "generate_pairs",
    "load_pairs",
    "save_pairs",
    "split_subjects",
]

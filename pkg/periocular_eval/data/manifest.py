"""
Manifest records and CSV ingestion.

A manifest lists one labeled periocular image per row. Rows are validated
eagerly so that every later stage can trust the records it receives.
"""

import csv
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

import pandas as pd

logger = logging.getLogger(__name__)

MANIFEST_COLUMNS = [
    "sample_id", "subject_id", "eye", "session", "eyeglasses", "gaze",
    "image_path", "variant", "iris_x", "iris_y", "iris_w", "iris_h",
]

EYE_SIDES = ("left", "right")


class ManifestError(ValueError):
    """Raised when a manifest row or the manifest as a whole is invalid."""

    def __init__(self, message: str, row: Optional[int] = None, sample_id: Optional[str] = None):
        self.row = row
        self.sample_id = sample_id
        prefix = ""
        if row is not None:
            prefix = f"row {row}"
            if sample_id:
                prefix += f" ({sample_id})"
            prefix += ": "
        super().__init__(prefix + message)


class Gaze(Enum):
    FRONTAL = "frontal"
    LEFT = "left"
    RIGHT = "right"
    UP = "up"
    UNKNOWN = "unknown"


class Variant(Enum):
    ORIGINAL = "original"
    NORMALIZED = "normalized"


class Attribute(Enum):
    """Nuisance attribute that the pair filter compares."""
    EYEGLASSES = "eyeglasses"
    GAZE = "gaze"


@dataclass(frozen=True)
class IrisBox:
    """Axis-aligned iris bounding box in pixels."""
    x: float
    y: float
    w: float
    h: float

    @property
    def center(self) -> Tuple[float, float]:
        """Centre as (x, y); pixel i sits at coordinate i."""
        return (self.x + (self.w - 1) / 2.0, self.y + (self.h - 1) / 2.0)


@dataclass(frozen=True)
class SampleRecord:
    """One labeled periocular image."""
    sample_id: str
    subject_id: str
    eye: str
    session: int
    eyeglasses: bool
    gaze: Gaze
    image_path: Path
    variant: Variant = Variant.ORIGINAL
    iris_box: Optional[IrisBox] = None

    @property
    def class_id(self) -> str:
        return f"{self.subject_id}_{self.eye}"

    def attribute_value(self, attribute: Attribute):
        if attribute is Attribute.EYEGLASSES:
            return self.eyeglasses
        return self.gaze


@dataclass
class Manifest:
    """An ordered, validated collection of sample records."""
    dataset_name: str
    samples: List[SampleRecord]
    attribute_of_interest: Attribute = Attribute.EYEGLASSES
    _index: Dict[str, SampleRecord] = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.samples:
            raise ManifestError(f"manifest '{self.dataset_name}' is empty")
        for record in self.samples:
            if record.sample_id in self._index:
                raise ManifestError(f"duplicate sample_id '{record.sample_id}'", sample_id=record.sample_id)
            self._index[record.sample_id] = record

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __contains__(self, sample_id: str) -> bool:
        return sample_id in self._index

    def get(self, sample_id: str) -> SampleRecord:
        try:
            return self._index[sample_id]
        except KeyError:
            raise KeyError(f"unknown sample_id '{sample_id}'") from None

    @property
    def subjects(self) -> List[str]:
        """Subject ids in first-appearance order."""
        return list(dict.fromkeys(record.subject_id for record in self.samples))

    @property
    def classes(self) -> List[str]:
        return list(dict.fromkeys(record.class_id for record in self.samples))

    def select(self, records: Iterable[SampleRecord], suffix: str = "") -> "Manifest":
        """Build a sub-manifest keeping this manifest's name and attribute."""
        return Manifest(
            dataset_name=self.dataset_name + suffix,
            samples=list(records),
            attribute_of_interest=self.attribute_of_interest,
        )

    def with_variant(self, variant: Variant) -> "Manifest":
        return self.select((r for r in self.samples if r.variant is variant), suffix="")

    def check_paths(self) -> None:
        """Raise on the first image path that does not resolve to a file."""
        for row, record in enumerate(self.samples, start=1):
            if not record.image_path.is_file():
                raise ManifestError(
                    f"image path '{record.image_path}' does not exist",
                    row=row, sample_id=record.sample_id,
                )


def _parse_flag(value: str, row: int, sample_id: str) -> bool:
    if value == "0":
        return False
    if value == "1":
        return True
    raise ManifestError(f"eyeglasses must be 0 or 1, got '{value}'", row=row, sample_id=sample_id)


def _parse_enum(enum_cls, value: str, column: str, row: int, sample_id: str):
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(member.value for member in enum_cls)
        raise ManifestError(f"{column} must be one of {{{allowed}}}, got '{value}'", row=row, sample_id=sample_id) from None


def _parse_iris(values: List[str], row: int, sample_id: str) -> Optional[IrisBox]:
    if all(v == "" for v in values):
        return None
    if any(v == "" for v in values):
        raise ManifestError("iris_x, iris_y, iris_w, iris_h must be all set or all empty", row=row, sample_id=sample_id)
    try:
        x, y, w, h = (float(v) for v in values)
    except ValueError:
        raise ManifestError(f"iris box values must be numeric, got {values}", row=row, sample_id=sample_id) from None
    if w <= 0 or h <= 0:
        raise ManifestError("iris box width and height must be positive", row=row, sample_id=sample_id)
    return IrisBox(x, y, w, h)


def parse_row(values: Dict[str, str], row: int, base_dir: Path) -> SampleRecord:
    """
    Convert one raw CSV row into a SampleRecord.

    Parameters:
    - values: column name -> raw string
    - row: 1-based data row number used in error messages
    - base_dir: directory relative image paths are resolved against
    """
    sample_id = values["sample_id"]
    if not sample_id:
        raise ManifestError("sample_id is empty", row=row)
    subject_id = values["subject_id"]
    if not subject_id:
        raise ManifestError("subject_id is empty", row=row, sample_id=sample_id)
    eye = values["eye"]
    if eye not in EYE_SIDES:
        raise ManifestError(f"eye must be left or right, got '{eye}'", row=row, sample_id=sample_id)
    try:
        session = int(values["session"])
    except ValueError:
        raise ManifestError(f"session must be an integer, got '{values['session']}'", row=row, sample_id=sample_id) from None
    if session < 1:
        raise ManifestError(f"session must be >= 1, got {session}", row=row, sample_id=sample_id)

    image_path = Path(values["image_path"])
    if not image_path.is_absolute():
        image_path = base_dir / image_path

    return SampleRecord(
        sample_id=sample_id,
        subject_id=subject_id,
        eye=eye,
        session=session,
        eyeglasses=_parse_flag(values["eyeglasses"], row, sample_id),
        gaze=_parse_enum(Gaze, values["gaze"], "gaze", row, sample_id),
        image_path=image_path,
        variant=_parse_enum(Variant, values["variant"], "variant", row, sample_id),
        iris_box=_parse_iris([values[c] for c in ("iris_x", "iris_y", "iris_w", "iris_h")], row, sample_id),
    )


def _first_long_row(path: Path) -> Optional[int]:
    # 1-based data row number, blank lines skipped as pandas does
    with open(path, "r", newline="", encoding="utf-8") as f:
        rows = (values for values in csv.reader(f) if values)
        next(rows, None)
        for row, values in enumerate(rows, start=1):
            if len(values) > len(MANIFEST_COLUMNS):
                return row
    return None


def _read_rows(path: Path) -> pd.DataFrame:
    bad_lines = []

    def on_bad_line(fields):
        bad_lines.append(fields)
        return None

    df = pd.read_csv(
        path,
        dtype=str,
        keep_default_na=False,
        encoding="utf-8",
        engine="python",
        on_bad_lines=on_bad_line,
        skip_blank_lines=True,
    )
    if bad_lines:
        fields = bad_lines[0]
        raise ManifestError(
            f"expected {len(MANIFEST_COLUMNS)} columns, got {len(fields)}",
            row=_first_long_row(path),
            sample_id=fields[0] if fields else None,
        )
    return df


def load_manifest(
    path,
    dataset_name: Optional[str] = None,
    attribute: Attribute = Attribute.EYEGLASSES,
    check_paths: bool = True,
) -> Manifest:
    """
    Load and validate a manifest CSV.

    Parameters:
    - path: CSV file following the manifest schema
    - dataset_name: name to attach (defaults to the file stem)
    - attribute: nuisance attribute used by the pair filter
    - check_paths: verify that every image path resolves

    Returns:
    - Manifest
    """
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"manifest file '{path}' does not exist")

    df = _read_rows(path)
    if list(df.columns) != MANIFEST_COLUMNS:
        raise ManifestError(f"header must be {','.join(MANIFEST_COLUMNS)}, got {','.join(map(str, df.columns))}")

    records = []
    seen = {}
    for row, values in enumerate(df.to_dict(orient="records"), start=1):
        # Short rows are padded with NaN by pandas even with keep_default_na off.
        if any(not isinstance(values[c], str) for c in MANIFEST_COLUMNS):
            raise ManifestError(
                f"expected {len(MANIFEST_COLUMNS)} columns, got fewer",
                row=row, sample_id=values.get("sample_id") if isinstance(values.get("sample_id"), str) else None,
            )
        record = parse_row(values, row, path.parent.resolve())
        if record.sample_id in seen:
            raise ManifestError(
                f"duplicate sample_id '{record.sample_id}' (first seen at row {seen[record.sample_id]})",
                row=row, sample_id=record.sample_id,
            )
        seen[record.sample_id] = row
        records.append(record)

    manifest = Manifest(
        dataset_name=dataset_name or path.stem,
        samples=records,
        attribute_of_interest=attribute,
    )
    if check_paths:
        manifest.check_paths()

    logger.info(f"Loaded manifest '{manifest.dataset_name}': {len(manifest)} samples, "
                f"{len(manifest.subjects)} subjects, {len(manifest.classes)} classes")
    return manifest


def _format_coord(box: Optional[IrisBox], attr: str) -> str:
    if box is None:
        return ""
    value = float(getattr(box, attr))
    return str(int(value)) if value.is_integer() else repr(value)


def manifest_to_frame(manifest: Manifest) -> pd.DataFrame:
    rows = []
    for record in manifest.samples:
        box = record.iris_box
        rows.append({
            "sample_id": record.sample_id,
            "subject_id": record.subject_id,
            "eye": record.eye,
            "session": str(record.session),
            "eyeglasses": "1" if record.eyeglasses else "0",
            "gaze": record.gaze.value,
            "image_path": str(record.image_path),
            "variant": record.variant.value,
            "iris_x": _format_coord(box, "x"),
            "iris_y": _format_coord(box, "y"),
            "iris_w": _format_coord(box, "w"),
            "iris_h": _format_coord(box, "h"),
        })
    return pd.DataFrame(rows, columns=MANIFEST_COLUMNS)


def save_manifest(manifest: Manifest, path) -> Path:
    """Write a manifest back to the CSV schema."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    manifest_to_frame(manifest).to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    return path


def as_normalized(record: SampleRecord, image_path: Path) -> SampleRecord:
    """The normalized twin of an original record, pairable by sample_id."""
    return replace(record, image_path=Path(image_path), variant=Variant.NORMALIZED)

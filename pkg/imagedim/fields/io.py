"""FieldSample export: CSV of grid coordinates and values plus a JSON metadata block."""

import csv
import json
from pathlib import Path
from typing import Union

from imagedim.fields.specs import FieldSample

PathLike = Union[str, Path]


def export_field_csv(sample: FieldSample, path: PathLike) -> Path:
    """Columns t1..tN, X1..Xd."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    points = sample.grid.points()
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"t{i + 1}" for i in range(sample.grid.N)] + [f"X{i + 1}" for i in range(sample.d)])
        for point, value in zip(points, sample.values):
            writer.writerow([repr(float(c)) for c in point] + [repr(float(v)) for v in value])
    return path


def export_field_metadata(sample: FieldSample, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(sample.metadata(), indent=2, sort_keys=True))
    return path

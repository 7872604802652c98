"""CSV and JSON exchange for measure models and moment curves."""

import csv
import logging
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from imagedim.errors import ConfigError
from imagedim.measures.models import AtomsMeasure, MeasureModel, MomentCurve, measure_adapter

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def format_validation_error(exc: ValidationError) -> str:
    """Dotted schema path of the first offending key, e.g. ``measure.weights``."""
    first = exc.errors()[0]
    return ".".join(str(part) for part in first["loc"])


def load_measure_config(path: PathLike) -> MeasureModel:
    """Read one measure block (``{"kind": ..., ...}``) from a JSON file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"measure config not found: {path}", path=str(path))
    try:
        return measure_adapter.validate_json(path.read_text())
    except ValidationError as exc:
        where = format_validation_error(exc)
        raise ConfigError(f"{path}: invalid measure at '{where}': {exc.errors()[0]['msg']}", path=where) from exc


def dump_measure_config(model: MeasureModel, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model.model_dump_json(indent=2))
    return path


def export_atoms_csv(model: AtomsMeasure, path: PathLike) -> Path:
    """Write one row per atom: x1..xN, mass."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"x{i + 1}" for i in range(model.N)] + ["mass"])
        for point, mass in zip(model.points, model.masses):
            writer.writerow([repr(c) for c in point] + [repr(mass)])
    logger.debug(f"Wrote {len(model.masses)} atoms to {path}")
    return path


def read_atoms_csv(path: PathLike, m: int = 2) -> AtomsMeasure:
    path = Path(path)
    with path.open(newline="") as handle:
        rows = list(csv.reader(handle))
    header, body = rows[0], rows[1:]
    n_coords = len(header) - 1
    points = [tuple(float(c) for c in row[:n_coords]) for row in body]
    masses = [float(row[n_coords]) for row in body]
    return AtomsMeasure(N=n_coords, m=m, points=tuple(points), masses=tuple(masses))


def write_curve_csv(curve: MomentCurve, path: PathLike) -> Path:
    """Columns k, r, value."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["k", "r", "value"])
        for level, scale, value in curve.to_csv_rows():
            writer.writerow([level, repr(scale), repr(value)])
    return path


def read_curve_csv(path: PathLike, q: float, kind: str = "mesh-moment") -> MomentCurve:
    path = Path(path)
    with path.open(newline="") as handle:
        rows = list(csv.DictReader(handle))
    entries = [{"level": int(r["k"]), "scale": float(r["r"]), "value": float(r["value"])} for r in rows]
    return MomentCurve(q=q, kind=kind, entries=entries)

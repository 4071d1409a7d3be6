"""Write field maps and metrics to CSV, PGM and JSON files."""
from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List

from atomicwrites import atomic_write
import numpy as np

from .const import (
    FILE_BER_R,
    FILE_BER_S,
    FILE_FIELD,
    FILE_ILLUMINANCE,
    FILE_SUMMARY,
    FORMAT_CSV,
    FORMAT_JSON,
    FORMAT_PGM,
    PGM_BER_DECADES,
    PGM_BER_FLOOR,
    PGM_ILLUMINANCE_SCALE,
)
from .simulation import FieldMap, Metrics
from .utils import format_float

_LOGGER = logging.getLogger(__name__)

CSV_HEADER = (
    "x",
    "y",
    "illuminance_lx",
    "p_data_w",
    "p_rogue_w",
    "snr_s",
    "snr_r",
    "ber_s",
    "ber_r",
)
_CSV_FIELDS = (
    "illuminance",
    "p_data_opt",
    "p_rogue_opt",
    "snr_s",
    "snr_r",
    "ber_s",
    "ber_r",
)


def _round_half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(values + 0.5)


def ber_gray(ber: np.ndarray) -> np.ndarray:
    """Map BER to gray levels: white at 1e-8 and below, black at BER 1."""
    decades = -np.log10(np.maximum(ber, PGM_BER_FLOOR))
    levels = 255 * np.minimum(decades, PGM_BER_DECADES) / PGM_BER_DECADES
    return _round_half_up(levels).astype(np.uint8)


def illuminance_gray(lux: np.ndarray) -> np.ndarray:
    """Map illuminance linearly to gray, saturating at the scale."""
    levels = 255 * np.minimum(lux / PGM_ILLUMINANCE_SCALE, 1.0)
    return _round_half_up(levels).astype(np.uint8)


def pgm_bytes(gray: np.ndarray, comment: str) -> bytes:
    """Encode a (ny, nx) gray array as binary PGM with the top row at max y."""
    ny, nx = gray.shape
    header = f"P5\n# {comment}\n{nx} {ny}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(gray[::-1], dtype=np.uint8).tobytes()


def csv_rows(field: FieldMap) -> Iterable[List[str]]:
    """Yield field.csv data rows, row-major from the (min x, min y) cell."""
    for j, y in enumerate(field.ys):
        for i, x in enumerate(field.xs):
            yield [format_float(x), format_float(y)] + [
                format_float(getattr(field, name)[j, i]) for name in _CSV_FIELDS
            ]


def summary(
    scene_id: str,
    field: FieldMap,
    metrics: Metrics,
    patch_size: float,
    snr_threshold: float,
    elapsed_seconds: float,
) -> Dict[str, Any]:
    """Return the summary.json document."""
    return {
        "scene_id": scene_id,
        "cell_size": field.cell_size,
        "patch_size": patch_size,
        "ber_threshold": metrics.ber_threshold,
        "snr_threshold": snr_threshold,
        "jammed_fraction": metrics.jammed_fraction,
        "legit_feasible_fraction": metrics.legit_feasible_fraction,
        "rogue_feasible_fraction": metrics.rogue_feasible_fraction,
        "illuminance_min_lx": metrics.illuminance_min,
        "illuminance_mean_lx": metrics.illuminance_mean,
        "illuminance_max_lx": metrics.illuminance_max,
        "illuminance_uniformity": metrics.illuminance_uniformity,
        "cell_count": metrics.cell_count,
        "elapsed_seconds": elapsed_seconds,
    }


def write_csv(path: Path, field: FieldMap) -> None:
    """Write field.csv."""
    with atomic_write(path, overwrite=True, newline="", encoding="utf-8") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(csv_rows(field))


def write_pgm_set(path: Path, field: FieldMap, ber_threshold: float) -> List[Path]:
    """Write the two BER images and the illuminance image into a directory."""
    ber_comment = (
        f"gray = round(255*min(-log10(max(ber,{PGM_BER_FLOOR:g})),"
        f"{PGM_BER_DECADES})/{PGM_BER_DECADES}); white = BER <= {PGM_BER_FLOOR:g}; "
        f"threshold {ber_threshold:g}; top row = max y"
    )
    lux_comment = (
        f"gray = round(255*min(lx/{PGM_ILLUMINANCE_SCALE:g},1)); "
        f"threshold {ber_threshold:g}; top row = max y"
    )
    images = (
        (FILE_BER_S, ber_gray(field.ber_s), ber_comment),
        (FILE_BER_R, ber_gray(field.ber_r), ber_comment),
        (FILE_ILLUMINANCE, illuminance_gray(field.illuminance), lux_comment),
    )

    written = []
    for name, gray, comment in images:
        target = path / name
        with atomic_write(target, mode="wb", overwrite=True) as fp:
            fp.write(pgm_bytes(gray, comment))
        written.append(target)
    return written


def write_json(path: Path, document: Dict[str, Any]) -> None:
    """Write a JSON document."""
    with atomic_write(path, overwrite=True, encoding="utf-8") as fp:
        fp.write(json.dumps(document, indent=2, allow_nan=False) + "\n")


def write_artifacts(
    out_dir: Path,
    formats: Iterable[str],
    field: FieldMap,
    metrics: Metrics,
    summary_doc: Dict[str, Any],
) -> List[Path]:
    """Write the requested artifact formats; return the written paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    formats = set(formats)
    written = []

    if FORMAT_CSV in formats:
        write_csv(out_dir / FILE_FIELD, field)
        written.append(out_dir / FILE_FIELD)
    if FORMAT_PGM in formats:
        written += write_pgm_set(out_dir, field, metrics.ber_threshold)
    if FORMAT_JSON in formats:
        write_json(out_dir / FILE_SUMMARY, summary_doc)
        written.append(out_dir / FILE_SUMMARY)

    _LOGGER.info("Wrote %d files to %s", len(written), out_dir)
    return written

"""Sweep the work plane and reduce SNR/BER fields to area metrics."""
from __future__ import annotations

import asyncio
from concurrent.futures import ThreadPoolExecutor
import logging
import math
import os
import time
from typing import Dict, List, Optional, Sequence, Tuple

import attr
import numpy as np

from .const import (
    DEFAULT_BER_THRESHOLD,
    DEFAULT_CELL_SIZE,
    DEFAULT_PATCH_SIZE,
    LIGHTING_MINIMUM,
)
from .optics import ber_pam, photocurrent, shot_noise_variance, snr_pair
from .propagation import ChannelModel, make_wall_patches, point_channel
from .scene import Scene, Violation, lighting_violation

_LOGGER = logging.getLogger(__name__)

FIELDS = (
    "illuminance",
    "p_data_opt",
    "p_rogue_opt",
    "snr_s",
    "snr_r",
    "ber_s",
    "ber_r",
)


class SimulationError(ValueError):
    """Raised for invalid sweep, metric or convergence parameters."""


@attr.s(frozen=True)
class FieldMap:
    """Per-cell results of a sweep.

    Every field array has shape (ny, nx); row j holds the cells at the j-th
    smallest y.
    """

    origin: Tuple[float, float] = attr.ib()
    cell_size: float = attr.ib()
    nx: int = attr.ib()
    ny: int = attr.ib()
    xs: np.ndarray = attr.ib(eq=False)
    ys: np.ndarray = attr.ib(eq=False)
    illuminance: np.ndarray = attr.ib(eq=False)
    p_data_opt: np.ndarray = attr.ib(eq=False)
    p_rogue_opt: np.ndarray = attr.ib(eq=False)
    snr_s: np.ndarray = attr.ib(eq=False)
    snr_r: np.ndarray = attr.ib(eq=False)
    ber_s: np.ndarray = attr.ib(eq=False)
    ber_r: np.ndarray = attr.ib(eq=False)

    @property
    def cell_count(self) -> int:
        """Return the number of cells."""
        return self.nx * self.ny


@attr.s(frozen=True)
class Metrics:
    """Area fractions and lighting statistics of a field map."""

    ber_threshold: float = attr.ib()
    cell_count: int = attr.ib()
    jammed_fraction: float = attr.ib()
    legit_feasible_fraction: float = attr.ib()
    rogue_feasible_fraction: float = attr.ib()
    illuminance_min: float = attr.ib()
    illuminance_mean: float = attr.ib()
    illuminance_max: float = attr.ib()
    illuminance_uniformity: float = attr.ib()


@attr.s(frozen=True)
class ConvergenceRow:
    """Channel at one wall-mesh resolution."""

    patch_size: float = attr.ib()
    patch_count: int = attr.ib()
    h_data: float = attr.ib()
    h_rogue: float = attr.ib()


@attr.s(frozen=True)
class ConvergenceReport:
    """Refinement table from the coarsest to the finest wall mesh."""

    point: Tuple[float, float] = attr.ib()
    rows: Tuple[ConvergenceRow, ...] = attr.ib(converter=tuple)
    deltas: Tuple[float, ...] = attr.ib(converter=tuple)

    @property
    def max_delta(self) -> float:
        """Return the largest relative change between successive meshes."""
        return max(self.deltas)

    @property
    def last_delta(self) -> float:
        """Return the relative change of the final refinement."""
        return self.deltas[-1]


def cell_centers(length: float, cell_size: float) -> np.ndarray:
    """Return cell center coordinates along one room edge.

    A last cell cut short by the wall is sampled at its own center.
    """
    count = max(1, math.ceil(length / cell_size - 1e-9))
    edges = np.minimum(np.arange(count + 1) * cell_size, length)
    return (edges[:-1] + edges[1:]) / 2


def _check_cell_size(scene: Scene, cell_size: float) -> None:
    room = scene.room
    if not 0 < cell_size <= min(room.width, room.depth):
        raise SimulationError(
            f"cell_size must lie in (0, {min(room.width, room.depth)}], got {cell_size}"
        )


def _sweep_row(model: ChannelModel, xs: np.ndarray, y: float) -> Dict[str, np.ndarray]:
    """Evaluate the links at every cell of one grid row."""
    scene = model.scene
    channel = model.evaluate(xs, np.full(xs.shape, y))

    s_data = photocurrent(channel.p_data_opt, scene.signal, scene.receiver)
    s_rogue = photocurrent(channel.p_rogue_opt, scene.signal, scene.receiver)
    noise = shot_noise_variance(
        channel.p_data_opt + channel.p_rogue_opt, scene.signal, scene.receiver
    )
    snr_s, snr_r = snr_pair(s_data, s_rogue, noise)

    return {
        "illuminance": channel.illuminance,
        "p_data_opt": channel.p_data_opt,
        "p_rogue_opt": channel.p_rogue_opt,
        "snr_s": snr_s,
        "snr_r": snr_r,
        "ber_s": ber_pam(scene.signal.pam_order, snr_s),
        "ber_r": ber_pam(scene.signal.pam_order, snr_r),
    }


async def async_sweep(
    scene: Scene,
    cell_size: float = DEFAULT_CELL_SIZE,
    patch_size: float = DEFAULT_PATCH_SIZE,
    workers: Optional[int] = None,
) -> FieldMap:
    """Sweep the reference plane, one executor job per grid row."""
    _check_cell_size(scene, cell_size)
    if workers is None:
        workers = os.cpu_count() or 1
    if workers < 1:
        raise SimulationError(f"workers must be at least 1, got {workers}")

    start = time.monotonic()
    model = ChannelModel(scene, make_wall_patches(scene.room, patch_size))
    xs = cell_centers(scene.room.width, cell_size)
    ys = cell_centers(scene.room.depth, cell_size)
    _LOGGER.debug(
        "Sweeping %d x %d cells on %d workers", len(xs), len(ys), workers
    )

    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=workers) as executor:
        rows = await asyncio.gather(
            *[loop.run_in_executor(executor, _sweep_row, model, xs, y) for y in ys]
        )

    fields = {name: np.vstack([row[name] for row in rows]) for name in FIELDS}
    _LOGGER.info(
        "Swept %d cells in %.2f s", len(xs) * len(ys), time.monotonic() - start
    )
    return FieldMap(
        origin=(0.0, 0.0),
        cell_size=cell_size,
        nx=len(xs),
        ny=len(ys),
        xs=xs,
        ys=ys,
        **fields,
    )


def sweep(
    scene: Scene,
    cell_size: float = DEFAULT_CELL_SIZE,
    patch_size: float = DEFAULT_PATCH_SIZE,
    workers: Optional[int] = None,
) -> FieldMap:
    """Run async_sweep to completion."""
    return asyncio.run(async_sweep(scene, cell_size, patch_size, workers))


def metrics(field: FieldMap, ber_threshold: float = DEFAULT_BER_THRESHOLD) -> Metrics:
    """Reduce a field map to area fractions at a BER threshold."""
    if not 0 < ber_threshold < 0.5:
        raise SimulationError(
            f"ber_threshold must lie in (0, 0.5), got {ber_threshold}"
        )

    total = field.cell_count
    jammed = int(np.count_nonzero(field.ber_s > ber_threshold))
    rogue = int(np.count_nonzero(field.ber_r <= ber_threshold))
    lux = field.illuminance
    mean = float(lux.mean())

    return Metrics(
        ber_threshold=ber_threshold,
        cell_count=total,
        jammed_fraction=jammed / total,
        legit_feasible_fraction=(total - jammed) / total,
        rogue_feasible_fraction=rogue / total,
        illuminance_min=float(lux.min()),
        illuminance_mean=mean,
        illuminance_max=float(lux.max()),
        illuminance_uniformity=float(lux.min()) / mean if mean > 0 else 0.0,
    )


def convergence_report(
    scene: Scene, point: Tuple[float, float], patch_sizes: Sequence[float]
) -> ConvergenceReport:
    """Evaluate the channel at one point over a ladder of wall meshes."""
    sizes = sorted(set(patch_sizes), reverse=True)
    if len(sizes) < 2:
        raise SimulationError("convergence needs at least two distinct patch sizes")

    rows: List[ConvergenceRow] = []
    for size in sizes:
        patches = make_wall_patches(scene.room, size)
        channel = point_channel(scene, point, patches)
        rows.append(ConvergenceRow(size, len(patches), channel.h_data, channel.h_rogue))
        _LOGGER.debug(
            "Patch %.4f m: h_data=%g h_rogue=%g", size, channel.h_data, channel.h_rogue
        )

    deltas = []
    for coarse, fine in zip(rows, rows[1:]):
        delta = 0.0
        for name in ("h_data", "h_rogue"):
            reference = getattr(fine, name)
            if reference > 0:
                delta = max(delta, abs(getattr(coarse, name) - reference) / reference)
        deltas.append(delta)

    return ConvergenceReport(point, rows, deltas)


def check_lighting(
    scene: Scene,
    patch_size: float = DEFAULT_PATCH_SIZE,
    cell_size: float = DEFAULT_CELL_SIZE,
) -> List[Violation]:
    """Warn when the mean work-plane illuminance is below the office minimum.

    Cell and patch sizes larger than the room are shrunk to fit it.
    """
    room = scene.room
    cell_size = min(cell_size, room.width, room.depth)
    patch_size = min(patch_size, room.width, room.depth, room.height)
    _check_cell_size(scene, cell_size)
    model = ChannelModel(scene, make_wall_patches(room, patch_size))
    xs = cell_centers(room.width, cell_size)
    ys = cell_centers(room.depth, cell_size)
    rows = [model.evaluate(xs, np.full(xs.shape, y)).illuminance for y in ys]
    mean = float(np.mean(rows))

    violation = lighting_violation(mean, LIGHTING_MINIMUM)
    if violation is None:
        return []
    _LOGGER.warning("Lighting check: %s", violation)
    return [violation]

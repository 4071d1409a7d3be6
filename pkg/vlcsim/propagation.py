"""Direct and first-reflection channel gains from every LED to the work plane."""
from __future__ import annotations

import logging
import math
from typing import List, Optional, Sequence, Tuple

import attr
import numpy as np

from .const import DEFAULT_PATCH_SIZE, ROLE_DARK, ROLE_LEGITIMATE, ROLE_ROGUE
from .optics import (
    HALF_PI,
    EmitterProfile,
    NumberOrArray,
    ReceiverSpec,
    los_gain,
    radiant_intensity,
    reflection_receiver_factor,
    reflection_source_factor,
)
from .scene import Luminaire, Room, Scene, led_positions

_LOGGER = logging.getLogger(__name__)

_SIGNAL_ROLES = (ROLE_LEGITIMATE, ROLE_ROGUE)

Vector = Tuple[float, float, float]

DOWN = (0.0, 0.0, -1.0)
UP = (0.0, 0.0, 1.0)

# Unit-area, unit-gain, full-hemisphere detector: turns receiver factors into
# plain photometric transfer.
_PHOTOMETER = ReceiverSpec(area=1.0, fov=90.0, gain=1.0, responsivity=1.0)


class GeometryError(ValueError):
    """Raised for degenerate rays, bad meshes or points outside the room."""


@attr.s(frozen=True)
class WallPatch:
    """A square-ish reflecting element of one of the four walls."""

    center: Vector = attr.ib()
    normal: Vector = attr.ib()
    area: float = attr.ib()


@attr.s(frozen=True)
class RayGeometry:
    """Angles and distances of a direct or once-reflected ray."""

    theta: float = attr.ib()
    psi: float = attr.ib()
    d: Optional[float] = attr.ib(default=None)
    alpha: Optional[float] = attr.ib(default=None)
    beta: Optional[float] = attr.ib(default=None)
    d1: Optional[float] = attr.ib(default=None)
    d2: Optional[float] = attr.ib(default=None)

    @property
    def visible(self) -> bool:
        """Return True if every leg leaves and enters through the front side."""
        angles = [self.theta, self.psi, self.alpha, self.beta]
        return all(angle <= HALF_PI for angle in angles if angle is not None)


@attr.s(frozen=True)
class PointChannel:
    """Channel at receiver position(s), split by transmitter role.

    Fields are floats for a single point and arrays for a batch.
    """

    h_data: NumberOrArray = attr.ib()
    h_rogue: NumberOrArray = attr.ib()
    p_data_opt: NumberOrArray = attr.ib()
    p_rogue_opt: NumberOrArray = attr.ib()
    illuminance: NumberOrArray = attr.ib()


def _tile_count(length: float, size: float) -> int:
    return max(1, math.ceil(length / size - 1e-9))


def make_wall_patches(room: Room, patch_size: float) -> List[WallPatch]:
    """Tile the four walls with patches no larger than patch_size."""
    if not 0 < patch_size <= min(room.width, room.depth, room.height):
        raise GeometryError(
            f"patch_size must lie in (0, {min(room.width, room.depth, room.height)}], "
            f"got {patch_size}"
        )

    # (start corner, direction along the floor, inward normal, length)
    walls = (
        ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0, 0.0), room.width),
        ((0.0, room.depth), (1.0, 0.0), (0.0, -1.0, 0.0), room.width),
        ((0.0, 0.0), (0.0, 1.0), (1.0, 0.0, 0.0), room.depth),
        ((room.width, 0.0), (0.0, 1.0), (-1.0, 0.0, 0.0), room.depth),
    )
    rows = _tile_count(room.height, patch_size)
    step_z = room.height / rows

    patches = []
    for (start_x, start_y), (dir_x, dir_y), normal, length in walls:
        cols = _tile_count(length, patch_size)
        step = length / cols
        area = step * step_z
        for col in range(cols):
            along = (col + 0.5) * step
            for row in range(rows):
                center = (
                    start_x + dir_x * along,
                    start_y + dir_y * along,
                    (row + 0.5) * step_z,
                )
                patches.append(WallPatch(center, normal, area))

    _LOGGER.debug("Tiled walls into %d patches of %.3f m", len(patches), patch_size)
    return patches


def _angle(cosine: float) -> float:
    return math.acos(min(1.0, max(-1.0, cosine)))


def ray_geometry(
    source: Vector,
    target: Vector,
    source_axis: Vector = DOWN,
    target_axis: Vector = UP,
) -> RayGeometry:
    """Return the direct-ray angles between an LED and a receiver."""
    ray = np.subtract(target, source, dtype=float)
    distance = float(np.linalg.norm(ray))
    if distance == 0:
        raise GeometryError("zero-length ray")

    theta = _angle(float(np.dot(source_axis, ray)) / distance)
    psi = _angle(float(np.dot(target_axis, -ray)) / distance)
    return RayGeometry(theta=theta, psi=psi, d=distance)


def reflection_geometry(
    source: Vector,
    patch: WallPatch,
    target: Vector,
    source_axis: Vector = DOWN,
    target_axis: Vector = UP,
) -> RayGeometry:
    """Return the angles of an LED -> wall patch -> receiver path."""
    to_patch = np.subtract(patch.center, source, dtype=float)
    to_target = np.subtract(target, patch.center, dtype=float)
    d1 = float(np.linalg.norm(to_patch))
    d2 = float(np.linalg.norm(to_target))
    if d1 == 0 or d2 == 0:
        raise GeometryError("zero-length ray")

    return RayGeometry(
        theta=_angle(float(np.dot(source_axis, to_patch)) / d1),
        psi=_angle(float(np.dot(target_axis, -to_target)) / d2),
        alpha=_angle(float(np.dot(patch.normal, -to_patch)) / d1),
        beta=_angle(float(np.dot(patch.normal, to_target)) / d2),
        d1=d1,
        d2=d2,
    )


def _front_angle(cosine: np.ndarray) -> np.ndarray:
    """Angle for a cosine, folding back-facing rays onto grazing incidence."""
    return np.arccos(np.clip(cosine, 0.0, 1.0))


@attr.s(frozen=True)
class _LedGroup:
    """All LEDs of one luminaire."""

    role: str = attr.ib()
    profile: EmitterProfile = attr.ib()
    photometric: EmitterProfile = attr.ib()
    positions: np.ndarray = attr.ib(eq=False)


class ChannelModel:
    """Channel precomputation for one scene and wall mesh.

    The irradiance each wall patch receives from every LED does not depend on
    the receiver position, so it is summed once per role here. Evaluating a
    point then costs one pass over the LEDs and one over the patches.
    Instances are not modified after construction and may be shared between
    threads.
    """

    def __init__(self, scene: Scene, patches: Sequence[WallPatch]):
        """Initialize the channel model."""
        self.scene = scene
        self._groups = [self._make_group(lum) for lum in scene.luminaires]

        self._centers = np.array([patch.center for patch in patches], dtype=float)
        self._normals = np.array([patch.normal for patch in patches], dtype=float)
        self._areas = np.array([patch.area for patch in patches], dtype=float)
        self._centers = self._centers.reshape(-1, 3)
        self._normals = self._normals.reshape(-1, 3)

        count = len(patches)
        # Per patch: summed source factor (per watt), LED-power weighted sum,
        # and photometric irradiance in lx.
        self._patch_gain = {role: np.zeros(count) for role in _SIGNAL_ROLES}
        self._patch_power = {role: np.zeros(count) for role in _SIGNAL_ROLES}
        self._patch_lux = np.zeros(count)
        self._reflecting = count > 0 and scene.room.reflectivity > 0

        if self._reflecting:
            for group in self._groups:
                self._irradiate_patches(group)

        _LOGGER.debug(
            "Channel model ready: %d luminaires, %d LEDs, %d wall patches",
            len(self._groups),
            sum(len(group.positions) for group in self._groups),
            count,
        )

    def _make_group(self, lum: Luminaire) -> _LedGroup:
        profile = self.scene.emitter_profile(lum.kind)
        photometric = attr.evolve(profile, power_per_led=lum.kind.flux_per_led)
        return _LedGroup(lum.role, profile, photometric, led_positions(lum))

    def _irradiate_patches(self, group: _LedGroup) -> None:
        to_patch = self._centers[None, :, :] - group.positions[:, None, :]
        d1 = np.linalg.norm(to_patch, axis=2)
        d1 = np.where(d1 > 0, d1, 1.0)
        theta = _front_angle(-to_patch[..., 2] / d1)
        alpha = _front_angle(-np.einsum("spk,pk->sp", to_patch, self._normals) / d1)

        factor = reflection_source_factor(theta, alpha, d1, group.profile)
        self._patch_lux += group.photometric.power_per_led * factor.sum(axis=0)
        if group.role == ROLE_DARK:
            return
        self._patch_gain[group.role] += factor.sum(axis=0)
        self._patch_power[group.role] += (
            group.profile.power_per_led * factor.sum(axis=0)
        )

    def evaluate(self, xs: np.ndarray, ys: np.ndarray) -> PointChannel:
        """Evaluate the channel at a batch of reference-plane points."""
        room = self.scene.room
        xs = np.asarray(xs, dtype=float).ravel()
        ys = np.asarray(ys, dtype=float).ravel()
        if not np.all((xs >= 0) & (xs <= room.width) & (ys >= 0) & (ys <= room.depth)):
            raise GeometryError("receiver point lies outside the room footprint")

        plane = np.full(xs.shape, room.reference_plane_height)
        points = np.column_stack([xs, ys, plane])
        gain = {role: np.zeros(len(xs)) for role in _SIGNAL_ROLES}
        power = {role: np.zeros(len(xs)) for role in _SIGNAL_ROLES}
        lux = np.zeros(len(xs))

        receiver = self.scene.receiver
        for group in self._groups:
            to_source = group.positions[None, :, :] - points[:, None, :]
            distance = np.linalg.norm(to_source, axis=2)
            # LED axis points down and receiver axis up, so both cosines
            # are the height drop over the distance.
            cosine = np.clip(to_source[..., 2] / distance, 0.0, 1.0)
            angle = np.arccos(cosine)

            lux += (
                radiant_intensity(group.photometric, angle) * cosine / distance**2
            ).sum(axis=1)
            if group.role == ROLE_DARK:
                continue
            direct = los_gain(angle, angle, distance, group.profile, receiver)
            direct = direct.sum(axis=1)
            gain[group.role] += direct
            power[group.role] += group.profile.power_per_led * direct

        if self._reflecting:
            to_point = points[:, None, :] - self._centers[None, :, :]
            d2 = np.linalg.norm(to_point, axis=2)
            cos_beta = np.einsum("npk,pk->np", to_point, self._normals) / np.where(
                d2 > 0, d2, 1.0
            )
            cos_psi = -to_point[..., 2] / np.where(d2 > 0, d2, 1.0)
            visible = (cos_beta > 0) & (cos_psi > 0)
            d2 = np.where(visible, d2, 1.0)
            beta = _front_angle(np.where(visible, cos_beta, 0.0))
            psi = _front_angle(np.where(visible, cos_psi, 0.0))

            reflectivity = room.reflectivity
            factor = reflection_receiver_factor(
                beta, psi, d2, self._areas, reflectivity, receiver
            )
            for role in _SIGNAL_ROLES:
                gain[role] += factor @ self._patch_gain[role]
                power[role] += factor @ self._patch_power[role]
            lux += (
                reflection_receiver_factor(
                    beta, psi, d2, self._areas, reflectivity, _PHOTOMETER
                )
                @ self._patch_lux
            )

        return PointChannel(
            h_data=gain[ROLE_LEGITIMATE],
            h_rogue=gain[ROLE_ROGUE],
            p_data_opt=power[ROLE_LEGITIMATE],
            p_rogue_opt=power[ROLE_ROGUE],
            illuminance=lux,
        )


def point_channel(
    scene: Scene, point: Tuple[float, float], patches: Sequence[WallPatch]
) -> PointChannel:
    """Return the channel at one reference-plane point."""
    batch = ChannelModel(scene, patches).evaluate([point[0]], [point[1]])
    values = attr.astuple(batch, recurse=False)
    return PointChannel(*(float(value[0]) for value in values))


def illuminance(
    scene: Scene,
    point: Tuple[float, float],
    patches: Optional[Sequence[WallPatch]] = None,
) -> float:
    """Return the work-plane illuminance in lx from every luminaire."""
    if patches is None:
        patches = make_wall_patches(scene.room, DEFAULT_PATCH_SIZE)
    return point_channel(scene, point, patches).illuminance

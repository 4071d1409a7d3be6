"""Rooms, luminaires and receivers, plus the scene file format."""
from __future__ import annotations

import json
import logging
import math
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import attr
import numpy as np

from .const import (
    DEFAULT_LUMINOUS_EFFICACY,
    DEFAULT_REFERENCE_PLANE_HEIGHT,
    DEFAULT_REFLECTIVITY,
    LEVEL_ERROR,
    LEVEL_WARNING,
    ROLE_LEGITIMATE,
    ROLES,
)
from .optics import EmitterProfile, ReceiverSpec, SignalParams
from .utils import is_power_of_two

_LOGGER = logging.getLogger(__name__)


class SceneError(Exception):
    """Base class for scene related errors."""


class SceneParseError(SceneError):
    """Raised when a scene document is not well-formed JSON."""

    def __init__(
        self, message: str, line: Optional[int] = None, column: Optional[int] = None
    ):
        """Initialize a parse error."""
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class SceneSchemaError(SceneError):
    """Raised when a scene document does not follow the schema."""

    def __init__(self, field: str, message: str):
        """Initialize a schema error."""
        super().__init__(f"{field}: {message}")
        self.field = field


class SceneInvalidError(SceneError):
    """Raised when a scene breaks one or more invariants."""

    def __init__(self, violations: List[Violation]):
        """Initialize an invalid scene error."""
        super().__init__("; ".join(str(violation) for violation in violations))
        self.violations = violations


@attr.s(frozen=True)
class Violation:
    """A single broken scene invariant."""

    level: str = attr.ib()
    field: str = attr.ib()
    message: str = attr.ib()

    def __str__(self) -> str:
        """Return a printable violation line."""
        return f"{self.level}: {self.field}: {self.message}"


@attr.s(frozen=True)
class Room:
    """Rectangular room with uniformly reflecting walls."""

    width: float = attr.ib()
    depth: float = attr.ib()
    height: float = attr.ib()
    reflectivity: float = attr.ib(default=DEFAULT_REFLECTIVITY)
    reference_plane_height: float = attr.ib(default=DEFAULT_REFERENCE_PLANE_HEIGHT)

    def contains(self, x: float, y: float) -> bool:
        """Return True if (x, y) lies on the room footprint."""
        return 0 <= x <= self.width and 0 <= y <= self.depth


@attr.s(frozen=True)
class LuminaireType:
    """A luminaire model: an LED grid on a square panel."""

    name: str = attr.ib()
    panel_width: float = attr.ib()
    panel_depth: float = attr.ib()
    led_rows: int = attr.ib()
    led_cols: int = attr.ib()
    led_spacing: float = attr.ib()
    luminous_flux: float = attr.ib()
    semi_angle: float = attr.ib()

    @property
    def led_count(self) -> int:
        """Return the number of LEDs on the panel."""
        return self.led_rows * self.led_cols

    @property
    def flux_per_led(self) -> float:
        """Return the luminous flux of one LED in lm."""
        return self.luminous_flux / self.led_count


@attr.s(frozen=True)
class Luminaire:
    """A placed luminaire with its role in the attack scenario."""

    x: float = attr.ib()
    y: float = attr.ib()
    mount_height: float = attr.ib()
    kind: LuminaireType = attr.ib()
    role: str = attr.ib(default=ROLE_LEGITIMATE)

    @property
    def center(self) -> Tuple[float, float]:
        """Return the (x, y) center on the mounting plane."""
        return (self.x, self.y)


@attr.s(frozen=True)
class Scene:
    """Unit of simulation input."""

    room: Room = attr.ib()
    luminaire_types: Tuple[LuminaireType, ...] = attr.ib(converter=tuple)
    luminaires: Tuple[Luminaire, ...] = attr.ib(converter=tuple)
    receiver: ReceiverSpec = attr.ib(factory=ReceiverSpec)
    signal: SignalParams = attr.ib(factory=SignalParams)
    luminous_efficacy: float = attr.ib(default=DEFAULT_LUMINOUS_EFFICACY)

    def luminaire_type(self, name: str) -> LuminaireType:
        """Return the luminaire type with the given name."""
        for kind in self.luminaire_types:
            if kind.name == name:
                return kind
        raise KeyError(name)

    def emitter_profile(self, kind: LuminaireType) -> EmitterProfile:
        """Return the per-LED emission law of a luminaire type."""
        power = kind.luminous_flux / self.luminous_efficacy / kind.led_count
        return EmitterProfile.from_semi_angle(kind.semi_angle, power)

    def luminaires_with_role(self, role: str) -> List[Luminaire]:
        """Return the luminaires carrying the given role."""
        return [lum for lum in self.luminaires if lum.role == role]


def led_positions(lum: Luminaire) -> np.ndarray:
    """Return the (x, y, z) position of every LED of a luminaire, row-major."""
    kind = lum.kind
    cols = (np.arange(kind.led_cols) - (kind.led_cols - 1) / 2) * kind.led_spacing
    rows = (np.arange(kind.led_rows) - (kind.led_rows - 1) / 2) * kind.led_spacing
    grid_y, grid_x = np.meshgrid(rows, cols, indexing="ij")
    positions = np.empty((kind.led_count, 3))
    positions[:, 0] = lum.x + grid_x.ravel()
    positions[:, 1] = lum.y + grid_y.ravel()
    positions[:, 2] = lum.mount_height
    return positions


def total_led_count(scene: Scene) -> int:
    """Return the number of LEDs in the scene."""
    return sum(lum.kind.led_count for lum in scene.luminaires)


def with_semi_angle(scene: Scene, type_name: str, semi_angle: float) -> Scene:
    """Return a copy of the scene with one luminaire type re-aimed.

    The transmitted power of every LED stays the same.
    """
    try:
        old = scene.luminaire_type(type_name)
    except KeyError:
        raise SceneSchemaError(
            "luminaire_types", f"unknown luminaire type {type_name!r}"
        ) from None

    new = attr.evolve(old, semi_angle=semi_angle)
    return attr.evolve(
        scene,
        luminaire_types=[
            new if kind == old else kind for kind in scene.luminaire_types
        ],
        luminaires=[
            attr.evolve(lum, kind=new) if lum.kind == old else lum
            for lum in scene.luminaires
        ],
    )


def with_roles(scene: Scene, roles: Mapping[int, str]) -> Scene:
    """Return a copy of the scene with some luminaires reassigned."""
    luminaires = list(scene.luminaires)
    for index, role in roles.items():
        if not 0 <= index < len(luminaires):
            raise SceneSchemaError(f"luminaires[{index}]", "no such luminaire")
        if role not in ROLES:
            raise SceneSchemaError(
                f"luminaires[{index}].role", f"unknown role {role!r}"
            )
        luminaires[index] = attr.evolve(luminaires[index], role=role)
    return attr.evolve(scene, luminaires=luminaires)


def _positive(value: Any) -> bool:
    return isinstance(value, (int, float)) and value > 0


def _validate_room(room: Room) -> List[Violation]:
    violations = []
    for name in ("width", "depth", "height"):
        if not _positive(getattr(room, name)):
            violations.append(
                Violation(LEVEL_ERROR, f"room.{name}", "must be positive")
            )
    if not 0 <= room.reflectivity <= 1:
        violations.append(
            Violation(LEVEL_ERROR, "room.reflectivity", "must lie in [0, 1]")
        )
    if not 0 <= room.reference_plane_height < room.height:
        violations.append(
            Violation(
                LEVEL_ERROR,
                "room.reference_plane_height",
                "must lie in [0, room height)",
            )
        )
    return violations


def _validate_receiver(receiver: ReceiverSpec) -> List[Violation]:
    checks = (
        ("area", _positive(receiver.area), "must be positive"),
        ("fov", 0 < receiver.fov <= 90, "must lie in (0, 90] degrees"),
        ("gain", receiver.gain >= 1, "must be at least 1"),
        ("responsivity", _positive(receiver.responsivity), "must be positive"),
    )
    return [
        Violation(LEVEL_ERROR, f"receiver.{name}", message)
        for name, ok, message in checks
        if not ok
    ]


def _validate_signal(signal: SignalParams) -> List[Violation]:
    checks = (
        (
            "pam_order",
            signal.pam_order >= 2 and is_power_of_two(signal.pam_order),
            "must be a power of two >= 2",
        ),
        (
            "modulation_index",
            0 < signal.modulation_index <= 1,
            "must lie in (0, 1]",
        ),
        ("bandwidth", _positive(signal.bandwidth), "must be positive"),
        ("background_current", signal.background_current >= 0, "must be >= 0"),
        ("i2_factor", signal.i2_factor >= 0, "must be >= 0"),
        ("extra_noise_variance", signal.extra_noise_variance >= 0, "must be >= 0"),
    )
    violations = [
        Violation(LEVEL_ERROR, f"signal.{name}", message)
        for name, ok, message in checks
        if not ok
    ]
    if not violations and not signal.noise_floor > 0:
        violations.append(
            Violation(
                LEVEL_ERROR,
                "signal.background_current",
                "noise floor is zero; background current or extra noise must be > 0",
            )
        )
    return violations


def _validate_type(index: int, kind: LuminaireType) -> List[Violation]:
    path = f"luminaire_types[{index}]"
    violations = []
    if not kind.name:
        violations.append(Violation(LEVEL_ERROR, f"{path}.name", "must not be empty"))
    for name in ("panel_width", "panel_depth", "luminous_flux"):
        if not _positive(getattr(kind, name)):
            violations.append(
                Violation(LEVEL_ERROR, f"{path}.{name}", "must be positive")
            )
    if kind.led_rows < 1 or kind.led_cols < 1:
        violations.append(
            Violation(
                LEVEL_ERROR, f"{path}.led_rows", "LED grid must hold at least one LED"
            )
        )
    if not kind.led_spacing >= 0:
        violations.append(Violation(LEVEL_ERROR, f"{path}.led_spacing", "must be >= 0"))
    elif (kind.led_cols - 1) * kind.led_spacing > kind.panel_width or (
        kind.led_rows - 1
    ) * kind.led_spacing > kind.panel_depth:
        violations.append(
            Violation(
                LEVEL_ERROR, f"{path}.led_spacing", "LED grid does not fit the panel"
            )
        )
    if not 0 < kind.semi_angle < 90:
        violations.append(
            Violation(LEVEL_ERROR, f"{path}.semi_angle", "must lie in (0, 90) degrees")
        )
    return violations


def _validate_luminaire(index: int, lum: Luminaire, scene: Scene) -> List[Violation]:
    path = f"luminaires[{index}]"
    room = scene.room
    violations = []
    if lum.kind not in scene.luminaire_types:
        violations.append(
            Violation(
                LEVEL_ERROR,
                f"{path}.type",
                f"unknown luminaire type {lum.kind.name!r}",
            )
        )
    if lum.role not in ROLES:
        violations.append(
            Violation(LEVEL_ERROR, f"{path}.role", f"unknown role {lum.role!r}")
        )
    if not room.contains(lum.x, lum.y):
        violations.append(
            Violation(
                LEVEL_ERROR, f"{path}.x", "luminaire center lies outside the room"
            )
        )
        return violations
    if not room.reference_plane_height < lum.mount_height <= room.height:
        violations.append(
            Violation(
                LEVEL_ERROR,
                f"{path}.mount_height",
                "must lie above the reference plane and not above the ceiling",
            )
        )
    if lum.kind.led_count >= 1:
        positions = led_positions(lum)
        inside = (
            (positions[:, 0] >= 0)
            & (positions[:, 0] <= room.width)
            & (positions[:, 1] >= 0)
            & (positions[:, 1] <= room.depth)
        )
        if not inside.all():
            violations.append(
                Violation(LEVEL_ERROR, f"{path}.x", "some LEDs lie outside the room")
            )
    return violations


def validate(scene: Scene) -> List[Violation]:
    """Return every broken invariant of a scene; empty if the scene is valid."""
    violations = _validate_room(scene.room)
    if not _positive(scene.luminous_efficacy):
        violations.append(
            Violation(LEVEL_ERROR, "luminous_efficacy", "must be positive")
        )

    names = [kind.name for kind in scene.luminaire_types]
    for index, kind in enumerate(scene.luminaire_types):
        violations += _validate_type(index, kind)
        if names.index(kind.name) != index:
            violations.append(
                Violation(
                    LEVEL_ERROR, f"luminaire_types[{index}].name", "duplicate type name"
                )
            )

    # Luminaire checks need a sane room and sane types.
    if not violations:
        for index, lum in enumerate(scene.luminaires):
            violations += _validate_luminaire(index, lum, scene)

    violations += _validate_receiver(scene.receiver)
    violations += _validate_signal(scene.signal)

    if not scene.luminaires_with_role(ROLE_LEGITIMATE):
        violations.append(
            Violation(
                LEVEL_ERROR, "luminaires", "at least one legitimate luminaire required"
            )
        )
    return violations


def has_errors(violations: List[Violation]) -> bool:
    """Return True if any violation is error-level."""
    return any(violation.level == LEVEL_ERROR for violation in violations)


def lighting_violation(mean_illuminance: float, minimum: float) -> Optional[Violation]:
    """Return a warning if the mean work-plane illuminance is too low."""
    if mean_illuminance >= minimum:
        return None
    return Violation(
        LEVEL_WARNING,
        "luminaires",
        f"mean work-plane illuminance {mean_illuminance:.0f} lx "
        f"is below {minimum:.0f} lx",
    )


# --- Scene file format ---

_NUMBER = "number"
_INTEGER = "integer"
_STRING = "string"

# JSON member -> (attribute, kind)
ROOM_SCHEMA = {
    "width": ("width", _NUMBER),
    "depth": ("depth", _NUMBER),
    "height": ("height", _NUMBER),
    "reflectivity": ("reflectivity", _NUMBER),
    "reference_plane_height": ("reference_plane_height", _NUMBER),
}
RECEIVER_SCHEMA = {
    "area_m2": ("area", _NUMBER),
    "fov_deg": ("fov", _NUMBER),
    "gain": ("gain", _NUMBER),
    "responsivity_a_per_w": ("responsivity", _NUMBER),
}
SIGNAL_SCHEMA = {
    "pam_order": ("pam_order", _INTEGER),
    "modulation_index": ("modulation_index", _NUMBER),
    "bandwidth_hz": ("bandwidth", _NUMBER),
    "background_current_a": ("background_current", _NUMBER),
    "i2_factor": ("i2_factor", _NUMBER),
    "extra_noise_variance": ("extra_noise_variance", _NUMBER),
}
LUMINAIRE_TYPE_SCHEMA = {
    "name": ("name", _STRING),
    "panel_w": ("panel_width", _NUMBER),
    "panel_d": ("panel_depth", _NUMBER),
    "led_rows": ("led_rows", _INTEGER),
    "led_cols": ("led_cols", _INTEGER),
    "led_spacing_m": ("led_spacing", _NUMBER),
    "flux_lm": ("luminous_flux", _NUMBER),
    "semi_angle_deg": ("semi_angle", _NUMBER),
}
LUMINAIRE_SCHEMA = {
    "x": ("x", _NUMBER),
    "y": ("y", _NUMBER),
    "mount_height": ("mount_height", _NUMBER),
    "type": ("kind", _STRING),
    "role": ("role", _STRING),
}
TOP_LEVEL_MEMBERS = (
    "room",
    "receiver",
    "signal",
    "luminous_efficacy_lm_per_w",
    "luminaire_types",
    "luminaires",
)


def _check_value(path: str, kind: str, value: Any) -> Union[int, float, str]:
    if kind == _STRING:
        if not isinstance(value, str):
            raise SceneSchemaError(path, "expected a string")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        expected = "an integer" if kind == _INTEGER else "a number"
        raise SceneSchemaError(path, f"expected {expected}")
    if kind == _INTEGER:
        if not isinstance(value, int):
            raise SceneSchemaError(path, "expected an integer")
        return value
    if not math.isfinite(value):
        raise SceneSchemaError(path, "must be finite")
    return float(value)


def _check_members(path: str, data: Any, members) -> None:
    if not isinstance(data, dict):
        raise SceneSchemaError(path, "expected an object")
    for key in data:
        if key not in members:
            raise SceneSchemaError(f"{path}.{key}" if path else key, "unknown field")
    for key in members:
        if key not in data:
            raise SceneSchemaError(f"{path}.{key}" if path else key, "missing field")


def _read_object(
    path: str, data: Any, schema: Dict[str, Tuple[str, str]]
) -> Dict[str, Any]:
    """Check an object against a schema and return attribute keyword arguments."""
    _check_members(path, data, schema)
    return {
        attribute: _check_value(f"{path}.{key}", kind, data[key])
        for key, (attribute, kind) in schema.items()
    }


def _read_list(path: str, data: Any) -> List[Any]:
    if not isinstance(data, list):
        raise SceneSchemaError(path, "expected a list")
    return data


def _reject_constant(name: str) -> None:
    raise SceneParseError(f"{name} is not a permitted number")


def load_scene(document: Union[bytes, str], check: bool = True) -> Scene:
    """Parse a scene document.

    With check, raise SceneInvalidError if any error-level invariant breaks.
    """
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as err:
            raise SceneParseError(f"document is not UTF-8: {err}") from err

    try:
        data = json.loads(document, parse_constant=_reject_constant)
    except json.JSONDecodeError as err:
        raise SceneParseError(err.msg, err.lineno, err.colno) from err

    _check_members("", data, TOP_LEVEL_MEMBERS)

    types = [
        LuminaireType(
            **_read_object(f"luminaire_types[{index}]", item, LUMINAIRE_TYPE_SCHEMA)
        )
        for index, item in enumerate(
            _read_list("luminaire_types", data["luminaire_types"])
        )
    ]
    types_by_name = {kind.name: kind for kind in types}

    luminaires = []
    unresolved = []
    for index, item in enumerate(_read_list("luminaires", data["luminaires"])):
        kwargs = _read_object(f"luminaires[{index}]", item, LUMINAIRE_SCHEMA)
        kind = types_by_name.get(kwargs["kind"])
        if kind is None:
            unresolved.append(
                Violation(
                    LEVEL_ERROR,
                    f"luminaires[{index}].type",
                    f"unknown luminaire type {kwargs['kind']!r}",
                )
            )
            continue
        kwargs["kind"] = kind
        luminaires.append(Luminaire(**kwargs))

    if unresolved:
        raise SceneInvalidError(unresolved)

    scene = Scene(
        room=Room(**_read_object("room", data["room"], ROOM_SCHEMA)),
        luminaire_types=types,
        luminaires=luminaires,
        receiver=ReceiverSpec(
            **_read_object("receiver", data["receiver"], RECEIVER_SCHEMA)
        ),
        signal=SignalParams(**_read_object("signal", data["signal"], SIGNAL_SCHEMA)),
        luminous_efficacy=_check_value(
            "luminous_efficacy_lm_per_w", _NUMBER, data["luminous_efficacy_lm_per_w"]
        ),
    )
    _LOGGER.debug(
        "Loaded scene with %d luminaire types and %d luminaires",
        len(types),
        len(luminaires),
    )

    if check:
        violations = validate(scene)
        if has_errors(violations):
            raise SceneInvalidError(violations)
    return scene


def _write_object(obj: Any, schema: Dict[str, Tuple[str, str]]) -> Dict[str, Any]:
    return {key: getattr(obj, attribute) for key, (attribute, _) in schema.items()}


def save_scene(scene: Scene) -> bytes:
    """Serialize a scene to its UTF-8 JSON document."""
    luminaires = []
    for lum in scene.luminaires:
        item = _write_object(lum, LUMINAIRE_SCHEMA)
        item["type"] = lum.kind.name
        luminaires.append(item)

    data = {
        "room": _write_object(scene.room, ROOM_SCHEMA),
        "receiver": _write_object(scene.receiver, RECEIVER_SCHEMA),
        "signal": _write_object(scene.signal, SIGNAL_SCHEMA),
        "luminous_efficacy_lm_per_w": scene.luminous_efficacy,
        "luminaire_types": [
            _write_object(kind, LUMINAIRE_TYPE_SCHEMA) for kind in scene.luminaire_types
        ],
        "luminaires": luminaires,
    }
    return (json.dumps(data, indent=2, allow_nan=False) + "\n").encode("utf-8")

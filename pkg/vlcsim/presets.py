"""Shipped office scenes with legitimate and rogue luminaires."""
from __future__ import annotations

from functools import lru_cache
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Tuple

from .const import (
    DEFAULT_REFERENCE_PLANE_HEIGHT,
    DEFAULT_REFLECTIVITY,
    DEFAULT_ROOM_DEPTH,
    DEFAULT_ROOM_HEIGHT,
    DEFAULT_ROOM_WIDTH,
    PRESETS,
    ROLE_LEGITIMATE,
    ROLE_ROGUE,
)
from .scene import (
    LUMINAIRE_TYPE_SCHEMA,
    Luminaire,
    LuminaireType,
    Room,
    Scene,
    SceneError,
    with_semi_angle,
)

_LOGGER = logging.getLogger(__name__)

LAYOUTS_PATH = Path(__file__).parent / "data" / "layouts.json"


class UnknownPreset(SceneError):
    """Raised when a preset name is not shipped."""

    def __init__(self, name: str):
        """Initialize unknown preset error."""
        super().__init__(
            f"Unknown preset {name!r}, choose one of: {', '.join(preset_ids())}"
        )
        self.name = name
        self.valid = preset_ids()


@lru_cache(maxsize=1)
def _load_layouts() -> Dict[str, Any]:
    """Load the preset layout data file."""
    _LOGGER.debug("Loading preset layouts from %s", LAYOUTS_PATH)
    return json.loads(LAYOUTS_PATH.read_text(encoding="utf-8"))


def preset_ids() -> Tuple[str, ...]:
    """Return the shipped preset ids in display order."""
    return tuple(PRESETS)


def preset_description(name: str) -> str:
    """Return the one-line description of a preset."""
    if name not in PRESETS:
        raise UnknownPreset(name)
    return PRESETS[name]


def _luminaire_type(name: str, data: Dict[str, Any]) -> LuminaireType:
    kwargs = {
        attribute: data[key]
        for key, (attribute, _) in LUMINAIRE_TYPE_SCHEMA.items()
        if key != "name"
    }
    return LuminaireType(name=name, **kwargs)


def _group_centers(group: Dict[str, Any]) -> List[Tuple[float, float]]:
    """Return luminaire centers of a grid or circle group, in numbering order."""
    if "grid" in group:
        grid = group["grid"]
        return [(x, y) for y in grid["ys"] for x in grid["xs"]]

    circle = group["circle"]
    center_x, center_y = circle["center"]
    count = circle["count"]
    centers = []
    for index in range(count):
        angle = math.radians(circle["start_deg"] + 360.0 * index / count)
        centers.append(
            (
                round(center_x + circle["radius"] * math.cos(angle), 6),
                round(center_y + circle["radius"] * math.sin(angle), 6),
            )
        )
    return centers


def build_preset(name: str) -> Scene:
    """Build one of the shipped scenes."""
    if name not in PRESETS:
        raise UnknownPreset(name)

    data = _load_layouts()
    preset = data["presets"][name]
    kinds = {
        type_name: _luminaire_type(type_name, type_data)
        for type_name, type_data in data["luminaire_types"].items()
    }
    room = Room(
        DEFAULT_ROOM_WIDTH,
        DEFAULT_ROOM_DEPTH,
        DEFAULT_ROOM_HEIGHT,
        DEFAULT_REFLECTIVITY,
        DEFAULT_REFERENCE_PLANE_HEIGHT,
    )

    luminaires = []
    numbers = {type_name: 0 for type_name in kinds}
    used = []
    for group in data["layouts"][preset["layout"]]:
        kind = kinds[group["type"]]
        if kind not in used:
            used.append(kind)
        rogue_numbers = preset["rogue"].get(kind.name, [])
        for x, y in _group_centers(group):
            numbers[kind.name] += 1
            role = ROLE_LEGITIMATE
            if numbers[kind.name] in rogue_numbers:
                role = ROLE_ROGUE
            luminaires.append(Luminaire(x, y, room.height, kind, role))

    scene = Scene(room=room, luminaire_types=used, luminaires=luminaires)
    for type_name, semi_angle in preset.get("semi_angle_deg", {}).items():
        scene = with_semi_angle(scene, type_name, semi_angle)

    _LOGGER.debug("Built preset %s with %d luminaires", name, len(luminaires))
    return scene

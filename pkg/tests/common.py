"""Scene builders shared by the tests."""
import attr

from vlcsim.const import ROLE_LEGITIMATE, ROLE_ROGUE
from vlcsim.scene import Luminaire, LuminaireType, Room, Scene

# 240 lm at 240 lm/W: one optical watt per LED.
POINT_SOURCE = LuminaireType(
    name="p",
    panel_width=0.01,
    panel_depth=0.01,
    led_rows=1,
    led_cols=1,
    led_spacing=0.0,
    luminous_flux=240.0,
    semi_angle=60.0,
)

TYPE_G = LuminaireType("g", 0.6, 0.6, 6, 6, 0.1, 2000.0, 70.0)

SMALL_LEGIT = LuminaireType("s", 0.3, 0.3, 2, 2, 0.1, 1000.0, 60.0)
SMALL_ROGUE = LuminaireType("r", 0.3, 0.3, 2, 2, 0.1, 600.0, 45.0)


def office_room(reflectivity: float = 0.8) -> Room:
    """Return the 7 x 7 x 2.8 m office with the desk plane at 0.85 m."""
    return Room(7.0, 7.0, 2.8, reflectivity, 0.85)


def single_luminaire_scene(
    kind: LuminaireType = POINT_SOURCE,
    reflectivity: float = 0.0,
    x: float = 3.5,
    y: float = 3.5,
    role: str = ROLE_LEGITIMATE,
) -> Scene:
    """Return the office lit by one ceiling luminaire."""
    room = office_room(reflectivity)
    return Scene(
        room=room,
        luminaire_types=[kind],
        luminaires=[Luminaire(x, y, room.height, kind, role)],
    )


def small_scene(rogue: bool = True, reflectivity: float = 0.8) -> Scene:
    """Return a 4 x 3 m room with one legitimate and optionally one rogue light."""
    room = Room(4.0, 3.0, 2.5, reflectivity, 0.85)
    luminaires = [Luminaire(1.0, 1.5, room.height, SMALL_LEGIT, ROLE_LEGITIMATE)]
    if rogue:
        luminaires.append(Luminaire(3.0, 1.5, room.height, SMALL_ROGUE, ROLE_ROGUE))
    return Scene(
        room=room,
        luminaire_types=[SMALL_LEGIT, SMALL_ROGUE],
        luminaires=luminaires,
    )


def scale_type_flux(scene: Scene, name: str, factor: float) -> Scene:
    """Return a copy of the scene with one luminaire type's flux scaled."""
    old = scene.luminaire_type(name)
    new = attr.evolve(old, luminous_flux=old.luminous_flux * factor)
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

"""Physical-layer attack simulator for visible light communication rooms."""
from .optics import (
    DomainError,
    EmitterProfile,
    OpticsError,
    ReceiverSpec,
    SignalParams,
    ber_pam,
    ber_threshold_snr,
    lambertian_order,
    los_gain,
    q_function,
    radiant_intensity,
    snr_pair,
)
from .presets import UnknownPreset, build_preset, preset_ids
from .propagation import (
    ChannelModel,
    GeometryError,
    PointChannel,
    WallPatch,
    illuminance,
    make_wall_patches,
    point_channel,
)
from .scene import (
    Luminaire,
    LuminaireType,
    Room,
    Scene,
    SceneError,
    load_scene,
    save_scene,
    validate,
)
from .simulation import (
    FieldMap,
    Metrics,
    SimulationError,
    convergence_report,
    metrics,
    sweep,
)

__all__ = [
    "ChannelModel",
    "DomainError",
    "EmitterProfile",
    "FieldMap",
    "GeometryError",
    "Luminaire",
    "LuminaireType",
    "Metrics",
    "OpticsError",
    "PointChannel",
    "ReceiverSpec",
    "Room",
    "Scene",
    "SceneError",
    "SignalParams",
    "SimulationError",
    "UnknownPreset",
    "WallPatch",
    "ber_pam",
    "ber_threshold_snr",
    "build_preset",
    "convergence_report",
    "illuminance",
    "lambertian_order",
    "load_scene",
    "los_gain",
    "make_wall_patches",
    "metrics",
    "point_channel",
    "preset_ids",
    "q_function",
    "radiant_intensity",
    "save_scene",
    "snr_pair",
    "sweep",
    "validate",
]

"""Command line interface."""
from __future__ import annotations

import argparse
import logging
from pathlib import Path
import sys
import time
from typing import List, Optional, Sequence, Tuple

from atomicwrites import atomic_write
import attr

from .artifacts import summary, write_artifacts
from .const import (
    DEFAULT_BER_THRESHOLD,
    DEFAULT_CELL_SIZE,
    DEFAULT_PATCH_SIZE,
    EXIT_INVALID_SCENE,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    FORMATS,
)
from .optics import ber_threshold_snr
from .presets import UnknownPreset, build_preset, preset_description, preset_ids
from .propagation import GeometryError
from .scene import (
    Scene,
    SceneError,
    SceneInvalidError,
    SceneSchemaError,
    has_errors,
    load_scene,
    save_scene,
    validate,
    with_semi_angle,
)
from .simulation import (
    SimulationError,
    check_lighting,
    convergence_report,
    metrics,
    sweep,
)
from .utils import Registry, parse_float_list

_LOGGER = logging.getLogger(__name__)

HANDLERS = Registry()


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser that exits with the usage error code."""

    def error(self, message: str):
        """Print usage and exit."""
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@attr.s(frozen=True)
class RunConfig:
    """Settings of one simulate run."""

    preset: Optional[str] = attr.ib(default=None)
    scene_path: Optional[Path] = attr.ib(default=None)
    cell_size: float = attr.ib(default=DEFAULT_CELL_SIZE)
    patch_size: float = attr.ib(default=DEFAULT_PATCH_SIZE)
    ber_threshold: float = attr.ib(default=DEFAULT_BER_THRESHOLD)
    out_dir: Path = attr.ib(default=Path("."))
    formats: Tuple[str, ...] = attr.ib(default=FORMATS, converter=tuple)
    workers: Optional[int] = attr.ib(default=None)
    semi_angles: Tuple[Tuple[str, float], ...] = attr.ib(default=(), converter=tuple)

    def __attrs_post_init__(self):
        """Check the settings."""
        if (self.preset is None) == (self.scene_path is None):
            raise ValueError("exactly one of preset or scene file is required")
        if not self.formats:
            raise ValueError("at least one output format is required")
        unknown = set(self.formats) - set(FORMATS)
        if unknown:
            raise ValueError(f"unknown formats: {', '.join(sorted(unknown))}")
        if not self.cell_size > 0 or not self.patch_size > 0:
            raise ValueError("cell and patch sizes must be positive")
        if not 0 < self.ber_threshold < 0.5:
            raise ValueError("threshold must lie in (0, 0.5)")
        if self.workers is not None and self.workers < 1:
            raise ValueError("workers must be at least 1")

    @property
    def scene_id(self) -> str:
        """Return the preset name or the scene file stem."""
        return self.preset if self.preset is not None else self.scene_path.stem


class _Exit(Exception):
    """Abort a command with an exit code."""

    def __init__(self, code: int, message: str):
        """Initialize exit."""
        super().__init__(message)
        self.code = code


def _load(preset: Optional[str], scene_path: Optional[Path]) -> Scene:
    """Return a preset or the scene stored in a file."""
    if preset is not None:
        try:
            return build_preset(preset)
        except UnknownPreset as err:
            raise _Exit(EXIT_USAGE, str(err)) from err

    try:
        document = scene_path.read_bytes()
    except OSError as err:
        raise _Exit(EXIT_IO, f"Unable to read {scene_path}: {err}") from err
    try:
        return load_scene(document)
    except SceneError as err:
        raise _Exit(EXIT_INVALID_SCENE, _scene_error_text(scene_path, err)) from err


def _scene_error_text(path: Path, err: SceneError) -> str:
    if isinstance(err, SceneInvalidError):
        lines = [f"{path}: invalid scene"] + [f"  {item}" for item in err.violations]
        return "\n".join(lines)
    return f"{path}: {err}"


def cmd_simulate(config: RunConfig) -> int:
    """Sweep a scene and write the requested artifacts."""
    start = time.monotonic()
    try:
        scene = _load(config.preset, config.scene_path)
        for type_name, semi_angle in config.semi_angles:
            try:
                scene = with_semi_angle(scene, type_name, semi_angle)
            except SceneSchemaError as err:
                raise _Exit(EXIT_USAGE, str(err)) from err
    except _Exit as err:
        return _fail(err)

    violations = validate(scene)
    if has_errors(violations):
        _LOGGER.error("Scene %s is invalid", config.scene_id)
        for violation in violations:
            print(violation, file=sys.stderr)
        return EXIT_INVALID_SCENE

    try:
        field = sweep(scene, config.cell_size, config.patch_size, config.workers)
        result = metrics(field, config.ber_threshold)
    except (SimulationError, GeometryError) as err:
        return _fail(_Exit(EXIT_USAGE, str(err)))

    snr_threshold = ber_threshold_snr(scene.signal.pam_order, config.ber_threshold)
    document = summary(
        config.scene_id,
        field,
        result,
        config.patch_size,
        snr_threshold,
        time.monotonic() - start,
    )
    try:
        write_artifacts(config.out_dir, config.formats, field, result, document)
    except OSError as err:
        return _fail(_Exit(EXIT_IO, f"Unable to write to {config.out_dir}: {err}"))

    print(f"scene {config.scene_id}: {result.cell_count} cells")
    print(f"jammed_fraction {result.jammed_fraction:.4f}")
    print(f"legit_feasible_fraction {result.legit_feasible_fraction:.4f}")
    print(f"rogue_feasible_fraction {result.rogue_feasible_fraction:.4f}")
    print(
        f"illuminance lx min {result.illuminance_min:.1f} "
        f"mean {result.illuminance_mean:.1f} max {result.illuminance_max:.1f}"
    )
    return EXIT_OK


def cmd_presets() -> int:
    """List the shipped presets."""
    for name in preset_ids():
        print(f"{name}\t{preset_description(name)}")
    return EXIT_OK


def cmd_validate(path: Path) -> int:
    """Print the violations of a scene file."""
    try:
        document = path.read_bytes()
    except OSError as err:
        return _fail(_Exit(EXIT_IO, f"Unable to read {path}: {err}"))

    try:
        scene = load_scene(document, check=False)
    except SceneInvalidError as err:
        violations = err.violations
    except SceneError as err:
        return _fail(_Exit(EXIT_INVALID_SCENE, _scene_error_text(path, err)))
    else:
        violations = validate(scene)
        if not has_errors(violations):
            violations += check_lighting(scene)

    for violation in violations:
        print(violation)
    if has_errors(violations):
        return EXIT_INVALID_SCENE
    if not violations:
        print(f"{path}: OK")
    return EXIT_OK


def cmd_convergence(
    preset: Optional[str],
    scene_path: Optional[Path],
    point: Tuple[float, float],
    patch_sizes: Sequence[float],
) -> int:
    """Print the wall-mesh refinement table at one point."""
    try:
        scene = _load(preset, scene_path)
        report = convergence_report(scene, point, patch_sizes)
    except _Exit as err:
        return _fail(err)
    except (SimulationError, GeometryError) as err:
        return _fail(_Exit(EXIT_USAGE, str(err)))

    print("patch_size,patch_count,h_data,h_rogue")
    for row in report.rows:
        print(f"{row.patch_size!r},{row.patch_count},{row.h_data!r},{row.h_rogue!r}")
    print(f"max relative delta {report.max_delta:.3e}")
    print(f"last relative delta {report.last_delta:.3e}")
    return EXIT_OK


def cmd_export(preset: str, path: Path) -> int:
    """Write a preset as an editable scene file."""
    try:
        scene = _load(preset, None)
    except _Exit as err:
        return _fail(err)

    try:
        with atomic_write(path, mode="wb", overwrite=True) as fp:
            fp.write(save_scene(scene))
    except OSError as err:
        return _fail(_Exit(EXIT_IO, f"Unable to write {path}: {err}"))
    _LOGGER.info("Exported preset %s to %s", preset, path)
    return EXIT_OK


def _fail(err: _Exit) -> int:
    print(err, file=sys.stderr)
    return err.code


def _parse_semi_angle(text: str) -> Tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected TYPE=DEG, got {text!r}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected TYPE=DEG, got {text!r}") from None


def _parse_point(text: str) -> Tuple[float, float]:
    try:
        values = parse_float_list(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected X,Y, got {text!r}")
    return values[0], values[1]


def _parse_list(text: str) -> List[float]:
    try:
        return parse_float_list(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


def _parse_formats(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _add_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset", help="shipped preset id")
    source.add_argument("--scene", type=Path, help="scene JSON file")


def build_parser() -> ArgumentParser:
    """Return the vlcsim argument parser."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-v", "--verbose", action="store_true", help="log progress messages"
    )
    common.add_argument("--debug", action="store_true", help="log debug messages")

    parser = ArgumentParser(
        prog="vlcsim",
        description="Simulate legitimate and rogue LED links in an office room.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser(
        "simulate", parents=[common], help="sweep a scene and write artifacts"
    )
    _add_source(simulate)
    simulate.add_argument("--cell", type=float, default=DEFAULT_CELL_SIZE)
    simulate.add_argument("--patch", type=float, default=DEFAULT_PATCH_SIZE)
    simulate.add_argument("--threshold", type=float, default=DEFAULT_BER_THRESHOLD)
    simulate.add_argument(
        "--formats", type=_parse_formats, default=list(FORMATS), help="csv,pgm,json"
    )
    simulate.add_argument("--out", type=Path, default=Path("."))
    simulate.add_argument("--workers", type=int, default=None)
    simulate.add_argument(
        "--semi-angle",
        type=_parse_semi_angle,
        action="append",
        default=[],
        metavar="TYPE=DEG",
        help="override the semi-angle of a luminaire type",
    )

    commands.add_parser("presets", parents=[common], help="list shipped presets")

    validate_cmd = commands.add_parser(
        "validate", parents=[common], help="check a scene file"
    )
    validate_cmd.add_argument("file", type=Path)

    convergence = commands.add_parser(
        "convergence", parents=[common], help="wall-mesh refinement table"
    )
    _add_source(convergence)
    convergence.add_argument("--point", type=_parse_point, required=True)
    convergence.add_argument(
        "--patches", type=_parse_list, default=[0.2, 0.1, 0.05]
    )

    export = commands.add_parser(
        "export", parents=[common], help="write a preset as a scene file"
    )
    export.add_argument("--preset", required=True)
    export.add_argument("file", type=Path)

    return parser


@HANDLERS.register("simulate")
def _handle_simulate(args: argparse.Namespace) -> int:
    try:
        config = RunConfig(
            preset=args.preset,
            scene_path=args.scene,
            cell_size=args.cell,
            patch_size=args.patch,
            ber_threshold=args.threshold,
            out_dir=args.out,
            formats=args.formats,
            workers=args.workers,
            semi_angles=args.semi_angle,
        )
    except ValueError as err:
        return _fail(_Exit(EXIT_USAGE, f"vlcsim simulate: {err}"))
    return cmd_simulate(config)


@HANDLERS.register("presets")
def _handle_presets(args: argparse.Namespace) -> int:
    return cmd_presets()


@HANDLERS.register("validate")
def _handle_validate(args: argparse.Namespace) -> int:
    return cmd_validate(args.file)


@HANDLERS.register("convergence")
def _handle_convergence(args: argparse.Namespace) -> int:
    return cmd_convergence(args.preset, args.scene, args.point, args.patches)


@HANDLERS.register("export")
def _handle_export(args: argparse.Namespace) -> int:
    return cmd_export(args.preset, args.file)


def _setup_logging(args: argparse.Namespace) -> None:
    level = logging.WARNING
    if args.debug:
        level = logging.DEBUG
    elif args.verbose:
        level = logging.INFO
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s (%(name)s) %(message)s"
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run vlcsim and return the exit code."""
    args = build_parser().parse_args(argv)
    _setup_logging(args)
    return HANDLERS[args.command](args)

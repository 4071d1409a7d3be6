"""Test the command line interface."""
import json

import pytest

from vlcsim import cli
from vlcsim.const import (
    EXIT_INVALID_SCENE,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    FILE_BER_R,
    FILE_BER_S,
    FILE_FIELD,
    FILE_ILLUMINANCE,
    FILE_SUMMARY,
)
from vlcsim.presets import build_preset
from vlcsim.scene import Luminaire, Room, Scene, load_scene, save_scene

from .common import POINT_SOURCE, single_luminaire_scene, small_scene


@pytest.fixture
def small_scene_file(scene_file):
    """Return the path of a saved small scene."""
    return scene_file(save_scene(small_scene()), "small.json")


def _simulate(path, out_dir, *extra):
    return cli.main(
        [
            "simulate",
            "--scene",
            str(path),
            "--cell",
            "0.5",
            "--patch",
            "0.25",
            "--out",
            str(out_dir),
            *extra,
        ]
    )


def test_presets(capsys):
    """Test the preset listing."""
    assert cli.main(["presets"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 7
    assert lines[0].startswith("g1_central")
    assert any(line.startswith("gc_full") for line in lines)


def test_simulate_writes_artifacts(tmp_path, small_scene_file, capsys):
    """Test a simulate run writes every artifact and prints the metrics."""
    out_dir = tmp_path / "run1"
    assert _simulate(small_scene_file, out_dir) == EXIT_OK
    assert sorted(path.name for path in out_dir.iterdir()) == sorted(
        [FILE_FIELD, FILE_BER_S, FILE_BER_R, FILE_ILLUMINANCE, FILE_SUMMARY]
    )

    summary = json.loads((out_dir / FILE_SUMMARY).read_text(encoding="utf-8"))
    assert summary["scene_id"] == "small"
    assert summary["cell_size"] == 0.5
    assert summary["patch_size"] == 0.25
    assert summary["ber_threshold"] == 1e-3
    assert summary["snr_threshold"] == pytest.approx(46.56, rel=0.02)
    assert summary["cell_count"] == 48
    assert summary["elapsed_seconds"] >= 0
    assert (
        summary["jammed_fraction"] + summary["legit_feasible_fraction"]
    ) == pytest.approx(1)

    out = capsys.readouterr().out
    assert "jammed_fraction" in out


def test_simulate_deterministic(tmp_path, small_scene_file):
    """Test repeated runs with different worker counts give identical files."""
    first = tmp_path / "first"
    second = tmp_path / "second"
    assert _simulate(small_scene_file, first, "--workers", "1") == EXIT_OK
    assert _simulate(small_scene_file, second, "--workers", "3") == EXIT_OK
    for name in (FILE_FIELD, FILE_BER_S, FILE_BER_R, FILE_ILLUMINANCE):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_simulate_preset_json_only(tmp_path):
    """Test a preset run restricted to the summary."""
    out_dir = tmp_path / "run"
    args = ["simulate", "--preset", "g1_central", "--cell", "0.5"]
    args += ["--formats", "json", "--out", str(out_dir)]
    assert cli.main(args) == EXIT_OK
    assert [path.name for path in out_dir.iterdir()] == [FILE_SUMMARY]
    summary = json.loads((out_dir / FILE_SUMMARY).read_text(encoding="utf-8"))
    assert summary["scene_id"] == "g1_central"


def test_simulate_semi_angle(tmp_path, small_scene_file):
    """Test overriding a luminaire type's semi-angle."""
    assert _simulate(small_scene_file, tmp_path, "--semi-angle", "r=50") == EXIT_OK
    assert _simulate(small_scene_file, tmp_path, "--semi-angle", "x=50") == EXIT_USAGE
    assert _simulate(small_scene_file, tmp_path, "--semi-angle", "r=95") == (
        EXIT_INVALID_SCENE
    )


def test_simulate_unknown_preset(tmp_path, capsys):
    """Test an unknown preset lists the valid ones."""
    args = ["simulate", "--preset", "g9", "--out", str(tmp_path)]
    assert cli.main(args) == EXIT_USAGE
    assert "gc_full" in capsys.readouterr().err


@pytest.mark.parametrize(
    "extra",
    [
        ["--formats", ""],
        ["--formats", "png"],
        ["--threshold", "0.7"],
        ["--workers", "0"],
        ["--cell", "0"],
        ["--cell", "9"],
    ],
)
def test_simulate_bad_settings(tmp_path, small_scene_file, extra):
    """Test invalid settings are usage errors."""
    assert _simulate(small_scene_file, tmp_path, *extra) == EXIT_USAGE


def test_simulate_bad_arguments():
    """Test argument parsing errors exit with the usage code."""
    with pytest.raises(SystemExit) as exc_info:
        cli.main(["simulate"])
    assert exc_info.value.code == EXIT_USAGE

    with pytest.raises(SystemExit) as exc_info:
        cli.main(["simulate", "--preset", "g1_central", "--scene", "x.json"])
    assert exc_info.value.code == EXIT_USAGE


def test_simulate_invalid_scene(tmp_path, scene_file, capsys):
    """Test an invalid scene file exits with the scene error code."""
    data = json.loads(save_scene(small_scene()))
    data["room"]["reflectivity"] = 1.5
    path = scene_file(json.dumps(data).encode())
    assert _simulate(path, tmp_path) == EXIT_INVALID_SCENE
    assert "reflectivity" in capsys.readouterr().err


def test_simulate_missing_scene(tmp_path):
    """Test an unreadable scene file is an I/O error."""
    assert _simulate(tmp_path / "nope.json", tmp_path) == EXIT_IO


def test_simulate_unwritable_output(tmp_path, small_scene_file):
    """Test an output path that is a file is an I/O error."""
    blocker = tmp_path / "blocker"
    blocker.write_text("x")
    assert _simulate(small_scene_file, blocker) == EXIT_IO


def test_validate_preset(tmp_path, capsys):
    """Test a saved preset validates."""
    path = tmp_path / "g2_three.json"
    path.write_bytes(save_scene(build_preset("g2_three")))
    assert cli.main(["validate", str(path)]) == EXIT_OK
    assert "error" not in capsys.readouterr().out


def test_validate_reflectivity(scene_file, capsys):
    """Test an out of range reflectivity is reported."""
    data = json.loads(save_scene(small_scene()))
    data["room"]["reflectivity"] = 1.5
    path = scene_file(json.dumps(data).encode())
    assert cli.main(["validate", str(path)]) == EXIT_INVALID_SCENE
    assert "reflectivity" in capsys.readouterr().out


def test_validate_dim_scene(scene_file, capsys):
    """Test a dim but valid scene warns and passes."""
    path = scene_file(save_scene(single_luminaire_scene()))
    assert cli.main(["validate", str(path)]) == EXIT_OK
    assert "warning" in capsys.readouterr().out


def test_validate_tiny_room(scene_file, capsys):
    """Test a room smaller than the lighting grid still validates."""
    room = Room(0.08, 0.08, 2.8, 0.8, 0.85)
    scene = Scene(
        room=room,
        luminaire_types=[POINT_SOURCE],
        luminaires=[Luminaire(0.04, 0.04, room.height, POINT_SOURCE)],
    )
    path = scene_file(save_scene(scene))
    assert cli.main(["validate", str(path)]) == EXIT_OK
    assert "error" not in capsys.readouterr().out


def test_validate_malformed(scene_file):
    """Test a document that is not JSON."""
    path = scene_file(b"{ nope")
    assert cli.main(["validate", str(path)]) == EXIT_INVALID_SCENE


def test_validate_missing(tmp_path):
    """Test a nonexistent path."""
    assert cli.main(["validate", str(tmp_path / "nope.json")]) == EXIT_IO


def test_convergence(small_scene_file, capsys):
    """Test the refinement table."""
    args = ["convergence", "--scene", str(small_scene_file), "--point", "2,1.5"]
    assert cli.main(args + ["--patches", "0.5,0.25"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "patch_size,patch_count,h_data,h_rogue"
    assert out[1].startswith("0.5,")
    assert out[2].startswith("0.25,")
    assert out[3].startswith("max relative delta")


def test_convergence_errors(small_scene_file):
    """Test a single patch size or a point outside the room."""
    args = ["convergence", "--scene", str(small_scene_file)]
    assert cli.main(args + ["--point", "2,1.5", "--patches", "0.5"]) == EXIT_USAGE
    assert cli.main(args + ["--point", "9,1.5", "--patches", "0.5,0.25"]) == EXIT_USAGE


def test_export(tmp_path):
    """Test exporting a preset as a scene file."""
    path = tmp_path / "g2_one.json"
    assert cli.main(["export", "--preset", "g2_one", str(path)]) == EXIT_OK
    assert load_scene(path.read_bytes()) == build_preset("g2_one")

    assert cli.main(["export", "--preset", "g9", str(path)]) == EXIT_USAGE
    missing_dir = tmp_path / "x" / "y.json"
    assert cli.main(["export", "--preset", "g2_one", str(missing_dir)]) == EXIT_IO


def test_run_config():
    """Test run settings and the scene id."""
    config = cli.RunConfig(preset="g1_central")
    assert config.scene_id == "g1_central"
    assert config.formats == ("csv", "pgm", "json")

    with pytest.raises(ValueError):
        cli.RunConfig()
    with pytest.raises(ValueError):
        cli.RunConfig(preset="g1_central", formats=[])

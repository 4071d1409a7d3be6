"""Test direct and wall-reflected channel aggregation."""
import math

import attr
import numpy as np
import pytest

from vlcsim import propagation
from vlcsim.const import ROLE_LEGITIMATE, ROLE_ROGUE
from vlcsim.optics import los_gain
from vlcsim.presets import build_preset, preset_ids
from vlcsim.propagation import (
    ChannelModel,
    GeometryError,
    WallPatch,
    make_wall_patches,
    point_channel,
    ray_geometry,
)
from vlcsim.scene import with_roles
from vlcsim.simulation import convergence_report

from .common import TYPE_G, office_room, single_luminaire_scene, small_scene

CENTER = (3.5, 3.5)


@pytest.fixture(scope="module")
def office_patches():
    """Return the default wall mesh of the office."""
    return make_wall_patches(office_room(), 0.1)


def test_wall_patch_count(office_patches):
    """Test the office walls tile into 7840 patches."""
    assert len(office_patches) == 4 * 70 * 28
    assert sum(patch.area for patch in office_patches) == pytest.approx(78.4, rel=1e-9)


def test_wall_patches_refine():
    """Test halving the patch size quadruples the count."""
    room = office_room()
    assert len(make_wall_patches(room, 0.05)) == 4 * len(make_wall_patches(room, 0.1))


def test_wall_patches_uneven_room():
    """Test sides that are not a multiple of the patch size."""
    room = attr.evolve(office_room(), width=4.25, height=2.5)
    patches = make_wall_patches(room, 0.2)
    area = 2 * (room.width + room.depth) * room.height
    assert sum(patch.area for patch in patches) == pytest.approx(area, rel=1e-9)
    for patch in patches:
        assert patch.area <= 0.2 * 0.2 + 1e-12


def test_wall_patches_face_inwards(office_patches):
    """Test every patch lies on a wall and faces the room center."""
    for patch in office_patches[::97]:
        x, y, z = patch.center
        assert 0 < z < 2.8
        on_wall = x in (0.0, 7.0) or y in (0.0, 7.0)
        assert on_wall
        to_center = np.subtract((3.5, 3.5, z), patch.center)
        assert np.dot(to_center, patch.normal) > 0


@pytest.mark.parametrize("size", [0.0, -0.1, 3.0])
def test_wall_patches_invalid_size(size):
    """Test patch sizes outside the room dimensions are rejected."""
    with pytest.raises(GeometryError):
        make_wall_patches(office_room(), size)


def test_ray_geometry_overhead():
    """Test a source straight above the receiver."""
    ray = ray_geometry((1.0, 1.0, 2.8), (1.0, 1.0, 0.85))
    assert ray.theta == 0.0
    assert ray.psi == 0.0
    assert ray.d == pytest.approx(1.95)
    assert ray.visible


def test_ray_geometry_diagonal():
    """Test a 45 degree ray."""
    ray = ray_geometry((1.95, 0.0, 2.8), (0.0, 0.0, 0.85))
    assert ray.theta == pytest.approx(math.pi / 4)
    assert ray.psi == pytest.approx(math.pi / 4)
    assert ray.d == pytest.approx(1.95 * math.sqrt(2))


def test_ray_geometry_behind_source():
    """Test a target above the source is not visible."""
    ray = ray_geometry((1.0, 1.0, 1.0), (2.0, 1.0, 2.0))
    assert ray.theta > math.pi / 2
    assert not ray.visible


def test_ray_geometry_degenerate():
    """Test a zero-length ray."""
    with pytest.raises(GeometryError):
        ray_geometry((1.0, 1.0, 1.0), (1.0, 1.0, 1.0))


def test_reflection_geometry():
    """Test the LED to wall to receiver path angles."""
    patch = WallPatch((0.0, 2.0, 1.8), (1.0, 0.0, 0.0), 0.01)
    ray = propagation.reflection_geometry((1.0, 2.0, 2.8), patch, (1.0, 2.0, 0.8))
    assert ray.d1 == pytest.approx(math.sqrt(2))
    assert ray.d2 == pytest.approx(math.sqrt(2))
    assert ray.theta == pytest.approx(math.pi / 4)
    assert ray.alpha == pytest.approx(math.pi / 4)
    assert ray.beta == pytest.approx(math.pi / 4)
    assert ray.psi == pytest.approx(math.pi / 4)
    assert ray.visible


def test_reflection_geometry_back_of_wall():
    """Test a source behind the wall cannot light the patch."""
    patch = WallPatch((0.0, 2.0, 1.8), (1.0, 0.0, 0.0), 0.01)
    ray = propagation.reflection_geometry((-1.0, 2.0, 2.8), patch, (1.0, 2.0, 0.8))
    assert not ray.visible


def test_point_channel_single_led(office_patches):
    """Test a lone overhead LED without reflections reduces to the direct gain."""
    scene = single_luminaire_scene()
    channel = point_channel(scene, CENTER, office_patches)
    profile = scene.emitter_profile(scene.luminaire_types[0])
    expected = los_gain(0.0, 0.0, 1.95, profile, scene.receiver)
    assert channel.h_data == pytest.approx(expected, rel=1e-12)
    assert channel.h_data == pytest.approx(3.766e-5, rel=1e-3)
    assert channel.p_data_opt == pytest.approx(expected * profile.power_per_led)
    assert channel.h_rogue == 0.0
    assert channel.p_rogue_opt == 0.0


def test_point_channel_reflections_add(office_patches):
    """Test reflecting walls raise the gain above the direct value."""
    dull = point_channel(single_luminaire_scene(), CENTER, office_patches)
    bright = point_channel(
        single_luminaire_scene(reflectivity=0.8), CENTER, office_patches
    )
    assert bright.h_data > dull.h_data
    assert bright.illuminance > dull.illuminance


def test_point_channel_outside_room(office_patches):
    """Test a receiver beyond the footprint is rejected."""
    with pytest.raises(GeometryError):
        point_channel(single_luminaire_scene(), (7.5, 1.0), office_patches)


def test_point_channel_g1_central(office_patches):
    """Test both links reach the room center in the central rogue scene."""
    channel = point_channel(build_preset("g1_central"), CENTER, office_patches)
    assert channel.h_data > 0
    assert channel.h_rogue > 0
    assert channel.p_rogue_opt > 0
    assert channel.illuminance > 0


def test_channel_fields_consistent(office_patches):
    """Test received powers follow from gains and per-LED powers."""
    scene = build_preset("g1_central")
    channel = point_channel(scene, (2.0, 1.0), office_patches)
    power = scene.emitter_profile(scene.luminaire_type("g")).power_per_led
    assert channel.p_data_opt == pytest.approx(channel.h_data * power, rel=1e-9)
    assert channel.p_rogue_opt == pytest.approx(channel.h_rogue * power, rel=1e-9)


def test_superposition(office_patches):
    """Test the channel is the sum of single-luminaire channels."""
    scene = small_scene()
    room = attr.evolve(scene.room, width=7.0, depth=7.0, height=2.8)
    scene = attr.evolve(scene, room=room)
    patches = make_wall_patches(room, 0.1)
    whole = point_channel(scene, (2.0, 2.5), patches)

    parts = [
        point_channel(attr.evolve(scene, luminaires=[lum]), (2.0, 2.5), patches)
        for lum in scene.luminaires
    ]
    for name in attr.fields_dict(type(whole)):
        total = sum(getattr(part, name) for part in parts)
        assert getattr(whole, name) == pytest.approx(total, rel=1e-9)


def test_role_partition(office_patches):
    """Test relabelling a luminaire moves its gain between the links."""
    scene = build_preset("g1_central")
    relabelled = with_roles(scene, {0: ROLE_ROGUE})
    before = point_channel(scene, (1.0, 2.0), office_patches)
    after = point_channel(relabelled, (1.0, 2.0), office_patches)

    alone = point_channel(
        attr.evolve(scene, luminaires=[scene.luminaires[0]]), (1.0, 2.0), office_patches
    )
    assert after.h_rogue == pytest.approx(before.h_rogue + alone.h_data, rel=1e-9)
    assert after.h_data == pytest.approx(before.h_data - alone.h_data, rel=1e-9)
    assert after.h_data + after.h_rogue == pytest.approx(
        before.h_data + before.h_rogue, rel=1e-12
    )
    assert after.illuminance == pytest.approx(before.illuminance, rel=1e-12)


def test_reflection_vanishes_without_reflectivity():
    """Test zero reflectivity leaves only the direct paths."""
    scene = small_scene(reflectivity=0.0)
    dull = ChannelModel(scene, make_wall_patches(scene.room, 0.1))
    bare = ChannelModel(scene, [])
    xs = np.array([0.5, 2.0, 3.5])
    ys = np.array([0.5, 1.5, 2.5])
    reflected = dull.evaluate(xs, ys)
    direct = bare.evaluate(xs, ys)
    for name in attr.fields_dict(type(direct)):
        assert np.array_equal(getattr(reflected, name), getattr(direct, name))


def test_batch_matches_single_points(office_patches):
    """Test batch evaluation equals point by point evaluation."""
    scene = build_preset("g2_one")
    model = ChannelModel(scene, office_patches)
    xs = np.array([0.05, 3.5, 6.95])
    ys = np.array([0.05, 5.6, 3.0])
    batch = model.evaluate(xs, ys)
    for index, point in enumerate(zip(xs, ys)):
        single = point_channel(scene, point, office_patches)
        assert batch.h_data[index] == pytest.approx(single.h_data, rel=1e-12)
        assert batch.h_rogue[index] == pytest.approx(single.h_rogue, rel=1e-12)
        assert batch.illuminance[index] == pytest.approx(single.illuminance, rel=1e-12)


def test_reflected_contribution_nonnegative(office_patches):
    """Test wall reflections never lower the channel."""
    scene = build_preset("gc_half")
    lit = ChannelModel(scene, office_patches)
    bare = ChannelModel(scene, [])
    xs = np.linspace(0.05, 6.95, 25)
    ys = np.linspace(6.95, 0.05, 25)
    with_walls = lit.evaluate(xs, ys)
    without = bare.evaluate(xs, ys)
    assert np.all(with_walls.h_data >= without.h_data)
    assert np.all(with_walls.h_rogue >= without.h_rogue)
    assert np.all(with_walls.illuminance >= without.illuminance)


def test_illuminance_type_g_overhead():
    """Test one type-g luminaire 1.95 m above the desk."""
    scene = single_luminaire_scene(TYPE_G)
    assert propagation.illuminance(scene, CENTER) == pytest.approx(138, rel=0.03)


def test_illuminance_inverse_square():
    """Test doubling the on-axis distance quarters the illuminance."""
    scene = single_luminaire_scene()
    near = propagation.illuminance(scene, CENTER, [])
    room = attr.evolve(scene.room, height=0.85 + 2 * 1.95)
    lum = attr.evolve(scene.luminaires[0], mount_height=room.height)
    far_scene = attr.evolve(scene, room=room, luminaires=[lum])
    far = propagation.illuminance(far_scene, CENTER, [])
    assert far == pytest.approx(near / 4, rel=1e-12)


def test_illuminance_role_independent(office_patches):
    """Test rogue luminaires still light the room."""
    scene = build_preset("gc_full")
    legit = with_roles(scene, {index: ROLE_LEGITIMATE for index in range(16)})
    assert propagation.illuminance(scene, (2.0, 5.0), office_patches) == pytest.approx(
        propagation.illuminance(legit, (2.0, 5.0), office_patches), rel=1e-12
    )


@pytest.mark.timeout(300)
@pytest.mark.parametrize("name", preset_ids())
def test_patch_convergence(name):
    """Test refining the wall mesh barely changes the channel at the center."""
    report = convergence_report(build_preset(name), CENTER, [0.1, 0.05])
    assert report.last_delta < 0.01

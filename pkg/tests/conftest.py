"""Set up some common test helper things."""
import logging

import pytest

from vlcsim.presets import build_preset
from vlcsim.simulation import metrics, sweep

logging.basicConfig(level=logging.DEBUG)


@pytest.fixture(scope="session")
def preset_results():
    """Return a lookup of (FieldMap, Metrics) per preset, swept once per session."""
    cache = {}

    def _get(name):
        if name not in cache:
            field = sweep(build_preset(name))
            cache[name] = (field, metrics(field))
        return cache[name]

    return _get


@pytest.fixture
def scene_file(tmp_path):
    """Return a factory writing scene documents into the test directory."""

    def _write(document: bytes, name: str = "scene.json"):
        path = tmp_path / name
        path.write_bytes(document)
        return path

    return _write

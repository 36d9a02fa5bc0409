"""Registro de atlas declarados en YAML."""

import pytest
import yaml

from core.atlas_registry import AtlasRegistry
from core.config import SystemConfig
from core.errors import NotInvertible
from core.sysdef import load_system

VALID = {
    "name": "inversion",
    "system": "toy",
    "params": {"k": "2"},
    "charts": [
        {
            "name": "U0",
            "boundary": "1",
            "volume_preserving": True,
            "forward": {"x0": "x", "y0": "y"},
            "inverse": {"x": "x0", "y": "y0"},
        },
        {
            "name": "U1",
            "boundary": "x1",
            "volume_preserving": False,
            "forward": {"x1": "1/x", "y1": "y/x"},
            "inverse": {"x": "1/x1", "y": "y1/x1"},
        },
    ],
}

TOY = "system toy\nparams k\nvars x y\ndx/dt = k*y\ndy/dt = x\n"


@pytest.fixture
def atlases_dir(tmp_path):
    (tmp_path / "inversion.yaml").write_text(yaml.safe_dump(VALID), encoding="utf-8")
    return tmp_path


@pytest.fixture
def toy_doc(tmp_path):
    path = tmp_path / "toy.sys"
    path.write_text(TOY, encoding="utf-8")
    return load_system(path)


def test_bundled_atlases_are_listed():
    registry = AtlasRegistry()
    assert registry.atlases_dir == SystemConfig.ATLASES_DIR
    assert registry.get_available_atlases() == ["prop62", "theorem31", "theorem41"]
    assert registry.default_params("theorem31") == {"epsilon": "3"}


def test_load_and_cache(atlases_dir):
    registry = AtlasRegistry(atlases_dir)
    first = registry.load_atlas("inversion")
    assert registry.load_atlas("inversion") is first
    assert registry.reload_atlas("inversion") is not first
    registry.clear_cache()
    assert registry.load_atlas("inversion")["name"] == "inversion"


def test_missing_atlas(atlases_dir):
    with pytest.raises(FileNotFoundError):
        AtlasRegistry(atlases_dir).load_atlas("nowhere")


@pytest.mark.parametrize(
    "mutate",
    [
        lambda c: c.pop("name"),
        lambda c: c.update(charts=[]),
        lambda c: c["charts"][1].pop("boundary"),
        lambda c: c["charts"][1].update(volume_preserving="yes"),
        lambda c: c["charts"][1].update(forward={}),
        lambda c: c["charts"][1].update(name="U0"),
        lambda c: c.update(params=["k"]),
    ],
)
def test_invalid_declarations_are_rejected(tmp_path, mutate):
    config = yaml.safe_load(yaml.safe_dump(VALID))
    mutate(config)
    (tmp_path / "broken.yaml").write_text(yaml.safe_dump(config), encoding="utf-8")
    registry = AtlasRegistry(tmp_path)
    with pytest.raises(ValueError):
        registry.load_atlas("broken")
    assert registry.get_available_atlases() == []


def test_invalid_yaml(tmp_path):
    (tmp_path / "garbled.yaml").write_text("charts: [unclosed\n", encoding="utf-8")
    with pytest.raises(ValueError):
        AtlasRegistry(tmp_path).load_atlas("garbled")


def test_build_charts(atlases_dir, toy_doc):
    charts = AtlasRegistry(atlases_dir).build_charts("inversion", toy_doc)
    assert [c.name for c in charts] == ["U0", "U1"]
    assert charts[1].variables == ("x1", "y1")
    assert charts[1].volume_preserving is False


def test_build_charts_checks_declared_inverse(tmp_path, toy_doc):
    config = yaml.safe_load(yaml.safe_dump(VALID))
    config["charts"][1]["inverse"]["y"] = "y1"
    (tmp_path / "wrong.yaml").write_text(yaml.safe_dump(config), encoding="utf-8")
    with pytest.raises(NotInvertible):
        AtlasRegistry(tmp_path).build_charts("wrong", toy_doc)

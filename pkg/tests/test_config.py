"""Config loading, merging, and strict validation."""

import pytest
import yaml

from deixis.config import load_config
from deixis.errors import ConfigError, LexiconError, UnknownScenePreset


class TestLoad:
    def test_defaults_load(self, config):
        assert config.selection.radius_m == 0.5
        assert config.fusion.alignment_window_s == pytest.approx(0.3)
        assert "pick" in config.catalog.names()
        assert "move_linear" in config.api

    def test_user_file_merges_over_defaults(self, tmp_path):
        user = tmp_path / "user.yaml"
        user.write_text(yaml.safe_dump({"selection": {"radius_m": 0.25}}))
        cfg = load_config(user)
        assert cfg.selection.radius_m == 0.25
        assert cfg.fusion.alignment_window_s == pytest.approx(0.3)  # untouched

    def test_preset_scene_unknown(self, config):
        with pytest.raises(UnknownScenePreset):
            config.preset_scene("narnia")

    def test_preset_scene_returns_fresh_scene(self, config):
        a = config.preset_scene("two-cups-bowl-plate")
        b = config.preset_scene("two-cups-bowl-plate")
        assert a is not b and len(a) == len(b) == 4


class TestValidation:
    def test_bad_rotation_rejected(self):
        with pytest.raises(ConfigError):
            load_config(overrides={"camera": {"rotation": [[2, 0, 0], [0, 1, 0], [0, 0, 1]]}})

    def test_catalog_expansion_must_use_known_primitives(self):
        with pytest.raises(ConfigError):
            load_config(
                overrides={
                    "catalog": {
                        "warp": {
                            "object_dependent": False,
                            "definition": "x",
                            "expansion": ["hyperjump(x=1)"],
                        }
                    }
                }
            )

    def test_lexicon_overlap_rejected(self):
        with pytest.raises(LexiconError):
            load_config(overrides={"lexicon": {"pronouns": ["this", "cup"]}})

    def test_scene_entry_validation(self):
        with pytest.raises(ConfigError):
            load_config(
                overrides={
                    "scenes": {"bad": [{"id": "x", "class": "cup", "position": [0, 0, 0],
                                        "height_m": -1, "width_m": 0.1}]}
                }
            )

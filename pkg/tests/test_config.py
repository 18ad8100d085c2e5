from __future__ import annotations

import pytest

from omra.core.config import (
    coerce_config_value,
    get_config_file_path,
    get_config_path,
    get_nested,
    load_config,
    resolve_encoder_config,
    resolve_estimator_config,
    save_config,
    set_nested,
)
from omra.core.errors import ConfigError
from omra.engine.container import Variant


def test_env_var_overrides_path(tmp_path, monkeypatch):
    target = tmp_path / "custom.yaml"
    monkeypatch.setenv("OMRA_CONFIG", str(target))
    assert get_config_path() == target.resolve()
    assert get_config_file_path() == target.resolve()
    assert load_config() == {}


def test_save_and_load_yaml(tmp_path):
    path = save_config({"encoder": {"q_base": 18.0, "scales": [1, 2]}})
    assert path == (tmp_path / "omra-config.yaml").resolve()
    assert load_config() == {"encoder": {"q_base": 18.0, "scales": [1, 2]}}


def test_save_and_load_json(tmp_path):
    path = tmp_path / "config.json"
    save_config({"report": {"svg": True}}, path)
    assert load_config(path) == {"report": {"svg": True}}


def test_broken_file_is_not_fatal(tmp_path, caplog):
    path = tmp_path / "omra-config.yaml"
    path.write_text("encoder: [unclosed\n", encoding="utf-8")
    assert load_config() == {}
    assert "Failed to load config" in caplog.text
    path.write_text("- just\n- a list\n", encoding="utf-8")
    assert load_config() == {}


def test_nested_keys():
    data: dict = {}
    set_nested(data, "encoder.q_base", 8.0)
    set_nested(data, "estimator.preset", "pwc")
    assert data == {"encoder": {"q_base": 8.0}, "estimator": {"preset": "pwc"}}
    assert get_nested(data, "encoder.q_base") == 8.0
    assert get_nested(data, "encoder.q_base.deeper") is None
    assert get_nested(data, "report.svg") is None


def test_coerce_by_key():
    assert coerce_config_value("encoder.intra_period", "16") == 16
    assert coerce_config_value("encoder.q_base", "12.5") == 12.5
    assert coerce_config_value("encoder.scales", "1, 2,4") == [1, 2, 4]
    assert coerce_config_value("report.svg", "yes") is True
    assert coerce_config_value("encoder.variant", " fixed:2 ") == "fixed:2"
    assert coerce_config_value("encoder.workers", "many") == "many"


def test_defaults():
    cfg = resolve_encoder_config({})
    assert cfg.q_base == 12.0
    assert cfg.rd_lambda == pytest.approx(122.4)
    assert cfg.intra_period == 32
    assert cfg.variant is Variant.OMRA
    assert cfg.scales == (1, 2, 4, 8)
    assert cfg.estimator.cap == 28


def test_cli_beats_file_beats_default():
    config = {
        "encoder": {"q_base": 18, "intra_period": 16, "variant": "fixed:4", "scales": [1, 2]},
        "estimator": {"preset": "pwc", "search_radius": 2},
    }
    cfg = resolve_encoder_config(config, q_base=8.0, search_radius=None)
    assert cfg.q_base == 8.0
    assert cfg.intra_period == 16
    assert cfg.variant is Variant.FIXED
    assert cfg.fixed_scale == 4
    assert cfg.scales == (1, 2)
    assert cfg.estimator.pyramid_levels == 4
    assert cfg.estimator.search_radius == 2
    assert resolve_estimator_config(config, preset="spy").pyramid_levels == 3


def test_explicit_lambda():
    assert resolve_encoder_config({"encoder": {"lambda": 50}}).rd_lambda == 50.0
    assert resolve_encoder_config({}, rd_lambda=7.5).rd_lambda == 7.5


@pytest.mark.parametrize(
    "config",
    [
        {"encoder": {"intra_period": 5}},
        {"encoder": {"q_base": "high"}},
        {"encoder": {"variant": "c"}},
        {"encoder": "oops"},
        {"estimator": {"preset": "raft"}},
        {"estimator": {"block": 7}},
    ],
)
def test_invalid_values(config):
    with pytest.raises(ConfigError):
        resolve_encoder_config(config)

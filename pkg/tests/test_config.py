import json

import pytest

from triqsd import build_presets, config_from_dict, get_preset, list_presets
from triqsd.config import RunConfig, apply_overrides
from triqsd.errors import ConfigError, ValidationError


def test_round_trip_is_identity():
    cfg = get_preset("fig1b")
    again = config_from_dict(json.loads(cfg.to_json()))
    assert again.to_dict() == cfg.to_dict()
    assert again == cfg


def test_unknown_top_level_key_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"model": "dephasing", "gamm": 2.0})


def test_unknown_nested_keys_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"schedule": {"outer": 3, "nr_inner": 1}})
    with pytest.raises(ConfigError):
        config_from_dict({"initial": {"kind": "pure", "weights": [1]}})


def test_malformed_values_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"n_traj": "many"})
    with pytest.raises(ConfigError):
        config_from_dict({"initial": {"kind": "pure", "amplitudes": [[1, 0]]}})
    with pytest.raises(ConfigError):
        config_from_dict({"initial": {"kind": "thermal"}})


def test_validation_catches_bad_numbers():
    for patch in (
        {"gamma": -1.0},
        {"total_time": 0.0},
        {"n_traj": 0},
        {"master_seed": -3},
        {"output_times": 1},
        {"fidelity_convention": "cubed"},
        {"frame": "rotating"},
        {"model": "unitary"},
        {"write_oracle": "sometimes"},
    ):
        cfg = config_from_dict(patch)
        with pytest.raises(ValidationError):
            cfg.validate()


def test_inner_pulses_require_outer():
    cfg = config_from_dict({"schedule": {"outer": 0, "inner": 4}})
    with pytest.raises(ValidationError):
        cfg.validate()


def test_overrides_nested_and_typed():
    cfg = get_preset("fig1a")
    out = apply_overrides(cfg, ["n_traj=64", "schedule.outer=6", "gamma=2.5"])
    assert out.n_traj == 64
    assert out.schedule.outer == 6
    assert out.gamma == 2.5


def test_override_unknown_key_rejected():
    cfg = get_preset("fig1a")
    with pytest.raises(ConfigError):
        apply_overrides(cfg, ["does_not_exist=3"])
    with pytest.raises(ConfigError):
        apply_overrides(cfg, ["schedule.bogus=3"])
    with pytest.raises(ConfigError):
        apply_overrides(cfg, ["just_a_key_no_value"])


def test_all_presets_validate():
    presets = build_presets()
    assert len(presets) >= 30
    for name, (cfg, desc) in presets.items():
        cfg.validate()
        assert cfg.run_name == name
        assert cfg.omega == 1.0
        assert desc


def test_expected_preset_parameters():
    fig1b = get_preset("fig1b")
    assert fig1b.model == "dephasing"
    assert fig1b.schedule.outer == 20
    assert fig1b.gamma == 1.0
    assert fig1b.n_traj == 2000
    fig5 = get_preset("fig5_g1")
    assert fig5.schedule.outer == 20 and fig5.schedule.inner == 10
    fig4b = get_preset("fig4b")
    assert fig4b.schedule.build(fig4b.total_time).n_pulses == 100


def test_fig2_family_covers_documented_sweep():
    names = [n for n, _ in list_presets("fig2")]
    assert len(names) == 4
    gammas = sorted(get_preset(n).gamma for n in names)
    assert gammas == [0.5, 1.0, 5.0, 10.0]


def test_unknown_preset_is_validation_error():
    with pytest.raises(ValidationError):
        get_preset("fig9z")


def test_default_config_is_valid():
    RunConfig().validate()

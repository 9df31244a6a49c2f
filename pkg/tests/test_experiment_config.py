from __future__ import annotations

from pathlib import Path

import pytest

from apps.sta_engine.config.experiment import load_config, parse_config
from apps.sta_engine.services.physics.errors import EXIT_CONFIG, ConfigError

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def _minimal(**overrides):
    data = {"version": 1, "protocol": "vitanov_satd_kappa"}
    data.update(overrides)
    return data


def test_defaults():
    config = parse_config(_minimal())
    assert config.protocols == ["vitanov_satd_kappa"]
    nu = config.nu_values
    assert len(nu) == 25
    assert nu[0] == pytest.approx(0.1)
    assert nu[-1] == pytest.approx(10.0)
    assert config.physics.kappa == 1.0 and config.physics.gamma == 0.0
    assert config.numerics.tail.enabled
    assert config.oracle is None


def test_unknown_key_names_its_path():
    with pytest.raises(ConfigError) as info:
        parse_config(_minimal(physics={"bogus": 1}))
    assert "physics.bogus" in info.value.message
    assert info.value.exit_code == EXIT_CONFIG


def test_negative_kappa_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config(_minimal(physics={"kappa": -1.0}))
    assert "physics.kappa" in info.value.message


def test_protocol_checks():
    with pytest.raises(ConfigError):
        parse_config(_minimal(protocol=[]))
    with pytest.raises(ConfigError):
        parse_config(_minimal(protocol="not_a_protocol"))
    with pytest.raises(ConfigError):
        parse_config(_minimal(protocol="tanh_corrected", physics={"Gmax": 5.0, "g": 6.0}))


def test_sweep_sources():
    config = parse_config(_minimal(sweep={"nu": [0.5, 2.0]}))
    assert config.nu_values == [0.5, 2.0]
    assert parse_config(_minimal(sweep={"nu": []})).nu_values == []
    with pytest.raises(ConfigError):
        parse_config(_minimal(sweep={"nu": [1.0], "log_range": {"start": 1, "stop": 2, "points": 3}}))
    with pytest.raises(ConfigError):
        parse_config(_minimal(sweep={"nu": [0.0]}))


def test_version_must_match():
    with pytest.raises(ConfigError) as info:
        parse_config(_minimal(version=2))
    assert "version" in info.value.message
    with pytest.raises(ConfigError):
        parse_config(["not", "a", "mapping"])


def test_dump_round_trips():
    config = parse_config(_minimal(sweep={"nu": [1.0]}, oracle={"grids": [{"omega_max": 50, "n_modes": 512}]}))
    again = parse_config(config.dump())
    assert again == config


@pytest.mark.parametrize("name", ["vitanov_sweep.yaml", "vitanov_sweep_gamma.yaml", "tanh_sweep.yaml", "mu_profiles.yaml", "oracle.yaml"])
def test_shipped_configs_load(name):
    config = load_config(CONFIG_DIR / name)
    assert config.version == 1
    assert config.protocols


def test_load_yaml_file(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("version: 1\nprotocol: vitanov_uncorrected\nsweep:\n  nu: [1.0]\n", encoding="utf-8")
    config = load_config(path)
    assert config.nu_values == [1.0]


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError) as info:
        load_config(tmp_path / "absent.yaml")
    assert info.value.exit_code == EXIT_CONFIG
    bad = tmp_path / "bad.yaml"
    bad.write_text("version: [1\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(bad)


@pytest.mark.parametrize("method", ["LSODA", "Euler"])
def test_unsupported_integrator_is_a_config_error(method):
    with pytest.raises(ConfigError) as info:
        parse_config(_minimal(numerics={"method": method}))
    assert "numerics.method" in info.value.message
    assert info.value.exit_code == EXIT_CONFIG


def test_fidelity_scoring_choice():
    assert parse_config(_minimal()).numerics.fidelity_at == "limit"
    assert parse_config(_minimal(numerics={"fidelity_at": "window_end"})).numerics.fidelity_at == "window_end"
    with pytest.raises(ConfigError):
        parse_config(_minimal(numerics={"fidelity_at": "midpoint"}))

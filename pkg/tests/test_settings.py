"""Tests for configuration loading"""

import json
import os

import pytest

from config.settings import (
    Config,
    create_config_file,
    get_config,
    get_default_config,
    load_config,
    reload_config,
)
from src.core.errors import ArgumentError


def test_defaults():
    """Defaults match the documented table"""
    config = get_default_config()
    assert config.numerics.predicate_tol == 1e-9
    assert config.numerics.residual_tol == 1e-7
    assert config.numerics.eig_backend == "lapack"
    assert config.capacity.max_qubits == 12
    assert config.capacity.max_dim == 2 ** 12
    assert config.capacity.max_tna_bits == 40
    assert config.protocol.seed == 0
    assert config.logging.level == "INFO"


def test_environment_overrides(monkeypatch):
    """QSD_* variables override defaults"""
    monkeypatch.setenv("QSD_MAX_QUBITS", "6")
    monkeypatch.setenv("QSD_EIG_BACKEND", "jacobi")
    monkeypatch.setenv("QSD_SEED", "42")
    config = load_config()
    assert config.capacity.max_qubits == 6
    assert config.capacity.max_dim == 64
    assert config.numerics.eig_backend == "jacobi"
    assert config.protocol.seed == 42


def test_invalid_environment_value_names_the_variable(monkeypatch):
    """Unparseable values raise ArgumentError naming the variable"""
    monkeypatch.setenv("QSD_MAX_QUBITS", "many")
    with pytest.raises(ArgumentError, match="QSD_MAX_QUBITS"):
        load_config()


def test_unknown_backend_rejected(monkeypatch):
    monkeypatch.setenv("QSD_EIG_BACKEND", "magic")
    with pytest.raises(ArgumentError, match="eig_backend"):
        load_config()


def test_json_file_overrides_environment(tmp_path, monkeypatch):
    """A config file is applied after the environment"""
    monkeypatch.setenv("QSD_WORKERS", "3")
    path = tmp_path / "qsd.json"
    path.write_text(json.dumps({"protocol": {"workers": 2, "seed": 7}, "capacity": {"max_qubits": 8}}))
    config = load_config(str(path))
    assert config.protocol.workers == 2
    assert config.protocol.seed == 7
    assert config.capacity.max_qubits == 8


def test_dotenv_file(tmp_path):
    path = tmp_path / ".env"
    path.write_text("QSD_MAX_TNA_BITS=20\nQSD_LOG_LEVEL=DEBUG\n")
    config = load_config(str(path))
    assert config.capacity.max_tna_bits == 20
    assert config.logging.level == "DEBUG"


def test_create_config_file_round_trip(tmp_path):
    path = create_config_file(str(tmp_path / "config.json"))
    config = load_config(path)
    assert config == Config()


def test_reload_config_points_cache_at_file(tmp_path):
    """reload_config replaces the cached process configuration"""
    path = tmp_path / "qsd.json"
    path.write_text(json.dumps({"capacity": {"max_circuit_qubits": 9}}))
    assert get_config().capacity.max_circuit_qubits == 20
    reload_config(str(path))
    assert get_config().capacity.max_circuit_qubits == 9


def test_reload_config_leaves_environment_alone(tmp_path):
    """A file given to reload_config is not exported to the process environment"""
    path = tmp_path / "qsd.json"
    path.write_text(json.dumps({"protocol": {"seed": 11}}))
    assert reload_config(str(path)).protocol.seed == 11
    assert "QSD_CONFIG_FILE" not in os.environ
    assert reload_config().protocol.seed == 0


def test_reload_config_falls_back_to_environment_file(tmp_path, monkeypatch):
    first = tmp_path / "first.json"
    first.write_text(json.dumps({"protocol": {"seed": 5}}))
    second = tmp_path / "second.json"
    second.write_text(json.dumps({"protocol": {"seed": 6}}))
    monkeypatch.setenv("QSD_CONFIG_FILE", str(first))
    assert reload_config(str(second)).protocol.seed == 6
    assert reload_config().protocol.seed == 5


def test_sdp_tolerance_from_environment(monkeypatch):
    monkeypatch.setenv("QSD_SDP_EPS", "1e-7")
    assert load_config().protocol.sdp_eps == 1e-7

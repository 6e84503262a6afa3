"""Shared fixtures for the qsd test suite"""

import os
from pathlib import Path

import numpy as np
import pytest

import config.settings as settings
from config.settings import get_config
from src.core.circuit import circuit, gate, parse_circuit

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(autouse=True)
def fresh_config(monkeypatch):
    """Every test starts from the default configuration"""
    for var in list(os.environ):
        if var.startswith("QSD_"):
            monkeypatch.delenv(var)
    monkeypatch.setattr(settings, "_config_file", None)
    get_config.cache_clear()
    yield
    get_config.cache_clear()


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def identity1():
    return circuit(1, [], [0])


@pytest.fixture
def not1():
    return circuit(1, [gate("x", 0)], [0])


@pytest.fixture
def hadamard1():
    return circuit(1, [gate("h", 0)], [0])


@pytest.fixture
def bell_half():
    return parse_circuit("qubits 2\noutputs 0\nh 0\ncx 0 1\n")


def ket(*bits):
    v = np.zeros(2 ** len(bits), dtype=np.complex128)
    v[int("".join(str(b) for b in bits), 2)] = 1.0
    return v


PLUS = np.array([1, 1], dtype=np.complex128) / np.sqrt(2)

"""Tests for circuit-to-state semantics and the brute-force QSD oracle"""

import numpy as np
import pytest

from src.core.circuit import circuit, gate
from src.core.errors import ArgumentError
from src.core.states import QsdDecision, QsdInstance, decide_qsd, prepare_mixed, prepare_pure
from tests.conftest import ket


class TestPrepare:
    def test_plus_state(self, hadamard1):
        assert np.allclose(prepare_mixed(hadamard1), [[0.5, 0.5], [0.5, 0.5]])

    def test_bell_half_is_maximally_mixed(self, bell_half):
        assert np.allclose(prepare_mixed(bell_half), np.eye(2) / 2)

    def test_second_qubit_of_rotated_bell(self):
        c = circuit(2, [gate("h", 0), gate("cx", 0, 1), gate("h", 0)], [1])
        assert np.allclose(prepare_mixed(c), np.diag([0.5, 0.5]))

    def test_output_order_is_respected(self):
        c = circuit(2, [gate("x", 1)], [1, 0])
        assert np.allclose(prepare_mixed(c), np.diag([0, 0, 1, 0]))

    def test_pure_states(self, not1, bell_half):
        assert np.allclose(prepare_pure(circuit(2)), ket(0, 0))
        assert np.allclose(prepare_pure(not1), ket(1))
        assert np.allclose(prepare_pure(bell_half), (ket(0, 0) + ket(1, 1)) / np.sqrt(2))


class TestInstance:
    def test_thresholds_validated(self, identity1):
        with pytest.raises(ArgumentError):
            QsdInstance(identity1, identity1, 0.5, 0.5)
        with pytest.raises(ArgumentError):
            QsdInstance(identity1, identity1, -0.1, 0.5)

    def test_output_sizes_must_match(self, identity1, bell_half):
        two = circuit(2, [], [0, 1])
        with pytest.raises(ArgumentError):
            QsdInstance(identity1, two, 0.1, 0.9)

    def test_require_polarizable(self, identity1):
        QsdInstance(identity1, identity1, 0.1, 0.9).require_polarizable()
        with pytest.raises(ArgumentError, match="alpha >= beta"):
            QsdInstance(identity1, identity1, 0.5, 0.6).require_polarizable()


class TestDecide:
    @pytest.mark.parametrize("method", ["eig", "charpoly"])
    def test_equal_circuits(self, hadamard1, method):
        outcome = decide_qsd(QsdInstance(hadamard1, hadamard1, 0.1, 0.9), method=method)
        assert outcome.decision is QsdDecision.NO
        assert outcome.distance == pytest.approx(0.0, abs=1e-8)

    @pytest.mark.parametrize("method", ["eig", "charpoly"])
    def test_orthogonal_states(self, identity1, not1, method):
        outcome = decide_qsd(QsdInstance(identity1, not1, 0.1, 0.9), method=method)
        assert outcome.decision is QsdDecision.YES
        assert outcome.distance == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("method", ["eig", "charpoly"])
    def test_promise_violated(self, identity1, hadamard1, method):
        outcome = decide_qsd(QsdInstance(identity1, hadamard1, 0.1, 0.9), method=method)
        assert outcome.decision is QsdDecision.PROMISE_VIOLATED
        assert outcome.distance == pytest.approx(0.7071068, abs=1e-6)
        assert outcome.to_dict()["decision"] == "promise-violated"

    def test_unknown_method(self, identity1):
        with pytest.raises(ArgumentError):
            decide_qsd(QsdInstance(identity1, identity1, 0.1, 0.9), method="guess")

"""Tests for the circuit IR, its simulator and the .qc text format"""

import numpy as np
import pytest

from src.core.circuit import (
    Gate,
    add_control,
    adjoint,
    apply_circuit,
    basis_state,
    circuit,
    circuit_unitary,
    compose,
    gate,
    parallel,
    parse_circuit,
    read_circuit,
    relabel,
    repeat_parallel,
    serialize_circuit,
    unitary_gate,
    write_circuit,
    zero_state,
)
from src.core.errors import ArgumentError, CapacityError, ParseError
from src.core.sampling import random_circuit
from tests.conftest import PLUS, ket


class TestGates:
    def test_preset_arity_checked(self):
        with pytest.raises(ArgumentError):
            gate("cx", 0)

    def test_unknown_mnemonic(self):
        with pytest.raises(ArgumentError):
            gate("foo", 0)

    def test_non_unitary_rejected(self):
        with pytest.raises(ArgumentError):
            unitary_gate([[1, 1], [0, 1]], [0])

    def test_duplicate_targets_rejected(self):
        with pytest.raises(ArgumentError):
            Gate(np.eye(4), (1, 1))

    def test_target_outside_width(self):
        with pytest.raises(ArgumentError):
            circuit(1, [gate("x", 1)])


class TestSimulation:
    def test_bell_circuit(self):
        c = circuit(2, [gate("h", 0), gate("cx", 0, 1)])
        psi = apply_circuit(c, zero_state(2))
        assert np.allclose(psi, (ket(0, 0) + ket(1, 1)) / np.sqrt(2))

    def test_qubit_zero_is_most_significant(self):
        c = circuit(2, [gate("x", 0)])
        assert np.allclose(apply_circuit(c, zero_state(2)), ket(1, 0))

    def test_swap(self):
        c = circuit(2, [gate("swap", 0, 1)])
        assert np.allclose(apply_circuit(c, ket(1, 0)), ket(0, 1))

    def test_basis_state_bit_order(self):
        assert np.allclose(basis_state([1, 0, 1]), ket(1, 0, 1))
        assert np.argmax(np.abs(basis_state([0, 1]))) == 1

    @pytest.mark.parametrize("bits", [[], [2], [0, -1]])
    def test_basis_state_rejects(self, bits):
        with pytest.raises(ArgumentError):
            basis_state(bits)

    def test_zero_state_needs_a_qubit(self):
        with pytest.raises(ArgumentError):
            zero_state(0)

    def test_state_dimension_mismatch(self):
        with pytest.raises(ArgumentError):
            apply_circuit(circuit(2), zero_state(1))

    def test_unitary_matches_simulation(self, rng):
        c = random_circuit(3, 12, rng)
        u = circuit_unitary(c)
        psi = rng.normal(size=8) + 1j * rng.normal(size=8)
        assert np.allclose(u @ psi, apply_circuit(c, psi))

    def test_width_cap(self, monkeypatch):
        monkeypatch.setenv("QSD_MAX_CIRCUIT_QUBITS", "3")
        from config.settings import get_config

        get_config.cache_clear()
        with pytest.raises(CapacityError):
            zero_state(4)


class TestCombinators:
    def test_adjoint_of_s(self):
        inv = adjoint(circuit(1, [gate("s", 0)]))
        assert inv.gates[0].label == "sdg"
        assert np.allclose(circuit_unitary(inv), np.diag([1, -1j]))

    def test_adjoint_undoes_circuit(self, rng):
        c = random_circuit(3, 10, rng)
        both = compose(c, adjoint(c))
        assert np.allclose(circuit_unitary(both), np.eye(8), atol=1e-10)

    def test_add_control_on_zero_is_identity(self):
        controlled = add_control(circuit(1, [gate("x", 0)], [0]))
        assert controlled.width == 2
        assert np.allclose(apply_circuit(controlled, ket(0, 0)), ket(0, 0))
        assert np.allclose(apply_circuit(controlled, ket(0, 1)), ket(1, 1))

    def test_add_control_collision(self):
        with pytest.raises(ArgumentError):
            add_control(circuit(2, [gate("x", 0)], [0]), control=0)

    def test_add_control_on_idle_qubit(self):
        c = circuit(2, [gate("x", 0)], [0])
        controlled = add_control(c, control=1)
        assert controlled.width == 2
        assert controlled.gates[0].targets == (1, 0)
        assert controlled.gates[0].label == "cx"

    def test_add_control_commutes_with_compose(self, rng):
        for _ in range(10):
            a = random_circuit(2, 8, rng)
            b = random_circuit(2, 8, rng)
            lhs = add_control(compose(a, b))
            rhs = compose(add_control(a), add_control(b))
            assert lhs.width == rhs.width == 3
            assert np.allclose(circuit_unitary(lhs), circuit_unitary(rhs), atol=1e-10)

    def test_compose_shares_low_qubits(self):
        a = circuit(1, [gate("h", 0)], [0])
        b = circuit(1, [gate("h", 0)], [0])
        both = compose(a, b)
        assert both.width == 1
        assert np.allclose(apply_circuit(both, ket(0)), ket(0))

    def test_compose_wiring_to_fresh_qubit(self):
        a = circuit(1, [gate("x", 0)], [0])
        b = circuit(1, [gate("x", 0)], [0])
        both = compose(a, b, wiring={0: 1})
        assert both.width == 2
        assert both.outputs == (0, 1)
        assert np.allclose(apply_circuit(both, ket(0, 0)), ket(1, 1))

    def test_parallel(self):
        a = circuit(1, [gate("x", 0)], [0])
        b = circuit(2, [gate("h", 1)], [1])
        p = parallel(a, b)
        assert p.width == 3
        assert p.outputs == (0, 2)
        expected = np.kron(ket(1), np.kron(ket(0), PLUS))
        assert np.allclose(apply_circuit(p, zero_state(3)), expected)

    def test_repeat_parallel(self):
        c = repeat_parallel(circuit(1, [gate("x", 0)], [0]), 3)
        assert c.width == 3
        assert np.allclose(apply_circuit(c, zero_state(3)), ket(1, 1, 1))

    def test_relabel_must_be_injective(self):
        with pytest.raises(ArgumentError):
            relabel(circuit(2), [0, 0])


class TestTextFormat:
    def test_parse_bell(self):
        c = parse_circuit("qubits 2\noutputs 0 1\nh 0\ncx 0 1\n")
        assert c.width == 2
        assert c.outputs == (0, 1)
        assert [g.label for g in c.gates] == ["h", "cx"]

    def test_parse_inline_matrix(self):
        c = parse_circuit("qubits 1\noutputs 0\nu 1 0 [ 0 1 1 0 ]\n")
        assert np.allclose(c.gates[0].matrix, [[0, 1], [1, 0]])

    def test_parse_comments_and_empty_outputs(self):
        c = parse_circuit("# prepares nothing\nqubits 1\noutputs\n")
        assert c.outputs == ()
        assert c.gates == ()

    def test_unknown_mnemonic_reports_line(self):
        with pytest.raises(ParseError) as info:
            parse_circuit("qubits 1\noutputs 0\nbadgate 0\n")
        assert info.value.line == 3
        assert info.value.column == 1

    @pytest.mark.parametrize(
        "text",
        [
            "qubits 0\noutputs\n",
            "qubits 1\noutputs 1\n",
            "qubits 2\noutputs 0 0\n",
            "qubits 1\noutputs 0\nu 1 0 [ 1 1 0 1 ]\n",
            "qubits 1\noutputs 0\nu 1 0 [ 1 0 0 ]\n",
            "qubits 1\noutputs 0\ncx 0\n",
            "outputs 0\n",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            parse_circuit(text)

    def test_serialize_writes_header_comments(self):
        text = serialize_circuit(circuit(1, [gate("x", 0)]), ["r=2", "s=50"])
        assert text.splitlines()[:3] == ["# r=2", "# s=50", "qubits 1"]

    def test_serialized_text_parses_back(self, rng, tmp_path):
        for depth in (0, 5, 20):
            c = random_circuit(3, depth, rng, outputs=(2, 0))
            path = tmp_path / f"c{depth}.qc"
            write_circuit(c, path)
            again = read_circuit(path)
            assert again == c
            assert np.allclose(circuit_unitary(again), circuit_unitary(c))

    def test_random_circuits_survive_the_text_format(self, rng):
        for _ in range(200):
            width = int(rng.integers(1, 5))
            outputs = tuple(int(q) for q in rng.permutation(width)[: int(rng.integers(0, width + 1))])
            c = random_circuit(width, int(rng.integers(0, 25)), rng, outputs=outputs)
            again = parse_circuit(serialize_circuit(c))
            assert again.width == c.width
            assert again.outputs == c.outputs
            assert np.allclose(circuit_unitary(again), circuit_unitary(c), atol=1e-12)

    def test_fixture_files(self, fixtures_dir):
        assert read_circuit(fixtures_dir / "zero.qc").gates == ()
        assert read_circuit(fixtures_dir / "bell_half.qc").outputs == (0,)


def test_compose_bell_with_fresh_ancilla(bell_half):
    """Bell preparation followed by an X on a fresh third qubit"""
    flip = circuit(1, [gate("x", 0)], [0])
    c = compose(bell_half, flip, wiring={0: 2})
    assert c.width == 3
    assert c.outputs == (0, 2)
    expected = (ket(0, 0, 1) + ket(1, 1, 1)) / np.sqrt(2)
    assert np.allclose(apply_circuit(c, zero_state(3)), expected)

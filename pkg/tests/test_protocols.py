"""Tests for the distance test, the closeness test and the prover strategies"""

import numpy as np
import pytest

from src.core.circuit import circuit, gate
from src.core.errors import ArgumentError
from src.core.linalg import fidelity, projector, purify
from src.core.polarize import PolarizationParams
from src.core.protocols import (
    apply_env,
    helstrom,
    overlap,
    run_closeness_test,
    run_distance_test,
    sample_acceptance,
    simulator_views_closeness,
    simulator_views_distance,
    success_probability,
    uhlmann_unitary,
    zero_knowledge_gap,
)
from src.core.sampling import random_circuit, random_density, random_unitary
from src.core.states import QsdInstance
from src.provers import (
    FixedChannelProver,
    FixedUnitaryProver,
    HonestProver,
    RandomProver,
    parse_prover,
)
from src.provers.base import check_kraus
from tests.conftest import PLUS, ket

TRIVIAL = PolarizationParams(n=1, r=1, s=1)


def _instance(q0, q1):
    return QsdInstance(q0, q1, 0.0, 1.0)


class TestHelstrom:
    @pytest.mark.parametrize(
        "xi0,xi1,expected",
        [
            (projector(ket(0)), projector(ket(1)), 1.0),
            (projector(ket(0)), projector(ket(0)), 0.5),
            (projector(ket(0)), projector(PLUS), 0.8535534),
        ],
    )
    def test_optimal_success(self, xi0, xi1, expected):
        m = helstrom(xi0, xi1)
        assert m.p_opt == pytest.approx(expected, abs=1e-7)
        assert success_probability(xi0, xi1, m.pi0, m.pi1) == pytest.approx(m.p_opt, abs=1e-9)

    def test_ties_go_to_first_outcome(self):
        m = helstrom(np.eye(2) / 2, np.eye(2) / 2)
        assert np.allclose(m.pi0, np.eye(2))

    def test_no_measurement_beats_helstrom(self, rng):
        xi0, xi1 = random_density(4, rng), random_density(4, rng)
        best = helstrom(xi0, xi1).p_opt
        for _ in range(20):
            u = random_unitary(4, rng)
            e0 = u @ np.diag([1, 1, 0, 0]) @ u.conj().T
            assert success_probability(xi0, xi1, e0, np.eye(4) - e0) <= best + 1e-9


class TestUhlmann:
    def test_equal_states(self, rng):
        phi = rng.normal(size=4) + 1j * rng.normal(size=4)
        phi /= np.linalg.norm(phi)
        u = uhlmann_unitary(phi, phi, (2, 2))
        assert abs(overlap(apply_env(phi, u, (2, 2)), phi)) == pytest.approx(1.0)

    def test_purifications_of_the_same_state(self, rng):
        rho = random_density(2, rng)
        phi = purify(rho)
        psi = apply_env(phi, random_unitary(2, rng), (2, 2))
        u = uhlmann_unitary(phi, psi, (2, 2))
        assert overlap(apply_env(phi, u, (2, 2)), psi).real == pytest.approx(1.0, abs=1e-9)

    def test_overlap_equals_fidelity(self):
        phi = np.kron(ket(0), ket(0))
        psi = np.kron(PLUS, ket(0))
        u = uhlmann_unitary(phi, psi, (2, 2))
        value = overlap(apply_env(phi, u, (2, 2)), psi)
        assert value.real == pytest.approx(0.7071068, abs=1e-7)
        assert value.real == pytest.approx(fidelity(projector(ket(0)), projector(PLUS)), abs=1e-9)
        assert np.allclose(u.conj().T @ u, np.eye(2))

    def test_split_mismatch(self):
        with pytest.raises(ArgumentError):
            uhlmann_unitary(ket(0, 0), ket(0, 0), (2, 4))

    def test_non_unit_vector_rejected(self):
        with pytest.raises(ArgumentError, match="phi"):
            uhlmann_unitary(2 * ket(0, 0), ket(0, 0), (2, 2))
        with pytest.raises(ArgumentError, match="psi"):
            uhlmann_unitary(ket(0, 0), np.zeros(4), (2, 2))


class TestDistanceTest:
    def test_orthogonal_states(self, identity1, not1):
        t = run_distance_test(_instance(identity1, not1), HonestProver(), TRIVIAL)
        assert t.acceptance == pytest.approx(1.0)
        assert t.completeness_error == pytest.approx(0.0, abs=1e-12)

    def test_indistinguishable_states(self, hadamard1):
        for prover in (HonestProver(), RandomProver(3)):
            t = run_distance_test(_instance(hadamard1, hadamard1), prover, TRIVIAL)
            assert t.acceptance == pytest.approx(0.5, abs=1e-9)

    def test_xor_stage_squares_the_distance(self, identity1, hadamard1):
        params = PolarizationParams(n=1, r=2, s=1)
        t = run_distance_test(_instance(identity1, hadamard1), HonestProver(), params)
        assert t.acceptance == pytest.approx(0.75, abs=1e-9)
        assert t.extras["distance"] == pytest.approx(0.5, abs=1e-9)

    def test_trivial_params(self, identity1, hadamard1):
        t = run_distance_test(_instance(identity1, hadamard1), HonestProver(), TRIVIAL)
        assert t.acceptance == pytest.approx(0.8535534, abs=1e-7)
        assert t.extras["p_opt"] == pytest.approx(t.acceptance)

    def test_cheating_provers_stay_below_optimum(self, identity1, hadamard1):
        inst = _instance(identity1, hadamard1)
        for seed in range(5):
            t = run_distance_test(inst, RandomProver(seed), TRIVIAL)
            assert t.acceptance <= t.extras["p_opt"] + 1e-9
            assert t.prover == f"random:{seed}"

    def test_fixed_unitary_prover(self, identity1, not1):
        flip = FixedUnitaryProver([[0, 1], [1, 0]])
        t = run_distance_test(_instance(identity1, not1), flip, TRIVIAL)
        assert t.acceptance == pytest.approx(0.0, abs=1e-12)
        assert t.prover == "fixed-unitary"


class TestClosenessTest:
    def test_equal_circuits(self, hadamard1):
        t = run_closeness_test(_instance(hadamard1, hadamard1), HonestProver(), TRIVIAL)
        assert t.acceptance == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal_states(self, identity1, not1):
        t = run_closeness_test(_instance(identity1, not1), HonestProver(), TRIVIAL)
        assert t.acceptance == pytest.approx(0.0, abs=1e-9)

    def test_acceptance_is_fidelity_squared(self, identity1, hadamard1):
        t = run_closeness_test(_instance(identity1, hadamard1), HonestProver(), TRIVIAL)
        assert t.acceptance == pytest.approx(0.5, abs=1e-9)
        assert t.extras["fidelity_squared"] == pytest.approx(0.5, abs=1e-9)
        assert t.acceptance >= t.extras["completeness_lower"] - 1e-9

    def test_entangled_preparation(self, bell_half, hadamard1):
        t = run_closeness_test(_instance(bell_half, hadamard1), HonestProver(), TRIVIAL)
        assert t.acceptance == pytest.approx(0.5, abs=1e-9)

    def test_cheating_provers_stay_below_fidelity_squared(self, identity1, hadamard1):
        inst = _instance(identity1, hadamard1)
        for seed in range(5):
            t = run_closeness_test(inst, RandomProver(seed), TRIVIAL)
            assert t.acceptance <= t.extras["fidelity_squared"] + 1e-9

    def test_prover_dimension_checked(self, identity1, hadamard1):
        wide = FixedUnitaryProver(np.eye(8))
        with pytest.raises(ArgumentError):
            run_closeness_test(_instance(identity1, hadamard1), wide, TRIVIAL)


@pytest.mark.slow
class TestRandomInstances:
    """Honest acceptance hits the optimum and random provers never beat it"""

    def _instances(self, seed, count):
        rng = np.random.default_rng(seed)
        for _ in range(count):
            q0 = random_circuit(2, int(rng.integers(1, 8)), rng, outputs=(0,))
            q1 = random_circuit(2, int(rng.integers(1, 8)), rng, outputs=(0,))
            yield _instance(q0, q1), int(rng.integers(0, 2 ** 31))

    def test_distance_instances(self):
        for inst, prover_seed in self._instances(17, 200):
            honest = run_distance_test(inst, HonestProver(), TRIVIAL)
            p_opt = honest.extras["p_opt"]
            assert honest.acceptance == pytest.approx(p_opt, abs=1e-8)
            assert p_opt == pytest.approx(0.5 + 0.5 * honest.extras["distance"], abs=1e-8)
            cheat = run_distance_test(inst, RandomProver(prover_seed), TRIVIAL)
            assert cheat.acceptance <= p_opt + 1e-8

    def test_closeness_instances(self):
        for inst, prover_seed in self._instances(23, 200):
            honest = run_closeness_test(inst, HonestProver(), TRIVIAL)
            bound = honest.extras["fidelity_squared"]
            assert honest.acceptance == pytest.approx(bound, abs=1e-7)
            assert honest.acceptance >= honest.extras["completeness_lower"] - 1e-9
            cheat = run_closeness_test(inst, RandomProver(prover_seed), TRIVIAL)
            assert cheat.acceptance <= bound + 1e-7


class TestZeroKnowledge:
    def test_first_distance_view_is_exact(self, identity1, hadamard1):
        inst = _instance(identity1, hadamard1)
        honest = run_distance_test(inst, HonestProver(), TRIVIAL).views
        simulated = simulator_views_distance(inst, TRIVIAL)
        assert np.allclose(honest[0], simulated[0])

    def test_distance_gap_equals_error(self, identity1, hadamard1):
        inst = _instance(identity1, hadamard1)
        t = run_distance_test(inst, HonestProver(), TRIVIAL)
        gap = zero_knowledge_gap(t.views, simulator_views_distance(inst, TRIVIAL))
        assert gap == pytest.approx(t.zk_bound, abs=1e-9)

    def test_closeness_views_match_for_equal_circuits(self, hadamard1):
        inst = _instance(hadamard1, hadamard1)
        t = run_closeness_test(inst, HonestProver(), TRIVIAL)
        assert zero_knowledge_gap(t.views, simulator_views_closeness(inst, TRIVIAL)) <= 1e-7

    def test_closeness_gap_within_bound(self, identity1):
        tilt = circuit(1, [gate("h", 0), gate("t", 0), gate("h", 0)], [0])
        inst = _instance(identity1, tilt)
        t = run_closeness_test(inst, HonestProver(), TRIVIAL)
        gap = zero_knowledge_gap(t.views, simulator_views_closeness(inst, TRIVIAL))
        assert gap <= t.zk_bound + 1e-9

    def test_view_count_mismatch(self):
        with pytest.raises(ArgumentError):
            zero_knowledge_gap([np.eye(2)], [])


class TestTranscript:
    def test_digests_and_dict(self, identity1, hadamard1):
        t = run_distance_test(_instance(identity1, hadamard1), HonestProver(), TRIVIAL)
        digests = t.view_digests()
        assert len(digests) == 2 and all(len(d) == 16 for d in digests)
        again = run_distance_test(_instance(identity1, hadamard1), HonestProver(), TRIVIAL)
        assert again.view_digests() == digests
        data = t.to_dict()
        assert data["protocol"] == "distance"
        assert data["params"]["r"] == 1
        assert "p_opt" in data

    def test_sampling(self, identity1, not1, hadamard1):
        certain = run_distance_test(_instance(identity1, not1), HonestProver(), TRIVIAL)
        assert sample_acceptance(certain, 100, seed=1) == 100
        assert sample_acceptance(certain, 0, seed=1) == 0
        coin = run_distance_test(_instance(hadamard1, hadamard1), HonestProver(), TRIVIAL)
        assert sample_acceptance(coin, 1000, seed=5) == sample_acceptance(coin, 1000, seed=5)
        with pytest.raises(ArgumentError):
            sample_acceptance(coin, -1)


class TestProvers:
    def test_parse_known_kinds(self, tmp_path):
        assert parse_prover("honest").kind == "honest"
        assert parse_prover("random:7").kind == "random:7"
        unitary = tmp_path / "flip.mat"
        unitary.write_text("matrix 2 2\n0 1\n1 0\n")
        assert parse_prover(f"file:{unitary}").kind == "fixed-unitary"
        channel = tmp_path / "dephase.mat"
        channel.write_text("matrix 2 2\n1 0\n0 0\nmatrix 2 2\n0 0\n0 1\n")
        assert parse_prover(f"file:{channel}").kind == "fixed-channel"

    @pytest.mark.parametrize("text", ["", "oracle", "random:", "random:x"])
    def test_parse_rejects(self, text):
        with pytest.raises(ArgumentError):
            parse_prover(text)

    def test_random_prover_is_a_channel(self):
        ops = RandomProver(11).kraus(4)
        check_kraus(ops)
        assert all(np.allclose(a, b) for a, b in zip(ops, RandomProver(11).kraus(4)))

    def test_incomplete_kraus_rejected(self):
        with pytest.raises(ArgumentError):
            FixedChannelProver([np.diag([1, 0])])
        with pytest.raises(ArgumentError):
            check_kraus([])

    def test_non_unitary_rejected(self):
        with pytest.raises(ArgumentError):
            FixedUnitaryProver([[1, 1], [0, 1]])

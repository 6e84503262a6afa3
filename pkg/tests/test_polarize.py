"""Tests for the polarization stages, circuit level and operator level"""

import math

import numpy as np
import pytest

from src.core.circuit import circuit, serialize_circuit
from src.core.errors import ArgumentError, CapacityError
from src.core.linalg import projector, trace_distance
from src.core.polarize import (
    PolarizationParams,
    amplify_states,
    amplify_transform,
    derive_params,
    polarize,
    polarize_bounds,
    polarize_states,
    xor_states,
    xor_transform,
)
from src.core.sampling import random_density
from src.core.states import prepare_mixed
from tests.conftest import PLUS, ket


def _distance(pair):
    return trace_distance(prepare_mixed(pair[0]), prepare_mixed(pair[1]))


class TestParams:
    def test_derived_defaults(self):
        params = derive_params(0.1, 0.9, 2)
        assert (params.r, params.s, params.n) == (2, 50, 2)

    @pytest.mark.parametrize("alpha,beta", [(0.5, 0.6), (0.81, 0.9), (0.3, 0.2)])
    def test_unpolarizable_thresholds(self, alpha, beta):
        with pytest.raises(ArgumentError):
            derive_params(alpha, beta, 1)

    def test_exponents_positive(self):
        with pytest.raises(ArgumentError):
            PolarizationParams(n=1, r=0, s=1)

    def test_header_lines_parse_back(self):
        params = derive_params(0.1, 0.9, 2)
        text = serialize_circuit(circuit(1), params.header_lines())
        assert PolarizationParams.from_header(text) == params

    def test_missing_header(self):
        with pytest.raises(ArgumentError):
            PolarizationParams.from_header("qubits 1\noutputs 0\n")


class TestXor:
    def test_single_block_keeps_states(self, identity1, hadamard1):
        r0, r1 = xor_transform(identity1, hadamard1, 1)
        assert np.allclose(prepare_mixed(r0), projector(ket(0)))
        assert np.allclose(prepare_mixed(r1), projector(PLUS))

    def test_orthogonal_pair_stays_at_one(self, identity1, not1):
        assert _distance(xor_transform(identity1, not1, 2)) == pytest.approx(1.0)

    def test_distance_is_raised_to_r(self, identity1, hadamard1):
        assert _distance(xor_transform(identity1, hadamard1, 2)) == pytest.approx(0.5)

    def test_circuit_matches_operator_level(self, identity1, hadamard1):
        r0, r1 = xor_transform(identity1, hadamard1, 3)
        s0, s1 = xor_states(projector(ket(0)), projector(PLUS), 3)
        assert np.allclose(prepare_mixed(r0), s0)
        assert np.allclose(prepare_mixed(r1), s1)

    def test_operator_level_power_law(self, rng):
        rho0, rho1 = random_density(2, rng), random_density(2, rng)
        d = trace_distance(rho0, rho1)
        for r in (1, 2, 3):
            assert trace_distance(*xor_states(rho0, rho1, r)) == pytest.approx(d ** r, abs=1e-9)

    def test_workers_match_serial(self, rng):
        rho0, rho1 = random_density(2, rng), random_density(2, rng)
        serial = xor_states(rho0, rho1, 4, workers=1)
        threaded = xor_states(rho0, rho1, 4, workers=3)
        assert np.allclose(serial[0], threaded[0])
        assert np.allclose(serial[1], threaded[1])

    def test_output_sizes_must_match(self, identity1):
        with pytest.raises(ArgumentError):
            xor_transform(identity1, circuit(2), 2)


class TestAmplify:
    def test_single_copy(self, identity1, hadamard1):
        a0, a1 = amplify_transform(identity1, hadamard1, 1)
        assert a0 == identity1 and a1 == hadamard1

    def test_orthogonal_pure_states(self, identity1, not1):
        assert _distance(amplify_transform(identity1, not1, 3)) == pytest.approx(1.0)

    def test_two_copies_of_zero_and_plus(self, identity1, hadamard1):
        # overlap <00|++> = 1/2, so the distance is sqrt(3)/2
        assert _distance(amplify_transform(identity1, hadamard1, 2)) == pytest.approx(0.8660254, abs=1e-7)
        states = amplify_states(projector(ket(0)), projector(PLUS), 2)
        assert trace_distance(*states) == pytest.approx(math.sqrt(3) / 2)

    def test_width_cap(self, identity1, not1):
        with pytest.raises(CapacityError):
            amplify_transform(identity1, not1, 21)


class TestPolarize:
    def test_trivial_override_is_identity_on_distance(self, identity1, hadamard1):
        r0, r1, params = polarize(identity1, hadamard1, 1, override=(1, 1))
        assert (params.r, params.s, params.n) == (1, 1, 1)
        assert _distance((r0, r1)) == pytest.approx(1 / math.sqrt(2))

    def test_distance_one_is_a_fixed_point(self, identity1, not1):
        r0, r1, params = polarize(identity1, not1, 2, override=(2, 2))
        assert params.n == 2
        assert _distance((r0, r1)) == pytest.approx(1.0, abs=1e-9)

    def test_default_params_exceed_circuit_cap(self, identity1, not1):
        with pytest.raises(CapacityError):
            polarize(identity1, not1, 2, alpha=0.1, beta=0.9)

    def test_requires_thresholds_or_override(self, identity1, not1):
        with pytest.raises(ArgumentError):
            polarize(identity1, not1, 1)

    def test_operator_pipeline_within_bounds(self, rng):
        params = PolarizationParams(n=2, r=2, s=2)
        for _ in range(5):
            rho0, rho1 = random_density(2, rng), random_density(2, rng)
            d = trace_distance(rho0, rho1)
            lower, upper = polarize_bounds(d, params)
            out = trace_distance(*polarize_states(rho0, rho1, params))
            assert lower - 1e-9 <= out <= upper + 1e-9


class TestBounds:
    def test_extremes(self):
        params = PolarizationParams(n=2, r=2, s=50)
        assert polarize_bounds(1.0, params) == pytest.approx((1.0, 1.0))
        assert polarize_bounds(0.0, params) == pytest.approx((0.0, 0.0))

    def test_interior_value(self):
        params = PolarizationParams(n=1, r=2, s=2)
        d1 = 0.9 ** 2
        lower, upper = polarize_bounds(0.9, params)
        assert lower == pytest.approx(max(d1, 1 - math.exp(-2 * d1 * d1 / 2)))
        assert upper == pytest.approx(1.0)

    def test_out_of_range(self):
        with pytest.raises(ArgumentError):
            polarize_bounds(1.5, PolarizationParams(n=1, r=1, s=1))

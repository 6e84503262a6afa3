"""
Randomised property suite

Each property draws a random instance per trial and returns a slack: the
margin by which the inequality (or identity) holds, tolerance included.
A trial passes when its slack is nonnegative.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from threading import Lock
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from config.settings import get_config

from .errors import ArgumentError
from .linalg import (
    fidelity,
    partial_trace,
    positive_projection,
    projector,
    tensor,
    trace_distance,
    trace_norm,
)
from .polarize import PolarizationParams, amplify_states, polarize_bounds, polarize_states, xor_states, xor_transform
from .protocols import apply_env, helstrom, overlap, success_probability, uhlmann_unitary
from .sampling import random_circuit, random_density, random_pure, random_unitary
from .states import prepare_mixed

logger = logging.getLogger(__name__)

Trial = Callable[[np.random.Generator], float]


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    trial: Trial
    default_trials: int
    description: str


@dataclass
class CheckResult:
    """Outcome of one property over many trials"""
    name: str
    trials: int
    worst_slack: float
    passed: bool
    elapsed: float

    def to_dict(self):
        return {
            "name": self.name,
            "trials": self.trials,
            "worst_slack": self.worst_slack,
            "passed": self.passed,
            "elapsed": round(self.elapsed, 3),
        }


PROPERTIES: Dict[str, PropertyCheck] = {}


def register(name: str, default_trials: int, description: str):
    def wrap(fn: Trial) -> Trial:
        PROPERTIES[name] = PropertyCheck(name, fn, default_trials, description)
        return fn
    return wrap


def _qubits(rng: np.random.Generator, low: int = 1, high: int = 3) -> int:
    return 2 ** int(rng.integers(low, high + 1))


def _random_projection(dim: int, rng: np.random.Generator) -> np.ndarray:
    u = random_unitary(dim, rng)
    rank = int(rng.integers(0, dim + 1))
    cols = u[:, :rank]
    return cols @ cols.conj().T


def _random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


# ---------------------------------------------------------------------------
# Trace distance and fidelity
# ---------------------------------------------------------------------------

@register("fidelity", 1000, "1 - F <= D <= sqrt(1 - F^2)")
def check_fidelity_bracket(rng) -> float:
    d = _qubits(rng)
    rho, xi = random_density(d, rng), random_density(d, rng)
    f = min(1.0, fidelity(rho, xi))
    dist = trace_distance(rho, xi)
    return min(dist - (1.0 - f), math.sqrt(max(0.0, 1.0 - f * f)) - dist) + 1e-8


@register("fidelity_mult", 1000, "F(r1 (x) r2, x1 (x) x2) = F(r1, x1) F(r2, x2)")
def check_fidelity_mult(rng) -> float:
    d1, d2 = _qubits(rng, 1, 2), _qubits(rng, 1, 2)
    r1, x1 = random_density(d1, rng), random_density(d1, rng)
    r2, x2 = random_density(d2, rng), random_density(d2, rng)
    joint = fidelity(tensor(r1, r2), tensor(x1, x2))
    return 1e-8 - abs(joint - fidelity(r1, x1) * fidelity(r2, x2))


@register("trace_mult", 1000, "||A (x) B|| = 2 ||A|| ||B|| (halved norm)")
def check_trace_mult(rng) -> float:
    a = _random_hermitian(_qubits(rng, 1, 2), rng)
    b = _random_hermitian(_qubits(rng, 1, 2), rng)
    expected = 2.0 * trace_norm(a) * trace_norm(b)
    return 1e-8 * max(1.0, expected) - abs(trace_norm(tensor(a, b)) - expected)


@register("tensor_distance", 1000, "D(r0 (x) x0, r1 (x) x1) <= D(r0, r1) + D(x0, x1)")
def check_tensor_distance(rng) -> float:
    d1, d2 = _qubits(rng, 1, 2), _qubits(rng, 1, 2)
    r0, r1 = random_density(d1, rng), random_density(d1, rng)
    x0, x1 = random_density(d2, rng), random_density(d2, rng)
    joint = trace_distance(tensor(r0, x0), tensor(r1, x1))
    return trace_distance(r0, r1) + trace_distance(x0, x1) - joint + 1e-8


@register("projection_max", 500, "||X|| = tr(P+ X) >= tr(P X) for every projection P")
def check_projection_max(rng) -> float:
    d = _qubits(rng)
    x = random_density(d, rng) - random_density(d, rng)
    norm = trace_norm(x)
    attained = float(np.trace(positive_projection(x) @ x).real)
    other = abs(float(np.trace(_random_projection(d, rng) @ x).real))
    return min(1e-8 - abs(attained - norm), norm - other + 1e-8)


# ---------------------------------------------------------------------------
# Polarization
# ---------------------------------------------------------------------------

@register("xor", 1000, "XOR of two pairs has distance D(r0, r1) D(x0, x1)")
def check_xor(rng) -> float:
    d = _qubits(rng, 1, 1)
    rho0, rho1 = random_density(d, rng), random_density(d, rng)
    r = int(rng.integers(1, 4))
    a, b = xor_states(rho0, rho1, r, workers=1)
    return 1e-8 - abs(trace_distance(a, b) - trace_distance(rho0, rho1) ** r)


@register("xor_circuit", 100, "circuit XOR stage raises the distance to the power r")
def check_xor_circuit(rng) -> float:
    q0 = random_circuit(2, 4, rng, outputs=(0,))
    q1 = random_circuit(2, 4, rng, outputs=(0,))
    r = int(rng.integers(1, 4))
    a, b = xor_transform(q0, q1, r)
    before = trace_distance(prepare_mixed(q0), prepare_mixed(q1))
    after = trace_distance(prepare_mixed(a), prepare_mixed(b))
    return 1e-7 - abs(after - before ** r)


@register("amplify", 100, "1 - exp(-s d^2 / 2) <= D(r^s, x^s) <= s d")
def check_amplify(rng) -> float:
    d = _qubits(rng, 1, 2)
    rho, xi = random_density(d, rng), random_density(d, rng)
    s = int(rng.integers(1, 5))
    eps = trace_distance(rho, xi)
    a, b = amplify_states(rho, xi, s)
    exact = trace_distance(a, b)
    return min(exact - (1.0 - math.exp(-s * eps * eps / 2.0)), s * eps - exact) + 1e-8


@register("polarize_bounds", 50, "analytic interval brackets the polarized distance")
def check_polarize_bounds(rng) -> float:
    rho0, rho1 = random_density(2, rng), random_density(2, rng)
    r, s, n = (int(v) for v in rng.integers(1, 3, size=3))
    params = PolarizationParams(n=n, r=r, s=s)
    a, b = polarize_states(rho0, rho1, params)
    exact = trace_distance(a, b)
    lower, upper = polarize_bounds(trace_distance(rho0, rho1), params)
    return min(exact - lower, upper - exact) + 1e-8


# ---------------------------------------------------------------------------
# Protocol bounds
# ---------------------------------------------------------------------------

@register("helstrom", 500, "Helstrom measurement reaches 1/2 + D/2 and beats random measurements")
def check_helstrom(rng) -> float:
    d = _qubits(rng, 1, 2)
    xi0, xi1 = random_density(d, rng), random_density(d, rng)
    m = helstrom(xi0, xi1)
    reached = success_probability(xi0, xi1, m.pi0, m.pi1)
    e0 = _random_projection(d, rng)
    other = success_probability(xi0, xi1, e0, np.eye(d) - e0)
    return min(1e-8 - abs(reached - m.p_opt), m.p_opt - other + 1e-8)


@register("distance_soundness", 200, "cheating provers stay below 1/2 + D")
def check_distance_soundness(rng) -> float:
    from ..provers import RandomProver

    d = _qubits(rng, 1, 2)
    xi0, xi1 = random_density(d, rng), random_density(d, rng)
    e0, e1 = RandomProver(int(rng.integers(0, 2 ** 31))).distance_povm(xi0, xi1)
    acceptance = success_probability(xi0, xi1, e0, e1)
    optimum = helstrom(xi0, xi1).p_opt
    return min(optimum - acceptance, 0.5 + trace_distance(xi0, xi1) - acceptance) + 1e-8


def _pure_pair(rng):
    keep, env = _qubits(rng, 1, 2), _qubits(rng, 1, 2)
    return random_pure(keep * env, rng), random_pure(keep * env, rng), (keep, env)


def _reduced(v, split):
    return partial_trace(projector(v), list(split), [0])


@register("uhlmann", 200, "Uhlmann unitary reaches the fidelity and beats random unitaries")
def check_uhlmann(rng) -> float:
    phi, psi, split = _pure_pair(rng)
    f = fidelity(_reduced(phi, split), _reduced(psi, split), validate=False)
    reached = overlap(apply_env(phi, uhlmann_unitary(phi, psi, split), split), psi)
    other = abs(overlap(apply_env(phi, random_unitary(split[1], rng), split), psi))
    return min(1e-7 - abs(reached - f), f - other + 1e-8)


@register("closeness_soundness", 200, "cheating channels stay below F^2")
def check_closeness_soundness(rng) -> float:
    from ..provers import RandomProver

    phi, psi, split = _pure_pair(rng)
    f = fidelity(_reduced(phi, split), _reduced(psi, split), validate=False)
    kraus = RandomProver(int(rng.integers(0, 2 ** 31))).closeness_kraus(phi, psi, split)
    acceptance = sum(abs(overlap(apply_env(phi, k, split), psi)) ** 2 for k in kraus)
    return f * f - acceptance + 1e-8


@register("closeness1", 1000, "||(I (x) U) phi - psi|| <= sqrt(2 eps) with F = 1 - eps")
def check_closeness1(rng) -> float:
    phi, psi, split = _pure_pair(rng)
    f = fidelity(_reduced(phi, split), _reduced(psi, split), validate=False)
    eps = max(0.0, 1.0 - f)
    moved = apply_env(phi, uhlmann_unitary(phi, psi, split), split)
    return math.sqrt(2.0 * eps) - float(np.linalg.norm(moved - psi)) + 1e-7


# ---------------------------------------------------------------------------
# Batch runner
# ---------------------------------------------------------------------------

class PropertySuite:
    """
    Runs named properties over seeded random trials

    Every property draws from its own generator seeded with (seed, index),
    so results do not depend on the worker count or completion order.
    """

    def __init__(self, seed: Optional[int] = None, workers: Optional[int] = None):
        config = get_config()
        self.seed = config.protocol.seed if seed is None else seed
        self.workers = workers or config.protocol.workers

    @staticmethod
    def available() -> List[str]:
        return list(PROPERTIES)

    def check(self, name: str, trials: Optional[int] = None) -> CheckResult:
        """Run one property; ``trials`` defaults to the property's own count"""
        if name not in PROPERTIES:
            raise ArgumentError(f"unknown property {name!r} (available: {', '.join(PROPERTIES)})")
        prop = PROPERTIES[name]
        count = prop.default_trials if trials is None else trials
        if count < 1:
            raise ArgumentError(f"trials must be >= 1, got {count}")
        rng = np.random.default_rng([self.seed, list(PROPERTIES).index(name)])
        started = time.perf_counter()
        worst = math.inf
        for _ in range(count):
            worst = min(worst, prop.trial(rng))
        result = CheckResult(name, count, float(worst), worst >= 0.0, time.perf_counter() - started)
        if result.passed:
            logger.debug("%s: %d trials, worst slack %.3g", name, count, worst)
        else:
            logger.warning("%s failed: worst slack %.3g over %d trials", name, worst, count)
        return result

    def run(
        self,
        names: Optional[Sequence[str]] = None,
        trials: Optional[int] = None,
        progress: Optional[Callable[[CheckResult], None]] = None,
    ) -> List[CheckResult]:
        """
        Run several properties

        Args:
            names: Property names; default all registered properties
            trials: Trials per property; default each property's own count
            progress: Called with each result as it completes

        Returns:
            Results in the order of ``names``
        """
        names = list(names) if names else self.available()
        for name in names:
            if name not in PROPERTIES:
                raise ArgumentError(f"unknown property {name!r} (available: {', '.join(PROPERTIES)})")

        results: Dict[str, CheckResult] = {}
        lock = Lock()

        def check_one(name):
            result = self.check(name, trials)
            with lock:
                results[name] = result
                if progress:
                    progress(result)
            return result

        if self.workers > 1 and len(names) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                list(executor.map(check_one, names))
        else:
            for name in names:
                check_one(name)

        return [results[name] for name in names]

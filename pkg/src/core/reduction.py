"""
Honest-verifier proof systems and their reduction to QSD

Register layout of a proof system: verifier-private qubits V occupy
0..qv-1, message qubits M follow, prover-private qubits P come last.
Verifier circuits act on V+M, prover circuits on M+P. An m-message run
applies V_1, P_1, V_2, ..., P_{m/2}, V_k (k = m/2 + 1) to the all-zero
state and accepts when the output bit (a V qubit) reads 1.

Text format (``.qps``)::

    qv 2
    qm 1
    qp 1
    messages 2
    outbit 1
    simulator honest
    verifier 1
    h 0
    cx 0 2
    end
    prover 1
    end
    verifier 2
    cx 0 2
    end

``simulator <j> ... end`` blocks give circuits for the simulated view after
j messages; they may open with ``qubits`` / ``outputs`` lines and default
to the V+M+P register with V+M as outputs.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import cvxpy as cp
import numpy as np

from config.settings import get_config

from .circuit import (
    Circuit,
    CircuitParser,
    Gate,
    adjoint,
    canonicalize_outputs,
    circuit_unitary,
    compose,
    gate,
    relabel,
)
from .errors import ArgumentError, CapacityError, ParseError, PreconditionError, UnsupportedError
from .linalg import ComplexMatrix, check_dim, purify, tensor_all, trace_distance
from .protocols import align_isometry, uhlmann_unitary
from .sampling import random_unitary, rng_from
from .states import prepare_mixed, prepare_pure

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProofSystemSpec:
    """Verifier and (honest) prover circuits of an m-message proof system"""
    qv: int
    qm: int
    qp: int
    messages: int
    outbit: int
    verifiers: Tuple[Circuit, ...]
    provers: Tuple[Circuit, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "verifiers", tuple(self.verifiers))
        object.__setattr__(self, "provers", tuple(self.provers))
        if self.qv < 1 or self.qm < 1 or self.qp < 0:
            raise ArgumentError(f"register sizes qv={self.qv} qm={self.qm} qp={self.qp} are invalid")
        if self.messages < 2 or self.messages % 2:
            raise ArgumentError(f"message count must be even and >= 2, got {self.messages}")
        if not 0 <= self.outbit < self.qv:
            raise ArgumentError(f"outbit {self.outbit} is not a verifier qubit (qv={self.qv})")
        if len(self.verifiers) != self.rounds:
            raise ArgumentError(f"expected {self.rounds} verifier circuits, got {len(self.verifiers)}")
        if self.provers and len(self.provers) != self.messages // 2:
            raise ArgumentError(f"expected {self.messages // 2} prover circuits, got {len(self.provers)}")
        for i, v in enumerate(self.verifiers, start=1):
            if v.width != self.qv + self.qm:
                raise ArgumentError(f"verifier {i} has width {v.width}, expected {self.qv + self.qm}")
        for j, p in enumerate(self.provers, start=1):
            if p.width != self.qm + self.qp:
                raise ArgumentError(f"prover {j} has width {p.width}, expected {self.qm + self.qp}")

    @property
    def rounds(self) -> int:
        """k = m/2 + 1"""
        return self.messages // 2 + 1

    @property
    def width(self) -> int:
        return self.qv + self.qm + self.qp

    @property
    def view_qubits(self) -> Tuple[int, ...]:
        return tuple(range(self.qv + self.qm))

    def verifier_on_register(self, i: int) -> Circuit:
        """V_i (1-based) embedded into the full register"""
        v = self.verifiers[i - 1]
        return relabel(v, list(range(v.width)), self.width, self.view_qubits)

    def prover_on_register(self, j: int) -> Circuit:
        """P_j (1-based) embedded into the full register"""
        if not self.provers:
            raise ArgumentError("proof system has no honest prover circuits")
        p = self.provers[j - 1]
        return relabel(p, [self.qv + q for q in range(p.width)], self.width, self.view_qubits)

    def operations(self) -> List[Circuit]:
        """V_1, P_1, V_2, ..., P_{m/2}, V_k on the full register"""
        ops = []
        for i in range(1, self.rounds):
            ops.append(self.verifier_on_register(i))
            ops.append(self.prover_on_register(i))
        ops.append(self.verifier_on_register(self.rounds))
        return ops


@dataclass(frozen=True)
class SimulatorSpec:
    """Circuits for the simulated views, keyed by message count j"""
    circuits: Mapping[int, Circuit] = field(default_factory=dict)
    honest: bool = False

    def circuit_for(self, ps: ProofSystemSpec, j: int) -> Circuit:
        if self.honest:
            return honest_interaction_circuit(ps, j)
        if j not in self.circuits:
            raise ArgumentError(f"simulator has no circuit for message {j}")
        c = self.circuits[j]
        if len(c.outputs) != ps.qv + ps.qm:
            raise ArgumentError(
                f"simulator {j} has {len(c.outputs)} outputs, expected {ps.qv + ps.qm}"
            )
        return c


class Complete1Check(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


# ---------------------------------------------------------------------------
# Interaction
# ---------------------------------------------------------------------------

def honest_interaction_circuit(ps: ProofSystemSpec, j: int) -> Circuit:
    """First j operations of the honest run; outputs are the V+M qubits"""
    if not 0 <= j <= ps.messages:
        raise ArgumentError(f"message index {j} outside 0..{ps.messages}")
    gates: List[Gate] = []
    for op in ps.operations()[:j]:
        gates.extend(op.gates)
    return Circuit(ps.width, tuple(gates), ps.view_qubits)


def compute_view(ps: ProofSystemSpec, j: int) -> ComplexMatrix:
    """Verifier-plus-message state after j messages of the honest run"""
    if ps.width > get_config().capacity.max_circuit_qubits:
        raise CapacityError("proof system register", ps.width, get_config().capacity.max_circuit_qubits)
    return prepare_mixed(honest_interaction_circuit(ps, j))


def accept_probability(ps: ProofSystemSpec) -> float:
    """Probability that the honest run ends with the output bit at 1"""
    c = Circuit(ps.width, tuple(g for op in ps.operations() for g in op.gates), (ps.outbit,))
    rho = prepare_mixed(c)
    return float(rho[1, 1].real)


def acceptance_projector(ps: ProofSystemSpec) -> ComplexMatrix:
    """Projector onto outbit = 1 on the V+M register"""
    n = ps.qv + ps.qm
    check_dim(2 ** n, "acceptance projector side")
    idx = np.arange(2 ** n)
    bit = (idx >> (n - 1 - ps.outbit)) & 1
    return np.diag(bit.astype(np.complex128))


def replacement_bound(ps: ProofSystemSpec) -> float:
    """Upper bound on the build_qsd gap for a perfect simulator: 2 sqrt(1 - p_accept)"""
    return 2.0 * math.sqrt(max(0.0, 1.0 - accept_probability(ps)))


def _random_isometry(rows: int, cols: int, rng) -> ComplexMatrix:
    return random_unitary(rows, rng)[:, :cols]


@dataclass(frozen=True)
class MaxAcceptBounds:
    """
    Interval holding the largest acceptance probability of a two-message system

    ``lower`` is reached by an explicit prover; ``upper`` is certified by
    ``certificate``, a Hermitian Y on V with Y (x) I_M >= Q.
    """
    lower: float
    upper: float
    certificate: ComplexMatrix = field(repr=False, compare=False)

    @property
    def gap(self) -> float:
        return self.upper - self.lower


def _two_message_operators(ps: ProofSystemSpec) -> Tuple[np.ndarray, ComplexMatrix, int, int]:
    """(V_1|0>, V_2^dagger Pi_acc V_2, dim V, dim M)"""
    if ps.messages != 2:
        raise UnsupportedError(f"maximum acceptance supports two-message systems only, got m={ps.messages}")
    dv, dm = 2 ** ps.qv, 2 ** ps.qm
    check_dim(dv * dm * dv * dm, "prover purification dimension")
    v1 = circuit_unitary(ps.verifiers[0])
    v2 = circuit_unitary(ps.verifiers[1])
    q = v2.conj().T @ acceptance_projector(ps) @ v2
    return v1[:, 0], q, dv, dm


def seesaw_max_accept(ps: ProofSystemSpec, restarts: Optional[int] = None, seed=None,
                      max_iter: int = 500, tol: float = 1e-13,
                      warm_starts: Sequence[ComplexMatrix] = ()) -> float:
    """
    Acceptance reached by the best prover a see-saw search finds

    After V_1 the prover may apply any channel to M. Writing the channel as
    an isometry W: M -> M (x) E, acceptance is ||(Q (x) I)(I (x) W) x||^2 with
    x = V_1|0> and Q = V_2^dagger Pi_acc V_2. Each step replaces W by the
    isometry that best aligns (I (x) W) x with (Q (x) I)(I (x) W) x; the
    objective never decreases. Starts: ``warm_starts``, the trivial
    embedding and seeded random isometries.

    The search can stall below the optimum, so the value is a lower bound.

    Raises:
        UnsupportedError: more than two messages
    """
    x, q, dv, dm = _two_message_operators(ps)
    settings = get_config().protocol
    restarts = settings.seesaw_restarts if restarts is None else restarts
    rng = rng_from(settings.seed if seed is None else seed)
    de = dv * dm

    def lift(w: ComplexMatrix) -> np.ndarray:
        # (I (x) W) x as a (dv*dm) x de matrix
        return (x.reshape(dv, dm) @ w.T).reshape(dv * dm, de)

    def value(y: np.ndarray) -> float:
        return float(np.vdot(y, q @ y).real)

    starts = list(warm_starts)
    trivial = np.zeros((dm * de, dm), dtype=np.complex128)
    trivial[np.arange(dm) * de, np.arange(dm)] = 1.0
    starts.append(trivial)
    for _ in range(restarts):
        starts.append(_random_isometry(dm * de, dm, rng))

    best = 0.0
    for attempt, w in enumerate(starts):
        y = lift(w)
        current = value(y)
        for _ in range(max_iter):
            target = q @ y
            norm = np.linalg.norm(target)
            if norm < 1e-14:
                break
            w = align_isometry(x, (target / norm).reshape(-1), dv)
            y = lift(w)
            nxt = value(y)
            if nxt - current <= tol:
                current = max(current, nxt)
                break
            current = nxt
        logger.debug("seesaw start %d reached %.12f", attempt, current)
        best = max(best, current)
    return min(1.0, best)


def _message_lift(dv: int, dm: int) -> np.ndarray:
    """Permutation P with P^T (I_M (x) Y) P = Y (x) I_M"""
    perm = np.zeros((dv * dm, dv * dm))
    for a in range(dv):
        for b in range(dm):
            perm[b * dv + a, a * dm + b] = 1.0
    return perm


def _solve_dual(x: np.ndarray, q: ComplexMatrix, dv: int, dm: int,
                eps: float) -> Tuple[ComplexMatrix, Optional[ComplexMatrix]]:
    """
    min tr(Y rho_V) subject to Y (x) I_M >= Q

    Returns the (uncorrected) optimal Y and, when the solver reports it, the
    multiplier of the PSD constraint: an optimal state on V (x) M.
    """
    xm = x.reshape(dv, dm)
    rho_v = xm @ xm.conj().T
    perm = _message_lift(dv, dm)
    y = cp.Variable((dv, dv), hermitian=True)
    slack = cp.Variable((dv * dm, dv * dm), hermitian=True)
    lifted = perm.T @ cp.kron(np.eye(dm), y) @ perm
    constraints = [slack == lifted - q, slack >> 0]
    problem = cp.Problem(cp.Minimize(cp.real(cp.trace(y @ rho_v))), constraints)
    try:
        problem.solve(solver=cp.SCS, eps=eps, max_iters=100000)
    except cp.error.SolverError as e:
        logger.warning("dual acceptance program failed (%s); using the trivial bound", e)
        return np.zeros((dv, dv), dtype=np.complex128), None
    logger.debug("dual acceptance program: status %s, value %s", problem.status, problem.value)
    if y.value is None:
        return np.zeros((dv, dv), dtype=np.complex128), None
    sigma = constraints[1].dual_value
    return np.asarray(y.value, dtype=np.complex128), None if sigma is None else np.asarray(sigma, dtype=np.complex128)


def _start_from_state(x: np.ndarray, sigma: ComplexMatrix, dv: int) -> Optional[ComplexMatrix]:
    """Prover isometry steering x towards a purification of sigma"""
    sigma = (sigma + sigma.conj().T) / 2
    if np.trace(sigma).real < 0:
        sigma = -sigma
    values, vectors = np.linalg.eigh(sigma)
    values = np.clip(values, 0.0, None)
    if values.sum() <= 1e-12:
        return None
    cleaned = (vectors * (values / values.sum())) @ vectors.conj().T
    return align_isometry(x, purify(cleaned), dv)


def max_accept_bounds(ps: ProofSystemSpec, restarts: Optional[int] = None, seed=None) -> MaxAcceptBounds:
    """
    Lower and certified upper bound on the largest acceptance probability

    Every prover leaves V+M in a state sigma with tr_M sigma = rho_V, so any
    Hermitian Y with Y (x) I_M >= Q bounds acceptance by tr(Y rho_V). The
    semidefinite solution is shifted by the most negative eigenvalue of
    Y (x) I_M - Q, which keeps the bound valid whatever the solver's
    accuracy. The lower bound comes from the see-saw search, warm-started
    from the solver's optimal state.

    Raises:
        UnsupportedError: more than two messages
    """
    x, q, dv, dm = _two_message_operators(ps)
    y, sigma = _solve_dual(x, q, dv, dm, get_config().protocol.sdp_eps)
    y = (y + y.conj().T) / 2
    lifted = np.kron(y, np.eye(dm))
    shift = max(0.0, -float(np.linalg.eigvalsh(lifted - q).min()))
    certificate = y + shift * np.eye(dv)
    xm = x.reshape(dv, dm)
    upper = min(1.0, float(np.trace(certificate @ xm @ xm.conj().T).real))

    warm = []
    if sigma is not None and sigma.shape == q.shape:
        start = _start_from_state(x, sigma, dv)
        if start is not None:
            warm.append(start)
    lower = seesaw_max_accept(ps, restarts, seed, warm_starts=warm)
    upper = max(upper, lower)
    bounds = MaxAcceptBounds(lower, upper, certificate)
    if bounds.gap > 1e-6:
        logger.warning("maximum acceptance only bracketed: [%.9f, %.9f]", lower, upper)
    return bounds


def max_accept_exact(ps: ProofSystemSpec, restarts: Optional[int] = None, seed=None) -> float:
    """
    Largest acceptance probability over all provers of a two-message system

    Returns the certified upper bound of :func:`max_accept_bounds`, so the
    value is never below the true maximum; ``max_accept_bounds`` also gives
    the attained lower end.

    Raises:
        UnsupportedError: more than two messages
    """
    return max_accept_bounds(ps, restarts, seed).upper


# ---------------------------------------------------------------------------
# Reduction to QSD
# ---------------------------------------------------------------------------

def _then_on(c: Circuit, v: Circuit, qubits: Sequence[int]) -> Circuit:
    """Run v after c with v's qubit i on c's qubit qubits[i]; outputs unchanged"""
    return compose(c, v, {i: int(qubits[i]) for i in range(v.width)}, outputs=c.outputs)


def _replace_outbit(c: Circuit, outbit: int) -> Circuit:
    """Swap output position ``outbit`` for a fresh qubit prepared in |1>"""
    one = Circuit(1, (gate("x", 0),), (0,))
    outs = list(c.outputs)
    outs[outbit] = c.width
    return compose(c, one, {}, outputs=outs)


def _factor_circuits(ps: ProofSystemSpec, sim: SimulatorSpec) -> Tuple[List[Circuit], List[Circuit]]:
    """Circuits preparing rho_1..rho_{k-1} and xi_1..xi_k on V+M"""
    k = ps.rounds
    rhos: List[Circuit] = []
    for i in range(1, k - 1):
        rhos.append(sim.circuit_for(ps, 2 * i))

    last = sim.circuit_for(ps, ps.messages)
    vk = ps.verifiers[k - 1]
    xi_k = _replace_outbit(_then_on(last, vk, last.outputs), ps.outbit)
    rhos.append(_then_on(xi_k, adjoint(vk), xi_k.outputs))

    xis: List[Circuit] = [Circuit(ps.qv + ps.qm, ps.verifiers[0].gates, ps.view_qubits)]
    for i in range(2, k):
        prev = rhos[i - 2]
        xis.append(_then_on(prev, ps.verifiers[i - 1], prev.outputs))
    xis.append(xi_k)
    return rhos, xis


def _restrict_to_v(c: Circuit, qv: int) -> Circuit:
    return Circuit(c.width, c.gates, c.outputs[:qv])


def _tensor_circuit(factors: Sequence[Circuit]) -> Circuit:
    out = factors[0]
    for f in factors[1:]:
        width = out.width + f.width
        moved = relabel(f, [out.width + q for q in range(f.width)], width)
        out = Circuit(width, out.gates + moved.gates, out.outputs + moved.outputs)
    return out


def build_qsd(ps: ProofSystemSpec, sim: SimulatorSpec) -> Tuple[Circuit, Circuit]:
    """
    QSD instance (Q0, Q1) of a proof system with a simulator

    Q0 prepares the tensor product over i = 1..k-1 of tr_M rho_i and Q1 that
    of tr_M xi_i, where rho_i is the simulated view after 2i messages
    (i <= k-2), xi_i = V_i rho_{i-1} V_i^dagger with rho_0 the all-zero state,
    xi_k is V_k applied to the simulated final view with the output bit
    replaced by a fresh |1>, and rho_{k-1} = V_k^dagger xi_k V_k.
    """
    rhos, xis = _factor_circuits(ps, sim)
    k = ps.rounds
    q0 = _tensor_circuit([_restrict_to_v(c, ps.qv) for c in rhos])
    q1 = _tensor_circuit([_restrict_to_v(c, ps.qv) for c in xis[: k - 1]])
    logger.debug("reduction built Q0 (%d qubits) and Q1 (%d qubits)", q0.width, q1.width)
    return q0, q1


def reduction_states(ps: ProofSystemSpec, sim: SimulatorSpec) -> Tuple[List[ComplexMatrix], List[ComplexMatrix]]:
    """Densities rho_1..rho_{k-1} and xi_1..xi_k on V+M"""
    rhos, xis = _factor_circuits(ps, sim)
    return [prepare_mixed(c) for c in rhos], [prepare_mixed(c) for c in xis]


def _trace_m(rho: ComplexMatrix, qv: int, qm: int) -> ComplexMatrix:
    dv, dm = 2 ** qv, 2 ** qm
    return np.einsum("ajbj->ab", rho.reshape(dv, dm, dv, dm))


def complete1_rhs(k: int, epsilon: float) -> float:
    return (1.0 - math.sqrt(epsilon)) ** 2 / (3.0 * (k - 1))


def check_complete1(ps: ProofSystemSpec, rhos: Sequence[ComplexMatrix], epsilon: float,
                    tol: float = 1e-8) -> Complete1Check:
    """
    Check the distance lower bound for a claimed acceptance bound epsilon

    With xi_1 = V_1|0><0|V_1^dagger and xi_i = V_i rho_{i-1} V_i^dagger, and
    provided xi_k accepts with certainty, the tensor products of the
    M-traced rho's and xi's are at least (1 - sqrt(eps))^2 / (3(k-1)) apart
    whenever every prover is accepted with probability at most eps.

    Raises:
        PreconditionError: xi_k does not accept with certainty
    """
    k = ps.rounds
    if len(rhos) != k - 1:
        raise ArgumentError(f"expected {k - 1} states, got {len(rhos)}")
    if not 0.0 <= epsilon <= 1.0:
        raise ArgumentError(f"epsilon must lie in [0, 1], got {epsilon}")
    dvm = 2 ** (ps.qv + ps.qm)
    rhos = [np.asarray(r, dtype=np.complex128) for r in rhos]
    for r in rhos:
        if r.shape != (dvm, dvm):
            raise ArgumentError(f"state of shape {r.shape} is not on V+M ({dvm})")

    units = [circuit_unitary(v) for v in ps.verifiers]
    start = np.zeros((dvm, dvm), dtype=np.complex128)
    start[0, 0] = 1.0
    xis = [units[0] @ start @ units[0].conj().T]
    for i in range(1, k):
        xis.append(units[i] @ rhos[i - 1] @ units[i].conj().T)

    certainty = float(np.trace(acceptance_projector(ps) @ xis[-1]).real)
    if certainty < 1.0 - tol:
        raise PreconditionError(f"final state accepts with probability {certainty:.10f} < 1")

    gamma0 = tensor_all([_trace_m(r, ps.qv, ps.qm) for r in rhos])
    gamma1 = tensor_all([_trace_m(x, ps.qv, ps.qm) for x in xis[: k - 1]])
    lhs = trace_distance(gamma1, gamma0)
    rhs = complete1_rhs(k, epsilon)
    return Complete1Check(lhs, rhs, lhs >= rhs - tol)


# ---------------------------------------------------------------------------
# Closeness test as a proof system
# ---------------------------------------------------------------------------

def _all_ones_flip(controls: int) -> ComplexMatrix:
    dim = 2 ** (controls + 1)
    m = np.eye(dim, dtype=np.complex128)
    m[[dim - 2, dim - 1]] = m[[dim - 1, dim - 2]]
    return m


def closeness_test_system(r0: Circuit, r1: Circuit) -> ProofSystemSpec:
    """
    Two-message proof system of the closeness test for (r0, r1)

    V holds the output qubits plus the output bit, M holds the non-output
    qubits. V_1 runs r0; V_2 runs r1^dagger and sets the output bit when
    every qubit of the r-register is zero. The honest prover applies the
    Uhlmann unitary to M.
    """
    if len(r0.outputs) != len(r1.outputs):
        raise ArgumentError(f"output sizes differ: {len(r0.outputs)} vs {len(r1.outputs)}")
    a, b = canonicalize_outputs(r0), canonicalize_outputs(r1)
    k = len(a.outputs)
    width = max(a.width, b.width)
    if width == k:
        width += 1
    a = relabel(a, list(range(a.width)), width, a.outputs)
    b = relabel(b, list(range(b.width)), width, b.outputs)
    env = width - k
    qv, qm = k + 1, env
    placed = [q if q < k else q + 1 for q in range(width)]

    v1 = relabel(a, placed, qv + qm, tuple(range(qv + qm)))
    register = [q for q in range(qv + qm) if q != k]
    undo = relabel(adjoint(b), placed, qv + qm, tuple(range(qv + qm)))
    flips = tuple(gate("x", q) for q in register)
    check = Gate(_all_ones_flip(len(register)), tuple(register) + (k,), "u")
    v2 = Circuit(qv + qm, undo.gates + flips + (check,) + flips, tuple(range(qv + qm)))

    phi = prepare_pure(a).reshape(2 ** k * 2 ** env)
    psi = prepare_pure(b).reshape(2 ** k * 2 ** env)
    u = uhlmann_unitary(phi, psi, (2 ** k, 2 ** env))
    prover = Circuit(qm, (Gate(u, tuple(range(qm)), "u"),), tuple(range(qm)))
    return ProofSystemSpec(qv, qm, 0, 2, k, (v1, v2), (prover,))


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

_HEADER_KEYS = ("qv", "qm", "qp", "messages", "outbit")


def parse_proof_system(text: str, source: Optional[str] = None) -> Tuple[ProofSystemSpec, SimulatorSpec]:
    """Parse ``.qps`` text into the proof system and its simulator"""
    p = CircuitParser(text, source)
    header: Dict[str, int] = {}
    honest_sim = False
    blocks: Dict[Tuple[str, int], Circuit] = {}

    while not p.at_end():
        tok = p.take()
        word = tok[0].lower()
        if word in _HEADER_KEYS:
            if blocks:
                raise p.error(f"header line '{word}' after circuit blocks", tok)
            args = p.rest_of_line(tok[1])
            if len(args) != 1:
                raise p.error(f"'{word}' takes exactly one integer", tok)
            header[word] = p.integer(args[0], word)
            continue
        if word not in ("verifier", "prover", "simulator"):
            raise p.error(f"unexpected {tok[0]!r}", tok)
        args = p.rest_of_line(tok[1])
        if word == "simulator" and len(args) == 1 and args[0][0].lower() == "honest":
            honest_sim = True
            continue
        if len(args) != 1:
            raise p.error(f"'{word}' takes exactly one index", tok)
        missing = [key for key in ("qv", "qm", "messages", "outbit") if key not in header]
        if missing:
            raise p.error(f"missing header lines: {', '.join(missing)}", tok)
        index = p.integer(args[0], f"{word} index")
        if (word, index) in blocks:
            raise p.error(f"duplicate block '{word} {index}'", tok)
        qv, qm, qp = header["qv"], header["qm"], header.get("qp", 0)
        if word == "verifier":
            width, outputs = qv + qm, tuple(range(qv + qm))
        elif word == "prover":
            width, outputs = qm + qp, tuple(range(qm + qp))
        else:
            width, outputs = qv + qm + qp, tuple(range(qv + qm))
            nxt = p.peek()
            if nxt is not None and nxt[0].lower() == "qubits":
                width, outputs = p.circuit_header()
        gates = p.gates_until(width, stop="end")
        p.take()
        try:
            blocks[(word, index)] = Circuit(width, tuple(gates), outputs)
        except ArgumentError as e:
            raise p.error(str(e), tok) from e

    missing = [key for key in ("qv", "qm", "messages", "outbit") if key not in header]
    if missing:
        raise ParseError(f"missing header lines: {', '.join(missing)}", 1, 1, source)
    m = header["messages"]
    k = m // 2 + 1
    verifiers = []
    for i in range(1, k + 1):
        if ("verifier", i) not in blocks:
            raise ParseError(f"missing block 'verifier {i}'", 1, 1, source)
        verifiers.append(blocks[("verifier", i)])
    provers = [blocks[("prover", j)] for j in range(1, m // 2 + 1) if ("prover", j) in blocks]
    if provers and len(provers) != m // 2:
        raise ParseError(f"expected {m // 2} prover blocks, got {len(provers)}", 1, 1, source)
    try:
        ps = ProofSystemSpec(
            header["qv"], header["qm"], header.get("qp", 0), m, header["outbit"],
            tuple(verifiers), tuple(provers),
        )
    except ArgumentError as e:
        raise ParseError(str(e), 1, 1, source) from e
    sims = {j: c for (word, j), c in blocks.items() if word == "simulator"}
    return ps, SimulatorSpec(sims, honest_sim)


def load_proof_system(path) -> Tuple[ProofSystemSpec, SimulatorSpec]:
    path = Path(path)
    return parse_proof_system(path.read_text(), str(path))

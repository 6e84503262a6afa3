"""CLI commands for the qsd toolkit"""

import functools
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional

import click
from pydantic import ValidationError
from tqdm import tqdm

from config.settings import configure_logging, reload_config

from .. import __version__
from ..core.circuit import read_circuit, write_circuit
from ..core.errors import CapacityError, QsdError, UnsupportedError
from ..core.experiments import PropertySuite
from ..core.linalg import fidelity, trace_distance
from ..core.matrix_io import read_matrix, write_matrix
from ..core.polarize import PolarizationParams, polarize, polarize_bounds, resolve_params
from ..core.protocols import (
    DISTANCE,
    run_closeness_test,
    run_distance_test,
    sample_acceptance,
    simulator_views_closeness,
    simulator_views_distance,
    zero_knowledge_gap,
)
from ..core.reduction import (
    accept_probability,
    build_qsd,
    check_complete1,
    load_proof_system,
    max_accept_bounds,
    reduction_states,
    replacement_bound,
)
from ..core.states import QsdInstance, decide_qsd, prepare_mixed
from ..core.tna import tna
from ..provers import HonestProver, parse_prover
from ..reports.models import PolarizeRequest, RunReport, TnaRequest
from ..utils.formatters import format_duration, format_kv, format_report, format_status
from ..utils.validators import CIRCUIT_SUFFIXES, PROOF_SYSTEM_SUFFIXES, input_digest, require_file

logger = logging.getLogger(__name__)

CIRCUIT = click.Path(exists=True, dir_okay=False)


def handle_errors(fn):
    """Map library and validation errors to exit code 2"""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        logger.info("running %s", ctx.info_name)
        try:
            result = fn(*args, **kwargs)
        except QsdError as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(2)
        except ValidationError as e:
            for err in e.errors():
                click.echo(f"Error: {err['msg']}", err=True)
            ctx.exit(2)
        logger.info("finished %s", ctx.info_name)
        return result
    return wrapper


def emit(ctx, report: RunReport):
    """Print a report; exit 1 when a bound check failed"""
    click.echo(format_kv(report) if ctx.obj["kv"] else format_report(report))
    if not report.passed:
        ctx.exit(1)


def _tol(ctx) -> float:
    return ctx.obj["config"].numerics.residual_tol


def _load_pair(q0: str, q1: str):
    require_file(q0, CIRCUIT_SUFFIXES)
    require_file(q1, CIRCUIT_SUFFIXES)
    return read_circuit(q0), read_circuit(q1), input_digest([q0, q1])


@click.group()
@click.version_option(version=__version__)
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
              help="Config file (JSON, YAML or .env)")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
              default=None, help="Override the configured log level")
@click.option("--kv", is_flag=True, help="Print reports as key=value lines")
@click.option("--seed", type=int, default=None, help="Seed for every randomised step")
@click.pass_context
def main(ctx, config_file: Optional[str], log_level: Optional[str], kv: bool, seed: Optional[int]):
    """QSD toolkit - trace distance, polarization, zero-knowledge protocols and reductions"""
    try:
        config = reload_config(config_file)
    except QsdError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(2)
    settings = config.logging if log_level is None else replace(config.logging, level=log_level)
    configure_logging(settings)
    ctx.ensure_object(dict)
    ctx.obj["config"] = config
    ctx.obj["kv"] = kv
    ctx.obj["seed"] = config.protocol.seed if seed is None else seed


@main.command()
@click.argument("q0", type=CIRCUIT)
@click.argument("q1", type=CIRCUIT)
@click.option("--alpha", type=float, default=None, help="Lower threshold; with --beta, decide the instance")
@click.option("--beta", type=float, default=None, help="Upper threshold")
@click.option("--method", type=click.Choice(["eig", "charpoly"]), default="eig", help="Decision route")
@click.option("--save", "save_dir", type=click.Path(file_okay=False), default=None,
              help="Write rho0.mat, rho1.mat and delta.mat (rho0 - rho1) here")
@click.pass_context
@handle_errors
def dist(ctx, q0: str, q1: str, alpha: Optional[float], beta: Optional[float], method: str,
         save_dir: Optional[str]):
    """Trace distance and fidelity of the states two circuits prepare"""
    c0, c1, digest = _load_pair(q0, q1)
    rho0, rho1 = prepare_mixed(c0), prepare_mixed(c1)
    d = trace_distance(rho0, rho1)
    f = min(1.0, fidelity(rho0, rho1))
    tol = _tol(ctx)

    report = RunReport(command=f"dist {q0} {q1}", digest=digest)
    report.add("distance", d, tol).add("fidelity", f, tol)
    report.add("lower", 1.0 - f, tol).add("upper", math.sqrt(max(0.0, 1.0 - f * f)), tol)
    report.check("fidelity_lower", 1.0 - f, d, "<=", tol)
    report.check("fidelity_upper", d, math.sqrt(max(0.0, 1.0 - f * f)), "<=", tol)
    if alpha is not None and beta is not None:
        outcome = decide_qsd(QsdInstance(c0, c1, alpha, beta), method=method)
        report.note("decision", outcome.decision.value)
    if save_dir:
        out = Path(save_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, m in (("rho0", rho0), ("rho1", rho1), ("delta", rho0 - rho1)):
            write_matrix(m, out / f"{name}.mat")
        report.note("states", " ".join(str(out / f"{n}.mat") for n in ("rho0", "rho1", "delta")))
    emit(ctx, report)


@main.command("polarize")
@click.argument("q0", type=CIRCUIT)
@click.argument("q1", type=CIRCUIT)
@click.option("--n", "n", type=int, required=True, help="Security parameter")
@click.option("--alpha", type=float, default=None, help="Lower threshold")
@click.option("--beta", type=float, default=None, help="Upper threshold")
@click.option("--r", "r", type=int, default=None, help="XOR exponent override")
@click.option("--s", "s", type=int, default=None, help="Amplification override")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".", help="Output directory")
@click.option("--verify", is_flag=True, help="Check the emitted circuits against the analytic bounds")
@click.pass_context
@handle_errors
def polarize_cmd(ctx, q0: str, q1: str, n: int, alpha, beta, r, s, out_dir: str, verify: bool):
    """Polarize a circuit pair and write r0.qc / r1.qc"""
    request = PolarizeRequest(n=n, alpha=alpha, beta=beta, r=r, s=s)
    c0, c1, digest = _load_pair(q0, q1)
    params = resolve_params(request.n, request.alpha, request.beta, request.override)
    tol = _tol(ctx)

    report = RunReport(command=f"polarize {q0} {q1}", digest=digest)
    for key in ("n", "r", "s"):
        report.note(key, getattr(params, key))

    try:
        r0, r1, params = polarize(c0, c1, params.n, override=params)
    except CapacityError as e:
        report.note("circuits", f"not emitted ({e})")
        emit(ctx, report)
        return

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_circuit(r0, out / "r0.qc", params.header_lines())
    write_circuit(r1, out / "r1.qc", params.header_lines())
    report.note("circuits", f"{out / 'r0.qc'} {out / 'r1.qc'}")
    report.note("width", r0.width)

    if verify:
        d_in = trace_distance(prepare_mixed(c0), prepare_mixed(c1))
        lower, upper = polarize_bounds(d_in, params)
        d_out = trace_distance(prepare_mixed(r0), prepare_mixed(r1))
        report.add("input_distance", d_in, tol).add("output_distance", d_out, tol)
        report.check("bound_lower", lower, d_out, "<=", tol)
        report.check("bound_upper", d_out, upper, "<=", tol)
    emit(ctx, report)


def _protocol_params(n: int, alpha, beta, r, s) -> Optional[PolarizationParams]:
    if r is not None or s is not None:
        return PolarizationParams(n=n, r=r or 1, s=s or 1, alpha=alpha, beta=beta)
    if alpha is None and beta is None:
        return PolarizationParams(n=n, r=1, s=1)
    return None


@main.command()
@click.argument("kind", type=click.Choice(["distance", "closeness"]))
@click.argument("q0", type=CIRCUIT)
@click.argument("q1", type=CIRCUIT)
@click.option("--prover", default="honest", show_default=True, help="honest, random:<seed> or file:<path>")
@click.option("--n", "n", type=int, default=1, show_default=True, help="Security parameter")
@click.option("--alpha", type=float, default=None, help="Lower threshold (derives r and s)")
@click.option("--beta", type=float, default=None, help="Upper threshold")
@click.option("--r", "r", type=int, default=None, help="XOR exponent override")
@click.option("--s", "s", type=int, default=None, help="Amplification override")
@click.option("--shots", type=int, default=0, help="Also sample this many seeded runs")
@click.pass_context
@handle_errors
def protocol(ctx, kind: str, q0: str, q1: str, prover: str, n: int, alpha, beta, r, s, shots: int):
    """Run the distance or closeness test exactly"""
    c0, c1, digest = _load_pair(q0, q1)
    params = _protocol_params(n, alpha, beta, r, s)
    inst = QsdInstance(c0, c1, 0.0 if alpha is None else alpha, 1.0 if beta is None else beta)
    if params is None:
        inst.require_polarizable()
    strategy = parse_prover(prover)
    tol = _tol(ctx)

    if kind == DISTANCE:
        transcript = run_distance_test(inst, strategy, params, n=n)
        simulated = simulator_views_distance(inst, transcript.params)
    else:
        transcript = run_closeness_test(inst, strategy, params, n=n)
        simulated = simulator_views_closeness(inst, transcript.params)

    report = RunReport(command=f"protocol {kind} {q0} {q1} --prover {prover}", digest=digest)
    report.note("prover", transcript.prover)
    for key in ("n", "r", "s"):
        report.note(key, getattr(transcript.params, key))
    report.add("acceptance", transcript.acceptance, tol)
    report.add("completeness_error", transcript.completeness_error, tol)
    report.add("zk_bound", transcript.zk_bound, tol)
    for key, value in transcript.extras.items():
        report.add(key, value, tol)
    for i, view_digest in enumerate(transcript.view_digests(), start=1):
        report.note(f"view{i}", view_digest)

    if kind == DISTANCE:
        report.check("optimal", transcript.acceptance, transcript.extras["p_opt"], "<=", 1e-8)
    else:
        report.check("fidelity_squared", transcript.acceptance, transcript.extras["fidelity_squared"], "<=", 1e-8)
    if isinstance(strategy, HonestProver):
        if kind != DISTANCE:
            report.check("completeness", transcript.acceptance, transcript.extras["completeness_lower"], ">=", tol)
        gap = zero_knowledge_gap(transcript.views, simulated)
        report.add("zk_gap", gap, tol)
        report.check("zero_knowledge", gap, transcript.zk_bound, "<=", tol)
    if shots > 0:
        accepted = sample_acceptance(transcript, shots, ctx.obj["seed"])
        report.note("sampled", f"{accepted}/{shots}")
    emit(ctx, report)


@main.command("reduce")
@click.argument("system", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".", help="Output directory")
@click.option("--epsilon", type=float, default=None,
              help="Claimed acceptance bound; computed exactly for two-message systems when omitted")
@click.pass_context
@handle_errors
def reduce_cmd(ctx, system: str, out_dir: str, epsilon: Optional[float]):
    """Reduce an honest-verifier proof system to a QSD instance"""
    require_file(system, PROOF_SYSTEM_SUFFIXES)
    ps, sim = load_proof_system(system)
    q0, q1 = build_qsd(ps, sim)
    tol = _tol(ctx)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_circuit(q0, out / "q0.qc", [f"reduced from {Path(system).name}"])
    write_circuit(q1, out / "q1.qc", [f"reduced from {Path(system).name}"])

    report = RunReport(command=f"reduce {system}", digest=input_digest([system]))
    report.note("circuits", f"{out / 'q0.qc'} {out / 'q1.qc'}")
    report.note("width", f"{q0.width} {q1.width}")
    report.add("accept_probability", accept_probability(ps), tol)
    gap = trace_distance(prepare_mixed(q0), prepare_mixed(q1))
    report.add("gap", gap, tol)
    if sim.honest:
        report.add("replacement_bound", replacement_bound(ps), tol)
        report.check("replacement", gap, replacement_bound(ps), "<=", tol)

    if epsilon is None:
        try:
            bounds = max_accept_bounds(ps, seed=ctx.obj["seed"])
        except UnsupportedError as e:
            report.note("max_accept", f"skipped ({e})")
        else:
            epsilon = bounds.upper
            report.add("max_accept_lower", bounds.lower, tol)
            report.add("max_accept_gap", bounds.gap, tol)
    if epsilon is not None:
        rhos, _ = reduction_states(ps, sim)
        bound = check_complete1(ps, rhos, epsilon)
        report.add("max_accept", epsilon, tol)
        report.add("gap_lower_bound", bound.rhs, tol)
        report.check("complete1", bound.lhs, bound.rhs, ">=", 1e-8)
    emit(ctx, report)


@main.command("tna")
@click.argument("matrix", type=click.Path(exists=True, dir_okay=False))
@click.option("-k", "k", type=int, required=True, help="Bits of accuracy")
@click.option("--method", type=click.Choice(["charpoly", "eig"]), default="charpoly", show_default=True)
@click.pass_context
@handle_errors
def tna_cmd(ctx, matrix: str, k: int, method: str):
    """Trace norm approximation to k bits"""
    request = TnaRequest(k=k, method=method)
    x = read_matrix(matrix)
    value = tna(x, request.k, request.method)
    report = RunReport(command=f"tna {matrix} -k {k} --method {method}", digest=input_digest([matrix]))
    report.add("trace_norm", value, 2.0 ** -request.k)
    if request.method == "charpoly":
        reference = tna(x, request.k, "eig")
        report.check("eig_agreement", abs(value - reference), 2.0 ** -request.k, "<=", 0.0)
    emit(ctx, report)


@main.command()
@click.option("--trials", type=int, default=None, help="Trials per property (default: each property's own)")
@click.option("--only", "only", multiple=True, help="Run only this property (repeatable)")
@click.option("--workers", type=int, default=None, help="Properties checked in parallel")
@click.option("--list", "list_only", is_flag=True, help="List the properties and exit")
@click.pass_context
@handle_errors
def suite(ctx, trials: Optional[int], only, workers: Optional[int], list_only: bool):
    """Randomised property suite"""
    runner = PropertySuite(seed=ctx.obj["seed"], workers=workers)
    if list_only:
        for name in runner.available():
            click.echo(name)
        return
    names = list(only) or runner.available()
    with tqdm(total=len(names), desc="properties", unit="prop", file=sys.stderr,
              disable=ctx.obj["kv"]) as bar:
        results = runner.run(names, trials, progress=lambda _: bar.update(1))

    report = RunReport(command="suite")
    report.note("seed", ctx.obj["seed"])
    for result in results:
        report.check(result.name, result.worst_slack, 0.0, ">=", 0.0)
        if not ctx.obj["kv"]:
            logger.info("%s: %s (%d trials, %s)", result.name, format_status(result.passed), result.trials,
                        format_duration(result.elapsed))
    emit(ctx, report)


if __name__ == "__main__":
    main()

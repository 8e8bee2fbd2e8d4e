"""Command-line front end: ``perisolve {solve,oracle,verify,audit,besov,scan}``.

Exit codes: 0 success, 1 a verification or audit did not pass, 2 resonance or
singular finite-difference system, 3 usage or input error. Diagnostics go to
standard error; data goes to files or standard output.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field

from . import besov, fd_oracle, lemma_audit, problem_io, spectral_solver
from .char_symbol import DEFAULT_COND_LIMIT, resolve_n_jobs
from .exceptions import InputError, PerisolveError, Resonance, SingularSystem
from .periodic_fourier import TrigPolynomial, default_grid, grid

log = logging.getLogger("perisolve")

COMMANDS = ("solve", "oracle", "verify", "audit", "besov", "scan")
EXIT_OK, EXIT_FAILED, EXIT_RESONANCE, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    problem: str | None = None
    function: str | None = None
    modes: int | None = None
    grid: int | None = None
    kmax: int | None = None
    s: float = 1.0
    p: float = 2.0
    q: float = 2.0
    jmax: int | None = None
    tol: float = 1e-10
    cond_limit: float = DEFAULT_COND_LIMIT
    out: str | None = None
    json_out: str | None = None
    report: str | None = None
    threads: int = 1
    extra: dict = field(default_factory=dict)


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return value


def _float(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="perisolve", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    helps = {
        "solve": "spectral solution; writes a CSV of samples",
        "oracle": "finite-difference solution; same CSV layout as solve",
        "verify": "solve, check residuals, compare with the finite-difference oracle",
        "audit": "M-bound and proof-sequence audits",
        "besov": "Besov norm of a trigonometric polynomial",
        "scan": "per-frequency singular values of the characteristic matrix",
    }
    for name in COMMANDS:
        sp = sub.add_parser(name, help=helps[name])
        if name != "besov":
            sp.add_argument("--problem", required=True, help="problem JSON file")
        else:
            src = sp.add_mutually_exclusive_group(required=True)
            src.add_argument("--function", help="TrigPolynomial JSON file")
            src.add_argument("--problem", help="problem JSON file (its forcing is used)")
        sp.add_argument("--modes", type=_positive_int, help="truncation K for the spectral solve")
        sp.add_argument("--grid", type=_positive_int, help="grid size M")
        sp.add_argument("--kmax", type=_positive_int, help="frequency range for audits and scans")
        sp.add_argument("--s", type=_float, default=1.0)
        sp.add_argument("--p", type=_float, default=2.0)
        sp.add_argument("--q", type=_float, default=2.0)
        sp.add_argument("--jmax", type=_positive_int)
        sp.add_argument("--tol", type=_positive_float, default=1e-10)
        sp.add_argument("--cond-limit", type=_positive_float, default=DEFAULT_COND_LIMIT)
        sp.add_argument("--out", help="CSV output path (default: standard output)")
        sp.add_argument("--json", dest="json_out", help="solution TrigPolynomial JSON output")
        sp.add_argument("--report", help="JSON report path (default: standard output)")
        sp.add_argument("--threads", type=_positive_int,
                        help="worker threads (default: $PERISOLVE_THREADS or 1)")
    return parser


def parse_args(argv) -> RunConfig:
    """Validate ``argv`` into a :class:`RunConfig`; raises :class:`UsageError`."""
    ns = build_parser().parse_args(list(argv))
    if ns.command is None:
        raise UsageError(f"a command is required: one of {', '.join(COMMANDS)}")
    if ns.command == "besov" and not (1 <= ns.p and 1 <= ns.q):
        raise UsageError("besov needs p >= 1 and q >= 1")
    try:
        threads = resolve_n_jobs(ns.threads)
    except InputError as exc:
        raise UsageError(str(exc)) from None
    return RunConfig(
        command=ns.command, problem=ns.problem, function=getattr(ns, "function", None),
        modes=ns.modes, grid=ns.grid, kmax=ns.kmax, s=ns.s, p=ns.p, q=ns.q, jmax=ns.jmax,
        tol=ns.tol, cond_limit=ns.cond_limit, out=ns.out, json_out=ns.json_out,
        report=ns.report, threads=threads,
    )


def _emit(text: str, path: str | None):
    if path:
        problem_io.write_text(path, text)
    else:
        sys.stdout.write(text)


def _load(config: RunConfig, need_forcing: bool = True):
    problem, forcing = problem_io.load_problem(config.problem)
    if need_forcing and forcing is None:
        raise InputError(f"{config.problem} has no 'forcing' entry")
    return problem, forcing


def _solution_grid(config: RunConfig, u: TrigPolynomial, K: int) -> int:
    M = config.grid or max(256, default_grid(u), 4 * K + 4)
    if M <= 2 * max(K, u.max_frequency):
        raise InputError(f"--grid {M} is too small for modes {K}")
    return M


def _cmd_solve(config: RunConfig) -> int:
    problem, forcing = _load(config)
    K = config.modes or forcing.max_frequency
    sol = spectral_solver.solve(problem, forcing, K, config.cond_limit, config.threads)
    M = _solution_grid(config, sol.u, K)
    log.info("solved with K=%d, coeff residual %.3e, resonance margin %.3e",
             K, sol.residual_coeff, sol.resonance_margin)
    _emit(problem_io.samples_to_csv(sol(grid(M))), config.out)
    if config.json_out:
        problem_io.write_text(config.json_out, problem_io.dump_json(sol.u.to_json()))
    return EXIT_OK


def _cmd_oracle(config: RunConfig) -> int:
    problem, forcing = _load(config)
    M = config.grid or 512
    fd = fd_oracle.solve_fd(problem, forcing, M, config.cond_limit)
    log.info("finite-difference solve on M=%d, system cond %.3e", M, fd.cond)
    _emit(problem_io.samples_to_csv(fd.samples), config.out)
    return EXIT_OK


def _cmd_verify(config: RunConfig) -> int:
    problem, forcing = _load(config)
    K = config.modes or forcing.max_frequency
    sol = spectral_solver.solve(problem, forcing, K, config.cond_limit, config.threads)
    coeff_defect, grid_defect = spectral_solver.residual(problem, sol.u, forcing)
    M = config.grid or 1024
    fd = fd_oracle.solve_fd(problem, forcing, M, config.cond_limit)
    fd_error = fd_oracle.compare(fd, sol)
    passed = coeff_defect <= config.tol
    report = {
        "command": "verify",
        "modes": K,
        "coeff_defect": coeff_defect,
        "grid_defect": grid_defect,
        "resonance_margin": sol.resonance_margin,
        "fd_grid": M,
        "fd_sup_error": fd_error,
        "fd_cond": fd.cond,
        "tol": config.tol,
        "pass": passed,
        "solution": sol.u.to_json(),
    }
    _emit(problem_io.dump_json(report), config.report)
    log.info("coeff_defect %.3e, grid_defect %.3e, fd error %.3e", coeff_defect, grid_defect, fd_error)
    return EXIT_OK if passed else EXIT_FAILED


def _cmd_audit(config: RunConfig) -> int:
    problem, forcing = _load(config, need_forcing=False)
    K = config.kmax or 1024
    reports = [
        lemma_audit.step3_audit(problem, max(K, 4), config.cond_limit, config.threads),
        lemma_audit.step1_audit(problem.n, max(K, 8)),
        lemma_audit.step2_audit(problem.n, min(K, 64)),
    ]
    fourier = []
    if forcing is not None and forcing.coeffs:
        for r in (2.0, 1.5):
            M = config.grid or max(4096, default_grid(forcing))
            fourier.append({"r": r, "ratio": lemma_audit.fourier_type_ratio(forcing, r, M)})
    out = {
        "command": "audit",
        "kmax": K,
        "reports": [rep.to_json() for rep in reports],
        "fourier_type": fourier,
    }
    _emit(problem_io.dump_json(out), config.report)
    # step 2 is a referee: its verdict is reported, not enforced
    ok = reports[0].passed and reports[1].passed
    return EXIT_OK if ok else EXIT_FAILED


def _cmd_besov(config: RunConfig) -> int:
    if config.function:
        f = TrigPolynomial.from_json(problem_io.load_json(config.function))
    else:
        _, f = _load(config)
    params = besov.BesovParams(config.s, config.p, config.q)
    part = besov.DyadicPartition(config.jmax) if config.jmax is not None else besov.partition_for(f)
    blocks = besov.besov_blocks(f, params, part, config.grid)
    norm = besov.besov_norm(f, params, part, config.grid)
    lines = [f"{norm:.17g}", "j,block_norm,weighted"]
    lines += [f"{j},{bn:.17g},{w:.17g}" for j, bn, w in blocks]
    _emit("\n".join(lines) + "\n", config.out)
    return EXIT_OK


def _cmd_scan(config: RunConfig) -> int:
    problem, _ = _load(config, need_forcing=False)
    K = config.kmax or config.modes or 64
    ks, smin, cond = spectral_solver.singular_margins(problem, range(-K, K + 1))
    lines = ["k,sigma_min,cond"]
    lines += [f"{k},{s:.17g},{c:.17g}" for k, s, c in zip(ks, smin, cond)]
    _emit("\n".join(lines) + "\n", config.out)
    worst = int(ks[smin.argmin()])
    log.info("smallest singular value %.3e at k=%d", smin.min(), worst)
    return EXIT_OK


_DISPATCH = {
    "solve": _cmd_solve, "oracle": _cmd_oracle, "verify": _cmd_verify,
    "audit": _cmd_audit, "besov": _cmd_besov, "scan": _cmd_scan,
}


def run(config: RunConfig) -> int:
    try:
        return _DISPATCH[config.command](config)
    except (Resonance, SingularSystem) as exc:
        log.error("%s", exc)
        return EXIT_RESONANCE
    except (InputError, PerisolveError) as exc:
        log.error("input error: %s", exc)
        return EXIT_USAGE


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="perisolve: %(message)s", stream=sys.stderr)
    try:
        config = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"perisolve: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())

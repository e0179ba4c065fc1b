"""Command-line front end: ``fbentangle {bound,free,optimal,local,sweep,verify}``."""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import parametric as par
from .dynamics import drift_from_hamiltonian
from .errors import FeedbackEntanglementError, MatrixFileError, UnstableError
from .feedback import (
    eigb_check,
    entanglement_bound,
    is_stabilising_solution,
    optimal_unravelling,
)
from .matrixio import load_matrix, save_matrix
from .symplectic import (
    Bipartition,
    check_physical,
    log_negativity,
    one_vs_rest_bipartitions,
    poincare_check,
    pt_min_symplectic,
    sympb_check,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _fmt(value):
    if isinstance(value, float):
        return par.format_float(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


def _emit(args, report):
    if args.json:
        print(json.dumps(report, indent=2, default=float))
    else:
        for key, value in report.items():
            print(f"{key}: {_fmt(value)}")


def _chi_range(text):
    try:
        start, stop, steps = text.split(":")
        start, stop, steps = float(start), float(stop), int(steps)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected START:STOP:STEPS, got {text!r}") from exc
    if steps < 1:
        raise argparse.ArgumentTypeError("STEPS must be >= 1")
    return start, stop, steps


def _bipartitions(text):
    try:
        return [Bipartition.parse(part) for part in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _model(args):
    if args.modes is None or args.chi is None:
        raise InputError("--modes and --chi are required")
    if args.modes < 2:
        raise InputError("--modes must be >= 2")
    if args.chi < 0:
        raise InputError("--chi must be non-negative")
    return args.modes, args.chi


def _split(args, n_modes):
    if args.bipartitions:
        bip = args.bipartitions[0]
        if bip.n_modes != n_modes:
            raise InputError(f"bipartition {bip} does not cover {n_modes} modes")
        return bip.sizes
    m = n_modes // 2
    return m, n_modes - m


def _check_threshold(n_modes, chi):
    if chi >= par.chi_threshold(n_modes):
        raise UnstableError(
            f"chi = {chi:g} is above the stability threshold 1/(2(N-1)) = "
            f"{par.chi_threshold(n_modes):.6g} for N = {n_modes}"
        )


def cmd_bound(args):
    if args.drift:
        A = load_matrix(args.drift)
        source = str(args.drift)
    elif args.hamiltonian:
        try:
            A = drift_from_hamiltonian(load_matrix(args.hamiltonian))
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        source = str(args.hamiltonian)
    else:
        n_modes, chi = _model(args)
        _check_threshold(n_modes, chi)
        A = par.full_drift(n_modes, chi)
        source = f"parametric N={n_modes} chi={chi:g}"
    bound = entanglement_bound(A)
    _emit(args, {
        "model": source,
        "alpha1": bound.alpha1,
        "alpha2": bound.alpha2,
        "nu_sq_bound": bound.nu_sq_bound,
        "en_bound": bound.en_bound,
    })
    return EXIT_OK


def cmd_free(args):
    n_modes, chi = _model(args)
    _check_threshold(n_modes, chi)
    m, n = _split(args, n_modes)
    sigma = par.free_cm(m, n, chi)
    nu = pt_min_symplectic(sigma, Bipartition.split(1, 1))
    report = {
        "bipartition": f"{m}:{n}",
        "nu_sq": nu * nu,
        "log_neg": log_negativity(sigma, Bipartition.split(1, 1)),
    }
    if m == n:
        report["log_neg_closed_form"] = par.free_logneg(n_modes, chi)
    if args.out:
        save_matrix(args.out, sigma)
        report["sigma_file"] = str(args.out)
    _emit(args, report)
    return EXIT_OK


def cmd_optimal(args):
    n_modes, chi = _model(args)
    _check_threshold(n_modes, chi)
    m, n = _split(args, n_modes)
    A = par.reduced_drift(m, n, chi)
    sigma = par.optimal_cm(A)
    U = optimal_unravelling(A, sigma)
    stab = is_stabilising_solution(sigma, A)
    nu = pt_min_symplectic(sigma, Bipartition.split(1, 1))
    report = {
        "bipartition": f"{m}:{n}",
        "en_bound": par.parametric_bound(n_modes, chi),
        "log_neg": log_negativity(sigma, Bipartition.split(1, 1)),
        "nu_sq": nu * nu,
        "lyapunov_margin": stab.lyapunov_margin,
        "physical_margin": stab.physical_margin,
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        save_matrix(out / "sigma_opt.json", sigma)
        save_matrix(out / "u_opt.json", U)
        save_matrix(out / "drift.json", A)
        report["files"] = [str(out / name) for name in ("sigma_opt.json", "u_opt.json", "drift.json")]
    _emit(args, report)
    return EXIT_OK


def cmd_local(args):
    n_modes, chi = _model(args)
    _check_threshold(n_modes, chi)
    m, n = _split(args, n_modes)
    best = par.optimize_local_feedback(m, n, chi)
    _emit(args, {
        "bipartition": f"{m}:{n}",
        "mu1": best.mu1,
        "mu2": best.mu2,
        "nu_sq": best.nu_sq,
        "log_neg": best.log_neg,
        "stable_mu1_interval": list(best.interval),
    })
    return EXIT_OK


def cmd_sweep(args):
    if args.modes is None or args.modes < 2:
        raise InputError("--modes (>= 2) is required")
    n_modes = args.modes
    if args.chi_range is None:
        start, stop, steps = 0.001, par.chi_threshold(n_modes) - 0.001, 60
    else:
        start, stop, steps = args.chi_range
    grid = np.linspace(start, stop, steps)
    bips = args.bipartitions or [Bipartition.split(n_modes // 2, n_modes - n_modes // 2)]
    for bip in bips:
        if bip.n_modes != n_modes:
            raise InputError(f"bipartition {bip} does not cover {n_modes} modes")
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)

    tables = []
    for bip in bips:
        m, n = bip.sizes
        rows = par.sweep_chi(m, n, grid, workers=args.workers)
        with open(out / f"sweep_{m}-{n}.csv", "w", newline="") as fh:
            par.write_sweep_csv(rows, fh)
        tables.append((str(bip), rows))
    with open(out / "sweep_combined.csv", "w", newline="") as fh:
        par.write_combined_csv(tables, fh)

    total = sum(len(rows) for _, rows in tables)
    good = sum(row.ok for _, rows in tables for row in rows)
    _emit(args, {
        "points": total,
        "succeeded": good,
        "files": [str(out / f"sweep_{label.replace(':', '-')}.csv") for label, _ in tables]
        + [str(out / "sweep_combined.csv")],
    })
    return EXIT_OK if good >= 0.9 * total else EXIT_FAIL


def _verify_drift(args, sigma):
    if args.drift:
        return load_matrix(args.drift)
    if args.hamiltonian:
        try:
            return drift_from_hamiltonian(load_matrix(args.hamiltonian))
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    n_modes, chi = _model(args)
    if sigma.shape[0] == 2 * n_modes:
        return par.full_drift(n_modes, chi)
    if sigma.shape[0] == 4:
        return par.reduced_drift(*_split(args, n_modes), chi)
    raise InputError(f"sigma is {sigma.shape[0]}x{sigma.shape[0]}, model has {n_modes} modes")


def cmd_verify(args):
    if not args.sigma:
        raise InputError("--sigma is required")
    sigma = load_matrix(args.sigma)
    A = _verify_drift(args, sigma)
    if A.shape != sigma.shape:
        raise InputError(f"sigma is {sigma.shape}, drift is {A.shape}")
    tol = args.tol if args.tol is not None else 1e-8
    n_modes = sigma.shape[0] // 2
    checks = []

    def record(name, func):
        try:
            ok, detail = func()
        except (FeedbackEntanglementError, ArithmeticError, ValueError) as exc:
            ok, detail = False, f"error: {exc}"
        checks.append({"check": name, "ok": bool(ok), "detail": detail})

    def physical():
        rep = check_physical(sigma, tol)
        return rep.ok, f"min eig(sigma + i Omega) = {rep.min_embedding_eig:.3e}"

    def stabilising():
        rep = is_stabilising_solution(sigma, A, tol)
        return rep.lyapunov_margin >= -tol, f"min eig(A s + s A^T + 1) = {rep.lyapunov_margin:.3e}"

    def bound():
        b = entanglement_bound(A)
        worst = min(pt_min_symplectic(sigma, bip) ** 2 for bip in one_vs_rest_bipartitions(n_modes))
        return worst >= b.nu_sq_bound - tol, f"min nu^2 = {worst:.12g} >= alpha1 alpha2 = {b.nu_sq_bound:.12g}"

    def poincare():
        rep = poincare_check(sigma, tol)
        return rep.ok, f"min lambda_up lambda_down = {rep.lhs:.12g}"

    def sympb():
        reps = [sympb_check(sigma, bip, tol) for bip in one_vs_rest_bipartitions(n_modes)]
        worst = min(reps, key=lambda r: r.lhs - r.rhs)
        return all(reps), f"nu^2 = {worst.lhs:.12g} >= lambda1 lambda2 = {worst.rhs:.12g}"

    def eigb():
        rep = eigb_check(sigma, A, tol)
        return rep.ok, f"lambda_max1 lambda_max2 = {rep.lhs:.12g} <= {rep.rhs:.12g}"

    record("physical", physical)
    record("stabilising", stabilising)
    record("bound", bound)
    record("poincare", poincare)
    record("sympb", sympb)
    record("eigb", eigb)

    if args.json:
        print(json.dumps({"checks": checks, "ok": all(c["ok"] for c in checks)}, indent=2))
    else:
        for c in checks:
            print(f"{'PASS' if c['ok'] else 'FAIL'} {c['check']}: {c['detail']}")
    return EXIT_OK if all(c["ok"] for c in checks) else EXIT_FAIL


COMMANDS = {
    "bound": cmd_bound,
    "free": cmd_free,
    "optimal": cmd_optimal,
    "local": cmd_local,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--modes", type=int, help="number of modes N")
    common.add_argument("--chi", type=float, help="coupling to loss ratio")
    common.add_argument("--chi-range", type=_chi_range, metavar="START:STOP:STEPS")
    common.add_argument("--bipartitions", type=_bipartitions, metavar="m:n[,m:n...]")
    common.add_argument("--drift", type=Path, metavar="FILE")
    common.add_argument("--hamiltonian", type=Path, metavar="FILE")
    common.add_argument("--sigma", type=Path, metavar="FILE")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--tol", type=float)
    common.add_argument("--seed", type=int, help="accepted for reproducible runs; no command draws random numbers yet")
    common.add_argument("--workers", type=int, default=None, help="processes for sweep points")
    common.add_argument("--json", action="store_true", help="machine-readable report on stdout")

    parser = argparse.ArgumentParser(
        prog="fbentangle",
        description="Steady-state Gaussian entanglement under continuous feedback.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "bound": "entanglement ceiling for a drift, Hamiltonian or parametric model",
        "free": "steady state without feedback",
        "optimal": "bound-attaining state and its unravelling",
        "local": "optimised local Markovian feedback",
        "sweep": "chi sweep to CSV",
        "verify": "check a covariance matrix against a drift",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InputError, MatrixFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UnstableError as exc:
        print(f"unstable: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except FeedbackEntanglementError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 ok; 1 a check failed or a closed form disagrees by more than
1e-8; 2 bad arguments, family parameters or input files; 3 unconverged
solver or thermal cross-path mismatch; 4 zero-trace normalization failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import io as eio
from .checks import KEYS, GROUPS, rabi_populations, run_checks
from .dnorm import SolverConfig
from .factorize import NormalizationError
from .measure import base_tag, entanglement_production, to_base
from .spin import IsingParams, ising_epsilon, ising_limit_table, ising_magnetization, ising_pipeline_epsilon
from .states import FamilyError, FamilySpec, expected_epsilon, make_density, mixed_multimode
from .transitions import regime_table

EXIT_OK, EXIT_CHECK, EXIT_SPEC, EXIT_SOLVER, EXIT_TRACE = 0, 1, 2, 3, 4
COLUMNS = ("family", "N", "p", "g", "b", "t", "epsilon", "reference", "delta", "converged")
DELTA_TOL = 1e-8
THERMAL_TOL = 1e-8


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_SPEC):
        super().__init__(message)
        self.code = code


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _coeffs(text: str) -> list[complex]:
    return [_complex(t) for t in text.split(",") if t.strip()]


def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--base", default="natural", help="log base: natural (default) or 2")
    c.add_argument("--restarts", type=int, default=32, help="random restarts of the norm solver")
    c.add_argument("--seed", type=int, default=0, help="solver seed (EPROD_SEED overrides)")
    c.add_argument("--output", help="write results to this path instead of stdout")
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="eprod", description="Entanglement production of multipartite operators.")
    sub = ap.add_subparsers(dest="command", required=True)

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("--family", required=True)
    fam.add_argument("--n", type=int, default=2, help="number of partites / particles")
    fam.add_argument("--p", type=int, help="reduction order (hf_reduced, mixed_multimode)")
    fam.add_argument("--c1", type=_complex)
    fam.add_argument("--c2", type=_complex)
    fam.add_argument("--coeffs", type=_coeffs, help="comma-separated amplitudes (multimode)")
    fam.add_argument("--weights", type=_coeffs, help="comma-separated populations (mixed_multimode)")
    fam.add_argument("--statistics", choices=("fermi", "bose"))
    fam.add_argument("--sign", type=int, choices=(1, -1))

    sub.add_parser("compute", parents=[common, fam], help="measure a state family against its closed form")

    mf = sub.add_parser("measure-file", parents=[common], help="measure an operator from a JSON file")
    mf.add_argument("path")

    th = sub.add_parser("thermal", parents=[common], help="two-spin Ising sweep plus the limit table")
    th.add_argument("--g-min", type=float, default=-5.0)
    th.add_argument("--g-max", type=float, default=5.0)
    th.add_argument("--g-steps", type=int, default=21)
    th.add_argument("--b-min", type=float, default=0.0)
    th.add_argument("--b-max", type=float, default=5.0)
    th.add_argument("--b-steps", type=int, default=21)
    th.add_argument("--magnitude", type=float, default=300.0, help="ray magnitude of the limit table")

    ev = sub.add_parser("evolve", parents=[common], help="mixed multimode measure along a population trajectory")
    src = ev.add_mutually_exclusive_group(required=True)
    src.add_argument("--trajectory", help="CSV rows t,w_1,...,w_m")
    src.add_argument("--rabi", type=float, metavar="OMEGA", help="two-mode Rabi populations")
    ev.add_argument("--p", type=int, default=2)
    ev.add_argument("--n", type=int, help="particle number (trace convention only; default p)")
    ev.add_argument("--t-max", type=float, help="Rabi end time (default one period)")
    ev.add_argument("--t-steps", type=int, default=41)

    tr = sub.add_parser("transitions", parents=[common], help="regime table for the three transitions")
    tr.add_argument("--n", type=int, default=1000)
    tr.add_argument("--p", type=int, default=4, help="largest reduction order")
    tr.add_argument("--spin", type=float, default=0.5)
    tr.add_argument("--magnetization", type=float, default=0.5)

    rp = sub.add_parser("reproduce", parents=[common], help="run every reference-value check")
    rp.add_argument("--only", action="append", help=f"label or group, e.g. eq75 or ising; one of {sorted(KEYS) + sorted(GROUPS)}")
    return ap


def _solver(args) -> SolverConfig:
    seed = args.seed
    env = os.environ.get("EPROD_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise CliError(f"EPROD_SEED must be an integer, got {env!r}") from None
    try:
        return SolverConfig(restarts=args.restarts, seed=seed)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _emit(rows: list[dict], args, columns=COLUMNS, extra_doc=None) -> None:
    cols = list(columns)
    for r in rows:
        cols.extend(k for k in r if k not in cols)
    if args.format == "json":
        doc = {"rows": rows}
        if extra_doc:
            doc.update(extra_doc)
        text = json.dumps(doc, indent=2, default=_json_default) + "\n"
    else:
        text = eio.write_csv(rows, cols)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(type(o).__name__)


def family_from_args(args) -> FamilySpec:
    params = {}
    for key in ("c1", "c2", "statistics", "sign", "p"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    if args.coeffs is not None:
        params["coeffs"] = args.coeffs
    if args.weights is not None:
        params["weights"] = [w.real for w in args.weights]
    name = args.family
    if name.endswith(("+", "-")) and name[:-1].lower() in ("epr", "bell", "ghz"):
        params.setdefault("sign", 1 if name[-1] == "+" else -1)
        name = name[:-1]
    n = args.n
    if name.lower() in ("epr", "bell", "separable", "separable_example", "separable-example"):
        n = 2
    try:
        return FamilySpec(name, n, params)
    except (FamilyError, KeyError, ValueError, TypeError) as exc:
        raise CliError(f"invalid family specification: {exc}") from None


def cmd_compute(args) -> int:
    spec = family_from_args(args)
    cfg = _solver(args)
    try:
        res = entanglement_production(make_density(spec), cfg, args.base)
    except NormalizationError as exc:
        raise CliError(str(exc), EXIT_TRACE) from None
    ref = expected_epsilon(spec, args.base)
    delta = abs(res.epsilon - ref)
    p = spec.p if spec.family in ("hf_reduced", "mixed_multimode") else spec.N
    row = dict(family=spec.family, N=spec.N, p=p, epsilon=res.epsilon, reference=ref, delta=delta,
               converged=res.converged, base=base_tag(args.base), norm_A=res.norm_A, norm_prod=res.norm_prod)
    _emit([row], args)
    if not res.converged:
        return EXIT_SOLVER
    return EXIT_OK if delta <= DELTA_TOL else EXIT_CHECK


def cmd_measure_file(args) -> int:
    try:
        A = eio.load_operator(args.path)
    except eio.ParseError as exc:
        raise CliError(f"{args.path}: {exc}") from None
    cfg = _solver(args)
    try:
        res = entanglement_production(A, cfg, args.base)
    except NormalizationError as exc:
        raise CliError(str(exc), EXIT_TRACE) from None
    except ValueError as exc:
        raise CliError(str(exc)) from None
    cert = res.certificate
    row = dict(family="file", N=A.p, p=A.p, epsilon=res.epsilon, converged=res.converged,
               base=res.base, norm_A=res.norm_A, norm_prod=res.norm_prod, method=cert.method,
               sweeps=cert.sweeps_used, restarts=cert.restarts_used)
    _emit([row], args, extra_doc={"certificate": eio.to_doc(cert)})
    return EXIT_OK if res.converged else EXIT_SOLVER


def _grid(lo, hi, n, name) -> np.ndarray:
    if n < 1 or not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise CliError(f"invalid {name} grid")
    return np.linspace(lo, hi, n)


def cmd_thermal(args) -> int:
    gs = _grid(args.g_min, args.g_max, args.g_steps, "g")
    bs = _grid(args.b_min, args.b_max, args.b_steps, "b")
    if bs[0] < 0:
        raise CliError("the field b must be >= 0")
    cfg = _solver(args)
    rows, worst, all_conv = [], 0.0, True
    for g in gs:
        for b in bs:
            prm = IsingParams(float(g), float(b))
            pipe = ising_pipeline_epsilon(prm, cfg, args.base)
            closed = ising_epsilon(prm, args.base)
            delta = abs(pipe.epsilon - closed)
            worst = max(worst, delta)
            all_conv &= pipe.converged
            rows.append(dict(family="ising", N=2, p=2, g=float(g), b=float(b), epsilon=pipe.epsilon,
                             reference=closed, delta=delta, converged=pipe.converged,
                             magnetization=ising_magnetization(prm)))
    limits_ok = True
    for lim in ising_limit_table(args.magnitude):
        ok = lim.passed(1e-6)
        limits_ok &= ok
        est, exp_ = lim.estimate, lim.expected
        if lim.quantity == "epsilon":
            est, exp_ = to_base(est, args.base), to_base(exp_, args.base)
        rows.append(dict(family="ising_limit", N=2, p=2, epsilon=est if lim.quantity == "epsilon" else None,
                         reference=exp_, delta=abs(est - exp_), converged=lim.settled,
                         magnetization=est if lim.quantity == "magnetization" else None,
                         key=lim.key, quantity=lim.quantity, ray=lim.ray, passed=ok))
    _emit(rows, args)
    if worst > THERMAL_TOL or not all_conv:
        print(f"thermal mismatch: max |closed - pipeline| = {worst:.3e}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK if limits_ok else EXIT_CHECK


def read_trajectory(path) -> tuple[np.ndarray, np.ndarray]:
    """Rows ``t, w_1, ..., w_m``; a non-numeric first line is a header."""
    try:
        lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    if not lines:
        raise CliError(f"{path}: empty trajectory")
    rows = []
    for k, ln in enumerate(lines):
        parts = [x.strip() for x in ln.split(",")]
        try:
            rows.append([float(x) for x in parts])
        except ValueError:
            if k == 0:
                continue
            raise CliError(f"{path}: row {k + 1} is not numeric") from None
    widths = {len(r) for r in rows}
    if len(widths) != 1 or widths.pop() < 2:
        raise CliError(f"{path}: rows need the same number of columns, t plus at least one population")
    arr = np.asarray(rows)
    return arr[:, 0], arr[:, 1:]


def _validate_populations(w: np.ndarray) -> None:
    for k, row in enumerate(w):
        if np.any(row < -1e-12) or np.any(row > 1 + 1e-12) or not np.all(np.isfinite(row)):
            raise CliError(f"trajectory row {k + 1}: populations must lie in [0, 1]")
        if abs(row.sum() - 1) > 1e-8:
            raise CliError(f"trajectory row {k + 1}: populations sum to {row.sum():.10g}, not 1")


def cmd_evolve(args) -> int:
    if args.trajectory:
        t, w = read_trajectory(args.trajectory)
    else:
        if not args.rabi > 0:
            raise CliError("--rabi needs a positive frequency")
        t_max = args.t_max if args.t_max is not None else 2 * math.pi / args.rabi
        if args.t_steps < 1:
            raise CliError("--t-steps must be positive")
        t = np.linspace(0, t_max, args.t_steps)
        w = rabi_populations(args.rabi, t)
    _validate_populations(w)
    p = args.p
    N = args.n if args.n is not None else p
    if not 1 <= p <= N:
        raise CliError(f"need 1 <= p <= N, got p={p}, N={N}")
    m = w.shape[1]
    top = to_base((p - 1) * math.log(m), args.base)
    cfg = _solver(args)
    rows, in_range, worst = [], True, 0.0
    for ti, wi in zip(t, w):
        wi = np.clip(wi, 0.0, 1.0)
        res = entanglement_production(mixed_multimode(N, p, wi), cfg, args.base)
        sup = float(wi.max())
        ref = to_base((1 - p) * math.log(sup), args.base) + 0.0
        delta = abs(res.epsilon - ref)
        worst = max(worst, delta)
        in_range &= -1e-12 <= res.epsilon <= top + 1e-12
        rows.append(dict(family="mixed_multimode", N=N, p=p, t=float(ti), epsilon=res.epsilon, reference=ref,
                         delta=delta, converged=res.converged, sup_w=sup))
    _emit(rows, args)
    if not in_range:
        print("epsilon left the interval [0, (p-1) log m]", file=sys.stderr)
    return EXIT_OK if in_range and worst <= DELTA_TOL else EXIT_CHECK


def cmd_transitions(args) -> int:
    if args.p < 1 or args.n < args.p:
        raise CliError("need 1 <= p <= N")
    if not 0 <= args.magnetization <= args.spin:
        raise CliError("magnetization must lie in [0, S]")
    table = regime_table(args.n, tuple(range(1, args.p + 1)), S=args.spin, M=args.magnetization, base=args.base)
    rows = [dict(family=r["transition"], N=r["N"], p=r["p"], epsilon=r["epsilon"], regime=r["regime"],
                 omega=r["omega"]) for r in table]
    _emit(rows, args)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    cfg = _solver(args)
    try:
        checks = run_checks(args.only, cfg, args.base)
    except KeyError as exc:
        raise CliError(str(exc.args[0])) from None
    failed = [c for c in checks if not c.passed]
    if args.output or args.format == "json":
        rows = [dict(key=c.key, name=c.name, passed=c.passed, value=c.value, reference=c.reference,
                     delta=c.delta, tol=c.tol, detail=c.detail) for c in checks]
        _emit(rows, args, columns=("key", "name", "passed", "value", "reference", "delta", "tol", "detail"))
    else:
        for c in checks:
            print(c.line())
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed", file=sys.stderr)
    return EXIT_CHECK if failed else EXIT_OK


COMMANDS = {
    "compute": cmd_compute,
    "measure-file": cmd_measure_file,
    "thermal": cmd_thermal,
    "evolve": cmd_evolve,
    "transitions": cmd_transitions,
    "reproduce": cmd_reproduce,
}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_SPEC if exc.code else EXIT_OK
    try:
        base_tag(args.base)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())

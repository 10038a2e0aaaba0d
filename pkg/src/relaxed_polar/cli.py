"""Command-line front end: relax, branches, validate, sweep, isosurface.

JSON (with a result envelope) or CSV goes to stdout, diagnostics to stderr.
Exit codes: 0 success, 1 validation failure, 2 usage/parse error, 3 domain
or precondition violation. Numeric fields are emitted with Python's
shortest-round-trip float representation, so parsing the output recovers
the library values bit-exactly.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import __version__
from .branches import classify_branch, direct_energy, enumerate_branches, minimal_branch, verify_branch
from .energy import MaterialParams, el_residual_matrix
from .errors import RelaxedPolarError
from .relax import (
    classify_domain_sigma,
    optimal_relative_angle_sigma,
    reduced_energy_sigma,
    relaxed_polar,
)
from .rotcore import axis_angle, svd_ordered
from .sampling import PAPER_SCALE_SAMPLES, run_validation

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


class UsageError(Exception):
    """Malformed command-line value (exit code 2)."""


def _parse_floats(tokens: list[str], n: int, what: str) -> list[float]:
    flat: list[str] = []
    for tok in tokens:
        flat.extend(t for t in tok.replace(",", " ").split() if t)
    if len(flat) != n:
        raise UsageError(f"{what}: expected {n} numbers, got {len(flat)}")
    try:
        return [float(t) for t in flat]
    except ValueError as exc:
        raise UsageError(f"{what}: {exc}") from None


def _parse_matrix(tokens: list[str]) -> np.ndarray:
    if [t.lower() for t in tokens] == ["identity"]:
        return np.eye(3)
    vals = _parse_floats(tokens, 9, "--F")
    return np.array(vals).reshape(3, 3)


def _parse_range(spec: str) -> tuple[float, float, int]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"range must be min:max:steps, got {spec!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"range {spec!r}: {exc}") from None
    if steps < 2 or not hi > lo:
        raise UsageError(f"range {spec!r}: need max > min and steps >= 2")
    return lo, hi, steps


def _parse_lo_hi(spec: str) -> tuple[float, float]:
    parts = spec.split(":")
    if len(parts) != 2:
        raise UsageError(f"range must be lo:hi, got {spec!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise UsageError(f"range {spec!r}: {exc}") from None
    if not (0.0 < lo < hi):
        raise UsageError(f"range {spec!r}: need 0 < lo < hi")
    return lo, hi


def _envelope(command: str, args_echo: dict, payload, seed: int | None = None) -> dict:
    env = {"tool": "relaxed-polar", "version": __version__, "command": command, "args": args_echo}
    if seed is not None:
        env["seed"] = seed
    env["payload"] = payload
    return env


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _mat(m: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in m]


# ---------------------------------------------------------------------------
# relax
# ---------------------------------------------------------------------------


def _cmd_relax(args) -> int:
    if (args.F is None) == (args.sigma is None):
        raise UsageError("provide exactly one of --F or --sigma")
    if args.F is not None:
        f = _parse_matrix(args.F)
        echo_input = {"F": _mat(f)}
    else:
        sig = _parse_floats(args.sigma, 3, "--sigma")
        f = np.diag(sig)
        echo_input = {"sigma": sig}

    p = MaterialParams(args.mu, args.muc)
    dec = svd_ordered(f)
    rel = relaxed_polar(f, p)
    aa_plus = axis_angle(dec.Rp.T @ rel.r_plus)
    aa_minus = axis_angle(dec.Rp.T @ rel.r_minus)
    u_mmp = 0.5 * (dec.sigma[0] + dec.sigma[1])

    payload = {
        "domain": rel.domain_tag.value,
        "sigma": list(dec.sigma),
        "beta_hat": rel.beta_hat,
        "axis": [float(v) for v in rel.axis],
        "u_mmp": u_mmp,
        "s_mmp": u_mmp - 1.0,
        "rho": p.rho,
        "lambda_scale": p.lambda_scale,
        "reduced_energy": rel.reduced_energy,
        "coincide": rel.coincide,
        "degenerate_axis": rel.degenerate_axis,
        "polar": _mat(dec.Rp),
        "rpolar_plus": {
            "matrix": _mat(rel.r_plus),
            "relative_angle": aa_plus.angle,
            "relative_axis": [float(v) for v in aa_plus.axis],
            "el_residual": el_residual_matrix(rel.r_plus, f, p),
        },
        "rpolar_minus": {
            "matrix": _mat(rel.r_minus),
            "relative_angle": aa_minus.angle,
            "relative_axis": [float(v) for v in aa_minus.axis],
            "el_residual": el_residual_matrix(rel.r_minus, f, p),
        },
        "el_residual_polar": el_residual_matrix(dec.Rp, f, p),
    }

    if args.format == "json":
        echo = {"mu": args.mu, "muc": args.muc, **echo_input}
        text = json.dumps(_envelope("relax", echo, payload)) + "\n"
    else:
        header = ["domain", "beta_hat", "axis_1", "axis_2", "axis_3", "u_mmp", "s_mmp",
                  "rho", "lambda_scale", "reduced_energy", "angle_plus", "angle_minus"]
        row = [payload["domain"], rel.beta_hat, *payload["axis"], u_mmp, u_mmp - 1.0,
               p.rho, p.lambda_scale, rel.reduced_energy, aa_plus.angle, aa_minus.angle]
        for tag, m in (("plus", rel.r_plus), ("minus", rel.r_minus)):
            for i in range(3):
                for j in range(3):
                    header.append(f"rpolar_{tag}_{i + 1}{j + 1}")
                    row.append(float(m[i, j]))
        text = _csv_text(header, [row])
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# branches
# ---------------------------------------------------------------------------


def _cmd_branches(args) -> int:
    sig = _parse_floats(args.sigma, 3, "--sigma")
    if not (sig[0] > sig[1] > sig[2] > 0.0):
        print(
            f"error: --sigma must be strictly descending and positive, got {sig} "
            "(sort the values in descending order)",
            file=sys.stderr,
        )
        return EXIT_DOMAIN
    branches = enumerate_branches(sig)
    minimal_ids = {b.branch_id for b in minimal_branch(sig)}

    rows = []
    for b in branches:
        if b.defined:
            rows.append(
                {
                    "id": b.branch_id,
                    "defined": True,
                    "domain_condition": b.domain_condition,
                    "w": float(b.quaternion[0]),
                    "x": float(b.quaternion[1]),
                    "y": float(b.quaternion[2]),
                    "z": float(b.quaternion[3]),
                    "multiplier": b.multiplier,
                    "closed_form_energy": b.closed_form_energy,
                    "direct_energy": direct_energy(b, sig),
                    "residual": verify_branch(b, sig),
                    "classification": classify_branch(b, sig).value,
                    "minimal": b.branch_id in minimal_ids,
                }
            )
        else:
            rows.append(
                {
                    "id": b.branch_id,
                    "defined": False,
                    "domain_condition": b.domain_condition,
                    "w": None, "x": None, "y": None, "z": None,
                    "multiplier": None,
                    "closed_form_energy": None,
                    "direct_energy": None,
                    "residual": None,
                    "classification": None,
                    "minimal": False,
                }
            )

    echo = {"sigma": sig, "mu_limit_case": bool(args.mu_limit_case)}
    if args.format == "json":
        text = json.dumps(_envelope("branches", echo, {"branches": rows})) + "\n"
    else:
        header = list(rows[0].keys())
        csv_rows = [[("" if r[k] is None else r[k]) for k in header] for r in rows]
        text = _csv_text(header, csv_rows)
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def _cmd_validate(args) -> int:
    n_cases = args.cases_per_domain
    n_samples = args.samples
    shared = args.shared_samples
    if args.paper_scale:
        n_cases = 1000
        n_samples = PAPER_SCALE_SAMPLES
        shared = True
    if n_cases < 1 or n_samples < 1:
        raise UsageError("--cases-per-domain and --samples must be >= 1")

    p = MaterialParams(args.mu, args.muc)
    report = run_validation(
        p,
        n_classical=n_cases,
        n_nonclassical=n_cases,
        n_samples=n_samples,
        seed=args.seed,
        tol=args.tol,
        workers=args.workers,
        shared_samples=shared,
    )
    echo = {
        "mu": args.mu, "muc": args.muc, "cases_per_domain": n_cases,
        "samples": n_samples, "tol": args.tol, "paper_scale": bool(args.paper_scale),
        "shared_samples": shared,
    }
    text = json.dumps(_envelope("validate", echo, report.to_dict(), seed=args.seed)) + "\n"
    _emit(text, args.out)
    if report.failures:
        print(f"validation: {report.failures} of {report.n_cases} cases failed", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _cmd_sweep(args) -> int:
    lo, hi, steps = _parse_range(args.s12)
    p = MaterialParams(args.mu, args.muc)
    delta = args.delta
    sigma3 = args.sigma3
    if delta <= 0.0:
        raise UsageError("--delta must be positive")
    if not (lo / 2.0 - delta > sigma3 > 0.0):
        print(
            f"error: need s12/2 - delta > sigma3 > 0 along the sweep "
            f"(s12 min {lo}, delta {delta}, sigma3 {sigma3})",
            file=sys.stderr,
        )
        return EXIT_DOMAIN

    rows = []
    for s12 in np.linspace(lo, hi, steps):
        s12 = float(s12)
        sig = (0.5 * s12 + delta, 0.5 * s12 - delta, sigma3)
        beta = optimal_relative_angle_sigma(sig, p)
        rows.append(
            [s12, beta, -beta + 0.0, reduced_energy_sigma(sig, p),
             classify_domain_sigma(sig, p).value]
        )

    if args.format == "json":
        echo = {"mu": args.mu, "muc": args.muc, "s12": args.s12,
                "sigma3": sigma3, "delta": delta}
        payload = {
            "columns": ["s12", "beta_plus", "beta_minus", "w_red", "domain"],
            "rows": rows,
        }
        text = json.dumps(_envelope("sweep", echo, payload)) + "\n"
    else:
        text = _csv_text(["s12", "beta_plus", "beta_minus", "w_red", "domain"], rows)
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# isosurface
# ---------------------------------------------------------------------------


def _cmd_isosurface(args) -> int:
    lo, hi = _parse_lo_hi(args.range)
    if args.grid < 2:
        raise UsageError("--grid must be >= 2")
    levels = []
    if args.levels:
        try:
            levels = [float(t) for t in args.levels.replace(",", " ").split()]
        except ValueError as exc:
            raise UsageError(f"--levels: {exc}") from None

    p10 = MaterialParams(1.0, 0.0)
    axis = np.linspace(lo, hi, args.grid)
    rows = []
    for a in axis:
        for b in axis:
            for c in axis:
                rows.append(
                    [float(a), float(b), float(c),
                     reduced_energy_sigma((float(a), float(b), float(c)), p10)]
                )

    if args.format == "json":
        echo = {"levels": levels, "grid": args.grid, "range": args.range}
        payload = {"columns": ["sigma1", "sigma2", "sigma3", "w_red"],
                   "levels": levels, "rows": rows}
        text = json.dumps(_envelope("isosurface", echo, payload)) + "\n"
    else:
        text = _csv_text(["sigma1", "sigma2", "sigma3", "w_red"], rows)
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="relaxed-polar",
        description="Energy-minimizing Cosserat rotations: relaxation, branch "
        "catalog, Monte Carlo validation, diagram sweeps.",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    rx = sub.add_parser("relax", help="relaxed polar factors for one F (or sigma triple)")
    rx.add_argument("--F", nargs="+", metavar="V",
                    help="nine reals, row-major (whitespace or comma separated), or 'identity'")
    rx.add_argument("--sigma", nargs="+", metavar="S", help="three singular values")
    rx.add_argument("--mu", type=float, required=True)
    rx.add_argument("--muc", type=float, required=True)
    rx.add_argument("--format", choices=("json", "csv"), default="json")
    rx.add_argument("--out", help="write output to this file instead of stdout")
    rx.set_defaults(func=_cmd_relax)

    br = sub.add_parser("branches", help="critical-branch table at a sigma triple (limit case (1,0))")
    br.add_argument("--sigma", nargs="+", required=True, metavar="S",
                    help="three singular values, strictly descending")
    br.add_argument("--mu-limit-case", action="store_true",
                    help="acknowledge that the catalog is for the non-classical limit "
                         "case (mu, muc) = (1, 0); no behavior change")
    br.add_argument("--format", choices=("csv", "json"), default="csv")
    br.add_argument("--out")
    br.set_defaults(func=_cmd_branches)

    va = sub.add_parser("validate", help="Monte Carlo global-optimality validation")
    va.add_argument("--mu", type=float, required=True)
    va.add_argument("--muc", type=float, required=True)
    va.add_argument("--cases-per-domain", type=int, default=200)
    va.add_argument("--samples", type=int, default=100_000)
    va.add_argument("--seed", type=int, default=42)
    va.add_argument("--tol", type=float, default=1e-4,
                    help="Frobenius tolerance, enforced at paper scale (>= 4e6 samples)")
    va.add_argument("--paper-scale", action="store_true",
                    help="1000 cases/domain, 4629171 shared samples, Frobenius tol enforced")
    va.add_argument("--shared-samples", action="store_true",
                    help="reuse one quaternion set across all cases")
    va.add_argument("--workers", type=int, default=None,
                    help="worker threads (default: RELAXED_POLAR_THREADS or 1)")
    va.add_argument("--out")
    va.set_defaults(func=_cmd_validate)

    sw = sub.add_parser("sweep", help="bifurcation-diagram sweep over s12")
    sw.add_argument("--mu", type=float, required=True)
    sw.add_argument("--muc", type=float, required=True)
    sw.add_argument("--s12", required=True, metavar="MIN:MAX:STEPS")
    sw.add_argument("--sigma3", type=float, default=0.5)
    sw.add_argument("--delta", type=float, default=0.1,
                    help="asymmetry: sigma1,2 = s12/2 +- delta")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--out")
    sw.set_defaults(func=_cmd_sweep)

    iso = sub.add_parser("isosurface", help="reduced-energy grid in unordered sigma space")
    iso.add_argument("--levels", default="",
                     help="comma-separated contour levels (echoed for consumers; "
                          "the full grid is always emitted)")
    iso.add_argument("--grid", type=int, required=True, help="points per axis (>= 2)")
    iso.add_argument("--range", required=True, metavar="LO:HI")
    iso.add_argument("--format", choices=("csv", "json"), default="csv")
    iso.add_argument("--out")
    iso.set_defaults(func=_cmd_isosurface)

    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    t0 = time.perf_counter()
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RelaxedPolarError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    print(f"elapsed: {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

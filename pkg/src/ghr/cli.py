"""``ghr`` command line: bound tables, moment conversion, oracle checks, sweeps.

Exit codes: 0 success, 1 invalid input or failed check, 2 bound infinite.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction
from typing import Optional

from . import io
from .bound import Status, bound_series, closed_form_term, gamma_second_order, max_k
from .errors import DegenerateDenominator, GhrError
from .moments import (
    Exponential,
    ExplicitCumulants,
    ExplicitMoments,
    Gamma,
    Gaussian,
    central_to_cumulants,
    moments_of,
    validate,
)
from .oracle import build_model, cross_validate, frame_capacity, run_ensemble
from .scalar import BACKENDS, EXACT, REAL, default_backend, format_scalar

EXIT_OK, EXIT_FAIL, EXIT_DIVERGENT = 0, 1, 2
CROSS_CHECK_RTOL = 1e-9
QUOTED_EXPONENTIAL_THIRD = 0.063


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FAIL, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _backend(args) -> Optional[str]:
    return args.backend or default_backend()


def _number(text: str, backend: Optional[str], name: str):
    if backend == REAL:
        try:
            return float(Fraction(text)) if "/" in text else float(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"--{name}: not a number: {text!r}") from exc
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        if backend == EXACT:
            raise UsageError(f"--{name}={text!r} is not rational; the exact backend needs rational inputs") from None
        try:
            return float(text)
        except ValueError as exc:
            raise UsageError(f"--{name}: not a number: {text!r}") from exc


def _odd_kmax(k: int) -> int:
    if k < 1 or k % 2 == 0:
        raise UsageError(f"--kmax must be a positive odd integer, got {k}")
    return k


def _distribution(args, backend):
    """(spec, is_exponential) from the distribution flags."""
    if getattr(args, "moments_file", None):
        return ExplicitMoments(io.load_moments(args.moments_file, backend)), False
    if getattr(args, "cumulants_file", None):
        return ExplicitCumulants(io.load_cumulants(args.cumulants_file, backend)), False
    if getattr(args, "spectrum_file", None):
        return io.load_spectrum(args.spectrum_file, backend), False
    dist = args.dist
    if dist is None:
        raise UsageError("give --dist or one of --moments-file/--cumulants-file/--spectrum-file")
    if dist == "gamma":
        if args.shape is None:
            raise UsageError("--dist gamma needs --shape")
        shape = _number(args.shape, backend, "shape")
        rate = _number(args.rate, backend, "rate")
        return Gamma(shape, rate), shape == 1
    if dist == "exponential":
        return Exponential(_number(args.rate, backend, "rate")), True
    if dist == "gaussian":
        return Gaussian(_number(args.variance, backend, "variance")), False
    raise UsageError(f"unknown distribution {dist!r}")


def _spec_moments(spec, order: int):
    if isinstance(spec, ExplicitMoments):
        return spec.moments.truncated(min(order, spec.moments.order))
    if isinstance(spec, ExplicitCumulants):
        return moments_of(spec, min(order, spec.cumulants.order))
    return moments_of(spec, order)


def _approx(x) -> str:
    if x is None:
        return "undefined"
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return format(float(x), ".10g")


def _cell(x) -> str:
    if x is None:
        return ""
    return format_scalar(x)


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _table(header, rows, out):
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(str(h)) for i, h in enumerate(header)]
    out.write("  ".join(str(h).rjust(w) for h, w in zip(header, widths)) + "\n")
    for r in rows:
        out.write("  ".join(str(c).rjust(w) for c, w in zip(r, widths)) + "\n")


def _rel_diff(a, b) -> float:
    a, b = float(a), float(b)
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


# ---------------------------------------------------------------------------
# bound
# ---------------------------------------------------------------------------

def cmd_bound(args, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    backend = _backend(args)
    k_max = _odd_kmax(args.kmax)
    spec, exponential = _distribution(args, backend)
    mu = _spec_moments(spec, 2 * k_max)
    if mu.order < 2 * k_max:
        feasible = max_k(mu)
        if feasible < 1:
            raise UsageError(f"moments only through mu_{mu.order}; need at least mu_2")
        err.write(f"warning: moments only through mu_{mu.order}; using --kmax {feasible}\n")
        k_max = feasible
        mu = mu.truncated(2 * k_max)
    report = validate(mu)
    if not report.valid:
        err.write("error: invalid moment sequence: " + "; ".join(report.reasons) + "\n")
        return EXIT_FAIL

    series = bound_series(mu, k_max)
    rows = []
    cross_ok = True
    for term, partial in zip(series.terms, series.partial_sums):
        closed = None
        if term.k in (3, 5) and term.status is Status.REGULAR:
            try:
                closed = closed_form_term(mu, term.k)
            except DegenerateDenominator:
                closed = None
            if closed is not None and _rel_diff(closed, term.value) > CROSS_CHECK_RTOL:
                cross_ok = False
        rows.append(
            {
                "k": term.k,
                "U": term.U,
                "N": term.N,
                "term": term.value,
                "partial_sum": partial,
                "status": str(term.status),
                "closed_form": closed,
                "cond": term.cond,
            }
        )
    notes = []
    if series.degeneracy:
        notes.append(series.degeneracy)
    if exponential and len(series.terms) >= 3 and series.terms[2].status is Status.REGULAR:
        notes.append(
            f"exponential law: third-order term computes to {_approx(series.terms[2].value)} by both the "
            f"recursion and the closed form; the value {QUOTED_EXPONENTIAL_THIRD} sometimes quoted for it is not reproduced"
        )
    if not cross_ok:
        notes.append("cross-check FAILED: closed form disagrees with the recursion")

    fields = ["k", "U", "N", "term", "partial_sum", "status", "closed_form"]
    if args.output == "csv":
        w = _writer(out)
        w.writerow(fields)
        for r in rows:
            w.writerow([r["k"], _cell(r["U"]), _cell(r["N"]), _cell(r["term"]), _cell(r["partial_sum"]), r["status"], _cell(r["closed_form"])])
        w.writerow(["bound", "", "", "", _cell(series.bound), _bound_status(series), ""])
    elif args.output == "json-lines":
        for r in rows:
            doc = {f: (r[f] if f in ("k", "status") else _json_value(r[f])) for f in fields}
            doc["term_approx"] = None if r["term"] is None else float(r["term"])
            if r["cond"] is not None:
                doc["cond"] = r["cond"]
            out.write(json.dumps(doc) + "\n")
        out.write(json.dumps({"bound": _json_value(series.bound), "status": _bound_status(series), "notes": notes}) + "\n")
    else:
        cells = [
            [r["k"], _approx(r["U"]), _approx(r["N"]), _approx(r["term"]), _approx(r["partial_sum"]), r["status"],
             "" if r["closed_form"] is None else _approx(r["closed_form"])]
            for r in rows
        ]
        _table(fields, cells, out)
        out.write(f"bound: DT^2 DH^2 >= {_approx(series.bound)}")
        if mu.exact and series.bound is not None and not _is_inf(series.bound):
            out.write(f"  (= {format_scalar(series.bound)})")
        out.write("\n")
        for note in notes:
            out.write(f"note: {note}\n")
    if not cross_ok:
        return EXIT_FAIL
    if series.divergent:
        return EXIT_DIVERGENT
    return EXIT_OK


def _is_inf(x) -> bool:
    return isinstance(x, float) and math.isinf(x)


def _json_value(x):
    if x is None:
        return None
    if isinstance(x, Fraction):
        return format_scalar(x)
    if _is_inf(x):
        return "inf"
    return float(x)


def _bound_status(series) -> str:
    if series.undefined:
        return "undefined"
    if series.divergent:
        return "divergent"
    return "finite"


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

def cmd_moments(args, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    backend = _backend(args)
    spec, _ = _distribution(args, backend)
    mu = _spec_moments(spec, args.order)
    report = validate(mu)
    if not report.valid:
        err.write("error: invalid moment sequence: " + "; ".join(report.reasons) + "\n")
        return EXIT_FAIL
    kappa = central_to_cumulants(mu)
    if args.output == "json-lines":
        out.write(json.dumps({"mu": [_json_value(x) for x in mu.mu]}) + "\n")
        out.write(json.dumps({"kappa": [_json_value(x) for x in kappa.kappa]}) + "\n")
        out.write(json.dumps({"valid": report.valid, "minors": [_json_value(x) for x in report.minors],
                              "rank_deficient": list(report.rank_deficient)}) + "\n")
        return EXIT_OK
    if args.output == "csv":
        w = _writer(out)
        w.writerow(["n", "mu", "kappa"])
        for n in range(mu.order + 1):
            w.writerow([n, _cell(mu[n]), _cell(kappa.cumulant(n)) if n >= 1 else ""])
        return EXIT_OK
    rows = [[n, format_scalar(mu[n]), format_scalar(kappa.cumulant(n)) if n >= 1 else ""] for n in range(mu.order + 1)]
    _table(["n", "mu_n", "kappa_n"], rows, out)
    out.write(f"valid: {report.valid}\n")
    for m, (minor, flag) in enumerate(zip(report.minors, report.rank_deficient)):
        out.write(f"D_{2 * (2 * m + 1)} = {format_scalar(minor)}{'  (rank deficient)' if flag else ''}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _int_range(text: str) -> list:
    """``a``, ``a,b,c`` or inclusive ``start:stop[:step]``."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) == 3 else 1
            if step <= 0:
                raise ValueError
            values = list(range(start, stop + 1, step))
        else:
            values = [int(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"bad integer range {text!r}") from None
    if not values:
        raise UsageError(f"empty range {text!r}")
    return values


def cmd_verify(args, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    k_max = _odd_kmax(args.kmax)
    tol = args.tol
    if args.spectrum_file:
        model = build_model(io.load_spectrum_model(args.spectrum_file))
        report = cross_validate(model, k_max, tol)
        runs = [("file", args.spectrum_file, report)]
        capacity = {("file", args.spectrum_file): frame_capacity(model)}
    else:
        dims = _int_range(args.dims)
        if any(d < 2 or d > 32 for d in dims):
            raise UsageError("--dims must lie in [2, 32]")
        if args.seeds < 1:
            raise UsageError("--seeds must be positive")
        result = run_ensemble(dims, range(args.seed_offset, args.seed_offset + args.seeds), k_max, tol)
        runs = result.runs
        capacity = {}

    worst = {"mu": 0.0, "N": 0.0, "F": 0.0, "U": 0.0}
    exhausted = {}
    failures = []
    for dim, seed, rep in runs:
        for key, val in rep.worst.items():
            worst[key] = max(worst[key], val)
        if rep.frame_vanished_at is not None and not rep.variance_zero:
            key = (rep.frame_vanished_at, rep.frame_status, rep.consistent)
            exhausted[key] = exhausted.get(key, 0) + 1
        if not rep.passed:
            failures.append((dim, seed, rep))
        if args.output == "json-lines":
            out.write(json.dumps({
                "dim": dim if dim != "file" else rep.dim, "seed": seed, "passed": rep.passed,
                "worst": rep.worst, "frame_vanished_at": rep.frame_vanished_at,
                "frame_status": rep.frame_status, "engine_status": rep.engine_status,
                "consistent": rep.consistent, "variance_zero": rep.variance_zero,
            }) + "\n")

    if args.output != "json-lines":
        out.write(f"models: {len(runs)}  k_max: {k_max}  tolerance: {tol:g}\n")
        _table(["identity", "worst_rel_err"], [
            ["moments mu_2m", f"{worst['mu']:.3e}"],
            ["norms N_k", f"{worst['N']:.3e}"],
            ["projections F_nk", f"{worst['F']:.3e}"],
            ["numerators U_k", f"{worst['U']:.3e}"],
        ], out)
        for (k, status, consistent), count in sorted(exhausted.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
            verdict = "consistent with bound engine" if consistent else "INCONSISTENT with bound engine"
            out.write(f"frame exhausted at k={k} ({status}) in {count} model(s), {verdict}\n")
        for dim, seed, rep in runs:
            if rep.variance_zero:
                out.write(f"{dim}/{seed}: variance DH^2 = 0, bound undefined\n")
        for key, cap in capacity.items():
            out.write(f"nonvanishing odd frame vectors possible: {cap}\n")
        out.write("PASS\n" if not failures else "FAIL\n")
    for dim, seed, rep in failures:
        err.write(f"failed: dim={rep.dim} seed={seed} k_max={k_max}: " + "; ".join(rep.failures) + "\n")
    return EXIT_OK if not failures else EXIT_FAIL


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _frac_range(text: str) -> list:
    try:
        parts = [Fraction(p) for p in text.split(":")]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad range {text!r}") from None
    if len(parts) != 3:
        raise UsageError(f"range must be start:stop:step, got {text!r}")
    start, stop, step = parts
    if step <= 0 or stop < start:
        raise UsageError(f"empty range {text!r}")
    count = int((stop - start) // step) + 1
    return [start + i * step for i in range(count)]


def cmd_sweep(args, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    backend = _backend(args)
    k_max = _odd_kmax(args.kmax)
    ks = list(range(1, k_max + 1, 2))
    term_cols = [f"term{k}" for k in ks]
    if args.spectrum_files:
        header = ["source"] + term_cols + ["bound"]
        items = [(path, io.load_spectrum(path, backend)) for path in args.spectrum_files]
    else:
        if args.dist not in (None, "gamma"):
            raise UsageError("sweep supports --dist gamma or --spectrum-files")
        if not args.shape_range:
            raise UsageError("gamma sweep needs --shape-range start:stop:step")
        shapes = _frac_range(args.shape_range)
        rate = _number(args.rate, backend, "rate")
        if backend == REAL:
            shapes = [float(s) for s in shapes]
            rate = float(rate)
        header = ["gamma"] + term_cols + ["bound", "gamma_second_order"]
        items = [(s, Gamma(s, rate)) for s in shapes]

    rows = []
    for key, spec in items:
        mu = moments_of(spec, 2 * k_max)
        report = validate(mu)
        if not report.valid:
            raise GhrError(f"{key}: invalid moment sequence: " + "; ".join(report.reasons))
        series = bound_series(mu, k_max)
        values = [_cell(t.value) for t in series.terms] + [""] * (len(ks) - len(series.terms))
        row = [_cell(key) if not isinstance(key, str) else key] + values + [_cell(series.bound)]
        if not args.spectrum_files:
            row.append(_cell(gamma_second_order(key)))
        rows.append(row)

    fh = open(args.out, "w", encoding="utf-8", newline="") if args.out else out
    try:
        w = _writer(fh)
        w.writerow(header)
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_dist(p, *, files=True):
    p.add_argument("--dist", choices=["gamma", "exponential", "gaussian"])
    p.add_argument("--shape", help="gamma shape (rational literal such as 7/2)")
    p.add_argument("--rate", default="1", help="gamma/exponential rate (default 1)")
    p.add_argument("--variance", default="1", help="gaussian variance (default 1)")
    if files:
        src = p.add_mutually_exclusive_group()
        src.add_argument("--moments-file", help="JSON moments file, '-' for stdin")
        src.add_argument("--cumulants-file", help="JSON cumulants file, '-' for stdin")
        src.add_argument("--spectrum-file", help="JSON spectrum file, '-' for stdin")


def _add_backend(p):
    p.add_argument("--backend", choices=BACKENDS, default=None,
                   help="scalar backend (default: $GHR_BACKEND, else exact for rational inputs)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ghr", description="Generalized Heisenberg uncertainty bounds from central moments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", help="bound series table")
    _add_dist(p)
    _add_backend(p)
    p.add_argument("--kmax", type=int, default=5)
    p.add_argument("--output", choices=["table", "csv", "json-lines"], default="table")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("moments", help="central moments, cumulants and validity")
    _add_dist(p)
    _add_backend(p)
    p.add_argument("--order", type=int, default=8)
    p.add_argument("--output", choices=["table", "csv", "json-lines"], default="table")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("verify", help="cross-check the formulas against Hilbert-space models")
    p.add_argument("--dims", default="4,6,8,12", help="dimensions: d, d1,d2,... or start:stop[:step]")
    p.add_argument("--seeds", type=int, default=25, help="models per dimension")
    p.add_argument("--seed-offset", type=int, default=0)
    p.add_argument("--kmax", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--spectrum-file", help="verify a single diagonal model instead")
    p.add_argument("--output", choices=["table", "json-lines"], default="table")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="bound terms across gamma shapes or spectrum files, as CSV")
    _add_dist(p, files=False)
    _add_backend(p)
    p.add_argument("--shape-range", help="start:stop:step, inclusive")
    p.add_argument("--spectrum-files", nargs="+")
    p.add_argument("--kmax", type=int, default=5)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, GhrError, ValueError, OSError) as exc:
        msg = str(exc)
        if getattr(args, "backend", None) == EXACT and "sum to" in msg:
            msg += " (exact backend: inputs must be exactly rational; try --backend real)"
        sys.stderr.write(f"error: {msg}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Every subcommand prints one JSON document (or CSV for ``table --csv``) on
standard output.  Exit status: 0 on success, 1 when the query is outside
the valid range or the input is malformed, 2 when an internal consistency
check fails (prime or method disagreement, D^2 != 0).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import __version__
from .bott import flag12_cohomology, proj_cotangent_cohomology
from .cohomology import (
    ample_check,
    h0_surface_positive_twist,
    h_i,
    phi_kernel,
    psi_kernel,
    sweep,
    witness,
)
from .complexes import ConsistencyError, Problem, ValidityError
from .field_linalg import DEFAULT_PRIMES, FieldError, PrimeDisagreement
from .invariants import run_suite
from .polyspace import PolyError

log = logging.getLogger("symcoh")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INTERNAL = 2


class ProblemFileError(ValueError):
    pass


def resolve_problem_path(name: str) -> Path:
    """A path on disk, or the name of a bundled problem file."""
    p = Path(name)
    if p.exists():
        return p
    bundled = resources.files("symcoh") / "problems" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    if not p.suffix:
        bundled = resources.files("symcoh") / "problems" / (p.name + ".json")
        if bundled.is_file():
            return Path(str(bundled))
    raise ProblemFileError(f"problem file {name!r} not found (also looked among bundled problems)")


def load_problem(name: str) -> Problem:
    path = resolve_problem_path(name)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{path}: not valid JSON ({exc})") from exc
    missing = [k for k in ("N", "polys") if k not in data]
    if missing:
        raise ProblemFileError(f"{path}: missing field(s) {', '.join(missing)}")
    if not isinstance(data["N"], int) or not isinstance(data["polys"], list):
        raise ProblemFileError(f"{path}: N must be an integer and polys a list of strings")
    return Problem.from_strings(data["N"], data["polys"], str(data.get("description", "")))


def bundled_problems() -> list[str]:
    root = resources.files("symcoh") / "problems"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def _int_range(text: str) -> list[int]:
    """'a:b' (inclusive), 'a,b,c' or a single integer."""
    try:
        if ":" in text:
            a, b = text.split(":", 1)
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer range {text!r}; use a:b or a,b,c")


def _primes(args) -> tuple[int, ...]:
    if args.primes:
        return tuple(int(x) for x in args.primes.split(","))
    if args.prime:
        return (args.prime,)
    return DEFAULT_PRIMES


def _problem_echo(prob: Problem, name: str) -> dict:
    return {"file": name, "N": prob.N, "degrees": list(prob.degrees), "description": prob.description}


# ---------------------------------------------------------------------------
# subcommands


def cmd_bott(args) -> dict:
    h = proj_cotangent_cohomology(args.N, args.m, args.n)
    out = {"query": {"N": args.N, "m": args.m, "n": args.n}, "h": {str(i): v for i, v in sorted(h.items())}}
    if args.flag12:
        f = flag12_cohomology(args.N, args.m, args.n)
        out["flag12"] = {str(i): v for i, v in sorted(f.items())}
        out["agree"] = f == h
        if f != h:
            raise ConsistencyError(f"Bott normalization and flag search disagree: {h} vs {f}")
    return out


def cmd_hi(args) -> dict:
    prob = load_problem(args.problem)
    rep = h_i(prob, args.m, args.n, args.i, args.method, _primes(args), args.verify_level, exact=args.exact)
    out = rep.to_dict()
    out["problem"] = _problem_echo(prob, args.problem)
    if args.i is not None:
        out["value"] = rep.h[args.i]
    return out


def cmd_h0_surface(args) -> dict:
    prob = load_problem(args.problem)
    rep = h0_surface_positive_twist(prob, args.m, args.t, args.method, _primes(args), args.verify_level)
    out = rep.to_dict()
    out["problem"] = _problem_echo(prob, args.problem)
    out["value"] = rep.h[2]
    return out


def cmd_phi0(args) -> dict:
    prob = load_problem(args.problem)
    primes = _primes(args)
    results = [phi_kernel(prob, args.m, p, want_basis=args.basis and i == 0) for i, p in enumerate(primes)]
    dims = {str(r.prime): r.dimension for r in results}
    if len(set(dims.values())) > 1:
        raise PrimeDisagreement(f"phi kernel dimension differs across primes: {dims}")
    out = results[0].to_dict()
    out.update({"query": {"m": args.m}, "problem": _problem_echo(prob, args.problem), "per_prime": dims})
    return out


def cmd_psi(args) -> dict:
    prob = load_problem(args.problem)
    primes = _primes(args)
    results = [psi_kernel(prob, p, want_basis=args.basis and i == 0) for i, p in enumerate(primes)]
    dims = {str(r.prime): r.dimension for r in results}
    if len(set(dims.values())) > 1:
        raise PrimeDisagreement(f"psi kernel dimension differs across primes: {dims}")
    d = min(prob.degrees)
    out = results[0].to_dict()
    out.update(
        {
            "query": {"d": d, "m": 2 if d == 2 else d - 1},
            "problem": _problem_echo(prob, args.problem),
            "per_prime": dims,
            "nonvanishing_certified": results[0].dimension > 0,
        }
    )
    return out


def cmd_ample_check(args) -> dict:
    prob = load_problem(args.problem)
    rep = ample_check(prob, args.m, args.method, _primes(args), args.verify_level)
    out = rep.to_dict()
    out.update({"query": {"m": args.m}, "problem": _problem_echo(prob, args.problem)})
    return out


def cmd_table(args):
    prob = load_problem(args.problem)
    primes = _primes(args)
    rows = sweep(prob, args.m_range, args.n_range, args.i, args.method, primes, threads=args.threads)
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "n", "i", "h", "method", "prime"])
        for r in rows:
            w.writerow([r.m, r.n, r.i, "n/a" if r.h is None else r.h, r.method, r.prime])
        return buf.getvalue()
    return {"problem": _problem_echo(prob, args.problem), "primes": list(primes), "rows": [r.to_dict() for r in rows]}


def cmd_witness(args) -> dict:
    prob = load_problem(args.problem)
    rep = witness(prob, args.m, args.n, args.position, args.method, _primes(args))
    out = rep.to_dict()
    out.update({"query": {"m": args.m, "n": args.n, "position": args.position, "method": args.method}, "problem": _problem_echo(prob, args.problem)})
    return out


def cmd_verify(args) -> dict:
    res = run_suite(args.verify_level, _primes(args)[0])
    out = res.to_dict()
    out["level"] = args.verify_level
    if res.failed:
        raise _SuiteFailed(out)
    return out


class _SuiteFailed(Exception):
    def __init__(self, report: dict):
        super().__init__(f"{report['failed']} check(s) failed")
        self.report = report


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, help="single prime to work over")
    common.add_argument("--primes", help="comma-separated primes (default %s)" % ",".join(map(str, DEFAULT_PRIMES)))
    common.add_argument("--exact", action="store_true", help="also compute ranks over Q (small blocks only)")
    common.add_argument("--threads", type=int, default=1, help="worker processes for table sweeps")
    common.add_argument("--verify-level", type=int, choices=(0, 1, 2), default=0, help="0: none, 1: D^2 = 0 and engine cross-check, 2: also well-definedness")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="symcoh", description="Cohomology of symmetric powers of cotangent bundles of complete intersections.")
    parser.add_argument("--version", action="version", version=f"symcoh {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bott", parents=[common], help="h^i(P^N, S^m Omega(m+n)) from Bott's formulas")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--flag12", action="store_true", help="also run the explicit flag-variety search")
    p.set_defaults(func=cmd_bott)

    def with_problem(p):
        p.add_argument("--problem", required=True, help="problem file (JSON with N, polys, description) or a bundled name")

    def with_method(p):
        p.add_argument("--method", choices=("complex1", "complex2", "both"), default="complex1")

    p = sub.add_parser("hi", parents=[common], help="h^i(X, S^m Omega_X(m-n)) for n >= 2")
    with_problem(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i", type=int, help="report one degree (default: all)")
    with_method(p)
    p.set_defaults(func=cmd_hi)

    p = sub.add_parser("h0-surface", parents=[common], help="h^0(X, S^m Omega_X(m+t)) on a surface, via duality")
    with_problem(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    with_method(p)
    p.set_defaults(func=cmd_h0_surface)

    p = sub.add_parser("phi0", parents=[common], help="dim ker phi_m for the quadric equations")
    with_problem(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--basis", action="store_true", help="print a kernel basis")
    p.set_defaults(func=cmd_phi0)

    p = sub.add_parser("psi", parents=[common], help="dim ker psi~ for the equations of minimal degree")
    with_problem(p)
    p.add_argument("--basis", action="store_true", help="print a kernel basis")
    p.set_defaults(func=cmd_psi)

    p = sub.add_parser("ample-check", parents=[common], help="sufficient vanishing criterion for ampleness of Omega_X (N=4, c=2)")
    with_problem(p)
    p.add_argument("--m", type=int, required=True)
    with_method(p)
    p.set_defaults(func=cmd_ample_check)

    p = sub.add_parser("table", parents=[common], help="h^i over a grid of (m, n)")
    with_problem(p)
    p.add_argument("--m-range", type=_int_range, required=True, help="a:b or a,b,c")
    p.add_argument("--n-range", type=_int_range, required=True, help="a:b or a,b,c")
    p.add_argument("--i", type=_int_range, help="degrees to report (default: all)")
    p.add_argument("--csv", action="store_true", help="CSV with header m,n,i,h,method,prime")
    with_method(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("witness", parents=[common], help="explicit kernel polynomial with rational coefficients")
    with_problem(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--position", type=int, default=0, help="complex position (default 0)")
    with_method(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suite and report pass/fail counts")
    p.set_defaults(func=cmd_verify)
    return parser


def _emit(out, stream) -> None:
    if isinstance(out, str):
        stream.write(out)
    else:
        stream.write(json.dumps(out, indent=2, sort_keys=True) + "\n")


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=stderr, format="%(levelname)s %(message)s")
    t0 = time.perf_counter()
    try:
        out = args.func(args)
    except _SuiteFailed as exc:
        _emit(_stamp(exc.report, args, t0), stdout)
        return EXIT_INTERNAL
    except (ConsistencyError, PrimeDisagreement) as exc:
        stderr.write(f"symcoh: internal check failed: {exc}\n")
        return EXIT_INTERNAL
    except (ValidityError, PolyError, FieldError, ProblemFileError, ValueError) as exc:
        stderr.write(f"symcoh: {exc}\n")
        return EXIT_INVALID
    if isinstance(out, dict):
        out = _stamp(out, args, t0)
    _emit(out, stdout)
    return EXIT_OK


def _stamp(out: dict, args, t0: float) -> dict:
    out["command"] = args.command
    out["version"] = __version__
    out["elapsed_ms"] = round((time.perf_counter() - t0) * 1000.0, 3)
    return out


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

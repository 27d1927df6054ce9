"""Command-line harness: ``list``, ``verify``, ``sweep`` and ``diophantine``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .families import (
    REGISTRY,
    BranchError,
    ParameterError,
    PoleError,
    describe,
    family_names,
    parse_number,
    reference_markdown,
    resolve_family,
)
from .hyper import SeriesDomainError
from .perturb import matrix_csv
from .runner import SCHEMA_VERSION, Tolerances, dumps, encode_params, sweep, verify
from .spectra import DEFAULT_TOL_DIOPHANTINE, NumericalError, diophantine_experiment
from .zeros import DegeneracyError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
# failures of the computation itself, reported as failed checks rather than usage errors
_NUMERICAL = (DegeneracyError, BranchError, PoleError, NumericalError, SeriesDomainError)


class UsageError(Exception):
    pass


def parse_params(text: str | None) -> dict:
    """``k=v,k=v`` with complex values written ``re+imi``."""
    out: dict = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"--params: expected key=value, got {item!r}")
        key = key.strip()
        if key in out:
            raise UsageError(f"--params: {key} given twice")
        try:
            out[key] = parse_number(value.strip())
        except ValueError as exc:
            raise UsageError(f"--params: {key}: {exc}") from None
    return out


def parse_degrees(text: str) -> list[int]:
    """``5``, ``2..8`` or ``2,4,6``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            degrees = list(range(int(lo), int(hi) + 1))
        else:
            degrees = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--N: cannot parse {text!r}") from None
    if not degrees or min(degrees) < 1:
        raise UsageError(f"--N: degrees must be positive, got {text!r}")
    return degrees


def _raw_params(args) -> dict:
    raw = parse_params(args.params)
    if args.q is not None:
        if "q" in raw:
            raise UsageError("q given both in --params and --q")
        raw["q"] = args.q
    return raw


def _single_degree(args) -> int:
    degrees = parse_degrees(args.N)
    if len(degrees) != 1:
        raise UsageError("--N takes a single degree here")
    return degrees[0]


def _write(path: str | None, text: str):
    if path is None:
        return
    if path == "-":
        sys.stdout.write(text)
        return
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text, encoding="utf-8")


def _fmt(v) -> str:
    return "-" if v is None else f"{v:.3g}"


# ---------------------------------------------------------------------------
# commands


def cmd_list(args) -> int:
    if args.markdown:
        sys.stdout.write(reference_markdown())
        return EXIT_OK
    if args.family:
        if args.family not in REGISTRY:
            raise UsageError(f"unknown family {args.family!r}")
        d = describe(args.family)
        params = ", ".join(d["parameters"]) or "none"
        if d["derived"]:
            params += f" with {d['derived']}"
        print(f"{d['family']}")
        print(f"  parameters: {params}; eta={d['eta']}; E(n)={d['energy']}")
        for alias, target in d["aliases"].items():
            print(f"  alias: {alias} -> {target}")
        print(f"  ranges: {'; '.join(d['ranges']) or 'none'}")
        print(f"  operator kind: {d['operator_kind']} ({d['group']})")
        print(f"  operator: {d['operator']}")
        print(f"  polynomial: {d['polynomial']}")
        print(f"  weight: {d['weight']}")
        return EXIT_OK
    names = family_names()
    print(f"{len(names)} families")
    for name in names:
        d = describe(name)
        params = ",".join(d["parameters"]) or "-"
        print(f"  {name:26s} {d['operator_kind']:16s} params={params:14s} eta={d['eta']}")
    return EXIT_OK


def _console(*paths):
    """Where status lines go: stderr when a report is being written to stdout."""
    return sys.stderr if "-" in paths else sys.stdout


def _tolerances(args) -> Tolerances:
    return Tolerances(eig=args.tol_eig, vec=args.tol_vec, recon=args.tol_recon)


def cmd_verify(args) -> int:
    if not args.family:
        raise UsageError("verify needs --family")
    raw = _raw_params(args)
    N = _single_degree(args)
    spec = resolve_family(args.family, dict(raw))
    if N > spec.max_degree:
        raise UsageError(f"{spec.name}: N = {N} exceeds max_degree {spec.max_degree}")
    try:
        report, M = verify(spec, N, raw, _tolerances(args), timing=args.timing, want_matrix=True)
    except _NUMERICAL as exc:
        print(f"FAIL {spec.name} N={N}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _write(args.out, dumps(report))
    if args.dump_matrix:
        _write(args.dump_matrix, matrix_csv(M))
    out = _console(args.out, args.dump_matrix)
    status = "PASS" if report["passed"] else "FAIL"
    eig = ", ".join(f"{v:.10g}" for v in report["spectrum"]["theoretical"])
    print(f"{status} {spec.name} N={N} eigenvalues {{{eig}}}", file=out)
    for name, c in report["checks"].items():
        mark = "ok  " if c["passed"] else "FAIL"
        print(f"  {mark} {name:28s} {_fmt(c['value'])} (tol {c['tolerance']:.0e})", file=out)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_sweep(args) -> int:
    if args.all:
        families = family_names()
    elif args.family:
        families = [f.strip() for f in args.family.split(",") if f.strip()]
    else:
        raise UsageError("sweep needs --family or --all")
    unknown = [f for f in families if f not in REGISTRY]
    if unknown:
        raise UsageError(f"unknown family {', '.join(unknown)}")
    degrees = parse_degrees(args.N)
    runs, summary = sweep(families, degrees, args.draws, args.seed, _tolerances(args),
                          jobs=args.jobs, timing=args.timing)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for r in runs:
            (out / f"{r['family']}_N{r['N']}_draw{r['draw']}.json").write_text(dumps(r), encoding="utf-8")
        (out / "summary.json").write_text(dumps(summary), encoding="utf-8")
    print(f"{summary['passed_runs']}/{summary['runs']} runs passed")
    for name, v in summary["max_residuals"].items():
        print(f"  max {name:28s} {_fmt(v)}")
    for f in summary["failures"]:
        why = f["error"] or ", ".join(f["failed"])
        print(f"  FAIL {f['family']} N={f['N']} draw={f['draw']}: {why}")
    return EXIT_OK if summary["passed"] else EXIT_FAIL


def cmd_diophantine(args) -> int:
    if not args.family:
        raise UsageError("diophantine needs --family")
    raw = _raw_params(args)
    spec = resolve_family(args.family, dict(raw))
    if not spec.is_classical:
        raise UsageError(f"{spec.name}: diophantine runs cover hermite, laguerre and jacobi only")
    N = _single_degree(args)
    if N > 10:
        raise UsageError("diophantine runs need N <= 10")
    rep = diophantine_experiment(spec, N, args.trials, args.seed, args.tol)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "family": spec.name,
        "params": encode_params(raw),
        "N": N,
        "trials": rep.trials,
        "seed": rep.seed,
        "spectrum": [float(v) for v in rep.spectrum],
        "max_deviation": rep.max_residual,
        "refined_trials": rep.refined,
        "tolerance": rep.tolerance,
        "passed": rep.passed,
    }
    _write(args.out, dumps(report))
    spectrum = ", ".join(f"{v:.10g}" for v in rep.spectrum)
    state = "invariant" if rep.passed else "NOT invariant"
    print(f"{'PASS' if rep.passed else 'FAIL'} {spec.name} N={N} spectrum {{{spectrum}}} {state} "
          f"over {rep.trials} trials (max deviation {rep.max_residual:.3g})", file=_console(args.out))
    return EXIT_OK if rep.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="askey-zeros", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="list families and their parameters")
    p.add_argument("--family", help="show one family in detail")
    p.add_argument("--markdown", action="store_true", help="print the full reference as markdown")
    p.set_defaults(func=cmd_list)

    def common(p, default_N):
        p.add_argument("--family", help="family name, see `list`")
        p.add_argument("--params", help="k=v,... (complex as re+imi)")
        p.add_argument("--q", type=float, help="base q for q-families")
        p.add_argument("--N", default=default_N, help="degree (default %(default)s)")
        p.add_argument("--out", help="write the JSON report here ('-' for stdout)")

    def tolerances(p):
        p.add_argument("--tol-eig", type=float, default=Tolerances.eig,
                       help="relative eigenvalue tolerance (default %(default)s)")
        p.add_argument("--tol-vec", type=float, default=Tolerances.vec,
                       help="eigenvector collinearity tolerance (default %(default)s)")
        p.add_argument("--tol-recon", type=float, default=Tolerances.recon,
                       help="polynomial reconstruction tolerance (default %(default)s)")
        p.add_argument("--timing", action="store_true", help="record wall time (breaks byte-identical output)")

    p = sub.add_parser("verify", help="check one family at one degree")
    common(p, "4")
    tolerances(p)
    p.add_argument("--dump-matrix", metavar="PATH", help="write M as CSV (row, col, re, im)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="random parameter draws over families and degrees")
    p.add_argument("--family", help="comma-separated family names")
    p.add_argument("--all", action="store_true", help="every registered family")
    p.add_argument("--N", default="2..8", help="degrees: 5, 2..8 or 2,4,6 (default %(default)s)")
    p.add_argument("--draws", type=int, default=5, help="parameter draws per family and degree")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes; output does not depend on it")
    p.add_argument("--out", help="directory for per-run reports and summary.json")
    tolerances(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("diophantine", help="spectra of M at random complex points")
    common(p, "4")
    p.add_argument("--trials", type=int, default=100, help="random point sets")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL_DIOPHANTINE,
                   help="max relative eigenvalue deviation (default %(default)s)")
    p.set_defaults(func=cmd_diophantine)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

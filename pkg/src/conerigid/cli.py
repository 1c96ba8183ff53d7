"""Command line: ``conerigid <subcommand>``.

Exit status: 0 when the verdict is the expected one, 1 when an escape or a
non-excluded input turns up (or a certificate fails to verify), 2 on input
errors, including inputs that violate an exclusion precondition.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import certio
from .enumeration import Bounds, WorkLimitExceeded, enumerate_verify
from .lattice import CycleClass, DivisorClass, div_cycle_pair, div_triple, fmt_rat, rat
from .nfi import EXCLUDED, INPUT_INFEASIBLE, NOT_EXCLUDED, REDUCED
from .rr import chi_line_bundle
from .untwist import UntwistError

EXIT_OK, EXIT_ESCAPE, EXIT_INPUT = 0, 1, 2


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_job(path: str, kind: str) -> certio.JobFile:
    job = certio.parse_job(_read(path))
    if job.kind != kind:
        raise certio.SchemaError(f"expected a '{kind}' job, got '{job.kind}'")
    return job


def cmd_untwist(args) -> int:
    job = _load_job(args.job, "untwist")
    cert = certio.run_job(job)
    sys.stdout.write(certio.emit_certificate(cert, job))
    return EXIT_OK


def cmd_exclude(args) -> int:
    job = _load_job(args.job, "exclude")
    cert = certio.run_job(job)
    sys.stdout.write(certio.emit_certificate(cert, job))
    if cert.verdict in (EXCLUDED, REDUCED):
        return EXIT_OK
    if cert.verdict == INPUT_INFEASIBLE:
        print(f"input-infeasible: {'; '.join(cert.failed)}", file=sys.stderr)
        return EXIT_INPUT
    assert cert.verdict == NOT_EXCLUDED
    print("not excluded: every hypothesis of the chain holds", file=sys.stderr)
    return EXIT_ESCAPE


def cmd_enumerate(args) -> int:
    bounds = Bounds(args.N, args.N if args.L is None else args.L, args.n, args.denom, args.m, args.p_max)
    report = enumerate_verify(bounds, jobs=args.jobs, use_numba=False if args.numpy else None)
    if args.json:
        sys.stdout.write(certio.dumps(report.to_dict()))
    else:
        print(report.summary())
        print(f"candidates: {report.candidates}")
        for label, count in sorted(report.by_code.items()):
            print(f"  {label}: {count}")
        print(f"cross-checked exactly: {report.cross_checked}")
        for esc in report.escapes:
            print(f"escape: {esc}")
    print(f"backend {report.backend}, {report.seconds:.2f} s", file=sys.stderr)
    return EXIT_OK if not report.escapes else EXIT_ESCAPE


def cmd_chi(args) -> int:
    print(fmt_rat(chi_line_bundle(DivisorClass(args.model, args.n, args.m))))
    return EXIT_OK


def cmd_lattice(args) -> int:
    divs = [DivisorClass(args.model, int(n), int(m)) for n, m in args.div]
    if args.op == "triple":
        if len(divs) != 3:
            raise certio.SchemaError("triple takes three --div n m")
        print(fmt_rat(div_triple(*divs)))
    else:
        if len(divs) != 1 or args.cycle is None:
            raise certio.SchemaError("pair takes one --div n m and --cycle sigma phi")
        print(fmt_rat(div_cycle_pair(divs[0], CycleClass(rat(args.cycle[0]), rat(args.cycle[1]), args.model))))
    return EXIT_OK


def cmd_verify(args) -> int:
    res = certio.verify(_read(args.cert))
    if res.ok:
        print("verified")
        return EXIT_OK
    for p in res.problems:
        print(p, file=sys.stderr)
    return EXIT_ESCAPE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conerigid", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("untwist", help="untwist maximal curves of a marked system")
    p.add_argument("job")
    p.set_defaults(func=cmd_untwist)

    p = sub.add_parser("exclude", help="run the exclusion chain for one maximal singularity")
    p.add_argument("job")
    p.set_defaults(func=cmd_exclude)

    p = sub.add_parser("enumerate", help="bounded search for singularities escaping every chain")
    p.add_argument("--N", type=int, required=True, help="maximal number of blow-ups")
    p.add_argument("--L", type=int, default=None, help="maximal number of point centres (default N)")
    p.add_argument("--n", type=int, required=True, help="maximal threshold n")
    p.add_argument("--denom", type=int, required=True, help="maximal denominator of rationals")
    p.add_argument("--m", type=int, default=None, help="maximal fibre coefficient (default n)")
    p.add_argument("--p-max", type=int, default=1, dest="p_max")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.add_argument("--numpy", action="store_true", help="use the numpy kernel instead of numba")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("chi", help="Euler characteristic of -nK + mF")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--model", choices=("V", "U"), default="V")
    p.set_defaults(func=cmd_chi)

    p = sub.add_parser("lattice", help="intersection numbers on a smooth model")
    p.add_argument("op", choices=("pair", "triple"))
    p.add_argument("--model", choices=("V", "U"), default="V")
    p.add_argument("--div", nargs=2, action="append", default=[], metavar=("N", "M"),
                   help="divisor -N*K + M*F (repeat for triple)")
    p.add_argument("--cycle", nargs=2, metavar=("SIGMA", "PHI"), help="1-cycle SIGMA*s + PHI*f")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("verify", help="re-verify an emitted certificate")
    p.add_argument("cert")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (certio.SchemaError, UntwistError, WorkLimitExceeded, ValueError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

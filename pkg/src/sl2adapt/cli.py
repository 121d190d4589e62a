"""Command-line front end.

    sl2adapt figure 3 --m 1 --format svg --out fig3.svg
    sl2adapt verify all --seed 42
    sl2adapt scan-injectivity --m 1 --res 500
    sl2adapt boundary --m -0.5 --u-range -2,2,41

Exit codes: 0 success, 1 failed check, 2 usage or I/O error. Relative output
paths are resolved against $SL2ADAPT_OUTPUT_DIR when it is set.
"""

import argparse
import json
import os
import re
import sys
from pathlib import Path

import numpy as np

from .figures import FORMATS, FigureSpec, render_figure, serialize, sigma_boundary, star_boundary
from .reduced import injectivity_scan
from .verify import DEFAULT_SCAN_RES, SUITES, run_verify

OUTPUT_ENV = "SL2ADAPT_OUTPUT_DIR"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _floats(text, count=None):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if count is not None and len(vals) != count:
        raise argparse.ArgumentTypeError(f"expected {count} numbers, got {len(vals)}")
    return vals


def _window(text):
    return tuple(_floats(text, 4))


def _output_path(out):
    path = Path(out)
    base = os.environ.get(OUTPUT_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = _output_path(out)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as err:
        raise UsageError(f"cannot write {path}: {err}")


def _json(obj):
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def cmd_figure(args):
    try:
        spec = FigureSpec(args.figure, tuple(args.m or ()), args.window, args.res, args.format)
    except ValueError as err:
        raise UsageError(str(err))
    _emit(serialize(render_figure(spec)), args.out)
    return EXIT_OK


def cmd_verify(args):
    try:
        report = run_verify(args.suite, seed=args.seed, tol=args.tol, m=args.m, res=args.res)
    except KeyError:
        raise UsageError(f"unknown suite {args.suite!r}")
    _emit(_json(report), args.out)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_scan(args):
    report = injectivity_scan(args.m, args.res)
    _emit(_json(report.to_dict()), args.out)
    return EXIT_OK


def cmd_boundary(args):
    u0, u1, n = args.u_range
    us = np.linspace(u0, u1, int(n))
    a_sig, r_sig = sigma_boundary(args.m, us)
    a_star, _ = star_boundary(args.m, us)
    rows = ["u,a,a_star,gap,residual"]
    for u, a, s, r in zip(us, a_sig, a_star, r_sig):
        rows.append(",".join(repr(float(v)) for v in (u, a, s, s - a, r)))
    _emit("\n".join(rows) + "\n", args.out)
    return EXIT_OK


_VALUE_FLAGS = ("--m", "--window", "--u-range", "--tol")
_NUMBER = re.compile(r"^-[0-9.]")


def _glue_negative_values(argv):
    """Turn ``--m -1.5,1`` into ``--m=-1.5,1``; argparse reads the former as a flag."""
    out, i = [], 0
    while i < len(argv):
        arg = argv[i]
        if arg in _VALUE_FLAGS and i + 1 < len(argv) and _NUMBER.match(argv[i + 1]):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
            continue
        out.append(arg)
        i += 1
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="sl2adapt", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("figure", help="write the dataset behind picture 1, 2 or 3")
    f.add_argument("figure", type=int, choices=(1, 2, 3))
    f.add_argument("--m", type=_floats, help="comma-separated metric parameters")
    f.add_argument("--window", type=_window, help="u0,u1,a0,a1 (s and t ranges for figure 2)")
    f.add_argument("--res", type=int, default=400, help="samples per axis (default 400)")
    f.add_argument("--format", choices=FORMATS, default="csv")
    f.add_argument("--out", help="output file (default stdout)")
    f.set_defaults(func=cmd_figure)

    v = sub.add_parser("verify", help="run invariant suites and print a JSON report")
    v.add_argument("suite", help="one of: " + ", ".join(SUITES + ("all",)))
    v.add_argument("--m", type=float, help="restrict the reduced suite to one m")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, help="override every check tolerance")
    v.add_argument("--res", type=int, default=DEFAULT_SCAN_RES, help="injectivity scan resolution")
    v.add_argument("--out", help="output file (default stdout)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scan-injectivity", help="grid search for collisions of the reduced map")
    s.add_argument("--m", type=float, required=True)
    s.add_argument("--res", type=int, default=500)
    s.add_argument("--out", help="output file (default stdout)")
    s.set_defaults(func=cmd_scan)

    b = sub.add_parser("boundary", help="tabulate the Sigma_m boundary over a u range")
    b.add_argument("--m", type=float, required=True)
    b.add_argument("--u-range", type=lambda t: _floats(t, 3), default=[-3.0, 3.0, 61],
                   help="u0,u1,n (default -3,3,61)")
    b.add_argument("--out", help="output file (default stdout)")
    b.set_defaults(func=cmd_boundary)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_negative_values(list(sys.argv[1:] if argv is None else argv)))
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as err:
        print(f"sl2adapt: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 indeterminate verdicts under
``--strict``. Data go to stdout or ``--out``; diagnostics go to stderr.
"""

import argparse
import datetime
import json
import re
import sys

import numpy as np

from . import __version__
from . import asymptotics as asy
from .classifier import INDETERMINATE, loewner_profile
from .errors import PickError
from .gallery import CounterexampleSpec, amy_counterexample
from .laurent import TOL_POLY
from .moments import moment_table_csv, telescope_relative, telescope_sides
from .numkernel import BACKEND
from .representation import Direction, evaluate, load_rep, rep_to_dict, save_rep

_FLOAT = r"[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?"
_COMPLEX = re.compile(rf"^([+-]?{_FLOAT})([+-])({_FLOAT})i$")


class UsageError(Exception):
    pass


def parse_complex(text):
    """Parse ``a+bi`` / ``a-bi`` (sign mandatory, no spaces)."""
    m = _COMPLEX.match(text.strip())
    if not m:
        raise UsageError(f"complex literal must look like 'a+bi' or 'a-bi', got {text!r}")
    re_part = float(m.group(1))
    im_part = float(m.group(3))
    return complex(re_part, im_part if m.group(2) == "+" else -im_part)


def parse_pair(text, conv):
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected two comma-separated values, got {text!r}")
    return conv(parts[0]), conv(parts[1])


def format_complex(z):
    sign = "-" if z.imag < 0 or (z.imag == 0 and np.signbit(z.imag)) else "+"
    return f"{z.real:.17g} {sign} {abs(z.imag):.17g}i"


def _meta(args):
    if args.no_meta:
        return None
    return {"version": __version__, "backend": BACKEND,
            "created": datetime.datetime.now(datetime.timezone.utc).isoformat()}


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj):
    return json.dumps(obj, indent=1, default=_default) + "\n"


def _default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not serializable: {type(o)}")


def cmd_eval(args):
    rep = load_rep(_need(args.rep, "--rep"))
    z = parse_pair(_need(args.z, "--z"), parse_complex)
    if z[0].imag <= 0 or z[1].imag <= 0:
        raise UsageError("z must lie in the bi-upper half-plane (Im z1 > 0, Im z2 > 0)")
    _emit(format_complex(evaluate(rep, z)) + "\n", args.out)
    return 0


def _direction(args):
    try:
        return Direction.of(parse_pair(args.b, float))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_moments(args):
    rep = load_rep(_need(args.rep, "--rep"))
    b = _direction(args)
    if args.max_order < 1:
        raise UsageError("--max-order must be >= 1")
    _emit(moment_table_csv(rep, [b], args.max_order), args.out)
    return 0


def cmd_residues(args):
    rep = load_rep(_need(args.rep, "--rep"))
    if args.max_order < 1:
        raise UsageError("--max-order must be >= 1")
    from .laurent import pole_ratios
    from .representation import as_function

    overrides = {"LADDER_RATIO": args.ratio, "LADDER_MAX_LEVELS": args.levels, "LADDER_C0": args.s0}
    saved = {k: getattr(asy, k) for k in overrides}
    try:
        for k, v in overrides.items():
            if v is not None:
                setattr(asy, k, v)
        lad = asy.residue_ladder(as_function(rep), args.max_order, scale=max(rep.spectral_scale(), 1e-3),
                                 poles=pole_ratios(rep.y_spectrum()), tol_poly=args.tol_poly)
    finally:
        for k, v in saved.items():
            setattr(asy, k, v)
    obj = lad.to_json_obj()
    meta = _meta(args)
    if meta:
        obj["meta"] = meta
    _emit(_dump(obj), args.out or args.report)
    status = 0
    if args.strict and lad.reason in (asy.NOT_CONVERGED, asy.INDETERMINATE_LAYER):
        print(f"ladder stopped at order {lad.depth + 1}: {lad.reason}", file=sys.stderr)
        status = 2
    return status


def cmd_classify(args):
    rep = load_rep(_need(args.rep, "--rep"))
    if args.max_N < 1:
        raise UsageError("--max-N must be >= 1")
    report = loewner_profile(rep, args.max_N, tol_poly=args.tol_poly)
    obj = report.to_json_obj()
    meta = _meta(args)
    if meta:
        obj["meta"] = meta
    _emit(_dump(obj), args.report or args.out)
    if report.discrepancies:
        print(f"{len(report.discrepancies)} discrepancies between routes", file=sys.stderr)
    if args.strict:
        keys = ("operator_LN", "function_LN", "operator_LNminus", "boundedness_LNminus")
        if any(row[k] == INDETERMINATE for row in report.rows for k in keys):
            print("indeterminate verdicts present", file=sys.stderr)
            return 2
    return 0


def cmd_telescope(args):
    rep = load_rep(_need(args.rep, "--rep"))
    b = _direction(args)
    grid = asy.RayGrid(b, args.s0 or 10.0, args.ratio or 2.0, args.levels or 20)
    lines = ["N,s,residual,relative"]
    for N in range(1, args.max_N + 1):
        for s in grid.s_values:
            lhs, rhs, _ = telescope_sides(rep, b, s, N)
            lines.append(f"{N},{s:.17g},{abs(lhs - rhs):.17g},{telescope_relative(rep, b, s, N):.17g}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_counterexample(args):
    if args.n is None or args.t is None:
        raise UsageError("--n and --t are required")
    try:
        spec = CounterexampleSpec(args.n, args.t)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = amy_counterexample(spec)
    if args.out:
        save_rep(rep, args.out)
    else:
        sys.stdout.write(json.dumps(rep_to_dict(rep), indent=1) + "\n")
    return 0


def cmd_report(args):
    if not args.inputs:
        raise UsageError("report needs at least one input file")
    merged = {"inputs": []}
    for path in args.inputs:
        with open(path) as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"{path}: not valid JSON ({exc})") from None
        if isinstance(obj, dict):
            obj.pop("meta", None)
        merged["inputs"].append({"path": path, "content": obj})
    meta = _meta(args)
    if meta:
        merged["meta"] = meta
    _emit(_dump(merged), args.out or args.report)
    return 0


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def build_parser():
    p = argparse.ArgumentParser(prog="pickmoments", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--rep", help="representation JSON file")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--report", help="report JSON file")
        sp.add_argument("--no-meta", action="store_true", help="omit version and timestamp")
        sp.add_argument("--strict", action="store_true", help="exit 2 on indeterminate verdicts")
        sp.add_argument("--tol-poly", type=float, default=TOL_POLY)
        return sp

    sp = common(sub.add_parser("eval", help="evaluate h at a point"))
    sp.add_argument("--z", help="point as 'a+bi,c+di'")
    sp.set_defaults(func=cmd_eval)

    sp = common(sub.add_parser("moments", help="scalar moment table (CSV)"))
    sp.add_argument("--b", default="1,1")
    sp.add_argument("--max-order", type=int, default=5)
    sp.set_defaults(func=cmd_moments)

    sp = common(sub.add_parser("residues", help="residue ladder (JSON)"))
    sp.add_argument("--max-order", type=int, default=5)
    sp.add_argument("--s0", type=float, help="ray start in units of scale / min(b)")
    sp.add_argument("--ratio", type=float)
    sp.add_argument("--levels", type=int, help="maximum number of grid levels")
    sp.set_defaults(func=cmd_residues)

    sp = common(sub.add_parser("classify", help="Löwner-class profile (JSON)"))
    sp.add_argument("--max-N", type=int, default=3)
    sp.set_defaults(func=cmd_classify)

    sp = common(sub.add_parser("telescope", help="telescoping residuals along a ray (CSV)"))
    sp.add_argument("--b", default="1,1")
    sp.add_argument("--s0", type=float)
    sp.add_argument("--ratio", type=float)
    sp.add_argument("--levels", type=int)
    sp.add_argument("--max-N", type=int, default=3)
    sp.set_defaults(func=cmd_telescope)

    sp = common(sub.add_parser("counterexample", help="emit the cyclic-walk representation"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--t", type=float)
    sp.set_defaults(func=cmd_counterexample)

    sp = common(sub.add_parser("report", help="merge JSON outputs"))
    sp.add_argument("inputs", nargs="*")
    sp.set_defaults(func=cmd_report)
    return p


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (UsageError, PickError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

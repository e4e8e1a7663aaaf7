"""Command-line interface.

Exit codes: 0 success, 1 a verification check failed, 2 usage or input error.

Signature syntax for ``coeff --sig``::

    i:(i1^n1,i2^n2,...|j1^m1,j2^m2,...)

e.g. ``2:(1^2|2^1)`` is N^2 of weight 2 with t_1^2 on the holomorphic side and
tbar_2 on the antiholomorphic side.  A missing ``^n`` means multiplicity 1.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import verification
from .coefficients import MomentSignature, default_cache, n2, signatures
from .conformal import Contour, boundary_image, exterior_map, moments_from_contour
from .series import CapacityError, MomentVector, build_f

USAGE_ERROR = 2
CHECK_FAILED = 1


class UsageError(Exception):
    pass


def _frac(q) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _dumps(obj, indent: int = 1, level: int = 0) -> str:
    """JSON with floats at 17 significant digits so output is byte-stable."""
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return json.dumps(str(obj))
        return format(obj, ".17g")
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(f"{pad}{json.dumps(str(k))}: {_dumps(v, indent, level + 1)}" for k, v in obj.items())
        return "{\n" + body + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(_dumps(x) for x in obj) + "]"
        body = ",\n".join(pad + _dumps(v, indent, level + 1) for v in obj)
        return "[\n" + body + "\n" + end + "]"
    return json.dumps(str(obj))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {path}: {exc}") from exc


def _positive(name: str, value) -> None:
    if value is not None and value <= 0:
        raise UsageError(f"--{name} must be positive, got {value}")


def _cache_file() -> Path | None:
    d = os.environ.get("TODA_CACHE_DIR")
    return Path(d) / "n1.json" if d else None


def cmd_coeff(args) -> int:
    if args.table:
        if args.max_weight is None:
            raise UsageError("--table needs --max-weight")
        _positive("max-weight", args.max_weight)
        rows = [{"sig": str(sig), "value": _frac(n2(sig))} for sig in signatures(args.max_weight)]
        _emit(_dumps(rows), args.out)
        return 0
    if not args.sig:
        raise UsageError("coeff needs --sig or --table")
    try:
        sig = MomentSignature.parse(args.sig)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(_frac(n2(sig)), args.out)
    return 0


def cmd_series(args) -> int:
    _positive("n", args.n)
    if args.K < 2:
        raise UsageError(f"--K must be >= 2, got {args.K}")
    f = build_f(args.n, args.K)
    _emit(_dumps(f.to_json()), args.out)
    return 0


def cmd_moments(args) -> int:
    _positive("n", args.n)
    obj = _read_json(args.contour)
    try:
        c = Contour.from_json(obj)
        t = moments_from_contour(c, args.n, args.quad_points)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad contour input: {exc}") from exc
    _emit(_dumps(t.to_json()), args.out)
    return 0


def cmd_map(args) -> int:
    for name in ("n", "K", "J"):
        _positive(name, getattr(args, name))
    try:
        t = MomentVector.from_json(_read_json(args.moments))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad moments input: {exc}") from exc
    if t.n > args.n:
        raise UsageError(f"moments carry index {t.n} > --n {args.n}")
    if t.t0 <= 0:
        raise UsageError("t0 must be positive")
    if args.J > args.n:
        f = build_f(args.n, args.K, halo_index=args.J, halo_degree=1)
    else:
        f = build_f(args.n, args.K)
    w = exterior_map(f, t, args.J)
    _emit(_dumps(w.to_json()), args.out)
    if args.emit_boundary:
        if not args.contour:
            raise UsageError("--emit-boundary needs --contour")
        c = Contour.from_json(_read_json(args.contour))
        img = boundary_image(w, c, args.samples)
        lines = ["re,im,modulus"] + [
            f"{format(v.real, '.17g')},{format(v.imag, '.17g')},{format(abs(v), '.17g')}" for v in img
        ]
        Path(args.emit_boundary).write_text("\n".join(lines) + "\n")
    return 0


def cmd_verify(args) -> int:
    params = {"quick": args.quick}
    if args.max_i is not None:
        params["max_i"] = args.max_i
    if args.max_weight is not None:
        params["max_weight"] = args.max_weight
    if args.K is not None:
        params["K"] = args.K
    names = list(verification.SUITES) if args.suite == "all" else [args.suite]
    workers = max(1, args.threads or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        reports = [r for batch in pool.map(lambda s: verification.run_suite(s, params), names) for r in batch]
    _emit(verification.reports_json(reports), args.out)
    for r in reports:
        print(r, file=sys.stderr)
    return 0 if all(r.passed or r.conjecture for r in reports) else CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="todamap",
        description="Taylor coefficients of the dispersionless Toda string solution and exterior conformal maps.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    p.add_argument("--threads", type=int, default=1, help="worker cap for verification suites")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeff", help="exact N^2 for one signature, or a table")
    c.add_argument("--sig", help='signature, e.g. "2:(1^2|2^1)"')
    c.add_argument("--table", action="store_true", help="dump every signature up to --max-weight")
    c.add_argument("--max-weight", type=int)
    c.add_argument("--out")
    c.set_defaults(func=cmd_coeff)

    s = sub.add_parser("series", help="truncated series of F as JSON")
    s.add_argument("--n", type=int, required=True, help="index bound")
    s.add_argument("--K", type=int, required=True, help="degree bound")
    s.add_argument("--out")
    s.set_defaults(func=cmd_series)

    m = sub.add_parser("moments", help="harmonic moments of a contour file")
    m.add_argument("contour", help='JSON {"kind": "samples"|"trig", ...}')
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--quad-points", type=int, default=256)
    m.add_argument("--out")
    m.set_defaults(func=cmd_moments)

    mp = sub.add_parser("map", help="Laurent coefficients of the exterior map")
    mp.add_argument("moments", help="MomentVector JSON")
    mp.add_argument("--n", type=int, required=True)
    mp.add_argument("--K", type=int, required=True)
    mp.add_argument("--J", type=int, required=True)
    mp.add_argument("--out")
    mp.add_argument("--emit-boundary", metavar="CSV", help="write boundary images (needs --contour)")
    mp.add_argument("--contour", help="contour JSON used with --emit-boundary")
    mp.add_argument("--samples", type=int, default=256)
    mp.set_defaults(func=cmd_map)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", required=True, choices=[*verification.SUITES, "all"])
    v.add_argument("--max-i", type=int)
    v.add_argument("--max-weight", type=int)
    v.add_argument("--K", type=int)
    v.add_argument("--quick", action="store_true")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cache_path = _cache_file()
    if cache_path is not None:
        default_cache().load_n1(cache_path)
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"todamap: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except CapacityError as exc:
        print(f"todamap: capacity exceeded: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        default_cache().save_n1(cache_path)
    return code


if __name__ == "__main__":
    sys.exit(main())

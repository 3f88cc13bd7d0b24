"""berkdyn command line: classify, periodic, scan, cantor."""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from fractions import Fraction

from .berk import Disc, Infinity, TypeI, abs_exp, format_point
from .dynamics import (RationalMap, cantor_coding, classify_multiplier, local_degree,
                       periodic_points, push_disc_point)
from .errors import BerkError, IrreducibleFactorTooLarge, ParseError, Unsupported
from .families import AnalyticFamily, stability_scan
from .grammar import map_coefficients, parse_expr, parse_point, parse_points_file
from .padic.field import DEFAULT_PRECISION, FieldConfig
from .padic.scalar import PadicScalar

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_UNSUPPORTED = 0, 2, 3, 4


def _field(args) -> FieldConfig:
    ext = None
    if args.ext is not None:
        try:
            ext = Fraction(args.ext)
        except ValueError:
            raise ParseError(f"--ext expects a rational, got {args.ext!r}") from None
    return FieldConfig(args.prime, args.precision, ext)


def _map(text, F) -> RationalMap:
    num, den = map_coefficients(text)
    return RationalMap(num, den, F)


def _kind(pt) -> str:
    if isinstance(pt, Infinity):
        return "I"
    if isinstance(pt, TypeI):
        return "I"
    return "II" if pt.type == 2 else "III"


def _exp(e):
    return "+inf" if e is None else e.to_json()


# ---- commands ----

def cmd_classify(args, F):
    f = _map(args.map, F)
    pt = parse_point(args.point, F)
    image = push_disc_point(f, pt)
    out = {"map": args.map, "point": format_point(pt), "kind": _kind(pt),
           "image": format_point(image), "fixed": image == pt, "period": None}
    cur = pt
    for n in range(1, args.max_period + 1):
        cur = push_disc_point(f, cur)
        if cur == pt:
            out["period"] = n
            break
    n = out["period"]
    if n is not None:
        if isinstance(pt, Disc):
            fn = f.iterate(n)
            deg, cls = local_degree(fn, pt)
            out["local_degree"] = deg
            out["class"] = cls
        else:
            fn = f.iterate(n)
            if isinstance(pt, Infinity):
                lam = fn.G[fn.d - 1] / fn.F[fn.d]
            else:
                lam = fn.derivative_at(pt.coord)
            e = abs_exp(lam)
            out["multiplier_abs"] = _exp(e)
            out["class"] = classify_multiplier(e)
    return out, EXIT_OK


def cmd_periodic(args, F):
    f = _map(args.map, F)
    try:
        recs = periodic_points(f, args.n, max_period=args.max_period)
    except IrreducibleFactorTooLarge as exc:
        # solved points are still listed
        print(f"unsupported: {type(exc).__name__}: {exc}", file=sys.stderr)
        return [r.to_json() for r in exc.records], EXIT_UNSUPPORTED
    return [r.to_json() for r in recs], EXIT_OK


def cmd_scan(args, F):
    fam = AnalyticFamily(parse_expr(args.family))
    with open(args.points, encoding="utf-8") as fh:
        points = parse_points_file(fh.read(), F)
    n_max = args.n_max if args.n_max is not None else args.max_period
    rep = stability_scan(fam, n_max, points, F, jobs=args.jobs)
    rows = rep.to_json()
    code = EXIT_UNSUPPORTED if any(r["flag"] == "UNSUPPORTED" for r in rows) else EXIT_OK
    return rows, code


def _shift_residual(lam0, word):
    x = cantor_coding(lam0, word).coord
    y = cantor_coding(lam0, word[1:]).coord if len(word) > 1 else PadicScalar.zero(lam0.field)
    return x, x * x + lam0 - y


def cmd_cantor(args, F):
    lam = parse_point(args.lam, F)
    if not isinstance(lam, TypeI):
        raise BerkError("lambda must be a type I point")
    lam0 = lam.coord
    bound = args.bound
    rows, worst = [], None
    for letters in itertools.product("01", repeat=args.length):
        word = "".join(letters)
        x, r = _shift_residual(lam0, word)
        v = None if r.is_exact_zero else r.val_lower()
        if v is not None and (worst is None or v < worst):
            worst = v
        rows.append({"word": word, "point": format_point(TypeI(x)),
                     "residual_val": "exact" if v is None else str(v)})
    out = {"lambda": format_point(lam), "length": args.length, "words": len(rows),
           "bound_val": bound, "min_residual_val": "exact" if worst is None else str(worst),
           "pass": worst is None or worst >= bound, "rows": rows}
    if args.length == 1:
        sep = cantor_coding(lam0, "0").coord - cantor_coding(lam0, "1").coord
        out["separation_abs"] = _exp(abs_exp(sep))
    return out, EXIT_OK if out["pass"] else EXIT_DOMAIN


# ---- output ----

def _csv(payload) -> str:
    rows = payload if isinstance(payload, list) else payload.get("rows", [payload])
    flat = []
    for r in rows:
        item = {}
        for k, v in r.items():
            if isinstance(v, dict):
                for k2, v2 in v.items():
                    item[f"{k}.{k2}"] = json.dumps(v2) if isinstance(v2, (dict, list)) else v2
            else:
                item[k] = json.dumps(v) if isinstance(v, list) else v
        flat.append(item)
    cols = []
    for item in flat:
        for k in item:
            if k not in cols:
                cols.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for item in flat:
        w.writerow({k: ("" if item.get(k) is None else item.get(k)) for k in cols})
    return buf.getvalue()


def render(payload, fmt: str) -> str:
    if fmt == "csv":
        return _csv(payload)
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, default=3)
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                        help="p-adic digits carried (default %(default)s)")
    common.add_argument("--ext", default=None, help="adjoin sqrt(D) for this rational D")
    common.add_argument("--max-period", type=int, default=4)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--format", choices=("json", "csv"), default="json")

    ap = argparse.ArgumentParser(prog="berkdyn", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    c = sub.add_parser("classify", parents=[common], help="classify a point under a map")
    c.add_argument("map")
    c.add_argument("point")
    c.set_defaults(func=cmd_classify)
    c = sub.add_parser("periodic", parents=[common], help="type I points of period dividing n")
    c.add_argument("map")
    c.add_argument("n", type=int)
    c.set_defaults(func=cmd_periodic)
    c = sub.add_parser("scan", parents=[common], help="bifurcation scan of a family")
    c.add_argument("family")
    c.add_argument("points", help="file with one point literal per line")
    c.add_argument("n_max", type=int, nargs="?", default=None)
    c.set_defaults(func=cmd_scan)
    c = sub.add_parser("cantor", parents=[common], help="shift-conjugacy check for z^2 + lambda")
    c.add_argument("lam", metavar="lambda")
    c.add_argument("length", type=int)
    c.add_argument("--bound", type=int, default=40, help="required residual valuation")
    c.set_defaults(func=cmd_cantor)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        F = _field(args)
        payload, code = args.func(args, F)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Unsupported as exc:
        print(f"unsupported: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except BerkError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    text = render(payload, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.  Every subcommand prints JSON (stdout or --out).

Exit codes: 0 success, 1 computation failure (JSON reason), 2 usage error.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import certificate
from .algebra.numberfield import DEFAULT_DEGREE_CAP, NumberField
from .algebra.poly import as_poly
from .errors import AutfieldError, MixedVariables, PolySyntaxError, StageFailure

FIELD_HELP = "a polynomial in X (one generator 'a') or a tower 'a:X^2-2;b:X^2-3'"


class UsageError(Exception):
    pass


def parse_field(spec: str | None, cap: int = DEFAULT_DEGREE_CAP) -> NumberField | None:
    if spec is None or spec.strip() in ("", "Q"):
        return None
    steps = []
    for k, part in enumerate(p for p in spec.split(";") if p.strip()):
        if ":" in part:
            label, poly = part.split(":", 1)
        else:
            label, poly = ("a" if k == 0 else f"a{k}"), part
        steps.append((label.strip(), poly.strip()))
    return NumberField.from_steps(steps, cap=cap)


def parse_ints(spec: str | None):
    if spec is None:
        return None
    try:
        return [int(v) for v in spec.replace(" ", "").split(",") if v]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {spec!r}") from None


def parse_point(spec: str | None):
    if spec is None:
        return None
    try:
        return tuple(Fraction(v) for v in spec.replace(" ", "").split(","))
    except ValueError:
        raise UsageError(f"bad point {spec!r}") from None


def parse_battery(spec: str | None):
    from .specialization import DEFAULT_BATTERY

    if spec is None:
        return DEFAULT_BATTERY
    return tuple(v.strip() for v in spec.split(",") if v.strip())


# ---------------------------------------------------------------------------
# subcommands; each returns (payload, ok)


def cmd_realize_aut(args):
    from .groups import parse_group
    from .pipeline import PipelineRequest, realize_aut

    try:
        G = parse_group(args.group)
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc)) from None
    req = PipelineRequest(
        G,
        parse_field(args.L),
        parse_ints(args.alpha),
        Fraction(args.y),
        args.budget,
        parse_battery(args.battery),
        parse_point(args.point),
        group_spec=args.group,
    )
    pc = realize_aut(req)
    return pc.to_json(), pc.ok


def cmd_gadget_check(args):
    from .gadgets import make_gadget

    out = [make_gadget(Fraction(y), args.budget).to_json() for y in args.y]
    return (out[0] if len(out) == 1 else out), True


def cmd_gadget_distinct(args):
    from itertools import combinations

    from .gadgets import gadget_distinctness

    ys = [Fraction(y) for y in args.y]
    if len(ys) < 2:
        raise UsageError("gadget distinct needs at least two --y values")
    out = [gadget_distinctness(a, b, args.budget).to_json() for a, b in combinations(ys, 2)]
    return out, True


def cmd_catalog_check(args):
    from .catalog import check_catalog, get_entry, load_catalog

    entries = load_catalog(args.catalog)
    if args.entry:
        entries = [get_entry(args.entry, entries)]
    rows = check_catalog(entries, args.budget, parse_battery(args.battery))
    return rows, all(r["passed"] for r in rows)


def cmd_specialize(args):
    from .specialization import SpecializationPoint, hilbert_search, parameters_of, specialize

    poly = as_poly(args.poly)
    if args.point is None:
        point, rejections = hilbert_search([poly], args.budget)
    else:
        values = parse_point(args.point)
        names = parameters_of([poly])
        if len(values) != len(names):
            raise UsageError(f"point has {len(values)} coordinates, polynomial has parameters {names}")
        point, rejections = SpecializationPoint(tuple(names), values), []
    report = specialize(poly, point, cap=args.cap)
    out = report.to_json()
    out["rejections"] = [r.to_json() for r in rejections]
    return out, True  # a degraded report is a valid outcome


def cmd_fiber_product(args):
    from .embedding import EmbeddingProblem, reduce_via_fiber_product
    from .groups import parse_group

    try:
        G = parse_group(args.group)
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc)) from None
    L, Lp = parse_field(args.L, args.cap), parse_field(args.L_prime, args.cap)
    if Lp is None:
        raise UsageError("--L-prime is required")
    ep = EmbeddingProblem.build(G, L, parse_ints(args.alpha))
    pkg = reduce_via_fiber_product(ep, Lp, parse_ints(args.gamma))
    return pkg.to_json(), True


def cmd_verify(args):
    report = certificate.verify_file(args.certificate)
    return report.to_json(), report.ok


def cmd_restriction(args):
    from .embedding import _embed_into
    from .fields import automorphism_group, restriction_map

    F, L = parse_field(args.F, args.cap), parse_field(args.L, args.cap)
    if F is None:
        raise UsageError("--F must be a proper extension presentation")
    L = L if L is not None else NumberField.rationals()
    emb = _embed_into(L, F, None)
    res = restriction_map(automorphism_group(F, cap=args.cap), automorphism_group(L, cap=args.cap), emb)
    return res.to_json(), True


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="autfield", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--pretty", action="store_true", help="indent the JSON output")
    common.add_argument("--json", action="store_true", help="accepted for compatibility; output is always JSON")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("realize-aut", parents=[common], help="realise G as Aut(F/Q) with F non-normal")
    r.add_argument("--group", required=True, help="C1, C2, V4, S3, ... or a Cayley-table JSON file")
    r.add_argument("--L", help=FIELD_HELP)
    r.add_argument("--alpha", help="images of G's elements in Aut(L/Q), comma separated")
    r.add_argument("--y", default="0", help="gadget parameter")
    r.add_argument("--budget", type=int, default=10)
    r.add_argument("--battery", help="comma-separated battery names")
    r.add_argument("--point", help="force the point z,t")
    r.set_defaults(func=cmd_realize_aut)

    g = sub.add_parser("gadget", help="trinomial gadget certificates")
    gsub = g.add_subparsers(dest="gadget_command", required=True)
    gc = gsub.add_parser("check", parents=[common])
    gc.add_argument("--y", action="append", required=True)
    gc.add_argument("--budget", type=int, default=10)
    gc.set_defaults(func=cmd_gadget_check)
    gd = gsub.add_parser("distinct", parents=[common])
    gd.add_argument("--y", action="append", required=True)
    gd.add_argument("--budget", type=int, default=10)
    gd.set_defaults(func=cmd_gadget_distinct)

    c = sub.add_parser("catalog", help="catalog operations")
    csub = c.add_subparsers(dest="catalog_command", required=True)
    cc = csub.add_parser("check", parents=[common])
    cc.add_argument("--entry")
    cc.add_argument("--catalog", help="path to a catalog JSON file")
    cc.add_argument("--budget", type=int, default=10)
    cc.add_argument("--battery")
    cc.set_defaults(func=cmd_catalog_check)

    s = sub.add_parser("specialize", parents=[common], help="specialise a polynomial at a point")
    s.add_argument("--poly", required=True)
    s.add_argument("--point")
    s.add_argument("--budget", type=int, default=10)
    s.add_argument("--cap", type=int, default=DEFAULT_DEGREE_CAP)
    s.set_defaults(func=cmd_specialize)

    f = sub.add_parser("fiber-product", parents=[common], help="reduce to a split problem")
    f.add_argument("--group", required=True)
    f.add_argument("--L", help=FIELD_HELP)
    f.add_argument("--alpha")
    f.add_argument("--L-prime", dest="L_prime", required=True, help=FIELD_HELP)
    f.add_argument("--gamma", help="gamma' images, comma separated (searched when omitted)")
    f.add_argument("--cap", type=int, default=DEFAULT_DEGREE_CAP)
    f.set_defaults(func=cmd_fiber_product)

    v = sub.add_parser("verify", parents=[common], help="re-verify a certificate file")
    v.add_argument("certificate")
    v.set_defaults(func=cmd_verify)

    rs = sub.add_parser("restriction", parents=[common], help="domain and image of res: Aut(F) -> Aut(L)")
    rs.add_argument("--F", required=True, help=FIELD_HELP)
    rs.add_argument("--L", help=FIELD_HELP)
    rs.add_argument("--cap", type=int, default=DEFAULT_DEGREE_CAP)
    rs.set_defaults(func=cmd_restriction)
    return p


def _emit(payload, args) -> None:
    text = certificate.dumps(payload, pretty=getattr(args, "pretty", False))
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _failure(exc: BaseException) -> dict:
    out = {"ok": False, "error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, AutfieldError):
        out["reason"] = exc.reason
    if isinstance(exc, StageFailure):
        out["stage"] = exc.stage
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    try:
        payload, ok = args.func(args)
    except (UsageError, PolySyntaxError, MixedVariables) as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"autfield: error: {exc}\n")
        return 2
    except AutfieldError as exc:
        _emit(_failure(exc), args)
        return 1
    _emit(payload, args)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

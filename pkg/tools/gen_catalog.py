"""Regenerate src/autfield/data/catalog.json.

Automorphism expressions are derived once with sympy; the package itself
re-verifies every entry with its own exact arithmetic (``catalog check``),
so sympy is only a build-time helper.
"""
import json
import sys
from fractions import Fraction
from pathlib import Path

import sympy as sp

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
from autfield.algebra.poly import ExactPoly, canonical_vars  # noqa: E402

Z, X, W, V = sp.symbols("Z X W V")
QZ = sp.QQ.frac_field(Z)


def reduce_mod(expr, modulus, var=X):
    """expr (a rational function with invertible denominators) mod modulus over Q(Z)."""
    num, den = sp.fraction(sp.together(expr))
    m = sp.Poly(modulus, var, domain=QZ)
    n = sp.Poly(num, var, domain=QZ).rem(m)
    d = sp.Poly(den, var, domain=QZ).rem(m)
    return n.mul(d.invert(m)).rem(m)


def split_den(p):
    """Poly over Q(Z) -> (numerator string, denominator string) with den in Q[Z]."""
    coeffs = p.all_coeffs()
    dens = [sp.fraction(sp.together(c.as_expr()))[1] for c in coeffs]
    den = sp.lcm_list(dens) if dens else sp.Integer(1)
    num = sp.expand(sum(sp.cancel(c.as_expr() * den) * p.gen ** (len(coeffs) - 1 - i) for i, c in enumerate(coeffs)))
    den = sp.expand(den)
    lead = sp.Poly(den, Z).LC() if den.has(Z) else den
    num, den = sp.expand(num / lead), sp.expand(den / lead)
    return fmt(num), fmt(den)


def fmt(e):
    """Render with the package's own printer so the parser round-trips it."""
    gens = [g for g in (X, Z) if sp.sympify(e).has(g)] or [X]
    poly = sp.Poly(sp.expand(e), *gens, domain=sp.QQ)
    names = [str(g) for g in gens]
    terms = {exps: Fraction(int(c.p), int(c.q)) for exps, c in poly.terms()}
    return str(ExactPoly(canonical_vars(names), _reorder(terms, names)))


def _reorder(terms, names):
    order = canonical_vars(names)
    idx = [names.index(v) for v in order]
    return {tuple(e[i] for i in idx): c for e, c in terms.items()}


def aut(x_expr, modulus, constants=None):
    num, den = split_den(reduce_mod(x_expr, modulus))
    out = {"X": num if den == "1" else {"num": num, "den": den}}
    if constants:
        out["constants"] = constants
    return out


def entry(name, group, poly, auts, notes, regular, steps=None, presentation=None):
    data = {
        "name": name,
        "standard_name": group,
        "order": len(auts),
        "polynomial": fmt(poly),
        "automorphisms": auts,
        "regularity": regular,
        "notes": notes,
    }
    if steps:
        data["constant_steps"] = steps
    if presentation:
        data["entry_polynomial"] = presentation
    return data


def c4():
    A = 1 + Z ** 2
    f = sp.expand(X ** 4 - 2 * A * X ** 2 + A * Z ** 2)
    # r1 = sqrt(A + sqrt(A)), r2 = sqrt(A - sqrt(A)) = Z*sqrt(A)/r1, sqrt(A) = r1^2 - A
    sigma = Z * (X ** 2 - A) / X
    images = [X]
    for _ in range(3):
        images.append(sp.expand(reduce_mod(sigma.subs(X, images[-1]), f).as_expr()))
    return f, [aut(e, f) for e in images]


def s3_closure():
    p = q = Z
    f = sp.expand(X ** 6 + 6 * p * X ** 4 + 9 * p ** 2 * X ** 2 + 4 * p ** 3 + 27 * q ** 2)
    d = X  # d = x1 - x2
    x3 = 3 * q / (d ** 2 + p)
    x1 = (d - x3) / 2
    x2 = (-d - x3) / 2
    roots = [x1, x2, x3]
    images = []
    for i, j in [(0, 1), (1, 2), (2, 0), (1, 0), (0, 2), (2, 1)]:
        images.append(roots[i] - roots[j])
    return f, [aut(e, f) for e in images]


def c6():
    cubic = X ** 3 - Z * X ** 2 - (Z + 3) * X - 1
    f = sp.expand(sp.resultant(V ** 2 - Z, cubic.subs(X, X - V), V))
    # express s = sqrt(Z) and a = w - s through the first subresultant
    g1 = V ** 2 - Z
    g2 = sp.expand(cubic.subs(X, X - V))
    sub = [s for s in sp.subresultants(g1, g2, V) if sp.degree(s, V) == 1][0]
    A, B = sp.Poly(sub, V).all_coeffs()
    s = reduce_mod(-B / A, f).as_expr()
    a = sp.expand(X - s)
    sig = lambda t: t ** 2 - (Z + 1) * t - 2
    conj_a = [a, sig(a), sig(sig(a))]
    images = [ca + e * s for e in (1, -1) for ca in conj_a]
    return f, [aut(e, f) for e in images]


def main():
    entries = []
    entries.append(entry("C1", "C1", X, [{"X": "X"}],
                         "trivial extension Q(Z)/Q(Z)", "trivial"))
    entries.append(entry("C2", "C2", X ** 2 - Z, [{"X": "X"}, {"X": "-X"}],
                         "Kummer extension Q(Z, sqrt(Z))", "rational function field Q(sqrt(Z))"))
    entries.append(entry("C3", "C3", X ** 3 - Z * X ** 2 - (Z + 3) * X - 1,
                         [{"X": "X"}, {"X": "X^2 - Z*X - X - 2"}, {"X": "-X^2 + Z*X + Z + 2"}],
                         "simplest cubic family; discriminant (Z^2+3Z+9)^2",
                         "genus 0: Z = (x^3 - 3x - 1)/(x^2 + x), so N = Q(x)"))
    v4 = sp.expand(X ** 4 - 2 * (2 * Z + 1) * X ** 2 + 1)
    entries.append(entry("V4", "V4", v4,
                         [aut(e, v4) for e in (X, -X, 1 / X, -1 / X)],
                         "x = sqrt(Z) + sqrt(Z+1); roots +-x, +-1/x",
                         "Q(sqrt(Z), sqrt(Z+1)) = Q(v) with Z = ((v^2-1)/(2v))^2"))
    f, auts = c4()
    entries.append(entry("C4", "C4", f, auts,
                         "x = sqrt(A + sqrt(A)), A = 1 + Z^2 a sum of two squares",
                         "regularity proxy only"))
    f, auts = s3_closure()
    entries.append(entry("S3", "S3", f, auts,
                         "Galois closure of X^3 + Z*X + Z presented by the root difference x1 - x2",
                         "regularity proxy only", presentation="X^3 + Z*X + Z"))
    f, auts = c6()
    entries.append(entry("C6", "C6", f, auts,
                         "compositum of X^2 - Z and the simplest cubic, primitive element x + sqrt(Z)",
                         "regularity proxy only"))
    kummer = [
        {"X": x, "constants": {"u": u}}
        for u in ("u", "-u - 1")
        for x in ("X", "u*X", "-u*X - X")
    ]
    entries.append(entry("S3-kummer", "S3", X ** 3 - Z, kummer,
                         "Q(zeta3)(Z, Z^(1/3)); constant field Q(zeta3) = Q(sqrt(-3))",
                         "constant field exactly Q(u), u^2 + u + 1 = 0",
                         steps=[{"generator": "u", "poly": "X^2 + X + 1"}]))
    out = Path(__file__).resolve().parents[1] / "src" / "autfield" / "data" / "catalog.json"
    out.write_text(json.dumps({"entries": entries}, indent=2) + "\n")
    print(f"wrote {len(entries)} entries to {out}")


if __name__ == "__main__":
    main()

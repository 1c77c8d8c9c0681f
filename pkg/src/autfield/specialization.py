"""Specialising extensions of Q(T1, ..., Tn) at rational points.

Covers Hilbert-set search in canonical order, the degree chain for a
specialised Galois closure, the regularity proxy battery, and the transfer of
a solution certificate from the function-field level down to Q.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .algebra.factor import (
    canonical_points,
    discriminant,
    factor_over_Q,
    specialization_check,
)
from .algebra.numberfield import DEFAULT_DEGREE_CAP, NumberField, factor_over_number_field, roots_in_field
from .algebra.poly import MAIN_VAR, ExactPoly, as_poly, canonical_vars, to_fraction
from .errors import (
    BudgetExhausted,
    DegreeCapExceeded,
    Inconclusive,
    NotEmbedded,
    NotIntegral,
    NotIrreducibleDefiningPoly,
)
from .fields import automorphism_group, splitting_field

DEFAULT_BUDGET = 10

# name -> defining polynomial of the test field
BATTERY = {
    "-1": "X^2 + 1",
    "2": "X^2 - 2",
    "-2": "X^2 + 2",
    "3": "X^2 - 3",
    "-3": "X^2 + 3",
    "5": "X^2 - 5",
    "zeta3": "X^2 + X + 1",
}
DEFAULT_BATTERY = tuple(BATTERY)


@dataclass(frozen=True)
class SpecializationPoint:
    """Values for the indeterminates, in the listed order."""

    order: tuple
    values: tuple

    def __post_init__(self):
        if len(self.order) != len(self.values):
            raise ValueError("arity of the point does not match its variables")
        object.__setattr__(self, "values", tuple(to_fraction(v) for v in self.values))

    def as_dict(self) -> dict:
        return dict(zip(self.order, self.values))

    @classmethod
    def parse(cls, text: str, order: Sequence[str]) -> "SpecializationPoint":
        vals = [Fraction(v.strip()) for v in str(text).split(",") if v.strip()]
        return cls(tuple(order), tuple(vals))

    def to_json(self):
        return {v: str(c) for v, c in zip(self.order, self.values)}


def parameters_of(polys: Iterable[ExactPoly], var: str = MAIN_VAR) -> tuple:
    params = set()
    for p in polys:
        params |= p.free_symbols - {var}
    return canonical_vars(params)


# ---------------------------------------------------------------------------
# Hilbert search


@dataclass
class Rejection:
    point: tuple
    poly_index: int
    reason: str
    evidence: str

    def to_json(self):
        return {"point": [str(v) for v in self.point], "poly": self.poly_index, "reason": self.reason, "evidence": self.evidence}


def check_point(polys: Sequence[ExactPoly], point: dict, guards: Sequence[ExactPoly] = (), var: str = MAIN_VAR):
    """None when ``point`` is acceptable, otherwise a (poly index, reason, evidence) triple."""
    for k, g in enumerate(guards):
        if g.subs(point).is_zero():
            return (-1 - k, "guard vanishes", str(g))
    for i, p in enumerate(polys):
        ok, reason, fl = specialization_check(p, point, var)
        if not ok:
            if reason == "degree drop":
                evidence = f"leading coefficient {p.leading_coefficient(var)} vanishes"
            elif reason == "inseparable":
                evidence = f"repeated factor in {fl.to_json()['factors']}"
            else:
                evidence = f"factor {fl.factors[0][0]}"
            return (i, reason, evidence)
    return None


def hilbert_search(
    polys: Sequence,
    budget: int = DEFAULT_BUDGET,
    variables: Sequence[str] | None = None,
    guards: Sequence = (),
    var: str = MAIN_VAR,
):
    """First point in canonical order where every polynomial stays irreducible.

    Returns (point, rejections).  Points are ordered by max-norm, then
    lexicographically along 0, 1, -1, 2, -2, ...
    """
    polys = [as_poly(p) for p in polys]
    guards = [as_poly(g) for g in guards]
    order = tuple(variables) if variables is not None else parameters_of(polys, var)
    rejections = []
    for pt in canonical_points(len(order), budget):
        point = dict(zip(order, pt))
        bad = check_point(polys, point, guards, var)
        if bad is None:
            return SpecializationPoint(order, pt), rejections
        rejections.append(Rejection(pt, *bad))
    raise BudgetExhausted(
        f"no acceptable point with coordinates bounded by {budget}",
        [r.to_json() for r in rejections],
    )


# ---------------------------------------------------------------------------
# single specialisation


def generic_closure_degree(poly: ExactPoly, var: str = MAIN_VAR, galois: bool = False) -> int:
    """[Ehat : Q(T)] for the field cut out by ``poly``.

    Known exactly when the polynomial is declared Galois, or has degree at
    most 3 (discriminant squareness decides A3 versus S3).
    """
    poly = as_poly(poly)
    n = poly.degree(var)
    if galois or n <= 2:
        return n
    if n == 3:
        disc = discriminant(poly, var)
        params = disc.free_symbols
        if not params:
            return 3 if _is_rational_square(disc.constant_value()) else 6
        if len(params) == 1:
            fl = factor_over_Q(disc)
            if any(m % 2 for _, m in fl.factors) or not _is_rational_square(fl.unit):
                return 6
            return 3
    raise Inconclusive(f"generic Galois closure degree of {poly} is not determined here")


def _is_rational_square(q: Fraction) -> bool:
    from math import isqrt

    q = Fraction(q)
    if q < 0:
        return False
    a, b = q.numerator, q.denominator
    return isqrt(a) ** 2 == a and isqrt(b) ** 2 == b


def integral_normalisation(poly: ExactPoly, var: str = MAIN_VAR) -> tuple[ExactPoly, ExactPoly]:
    """Rescale X -> X/c so the polynomial becomes monic with polynomial coefficients."""
    poly = as_poly(poly).primitive_part(var)
    n = poly.degree(var)
    lc = poly.leading_coefficient(var)
    if lc.is_constant():
        return poly.scale(1 / lc.constant_value()), ExactPoly.constant(1)
    coeffs = poly.coefficients(var)
    x = ExactPoly.var(var)
    out = ExactPoly()
    for i, c in enumerate(coeffs):
        out = out + c * lc ** (n - 1 - i) * x ** i if i < n else out + x ** n
    if not out.is_monic(var):
        raise NotIntegral(f"could not make {poly} integral over the parameter ring")
    return out, lc


@dataclass
class SpecializationReport:
    point: SpecializationPoint
    polynomial: ExactPoly
    specialized: ExactPoly
    accepted: bool
    reason: str
    factorization: list | None = None
    E_t: NumberField | None = None
    Ehat_t: NumberField | None = None
    generic_closure_degree: int | None = None
    degree_checks: dict = field(default_factory=dict)
    galois_check: bool = False
    closure_check: bool = False
    aut_order: int | None = None

    @property
    def ok(self) -> bool:
        return self.accepted and all(self.degree_checks.values()) and self.galois_check and self.closure_check

    def to_json(self):
        out = {
            "point": self.point.to_json(),
            "polynomial": str(self.polynomial),
            "specialized": str(self.specialized),
            "accepted": self.accepted,
            "reason": self.reason,
        }
        if self.factorization is not None:
            out["factorization"] = self.factorization
        if self.E_t is not None:
            out["E_t"] = self.E_t.to_json()
            out["E_t_degree"] = self.E_t.degree
        if self.Ehat_t is not None:
            out["Ehat_t"] = self.Ehat_t.to_json()
            out["Ehat_t_degree"] = self.Ehat_t.degree
            out["Ehat_generic_degree"] = self.generic_closure_degree
            out["degree_checks"] = self.degree_checks
            out["Ehat_t_galois"] = self.galois_check
            out["Ehat_t_is_closure_of_E_t"] = self.closure_check
        return out


def specialize(poly, point, closure_degree: int | None = None, var: str = MAIN_VAR, cap: int = DEFAULT_DEGREE_CAP) -> SpecializationReport:
    """Specialise the field defined by ``poly`` at ``point``.

    At an acceptable point E_t = Q[X]/(P(t, X)) and Ehat_t is its splitting
    field; the report checks [Ehat_t : Q] = [Ehat : Q(T)], that Ehat_t is
    Galois, and that it is the Galois closure of E_t.  Otherwise a degraded
    report carries the factorisation.
    """
    poly = as_poly(poly)
    if not isinstance(point, SpecializationPoint):
        if isinstance(point, dict):
            point = SpecializationPoint(tuple(point), tuple(point.values()))
        else:
            vals = point if isinstance(point, (tuple, list)) else (point,)
            point = SpecializationPoint(parameters_of([poly], var), tuple(vals))
    monic, _ = integral_normalisation(poly, var)
    spec = monic.subs(point.as_dict())
    ok, reason, fl = specialization_check(monic, point.as_dict(), var)
    report = SpecializationReport(point, poly, spec, ok, reason)
    if not ok:
        if fl is not None:
            report.factorization = fl.to_json()["factors"]
        return report
    n = spec.degree(var)
    if closure_degree is None:
        closure_degree = generic_closure_degree(poly, var)
    report.generic_closure_degree = closure_degree
    E_t = NumberField.from_poly(spec, "x", cap=cap)
    Ehat = splitting_field(spec, cap=max(cap, closure_degree))
    report.E_t, report.Ehat_t = E_t, Ehat
    report.degree_checks = {
        "Ehat_t_vs_Ehat": Ehat.degree == closure_degree,
        "E_t_vs_E": E_t.degree == n,
    }
    report.aut_order = automorphism_group(Ehat, cap=max(cap, Ehat.degree)).order
    report.galois_check = report.aut_order == Ehat.degree
    # E_t embeds in Ehat_t (a root of P(t, X) lies there) and Ehat_t is generated by the roots
    report.closure_check = bool(factor_over_number_field(spec, Ehat).degrees().count(1) == n)
    return report


# ---------------------------------------------------------------------------
# regularity proxy


def battery_fields(names: Sequence[str] = DEFAULT_BATTERY) -> list[tuple[str, ExactPoly]]:
    out = []
    for name in names:
        name = str(name).strip()
        if name in BATTERY:
            out.append((name, as_poly(BATTERY[name])))
        else:
            try:
                d = int(name)
            except ValueError:
                raise ValueError(f"unknown battery field {name!r}") from None
            out.append((name, as_poly(f"X^2 - ({d})")))
    return out


@dataclass
class RegularityVerdict:
    verdict: str
    results: list

    @property
    def ok(self) -> bool:
        return self.verdict == "proxy-regular"

    def to_json(self):
        return {"verdict": self.verdict, "fields": self.results}


def regularity_spot_check(
    poly,
    battery: Sequence = DEFAULT_BATTERY,
    constant_field: NumberField | None = None,
    extra_fields: Sequence[tuple[str, NumberField]] = (),
    budget: int = 4,
    var: str = MAIN_VAR,
    known_constants: NumberField | None = None,
) -> RegularityVerdict:
    """Irreducibility of ``poly`` over K(params) for each test field K.

    ``constant_field`` is the field the coefficients live in (default Q);
    each test field is composed with it.  Test fields that embed in
    ``known_constants`` (default: the constant field) are skipped, since they
    are expected constants.  Every verdict is witnessed by a point whose
    specialisation stays irreducible over K with full degree.  This is a
    proxy for E cap Qbar = L: it is never a proof of regularity.
    """
    poly = as_poly(poly)
    base = constant_field if constant_field is not None else NumberField.rationals()
    known = known_constants if known_constants is not None else base
    const_labels = set(base.generator_labels)
    params = canonical_vars(poly.free_symbols - {var} - const_labels)
    tests = [(name, p) for name, p in battery_fields(battery)]
    tests += [(name, ExactPoly.from_fmpq_poly(K.minpoly, "X")) for name, K in extra_fields]
    results = []
    verdict = "proxy-regular"
    n = poly.degree(var)
    for name, p in tests:
        entry = {"field": name}
        if not known.is_rational() and roots_in_field(p, known):
            entry["status"] = "contained in constant field"
            results.append(entry)
            continue
        if n <= 1:
            entry["status"] = "irreducible"
            results.append(entry)
            continue
        M = _compose_with(base, p)
        witness = None
        for pt in canonical_points(len(params), budget):
            point = dict(zip(params, pt))
            spec = poly.subs(point)
            if spec.degree(var) < n:
                continue
            fl = factor_over_number_field(spec, M)
            if fl.is_irreducible:
                witness = pt
                break
        if witness is None:
            entry["status"] = "factors"
            verdict = "proxy check failed"
        else:
            entry["status"] = "irreducible"
            entry["witness"] = {k: str(v) for k, v in zip(params, witness)}
        results.append(entry)
    return RegularityVerdict(verdict, results)


def _compose_with(base: NumberField, p: ExactPoly) -> NumberField:
    cap = max(DEFAULT_DEGREE_CAP, base.degree * p.degree("X"))
    if base.degree == 1:
        return NumberField.from_poly(p, "d", cap=cap)
    label = "d"
    while label in base.gens:
        label += "d"
    return base.extend(p, label, cap=cap)


# ---------------------------------------------------------------------------
# solutions over Q(Z, T) and their specialisation


@dataclass
class GeometricSolution:
    """A solution of alpha over Q(Z, T): E = N(T, x) with beta: Aut(E) -> G.

    Aut(E/Q(Z,T)) is identified with the automorphism list of N (each
    extended by x -> x).  ``L_images`` places the generators of L inside the
    constant field of N.
    """

    problem: object  # EmbeddingProblem
    tower: object  # KilledTower
    beta: object  # GroupHom
    L_images: dict
    route: str = "direct"

    @property
    def N(self):
        return self.tower.N

    def constant_restriction(self):
        """res: Gal(N/Q(Z)) -> Aut(L/Q), read off the action on constants."""
        from .fields import Embedding
        from .groups import GroupHom

        ep, N = self.problem, self.N
        G_N = N.galois_group()
        if ep.L.is_rational():
            return GroupHom.trivial(G_N, ep.aut.group)
        K = N.constant_field
        emb = Embedding.from_generators(ep.L, K, self.L_images)
        targets = {str(emb(ep.aut.apply(j, ep.L.gen())).poly): j for j in range(ep.aut.order)}
        images = []
        for sigma in N.automorphisms:
            s = Embedding.from_generators(K, K, sigma.const_map())
            images.append(targets[str(s(emb.theta_image).poly)])
        return GroupHom(G_N, ep.aut.group, images)

    def guards(self) -> list:
        return [a.x_image.den for a in self.N.automorphisms if not a.x_image.den.is_constant()]

    def verify(self) -> dict:
        from .errors import CheckFailed

        info = self.N.verify()
        if not self.beta.is_isomorphism():
            raise CheckFailed("beta is not an isomorphism", "beta")
        res = self.constant_restriction()
        if any(self.problem.alpha(self.beta(g)) != res(g) for g in range(self.beta.source.order)):
            raise CheckFailed("alpha o beta differs from restriction", "commutation")
        return {"N": info, "res": list(res.images), "beta": list(self.beta.images)}

    def to_json(self):
        return {
            "route": self.route,
            "tower": self.tower.to_json(),
            "beta": list(self.beta.images),
            "L_images": {k: str(v) for k, v in self.L_images.items()},
        }


def _closure_roots(Ehat: NumberField, y, t):
    """The six differences of roots of P_y(t, X), as elements of Ehat = N_z(d)."""
    s = to_fraction(t) - to_fraction(y)
    d = Ehat.gen("d")
    x3 = (d * d + s).inverse() * (3 * s)
    x1 = (d - x3) * Fraction(1, 2)
    x2 = (-d - x3) * Fraction(1, 2)
    xs = [x1, x2, x3]
    return xs, [xs[i] - xs[j] for i in range(3) for j in range(3) if i != j]


def specialize_solution(gsol: GeometricSolution, point=None, budget: int = DEFAULT_BUDGET, battery: Sequence = DEFAULT_BATTERY):
    """Transfer a solution over Q(Z, T) to Q at an accepted point.

    Builds E_t and its Galois closure, recomputes Aut(E_t/Q), matches every
    automorphism with a specialised element of Aut(E/Q(Z,T)) (this is h_t),
    and returns the certificate for beta o h_t.
    """
    from .embedding import SolutionCertificate, verify_solution
    from .errors import DegreeDrop, TransferFailure
    from .fields import Embedding
    from .gadgets import difference_poly, gadget_poly
    from .groups import GroupHom

    tower, N, ep = gsol.tower, gsol.N, gsol.problem
    polys = [tower.P_hat, tower.Q_E]
    order = ("Z", "T")
    guards = gsol.guards()
    rejections = []
    if point is None:
        point, rejections = hilbert_search(polys, budget, order, guards)
    else:
        if not isinstance(point, SpecializationPoint):
            point = SpecializationPoint(order, tuple(point))
        bad = check_point(polys, point.as_dict(), guards)
        if bad is not None:
            raise DegreeDrop(f"point {point.to_json()} rejected: {bad[1]} ({bad[2]})")
    z, t = point.values
    y = tower.y
    cap = max(DEFAULT_DEGREE_CAP, tower.closure_degree)

    Nz = N.specialize(z, cap=cap)
    try:
        E_t = Nz.extend(gadget_poly(y).subs({"T": t}), "x", cap=cap)
        Ehat = Nz.extend(difference_poly(y).subs({"T": t}), "d", cap=cap)
    except NotIrreducibleDefiningPoly as exc:
        raise DegreeDrop(f"degree drops at {point.to_json()}: {exc}") from exc
    if E_t.degree != tower.degree or Ehat.degree != tower.closure_degree:
        raise DegreeDrop(f"[E_t:Q] = {E_t.degree}, [Ehat_t:Q] = {Ehat.degree}")

    # Ehat_t = N_z(d) is Galois: N_z is Galois and all six differences lie in it
    specialized = [N.specialized_images(z, s) for s in N.automorphisms]
    nz_auts = {str(Embedding.from_generators(Nz, Nz, imgs).theta_image.poly) for imgs in specialized}
    R_t = Ehat.poly(difference_poly(y).subs({"T": t}))
    xs, diffs = _closure_roots(Ehat, y, t)
    closure = {
        "N_z_galois": len(nz_auts) == Nz.degree,
        "differences_are_roots": all(R_t.evaluate(r).is_zero() for r in diffs),
        "differences_distinct": len({str(r.poly) for r in diffs}) == 6,
        "degree_Ehat_t": Ehat.degree,
        "degree_Ehat_generic": tower.closure_degree,
    }
    incl_hat = Embedding.inclusion(Nz, Ehat)
    try:
        Embedding.from_generators(E_t, Ehat, {**{g: incl_hat(Nz.gen(g)) for g in Nz.generator_labels}, "x": xs[0]})
        closure["E_t_embeds"] = True
    except NotEmbedded:
        closure["E_t_embeds"] = False
    if not all(v for v in closure.values() if isinstance(v, bool)):
        raise DegreeDrop(f"closure checks fail at {point.to_json()}: {closure}")

    aut = automorphism_group(E_t, cap=cap)
    incl = Embedding.inclusion(Nz, E_t)
    lifted = [{g: incl(Nz.element(e)) for g, e in imgs.items()} for imgs in specialized]
    x = E_t.gen("x")
    h = []
    for i in range(aut.order):
        if aut.apply(i, x) != x:
            raise TransferFailure(f"automorphism {i} of E_t moves x")
        acts = {g: aut.apply(i, E_t.gen(g)) for g in Nz.generator_labels}
        hits = [k for k, imgs in enumerate(lifted) if all(acts[g] == imgs[g] for g in imgs)]
        if len(hits) != 1:
            raise TransferFailure(f"automorphism {i} of E_t matches {len(hits)} elements of Aut(E)")
        h.append(hits[0])
    if aut.order != N.absolute_degree or len(set(h)) != aut.order:
        raise TransferFailure(f"|Aut(E_t/Q)| = {aut.order}, expected {N.absolute_degree}")
    h_t = GroupHom(aut.group, N.galois_group(), h)
    beta_t = gsol.beta.after(h_t)

    if ep.L.is_rational():
        emb_L = Embedding(ep.L, E_t, E_t.element(0))
    else:
        emb_L = Embedding.from_generators(ep.L, E_t, {g: incl(Nz.element(as_poly(e))) for g, e in gsol.L_images.items()})

    ff_data = {
        "route": gsol.route,
        "N": N.to_json(),
        "y": str(y),
        "E_polynomial": str(tower.Q_E),
        "Ehat_polynomial": str(tower.P_hat),
        "point": point.to_json(),
        "guards": [str(g) for g in guards],
        "budget": budget,
        "battery": list(battery),
        "L_images": {k: str(v) for k, v in gsol.L_images.items()},
    }
    transfer = {
        "h_t": list(h_t.images),
        "aut_E_generic_order": N.absolute_degree,
        "aut_E_t_order": aut.order,
        "closure": closure,
        "automorphism_identity": "certified at this point",
        "rejections": [r.to_json() for r in rejections],
    }
    from .embedding import EmbeddingProblem

    problem_Q = EmbeddingProblem(ep.G, ep.L, ep.aut, ep.alpha, base="Q")
    cert = SolutionCertificate(problem_Q, E_t, emb_L, list(aut.images), beta_t, {"status": "pending"}, ff_data, transfer)
    verdict = function_field_regularity(cert)
    cert.regularity = {"status": "certified" if verdict.ok else "proxy check failed", "method": "catalog metadata and proxy battery", "proxy": verdict.to_json()}
    return cert


def function_field_regularity(cert) -> RegularityVerdict:
    """Re-run the regularity proxy for the function-field data of a certificate."""
    ff = cert.function_field
    L = cert.problem.L
    extra = []
    if not L.is_rational():
        from .fields import galois_closure

        Lhat, _ = galois_closure(L)
        extra.append(("Lhat", Lhat))
    return regularity_spot_check(
        as_poly(ff["E_polynomial"]),
        ff.get("battery", DEFAULT_BATTERY),
        extra_fields=extra,
        known_constants=None if L.is_rational() else L,
        budget=3,
    )

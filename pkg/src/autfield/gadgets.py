"""The trinomial family P_y = X^3 + (T-y)X + (T-y) and its certificates."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra.factor import (
    canonical_points,
    discriminant,
    factor_over_Q,
    is_irreducible_over_QT,
    specialization_check,
)
from .algebra.poly import ExactPoly, to_fraction
from .errors import CheckFailed, EqualParameters, Inconclusive

T = ExactPoly.var("T")
X = ExactPoly.var("X")


def gadget_poly(y) -> ExactPoly:
    s = T - to_fraction(y)
    return X ** 3 + s * X + s


def difference_poly(y) -> ExactPoly:
    """Minimal polynomial of x1 - x2 for two roots of P_y.

    For X^3 + pX + q the six differences are the roots of S(X^2) with
    S(u) = u^3 + 6p u^2 + 9p^2 u + (4p^3 + 27q^2).  Adjoining one difference
    gives the full splitting field.
    """
    p = q = T - to_fraction(y)
    u = X ** 2
    return u ** 3 + p.scale(6) * u ** 2 + (p ** 2).scale(9) * u + (p ** 3).scale(4) + (q ** 2).scale(27)


def expected_discriminant(y) -> ExactPoly:
    s = T - to_fraction(y)
    return -(s ** 2) * (s.scale(4) + 27)


@dataclass
class TrinomialGadget:
    y: Fraction
    poly: ExactPoly
    discriminant: ExactPoly
    disc_factors: list = field(default_factory=list)
    witness: dict | None = None
    separable: bool = True
    galois_group: str = "S3"

    @property
    def closure_poly(self) -> ExactPoly:
        return difference_poly(self.y)

    def to_json(self):
        return {
            "y": str(self.y),
            "polynomial": str(self.poly),
            "discriminant": str(self.discriminant),
            "discriminant_formula": "-(T - y)^2*(4*(T - y) + 27)",
            "discriminant_factors": [[str(f), m] for f, m in self.disc_factors],
            "irreducible_over_QT": {"witness": {k: str(v) for k, v in self.witness.items()}},
            "separable": self.separable,
            "odd_multiplicity_factor": str(self.odd_factor),
            "galois_group": self.galois_group,
            "branch_points": [str(b) for b in branch_points(self)],
        }

    @property
    def odd_factor(self) -> ExactPoly:
        return next(f for f, m in self.disc_factors if m % 2 == 1)


def make_gadget(y=0, budget: int = 10) -> TrinomialGadget:
    """Build P_y and certify irreducibility, separability and group S3 over Q(T)."""
    y = to_fraction(y)
    poly = gadget_poly(y)
    disc = discriminant(poly, "X")
    if disc != expected_discriminant(y):
        raise CheckFailed(f"discriminant identity fails: {disc}", "discriminant")
    if disc.is_zero():
        raise CheckFailed("P_y is inseparable", "separability")
    verdict = is_irreducible_over_QT(poly, "X", budget=budget)
    if not verdict:
        raise CheckFailed("P_y factors over Q(T)", "irreducibility")
    fl = factor_over_Q(disc)
    factors = list(fl.factors)
    # a non-square in Q(T) has some irreducible factor of odd multiplicity
    if not any(m % 2 for _, m in factors):
        raise CheckFailed("discriminant is a square in Q(T); group would be A3", "galois group")
    return TrinomialGadget(y, poly, disc, factors, verdict.witness, True, "S3")


def branch_points(g: TrinomialGadget | object) -> list[Fraction]:
    """The T-roots of disc(P_y), i.e. {y, y - 27/4}, in increasing order."""
    if not isinstance(g, TrinomialGadget):
        g = make_gadget(g)
    roots = set()
    for f, _ in g.disc_factors:
        if f.degree("T") == 1:
            a, b = f.coefficients("T")[1].constant_value(), f.coefficients("T")[0].constant_value()
            roots.add(-b / a)
    return sorted(roots)


@dataclass
class DistinctnessCertificate:
    y1: Fraction
    y2: Fraction
    method: str
    evidence: dict

    def __bool__(self):
        return True

    def to_json(self):
        return {"y1": str(self.y1), "y2": str(self.y2), "distinct": True, "method": self.method, "evidence": self.evidence}


def gadget_distinctness(y1, y2, budget: int = 10) -> DistinctnessCertificate:
    """Certify that the cubic fields cut out by P_y1 and P_y2 differ."""
    y1, y2 = to_fraction(y1), to_fraction(y2)
    if y1 == y2:
        raise EqualParameters(f"parameters coincide: {y1}")
    b1, b2 = branch_points(make_gadget(y1)), branch_points(make_gadget(y2))
    if set(b1) != set(b2):
        return DistinctnessCertificate(
            y1, y2, "branch loci", {"loci1": [str(b) for b in b1], "loci2": [str(b) for b in b2]}
        )
    # unreachable over Q (y -> {y, y-27/4} is injective); kept as a fallback
    p1, p2 = gadget_poly(y1), gadget_poly(y2)
    for (t,) in canonical_points(1, budget):
        ok1, _, _ = specialization_check(p1, {"T": t})
        ok2, _, _ = specialization_check(p2, {"T": t})
        if ok1 != ok2:
            return DistinctnessCertificate(y1, y2, "specialization", {"t": str(t), "irreducible_first": ok1})
    raise Inconclusive(f"no distinctness certificate for {y1}, {y2}")

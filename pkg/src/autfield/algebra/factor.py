"""Gcd, resultants, discriminants and factorisation over Q and Q(T).

Univariate factorisation over Q is delegated to FLINT (squarefree
decomposition, modular factorisation, Hensel lifting and recombination).
Irreducibility over Q(T) is certified by a specialisation witness.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from flint import fmpq_poly

from ..errors import DegreeCapExceeded, DegreeTooLow, Inconclusive, MixedVariables, ZeroPolynomial
from .poly import MAIN_VAR, ExactPoly, canonical_vars, to_fraction

DEFAULT_FACTOR_CAP = 128
BIVARIATE_FACTOR_LIMIT = 12


@dataclass(frozen=True)
class FactorList:
    """unit * prod(f ** m for f, m in factors), with monic factors in canonical order."""

    factors: tuple = ()
    unit: object = Fraction(1)
    base: str = "Q"

    def expand(self):
        result = self.unit
        for f, m in self.factors:
            result = f ** m * result
        return result

    @property
    def is_irreducible(self) -> bool:
        return len(self.factors) == 1 and self.factors[0][1] == 1

    def degrees(self) -> list[int]:
        return [f.degree() for f, m in self.factors for _ in range(m)]

    def to_json(self):
        return {
            "base": self.base,
            "unit": str(self.unit),
            "factors": [[str(f), m] for f, m in self.factors],
        }


def fmpq_monic(p: fmpq_poly) -> fmpq_poly:
    return p / p[p.degree()]


def fmpq_key(p: fmpq_poly):
    """Ordering key: degree, then coefficients from the leading one down."""
    return (p.degree(), [to_fraction(c) for c in reversed(p.coeffs())])


def factor_fmpq(p: fmpq_poly, cap: int = DEFAULT_FACTOR_CAP):
    """Return (unit, [(monic factor, multiplicity)]) in canonical order."""
    if p.is_zero():
        raise ZeroPolynomial("cannot factor the zero polynomial")
    if p.degree() > cap:
        raise DegreeCapExceeded(f"degree {p.degree()} exceeds factorisation cap {cap}")
    lc = p[p.degree()]
    if p.degree() == 0:
        return lc, []
    _, facs = p.factor()
    out = [(fmpq_monic(f), m) for f, m in facs]
    out.sort(key=lambda fm: fmpq_key(fm[0]))
    return lc, out


def _univariate(f: ExactPoly) -> str:
    syms = f.free_symbols
    if len(syms) > 1:
        raise MixedVariables(f"expected a univariate polynomial, got variables {sorted(syms)}")
    return next(iter(syms)) if syms else (f.variables[-1] if f.variables else MAIN_VAR)


def factor_over_Q(f: ExactPoly, cap: int = DEFAULT_FACTOR_CAP) -> FactorList:
    """Complete factorisation of a univariate rational polynomial."""
    if f.is_zero():
        raise ZeroPolynomial("cannot factor the zero polynomial")
    var = _univariate(f)
    unit, facs = factor_fmpq(f.to_fmpq_poly(var), cap)
    return FactorList(
        tuple((ExactPoly.from_fmpq_poly(p, var), m) for p, m in facs), to_fraction(unit), "Q"
    )


def poly_gcd(f, g, field=None):
    """Monic gcd of two univariate polynomials over Q or over a number field.

    ExactPoly inputs are treated over Q; KPoly inputs (from numberfield) use
    their own field.
    """
    from .numberfield import KPoly

    if isinstance(f, KPoly) or isinstance(g, KPoly):
        if not (isinstance(f, KPoly) and isinstance(g, KPoly)):
            raise MixedVariables("cannot mix polynomials over different bases")
        if f.field is not g.field and f.field.minpoly != g.field.minpoly:
            raise MixedVariables("polynomials live over different number fields")
        return f.gcd(g)
    sf, sg = f.free_symbols, g.free_symbols
    if len(sf) > 1 or len(sg) > 1 or (sf and sg and sf != sg):
        raise MixedVariables(f"variable lists differ: {sorted(sf)} vs {sorted(sg)}")
    var = next(iter(sf | sg), MAIN_VAR)
    a, b = f.to_fmpq_poly(var), g.to_fmpq_poly(var)
    if a.is_zero() and b.is_zero():
        return ExactPoly()
    d = a.gcd(b)
    return ExactPoly.from_fmpq_poly(fmpq_monic(d), var)


def resultant(f: ExactPoly, g: ExactPoly, var: str = MAIN_VAR) -> ExactPoly:
    """Res_var(f, g) as a polynomial in the remaining variables."""
    variables = canonical_vars(f.variables + g.variables + (var,))
    if len(variables) == 1:
        r = f.to_fmpq_poly(var).resultant(g.to_fmpq_poly(var))
        return ExactPoly.constant(to_fraction(r))
    fm = f.to_mpoly(variables)
    gm = g.to_mpoly(variables)
    res = ExactPoly.from_mpoly(fm.resultant(gm, var))
    return res.trimmed()


def discriminant(f: ExactPoly, in_variable: str = MAIN_VAR) -> ExactPoly:
    """(-1)^(d(d-1)/2) * Res(f, f') / lc(f)."""
    d = f.degree(in_variable)
    if d < 2:
        raise DegreeTooLow(f"discriminant needs degree >= 2 in {in_variable}, got {d}")
    r = resultant(f, f.diff(in_variable), in_variable)
    lc = f.leading_coefficient(in_variable)
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    if lc.is_constant():
        out = r.scale(Fraction(sign) / lc.constant_value())
    else:
        variables = canonical_vars(r.variables + lc.variables)
        q = r.to_mpoly(variables) / lc.to_mpoly(variables)
        out = ExactPoly.from_mpoly(q).scale(sign)
    return out.trimmed()


def squarefree_decomposition(f: ExactPoly, var: str = MAIN_VAR) -> list[tuple[ExactPoly, int]]:
    """Squarefree factors with multiplicities (via FLINT), content dropped."""
    m = f.to_mpoly()
    _, parts = m.factor_squarefree()
    return [(ExactPoly.from_mpoly(p).trimmed(), k) for p, k in parts]


def is_squarefree(f: ExactPoly, var: str = MAIN_VAR) -> bool:
    if f.degree(var) <= 0:
        return not f.is_zero()
    g = f.to_mpoly()
    d = f.diff(var).with_variables(f.variables).to_mpoly()
    return g.gcd(d).degrees()[f.variables.index(var)] == 0


# ---------------------------------------------------------------------------
# canonical enumeration


def canonical_integers() -> Iterator[int]:
    """0, 1, -1, 2, -2, ..."""
    yield 0
    n = 1
    while True:
        yield n
        yield -n
        n += 1


def canonical_index(n: int) -> int:
    return 2 * n - 1 if n > 0 else -2 * n


def canonical_points(arity: int, budget: int) -> list[tuple[int, ...]]:
    """All integer tuples with max-norm <= budget, by max-norm then canonical-lex."""
    if arity == 0:
        return [()]
    values = [0] + [s for n in range(1, budget + 1) for s in (n, -n)]
    points = list(itertools.product(values, repeat=arity))
    points.sort(key=lambda p: (max(abs(v) for v in p), [canonical_index(v) for v in p]))
    return points


# ---------------------------------------------------------------------------
# irreducibility over Q(params)


@dataclass
class IrreducibilityVerdict:
    irreducible: bool
    witness: dict | None = None
    factorization: list | None = None
    log: list = field(default_factory=list)

    def __bool__(self):
        return self.irreducible

    def to_json(self):
        out = {"irreducible": self.irreducible}
        if self.witness is not None:
            out["witness"] = {k: str(v) for k, v in self.witness.items()}
        if self.factorization is not None:
            out["factorization"] = [[str(f), m] for f, m in self.factorization]
        return out


def specialization_check(f: ExactPoly, point: dict, var: str = MAIN_VAR, cap: int = DEFAULT_FACTOR_CAP):
    """Return (ok, reason, factors) for the specialisation of f at ``point``."""
    d = f.degree(var)
    g = f.subs(point)
    if g.free_symbols - {var}:
        raise ValueError(f"point {point} does not specialise all parameters of {f}")
    if g.degree(var) < d:
        return False, "degree drop", None
    fl = factor_over_Q(g, cap)
    if d >= 2 and fl.factors and any(m > 1 for _, m in fl.factors):
        return False, "inseparable", fl
    if not fl.is_irreducible:
        return False, "reducible", fl
    return True, "irreducible", fl


def is_irreducible_over_QT(f: ExactPoly, var: str = MAIN_VAR, budget: int = 10) -> IrreducibilityVerdict:
    """Irreducibility of f over Q(parameters), with witness or factorisation."""
    if f.is_zero():
        raise ZeroPolynomial("zero polynomial")
    if f.degree(var) < 1:
        raise DegreeTooLow(f"need degree >= 1 in {var}")
    f = f.primitive_part(var)
    params = sorted(f.free_symbols - {var}, key=lambda v: canonical_vars([v, "X"]).index(v))
    params = list(canonical_vars(params))
    log = []
    if f.total_degree() <= BIVARIATE_FACTOR_LIMIT:
        _, facs = f.to_mpoly().factor()
        nontrivial = [(ExactPoly.from_mpoly(p).trimmed(), m) for p, m in facs]
        if len(nontrivial) > 1 or any(m > 1 for _, m in nontrivial):
            return IrreducibilityVerdict(False, factorization=nontrivial)
        if nontrivial and nontrivial[0][0].degree(var) == f.degree(var):
            log.append("multivariate factorisation: irreducible")
    for pt in canonical_points(len(params), budget):
        point = dict(zip(params, pt))
        ok, reason, _ = specialization_check(f, point, var)
        log.append((pt, reason))
        if ok:
            return IrreducibilityVerdict(True, witness=point, log=log)
    raise Inconclusive(f"no specialisation witness for {f} with |t| <= {budget}")

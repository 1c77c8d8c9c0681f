"""Galois extensions of Q(Z) presented by a polynomial and explicit automorphisms.

A field N = L'(Z)[X]/(f) is stored with f monic in X, where L' is a
constant field presented by a monic tower.  Each automorphism sends the
constant generators to polynomials in themselves and X to a quotient
num/den with den in Q[Z].  All identities are checked by reduction modulo
the monic triangular set {f, constant steps}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from flint import fmpq_mpoly_ctx

from .algebra.factor import (
    canonical_points,
    factor_over_Q,
    is_irreducible_over_QT,
    specialization_check,
)
from .algebra.numberfield import NumberField, factor_over_number_field
from .algebra.poly import ExactPoly, RatExpr, as_poly, canonical_vars
from .errors import CheckFailed, ExpressionSearchFailed, NotGalois
from .groups import FiniteGroup

ROOT_LABEL = "w"


@dataclass(frozen=True)
class FFAut:
    """An automorphism: constant generator images and the image of X."""

    constants: tuple  # ((label, ExactPoly), ...)
    x_image: RatExpr

    def const_map(self) -> dict[str, ExactPoly]:
        return dict(self.constants)

    def to_json(self):
        out = {"X": self.x_image.to_json()}
        if self.constants:
            out["constants"] = {k: str(v) for k, v in self.constants}
        return out

    @classmethod
    def from_json(cls, data, const_labels: Sequence[str]) -> "FFAut":
        consts = data.get("constants", {})
        pairs = tuple((lbl, as_poly(consts.get(lbl, lbl))) for lbl in const_labels)
        return cls(pairs, RatExpr.parse(data["X"]))


class GaloisFunctionField:
    """N = L'(Z)[X]/(f), Galois over Q(Z) with the listed automorphisms."""

    def __init__(
        self,
        poly,
        automorphisms: Sequence[FFAut],
        constant_steps: Sequence = (),
        name: str = "",
    ):
        self.name = name
        self.constant_field = NumberField.from_steps(constant_steps)
        self.const_labels = tuple(self.constant_field.generator_labels)
        self.const_steps = [
            (s.generator, s.poly) for s in self.constant_field.steps
        ]
        for lbl, p in self.const_steps:
            if not p.is_monic("X"):
                raise CheckFailed(f"constant step for {lbl} must be monic", "presentation")
        self.poly = as_poly(poly)
        if not self.poly.is_monic("X"):
            raise CheckFailed("defining polynomial must be monic in X", "presentation")
        extra = self.poly.free_symbols - set(self.const_labels) - {"Z", "X"}
        if extra:
            raise CheckFailed(f"unexpected variables {sorted(extra)}", "presentation")
        self.automorphisms = list(automorphisms)
        self.variables = ("X",) + tuple(reversed(self.const_labels)) + ("Z",)
        self.ctx = fmpq_mpoly_ctx.get(self.variables, "lex")
        self._triangular = None
        self._table = None

    # ----- basic data --------------------------------------------------------
    @property
    def degree(self) -> int:
        """[N : L'(Z)]."""
        return self.poly.degree("X")

    @property
    def absolute_degree(self) -> int:
        """[N : Q(Z)]."""
        return self.degree * self.constant_field.degree

    def _m(self, p: ExactPoly):
        return p.to_mpoly(self.variables) if not p.is_zero() else self.ctx.from_dict({})

    def triangular_set(self):
        if self._triangular is None:
            tri = [self._m(self.poly)]
            for lbl, p in reversed(self.const_steps):
                tri.append(self._m(p.rename({"X": lbl}) if "X" in p.free_symbols else p))
            self._triangular = tri
        return self._triangular

    def reduce(self, f):
        """Normal form modulo the triangular set."""
        for t in self.triangular_set():
            _, f = divmod(f, t)
        return f

    # ----- applying automorphisms ------------------------------------------------
    def _apply_numerator(self, target: ExactPoly, sigma: FFAut):
        """sigma(target) * den^deg_X(target), as a reduced mpoly."""
        n = max(target.degree("X"), 0)
        num = self._m(sigma.x_image.num)
        den = self._m(sigma.x_image.den)
        const = {lbl: self._m(img) for lbl, img in sigma.constants}
        out = self.ctx.from_dict({})
        coeffs = target.coefficients("X")
        num_pows = [self.ctx.from_dict({(0,) * len(self.variables): 1})]
        for _ in range(n):
            num_pows.append(self.reduce(num_pows[-1] * num))
        den_pows = [self.ctx.from_dict({(0,) * len(self.variables): 1})]
        for _ in range(n):
            den_pows.append(den_pows[-1] * den)
        for i, c in enumerate(coeffs):
            if c.is_zero():
                continue
            cm = self._subs_constants(c, const)
            out = out + self.reduce(cm * num_pows[i] * den_pows[n - i])
        return self.reduce(out), n

    def _subs_constants(self, c: ExactPoly, const: Mapping):
        cm = self._m(c)
        if not const:
            return cm
        gens = list(self.ctx.gens())
        images = []
        for v, g in zip(self.variables, gens):
            images.append(const.get(v, g))
        return self.reduce(cm.compose(*images))

    def check_automorphism(self, sigma: FFAut) -> None:
        if sigma.x_image.den.free_symbols - {"Z"}:
            raise CheckFailed("denominators must lie in Q[Z]", "automorphism")
        cmap = sigma.const_map()
        for lbl, step in self.const_steps:
            # sigma(l) must be a root of the conjugated step polynomial
            mapped = step.subs({**cmap, "X": cmap.get(lbl, ExactPoly.var(lbl))})
            if not self.reduce(self._m(mapped)).is_zero():
                raise CheckFailed(f"constant image of {lbl} is not a root", "automorphism")
        value, _ = self._apply_numerator(self.poly, sigma)
        if not value.is_zero():
            raise CheckFailed(f"image of X is not a root of f: {sigma.x_image}", "automorphism")

    def _compose(self, s: FFAut, t: FFAut) -> tuple:
        """(s o t): constants images and (num, den) as mpolys."""
        const = {}
        s_const = {k: self._m(v) for k, v in s.constants}
        for lbl, img in t.constants:
            const[lbl] = self._subs_constants(img, s_const)
        num, n = self._apply_numerator(t.x_image.num, s)
        den = self._m(t.x_image.den) * self._m(s.x_image.den) ** n
        return const, num, den

    def _equal(self, composed: tuple, r: FFAut) -> bool:
        const, num, den = composed
        for lbl, img in r.constants:
            if not self.reduce(const[lbl] - self._m(img)).is_zero():
                return False
        lhs = self.reduce(num * self._m(r.x_image.den) - self._m(r.x_image.num) * den)
        return lhs.is_zero()

    # ----- verification -----------------------------------------------------
    def composition_table(self) -> list[list[int]]:
        if self._table is None:
            auts = self.automorphisms
            table = []
            for i, s in enumerate(auts):
                row = []
                for j, t in enumerate(auts):
                    comp = self._compose(s, t)
                    hit = [k for k, r in enumerate(auts) if self._equal(comp, r)]
                    if len(hit) != 1:
                        raise NotGalois(f"composition of automorphisms {i} and {j} is not in the list")
                    row.append(hit[0])
                table.append(row)
            self._table = table
        return self._table

    def galois_group(self) -> FiniteGroup:
        return FiniteGroup(self.composition_table(), [f"g{i}" for i in range(len(self.automorphisms))])

    def verify(self) -> dict:
        """Symbolic certificate that the listed maps form Gal(N/Q(Z))."""
        for sigma in self.automorphisms:
            self.check_automorphism(sigma)
        ident = self.automorphisms[0]
        if not self._equal(self._compose(ident, ident), ident) or ident.x_image.num != ExactPoly.var("X") or ident.x_image.den != 1:
            raise CheckFailed("first automorphism must be the identity", "automorphism")
        if len(self.automorphisms) != self.absolute_degree:
            raise NotGalois(f"{len(self.automorphisms)} automorphisms for degree {self.absolute_degree}")
        G = self.galois_group()
        return {"automorphisms": len(self.automorphisms), "degree": self.absolute_degree, "table": [list(r) for r in G.table]}

    # ----- constant restriction ----------------------------------------------------
    def constant_action(self) -> list[dict[str, ExactPoly]]:
        return [a.const_map() for a in self.automorphisms]

    # ----- specialisation -------------------------------------------------------------
    def specialize(self, z, cap: int = 36) -> NumberField:
        """The number field L'(w) with w a root of f(z, X)."""
        fz = self.poly.subs({"Z": Fraction(z)})
        K = self.constant_field
        return K.extend(fz, ROOT_LABEL, cap=cap) if K.steps else NumberField.from_poly(fz, ROOT_LABEL, cap=cap)

    def specialized_images(self, z, sigma: FFAut) -> dict[str, ExactPoly]:
        """Images of the tower generators of the specialised field."""
        z = Fraction(z)
        den = sigma.x_image.den.subs({"Z": z})
        if den.is_zero():
            raise ZeroDivisionError("automorphism denominator vanishes at this point")
        out = {lbl: img for lbl, img in sigma.constants}
        out[ROOT_LABEL] = sigma.x_image.num.subs({"Z": z}).rename({"X": ROOT_LABEL}).scale(1 / den.constant_value())
        return out

    # ----- serialisation -------------------------------------------------------------
    def to_json(self):
        return {
            "constant_steps": [{"generator": g, "poly": str(p)} for g, p in self.const_steps],
            "polynomial": str(self.poly),
            "automorphisms": [a.to_json() for a in self.automorphisms],
        }

    @classmethod
    def from_json(cls, data, name: str = "") -> "GaloisFunctionField":
        steps = data.get("constant_steps", [])
        labels = [s["generator"] for s in steps]
        auts = [FFAut.from_json(a, labels) for a in data["automorphisms"]]
        return cls(data["polynomial"], auts, steps, name=name)


def norm_to_QZ(ff: GaloisFunctionField) -> tuple[ExactPoly, int]:
    """A primitive element w + c*u of N over Q(Z) and its minimal polynomial.

    With no constant field this is f itself (c = 0).  Otherwise the norm of
    f(X - c*u) from L'(Z) down to Q(Z) is taken with the smallest c >= 1 that
    makes it squarefree.
    """
    f = ff.poly
    if not ff.const_labels:
        return f, 0
    if len(ff.const_labels) != 1:
        raise NotImplementedError("constant fields must be simple extensions here")
    u = ff.const_labels[0]
    m = ff.const_steps[0][1].rename({"X": u})
    from .algebra.factor import is_squarefree, resultant

    for c in range(1, 50):
        shifted = f.subs({"X": ExactPoly.var("X") - ExactPoly.var(u).scale(c)})
        n = resultant(m, shifted, u)
        if is_squarefree(n, "X"):
            return n, c
    raise ExpressionSearchFailed("no squarefree norm found")


# ---------------------------------------------------------------------------
# coefficient descent


@dataclass
class Descent:
    generators: list
    constants: list
    degree: int
    conjugates_ok: bool
    witness: dict | None

    def to_json(self):
        return {
            "k0_generators": self.generators,
            "rational_constants_only": not self.constants,
            "degree": self.degree,
            "conjugates_verified": self.conjugates_ok,
            "witness": {k: str(v) for k, v in (self.witness or {}).items()},
        }


def coefficient_descent(poly, conjugates: Sequence, q_expr=None, var: str = "X") -> Descent:
    """The field k0 generated over Q by all coefficients of P, the conjugates P_i and Q.

    ``poly`` is P(X) with coefficients polynomial in the parameters of M;
    ``conjugates`` are the polynomials P_i with P(P_i(x)) = 0.  The result lists
    the parameters that occur (k0 is generated by them over Q) and certifies that
    P stays irreducible over k0 with all conjugates present.
    """
    P = as_poly(poly)
    exprs = [as_poly(c) for c in conjugates]
    if q_expr is not None:
        exprs.append(as_poly(q_expr))
    params = set(P.free_symbols) - {var}
    for e in exprs:
        params |= e.free_symbols - {var}
    n = P.degree(var)
    if len(conjugates) != n:
        raise NotGalois(f"{len(conjugates)} conjugates for degree {n}")
    from .algebra.factor import resultant

    ok = True
    for c in conjugates:
        cp = as_poly(c)
        # P(P_i(x)) must vanish modulo P(x)
        comp = P.subs({var: cp})
        rem = _poly_rem(comp, P, var)
        if not rem.is_zero():
            ok = False
    if not ok:
        raise NotGalois("a listed conjugate is not a root of P")
    if len({str(as_poly(c)) for c in conjugates}) != n:
        raise NotGalois("conjugates are not distinct")
    witness = None
    if params:
        verdict = is_irreducible_over_QT(P.primitive_part(var), var)
        if not verdict:
            raise NotGalois("P is reducible over k0")
        witness = verdict.witness
    else:
        if not factor_over_Q(P).is_irreducible:
            raise NotGalois("P is reducible over Q")
    return Descent(sorted(params), [], n, ok, witness)


def _poly_rem(a: ExactPoly, b: ExactPoly, var: str) -> ExactPoly:
    variables = canonical_vars(a.variables + b.variables + (var,))
    order = (var,) + tuple(v for v in variables if v != var)
    ctx = fmpq_mpoly_ctx.get(order, "lex")
    _, r = divmod(a.to_mpoly(order), b.to_mpoly(order))
    return ExactPoly.from_mpoly(r)

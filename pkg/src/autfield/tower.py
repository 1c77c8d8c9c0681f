"""The tower E = N(T, x) obtained by adjoining a root of the trinomial gadget.

N/Q(Z) is Galois with group G; x is a root of P_y(T, X).  Every automorphism
of N extends to E by fixing x, and the gadget is there to rule out any
others.  That last statement is checked after specialisation (it is
recorded here as "deferred").
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .algebra.factor import canonical_points, is_squarefree, resultant, specialization_check
from .algebra.poly import ExactPoly, to_fraction
from .errors import GadgetCollapse
from .funcfield import GaloisFunctionField, norm_to_QZ
from .gadgets import TrinomialGadget, make_gadget

W = ExactPoly.var("W")
X = ExactPoly.var("X")

PARAMETERS = ("Z", "T")


def _primitive(n_poly: ExactPoly, g_poly: ExactPoly, start: int = 1):
    """Res_W(n(W), g(X - cW)) for the least c >= start giving a squarefree result."""
    nW = n_poly.rename({"X": "W"})
    for c in range(start, start + 50):
        shifted = g_poly.subs({"X": X - W.scale(c)})
        r = resultant(nW, shifted, "W")
        if is_squarefree(r, "X"):
            return r, c
    raise GadgetCollapse("no squarefree primitive element found")


@dataclass
class KilledTower:
    N: GaloisFunctionField
    group_order: int
    y: object
    gadget: TrinomialGadget
    Q_E: ExactPoly  # minimal polynomial of x + c*w over Q(Z, T)
    shift_E: int
    P_hat: ExactPoly  # minimal polynomial of a generator of the Galois closure
    shift_hat: int
    n_primitive: ExactPoly
    n_shift: int
    witness_E: dict = field(default_factory=dict)
    witness_hat: dict = field(default_factory=dict)
    identity_status: str = "deferred"

    @property
    def degree(self) -> int:
        """[E : Q(Z, T)]."""
        return self.Q_E.degree("X")

    @property
    def closure_degree(self) -> int:
        return self.P_hat.degree("X")

    def degree_ledger(self) -> dict:
        return {
            "N_over_QZ": self.N.absolute_degree,
            "E_over_NT": self.degree // self.N.absolute_degree,
            "E_over_QZT": self.degree,
            "expected_E_over_QZT": 3 * self.group_order,
            "Ehat_over_QZT": self.closure_degree,
            "expected_Ehat_over_QZT": 6 * self.group_order,
            "Qx_over_QT": 3,
        }

    def to_json(self):
        return {
            "N": self.N.to_json(),
            "y": str(self.y),
            "gadget": str(self.gadget.poly),
            "E_polynomial": str(self.Q_E),
            "E_primitive_element": f"x + {self.shift_E}*w" if self.N.absolute_degree > 1 else "x",
            "Ehat_polynomial": str(self.P_hat),
            "N_primitive_polynomial": str(self.n_primitive),
            "N_primitive_shift": self.n_shift,
            "witness_E": {k: str(v) for k, v in self.witness_E.items()},
            "witness_Ehat": {k: str(v) for k, v in self.witness_hat.items()},
            "degrees": self.degree_ledger(),
            "automorphism_identity": self.identity_status,
        }


def _witness(poly: ExactPoly, budget: int):
    for pt in canonical_points(len(PARAMETERS), budget):
        point = dict(zip(PARAMETERS, pt))
        ok, _, _ = specialization_check(poly, point)
        if ok:
            return point
    return None


def kill_automorphisms(N, y=0, budget: int = 6) -> KilledTower:
    """Build E = N(T, x) with x^3 + (T-y)x + (T-y) = 0 and certify its degrees.

    ``N`` is a GaloisFunctionField or a catalog entry.  Q_E (degree 3|G|) and
    the closure polynomial (degree 6|G|) are each certified irreducible over
    Q(Z, T) by a specialisation witness; failure raises GadgetCollapse.
    """
    if hasattr(N, "field") and isinstance(N.field, GaloisFunctionField):
        N = N.field
    y = to_fraction(y)
    gadget = make_gadget(y)
    n_prim, n_shift = norm_to_QZ(N)
    order = N.absolute_degree
    if order == 1:
        Q_E, c1 = gadget.poly, 0
        P_hat, c2 = gadget.closure_poly, 0
    else:
        Q_E, c1 = _primitive(n_prim, gadget.poly)
        P_hat, c2 = _primitive(n_prim, gadget.closure_poly)
    if Q_E.degree("X") != 3 * order or P_hat.degree("X") != 6 * order:
        raise GadgetCollapse("unexpected degree of the primitive polynomial")
    wE = _witness(Q_E, budget)
    if wE is None:
        raise GadgetCollapse(f"P_y factors over N(T) at every tested point (budget {budget})")
    wH = _witness(P_hat, budget)
    if wH is None:
        raise GadgetCollapse(f"closure polynomial factors at every tested point (budget {budget})")
    return KilledTower(N, order, y, gadget, Q_E, c1, P_hat, c2, n_prim, n_shift, wE, wH)

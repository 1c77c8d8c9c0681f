"""Automorphism groups, restriction maps, Galois closures and fixed fields.

Oracles: known automorphism-group orders of classical fields and the
root count of the minimal polynomial inside the field.
"""
import pytest

from autfield.algebra.numberfield import KPoly, NumberField, roots_in_field
from autfield.algebra.poly import as_poly
from autfield.embedding import count_roots_oracle
from autfield.errors import DegreeCapExceeded, InclusionNotProvided
from autfield.fields import (
    Embedding,
    automorphism_group,
    compositum_degree,
    fixed_field,
    galois_closure,
    linear_disjointness_check,
    normalizer_model_check,
    restriction_map,
    splitting_field,
)
from helpers import NON_NORMAL

KNOWN_AUT_ORDERS = [
    ("X^3 - 2", 1),
    ("X^4 - 2", 2),
    ("X^3 + X^2 - 2*X - 1", 3),  # real subfield of Q(zeta_7)
    ("X^4 + X^3 + X^2 + X + 1", 4),  # Q(zeta_5)
    ("X^4 - 10*X^2 + 1", 4),  # Q(sqrt 2, sqrt 3)
    ("X^6 - 2", 2),
    ("X^6 + 3", 6),
]


@pytest.mark.parametrize("poly,order", KNOWN_AUT_ORDERS)
def test_automorphism_group_orders(poly, order):
    L = NumberField.from_poly(poly, "a")
    aut = automorphism_group(L)
    assert aut.order == order
    assert count_roots_oracle(L) == order


def test_cube_root_of_two_over_Q_and_over_zeta3():
    K = NumberField.rationals()
    L = NumberField.from_poly("X^3 - 2", "c")
    assert automorphism_group(L).order == 1
    M = NumberField.from_poly("X^2 + X + 1", "u")
    LM = M.extend("X^3 - 2", "c")
    aut = automorphism_group(LM, over=M)
    assert aut.order == 3
    assert all(aut.fixes(i, LM.gen("u")) for i in range(3))
    assert K.is_rational()


@pytest.mark.parametrize("poly", NON_NORMAL)
def test_normalizer_model(poly):
    L = NumberField.from_poly(poly, "a")
    model = normalizer_model_check(L, cap=128)
    assert model.ok
    assert model.galois_order > L.degree  # non-normal
    assert len(model.normalizer) // len(model.fixing) == model.aut_order


def test_restriction_map_biquadratic():
    F = NumberField.from_steps([("a", "X^2 - 2"), ("b", "X^2 - 3")])
    L = NumberField.from_poly("X^2 - 2", "s")
    emb = Embedding(L, F, F.gen("a"))
    res = restriction_map(automorphism_group(F), automorphism_group(L), emb)
    assert res.partial.is_total()
    assert res.partial.image().order == 2
    assert res.partial.kernel().order == 2


def test_restriction_domain_is_stabiliser():
    # Aut(Q(2^(1/4))) = {1, a -> -a}; both stabilise Q(sqrt 2) = Q(a^2)
    F = NumberField.from_poly("X^4 - 2", "a")
    L = NumberField.from_poly("X^2 - 2", "s")
    emb = Embedding(L, F, F.gen("a") ** 2)
    res = restriction_map(automorphism_group(F), automorphism_group(L), emb)
    assert res.domain.order == 2 and res.partial.image().order == 1


def test_restriction_needs_embedding():
    F = NumberField.from_poly("X^4 - 2", "a")
    L = NumberField.from_poly("X^2 - 2", "s")
    with pytest.raises(InclusionNotProvided):
        restriction_map(automorphism_group(F), automorphism_group(L))


def test_galois_closure_and_splitting_field():
    L = NumberField.from_poly("X^3 - 2", "a")
    Lhat, emb = galois_closure(L)
    assert Lhat.degree == 6
    assert automorphism_group(Lhat).order == 6
    assert splitting_field("X^4 - 2").degree == 8
    with pytest.raises(DegreeCapExceeded):
        splitting_field("X^4 - 2", cap=4)


def test_linear_disjointness():
    F = NumberField.from_steps([("a", "X^2 - 2"), ("b", "X^2 - 3")])
    A = NumberField.from_poly("X^2 - 2", "s")
    B = NumberField.from_poly("X^2 - 3", "t")
    C = NumberField.from_poly("X^2 - 8", "r")
    ea, eb = Embedding(A, F, F.gen("a")), Embedding(B, F, F.gen("b"))
    ec = Embedding(C, F, F.gen("a") * 2)
    assert linear_disjointness_check(ea, eb)
    assert compositum_degree(ea, eb) == 4
    assert not linear_disjointness_check(ea, ec)


def test_fixed_field_of_subgroup():
    F = NumberField.from_steps([("a", "X^2 - 2"), ("b", "X^2 - 3")])
    aut = automorphism_group(F)
    fixing_a = aut.fixed_subgroup([F.gen("a")])
    E, emb = fixed_field(aut, fixing_a)
    assert E.degree == 2
    assert roots_in_field(KPoly.from_expr(E, as_poly("X^2 - 2")), E)  # E = Q(sqrt 2)
    assert all(aut.fixes(i, emb.theta_image) for i in fixing_a.sorted())

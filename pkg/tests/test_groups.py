"""Finite groups, homomorphisms, lifts and fiber products.

Brute-force enumeration over the Cayley tables is the oracle throughout.
"""
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autfield.errors import NotAHomomorphism, NotASubgroup, OrderMismatch, TargetMismatch
from autfield.groups import (
    FiniteGroup,
    GroupHom,
    all_homomorphisms,
    fiber_product,
    find_lift,
    find_section,
    is_isomorphic,
    normalizer,
    quotient,
    standard_group,
)
from helpers import SMALL_GROUPS, brute_force_homs, check_fiber_instance, group, random_fiber_instances


@pytest.mark.parametrize("name,order", [("C1", 1), ("C5", 5), ("V4", 4), ("S3", 6), ("D4", 8), ("A4", 12), ("S4", 24)])
def test_standard_group_orders_and_axioms(name, order):
    G = standard_group(name)
    assert G.order == order
    for a, b, c in itertools.product(range(order), repeat=3) if order <= 8 else []:
        assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    assert all(G.mul(g, G.inv(g)) == 0 for g in range(order))


def test_invalid_table_rejected():
    with pytest.raises(Exception):
        FiniteGroup([[0, 1], [1, 1]])


def test_hom_validation():
    C4, C2 = standard_group("C4"), standard_group("C2")
    GroupHom(C4, C2, [0, 1, 0, 1])
    with pytest.raises(NotAHomomorphism):
        GroupHom(C4, C2, [0, 1, 1, 0])


def test_all_homomorphisms_counts():
    # |Hom(C_m, C_n)| = gcd(m, n); |Hom(S3, C2)| = 2; |Hom(V4, S3)| = 10
    assert len(all_homomorphisms(standard_group("C4"), standard_group("C6"))) == 2
    assert len(all_homomorphisms(standard_group("S3"), standard_group("C2"))) == 2
    assert len(all_homomorphisms(standard_group("V4"), standard_group("S3"))) == 10


@pytest.mark.parametrize("s,t", [("C2", "C4"), ("V4", "C2"), ("C3", "S3"), ("C4", "V4")])
def test_all_homomorphisms_matches_brute_force(s, t):
    S, T = standard_group(s), standard_group(t)
    assert sorted(h.images for h in all_homomorphisms(S, T)) == sorted(brute_force_homs(S, T))


def test_is_isomorphic():
    with pytest.raises(OrderMismatch):
        is_isomorphic(standard_group("C6"), group("C2"))
    assert is_isomorphic(standard_group("C6"), standard_group("S3")) is None
    assert is_isomorphic(standard_group("C4"), standard_group("V4")) is None
    iso = is_isomorphic(standard_group("V4"), standard_group("V4"))
    assert iso is not None and iso.is_isomorphism()


def test_sections():
    S3, C2 = standard_group("S3"), standard_group("C2")
    sign = next(h for h in all_homomorphisms(S3, C2) if h.is_surjective())
    s = find_section(sign)
    assert s is not None and all(sign(s(b)) == b for b in range(2))
    C4 = standard_group("C4")
    assert find_section(GroupHom(C4, C2, [0, 1, 0, 1])) is None


def test_find_lift_injective():
    S3, C2 = standard_group("S3"), standard_group("C2")
    sign = next(h for h in all_homomorphisms(S3, C2) if h.is_surjective())
    lift = find_lift(sign, sign, injective=True)
    assert lift is not None and lift.is_isomorphism()
    assert all(sign(lift(g)) == sign(g) for g in range(6))


def test_subgroups_normalizer_quotient():
    S3 = standard_group("S3")
    with pytest.raises(NotASubgroup):
        S3.subgroup([0, 1, 2])
    order3 = [g for g in range(6) if S3.element_order(g) == 3]
    A3 = S3.subgroup([0] + order3)
    assert A3.is_normal()
    Q, pi = quotient(S3, A3)
    assert Q.order == 2 and pi.is_surjective()
    t = next(g for g in range(6) if S3.element_order(g) == 2)
    assert normalizer(S3, S3.subgroup([0, t])).order == 2


def test_fiber_product_target_mismatch():
    C2, C3 = standard_group("C2"), standard_group("C3")
    with pytest.raises(TargetMismatch):
        fiber_product(GroupHom.identity(C2), GroupHom.identity(C3))


# ---------------------------------------------------------------------------
# fiber products against brute force


@pytest.mark.parametrize("label,alpha,rho", random_fiber_instances(), ids=lambda v: v if isinstance(v, str) else "")
def test_fiber_product_random_instances(label, alpha, rho):
    check_fiber_instance(alpha, rho)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(SMALL_GROUPS), st.sampled_from(["C1", "C2", "C3"]), st.data())
def test_fiber_product_property(gname, aname, data):
    G, A = group(gname), group(aname)
    epis = [h for h in all_homomorphisms(G, A) if h.is_surjective()]
    if not epis:
        return
    alpha = data.draw(st.sampled_from(epis))
    B = group(data.draw(st.sampled_from(SMALL_GROUPS)))
    rho = data.draw(st.sampled_from(all_homomorphisms(B, A)))
    check_fiber_instance(alpha, rho)
